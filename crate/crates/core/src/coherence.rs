//! Computational-basis dephasing, the linear-entropy coherence
//! `C(ρ) = Tr ρ² − Tr ℰ(ρ)²` and the coherence lower bounds on unitary
//! complexity.

use serde::Serialize;

use crate::error::{dim_err, GqcError, Result};
use crate::geometry::{hs_complexity_static, HamiltonianPath};
use crate::operator::{c64, commutator, hs_norm, ComplexMatrix, DensityOperator, HermitianOperator};
use crate::spectral::unitary_evolve;

/// Zeroes the off-diagonal entries of any square matrix.
pub fn dephase_matrix(m: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), m.ncols(), |i, j| if i == j { m[(i, j)] } else { c64(0.0, 0.0) })
}

pub fn dephase(rho: &DensityOperator) -> DensityOperator {
    DensityOperator::from_raw(dephase_matrix(rho.matrix()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceSplit {
    pub diagonal: ComplexMatrix,
    pub offdiagonal: ComplexMatrix,
}

impl CoherenceSplit {
    pub fn of(m: &ComplexMatrix) -> Self {
        let diagonal = dephase_matrix(m);
        let offdiagonal = m - &diagonal;
        Self { diagonal, offdiagonal }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoherenceReport {
    pub c_value: f64,
    /// `1 − Tr ρ²`.
    pub s_linear_rho: f64,
    /// `1 − Tr ℰ(ρ)²`.
    pub s_linear_dephased: f64,
    /// `‖ρ − ℰ(ρ)‖_hs²`.
    pub offdiag_norm_sq: f64,
}

pub fn coherence(rho: &DensityOperator) -> CoherenceReport {
    let split = CoherenceSplit::of(rho.matrix());
    let purity = hs_norm(rho.matrix()).powi(2);
    let purity_dephased = hs_norm(&split.diagonal).powi(2);
    CoherenceReport {
        c_value: purity - purity_dephased,
        s_linear_rho: 1.0 - purity,
        s_linear_dephased: 1.0 - purity_dephased,
        offdiag_norm_sq: hs_norm(&split.offdiagonal).powi(2),
    }
}

fn sqrt_c(m: &ComplexMatrix) -> f64 {
    hs_norm(&CoherenceSplit::of(m).offdiagonal)
}

/// `(√C(ρ_t) − √C(ρ_0)) / (2√(d²−1))`, unclamped.
pub fn lower_bound_appendix(rho0: &DensityOperator, rho_t: &DensityOperator, d: usize) -> Result<f64> {
    if rho0.dim() != d || rho_t.dim() != d {
        return Err(dim_err(format!(
            "states of dimension {} and {} for d = {d}",
            rho0.dim(),
            rho_t.dim()
        )));
    }
    if d < 2 {
        return Err(GqcError::InvalidArgument("coherence bound needs d ≥ 2".into()));
    }
    let s = ((d * d - 1) as f64).sqrt();
    Ok((sqrt_c(rho_t.matrix()) - sqrt_c(rho0.matrix())) / (2.0 * s))
}

/// `|C(ρ(t)) − C(ρ_0)| / (√(d²−1)‖h‖_hs)` with `ρ(t) = e^{−ith} ρ_0 e^{ith}`.
pub fn lower_bound_main(h: &HermitianOperator, rho0: &DensityOperator, t: f64, d: usize) -> Result<f64> {
    if h.dim() != d || rho0.dim() != d {
        return Err(dim_err("generator, state and d must agree"));
    }
    if d < 2 {
        return Err(GqcError::InvalidArgument("coherence bound needs d ≥ 2".into()));
    }
    let norm = h.hs_norm();
    if norm == 0.0 {
        return Err(GqcError::InvalidArgument("zero generator".into()));
    }
    let u = unitary_evolve(h, t)?;
    let rho_t = rho0.conjugate(&u)?;
    let dc = coherence(&rho_t).c_value - coherence(rho0).c_value;
    Ok(dc.abs() / (((d * d - 1) as f64).sqrt() * norm))
}

/// One verifier evaluation of the main coherence bound against
/// `hs_complexity_static(h, t, d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MainBoundCheck {
    pub t: f64,
    pub bound: f64,
    pub complexity: f64,
    pub margin: f64,
    pub violated: bool,
}

/// Records, never asserts, whether the main coherence bound holds.
pub fn verify_main_bound(h: &HermitianOperator, rho0: &DensityOperator, t: f64) -> Result<MainBoundCheck> {
    let d = h.dim();
    let bound = lower_bound_main(h, rho0, t, d)?;
    let complexity = hs_complexity_static(h, t, d)?;
    Ok(MainBoundCheck {
        t,
        bound,
        complexity,
        margin: complexity - bound,
        violated: bound > complexity + 1e-12,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthRow {
    pub t: f64,
    pub sqrt_c: f64,
    /// `2∫₀ᵗ‖H‖_hs ds` along the simulated piecewise-constant path.
    pub budget: f64,
    /// `budget − (√C(t) − √C(0))`.
    pub margin: f64,
    /// Discretization uncertainty of `√C(t)`: its change under the last
    /// substep doubling.
    pub slack: f64,
    /// Largest `‖[H, ρ]‖_hs / (2‖H‖_hs)` seen up to `t` (at most one).
    pub commutator_ratio: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    pub rows: Vec<GrowthRow>,
    /// Midpoint substeps per grid interval after refinement.
    pub substeps: usize,
    pub min_margin: f64,
    pub all_pass: bool,
}

pub const GROWTH_REFINE_TOL: f64 = 1e-10;
pub const GROWTH_MAX_SUBSTEPS: usize = 1024;

fn simulate(path: &HamiltonianPath, rho0: &DensityOperator, substeps: usize) -> Result<Vec<GrowthRow>> {
    let times = path.times();
    let gens = path.generators();
    let c0 = sqrt_c(rho0.matrix());
    let mut rho = rho0.matrix().clone();
    let mut budget = 0.0;
    let mut ratio = 0.0f64;
    let mut rows = Vec::with_capacity(times.len());
    let row = |t: f64, rho: &ComplexMatrix, budget: f64, ratio: f64| {
        let s = sqrt_c(rho);
        let margin = budget - (s - c0);
        GrowthRow {
            t,
            sqrt_c: s,
            budget,
            margin,
            slack: 0.0,
            commutator_ratio: ratio,
            pass: margin >= 0.0,
        }
    };
    rows.push(row(times[0], &rho, budget, ratio));
    for k in 0..times.len() - 1 {
        let dt = (times[k + 1] - times[k]) / substeps as f64;
        for j in 0..substeps {
            // midpoint of the linear interpolant on this substep
            let w = (j as f64 + 0.5) / substeps as f64;
            let h = HermitianOperator::from_raw(
                gens[k].matrix() * c64(1.0 - w, 0.0) + gens[k + 1].matrix() * c64(w, 0.0),
            );
            let hn = h.hs_norm();
            if hn > 0.0 {
                ratio = ratio.max(hs_norm(&commutator(h.matrix(), &rho)) / (2.0 * hn));
            }
            let u = unitary_evolve(&h, dt)?;
            rho = u.matrix() * &rho * u.matrix().adjoint();
            budget += 2.0 * dt * hn;
        }
        rows.push(row(times[k + 1], &rho, budget, ratio));
    }
    Ok(rows)
}

/// Integrates `ρ` along `h_path` and checks
/// `√C(t) − √C(0) ≤ 2∫₀ᵗ‖H(s)‖_hs ds` at every grid time.
///
/// Each grid interval is split into midpoint substeps of the linearly
/// interpolated generator; the substep count doubles until `√C` on the grid
/// moves by less than `GROWTH_REFINE_TOL` or the cap is reached. The last
/// change is kept as per-row slack; a slack larger than the budget is an
/// error.
pub fn coherence_growth_check(h_path: &HamiltonianPath, rho0: &DensityOperator) -> Result<GrowthReport> {
    if h_path.dim() != rho0.dim() {
        return Err(dim_err("path and state dimensions differ"));
    }
    let mut substeps = 1;
    let mut rows = simulate(h_path, rho0, substeps)?;
    loop {
        let finer = simulate(h_path, rho0, substeps * 2)?;
        substeps *= 2;
        let prev = std::mem::replace(&mut rows, finer);
        for (row, old) in rows.iter_mut().zip(&prev) {
            row.slack = (row.sqrt_c - old.sqrt_c).abs();
        }
        let change = rows.iter().map(|r| r.slack).fold(0.0, f64::max);
        if change < GROWTH_REFINE_TOL || substeps >= GROWTH_MAX_SUBSTEPS {
            break;
        }
    }
    if let Some(r) = rows.iter().find(|r| r.slack > r.budget) {
        return Err(GqcError::Integration(format!(
            "grid too coarse: slack {:e} exceeds budget {:e} at t = {}",
            r.slack, r.budget, r.t
        )));
    }
    for r in &mut rows {
        r.pass = r.margin + r.slack >= 0.0;
    }
    let min_margin = rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    Ok(GrowthReport {
        all_pass: rows.iter().all(|r| r.pass),
        rows,
        substeps,
        min_margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::hs_inner;
    use crate::pauli::{sigma_x, sigma_z};
    use crate::random::{random_density, random_hermitian, random_matrix, seeded};
    use approx::assert_abs_diff_eq;

    fn plus() -> DensityOperator {
        DensityOperator::pure(&[c64(1.0, 0.0), c64(1.0, 0.0)]).unwrap()
    }

    #[test]
    fn dephasing_anchors_and_projector_laws() {
        let diag = DensityOperator::basis_state(2, 1).unwrap();
        assert_eq!(dephase(&diag), diag);
        assert!(hs_norm(&(dephase(&plus()).matrix() - DensityOperator::maximally_mixed(2).matrix())) < 1e-15);

        let mut rng = seeded(30);
        for _ in 0..10 {
            let a = random_matrix(&mut rng, 3, 3);
            let b = random_matrix(&mut rng, 3, 3);
            let lhs = hs_inner(&a, &dephase_matrix(&b)).unwrap();
            let rhs = hs_inner(&dephase_matrix(&a), &b).unwrap();
            assert!((lhs - rhs).norm() < 1e-12);
            assert_eq!(dephase_matrix(&dephase_matrix(&a)), dephase_matrix(&a));
            assert!(hs_norm(&dephase_matrix(&a)) <= hs_norm(&a) + 1e-12);
        }
    }

    #[test]
    fn coherence_anchors() {
        assert_eq!(coherence(&DensityOperator::basis_state(2, 0).unwrap()).c_value, 0.0);
        assert_abs_diff_eq!(coherence(&plus()).c_value, 0.5, epsilon = 1e-15);
        let mut rng = seeded(31);
        for _ in 0..20 {
            let rho = random_density(&mut rng, 2);
            let r = coherence(&rho);
            assert_abs_diff_eq!(r.c_value, 2.0 * rho.matrix()[(0, 1)].norm_sqr(), epsilon = 1e-12);
            assert_abs_diff_eq!(r.c_value, r.offdiag_norm_sq, epsilon = 1e-12);
            assert_abs_diff_eq!(r.c_value, r.s_linear_dephased - r.s_linear_rho, epsilon = 1e-12);
        }
    }

    #[test]
    fn appendix_bound_anchors() {
        let zero = DensityOperator::basis_state(2, 0).unwrap();
        let b = lower_bound_appendix(&zero, &plus(), 2).unwrap();
        assert_abs_diff_eq!(b, (0.5f64).sqrt() / (2.0 * 3f64.sqrt()), epsilon = 1e-15);
        assert_eq!(lower_bound_appendix(&plus(), &plus(), 2).unwrap(), 0.0);
        assert!(lower_bound_appendix(&plus(), &DensityOperator::maximally_mixed(3), 2).is_err());

        let mut rng = seeded(32);
        for _ in 0..20 {
            let h = random_hermitian(&mut rng, 2, 1.0);
            let rho0 = random_density(&mut rng, 2);
            let t = 2.0 * crate::random::gaussian(&mut rng).abs();
            let rho_t = rho0.conjugate(&unitary_evolve(&h, t).unwrap()).unwrap();
            assert!(lower_bound_appendix(&rho0, &rho_t, 2).unwrap() <= hs_complexity_static(&h, t, 2).unwrap());
        }
    }

    #[test]
    fn main_bound_verifier() {
        let h = HermitianOperator::new(sigma_x() * c64(0.5, 0.0)).unwrap();
        let zero = DensityOperator::basis_state(2, 0).unwrap();
        assert_eq!(lower_bound_main(&h, &zero, 0.0, 2).unwrap(), 0.0);
        for k in 1..=10 {
            let c = verify_main_bound(&h, &zero, 0.1 * k as f64).unwrap();
            assert!(!c.violated, "{c:?}");
        }
        assert!(lower_bound_main(&HermitianOperator::zero(2), &zero, 1.0, 2).is_err());

        // small generator, long time: the main bound is violated
        let h = HermitianOperator::new(sigma_x() * c64(0.01, 0.0)).unwrap();
        assert!(verify_main_bound(&h, &zero, 2.0).unwrap().violated);
    }

    #[test]
    fn growth_check_holds_and_freezes() {
        let zero = DensityOperator::basis_state(2, 0).unwrap();
        let h = HermitianOperator::new(sigma_x() * c64(0.5, 0.0)).unwrap();
        let path = HamiltonianPath::constant(&h, 3.0, 31).unwrap();
        let r = coherence_growth_check(&path, &zero).unwrap();
        assert!(r.all_pass && r.rows[1..].iter().all(|row| row.margin > 0.0));
        assert!(r.rows.iter().all(|row| row.commutator_ratio <= 1.0));

        let still = HamiltonianPath::constant(&HermitianOperator::zero(2), 1.0, 5).unwrap();
        let r = coherence_growth_check(&still, &plus()).unwrap();
        assert!(r.rows.iter().all(|row| (row.sqrt_c - r.rows[0].sqrt_c).abs() < 1e-15));

        let times = crate::geometry::uniform_grid(0.0, 2.0, 21).unwrap();
        let modulated = HamiltonianPath::from_fn(times, |s| {
            HermitianOperator::new(sigma_x() * c64(s.cos(), 0.0) + sigma_z() * c64(0.3 * s, 0.0))
        })
        .unwrap();
        let r = coherence_growth_check(&modulated, &zero).unwrap();
        assert!(r.all_pass);
    }
}
