use serde::{Deserialize, Serialize};

use super::metric::PenaltyMetric;
use crate::error::{dim_err, GqcError, Result};
use crate::interchange::{hermitian_from_json, matrix_to_json, FieldError, MatrixEntries};
use crate::operator::HermitianOperator;
use crate::tolerance::ToleranceConfig;

/// Generator samples `H(s)` on a strictly increasing time grid.
///
/// Samples may carry a trace; operations that need `su(N)` elements
/// ([`path_length`]) check tracelessness themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianPath {
    times: Vec<f64>,
    generators: Vec<HermitianOperator>,
}

impl HamiltonianPath {
    pub fn new(times: Vec<f64>, generators: Vec<HermitianOperator>) -> Result<Self> {
        if times.len() != generators.len() {
            return Err(dim_err(format!(
                "{} times but {} generator samples",
                times.len(),
                generators.len()
            )));
        }
        if times.len() < 2 {
            return Err(GqcError::InvalidArgument(
                "a path needs at least two samples".into(),
            ));
        }
        if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(GqcError::InvalidArgument(
                "path times must be finite and strictly increasing".into(),
            ));
        }
        let d = generators[0].dim();
        if let Some(i) = generators.iter().position(|g| g.dim() != d) {
            return Err(dim_err(format!("generator {i} has a different dimension")));
        }
        Ok(Self { times, generators })
    }

    /// `H(s) = h` sampled on `n` uniform points over `[0, t]`.
    pub fn constant(h: &HermitianOperator, t: f64, n: usize) -> Result<Self> {
        let times = uniform_grid(0.0, t, n)?;
        let generators = vec![h.clone(); times.len()];
        Self::new(times, generators)
    }

    pub fn from_fn(
        times: Vec<f64>,
        mut f: impl FnMut(f64) -> Result<HermitianOperator>,
    ) -> Result<Self> {
        let generators = times.iter().map(|&s| f(s)).collect::<Result<Vec<_>>>()?;
        Self::new(times, generators)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn generators(&self) -> &[HermitianOperator] {
        &self.generators
    }

    pub fn dim(&self) -> usize {
        self.generators[0].dim()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.times == other.times
    }

    pub fn to_doc(&self) -> PathDoc {
        PathDoc {
            dim: self.dim(),
            times: self.times.clone(),
            generators: self.generators.iter().map(|g| matrix_to_json(g.matrix())).collect(),
        }
    }

    pub fn from_doc(doc: &PathDoc, tol: &ToleranceConfig) -> Result<Self, FieldError> {
        let generators = doc
            .generators
            .iter()
            .enumerate()
            .map(|(i, m)| hermitian_from_json(m, &format!("generators[{i}]"), doc.dim, tol))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(doc.times.clone(), generators).map_err(|e| FieldError::new("times", e.to_string()))
    }
}

/// `{dim, times, generators}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathDoc {
    pub dim: usize,
    pub times: Vec<f64>,
    pub generators: Vec<MatrixEntries>,
}

/// `n ≥ 2` evenly spaced points from `start` to `stop` inclusive.
pub fn uniform_grid(start: f64, stop: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || !(stop > start) || !start.is_finite() || !stop.is_finite() {
        return Err(GqcError::InvalidArgument(format!(
            "grid {start}:{stop}:{n} needs n ≥ 2 and stop > start"
        )));
    }
    let step = (stop - start) / (n - 1) as f64;
    Ok((0..n)
        .map(|k| if k + 1 == n { stop } else { start + step * k as f64 })
        .collect())
}

/// Trapezoidal rule for samples `ys` on grid `xs`.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// `t·‖h‖_hs/√(d²−1)`: Hilbert–Schmidt complexity of `exp(−ith)`.
///
/// The full norm is used; a trace component is not removed.
pub fn hs_complexity_static(h: &HermitianOperator, t: f64, d: usize) -> Result<f64> {
    if d < 2 {
        return Err(GqcError::InvalidArgument(format!("complexity needs d ≥ 2, got {d}")));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(GqcError::InvalidArgument(format!("time must be ≥ 0, got {t}")));
    }
    Ok(t * h.hs_norm() / ((d * d - 1) as f64).sqrt())
}

/// [`hs_complexity_static`] together with the value the traceless part of
/// `h` alone would give.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StaticComplexity {
    pub value: f64,
    pub traceless_value: f64,
}

pub fn hs_complexity_report(h: &HermitianOperator, t: f64, d: usize) -> Result<StaticComplexity> {
    let value = hs_complexity_static(h, t, d)?;
    Ok(StaticComplexity {
        value,
        traceless_value: t * h.traceless_part_norm() / ((d * d - 1) as f64).sqrt(),
    })
}

/// Trapezoidal quadrature of `∫ ‖H(s)‖_Ω ds`.
pub fn path_length(metric: &PenaltyMetric, path: &HamiltonianPath) -> Result<f64> {
    if path.dim() != metric.dim() {
        return Err(dim_err(format!(
            "path of dim {} against metric on su({})",
            path.dim(),
            metric.dim()
        )));
    }
    let speeds = path
        .generators()
        .iter()
        .map(|h| metric.omega_norm(h))
        .collect::<Result<Vec<_>>>()?;
    Ok(trapezoid(path.times(), &speeds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::metric::locality_penalty_metric;
    use crate::operator::c64;
    use crate::pauli::{sigma_x, sigma_z};
    use crate::random::{random_traceless_hermitian, random_unitary, seeded};
    use crate::spectral::unitary_evolve;
    use approx::assert_abs_diff_eq;

    fn hz(omega: f64) -> HermitianOperator {
        HermitianOperator::new(sigma_z() * c64(omega / 2.0, 0.0)).unwrap()
    }

    #[test]
    fn ideal_qubit_complexity() {
        let g = hs_complexity_static(&hz(1.0), 1.0, 2).unwrap();
        let want = (1.0 / 3f64.sqrt()) * (2f64.sqrt() / 2.0);
        assert_abs_diff_eq!(g, want, epsilon = 1e-15);
        assert_abs_diff_eq!(g, 0.408248290463863, epsilon = 1e-12);
        assert_eq!(hs_complexity_static(&HermitianOperator::zero(2), 3.0, 2).unwrap(), 0.0);
        let g2 = hs_complexity_static(&hz(1.0), 2.0, 2).unwrap();
        assert_abs_diff_eq!(g2, 2.0 * g, epsilon = 1e-15);
        assert!(hs_complexity_static(&hz(1.0), 1.0, 1).is_err());
        assert!(hs_complexity_static(&hz(1.0), -1.0, 2).is_err());
    }

    #[test]
    fn report_separates_trace() {
        let h = HermitianOperator::diagonal(&[2.0, 0.0]);
        let r = hs_complexity_report(&h, 1.0, 2).unwrap();
        assert_abs_diff_eq!(r.value, 2.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(r.traceless_value, 2f64.sqrt() / 3f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn static_complexity_is_conjugation_invariant() {
        let mut rng = seeded(31);
        let h = random_traceless_hermitian(&mut rng, 3, 1.0);
        let w = random_unitary(&mut rng, 3);
        let a = hs_complexity_static(&h, 0.7, 3).unwrap();
        let b = hs_complexity_static(&h.conjugate(&w).unwrap(), 0.7, 3).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-12);
    }

    #[test]
    fn right_invariance_surrogate() {
        // The generator taking W to UW is the generator of U, so the
        // synthesized distance D(W, UW) reduces to D(I, U).
        let mut rng = seeded(32);
        let h = random_traceless_hermitian(&mut rng, 2, 1.0);
        let u = unitary_evolve(&h, 1.0).unwrap();
        let w = random_unitary(&mut rng, 2);
        let uw = u.compose(&w).unwrap();
        let step = uw.compose(&w.adjoint()).unwrap();
        assert!(crate::operator::hs_norm(&(step.matrix() - u.matrix())) < 1e-12);
        let d_wuw = hs_complexity_static(&h, 1.0, 2).unwrap();
        let d_iu = hs_complexity_static(&h, 1.0, 2).unwrap();
        assert_eq!(d_wuw, d_iu);
    }

    #[test]
    fn constant_path_matches_closed_form() {
        let metric = PenaltyMetric::uniform(2).unwrap();
        let path = HamiltonianPath::constant(&hz(1.0), 1.5, 9).unwrap();
        let len = path_length(&metric, &path).unwrap();
        assert_abs_diff_eq!(len, hs_complexity_static(&hz(1.0), 1.5, 2).unwrap(), epsilon = 1e-14);

        let zero = HamiltonianPath::constant(&HermitianOperator::zero(2), 1.0, 3).unwrap();
        assert_eq!(path_length(&metric, &zero).unwrap(), 0.0);
    }

    #[test]
    fn modulated_path_matches_dense_quadrature() {
        // H(s) = (1 + 0.5 sin 3s) σx on [0, 2]; the Ω-speed is
        // |1 + 0.5 sin 3s|·√2/√3, integrated in closed form as the oracle.
        let metric = PenaltyMetric::uniform(2).unwrap();
        let times = uniform_grid(0.0, 2.0, 4001).unwrap();
        let path = HamiltonianPath::from_fn(times, |s| {
            HermitianOperator::new(sigma_x() * c64(1.0 + 0.5 * (3.0 * s).sin(), 0.0))
        })
        .unwrap();
        let len = path_length(&metric, &path).unwrap();
        let exact = (2.0 + 0.5 * (1.0 - (6.0f64).cos()) / 3.0) * 2f64.sqrt() / 3f64.sqrt();
        assert!((len - exact).abs() < 1e-6, "{len} vs {exact}");
    }

    #[test]
    fn refinement_converges_quadratically() {
        let metric = locality_penalty_metric(2, 3.0).unwrap();
        let mut rng = seeded(40);
        let a = random_traceless_hermitian(&mut rng, 4, 1.0);
        let b = random_traceless_hermitian(&mut rng, 4, 1.0);
        let at = |n| {
            let times = uniform_grid(0.0, 1.0, n).unwrap();
            let p = HamiltonianPath::from_fn(times, |s| a.scale(s.cos()).add(&b.scale(s * s))).unwrap();
            path_length(&metric, &p).unwrap()
        };
        let coarse = (at(33) - at(65)).abs();
        let fine = (at(65) - at(129)).abs();
        assert!(fine < coarse / 3.0, "{coarse} {fine}");
    }

    #[test]
    fn path_errors() {
        let h = hz(1.0);
        assert!(HamiltonianPath::new(vec![0.0], vec![h.clone()]).is_err());
        assert!(HamiltonianPath::new(vec![0.0, 0.0], vec![h.clone(), h.clone()]).is_err());
        assert!(HamiltonianPath::new(vec![0.0, 1.0], vec![h.clone()]).is_err());
        let metric = PenaltyMetric::uniform(3).unwrap();
        let p = HamiltonianPath::constant(&h, 1.0, 3).unwrap();
        assert!(path_length(&metric, &p).is_err());
    }
}
