//! Hermitian spectral decomposition and the functional calculus built on it.

use nalgebra::linalg::SymmetricEigen;
use num_complex::Complex64;

use crate::error::{GqcError, Result};
use crate::operator::{c64, hs_norm, ComplexMatrix, HermitianOperator, UnitaryOperator};
use crate::tolerance::ToleranceConfig;

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITERS: usize = 10_000;

/// `H = V diag(λ) V†` with `λ` ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V diag(f(λ)) V†`.
    pub fn rebuild(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let weights: Vec<Complex64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        self.rebuild_diag(&weights)
    }

    /// `V diag(w) V†`.
    pub fn rebuild_diag(&self, weights: &[Complex64]) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &w) in weights.iter().enumerate() {
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= w);
        }
        scaled * v.adjoint()
    }

    pub fn reconstruction_error(&self, h: &HermitianOperator) -> f64 {
        hs_norm(&(self.rebuild(|l| c64(l, 0.0)) - h.matrix()))
    }

    pub fn orthonormality_defect(&self) -> f64 {
        crate::operator::unitarity_defect(&self.eigenvectors)
    }
}

/// Spectral decomposition of a Hermitian operator.
///
/// Eigenvalues come back ascending. Each eigenvector is phase-fixed so its
/// largest-modulus component (lowest index on ties) is real positive, and
/// vectors inside a numerically degenerate cluster are re-orthonormalized by
/// modified Gram–Schmidt in index order.
pub fn eig_hermitian(h: &HermitianOperator) -> Result<SpectralDecomposition> {
    let d = h.dim();
    let eig = SymmetricEigen::try_new(h.matrix().clone(), EIGEN_EPS, EIGEN_MAX_ITERS)
        .ok_or(GqcError::EigenConvergence(d))?;

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vecs = ComplexMatrix::zeros(d, d);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &eig.eigenvectors.column(src));
    }

    let scale = eigenvalues
        .iter()
        .fold(1.0_f64, |acc, l| acc.max(l.abs()));
    let cluster_tol = 1e-10 * scale;
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && eigenvalues[end] - eigenvalues[end - 1] <= cluster_tol {
            end += 1;
        }
        if end - start > 1 {
            gram_schmidt(&mut vecs, start, end);
        }
        start = end;
    }
    for j in 0..d {
        fix_phase(&mut vecs, j);
    }

    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors: vecs,
    })
}

fn gram_schmidt(v: &mut ComplexMatrix, start: usize, end: usize) {
    for j in start..end {
        for k in start..j {
            let proj: Complex64 = v.column(k).dotc(&v.column(j));
            let prev = v.column(k).clone_owned();
            v.column_mut(j).axpy(-proj, &prev, c64(1.0, 0.0));
        }
        let n = v.column(j).norm();
        if n > 0.0 {
            v.column_mut(j).unscale_mut(n);
        }
    }
}

fn fix_phase(v: &mut ComplexMatrix, j: usize) {
    let col = v.column(j);
    let mut best = 0;
    let mut best_mod = -1.0;
    for (i, z) in col.iter().enumerate() {
        let m = z.norm();
        if m > best_mod + 1e-12 {
            best = i;
            best_mod = m;
        }
    }
    if best_mod <= 0.0 {
        return;
    }
    let z = v[(best, j)];
    let phase = z.conj() / z.norm();
    v.column_mut(j).iter_mut().for_each(|x| *x *= phase);
}

/// Real scalar functions supported by [`matrix_fn`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralFn {
    /// Principal square root; eigenvalues in `[-psd_tol, 0)` clamp to zero.
    Sqrt,
    Abs,
    /// `λ ↦ exp(scale·λ)`.
    ExpScaled(f64),
}

impl SpectralFn {
    fn eval(self, lam: f64, psd_tol: f64) -> Result<f64> {
        match self {
            SpectralFn::Sqrt => {
                if lam < -psd_tol {
                    Err(GqcError::SpectrumDomain {
                        eigenvalue: lam,
                        tol: psd_tol,
                    })
                } else {
                    Ok(lam.max(0.0).sqrt())
                }
            }
            SpectralFn::Abs => Ok(lam.abs()),
            SpectralFn::ExpScaled(s) => Ok((s * lam).exp()),
        }
    }
}

pub fn matrix_fn(h: &HermitianOperator, f: SpectralFn) -> Result<HermitianOperator> {
    matrix_fn_with(h, f, &ToleranceConfig::default())
}

/// `V diag(f(λ)) V†`.
pub fn matrix_fn_with(
    h: &HermitianOperator,
    f: SpectralFn,
    tol: &ToleranceConfig,
) -> Result<HermitianOperator> {
    let spec = eig_hermitian(h)?;
    let values = spec
        .eigenvalues
        .iter()
        .map(|&l| f.eval(l, tol.psd_tol).map(|v| c64(v, 0.0)))
        .collect::<Result<Vec<_>>>()?;
    Ok(HermitianOperator::from_raw(spec.rebuild_diag(&values)))
}

/// `exp(−i t h)`.
pub fn unitary_evolve(h: &HermitianOperator, t: f64) -> Result<UnitaryOperator> {
    if !t.is_finite() {
        return Err(GqcError::InvalidArgument(format!("non-finite time {t}")));
    }
    let spec = eig_hermitian(h)?;
    Ok(UnitaryOperator::from_raw(
        spec.rebuild(|l| Complex64::from_polar(1.0, -t * l)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{hs_norm, identity};
    use crate::pauli::{sigma_x, sigma_z};
    use crate::random::{random_hermitian, random_psd, random_unitary, seeded};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn diagonal_and_pauli_spectra() {
        let h = HermitianOperator::diagonal(&[3.0, 1.0, 2.0]);
        let s = eig_hermitian(&h).unwrap();
        assert_eq!(s.eigenvalues.len(), 3);
        for (got, want) in s.eigenvalues.iter().zip([1.0, 2.0, 3.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-14);
        }
        let x = eig_hermitian(&HermitianOperator::new(sigma_x()).unwrap()).unwrap();
        assert_abs_diff_eq!(x.eigenvalues[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(x.eigenvalues[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn random_reconstruction() {
        let mut rng = seeded(21);
        let h = random_hermitian(&mut rng, 6, 1.0);
        let s = eig_hermitian(&h).unwrap();
        assert!(s.reconstruction_error(&h) <= 1e-10 * h.hs_norm().max(1.0));
        assert!(s.orthonormality_defect() <= 1e-10 * 6f64.sqrt());
        assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        // deterministic
        assert_eq!(s, eig_hermitian(&h).unwrap());
    }

    #[test]
    fn degenerate_spectrum_stays_orthonormal() {
        let mut rng = seeded(4);
        let w = random_unitary(&mut rng, 4);
        let h = HermitianOperator::diagonal(&[1.0, 1.0, 1.0, -2.0])
            .conjugate(&w)
            .unwrap();
        let s = eig_hermitian(&h).unwrap();
        assert!(s.orthonormality_defect() < 1e-12);
        assert!(s.reconstruction_error(&h) < 1e-12);
    }

    #[test]
    fn functional_calculus_anchors() {
        let r = matrix_fn(&HermitianOperator::diagonal(&[4.0, 1.0, 0.0]), SpectralFn::Sqrt).unwrap();
        let want = HermitianOperator::diagonal(&[2.0, 1.0, 0.0]);
        assert_abs_diff_eq!(hs_norm(&(r.matrix() - want.matrix())), 0.0, epsilon = 1e-14);

        let a = matrix_fn(&HermitianOperator::diagonal(&[-2.0, 3.0]), SpectralFn::Abs).unwrap();
        let want = HermitianOperator::diagonal(&[2.0, 3.0]);
        assert_abs_diff_eq!(hs_norm(&(a.matrix() - want.matrix())), 0.0, epsilon = 1e-14);

        let e = matrix_fn(&HermitianOperator::diagonal(&[0.0, 1.0]), SpectralFn::ExpScaled(2.0)).unwrap();
        assert_abs_diff_eq!(e.matrix()[(1, 1)].re, 2f64.exp(), epsilon = 1e-12);
    }

    #[test]
    fn sqrt_clamps_small_negatives_and_rejects_large() {
        let tiny = HermitianOperator::diagonal(&[1.0, -1e-12]);
        let r = matrix_fn(&tiny, SpectralFn::Sqrt).unwrap();
        assert_eq!(r.matrix()[(1, 1)].re, 0.0);
        let bad = HermitianOperator::diagonal(&[1.0, -1e-6]);
        assert!(matches!(
            matrix_fn(&bad, SpectralFn::Sqrt),
            Err(GqcError::SpectrumDomain { .. })
        ));
    }

    #[test]
    fn sqrt_is_conjugation_covariant() {
        let mut rng = seeded(13);
        let x = random_psd(&mut rng, 4);
        let w = random_unitary(&mut rng, 4);
        let lhs = matrix_fn(&x.conjugate(&w).unwrap(), SpectralFn::Sqrt).unwrap();
        let rhs = matrix_fn(&x, SpectralFn::Sqrt).unwrap().conjugate(&w).unwrap();
        assert!(hs_norm(&(lhs.matrix() - rhs.matrix())) <= 1e-10);
    }

    #[test]
    fn sqrt_squared_reproduces_input() {
        let mut rng = seeded(14);
        let x = random_psd(&mut rng, 5);
        let r = matrix_fn(&x, SpectralFn::Sqrt).unwrap();
        let sq = r.matrix() * r.matrix();
        assert!(hs_norm(&(sq - x.matrix())) <= 1e-9);
    }

    #[test]
    fn evolution_anchors() {
        let u = unitary_evolve(&HermitianOperator::zero(3), 2.5).unwrap();
        assert_abs_diff_eq!(hs_norm(&(u.matrix() - identity(3))), 0.0);

        // exp(−iθσx) = cosθ·I − i sinθ·σx with θ = π/2
        let h = HermitianOperator::new(sigma_x()).unwrap().scale(FRAC_PI_2);
        let u = unitary_evolve(&h, 1.0).unwrap();
        let want = sigma_x() * c64(0.0, -1.0);
        assert!(hs_norm(&(u.matrix() - want)) <= 1e-10);

        let mut rng = seeded(2);
        let h = random_hermitian(&mut rng, 4, 1.0);
        let ut = unitary_evolve(&h, 0.3).unwrap();
        let us = unitary_evolve(&h, 0.9).unwrap();
        let uts = unitary_evolve(&h, 1.2).unwrap();
        let prod = ut.compose(&us).unwrap();
        assert!(hs_norm(&(prod.matrix() - uts.matrix())) <= 1e-12);

        let hz = HermitianOperator::new(sigma_z()).unwrap();
        let g = random_hermitian(&mut rng, 2, 1.0);
        let u = unitary_evolve(&g, 0.7).unwrap();
        assert_abs_diff_eq!(hz.conjugate(&u).unwrap().hs_norm(), hz.hs_norm(), epsilon = 1e-10);
    }
}
