//! Unconstrained coordinates for dilations of fixed `(d_S, d_E)`.
//!
//! `θ = (θ_H, θ_ρ)`: `θ_H` holds the `n²` coefficients of `H_tot` over the
//! orthonormal Hermitian basis of the total space (identity direction
//! first), `θ_ρ` holds the real and imaginary parts of a `d_E×d_E` factor
//! `G` with `ρ_E = GG†/Tr(GG†)`.

use crate::dilation::Dilation;
use crate::error::Result;
use crate::operator::{c64, hs_inner, identity, ComplexMatrix, DensityOperator, HermitianOperator};
use crate::pauli::hermitian_basis;
use crate::spectral::{matrix_fn, SpectralFn};

#[derive(Debug, Clone)]
pub struct DilationParameterization {
    d_s: usize,
    d_e: usize,
    basis: Vec<ComplexMatrix>,
}

impl DilationParameterization {
    pub fn new(d_s: usize, d_e: usize) -> Self {
        Self {
            d_s,
            d_e,
            basis: hermitian_basis(d_s * d_e),
        }
    }

    pub fn d_s(&self) -> usize {
        self.d_s
    }

    pub fn d_e(&self) -> usize {
        self.d_e
    }

    pub fn n_hamiltonian(&self) -> usize {
        self.basis.len()
    }

    pub fn n_state(&self) -> usize {
        2 * self.d_e * self.d_e
    }

    pub fn len(&self) -> usize {
        self.n_hamiltonian() + self.n_state()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn hamiltonian(&self, theta: &[f64]) -> HermitianOperator {
        let n = self.d_s * self.d_e;
        let m = self
            .basis
            .iter()
            .zip(theta)
            .fold(ComplexMatrix::zeros(n, n), |acc, (b, &c)| acc + b * c64(c, 0.0));
        HermitianOperator::from_raw(m)
    }

    /// The factor `G`, normalized so `Tr(GG†) = 1`; falls back to
    /// `I/√d_E` when `G = 0`.
    pub fn state_factor(&self, theta: &[f64]) -> ComplexMatrix {
        let d = self.d_e;
        let off = self.n_hamiltonian();
        let g = ComplexMatrix::from_fn(d, d, |i, j| {
            let k = off + 2 * (i * d + j);
            c64(theta[k], theta[k + 1])
        });
        let norm_sq: f64 = g.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq > 1e-300 && norm_sq.is_finite() {
            g / c64(norm_sq.sqrt(), 0.0)
        } else {
            identity(d) / c64((d as f64).sqrt(), 0.0)
        }
    }

    pub fn state(&self, theta: &[f64]) -> DensityOperator {
        let g = self.state_factor(theta);
        DensityOperator::from_raw(&g * g.adjoint())
    }

    pub fn decode(&self, theta: &[f64]) -> Result<Dilation> {
        Dilation::new(self.d_s, self.d_e, self.state(theta), self.hamiltonian(theta))
    }

    /// Inverse of [`decode`](Self::decode) up to the gauge of `G`: uses
    /// `G = √ρ_E`.
    pub fn encode(&self, d: &Dilation) -> Result<Vec<f64>> {
        let mut theta: Vec<f64> = self
            .basis
            .iter()
            .map(|b| hs_inner(b, d.h_tot().matrix()).map(|z| z.re))
            .collect::<Result<_>>()?;
        let root = matrix_fn(&HermitianOperator::from_raw(d.rho_e().matrix().clone()), SpectralFn::Sqrt)?;
        let r = root.matrix();
        for i in 0..self.d_e {
            for j in 0..self.d_e {
                theta.push(r[(i, j)].re);
                theta.push(r[(i, j)].im);
            }
        }
        Ok(theta)
    }
}

/// Choi matrix of `Tr_E[U (·⊗GG†) U†]` via `C = RR†` with
/// `R[(i,a),(k,l)] = M[(a,k),(i,l)]`, `M = U(I⊗G)`.
pub(crate) fn fast_choi(u: &ComplexMatrix, g: &ComplexMatrix, d_s: usize, d_e: usize) -> ComplexMatrix {
    let m = u * crate::operator::tensor(&identity(d_s), g);
    let r = ComplexMatrix::from_fn(d_s * d_s, d_e * d_e, |row, col| {
        let (i, a) = (row / d_s, row % d_s);
        let (k, l) = (col / d_e, col % d_e);
        m[(a * d_e + k, i * d_e + l)]
    });
    &r * r.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dilation::choi_matrix;
    use crate::operator::hs_norm;
    use crate::random::{random_density, random_hermitian, seeded};
    use crate::spectral::unitary_evolve;

    #[test]
    fn encode_decode_round_trip() {
        let mut rng = seeded(40);
        let p = DilationParameterization::new(2, 3);
        assert_eq!(p.len(), 36 + 18);
        let d = Dilation::new(2, 3, random_density(&mut rng, 3), random_hermitian(&mut rng, 6, 1.0)).unwrap();
        let back = p.decode(&p.encode(&d).unwrap()).unwrap();
        assert!(hs_norm(&(back.h_tot().matrix() - d.h_tot().matrix())) < 1e-12);
        assert!(hs_norm(&(back.rho_e().matrix() - d.rho_e().matrix())) < 1e-12);
    }

    #[test]
    fn decode_always_valid() {
        let p = DilationParameterization::new(2, 2);
        let zero = vec![0.0; p.len()];
        let d = p.decode(&zero).unwrap();
        assert!(hs_norm(&(d.rho_e().matrix() - DensityOperator::maximally_mixed(2).matrix())) < 1e-15);
        let mut rng = seeded(41);
        let theta: Vec<f64> = (0..p.len()).map(|_| crate::random::gaussian(&mut rng)).collect();
        let d = p.decode(&theta).unwrap();
        DensityOperator::new(d.rho_e().matrix().clone()).unwrap();
    }

    #[test]
    fn fast_choi_matches_reference() {
        let mut rng = seeded(42);
        let p = DilationParameterization::new(2, 3);
        let theta: Vec<f64> = (0..p.len()).map(|_| crate::random::gaussian(&mut rng)).collect();
        let d = p.decode(&theta).unwrap();
        let u = unitary_evolve(d.h_tot(), 0.8).unwrap();
        let fast = fast_choi(u.matrix(), &p.state_factor(&theta), 2, 3);
        let slow = choi_matrix(&d, 0.8).unwrap();
        assert!(hs_norm(&(fast - slow.matrix())) < 1e-12);
    }
}
