//! Seeded random instances for property checks and optimizer starts.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::operator::{c64, ComplexMatrix, DensityOperator, HermitianOperator, UnitaryOperator};

pub type GqcRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> GqcRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Complex Ginibre matrix with unit-variance real and imaginary parts.
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| c64(gaussian(rng), gaussian(rng)))
}

/// `scale·(G + G†)/2` for a Ginibre `G`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize, scale: f64) -> HermitianOperator {
    let g = random_matrix(rng, d, d);
    HermitianOperator::from_raw((&g + g.adjoint()) * c64(0.5 * scale, 0.0))
}

/// Traceless Hermitian operator.
pub fn random_traceless_hermitian<R: Rng + ?Sized>(
    rng: &mut R,
    d: usize,
    scale: f64,
) -> HermitianOperator {
    let h = random_hermitian(rng, d, scale);
    let shift = ComplexMatrix::identity(d, d) * c64(h.trace() / d as f64, 0.0);
    HermitianOperator::from_raw(h.matrix() - shift)
}

/// `G G†`, positive semidefinite.
pub fn random_psd<R: Rng + ?Sized>(rng: &mut R, d: usize) -> HermitianOperator {
    let g = random_matrix(rng, d, d);
    HermitianOperator::from_raw(&g * g.adjoint())
}

/// Full-rank mixed state `G G† / Tr(G G†)`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DensityOperator {
    let g = random_matrix(rng, d, d);
    let p = &g * g.adjoint();
    let tr: f64 = p.diagonal().iter().map(|z| z.re).sum();
    DensityOperator::from_raw(p * c64(1.0 / tr, 0.0))
}

/// Haar-distributed unitary via QR of a Ginibre matrix with phase correction.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> UnitaryOperator {
    let g = random_matrix(rng, d, d);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let z = r[(j, j)];
        if z.norm() > 0.0 {
            let phase = z / z.norm();
            q.column_mut(j).iter_mut().for_each(|x| *x *= phase);
        }
    }
    UnitaryOperator::from_raw(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_satisfy_their_invariants() {
        let mut rng = seeded(1);
        let u = random_unitary(&mut rng, 4);
        assert!(UnitaryOperator::new(u.into_matrix()).is_ok());
        let rho = random_density(&mut rng, 3);
        assert!(DensityOperator::new(rho.into_matrix()).is_ok());
        let h = random_traceless_hermitian(&mut rng, 3, 1.0);
        assert!(h.trace().abs() < 1e-14);
    }

    #[test]
    fn seeds_reproduce() {
        let a = random_matrix(&mut seeded(7), 2, 2);
        let b = random_matrix(&mut seeded(7), 2, 2);
        assert_eq!(a, b);
    }
}
