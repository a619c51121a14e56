//! Geodesics of a right-invariant metric on `SU(N)` via the Euler–Arnold
//! equation `d/ds (I_Ω A) = [I_Ω A, A]` for the body velocity `A = −i A_h`.
//!
//! In Hermitian form with `M_h = I_Ω A_h` the flow reads
//! `dM_h/ds = −i [M_h, A_h]`. The velocity coordinates are integrated with
//! fixed-step RK4, and the group element is rebuilt by
//! `γ(s+Δ) = exp(−iΔ A_h(s+Δ/2)) γ(s)`.

use super::metric::PenaltyMetric;
use crate::error::{GqcError, Result};
use crate::operator::{c64, commutator, HermitianOperator, UnitaryOperator};
use crate::spectral::unitary_evolve;

pub const MIN_STEPS: usize = 16;

#[derive(Debug, Clone)]
pub struct GeodesicPath {
    pub times: Vec<f64>,
    /// Hermitian form `A_h(s)` of the body velocity.
    pub body_velocities: Vec<HermitianOperator>,
    pub unitaries: Vec<UnitaryOperator>,
}

impl GeodesicPath {
    pub fn endpoint(&self) -> &UnitaryOperator {
        self.unitaries.last().expect("geodesic has samples")
    }

    pub fn max_unitarity_defect(&self) -> f64 {
        self.unitaries
            .iter()
            .map(|u| u.unitarity_defect())
            .fold(0.0, f64::max)
    }
}

struct Flow<'a> {
    metric: &'a PenaltyMetric,
}

impl Flow<'_> {
    /// `da/ds` in velocity coordinates.
    fn rhs(&self, a: &[f64]) -> Vec<f64> {
        let m = self.metric;
        let a_h = m.synthesize(a);
        let m_h = m.synthesize(&m.inertia_coords(a));
        let dm = commutator(&m_h, &a_h) * c64(0.0, -1.0);
        let dm_coords = m.coords_unchecked(&dm);
        let n = m.algebra_dim() as f64;
        dm_coords
            .iter()
            .zip(m.weights())
            .map(|(d, l)| d * n / l)
            .collect()
    }

    fn rk4(&self, a: &[f64], h: f64) -> Vec<f64> {
        let axpy = |x: &[f64], k: &[f64], s: f64| -> Vec<f64> {
            x.iter().zip(k).map(|(xi, ki)| xi + s * ki).collect()
        };
        let k1 = self.rhs(a);
        let k2 = self.rhs(&axpy(a, &k1, h / 2.0));
        let k3 = self.rhs(&axpy(a, &k2, h / 2.0));
        let k4 = self.rhs(&axpy(a, &k3, h));
        a.iter()
            .enumerate()
            .map(|(i, ai)| ai + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect()
    }
}

/// Integrates the geodesic with initial body velocity `a0` (traceless
/// Hermitian form) on `[0, t_final]` in `steps` equal steps.
pub fn euler_arnold_geodesic(
    metric: &PenaltyMetric,
    a0: &HermitianOperator,
    t_final: f64,
    steps: usize,
) -> Result<GeodesicPath> {
    if steps < MIN_STEPS {
        return Err(GqcError::InvalidArgument(format!(
            "geodesic integration needs at least {MIN_STEPS} steps, got {steps}"
        )));
    }
    if !(t_final.is_finite() && t_final > 0.0) {
        return Err(GqcError::InvalidArgument(format!(
            "final time must be positive, got {t_final}"
        )));
    }
    let mut a = metric.coefficients(a0)?;
    let flow = Flow { metric };
    let dt = t_final / steps as f64;
    let dim = metric.dim();

    let mut times = Vec::with_capacity(steps + 1);
    let mut body = Vec::with_capacity(steps + 1);
    let mut unitaries = Vec::with_capacity(steps + 1);
    let mut gamma = UnitaryOperator::identity(dim);

    times.push(0.0);
    body.push(HermitianOperator::from_raw(metric.synthesize(&a)));
    unitaries.push(gamma.clone());

    for k in 0..steps {
        let mid = HermitianOperator::from_raw(metric.synthesize(&flow.rk4(&a, dt / 2.0)));
        gamma = unitary_evolve(&mid, dt)?.compose(&gamma)?;
        a = flow.rk4(&a, dt);
        times.push(if k + 1 == steps { t_final } else { dt * (k + 1) as f64 });
        body.push(HermitianOperator::from_raw(metric.synthesize(&a)));
        unitaries.push(gamma.clone());
    }

    Ok(GeodesicPath {
        times,
        body_velocities: body,
        unitaries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::hs_norm;
    use crate::pauli::{sigma_x, sigma_y, sigma_z};
    use crate::random::{random_traceless_hermitian, seeded};

    #[test]
    fn bi_invariant_geodesic_is_one_parameter_subgroup() {
        let metric = PenaltyMetric::uniform(2).unwrap();
        let a0 = HermitianOperator::new(sigma_z()).unwrap();
        let path = euler_arnold_geodesic(&metric, &a0, 1.0, 128).unwrap();
        let want = unitary_evolve(&a0, 1.0).unwrap();
        assert!(hs_norm(&(path.endpoint().matrix() - want.matrix())) < 1e-8);
        for v in &path.body_velocities {
            assert!(hs_norm(&(v.matrix() - a0.matrix())) < 1e-14);
        }
        assert!(hs_norm(&(path.unitaries[0].matrix() - crate::operator::identity(2))) < 1e-10);
    }

    #[test]
    fn zero_velocity_stays_at_identity() {
        let metric = PenaltyMetric::with_weights(2, vec![1.0, 2.0, 3.0]).unwrap();
        let path = euler_arnold_geodesic(&metric, &HermitianOperator::zero(2), 1.0, 16).unwrap();
        for u in &path.unitaries {
            assert_eq!(u.matrix(), &crate::operator::identity(2));
        }
    }

    #[test]
    fn anisotropic_geodesic_has_constant_speed() {
        let metric = PenaltyMetric::with_weights(2, vec![1.0, 2.0, 4.0]).unwrap();
        let a0 = HermitianOperator::new(
            sigma_x() * c64(0.8, 0.0) + sigma_y() * c64(-0.3, 0.0) + sigma_z() * c64(0.5, 0.0),
        )
        .unwrap();
        let path = euler_arnold_geodesic(&metric, &a0, 2.0, 512).unwrap();
        let speeds: Vec<f64> = path
            .body_velocities
            .iter()
            .map(|v| metric.omega_norm(v).unwrap())
            .collect();
        let s0 = speeds[0];
        assert!(speeds.iter().all(|s| (s - s0).abs() < 1e-7));
        // the body velocity must actually move under anisotropy
        let drift = hs_norm(&(path.body_velocities.last().unwrap().matrix() - a0.matrix()));
        assert!(drift > 1e-3);
        assert!(path.max_unitarity_defect() < 1e-10);
    }

    #[test]
    fn uniform_metric_conserves_hs_norm_in_higher_dim() {
        let metric = PenaltyMetric::uniform(3).unwrap();
        let mut rng = seeded(5);
        let a0 = random_traceless_hermitian(&mut rng, 3, 1.0);
        let path = euler_arnold_geodesic(&metric, &a0, 1.0, 64).unwrap();
        for v in &path.body_velocities {
            assert!((v.hs_norm() - a0.hs_norm()).abs() < 1e-10);
        }
        let want = unitary_evolve(&a0, 1.0).unwrap();
        assert!(hs_norm(&(path.endpoint().matrix() - want.matrix())) < 1e-8);
    }

    #[test]
    fn argument_errors() {
        let metric = PenaltyMetric::uniform(2).unwrap();
        let a0 = HermitianOperator::new(sigma_z()).unwrap();
        assert!(euler_arnold_geodesic(&metric, &a0, 1.0, 8).is_err());
        assert!(euler_arnold_geodesic(&metric, &HermitianOperator::identity(2), 1.0, 32).is_err());
    }
}
