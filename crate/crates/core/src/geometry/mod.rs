//! Nielsen-type unitary complexity: Ω-weighted norms, path lengths and
//! Euler–Arnold geodesics on `SU(N)`.

mod euler_arnold;
mod metric;
mod path;

pub use euler_arnold::{euler_arnold_geodesic, GeodesicPath, MIN_STEPS};
pub use metric::{locality_penalty_metric, MetricDoc, PenaltyMetric, MAX_QUBITS};
pub use path::{
    hs_complexity_report, hs_complexity_static, path_length, trapezoid, uniform_grid,
    HamiltonianPath, PathDoc, StaticComplexity,
};

/// `Ω`-norm of `h` under `metric`.
pub fn omega_norm(
    metric: &PenaltyMetric,
    h: &crate::operator::HermitianOperator,
) -> crate::error::Result<f64> {
    metric.omega_norm(h)
}
