use serde::{Deserialize, Serialize};

use crate::error::{GqcError, Result};

/// Every numerical tolerance used by validation and diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToleranceConfig {
    /// Relative Hermiticity defect `‖M − M†‖ / ‖M‖`.
    pub hermiticity_tol: f64,
    /// Eigenvalues of nominally PSD operators may dip this far below zero.
    pub psd_tol: f64,
    /// Allowed deviation of a density operator's trace from one.
    pub trace_tol: f64,
    /// Unitarity defect, scaled by `√dim`.
    pub unitarity_tol: f64,
    /// Environment-state eigenvalues below this are dropped in Kraus extraction.
    pub kraus_cutoff: f64,
    /// Choi-distance threshold for "same channel".
    pub channel_eq_tol: f64,
    /// Slack for the postulate and bound checks.
    pub check_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            hermiticity_tol: 1e-12,
            psd_tol: 1e-10,
            trace_tol: 1e-10,
            unitarity_tol: 1e-10,
            kraus_cutoff: 1e-12,
            channel_eq_tol: 1e-9,
            check_tol: 1e-9,
        }
    }
}

impl ToleranceConfig {
    /// Override one field by name, as in `--tol psd_tol=1e-8`.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value.is_finite() && value > 0.0) {
            return Err(GqcError::InvalidArgument(format!(
                "tolerance {name} must be positive and finite, got {value}"
            )));
        }
        let slot = match name {
            "hermiticity_tol" => &mut self.hermiticity_tol,
            "psd_tol" => &mut self.psd_tol,
            "trace_tol" => &mut self.trace_tol,
            "unitarity_tol" => &mut self.unitarity_tol,
            "kraus_cutoff" => &mut self.kraus_cutoff,
            "channel_eq_tol" => &mut self.channel_eq_tol,
            "check_tol" => &mut self.check_tol,
            other => {
                return Err(GqcError::InvalidArgument(format!(
                    "unknown tolerance '{other}'"
                )))
            }
        };
        *slot = value;
        Ok(())
    }
}
