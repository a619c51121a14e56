use serde::{Deserialize, Serialize};

use crate::dilation::{channel_distance, choi_matrix, ChoiMatrix, Dilation};
use crate::error::{GqcError, Result};
use crate::operator::{hs_inner, HermitianOperator};
use crate::spectral::eig_hermitian;

/// Relative slack on the operator-norm cap, shared by the admissibility
/// check and the optimizer's feasibility filter.
pub const NORM_SLACK: f64 = 1e-9;
pub const DEFAULT_CHANNEL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibleConstraints {
    pub d_e_max: usize,
    pub j_max: f64,
    /// Cap on `Tr(ρ_E h_E)`; only enforced together with `h_e`.
    pub e_max: Option<f64>,
    /// Declared environment Hamiltonian for the energy cap.
    pub h_e: Option<HermitianOperator>,
    pub channel_tol: f64,
    pub t_grid: Vec<f64>,
}

impl AdmissibleConstraints {
    pub fn new(d_e_max: usize, j_max: f64, t_grid: Vec<f64>) -> Result<Self> {
        let c = Self {
            d_e_max,
            j_max,
            e_max: None,
            h_e: None,
            channel_tol: DEFAULT_CHANNEL_TOL,
            t_grid,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn with_channel_tol(mut self, tol: f64) -> Result<Self> {
        self.channel_tol = tol;
        self.validate()?;
        Ok(self)
    }

    pub fn with_energy_cap(mut self, h_e: HermitianOperator, e_max: f64) -> Result<Self> {
        self.h_e = Some(h_e);
        self.e_max = Some(e_max);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(GqcError::InvalidArgument(m));
        if self.d_e_max < 1 {
            return bad("d_E_max must be at least 1".into());
        }
        if !(self.j_max > 0.0 && self.j_max.is_finite()) {
            return bad(format!("J_max must be positive, got {}", self.j_max));
        }
        if !(self.channel_tol > 0.0 && self.channel_tol.is_finite()) {
            return bad(format!("channel_tol must be positive, got {}", self.channel_tol));
        }
        if self.t_grid.len() < 2 {
            return bad("t_grid needs at least 2 points".into());
        }
        if self.t_grid[0] < 0.0 || self.t_grid.iter().any(|t| !t.is_finite()) {
            return bad("t_grid must be finite and start at t ≥ 0".into());
        }
        if self.t_grid.windows(2).any(|w| w[1] <= w[0]) {
            return bad("t_grid must be strictly increasing".into());
        }
        if let Some(e) = self.e_max {
            if !e.is_finite() {
                return bad("E_max must be finite".into());
            }
        }
        if let Some(h) = &self.h_e {
            if h.dim() > self.d_e_max {
                return bad(format!(
                    "declared h_E has dimension {} above d_E_max = {}",
                    h.dim(),
                    self.d_e_max
                ));
            }
        }
        Ok(())
    }

    /// Environment dimensions the admissible set ranges over. A declared
    /// energy cap pins `d_E` to the dimension of `h_E`.
    pub fn env_dims(&self) -> Vec<usize> {
        match (&self.h_e, self.e_max) {
            (Some(h), Some(_)) => vec![h.dim()],
            _ => (1..=self.d_e_max).collect(),
        }
    }

    pub fn t_final(&self) -> f64 {
        *self.t_grid.last().expect("validated grid")
    }

    pub fn to_doc(&self) -> ConstraintsDoc {
        ConstraintsDoc {
            d_e_max: self.d_e_max,
            j_max: self.j_max,
            e_max: self.e_max,
            h_e: self.h_e.as_ref().map(crate::interchange::HermitianDoc::from_operator),
            channel_tol: self.channel_tol,
            t_grid: self.t_grid.clone(),
        }
    }
}

/// JSON form of [`AdmissibleConstraints`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintsDoc {
    #[serde(rename = "d_E_max")]
    pub d_e_max: usize,
    #[serde(rename = "J_max")]
    pub j_max: f64,
    #[serde(rename = "E_max", default, skip_serializing_if = "Option::is_none")]
    pub e_max: Option<f64>,
    #[serde(rename = "h_E", default, skip_serializing_if = "Option::is_none")]
    pub h_e: Option<crate::interchange::HermitianDoc>,
    #[serde(default = "default_channel_tol")]
    pub channel_tol: f64,
    pub t_grid: Vec<f64>,
}

fn default_channel_tol() -> f64 {
    DEFAULT_CHANNEL_TOL
}

impl ConstraintsDoc {
    pub fn decode(
        &self,
        tol: &crate::tolerance::ToleranceConfig,
    ) -> std::result::Result<AdmissibleConstraints, crate::interchange::FieldError> {
        use crate::interchange::FieldError;
        let h_e = self.h_e.as_ref().map(|d| d.decode("constraints.h_E", tol)).transpose()?;
        let c = AdmissibleConstraints {
            d_e_max: self.d_e_max,
            j_max: self.j_max,
            e_max: self.e_max,
            h_e,
            channel_tol: self.channel_tol,
            t_grid: self.t_grid.clone(),
        };
        c.validate().map_err(|e| FieldError::new("constraints", e.to_string()))?;
        Ok(c)
    }
}

/// Largest absolute eigenvalue.
pub fn hermitian_op_norm(h: &HermitianOperator) -> Result<f64> {
    let spec = eig_hermitian(h)?;
    Ok(spec.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs())))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    pub dimension_ok: bool,
    pub op_norm: f64,
    /// `max(0, ‖H_tot‖_op − J_max)`.
    pub norm_excess: f64,
    pub energy: Option<f64>,
    pub energy_ok: bool,
    /// Choi distance to the target at each grid time.
    pub channel_residuals: Vec<f64>,
    pub channel_residual: f64,
}

/// Checks `d` against `c` and a target family of Choi matrices on `c.t_grid`.
pub fn admissible_check(d: &Dilation, c: &AdmissibleConstraints, target: &[ChoiMatrix]) -> Result<AdmissibilityReport> {
    c.validate()?;
    if target.len() != c.t_grid.len() {
        return Err(GqcError::InvalidArgument(format!(
            "target has {} Choi matrices for a grid of {} times",
            target.len(),
            c.t_grid.len()
        )));
    }
    let residuals = c
        .t_grid
        .iter()
        .zip(target)
        .map(|(&t, want)| channel_distance(&choi_matrix(d, t)?, want))
        .collect::<Result<Vec<_>>>()?;
    let channel_residual = residuals.iter().copied().fold(0.0, f64::max);
    let op_norm = hermitian_op_norm(d.h_tot())?;
    let dimension_ok = d.d_e() <= c.d_e_max;
    let energy = match (&c.h_e, c.e_max) {
        (Some(h_e), Some(_)) if h_e.dim() == d.d_e() => Some(hs_inner(d.rho_e().matrix(), h_e.matrix())?.re),
        _ => None,
    };
    let energy_ok = match (&c.h_e, c.e_max) {
        (Some(h_e), Some(e_max)) => h_e.dim() == d.d_e() && energy.is_some_and(|e| e <= e_max),
        _ => true,
    };
    let norm_ok = op_norm <= c.j_max * (1.0 + NORM_SLACK);
    Ok(AdmissibilityReport {
        admissible: dimension_ok && norm_ok && energy_ok && channel_residual <= c.channel_tol,
        dimension_ok,
        op_norm,
        norm_excess: (op_norm - c.j_max).max(0.0),
        energy,
        energy_ok,
        channel_residuals: residuals,
        channel_residual,
    })
}
