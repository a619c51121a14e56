//! Stinespring dilations `(ρ_E, H_tot)` of a system channel, with Kraus and
//! Choi representations of the reduced map `Λ_t(ρ) = Tr_E[U_t (ρ⊗ρ_E) U_t†]`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{dim_err, GqcError, Result};
use crate::interchange::{density_from_json, hermitian_from_json, matrix_to_json, FieldError, MatrixEntries};
use crate::operator::{
    c64, hs_norm, identity, partial_trace_env, tensor, zeros, ComplexMatrix, DensityOperator,
    HermitianOperator, UnitaryOperator,
};
use crate::spectral::{eig_hermitian, unitary_evolve};
use crate::tolerance::ToleranceConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct Dilation {
    d_s: usize,
    d_e: usize,
    rho_e: DensityOperator,
    h_tot: HermitianOperator,
}

impl Dilation {
    pub fn new(d_s: usize, d_e: usize, rho_e: DensityOperator, h_tot: HermitianOperator) -> Result<Self> {
        if d_s == 0 || d_e == 0 {
            return Err(dim_err("system and environment dimensions must be positive"));
        }
        if rho_e.dim() != d_e {
            return Err(dim_err(format!(
                "rho_E has dimension {}, expected d_E = {d_e}",
                rho_e.dim()
            )));
        }
        if h_tot.dim() != d_s * d_e {
            return Err(dim_err(format!(
                "h_tot has dimension {}, expected d_S·d_E = {}",
                h_tot.dim(),
                d_s * d_e
            )));
        }
        Ok(Self { d_s, d_e, rho_e, h_tot })
    }

    /// `d_E = 1`, `H_tot = h_S`: the closed-system dilation of `e^{−ith_S}`.
    pub fn trivial(h_s: &HermitianOperator) -> Self {
        Self {
            d_s: h_s.dim(),
            d_e: 1,
            rho_e: DensityOperator::maximally_mixed(1),
            h_tot: h_s.clone(),
        }
    }

    /// `H_tot = h_S⊗I + I⊗h_E`.
    pub fn decoupled(h_s: &HermitianOperator, h_e: &HermitianOperator, rho_e: DensityOperator) -> Result<Self> {
        let h_tot = h_s.embed_system(h_e.dim()).add(&h_e.embed_env(h_s.dim()))?;
        Self::new(h_s.dim(), h_e.dim(), rho_e, h_tot)
    }

    pub fn d_s(&self) -> usize {
        self.d_s
    }

    pub fn d_e(&self) -> usize {
        self.d_e
    }

    pub fn d_tot(&self) -> usize {
        self.d_s * self.d_e
    }

    pub fn rho_e(&self) -> &DensityOperator {
        &self.rho_e
    }

    pub fn h_tot(&self) -> &HermitianOperator {
        &self.h_tot
    }

    pub fn unitary(&self, t: f64) -> Result<UnitaryOperator> {
        unitary_evolve(&self.h_tot, t)
    }

    pub fn to_doc(&self) -> DilationDoc {
        DilationDoc {
            d_s: self.d_s,
            d_e: self.d_e,
            rho_e: matrix_to_json(self.rho_e.matrix()),
            h_tot: matrix_to_json(self.h_tot.matrix()),
        }
    }
}

/// JSON form `{d_S, d_E, rho_E, h_tot}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DilationDoc {
    #[serde(rename = "d_S")]
    pub d_s: usize,
    #[serde(rename = "d_E")]
    pub d_e: usize,
    #[serde(rename = "rho_E")]
    pub rho_e: MatrixEntries,
    pub h_tot: MatrixEntries,
}

impl DilationDoc {
    pub fn decode(&self, tol: &ToleranceConfig) -> Result<Dilation, FieldError> {
        if self.d_s == 0 {
            return Err(FieldError::new("d_S", "must be positive"));
        }
        if self.d_e == 0 {
            return Err(FieldError::new("d_E", "must be positive"));
        }
        let rho_e = density_from_json(&self.rho_e, "rho_E", self.d_e, tol)?;
        let h_tot = hermitian_from_json(&self.h_tot, "h_tot", self.d_s * self.d_e, tol)?;
        Dilation::new(self.d_s, self.d_e, rho_e, h_tot)
            .map_err(|e| FieldError::new("dilation", e.to_string()))
    }
}

/// `Tr_E[U (x⊗ρ_E) U†]` for an arbitrary (not necessarily positive) `x`.
fn reduced_map(u: &ComplexMatrix, rho_e: &ComplexMatrix, x: &ComplexMatrix, d_s: usize, d_e: usize) -> Result<ComplexMatrix> {
    let joint = u * tensor(x, rho_e) * u.adjoint();
    partial_trace_env(&joint, d_s, d_e)
}

fn check_system_dim(d: &Dilation, m: &ComplexMatrix) -> Result<()> {
    if m.nrows() != d.d_s || m.ncols() != d.d_s {
        return Err(dim_err(format!(
            "input is {}x{}, dilation acts on dimension {}",
            m.nrows(),
            m.ncols(),
            d.d_s
        )));
    }
    Ok(())
}

pub fn channel_apply(d: &Dilation, t: f64, rho_s: &DensityOperator) -> Result<DensityOperator> {
    let out = channel_apply_matrix(d, t, rho_s.matrix())?;
    Ok(DensityOperator::from_raw(out))
}

/// Linear extension of the channel to arbitrary `d_S×d_S` matrices.
pub fn channel_apply_matrix(d: &Dilation, t: f64, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_system_dim(d, x)?;
    let u = d.unitary(t)?;
    reduced_map(u.matrix(), d.rho_e.matrix(), x, d.d_s, d.d_e)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    d_s: usize,
    operators: Vec<ComplexMatrix>,
}

impl KrausSet {
    pub fn new(d_s: usize, operators: Vec<ComplexMatrix>) -> Result<Self> {
        if operators.iter().any(|k| k.nrows() != d_s || k.ncols() != d_s) {
            return Err(dim_err(format!("every Kraus operator must be {d_s}x{d_s}")));
        }
        Ok(Self { d_s, operators })
    }

    pub fn d_s(&self) -> usize {
        self.d_s
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// `Σ K x K†`.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.nrows() != self.d_s || x.ncols() != self.d_s {
            return Err(dim_err("Kraus input has the wrong dimension"));
        }
        Ok(self
            .operators
            .iter()
            .fold(zeros(self.d_s, self.d_s), |acc, k| acc + k * x * k.adjoint()))
    }

    /// `‖Σ K†K − I‖_hs`.
    pub fn completeness_defect(&self) -> f64 {
        let sum = self
            .operators
            .iter()
            .fold(zeros(self.d_s, self.d_s), |acc, k| acc + k.adjoint() * k);
        hs_norm(&(sum - identity(self.d_s)))
    }
}

pub fn kraus_from_dilation(d: &Dilation, t: f64) -> Result<KrausSet> {
    kraus_from_dilation_with(d, t, &ToleranceConfig::default())
}

/// `K_{α,k} = √p_α ⟨k|_E U_t |α⟩_E`, skipping `p_α` below the Kraus cutoff.
pub fn kraus_from_dilation_with(d: &Dilation, t: f64, tol: &ToleranceConfig) -> Result<KrausSet> {
    let u = d.unitary(t)?;
    let u = u.matrix();
    let spec = eig_hermitian(&HermitianOperator::from_raw(d.rho_e.matrix().clone()))?;
    let (d_s, d_e) = (d.d_s, d.d_e);
    let mut ops = Vec::new();
    for (a, &p) in spec.eigenvalues.iter().enumerate() {
        if p < tol.kraus_cutoff {
            continue;
        }
        let v = spec.eigenvectors.column(a);
        let amp = p.sqrt();
        for k in 0..d_e {
            let op = ComplexMatrix::from_fn(d_s, d_s, |i, j| {
                let s: num_complex::Complex64 = (0..d_e).map(|l| u[(i * d_e + k, j * d_e + l)] * v[l]).sum();
                s * amp
            });
            ops.push(op);
        }
    }
    KrausSet::new(d_s, ops)
}

/// `C = Σ_{ij} |i⟩⟨j| ⊗ Λ(|i⟩⟨j|)`, unnormalized (`Tr C = d_S`).
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    d_s: usize,
    matrix: ComplexMatrix,
}

impl ChoiMatrix {
    pub fn new(d_s: usize, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.nrows() != d_s * d_s || matrix.ncols() != d_s * d_s {
            return Err(dim_err(format!(
                "Choi matrix for d_S = {d_s} must be {0}x{0}",
                d_s * d_s
            )));
        }
        crate::operator::ensure_finite(&matrix)?;
        Ok(Self { d_s, matrix })
    }

    /// Builds the Choi matrix of any linear map given on matrix units.
    pub fn from_map(d_s: usize, map: impl Fn(&ComplexMatrix) -> Result<ComplexMatrix>) -> Result<Self> {
        let n = d_s * d_s;
        let mut c = zeros(n, n);
        for i in 0..d_s {
            for j in 0..d_s {
                let mut unit = zeros(d_s, d_s);
                unit[(i, j)] = c64(1.0, 0.0);
                let img = map(&unit)?;
                if img.shape() != (d_s, d_s) {
                    return Err(dim_err("map output has the wrong dimension"));
                }
                c.view_mut((i * d_s, j * d_s), (d_s, d_s)).copy_from(&img);
            }
        }
        Ok(Self { d_s, matrix: c })
    }

    pub fn from_kraus(k: &KrausSet) -> Result<Self> {
        Self::from_map(k.d_s, |x| k.apply(x))
    }

    pub fn identity_channel(d_s: usize) -> Self {
        Self::from_map(d_s, |x| Ok(x.clone())).expect("identity map is well-formed")
    }

    pub fn d_s(&self) -> usize {
        self.d_s
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Applies the channel encoded by the Choi matrix: `Λ(x) = Σ x_ij C_ij`.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let d = self.d_s;
        if x.shape() != (d, d) {
            return Err(dim_err("Choi input has the wrong dimension"));
        }
        let mut out = zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                out += self.matrix.view((i * d, j * d), (d, d)) * x[(i, j)];
            }
        }
        Ok(out)
    }

    /// `‖Tr_out C − I‖_hs`; zero for trace-preserving maps.
    pub fn trace_preservation_defect(&self) -> f64 {
        let d = self.d_s;
        let reduced = partial_trace_env(&self.matrix, d, d).expect("square Choi block structure");
        hs_norm(&(reduced - identity(d)))
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let spec = eig_hermitian(&HermitianOperator::from_raw(self.matrix.clone()))?;
        Ok(spec.eigenvalues[0])
    }

    /// Checks complete positivity and trace preservation.
    pub fn validate(&self, tol: &ToleranceConfig) -> Result<()> {
        let min = self.min_eigenvalue()?;
        if min < -tol.psd_tol {
            return Err(GqcError::InvalidArgument(format!(
                "Choi matrix has negative eigenvalue {min:.3e}"
            )));
        }
        let defect = self.trace_preservation_defect();
        if defect > tol.channel_eq_tol {
            return Err(GqcError::InvalidArgument(format!(
                "Choi matrix is not trace preserving: defect {defect:.3e}"
            )));
        }
        Ok(())
    }
}

pub fn choi_matrix(d: &Dilation, t: f64) -> Result<ChoiMatrix> {
    let u = d.unitary(t)?;
    ChoiMatrix::from_map(d.d_s, |x| reduced_map(u.matrix(), d.rho_e.matrix(), x, d.d_s, d.d_e))
}

/// Choi matrices on a time grid, computed in parallel, returned in grid order.
pub fn choi_family(d: &Dilation, t_grid: &[f64]) -> Result<Vec<ChoiMatrix>> {
    t_grid.par_iter().map(|&t| choi_matrix(d, t)).collect()
}

/// `‖C_a − C_b‖_hs`.
pub fn channel_distance(a: &ChoiMatrix, b: &ChoiMatrix) -> Result<f64> {
    if a.d_s != b.d_s {
        return Err(dim_err(format!(
            "Choi matrices act on dimensions {} and {}",
            a.d_s, b.d_s
        )));
    }
    Ok(hs_norm(&(&a.matrix - &b.matrix)))
}

/// `(V ρ_E V†, (I⊗V) H_tot (I⊗V†))`.
pub fn gauge_transform(d: &Dilation, v_e: &UnitaryOperator) -> Result<Dilation> {
    if v_e.dim() != d.d_e {
        return Err(dim_err(format!(
            "gauge unitary has dimension {}, expected d_E = {}",
            v_e.dim(),
            d.d_e
        )));
    }
    let w = UnitaryOperator::from_raw(tensor(&identity(d.d_s), v_e.matrix()));
    Dilation::new(d.d_s, d.d_e, d.rho_e.conjugate(v_e)?, d.h_tot.conjugate(&w)?)
}
