//! Dense complex-matrix primitives: Hilbert–Schmidt geometry, tensor
//! products, partial traces and validated operator newtypes.
//!
//! Tensor products put the system factor on the left (slow index):
//! basis state `|i⟩_S ⊗ |k⟩_E` has flat index `i·d_E + k`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{dim_err, GqcError, Result};
use crate::tolerance::ToleranceConfig;

pub type ComplexMatrix = DMatrix<Complex64>;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

pub fn zeros(rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(rows, cols)
}

/// Rejects NaN/Inf entries, naming the first offending index.
pub fn ensure_finite(m: &ComplexMatrix) -> Result<()> {
    for col in 0..m.ncols() {
        for row in 0..m.nrows() {
            let z = m[(row, col)];
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(GqcError::NonFinite { row, col });
            }
        }
    }
    Ok(())
}

fn same_shape(a: &ComplexMatrix, b: &ComplexMatrix, what: &str) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(dim_err(format!(
            "{what}: {:?} vs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(())
}

/// `Tr(a† b)`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    same_shape(a, b, "hs_inner")?;
    Ok(a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum())
}

pub fn hs_norm(a: &ComplexMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

pub fn anticommutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b + b * a
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Kronecker product; block `(i, j)` of the result is `a[i,j]·b`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// `h ⊗ I_E`.
pub fn embed_system(h: &ComplexMatrix, d_e: usize) -> ComplexMatrix {
    tensor(h, &identity(d_e))
}

/// `I_S ⊗ h`.
pub fn embed_env(h: &ComplexMatrix, d_s: usize) -> ComplexMatrix {
    tensor(&identity(d_s), h)
}

fn check_bipartite(m: &ComplexMatrix, d_s: usize, d_e: usize) -> Result<()> {
    let d = d_s * d_e;
    if d_s == 0 || d_e == 0 || m.nrows() != d || m.ncols() != d {
        return Err(dim_err(format!(
            "partial trace: {}x{} matrix does not factor as {d_s}·{d_e}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// `Tr_E[m]` for `m` on `H_S ⊗ H_E`.
pub fn partial_trace_env(m: &ComplexMatrix, d_s: usize, d_e: usize) -> Result<ComplexMatrix> {
    check_bipartite(m, d_s, d_e)?;
    Ok(ComplexMatrix::from_fn(d_s, d_s, |i, j| {
        (0..d_e).map(|k| m[(i * d_e + k, j * d_e + k)]).sum()
    }))
}

/// `Tr_S[m]` for `m` on `H_S ⊗ H_E`.
pub fn partial_trace_sys(m: &ComplexMatrix, d_s: usize, d_e: usize) -> Result<ComplexMatrix> {
    check_bipartite(m, d_s, d_e)?;
    Ok(ComplexMatrix::from_fn(d_e, d_e, |k, l| {
        (0..d_s).map(|i| m[(i * d_e + k, i * d_e + l)]).sum()
    }))
}

/// Largest singular value.
pub fn op_norm(m: &ComplexMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Hermitian part `(m + m†)/2`.
pub(crate) fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()) * c64(0.5, 0.0)
}

fn square(m: &ComplexMatrix, what: &str) -> Result<usize> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(dim_err(format!(
            "{what} must be square and non-empty, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.nrows())
}

fn hermiticity_defect(m: &ComplexMatrix) -> f64 {
    let scale = hs_norm(m);
    if scale == 0.0 {
        return 0.0;
    }
    hs_norm(&(m - m.adjoint())) / scale
}

/// A square matrix that is Hermitian within `hermiticity_tol`.
///
/// The stored matrix is the exact Hermitian part of the input.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(m, &ToleranceConfig::default())
    }

    pub fn with_tolerance(m: ComplexMatrix, tol: &ToleranceConfig) -> Result<Self> {
        square(&m, "Hermitian operator")?;
        ensure_finite(&m)?;
        let defect = hermiticity_defect(&m);
        if defect > tol.hermiticity_tol {
            return Err(GqcError::NotHermitian {
                defect,
                tol: tol.hermiticity_tol,
            });
        }
        Ok(Self {
            matrix: hermitian_part(&m),
        })
    }

    /// For matrices that are Hermitian by construction up to rounding.
    pub(crate) fn from_raw(m: ComplexMatrix) -> Self {
        debug_assert!(m.is_square());
        Self {
            matrix: hermitian_part(&m),
        }
    }

    pub fn zero(d: usize) -> Self {
        Self {
            matrix: zeros(d, d),
        }
    }

    pub fn identity(d: usize) -> Self {
        Self {
            matrix: identity(d),
        }
    }

    /// Real diagonal matrix.
    pub fn diagonal(values: &[f64]) -> Self {
        let d = values.len();
        Self {
            matrix: ComplexMatrix::from_fn(d, d, |i, j| {
                if i == j {
                    c64(values[i], 0.0)
                } else {
                    c64(0.0, 0.0)
                }
            }),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn hs_norm(&self) -> f64 {
        hs_norm(&self.matrix)
    }

    pub fn trace(&self) -> f64 {
        trace(&self.matrix).re
    }

    /// `‖H − Tr(H)/d · I‖_hs`.
    pub fn traceless_part_norm(&self) -> f64 {
        let d = self.dim() as f64;
        let shift = identity(self.dim()) * c64(self.trace() / d, 0.0);
        hs_norm(&(&self.matrix - shift))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            matrix: &self.matrix * c64(s, 0.0),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_shape(&self.matrix, &other.matrix, "Hermitian sum")?;
        Ok(Self {
            matrix: &self.matrix + &other.matrix,
        })
    }

    /// `self ⊗ I_E`.
    pub fn embed_system(&self, d_e: usize) -> Self {
        Self {
            matrix: embed_system(&self.matrix, d_e),
        }
    }

    /// `I_S ⊗ self`.
    pub fn embed_env(&self, d_s: usize) -> Self {
        Self {
            matrix: embed_env(&self.matrix, d_s),
        }
    }

    /// `W H W†`.
    pub fn conjugate(&self, w: &UnitaryOperator) -> Result<Self> {
        same_shape(&self.matrix, w.matrix(), "unitary conjugation")?;
        let m = w.matrix() * &self.matrix * w.matrix().adjoint();
        Ok(Self::from_raw(m))
    }
}

/// Positive semidefinite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(m, &ToleranceConfig::default())
    }

    pub fn with_tolerance(m: ComplexMatrix, tol: &ToleranceConfig) -> Result<Self> {
        square(&m, "density operator")?;
        ensure_finite(&m)?;
        let defect = hermiticity_defect(&m);
        if defect > tol.hermiticity_tol.max(tol.psd_tol) {
            return Err(GqcError::InvalidDensity {
                field: "hermiticity",
                detail: format!("relative defect {defect:.3e}"),
            });
        }
        let h = HermitianOperator::from_raw(m);
        let tr = h.trace();
        if (tr - 1.0).abs() > tol.trace_tol {
            return Err(GqcError::InvalidDensity {
                field: "trace",
                detail: format!("trace {tr} differs from 1"),
            });
        }
        let spec = crate::spectral::eig_hermitian(&h)?;
        let min = spec.eigenvalues[0];
        if min < -tol.psd_tol {
            return Err(GqcError::InvalidDensity {
                field: "positivity",
                detail: format!("eigenvalue {min:.3e} is negative"),
            });
        }
        Ok(Self { matrix: h.matrix })
    }

    pub(crate) fn from_raw(m: ComplexMatrix) -> Self {
        Self {
            matrix: hermitian_part(&m),
        }
    }

    /// `|k⟩⟨k|` in dimension `d`.
    pub fn basis_state(d: usize, k: usize) -> Result<Self> {
        if k >= d {
            return Err(dim_err(format!("basis index {k} out of range for dim {d}")));
        }
        let mut m = zeros(d, d);
        m[(k, k)] = c64(1.0, 0.0);
        Ok(Self { matrix: m })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            matrix: identity(d) * c64(1.0 / d as f64, 0.0),
        }
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) nonzero vector.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm_sq: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if psi.is_empty() || !(norm_sq > 0.0 && norm_sq.is_finite()) {
            return Err(GqcError::InvalidArgument("zero state vector".into()));
        }
        let d = psi.len();
        Ok(Self {
            matrix: ComplexMatrix::from_fn(d, d, |i, j| psi[i] * psi[j].conj() / norm_sq),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn purity(&self) -> f64 {
        hs_inner(&self.matrix, &self.matrix)
            .map(|z| z.re)
            .unwrap_or(f64::NAN)
    }

    /// `V ρ V†`.
    pub fn conjugate(&self, v: &UnitaryOperator) -> Result<Self> {
        same_shape(&self.matrix, v.matrix(), "state conjugation")?;
        Ok(Self::from_raw(
            v.matrix() * &self.matrix * v.matrix().adjoint(),
        ))
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            matrix: tensor(&self.matrix, &other.matrix),
        }
    }
}

/// `‖U†U − I‖_hs ≤ unitarity_tol·√dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    matrix: ComplexMatrix,
}

impl UnitaryOperator {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(m, &ToleranceConfig::default())
    }

    pub fn with_tolerance(m: ComplexMatrix, tol: &ToleranceConfig) -> Result<Self> {
        let d = square(&m, "unitary")?;
        ensure_finite(&m)?;
        let defect = unitarity_defect(&m);
        let cap = tol.unitarity_tol * (d as f64).sqrt();
        if defect > cap {
            return Err(GqcError::NotUnitary { defect, tol: cap });
        }
        Ok(Self { matrix: m })
    }

    pub(crate) fn from_raw(m: ComplexMatrix) -> Self {
        Self { matrix: m }
    }

    pub fn identity(d: usize) -> Self {
        Self {
            matrix: identity(d),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        same_shape(&self.matrix, &other.matrix, "unitary product")?;
        Ok(Self {
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.matrix)
    }
}

/// `‖U†U − I‖_hs`.
pub fn unitarity_defect(m: &ComplexMatrix) -> f64 {
    hs_norm(&(m.adjoint() * m - identity(m.ncols())))
}
