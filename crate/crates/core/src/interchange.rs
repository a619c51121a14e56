//! JSON interchange for complex matrices.
//!
//! A matrix is a row-major nested array of `[re, im]` pairs. Components are
//! JSON numbers; the strings `"NaN"`, `"inf"` and `"-inf"` are also parsed so
//! that non-finite input is caught by validation with its index rather than
//! by the JSON parser.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::GqcError;
use crate::operator::{c64, ComplexMatrix, DensityOperator, HermitianOperator, UnitaryOperator};
use crate::tolerance::ToleranceConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonReal {
    Num(f64),
    Text(String),
}

impl JsonReal {
    fn value(&self) -> Option<f64> {
        match self {
            JsonReal::Num(x) => Some(*x),
            JsonReal::Text(s) => s.trim().parse::<f64>().ok(),
        }
    }
}

pub type MatrixEntries = Vec<Vec<[JsonReal; 2]>>;

/// Validation error that names the offending document field.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{field}: {message}")]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl FieldError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }

    fn from_core(field: &str, err: GqcError) -> Self {
        let message = match err {
            GqcError::InvalidDensity { field: sub, detail } => format!("{sub}: {detail}"),
            GqcError::NonFinite { row, col } => format!("entry [{row}][{col}] is not finite"),
            other => other.to_string(),
        };
        Self::new(field, message)
    }
}

pub fn matrix_to_json(m: &ComplexMatrix) -> MatrixEntries {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| {
                    let z = m[(i, j)];
                    [JsonReal::Num(z.re), JsonReal::Num(z.im)]
                })
                .collect()
        })
        .collect()
}

/// Parses and shape-checks a matrix against explicit dimensions.
pub fn matrix_from_json(
    entries: &MatrixEntries,
    field: &str,
    rows: usize,
    cols: usize,
) -> Result<ComplexMatrix, FieldError> {
    if entries.len() != rows {
        return Err(FieldError::new(
            field,
            format!("expected {rows} rows, found {}", entries.len()),
        ));
    }
    let mut m = ComplexMatrix::zeros(rows, cols);
    for (i, row) in entries.iter().enumerate() {
        if row.len() != cols {
            return Err(FieldError::new(
                field,
                format!("row {i}: expected {cols} entries, found {}", row.len()),
            ));
        }
        for (j, [re, im]) in row.iter().enumerate() {
            let (Some(re), Some(im)) = (re.value(), im.value()) else {
                return Err(FieldError::new(
                    field,
                    format!("entry [{i}][{j}] is not a number"),
                ));
            };
            if !(re.is_finite() && im.is_finite()) {
                return Err(FieldError::new(
                    field,
                    format!("entry [{i}][{j}] is not finite"),
                ));
            }
            m[(i, j)] = c64(re, im);
        }
    }
    Ok(m)
}

pub fn hermitian_from_json(
    entries: &MatrixEntries,
    field: &str,
    dim: usize,
    tol: &ToleranceConfig,
) -> Result<HermitianOperator, FieldError> {
    let m = matrix_from_json(entries, field, dim, dim)?;
    HermitianOperator::with_tolerance(m, tol).map_err(|e| FieldError::from_core(field, e))
}

pub fn density_from_json(
    entries: &MatrixEntries,
    field: &str,
    dim: usize,
    tol: &ToleranceConfig,
) -> Result<DensityOperator, FieldError> {
    let m = matrix_from_json(entries, field, dim, dim)?;
    DensityOperator::with_tolerance(m, tol).map_err(|e| FieldError::from_core(field, e))
}

pub fn unitary_from_json(
    entries: &MatrixEntries,
    field: &str,
    dim: usize,
    tol: &ToleranceConfig,
) -> Result<UnitaryOperator, FieldError> {
    let m = matrix_from_json(entries, field, dim, dim)?;
    UnitaryOperator::with_tolerance(m, tol).map_err(|e| FieldError::from_core(field, e))
}

/// Standalone Hermitian operator document `{dim, matrix}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermitianDoc {
    pub dim: usize,
    pub matrix: MatrixEntries,
}

impl HermitianDoc {
    pub fn from_operator(h: &HermitianOperator) -> Self {
        Self {
            dim: h.dim(),
            matrix: matrix_to_json(h.matrix()),
        }
    }

    pub fn decode(&self, field: &str, tol: &ToleranceConfig) -> Result<HermitianOperator, FieldError> {
        hermitian_from_json(&self.matrix, field, self.dim, tol)
    }
}
