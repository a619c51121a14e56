//! Pauli matrices, Pauli strings and orthonormal traceless Hermitian bases.

use crate::error::{GqcError, Result};
use crate::operator::{c64, tensor, zeros, ComplexMatrix};

pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(1., 0.), c64(1., 0.), c64(0., 0.)])
}

pub fn sigma_y() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(0., -1.), c64(0., 1.), c64(0., 0.)])
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c64(1., 0.), c64(0., 0.), c64(0., 0.), c64(-1., 0.)])
}

/// `σ₋ = |0⟩⟨1|`.
pub fn sigma_minus() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(1., 0.), c64(0., 0.), c64(0., 0.)])
}

/// `σ₊ = |1⟩⟨0|`.
pub fn sigma_plus() -> ComplexMatrix {
    sigma_minus().adjoint()
}

fn single(label: char) -> Result<ComplexMatrix> {
    match label {
        'I' => Ok(ComplexMatrix::identity(2, 2)),
        'X' => Ok(sigma_x()),
        'Y' => Ok(sigma_y()),
        'Z' => Ok(sigma_z()),
        other => Err(GqcError::InvalidArgument(format!(
            "unknown Pauli label '{other}'"
        ))),
    }
}

/// Matrix of a Pauli string such as `"XZI"`; the leftmost letter acts on the
/// slowest tensor factor.
pub fn pauli_string(label: &str) -> Result<ComplexMatrix> {
    let mut chars = label.chars();
    let first = chars
        .next()
        .ok_or_else(|| GqcError::InvalidArgument("empty Pauli string".into()))?;
    let mut acc = single(first)?;
    for ch in chars {
        acc = tensor(&acc, &single(ch)?);
    }
    Ok(acc)
}

/// Number of non-identity factors.
pub fn pauli_weight(label: &str) -> usize {
    label.chars().filter(|&c| c != 'I').count()
}

/// All `4ⁿ − 1` non-identity Pauli string labels, in base-4 order over `IXYZ`.
pub fn pauli_labels(n_qubits: usize) -> Vec<String> {
    const LETTERS: [char; 4] = ['I', 'X', 'Y', 'Z'];
    let total = 4usize.pow(n_qubits as u32);
    (1..total)
        .map(|mut k| {
            let mut s = vec!['I'; n_qubits];
            for slot in s.iter_mut().rev() {
                *slot = LETTERS[k % 4];
                k /= 4;
            }
            s.into_iter().collect()
        })
        .collect()
}

/// Pauli strings scaled by `1/√N` so they are orthonormal under `Tr(A†B)`.
pub fn normalized_pauli_basis(n_qubits: usize) -> Result<Vec<(String, ComplexMatrix)>> {
    if n_qubits == 0 {
        return Err(GqcError::InvalidArgument("need at least one qubit".into()));
    }
    let scale = c64(1.0 / (2f64.powi(n_qubits as i32)).sqrt(), 0.0);
    pauli_labels(n_qubits)
        .into_iter()
        .map(|l| pauli_string(&l).map(|m| (l, m * scale)))
        .collect()
}

/// Generalized Gell-Mann matrices normalized to unit Hilbert–Schmidt norm.
///
/// Ordering: symmetric pairs `(j<k)`, antisymmetric pairs, then diagonals.
pub fn gell_mann_basis(n: usize) -> Result<Vec<(String, ComplexMatrix)>> {
    if n < 2 {
        return Err(GqcError::InvalidArgument(format!(
            "su(N) basis needs N ≥ 2, got {n}"
        )));
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(n * n - 1);
    for j in 0..n {
        for k in (j + 1)..n {
            let mut m = zeros(n, n);
            m[(j, k)] = c64(r, 0.0);
            m[(k, j)] = c64(r, 0.0);
            out.push((format!("S{j}_{k}"), m));
        }
    }
    for j in 0..n {
        for k in (j + 1)..n {
            let mut m = zeros(n, n);
            m[(j, k)] = c64(0.0, -r);
            m[(k, j)] = c64(0.0, r);
            out.push((format!("A{j}_{k}"), m));
        }
    }
    for l in 1..n {
        let norm = ((l * (l + 1)) as f64).sqrt();
        let mut m = zeros(n, n);
        for i in 0..l {
            m[(i, i)] = c64(1.0 / norm, 0.0);
        }
        m[(l, l)] = c64(-(l as f64) / norm, 0.0);
        out.push((format!("D{l}"), m));
    }
    Ok(out)
}

/// Orthonormal basis of the full `N×N` Hermitian space: `I/√N` first, then
/// the traceless Gell-Mann elements.
pub fn hermitian_basis(n: usize) -> Vec<ComplexMatrix> {
    let mut out = vec![ComplexMatrix::identity(n, n) * c64(1.0 / (n as f64).sqrt(), 0.0)];
    if n >= 2 {
        out.extend(
            gell_mann_basis(n)
                .expect("n ≥ 2")
                .into_iter()
                .map(|(_, m)| m),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{hs_inner, trace};
    use approx::assert_abs_diff_eq;

    fn assert_orthonormal(basis: &[ComplexMatrix]) {
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                let z = hs_inner(a, b).unwrap();
                assert_abs_diff_eq!(z.re, want, epsilon = 1e-12);
                assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn pauli_basis_counts_and_orthonormality() {
        let b = normalized_pauli_basis(3).unwrap();
        assert_eq!(b.len(), 63);
        let b2 = normalized_pauli_basis(2).unwrap();
        assert_eq!(b2.len(), 15);
        let mats: Vec<_> = b2.into_iter().map(|(_, m)| m).collect();
        assert_orthonormal(&mats);
        for m in &mats {
            assert_abs_diff_eq!(trace(m).norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn gell_mann_is_orthonormal_and_traceless() {
        for n in 2..=5 {
            let b = gell_mann_basis(n).unwrap();
            assert_eq!(b.len(), n * n - 1);
            let mats: Vec<_> = b.into_iter().map(|(_, m)| m).collect();
            assert_orthonormal(&mats);
            for m in &mats {
                assert_abs_diff_eq!(trace(m).norm(), 0.0, epsilon = 1e-14);
                assert_eq!(m, &m.adjoint());
            }
        }
        assert_orthonormal(&hermitian_basis(3));
    }

    #[test]
    fn labels_and_weights() {
        assert_eq!(pauli_labels(1), vec!["X", "Y", "Z"]);
        assert_eq!(pauli_weight("XXI"), 2);
        assert_eq!(pauli_string("ZI").unwrap(), tensor(&sigma_z(), &ComplexMatrix::identity(2, 2)));
        assert!(pauli_string("Q").is_err());
    }
}
