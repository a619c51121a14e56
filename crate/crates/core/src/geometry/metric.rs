use serde::{Deserialize, Serialize};

use crate::error::{dim_err, GqcError, Result};
use crate::operator::{c64, hs_inner, trace, ComplexMatrix, HermitianOperator};
use crate::pauli::{gell_mann_basis, normalized_pauli_basis, pauli_string, pauli_weight};

/// Largest register accepted by [`locality_penalty_metric`].
pub const MAX_QUBITS: usize = 6;

/// Diagonal penalty weights over an orthonormal traceless Hermitian basis of
/// `su(N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyMetric {
    dim: usize,
    labels: Vec<String>,
    basis: Vec<ComplexMatrix>,
    weights: Vec<f64>,
}

impl PenaltyMetric {
    pub fn new(
        dim: usize,
        labels: Vec<String>,
        basis: Vec<ComplexMatrix>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        if dim < 2 {
            return Err(GqcError::InvalidArgument(format!("metric needs N ≥ 2, got {dim}")));
        }
        let n = dim * dim - 1;
        if basis.len() != n || weights.len() != n || labels.len() != n {
            return Err(dim_err(format!(
                "metric on su({dim}) needs {n} basis elements, labels and weights; got {}, {}, {}",
                basis.len(),
                labels.len(),
                weights.len()
            )));
        }
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > 0.0))
        {
            return Err(GqcError::InvalidArgument(format!(
                "weight {i} must be positive, got {w}"
            )));
        }
        for (i, b) in basis.iter().enumerate() {
            if b.shape() != (dim, dim) {
                return Err(dim_err(format!("basis element {i} has shape {:?}", b.shape())));
            }
            if trace(b).norm() > 1e-12 || crate::operator::hs_norm(&(b - b.adjoint())) > 1e-12 {
                return Err(GqcError::InvalidArgument(format!(
                    "basis element {i} is not traceless Hermitian"
                )));
            }
        }
        for i in 0..n {
            for j in i..n {
                let want = if i == j { 1.0 } else { 0.0 };
                let z = hs_inner(&basis[i], &basis[j])?;
                if (z.re - want).abs() > 1e-10 || z.im.abs() > 1e-10 {
                    return Err(GqcError::InvalidArgument(format!(
                        "basis elements {i} and {j} are not orthonormal"
                    )));
                }
            }
        }
        Ok(Self {
            dim,
            labels,
            basis,
            weights,
        })
    }

    /// Bi-invariant (Hilbert–Schmidt) metric: all weights one.
    pub fn uniform(dim: usize) -> Result<Self> {
        let (labels, basis) = standard_basis(dim)?;
        let n = basis.len();
        Self::new(dim, labels, basis, vec![1.0; n])
    }

    /// Same basis as [`PenaltyMetric::uniform`] with explicit weights.
    pub fn with_weights(dim: usize, weights: Vec<f64>) -> Result<Self> {
        let (labels, basis) = standard_basis(dim)?;
        Self::new(dim, labels, basis, weights)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn algebra_dim(&self) -> usize {
        self.basis.len()
    }

    pub fn weight_of(&self, label: &str) -> Option<f64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.weights[i])
    }

    fn check_traceless(&self, h: &HermitianOperator) -> Result<()> {
        if h.dim() != self.dim {
            return Err(dim_err(format!(
                "operator of dim {} against metric on su({})",
                h.dim(),
                self.dim
            )));
        }
        let tr = h.trace().abs();
        if tr > 1e-10 * h.hs_norm().max(1.0) {
            return Err(GqcError::NotTraceless { trace: tr });
        }
        Ok(())
    }

    /// Real coordinates `c_i = Tr(B_i h)`.
    pub fn coefficients(&self, h: &HermitianOperator) -> Result<Vec<f64>> {
        self.check_traceless(h)?;
        Ok(self.coords_unchecked(h.matrix()))
    }

    pub(crate) fn coords_unchecked(&self, m: &ComplexMatrix) -> Vec<f64> {
        self.basis
            .iter()
            .map(|b| b.iter().zip(m.iter()).map(|(x, y)| (x.conj() * y).re).sum())
            .collect()
    }

    pub(crate) fn synthesize(&self, coeffs: &[f64]) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim, self.dim);
        for (b, &c) in self.basis.iter().zip(coeffs) {
            m += b * c64(c, 0.0);
        }
        m
    }

    /// `√((N²−1)⁻¹ Σ l_i c_i²)`.
    pub fn omega_norm(&self, h: &HermitianOperator) -> Result<f64> {
        let c = self.coefficients(h)?;
        Ok(self.omega_norm_coords(&c))
    }

    pub(crate) fn omega_norm_coords(&self, c: &[f64]) -> f64 {
        let s: f64 = c
            .iter()
            .zip(&self.weights)
            .map(|(ci, li)| li * ci * ci)
            .sum();
        (s / self.algebra_dim() as f64).sqrt()
    }

    /// Inertia operator against the plain pairing:
    /// `⟨A, B⟩_Ω = Tr(I_Ω(A)† B)`, i.e. coordinates scale by `l_i/(N²−1)`.
    pub fn inertia(&self, h: &HermitianOperator) -> Result<HermitianOperator> {
        let c = self.coefficients(h)?;
        let scaled = self.inertia_coords(&c);
        Ok(HermitianOperator::from_raw(self.synthesize(&scaled)))
    }

    pub(crate) fn inertia_coords(&self, c: &[f64]) -> Vec<f64> {
        let n = self.algebra_dim() as f64;
        c.iter().zip(&self.weights).map(|(ci, li)| li * ci / n).collect()
    }

    pub fn to_doc(&self) -> MetricDoc {
        MetricDoc {
            dim: self.dim,
            basis_labels: self.labels.clone(),
            weights: self.weights.clone(),
        }
    }

    /// Rebuilds a metric from labels. Pauli strings (`"XZ"`) and the
    /// Gell-Mann labels emitted by [`PenaltyMetric::uniform`] are understood.
    pub fn from_doc(doc: &MetricDoc) -> Result<Self> {
        let basis = doc
            .basis_labels
            .iter()
            .map(|l| basis_element(doc.dim, l))
            .collect::<Result<Vec<_>>>()?;
        Self::new(doc.dim, doc.basis_labels.clone(), basis, doc.weights.clone())
    }
}

/// `{dim, basis_labels, weights}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricDoc {
    pub dim: usize,
    pub basis_labels: Vec<String>,
    pub weights: Vec<f64>,
}

fn qubit_count(dim: usize) -> Option<usize> {
    (dim >= 2 && dim.is_power_of_two()).then(|| dim.trailing_zeros() as usize)
}

fn standard_basis(dim: usize) -> Result<(Vec<String>, Vec<ComplexMatrix>)> {
    let pairs = match qubit_count(dim) {
        Some(n) => normalized_pauli_basis(n)?,
        None => gell_mann_basis(dim)?,
    };
    Ok(pairs.into_iter().unzip())
}

fn basis_element(dim: usize, label: &str) -> Result<ComplexMatrix> {
    if label.chars().all(|c| "IXYZ".contains(c)) {
        if 1usize << label.len() != dim {
            return Err(dim_err(format!("Pauli label {label} does not match dim {dim}")));
        }
        return Ok(pauli_string(label)? * c64(1.0 / (dim as f64).sqrt(), 0.0));
    }
    gell_mann_basis(dim)?
        .into_iter()
        .find(|(l, _)| l == label)
        .map(|(_, m)| m)
        .ok_or_else(|| GqcError::InvalidArgument(format!("unknown basis label '{label}'")))
}

/// Pauli-string basis on `n_qubits` with weight 1 for strings acting on at
/// most two qubits and weight `q` otherwise.
pub fn locality_penalty_metric(n_qubits: usize, q: f64) -> Result<PenaltyMetric> {
    if n_qubits < 2 {
        return Err(GqcError::InvalidArgument(format!(
            "locality metric needs at least 2 qubits, got {n_qubits}"
        )));
    }
    if n_qubits > MAX_QUBITS {
        return Err(GqcError::InvalidArgument(format!(
            "{n_qubits} qubits exceeds the {MAX_QUBITS}-qubit cap"
        )));
    }
    if !(q.is_finite() && q > 1.0) {
        return Err(GqcError::InvalidArgument(format!("penalty factor must exceed 1, got {q}")));
    }
    let (labels, basis): (Vec<_>, Vec<_>) = normalized_pauli_basis(n_qubits)?.into_iter().unzip();
    let weights = labels
        .iter()
        .map(|l| if pauli_weight(l) <= 2 { 1.0 } else { q })
        .collect();
    PenaltyMetric::new(1 << n_qubits, labels, basis, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::sigma_z;
    use crate::random::{random_traceless_hermitian, seeded};
    use approx::assert_abs_diff_eq;

    #[test]
    fn omega_norm_anchors() {
        let m = PenaltyMetric::uniform(2).unwrap();
        // ‖σz‖_hs = √2
        let h = HermitianOperator::new(sigma_z()).unwrap();
        assert_abs_diff_eq!(m.omega_norm(&h).unwrap(), 2f64.sqrt() / 3f64.sqrt(), epsilon = 1e-14);
        assert_eq!(m.omega_norm(&HermitianOperator::zero(2)).unwrap(), 0.0);

        // doubling the weight along h's direction scales the norm by √2
        let mut w = vec![1.0; 3];
        w[2] = 2.0;
        let m2 = PenaltyMetric::with_weights(2, w).unwrap();
        assert_eq!(m2.labels()[2], "Z");
        assert_abs_diff_eq!(
            m2.omega_norm(&h).unwrap(),
            2f64.sqrt() * m.omega_norm(&h).unwrap(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn omega_norm_matches_coefficient_oracle() {
        let mut rng = seeded(17);
        for dim in [2, 3, 4] {
            let h = random_traceless_hermitian(&mut rng, dim, 1.0);
            let m = PenaltyMetric::uniform(dim).unwrap();
            let n = (dim * dim - 1) as f64;
            assert_abs_diff_eq!(m.omega_norm(&h).unwrap(), h.hs_norm() / n.sqrt(), epsilon = 1e-12);
        }
    }

    #[test]
    fn omega_norm_rejects_bad_input() {
        let m = PenaltyMetric::uniform(2).unwrap();
        assert!(matches!(
            m.omega_norm(&HermitianOperator::identity(2)),
            Err(GqcError::NotTraceless { .. })
        ));
        assert!(m.omega_norm(&HermitianOperator::zero(3)).is_err());
    }

    #[test]
    fn locality_weights() {
        let m2 = locality_penalty_metric(2, 5.0).unwrap();
        assert_eq!(m2.algebra_dim(), 15);
        assert!(m2.weights().iter().all(|&w| w == 1.0));

        let m3 = locality_penalty_metric(3, 4.0).unwrap();
        assert_eq!(m3.algebra_dim(), 63);
        assert_eq!(m3.weight_of("XXX"), Some(4.0));
        assert_eq!(m3.weight_of("XXI"), Some(1.0));
        assert_eq!(m3.weight_of("IZI"), Some(1.0));

        assert!(locality_penalty_metric(1, 4.0).is_err());
        assert!(locality_penalty_metric(3, 1.0).is_err());
        assert!(locality_penalty_metric(MAX_QUBITS + 1, 4.0).is_err());
    }

    #[test]
    fn inertia_matches_omega_pairing() {
        let mut rng = seeded(3);
        let m = PenaltyMetric::with_weights(2, vec![1.0, 3.0, 0.5]).unwrap();
        let a = random_traceless_hermitian(&mut rng, 2, 1.0);
        let ia = m.inertia(&a).unwrap();
        let pairing = hs_inner(ia.matrix(), a.matrix()).unwrap().re;
        assert_abs_diff_eq!(pairing, m.omega_norm(&a).unwrap().powi(2), epsilon = 1e-13);
    }

    #[test]
    fn doc_round_trip() {
        for m in [
            locality_penalty_metric(2, 3.0).unwrap(),
            PenaltyMetric::with_weights(3, (1..=8).map(f64::from).collect()).unwrap(),
        ] {
            let json = serde_json::to_string(&m.to_doc()).unwrap();
            let back = PenaltyMetric::from_doc(&serde_json::from_str(&json).unwrap()).unwrap();
            assert_eq!(back, m);
        }
    }
}
