//! GKSL generators, semigroup evolution, the standard collision-type
//! dilation and the complexity growth bounds built on it.

use serde::{Deserialize, Serialize};

use crate::complexity::channel_complexity;
use crate::dilation::Dilation;
use crate::error::{dim_err, GqcError, Result};
use crate::geometry::hs_complexity_static;
use crate::intrinsic::{hermitian_op_norm, AdmissibleConstraints};
use crate::operator::{
    anticommutator, c64, commutator, ensure_finite, hs_norm, identity, op_norm, tensor, zeros,
    ComplexMatrix, DensityOperator, HermitianOperator,
};
use crate::pauli::{sigma_minus, sigma_x, sigma_y, sigma_z};
use crate::report::{Cell, ReportTable};
use crate::spectral::eig_hermitian;

#[derive(Debug, Clone, PartialEq)]
pub struct GkslGenerator {
    h_s: HermitianOperator,
    lindblad_ops: Vec<ComplexMatrix>,
}

impl GkslGenerator {
    pub fn new(h_s: HermitianOperator, lindblad_ops: Vec<ComplexMatrix>) -> Result<Self> {
        let d = h_s.dim();
        for (i, l) in lindblad_ops.iter().enumerate() {
            if l.shape() != (d, d) {
                return Err(dim_err(format!(
                    "Lindblad operator {i} is {}x{}, expected {d}x{d}",
                    l.nrows(),
                    l.ncols()
                )));
            }
            ensure_finite(l)?;
        }
        Ok(Self { h_s, lindblad_ops })
    }

    pub fn dim(&self) -> usize {
        self.h_s.dim()
    }

    pub fn h_s(&self) -> &HermitianOperator {
        &self.h_s
    }

    pub fn lindblad_ops(&self) -> &[ComplexMatrix] {
        &self.lindblad_ops
    }

    /// Same Hamiltonian, Lindblad operators of both generators.
    pub fn disjoint_union(&self, other: &Self) -> Result<Self> {
        let mut ops = self.lindblad_ops.clone();
        ops.extend(other.lindblad_ops.iter().cloned());
        Self::new(self.h_s.clone(), ops)
    }

    /// `L_α ↦ Σ_β u_{αβ} L_β` for an `m×m` unitary `u`.
    pub fn mixed(&self, u: &ComplexMatrix) -> Result<Self> {
        let m = self.lindblad_ops.len();
        if u.shape() != (m, m) {
            return Err(dim_err(format!("mixing matrix must be {m}x{m}")));
        }
        let d = self.dim();
        let ops = (0..m)
            .map(|a| {
                (0..m).fold(zeros(d, d), |acc, b| acc + &self.lindblad_ops[b] * u[(a, b)])
            })
            .collect();
        Self::new(self.h_s.clone(), ops)
    }
}

/// `−i[h_S, x] + Σ (L x L† − ½{L†L, x})` for any `d×d` matrix `x`.
pub fn gksl_apply_matrix(g: &GkslGenerator, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = g.dim();
    if x.shape() != (d, d) {
        return Err(dim_err(format!("input must be {d}x{d}")));
    }
    let mut out = commutator(g.h_s.matrix(), x) * c64(0.0, -1.0);
    for l in &g.lindblad_ops {
        let ldl = l.adjoint() * l;
        out += l * x * l.adjoint() - anticommutator(&ldl, x) * c64(0.5, 0.0);
    }
    Ok(out)
}

pub fn gksl_apply(g: &GkslGenerator, rho: &DensityOperator) -> Result<ComplexMatrix> {
    gksl_apply_matrix(g, rho.matrix())
}

/// Column-stacking Liouvillian: `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`.
pub fn liouvillian(g: &GkslGenerator) -> ComplexMatrix {
    let d = g.dim();
    let id = identity(d);
    let h = g.h_s.matrix();
    let mut lv = (tensor(&id, h) - tensor(&h.transpose(), &id)) * c64(0.0, -1.0);
    for l in &g.lindblad_ops {
        let ldl = l.adjoint() * l;
        lv += tensor(&l.conjugate(), l)
            - (tensor(&id, &ldl) + tensor(&ldl.transpose(), &id)) * c64(0.5, 0.0);
    }
    lv
}

fn vec_of(m: &ComplexMatrix) -> ComplexMatrix {
    // nalgebra storage is column-major, so this is column stacking
    ComplexMatrix::from_column_slice(m.len(), 1, m.as_slice())
}

fn unvec(v: &ComplexMatrix, d: usize) -> ComplexMatrix {
    ComplexMatrix::from_column_slice(d, d, v.as_slice())
}

/// `e^{tℒ}` precomputed for repeated application.
#[derive(Debug, Clone)]
pub struct SemigroupPropagator {
    d: usize,
    matrix: ComplexMatrix,
}

impl SemigroupPropagator {
    pub fn new(g: &GkslGenerator, t: f64) -> Result<Self> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(GqcError::InvalidArgument(format!("time must be ≥ 0, got {t}")));
        }
        let matrix = (liouvillian(g) * c64(t, 0.0)).exp();
        ensure_finite(&matrix)?;
        Ok(Self { d: g.dim(), matrix })
    }

    pub fn apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.shape() != (self.d, self.d) {
            return Err(dim_err(format!("input must be {0}x{0}", self.d)));
        }
        Ok(unvec(&(&self.matrix * vec_of(x)), self.d))
    }

    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        Ok(DensityOperator::from_raw(self.apply_matrix(rho.matrix())?))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

pub fn semigroup_evolve(g: &GkslGenerator, rho0: &DensityOperator, t: f64) -> Result<DensityOperator> {
    if rho0.dim() != g.dim() {
        return Err(dim_err("state and generator dimensions differ"));
    }
    SemigroupPropagator::new(g, t)?.apply(rho0)
}

/// `Γ = Σ ‖L_α‖_op²`.
pub fn dissipator_scale(g: &GkslGenerator) -> f64 {
    g.lindblad_ops.iter().map(|l| op_norm(l).powi(2)).sum()
}

/// `Σ ‖L_α‖_hs²`, which is exactly invariant under unitary mixing.
pub fn dissipator_scale_hs(g: &GkslGenerator) -> f64 {
    g.lindblad_ops.iter().map(|l| hs_norm(l).powi(2)).sum()
}

/// `|Γ(mixed) − Γ(g)|` and the same for the HS version. The first is an
/// empirical observation only.
pub fn mixing_residuals(g: &GkslGenerator, u: &ComplexMatrix) -> Result<(f64, f64)> {
    let m = g.mixed(u)?;
    Ok((
        (dissipator_scale(&m) - dissipator_scale(g)).abs(),
        (dissipator_scale_hs(&m) - dissipator_scale_hs(g)).abs(),
    ))
}

/// Bath data for `H_tot = h_S⊗I + I⊗h_E + Σ(L_α⊗B_α† + L_α†⊗B_α)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardDilationSpec {
    h_e: HermitianOperator,
    bath_ops: Vec<ComplexMatrix>,
    beta: f64,
    rho_e: Option<DensityOperator>,
}

/// `‖B_α‖_op ≤ β` is checked with this absolute slack.
pub const BATH_CAP_SLACK: f64 = 1e-12;

impl StandardDilationSpec {
    pub fn new(
        h_e: HermitianOperator,
        bath_ops: Vec<ComplexMatrix>,
        beta: f64,
        rho_e: Option<DensityOperator>,
    ) -> Result<Self> {
        let d_e = h_e.dim();
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(GqcError::InvalidArgument(format!("beta must be ≥ 0, got {beta}")));
        }
        for (i, b) in bath_ops.iter().enumerate() {
            if b.shape() != (d_e, d_e) {
                return Err(dim_err(format!("bath operator {i} must be {d_e}x{d_e}")));
            }
            ensure_finite(b)?;
            let n = op_norm(b);
            if n > beta + BATH_CAP_SLACK {
                return Err(GqcError::InvalidArgument(format!(
                    "bath operator {i} has operator norm {n} above beta = {beta}"
                )));
            }
        }
        if let Some(r) = &rho_e {
            if r.dim() != d_e {
                return Err(dim_err("rho_E must live on the environment"));
            }
        }
        Ok(Self { h_e, bath_ops, beta, rho_e })
    }

    /// Qubit environment, `h_E = 0`, `B_α = β σ₋`, `ρ_E = |0⟩⟨0|`.
    pub fn default_bath(m: usize, beta: f64) -> Result<Self> {
        Self::new(
            HermitianOperator::zero(2),
            vec![sigma_minus() * c64(beta, 0.0); m],
            beta,
            Some(DensityOperator::basis_state(2, 0)?),
        )
    }

    pub fn d_e(&self) -> usize {
        self.h_e.dim()
    }

    pub fn h_e(&self) -> &HermitianOperator {
        &self.h_e
    }

    pub fn bath_ops(&self) -> &[ComplexMatrix] {
        &self.bath_ops
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Declared `ρ_E`, or the ground state of `h_E` (lowest eigenvector) if
    /// none was given.
    pub fn rho_e(&self) -> Result<DensityOperator> {
        if let Some(r) = &self.rho_e {
            return Ok(r.clone());
        }
        let spec = eig_hermitian(&self.h_e)?;
        let v: Vec<_> = spec.eigenvectors.column(0).iter().copied().collect();
        DensityOperator::pure(&v)
    }

    pub fn rho_e_declared(&self) -> bool {
        self.rho_e.is_some()
    }

    /// `‖B_α‖_hs ≤ β` for every bath operator, the condition under which
    /// the growth bounds hold without a `√d_E` factor.
    pub fn certified(&self) -> bool {
        self.bath_ops.iter().all(|b| hs_norm(b) <= self.beta + BATH_CAP_SLACK)
    }
}

pub fn standard_dilation(g: &GkslGenerator, spec: &StandardDilationSpec) -> Result<Dilation> {
    let m = g.lindblad_ops.len();
    if spec.bath_ops.len() != m {
        return Err(dim_err(format!(
            "{} bath operators for {m} Lindblad operators",
            spec.bath_ops.len()
        )));
    }
    let (d_s, d_e) = (g.dim(), spec.d_e());
    let mut h = tensor(g.h_s.matrix(), &identity(d_e)) + tensor(&identity(d_s), spec.h_e.matrix());
    for (l, b) in g.lindblad_ops.iter().zip(&spec.bath_ops) {
        h += tensor(l, &b.adjoint()) + tensor(&l.adjoint(), b);
    }
    Dilation::new(d_s, d_e, spec.rho_e()?, HermitianOperator::new(h)?)
}

fn norm_factor(n: usize) -> f64 {
    ((n * n - 1) as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthBound {
    pub bound_full: f64,
    pub bound_reduced: f64,
    /// `Σ ‖L_α‖_hs`.
    pub lindblad_hs_sum: f64,
    /// See [`StandardDilationSpec::certified`].
    pub certified: bool,
}

pub fn growth_bound(g: &GkslGenerator, spec: &StandardDilationSpec, t: f64) -> Result<GrowthBound> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(GqcError::InvalidArgument(format!("time must be ≥ 0, got {t}")));
    }
    if spec.bath_ops.len() != g.lindblad_ops.len() {
        return Err(dim_err("bath and Lindblad operator counts differ"));
    }
    let (d_s, d_e) = (g.dim(), spec.d_e());
    let s = norm_factor(d_s * d_e);
    let sys = g.h_s.hs_norm() * (d_e as f64).sqrt();
    let env = spec.h_e.hs_norm() * (d_s as f64).sqrt();
    let l_sum: f64 = g.lindblad_ops.iter().map(hs_norm).sum();
    let coupling = 2.0 * spec.beta * l_sum;
    Ok(GrowthBound {
        bound_full: t / s * (sys + coupling + env),
        bound_reduced: t / s * (sys + coupling),
        lindblad_hs_sum: l_sum,
        certified: spec.certified(),
    })
}

/// `t/√(d_tot²−1)·(‖h_S‖_hs√d_E + 2β√d_S√m√Γ)`.
pub fn coarse_intrinsic_bound(
    g: &GkslGenerator,
    spec: &StandardDilationSpec,
    c: &AdmissibleConstraints,
    t: f64,
) -> Result<f64> {
    c.validate()?;
    if spec.d_e() > c.d_e_max {
        return Err(GqcError::InvalidArgument(format!(
            "bath dimension {} exceeds d_E_max = {}",
            spec.d_e(),
            c.d_e_max
        )));
    }
    let d = standard_dilation(g, spec)?;
    let n = hermitian_op_norm(d.h_tot())?;
    if n > c.j_max * (1.0 + crate::intrinsic::NORM_SLACK) {
        return Err(GqcError::InvalidArgument(format!(
            "standard dilation has ‖H_tot‖_op = {n} above J_max = {}",
            c.j_max
        )));
    }
    let bound = coarse_bound_value(g, spec, t)?;
    let reduced = growth_bound(g, spec, t)?.bound_reduced;
    // Cauchy–Schwarz plus ‖L‖_hs ≤ √d_S‖L‖_op; rounding-level slack only.
    if bound < reduced * (1.0 - 1e-12) - 1e-15 {
        return Err(GqcError::InvalidArgument(format!(
            "coarse bound {bound} below reduced bound {reduced}"
        )));
    }
    Ok(bound)
}

/// The coarse bound without the admissibility check.
pub fn coarse_bound_value(g: &GkslGenerator, spec: &StandardDilationSpec, t: f64) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(GqcError::InvalidArgument(format!("time must be ≥ 0, got {t}")));
    }
    let (d_s, d_e) = (g.dim(), spec.d_e());
    let m = g.lindblad_ops.len() as f64;
    let s = norm_factor(d_s * d_e);
    Ok(t / s
        * (g.h_s.hs_norm() * (d_e as f64).sqrt()
            + 2.0 * spec.beta * (d_s as f64).sqrt() * m.sqrt() * dissipator_scale(g).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchmarkKind {
    Dephasing,
    AmplitudeDamping,
    Depolarizing,
    Pauli,
}

impl BenchmarkKind {
    pub fn name(self) -> &'static str {
        match self {
            BenchmarkKind::Dephasing => "dephasing",
            BenchmarkKind::AmplitudeDamping => "amplitude_damping",
            BenchmarkKind::Depolarizing => "depolarizing",
            BenchmarkKind::Pauli => "pauli",
        }
    }

    fn rate_count(self) -> usize {
        match self {
            BenchmarkKind::Pauli => 3,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkSpec {
    pub kind: BenchmarkKind,
    pub omega: f64,
    pub rates: Vec<f64>,
}

impl BenchmarkSpec {
    pub fn new(kind: BenchmarkKind, omega: f64, rates: Vec<f64>) -> Result<Self> {
        let s = Self { kind, omega, rates };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rates.len() != self.kind.rate_count() {
            return Err(GqcError::InvalidArgument(format!(
                "{} takes {} rate(s), got {}",
                self.kind.name(),
                self.kind.rate_count(),
                self.rates.len()
            )));
        }
        if let Some(r) = self.rates.iter().find(|r| !(**r >= 0.0 && r.is_finite())) {
            return Err(GqcError::InvalidArgument(format!("rates must be ≥ 0, got {r}")));
        }
        if !self.omega.is_finite() {
            return Err(GqcError::InvalidArgument("omega must be finite".into()));
        }
        Ok(())
    }

    /// Rates joined with `;` for table output.
    pub fn rates_label(&self) -> String {
        self.rates
            .iter()
            .map(|r| format!("{r}"))
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// `h_S = (ω/2)σ_z` with the benchmark's Lindblad operators.
pub fn benchmark_channel(spec: &BenchmarkSpec) -> Result<GkslGenerator> {
    spec.validate()?;
    let h_s = HermitianOperator::new(sigma_z() * c64(spec.omega / 2.0, 0.0))?;
    let r = &spec.rates;
    let scaled = |m: ComplexMatrix, k: f64| m * c64(k.sqrt(), 0.0);
    let ops = match spec.kind {
        BenchmarkKind::Dephasing => vec![scaled(sigma_z(), r[0] / 2.0)],
        BenchmarkKind::AmplitudeDamping => vec![scaled(sigma_minus(), r[0])],
        BenchmarkKind::Depolarizing => vec![
            scaled(sigma_x(), r[0] / 2.0),
            scaled(sigma_y(), r[0] / 2.0),
            scaled(sigma_z(), r[0] / 2.0),
        ],
        BenchmarkKind::Pauli => vec![
            scaled(sigma_x(), r[0] / 2.0),
            scaled(sigma_y(), r[1] / 2.0),
            scaled(sigma_z(), r[2] / 2.0),
        ],
    };
    GkslGenerator::new(h_s, ops)
}

/// Environment model used for every row of a benchmark table: one copy of
/// `bath_op` per Lindblad operator.
#[derive(Debug, Clone, PartialEq)]
pub struct BathModel {
    pub h_e: HermitianOperator,
    pub bath_op: ComplexMatrix,
    pub beta: f64,
    pub rho_e: Option<DensityOperator>,
}

impl Default for BathModel {
    fn default() -> Self {
        Self {
            h_e: HermitianOperator::zero(2),
            bath_op: sigma_minus(),
            beta: 1.0,
            rho_e: Some(DensityOperator::basis_state(2, 0).expect("qubit ground state")),
        }
    }
}

impl BathModel {
    pub fn spec_for(&self, m: usize) -> Result<StandardDilationSpec> {
        StandardDilationSpec::new(self.h_e.clone(), vec![self.bath_op.clone(); m], self.beta, self.rho_e.clone())
    }
}

pub const BENCHMARK_COLUMNS: [&str; 12] = [
    "kind",
    "rates",
    "t",
    "complexity_value",
    "noise_value",
    "bound_reduced",
    "bound_full",
    "bound_coarse",
    "ideal",
    "embedding_only",
    "certified",
    "negative",
];

/// Value-versus-rate trend at one `(kind, t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateTrend {
    pub kind: BenchmarkKind,
    pub t: f64,
    /// `(Σ rates, complexity value)` ordered by total rate.
    pub points: Vec<(f64, f64)>,
    pub nondecreasing: bool,
    pub nonincreasing: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkTable {
    pub table: ReportTable,
    pub trends: Vec<RateTrend>,
}

fn flag(b: bool) -> Cell {
    Cell::Text(if b { "true" } else { "false" }.into())
}

/// One row per `(spec, t)` evaluated on the standard dilation built from
/// `bath`, in input order.
pub fn benchmark_bounds_table(specs: &[BenchmarkSpec], bath: &BathModel, t_grid: &[f64]) -> Result<BenchmarkTable> {
    let mut table = ReportTable::new("bench", &BENCHMARK_COLUMNS);
    let mut values: Vec<(BenchmarkKind, f64, f64, f64)> = Vec::new();
    for spec in specs {
        let g = benchmark_channel(spec)?;
        let env = bath.spec_for(g.lindblad_ops().len())?;
        let d = standard_dilation(&g, &env)?;
        let zero_rate = spec.rates.iter().all(|&r| r == 0.0);
        for &t in t_grid {
            let r = channel_complexity(&d, g.h_s(), t)?;
            let b = growth_bound(&g, &env, t)?;
            let coarse = coarse_bound_value(&g, &env, t)?;
            let ideal = hs_complexity_static(g.h_s(), t, g.dim())?;
            table.push_row(vec![
                spec.kind.name().into(),
                spec.rates_label().into(),
                t.into(),
                r.value.into(),
                r.noise_value.unwrap_or(f64::NAN).into(),
                b.bound_reduced.into(),
                b.bound_full.into(),
                coarse.into(),
                ideal.into(),
                flag(zero_rate),
                flag(b.certified),
                flag(r.negative),
            ])?;
            values.push((spec.kind, spec.rates.iter().sum(), t, r.value));
        }
    }

    let mut trends = Vec::new();
    let mut kinds: Vec<BenchmarkKind> = Vec::new();
    for s in specs {
        if !kinds.contains(&s.kind) {
            kinds.push(s.kind);
        }
    }
    for kind in kinds {
        for &t in t_grid {
            let mut points: Vec<(f64, f64)> = values
                .iter()
                .filter(|(k, _, tt, _)| *k == kind && *tt == t)
                .map(|&(_, rate, _, v)| (rate, v))
                .collect();
            if points.len() < 2 {
                continue;
            }
            points.sort_by(|a, b| a.0.total_cmp(&b.0));
            trends.push(RateTrend {
                kind,
                t,
                nondecreasing: points.windows(2).all(|w| w[1].1 >= w[0].1 - 1e-12),
                nonincreasing: points.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12),
                points,
            });
        }
    }
    Ok(BenchmarkTable { table, trends })
}
