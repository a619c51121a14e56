//! Problem files: `{kind, payload, tolerances, seed}` with a kind-specific
//! payload that is fully validated before any computation.

use std::path::Path;

use gqc_core::dilation::{ChoiMatrix, Dilation, DilationDoc};
use gqc_core::geometry::uniform_grid;
use gqc_core::gksl::{BathModel, BenchmarkSpec, GkslGenerator};
use gqc_core::interchange::{density_from_json, matrix_from_json, FieldError, HermitianDoc, MatrixEntries};
use gqc_core::intrinsic::{AdmissibleConstraints, ChannelTarget, ConstraintsDoc, OptimizerOptions};
use gqc_core::operator::c64;
use gqc_core::pauli::sigma_minus;
use gqc_core::{DensityOperator, HermitianOperator, ToleranceConfig};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Unitary,
    Channel,
    Noise,
    Intrinsic,
    GkslBound,
    Benchmark,
    Verify,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Unitary => "unitary",
            ProblemKind::Channel => "channel",
            ProblemKind::Noise => "noise",
            ProblemKind::Intrinsic => "intrinsic",
            ProblemKind::GkslBound => "gksl_bound",
            ProblemKind::Benchmark => "bench",
            ProblemKind::Verify => "verify",
        }
    }
}

/// Where evaluation times come from when a payload or flag supplies them.
#[derive(Debug, Clone, PartialEq)]
pub enum Times {
    Unset,
    Given(Vec<f64>),
}

#[derive(Debug, Clone)]
pub struct UnitaryProblem {
    pub h: HermitianOperator,
    pub times: Times,
}

#[derive(Debug, Clone)]
pub struct ChannelProblem {
    pub dilation: Dilation,
    pub h_s: HermitianOperator,
    pub times: Times,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    #[default]
    Complexity,
    Noise,
}

#[derive(Debug, Clone)]
pub struct IntrinsicProblem {
    pub target: ChannelTarget,
    pub h_s: HermitianOperator,
    pub constraints: AdmissibleConstraints,
    pub t_eval: f64,
    pub options: OptimizerOptions,
    pub seeds: Vec<Dilation>,
    pub objective: Objective,
}

#[derive(Debug, Clone)]
pub struct GkslProblem {
    pub generator: GkslGenerator,
    pub bath: BathModel,
    pub times: Times,
}

#[derive(Debug, Clone)]
pub struct BenchmarkProblem {
    pub specs: Vec<BenchmarkSpec>,
    pub bath: BathModel,
    pub times: Times,
}

#[derive(Debug, Clone)]
pub struct VerifyProblem {
    pub suite: String,
}

#[derive(Debug, Clone)]
pub enum Payload {
    Unitary(UnitaryProblem),
    Channel(ChannelProblem),
    Noise(ChannelProblem),
    Intrinsic(Box<IntrinsicProblem>),
    GkslBound(GkslProblem),
    Benchmark(BenchmarkProblem),
    Verify(VerifyProblem),
}

#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    pub payload: Payload,
    pub tolerances: ToleranceConfig,
    pub seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    kind: ProblemKind,
    #[serde(default)]
    payload: Value,
    #[serde(default)]
    tolerances: ToleranceConfig,
    #[serde(default)]
    seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct UnitaryDoc {
    h: HermitianDoc,
    #[serde(default)]
    t: Option<f64>,
    #[serde(default)]
    t_grid: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelDoc {
    dilation: DilationDoc,
    #[serde(rename = "h_S")]
    h_s: HermitianDoc,
    #[serde(default)]
    t: Option<f64>,
    #[serde(default)]
    t_grid: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case")]
enum TargetDoc {
    Unitary,
    Dilation(DilationDoc),
    Choi(Vec<MatrixEntries>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IntrinsicDoc {
    target: TargetDoc,
    #[serde(rename = "h_S")]
    h_s: HermitianDoc,
    constraints: ConstraintsDoc,
    t_eval: f64,
    #[serde(default)]
    options: OptimizerOptions,
    #[serde(default)]
    seeds: Vec<DilationDoc>,
    #[serde(default)]
    objective: Objective,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorDoc {
    #[serde(rename = "h_S")]
    h_s: HermitianDoc,
    #[serde(default)]
    lindblad_ops: Vec<MatrixEntries>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct BathDoc {
    #[serde(rename = "h_E", default)]
    h_e: Option<HermitianDoc>,
    #[serde(default)]
    bath_op: Option<MatrixEntries>,
    #[serde(default)]
    beta: Option<f64>,
    #[serde(rename = "rho_E", default)]
    rho_e: Option<MatrixEntries>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GkslDoc {
    generator: GeneratorDoc,
    #[serde(default)]
    bath: BathDoc,
    #[serde(default)]
    t: Option<f64>,
    #[serde(default)]
    t_grid: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BenchmarkDoc {
    specs: Vec<BenchmarkSpec>,
    #[serde(default)]
    bath: BathDoc,
    #[serde(default)]
    t: Option<f64>,
    #[serde(default)]
    t_grid: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VerifyDoc {
    #[serde(default = "all_suites")]
    suite: String,
}

fn all_suites() -> String {
    "all".into()
}

fn field(prefix: &str) -> impl Fn(FieldError) -> CliError + '_ {
    move |e| CliError::Validation(format!("{prefix}.{e}"))
}

fn typed<T: DeserializeOwned>(payload: Value) -> Result<T, CliError> {
    serde_json::from_value(payload).map_err(|e| CliError::Validation(format!("payload: {e}")))
}

/// An empty list is allowed and yields a header-only report.
pub fn validate_times(times: &[f64], name: &str) -> Result<(), CliError> {
    if let Some((i, t)) = times.iter().enumerate().find(|(_, t)| !(**t >= 0.0 && t.is_finite())) {
        return Err(CliError::Validation(format!("{name}[{i}]: time must be finite and ≥ 0, got {t}")));
    }
    Ok(())
}

fn times_of(t: Option<f64>, grid: Option<Vec<f64>>) -> Result<Times, CliError> {
    match (t, grid) {
        (Some(_), Some(_)) => Err(CliError::Validation("payload: give either t or t_grid, not both".into())),
        (Some(t), None) => {
            validate_times(&[t], "payload.t")?;
            Ok(Times::Given(vec![t]))
        }
        (None, Some(g)) => {
            validate_times(&g, "payload.t_grid")?;
            Ok(Times::Given(g))
        }
        (None, None) => Ok(Times::Unset),
    }
}

fn decode_bath(doc: &BathDoc, tol: &ToleranceConfig) -> Result<BathModel, CliError> {
    let base = BathModel::default();
    let beta = doc.beta.unwrap_or(base.beta);
    let h_e = match &doc.h_e {
        Some(h) => h.decode("h_E", tol).map_err(field("payload.bath"))?,
        None => {
            let d = doc.bath_op.as_ref().map_or(2, |m| m.len());
            HermitianOperator::zero(d)
        }
    };
    let d_e = h_e.dim();
    let bath_op = match &doc.bath_op {
        Some(m) => matrix_from_json(m, "bath_op", d_e, d_e).map_err(field("payload.bath"))?,
        None if d_e == 2 => sigma_minus() * c64(beta, 0.0),
        None => return Err(CliError::Validation("payload.bath.bath_op: required when h_E is not a qubit".into())),
    };
    let rho_e = match (&doc.rho_e, &doc.h_e) {
        (Some(m), _) => Some(density_from_json(m, "rho_E", d_e, tol).map_err(field("payload.bath"))?),
        (None, None) => Some(DensityOperator::basis_state(d_e, 0).map_err(|e| CliError::Validation(e.to_string()))?),
        (None, Some(_)) => None,
    };
    let bath = BathModel { h_e, bath_op, beta, rho_e };
    // surface norm-cap violations now rather than at the first row
    bath.spec_for(1).map_err(|e| CliError::Validation(format!("payload.bath: {e}")))?;
    Ok(bath)
}

fn decode_payload(kind: ProblemKind, payload: Value, tol: &ToleranceConfig) -> Result<Payload, CliError> {
    Ok(match kind {
        ProblemKind::Unitary => {
            let doc: UnitaryDoc = typed(payload)?;
            Payload::Unitary(UnitaryProblem {
                h: doc.h.decode("h", tol).map_err(field("payload"))?,
                times: times_of(doc.t, doc.t_grid)?,
            })
        }
        ProblemKind::Channel | ProblemKind::Noise => {
            let doc: ChannelDoc = typed(payload)?;
            let p = ChannelProblem {
                dilation: doc.dilation.decode(tol).map_err(field("payload.dilation"))?,
                h_s: doc.h_s.decode("h_S", tol).map_err(field("payload"))?,
                times: times_of(doc.t, doc.t_grid)?,
            };
            if p.h_s.dim() != p.dilation.d_s() {
                return Err(CliError::Validation(format!(
                    "payload.h_S: dimension {} does not match d_S = {}",
                    p.h_s.dim(),
                    p.dilation.d_s()
                )));
            }
            if kind == ProblemKind::Channel {
                Payload::Channel(p)
            } else {
                Payload::Noise(p)
            }
        }
        ProblemKind::Intrinsic => {
            let doc: IntrinsicDoc = typed(payload)?;
            let h_s = doc.h_s.decode("h_S", tol).map_err(field("payload"))?;
            let d_s = h_s.dim();
            let target = match &doc.target {
                TargetDoc::Unitary => ChannelTarget::unitary(&h_s),
                TargetDoc::Dilation(d) => ChannelTarget::Dilation(d.decode(tol).map_err(field("payload.target"))?),
                TargetDoc::Choi(list) => ChannelTarget::Choi(
                    list.iter()
                        .enumerate()
                        .map(|(i, m)| {
                            let name = format!("choi[{i}]");
                            let mat = matrix_from_json(m, &name, d_s * d_s, d_s * d_s).map_err(field("payload.target"))?;
                            ChoiMatrix::new(d_s, mat).map_err(|e| CliError::Validation(format!("payload.target.{name}: {e}")))
                        })
                        .collect::<Result<_, _>>()?,
                ),
            };
            let constraints = doc.constraints.decode(tol).map_err(field("payload"))?;
            let seeds = doc
                .seeds
                .iter()
                .enumerate()
                .map(|(i, s)| s.decode(tol).map_err(|e| CliError::Validation(format!("payload.seeds[{i}].{e}"))))
                .collect::<Result<_, _>>()?;
            doc.options.validate().map_err(|e| CliError::Validation(format!("payload.options: {e}")))?;
            if !(doc.t_eval >= 0.0 && doc.t_eval <= constraints.t_final()) {
                return Err(CliError::Validation(format!(
                    "payload.t_eval: {} outside [0, {}]",
                    doc.t_eval,
                    constraints.t_final()
                )));
            }
            Payload::Intrinsic(Box::new(IntrinsicProblem {
                target,
                h_s,
                constraints,
                t_eval: doc.t_eval,
                options: doc.options,
                seeds,
                objective: doc.objective,
            }))
        }
        ProblemKind::GkslBound => {
            let doc: GkslDoc = typed(payload)?;
            let h_s = doc.generator.h_s.decode("h_S", tol).map_err(field("payload.generator"))?;
            let d = h_s.dim();
            let ops = doc
                .generator
                .lindblad_ops
                .iter()
                .enumerate()
                .map(|(i, m)| matrix_from_json(m, &format!("lindblad_ops[{i}]"), d, d).map_err(field("payload.generator")))
                .collect::<Result<_, _>>()?;
            Payload::GkslBound(GkslProblem {
                generator: GkslGenerator::new(h_s, ops).map_err(|e| CliError::Validation(format!("payload.generator: {e}")))?,
                bath: decode_bath(&doc.bath, tol)?,
                times: times_of(doc.t, doc.t_grid)?,
            })
        }
        ProblemKind::Benchmark => {
            let doc: BenchmarkDoc = typed(payload)?;
            for (i, s) in doc.specs.iter().enumerate() {
                s.validate().map_err(|e| CliError::Validation(format!("payload.specs[{i}]: {e}")))?;
            }
            Payload::Benchmark(BenchmarkProblem {
                specs: doc.specs,
                bath: decode_bath(&doc.bath, tol)?,
                times: times_of(doc.t, doc.t_grid)?,
            })
        }
        ProblemKind::Verify => {
            let doc: VerifyDoc = typed(if payload.is_null() { Value::Object(Default::default()) } else { payload })?;
            Payload::Verify(VerifyProblem { suite: doc.suite })
        }
    })
}

/// Parses a problem document from a string.
pub fn parse_problem(text: &str) -> Result<ProblemSpec, CliError> {
    parse_problem_with(text, &[])
}

/// As [`parse_problem`], applying `name=value` tolerance overrides before
/// the payload is validated.
pub fn parse_problem_with(text: &str, overrides: &[(String, f64)]) -> Result<ProblemSpec, CliError> {
    let mut raw: RawSpec = serde_json::from_str(text).map_err(|e| CliError::Validation(format!("parse error: {e}")))?;
    for (name, value) in overrides {
        raw.tolerances.set(name, *value).map_err(|e| CliError::Validation(format!("--tol: {e}")))?;
    }
    let payload = decode_payload(raw.kind, raw.payload, &raw.tolerances)?;
    Ok(ProblemSpec {
        kind: raw.kind,
        payload,
        tolerances: raw.tolerances,
        seed: raw.seed,
    })
}

pub fn load_problem(path: &Path) -> Result<ProblemSpec, CliError> {
    load_problem_with(path, &[])
}

pub fn load_problem_with(path: &Path, overrides: &[(String, f64)]) -> Result<ProblemSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_problem_with(&text, overrides)
}

/// Parses `start:stop:n`.
pub fn parse_t_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || CliError::Validation(format!("--t-grid: expected start:stop:n, got '{s}'"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    let grid = uniform_grid(start, stop, n).map_err(|e| CliError::Validation(format!("--t-grid: {e}")))?;
    validate_times(&grid, "--t-grid")?;
    Ok(grid)
}
