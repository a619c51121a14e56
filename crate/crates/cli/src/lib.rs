//! Front end for the `gqc` binary: problem loading, subcommand dispatch and
//! report emission.

pub mod emit;
pub mod error;
pub mod problem;
pub mod verify;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use gqc_core::complexity::channel_complexity;
use gqc_core::dilation::Dilation;
use gqc_core::geometry::{hs_complexity_report, uniform_grid};
use gqc_core::gksl::{
    benchmark_bounds_table, coarse_bound_value, dissipator_scale, growth_bound, standard_dilation, BathModel,
};
use gqc_core::interchange::HermitianDoc;
use gqc_core::intrinsic::{intrinsic_complexity, intrinsic_noise, OptimizationResult};
use gqc_core::report::{Cell, ReportTable};
use gqc_core::{HermitianOperator, ToleranceConfig};
use serde_json::json;

use emit::{emit_report, parse_formats, write_meta, Format};
use error::{CliError, EXIT_OK, EXIT_VALIDATION};
use problem::{load_problem_with, parse_t_grid, Objective, Payload, ProblemKind, ProblemSpec, Times};

#[derive(Parser, Debug)]
#[command(name = "gqc", version, about = "Geometric complexity of unitaries and open-system quantum channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct CommonArgs {
    /// Problem file (JSON).
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Single evaluation time.
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<f64>,
    /// Uniform time grid `start:stop:n`.
    #[arg(long = "t-grid")]
    pub t_grid: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Tolerance override `name=value`; repeatable.
    #[arg(long = "tol")]
    pub tol: Vec<String>,
    /// Output formats, e.g. `csv,svg`.
    #[arg(long = "format", value_delimiter = ',')]
    pub format: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-system complexity of exp(−itH).
    Unitary {
        #[command(flatten)]
        common: CommonArgs,
        /// Hermitian operator file `{dim, matrix}`.
        #[arg(long)]
        h: Option<PathBuf>,
    },
    /// Implementation-dependent channel complexity of a dilation.
    Channel(CommonArgs),
    /// Noise complexity of a dilation.
    Noise(CommonArgs),
    /// Intrinsic complexity by constrained multi-start optimization.
    Intrinsic(CommonArgs),
    /// Growth bounds of the standard GKSL dilation.
    #[command(name = "gksl-bound")]
    GkslBound(CommonArgs),
    /// Benchmark bound tables for dephasing, damping and Pauli channels.
    Bench(CommonArgs),
    /// Seeded property suites.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Suite name or `all`.
        #[arg(long)]
        suite: Option<String>,
    },
}

/// Default evaluation grid when neither the problem file nor a flag gives one.
pub fn default_t_grid() -> Vec<f64> {
    uniform_grid(0.0, 3.0, 7).expect("static grid")
}

/// Everything a subcommand needs besides its payload.
struct RunContext {
    kind: ProblemKind,
    out: PathBuf,
    formats: Vec<Format>,
    seed: u64,
    tolerances: ToleranceConfig,
    flag_times: Option<Vec<f64>>,
}

impl RunContext {
    fn stem(&self) -> String {
        format!("{}_seed{}", self.kind.name(), self.seed)
    }

    fn times(&self, payload: &Times) -> Vec<f64> {
        if let Some(t) = &self.flag_times {
            return t.clone();
        }
        match payload {
            Times::Given(t) => t.clone(),
            Times::Unset => default_t_grid(),
        }
    }

    fn meta(&self, table: &ReportTable, files: &[PathBuf]) -> serde_json::Value {
        json!({
            "artifact": "gqc",
            "artifact_version": env!("CARGO_PKG_VERSION"),
            "kind": self.kind.name(),
            "seed": self.seed,
            "tolerances": self.tolerances,
            "timestamp": chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            "files": files.iter().filter_map(|f| f.file_name()).map(|f| f.to_string_lossy().into_owned()).collect::<Vec<_>>(),
            "table": table.metadata,
        })
    }

    /// Writes the table plus its metadata sidecar and returns every path.
    fn finish(&self, table: &ReportTable, stem: &str) -> Result<Vec<PathBuf>, CliError> {
        let mut files = emit_report(table, &self.out, stem, &self.formats)?;
        let meta = self.meta(table, &files);
        files.push(write_meta(&self.out, stem, &meta)?);
        Ok(files)
    }
}

fn parse_tol_flags(items: &[String]) -> Result<Vec<(String, f64)>, CliError> {
    items
        .iter()
        .map(|s| {
            let (name, value) = s
                .split_once('=')
                .ok_or_else(|| CliError::Validation(format!("--tol: expected name=value, got '{s}'")))?;
            let v: f64 = value
                .trim()
                .parse()
                .map_err(|_| CliError::Validation(format!("--tol: '{value}' is not a number")))?;
            Ok((name.trim().to_string(), v))
        })
        .collect()
}

fn flag_times(common: &CommonArgs) -> Result<Option<Vec<f64>>, CliError> {
    match (common.t, &common.t_grid) {
        (Some(_), Some(_)) => Err(CliError::Validation("give either --t or --t-grid, not both".into())),
        (Some(t), None) => {
            problem::validate_times(&[t], "--t")?;
            Ok(Some(vec![t]))
        }
        (None, Some(g)) => parse_t_grid(g).map(Some),
        (None, None) => Ok(None),
    }
}

fn text(b: bool) -> Cell {
    Cell::Text(if b { "true" } else { "false" }.into())
}

fn opt_num(x: Option<f64>) -> Cell {
    x.map_or_else(|| Cell::Text("NA".into()), Cell::Num)
}

fn unitary_table(h: &HermitianOperator, times: &[f64]) -> Result<ReportTable, CliError> {
    let d = h.dim();
    let mut t = ReportTable::new("unitary", &["t", "dim", "complexity", "traceless_complexity", "hs_norm"]);
    for &s in times {
        let r = hs_complexity_report(h, s, d)?;
        t.push_row(vec![s.into(), (d as f64).into(), r.value.into(), r.traceless_value.into(), h.hs_norm().into()])?;
    }
    t.metadata.insert("plot_series".into(), json!(["complexity"]));
    Ok(t)
}

fn channel_table(d: &Dilation, h_s: &HermitianOperator, times: &[f64], noise: bool) -> Result<ReportTable, CliError> {
    let mut t = if noise {
        ReportTable::new("noise", &["t", "value", "ideal_system", "noise_value", "negative"])
    } else {
        ReportTable::new(
            "channel",
            &["t", "d_S", "d_E", "total_term", "surrogate_term", "value", "ideal_system", "ideal_embedded", "negative"],
        )
    };
    for &s in times {
        let r = channel_complexity(d, h_s, s)?;
        let row = if noise {
            vec![s.into(), r.value.into(), opt_num(r.ideal_system), opt_num(r.noise_value), text(r.negative)]
        } else {
            vec![
                s.into(),
                (r.d_s as f64).into(),
                (r.d_e as f64).into(),
                r.total_term.into(),
                r.surrogate_term.into(),
                r.value.into(),
                opt_num(r.ideal_system),
                r.ideal_embedded.into(),
                text(r.negative),
            ]
        };
        t.push_row(row)?;
    }
    let series = if noise { json!(["value", "noise_value"]) } else { json!(["value", "ideal_embedded"]) };
    t.metadata.insert("plot_series".into(), series);
    Ok(t)
}

const INTRINSIC_COLUMNS: [&str; 11] = [
    "t_eval",
    "best_value",
    "complexity_value",
    "channel_residual",
    "op_norm",
    "d_E",
    "start_index",
    "stage",
    "starts_used",
    "ideal",
    "simplified_noise",
];

fn intrinsic_row(t_eval: f64, r: &OptimizationResult, ideal: Option<f64>, simplified: Option<f64>) -> Vec<Cell> {
    vec![
        t_eval.into(),
        r.best_value.into(),
        r.complexity_value.into(),
        r.channel_residual.into(),
        r.op_norm.into(),
        (r.d_e as f64).into(),
        (r.start_index as f64).into(),
        r.stage.into(),
        (r.starts_used as f64).into(),
        opt_num(ideal),
        opt_num(simplified),
    ]
}

fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var("GQC_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Validation(format!("GQC_THREADS: expected a positive integer, got '{v}'"))),
        },
        Err(_) => Ok(None),
    }
}

fn require_spec(common: &CommonArgs, kind: ProblemKind) -> Result<&Path, CliError> {
    common
        .spec
        .as_deref()
        .ok_or_else(|| CliError::Validation(format!("{}: --spec <file> is required", kind.name())))
}

fn load(common: &CommonArgs, kind: ProblemKind, overrides: &[(String, f64)]) -> Result<Option<ProblemSpec>, CliError> {
    let Some(path) = &common.spec else { return Ok(None) };
    let spec = load_problem_with(path, overrides)?;
    if spec.kind != kind {
        return Err(CliError::Validation(format!(
            "kind: problem file is '{}' but the subcommand is '{}'",
            spec.kind.name(),
            kind.name()
        )));
    }
    Ok(Some(spec))
}

/// Result of a successful subcommand.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub lines: Vec<String>,
    /// Set by `verify` when a property check fails.
    pub failure: Option<String>,
}

fn dispatch(command: Command) -> Result<Outcome, CliError> {
    let (kind, common, h_file, suite_flag) = match command {
        Command::Unitary { common, h } => (ProblemKind::Unitary, common, h, None),
        Command::Channel(c) => (ProblemKind::Channel, c, None, None),
        Command::Noise(c) => (ProblemKind::Noise, c, None, None),
        Command::Intrinsic(c) => (ProblemKind::Intrinsic, c, None, None),
        Command::GkslBound(c) => (ProblemKind::GkslBound, c, None, None),
        Command::Bench(c) => (ProblemKind::Benchmark, c, None, None),
        Command::Verify { common, suite } => (ProblemKind::Verify, common, None, suite),
    };
    let overrides = parse_tol_flags(&common.tol)?;
    let formats = parse_formats(&common.format)?;
    let times_flag = flag_times(&common)?;
    if kind == ProblemKind::Unitary && h_file.is_some() && common.spec.is_some() {
        return Err(CliError::Validation("unitary: give either --h or --spec".into()));
    }
    let spec = load(&common, kind, &overrides)?;
    let mut tolerances = spec.as_ref().map(|s| s.tolerances).unwrap_or_default();
    for (name, v) in &overrides {
        tolerances.set(name, *v).map_err(|e| CliError::Validation(format!("--tol: {e}")))?;
    }
    let ctx = RunContext {
        kind,
        out: common.out.clone(),
        formats,
        seed: common.seed.or(spec.as_ref().map(|s| s.seed)).unwrap_or(0),
        tolerances,
        flag_times: times_flag,
    };
    let mut outcome = Outcome::default();

    match (kind, spec.map(|s| s.payload)) {
        (ProblemKind::Unitary, payload) => {
            let (h, times) = match (payload, &h_file) {
                (Some(Payload::Unitary(u)), _) => (u.h, u.times),
                (_, Some(path)) => {
                    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                    let doc: HermitianDoc = serde_json::from_str(&text)
                        .map_err(|e| CliError::Validation(format!("{}: parse error: {e}", path.display())))?;
                    let h = doc.decode("h", &ctx.tolerances).map_err(|e| CliError::Validation(e.to_string()))?;
                    (h, Times::Unset)
                }
                _ => return Err(CliError::Validation("unitary: --h <file> or --spec <file> is required".into())),
            };
            let times = ctx.times(&times);
            let table = unitary_table(&h, &times)?;
            for row in &table.rows {
                outcome.lines.push(format!(
                    "G_hs(t={}) = {}",
                    emit::format_sig(row[0].as_f64().unwrap_or(f64::NAN)),
                    emit::format_sig(row[2].as_f64().unwrap_or(f64::NAN))
                ));
            }
            outcome.files = ctx.finish(&table, &ctx.stem())?;
        }
        (ProblemKind::Channel | ProblemKind::Noise, Some(Payload::Channel(p) | Payload::Noise(p))) => {
            let table = channel_table(&p.dilation, &p.h_s, &ctx.times(&p.times), kind == ProblemKind::Noise)?;
            outcome.lines.push(format!("{} rows", table.rows.len()));
            outcome.files = ctx.finish(&table, &ctx.stem())?;
        }
        (ProblemKind::Intrinsic, Some(Payload::Intrinsic(p))) => {
            let mut opts = p.options.clone();
            opts.seed = ctx.seed;
            if let Some(n) = threads_from_env()? {
                opts.threads = Some(n);
            }
            let mut table = ReportTable::new("intrinsic", &INTRINSIC_COLUMNS);
            let result = match p.objective {
                Objective::Complexity => {
                    let r = intrinsic_complexity(&p.target, &p.h_s, &p.constraints, p.t_eval, &opts, &p.seeds)?;
                    table.push_row(intrinsic_row(p.t_eval, &r, None, None))?;
                    r
                }
                Objective::Noise => {
                    let r = intrinsic_noise(&p.target, &p.constraints, &p.h_s, p.t_eval, &opts, &p.seeds)?;
                    table.push_row(intrinsic_row(p.t_eval, &r.result, Some(r.ideal), Some(r.simplified)))?;
                    r.result
                }
            };
            outcome.lines.push(format!(
                "best_value = {} (d_E = {}, start {}, {}, residual {:.3e})",
                emit::format_sig(result.best_value),
                result.d_e,
                result.start_index,
                result.stage,
                result.channel_residual
            ));
            let stem = ctx.stem();
            let mut files = ctx.finish(&table, &stem)?;
            let doc = serde_json::to_string_pretty(&result.best_dilation.to_doc()).map_err(|e| CliError::Io(e.to_string()))?;
            let path = ctx.out.join(format!("{stem}.dilation.json"));
            std::fs::write(&path, doc).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            files.push(path);
            outcome.files = files;
        }
        (ProblemKind::GkslBound, Some(Payload::GkslBound(p))) => {
            let env = p.bath.spec_for(p.generator.lindblad_ops().len())?;
            let d = standard_dilation(&p.generator, &env)?;
            let mut table = ReportTable::new(
                "gksl_bound",
                &["t", "complexity_value", "bound_reduced", "bound_full", "bound_coarse", "gamma", "lindblad_hs_sum", "certified", "negative"],
            );
            for t in ctx.times(&p.times) {
                let r = channel_complexity(&d, p.generator.h_s(), t)?;
                let b = growth_bound(&p.generator, &env, t)?;
                table.push_row(vec![
                    t.into(),
                    r.value.into(),
                    b.bound_reduced.into(),
                    b.bound_full.into(),
                    coarse_bound_value(&p.generator, &env, t)?.into(),
                    dissipator_scale(&p.generator).into(),
                    b.lindblad_hs_sum.into(),
                    text(b.certified),
                    text(r.negative),
                ])?;
            }
            table
                .metadata
                .insert("plot_series".into(), json!(["complexity_value", "bound_reduced", "bound_full", "bound_coarse"]));
            outcome.lines.push(format!("{} rows", table.rows.len()));
            outcome.files = ctx.finish(&table, &ctx.stem())?;
        }
        (ProblemKind::Benchmark, payload) => {
            let (specs, bath, times) = match payload {
                Some(Payload::Benchmark(b)) => (b.specs, b.bath, b.times),
                _ => (verify::shipped_benchmarks(), BathModel::default(), Times::Unset),
            };
            let times = ctx.times(&times);
            let mut bench = benchmark_bounds_table(&specs, &bath, &times)?;
            bench.table.metadata.insert("plot_group".into(), json!(["kind", "rates"]));
            bench.table.metadata.insert("plot_series".into(), json!(["complexity_value", "bound_reduced"]));
            let stem = ctx.stem();
            let csv_only: Vec<Format> = ctx.formats.iter().copied().filter(|f| *f == Format::Csv).collect();
            for kind in bench.table.distinct_text("kind") {
                let part = bench.table.filter_text("kind", &kind).expect("kind column");
                outcome.files.extend(emit_report(&part, &ctx.out, &format!("{stem}_{kind}"), &csv_only)?);
            }
            if ctx.formats.contains(&Format::Svg) {
                outcome.files.extend(emit_report(&bench.table, &ctx.out, &stem, &[Format::Svg])?);
            }
            let mut trends = ReportTable::new("trends", &["kind", "t", "points", "nondecreasing", "nonincreasing"]);
            for tr in &bench.trends {
                trends.push_row(vec![
                    tr.kind.name().into(),
                    tr.t.into(),
                    (tr.points.len() as f64).into(),
                    text(tr.nondecreasing),
                    text(tr.nonincreasing),
                ])?;
            }
            outcome.files.extend(emit_report(&trends, &ctx.out, &format!("{stem}_trends"), &csv_only)?);
            let meta = ctx.meta(&bench.table, &outcome.files);
            outcome.files.push(write_meta(&ctx.out, &stem, &meta)?);
            outcome.lines.push(format!("{} rows over {} specs", bench.table.rows.len(), specs.len()));
        }
        (ProblemKind::Verify, payload) => {
            let suite = suite_flag
                .or(match payload {
                    Some(Payload::Verify(v)) => Some(v.suite),
                    _ => None,
                })
                .unwrap_or_else(|| "all".into());
            let results = verify::run_suite(&suite, ctx.seed).ok_or_else(|| {
                CliError::Validation(format!("--suite: unknown suite '{suite}' (expected all or one of {})", verify::SUITES.join(", ")))
            })?;
            let table = verify::results_table(&results);
            for r in &results {
                outcome.lines.push(format!(
                    "{} {}/{}: {}",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.suite,
                    r.name,
                    r.detail
                ));
            }
            outcome.files = ctx.finish(&table, &ctx.stem())?;
            let failed = results.iter().filter(|r| !r.passed).count();
            if failed > 0 {
                outcome.failure = Some(format!("{failed} of {} checks failed", results.len()));
            }
        }
        (k, _) => {
            let _ = require_spec(&common, k)?;
            return Err(CliError::Validation(format!("{}: problem payload missing", k.name())));
        }
    }
    Ok(outcome)
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(out) => {
            for line in &out.lines {
                println!("{line}");
            }
            for f in &out.files {
                println!("wrote {}", f.display());
            }
            match out.failure {
                Some(msg) => {
                    let e = CliError::PropertyFailure(msg);
                    eprintln!("gqc: {e}");
                    e.exit_code()
                }
                None => EXIT_OK,
            }
        }
        Err(e) => {
            eprintln!("gqc: {e}");
            e.exit_code()
        }
    }
}
