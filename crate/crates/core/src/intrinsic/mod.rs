//! Intrinsic channel complexity: the infimum of the implementation-dependent
//! value over dilations that reproduce a target channel family under
//! resource caps, approximated by penalized multi-start BFGS.
//!
//! The identity component of `H_tot` is a global phase. It does not change
//! the channel but does change the value, so each start keeps it fixed:
//! generated starts use `Tr H_tot = d_E·Tr h_S`, seeds keep their own.

mod bfgs;
mod constraints;
mod params;

use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

pub use bfgs::{minimize, BfgsOptions, BfgsOutcome};
pub use constraints::{
    admissible_check, hermitian_op_norm, AdmissibilityReport, AdmissibleConstraints, ConstraintsDoc,
    DEFAULT_CHANNEL_TOL, NORM_SLACK,
};
pub use params::DilationParameterization;

use crate::complexity::channel_complexity;
use crate::dilation::{choi_family, ChoiMatrix, Dilation, DilationDoc};
use crate::error::{dim_err, GqcError, Result};
use crate::geometry::hs_complexity_static;
use crate::operator::{hs_inner, hs_norm, ComplexMatrix, HermitianOperator};
use crate::random::{gaussian, GqcRng};
use crate::spectral::eig_hermitian;
use crate::tolerance::ToleranceConfig;

/// Channel family to be reproduced on the constraint grid.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelTarget {
    /// Generated by a known dilation, which also becomes a start.
    Dilation(Dilation),
    /// One Choi matrix per grid time.
    Choi(Vec<ChoiMatrix>),
}

impl ChannelTarget {
    /// The unitary family `ρ ↦ e^{−ith_S} ρ e^{ith_S}`.
    pub fn unitary(h_s: &HermitianOperator) -> Self {
        ChannelTarget::Dilation(Dilation::trivial(h_s))
    }

    pub fn d_s(&self) -> Option<usize> {
        match self {
            ChannelTarget::Dilation(d) => Some(d.d_s()),
            ChannelTarget::Choi(c) => c.first().map(|c| c.d_s()),
        }
    }

    pub fn choi_family(&self, t_grid: &[f64]) -> Result<Vec<ChoiMatrix>> {
        match self {
            ChannelTarget::Dilation(d) => choi_family(d, t_grid),
            ChannelTarget::Choi(c) => {
                if c.len() != t_grid.len() {
                    return Err(GqcError::InvalidArgument(format!(
                        "{} target Choi matrices for {} grid times",
                        c.len(),
                        t_grid.len()
                    )));
                }
                let tol = ToleranceConfig::default();
                for m in c {
                    m.validate(&tol)?;
                }
                Ok(c.clone())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerOptions {
    /// Starts per environment dimension.
    pub starts: usize,
    pub seed: u64,
    pub max_iters: usize,
    pub fd_step: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub polish_tol: f64,
    /// Worker threads for independent starts; `None` uses the global pool.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            starts: 8,
            seed: 0,
            max_iters: 200,
            fd_step: 1e-6,
            mu1: 1e6,
            mu2: 1e4,
            polish_tol: 1e-9,
            threads: None,
        }
    }
}

impl OptimizerOptions {
    pub fn validate(&self) -> Result<()> {
        let pos = |x: f64| x > 0.0 && x.is_finite();
        if self.starts == 0 {
            return Err(GqcError::InvalidArgument("starts must be at least 1".into()));
        }
        if !(pos(self.fd_step) && pos(self.mu1) && pos(self.mu2) && pos(self.polish_tol)) {
            return Err(GqcError::InvalidArgument(
                "fd_step, mu1, mu2 and polish_tol must be positive".into(),
            ));
        }
        if self.threads == Some(0) {
            return Err(GqcError::InvalidArgument("threads must be at least 1".into()));
        }
        Ok(())
    }
}

fn serialize_dilation<S: Serializer>(d: &Dilation, s: S) -> std::result::Result<S::Ok, S::Error> {
    d.to_doc().serialize(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationResult {
    /// Minimized objective: the complexity, or the noise gap for
    /// [`intrinsic_noise`].
    pub best_value: f64,
    /// Channel complexity of the winning dilation at `t_eval`.
    pub complexity_value: f64,
    #[serde(serialize_with = "serialize_dilation")]
    pub best_dilation: Dilation,
    pub channel_residual: f64,
    pub op_norm: f64,
    pub feasible: bool,
    pub starts_used: usize,
    pub seed: u64,
    pub d_e: usize,
    pub start_index: usize,
    /// `seed`, `polished` or `repolished`.
    pub stage: &'static str,
}

impl OptimizationResult {
    pub fn dilation_doc(&self) -> DilationDoc {
        self.best_dilation.to_doc()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Mode {
    Value,
    Noise { ideal: f64 },
}

struct Problem<'a> {
    h_s: &'a HermitianOperator,
    c: &'a AdmissibleConstraints,
    t_eval: f64,
    targets: Vec<ComplexMatrix>,
    mode: Mode,
}

#[derive(Debug, Clone, Copy)]
struct Eval {
    objective: f64,
    dist_sq_sum: f64,
    norm_excess: f64,
    energy_excess: f64,
    max_residual: f64,
}

impl Problem<'_> {
    fn evaluate(&self, p: &DilationParameterization, theta: &[f64]) -> Result<Eval> {
        let h = p.hamiltonian(theta);
        let spec = eig_hermitian(&h)?;
        let op = spec.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
        let g = p.state_factor(theta);
        let mut dist_sq_sum = 0.0;
        let mut max_residual = 0.0f64;
        for (&t, target) in self.c.t_grid.iter().zip(&self.targets) {
            let u = spec.rebuild(|l| num_complex::Complex64::from_polar(1.0, -t * l));
            let dist = hs_norm(&(params::fast_choi(&u, &g, p.d_s(), p.d_e()) - target));
            dist_sq_sum += dist * dist;
            max_residual = max_residual.max(dist);
        }
        let d = Dilation::new(p.d_s(), p.d_e(), p.state(theta), h)?;
        let value = channel_complexity(&d, self.h_s, self.t_eval)?.value;
        let objective = match self.mode {
            Mode::Value => value,
            Mode::Noise { ideal } => (value - ideal).abs(),
        };
        let energy_excess = match (&self.c.h_e, self.c.e_max) {
            (Some(h_e), Some(e_max)) if h_e.dim() == p.d_e() => {
                (hs_inner(d.rho_e().matrix(), h_e.matrix())?.re - e_max).max(0.0)
            }
            _ => 0.0,
        };
        Ok(Eval {
            objective,
            dist_sq_sum,
            norm_excess: (op - self.c.j_max).max(0.0),
            energy_excess,
            max_residual,
        })
    }

    fn penalized(&self, e: &Eval, mu1: f64, mu2: f64) -> f64 {
        e.objective + mu1 * e.dist_sq_sum + mu2 * (e.norm_excess.powi(2) + e.energy_excess.powi(2))
    }

    fn needs_repolish(&self, e: &Eval) -> bool {
        e.max_residual > self.c.channel_tol
            || e.norm_excess > self.c.j_max * NORM_SLACK
            || e.energy_excess > 0.0
    }
}

struct Job {
    d_e: usize,
    theta: Vec<f64>,
}

struct Candidate {
    objective: f64,
    start_index: usize,
    stage: u8,
    d_e: usize,
    theta: Vec<f64>,
}

const STAGES: [&str; 3] = ["seed", "polished", "repolished"];

fn trivial_theta(p: &DilationParameterization, h_s: &HermitianOperator) -> Result<Vec<f64>> {
    let d_e = p.d_e();
    let rho = crate::operator::DensityOperator::basis_state(d_e, 0)?;
    let d = Dilation::new(h_s.dim(), d_e, rho, h_s.embed_system(d_e))?;
    p.encode(&d)
}

fn build_jobs(
    problem: &Problem<'_>,
    target: &ChannelTarget,
    seeds: &[Dilation],
    opts: &OptimizerOptions,
) -> Result<Vec<Job>> {
    let d_s = problem.h_s.dim();
    let mut jobs = Vec::new();
    for d_e in problem.c.env_dims() {
        let p = DilationParameterization::new(d_s, d_e);
        let base = trivial_theta(&p, problem.h_s)?;
        let mut thetas = vec![base.clone()];
        if let ChannelTarget::Dilation(d) = target {
            if d.d_e() == d_e {
                thetas.push(p.encode(d)?);
            }
        }
        for s in seeds.iter().filter(|s| s.d_e() == d_e) {
            thetas.push(p.encode(s)?);
        }
        let mut rng = GqcRng::seed_from_u64(opts.seed ^ (d_e as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let n_h = p.n_hamiltonian();
        let sigma = 0.5 * problem.c.j_max / n_h as f64;
        while thetas.len() < opts.starts {
            let mut theta = base.clone();
            for (i, v) in theta.iter_mut().enumerate() {
                if i == 0 {
                    continue;
                }
                *v = if i < n_h { *v + sigma * gaussian(&mut rng) } else { gaussian(&mut rng) };
            }
            thetas.push(theta);
        }
        jobs.extend(thetas.into_iter().map(|theta| Job { d_e, theta }));
    }
    Ok(jobs)
}

fn run_job(problem: &Problem<'_>, job: &Job, index: usize, opts: &OptimizerOptions) -> Result<Vec<Candidate>> {
    let p = DilationParameterization::new(problem.h_s.dim(), job.d_e);
    let mut out = Vec::with_capacity(3);
    let e0 = problem.evaluate(&p, &job.theta)?;
    out.push(Candidate {
        objective: e0.objective,
        start_index: index,
        stage: 0,
        d_e: job.d_e,
        theta: job.theta.clone(),
    });

    let frozen = job.theta[0];
    let full = |free: &[f64]| -> Vec<f64> {
        let mut t = Vec::with_capacity(free.len() + 1);
        t.push(frozen);
        t.extend_from_slice(free);
        t
    };
    let polish = |start: &[f64], mu1: f64, mu2: f64| -> Vec<f64> {
        let f = |free: &[f64]| {
            problem
                .evaluate(&p, &full(free))
                .map(|e| problem.penalized(&e, mu1, mu2))
                .unwrap_or(f64::INFINITY)
        };
        let res = minimize(
            f,
            start[1..].to_vec(),
            BfgsOptions {
                max_iters: opts.max_iters,
                fd_step: opts.fd_step,
                grad_tol: opts.polish_tol,
            },
        );
        full(&res.x)
    };

    let theta1 = polish(&job.theta, opts.mu1, opts.mu2);
    let e1 = problem.evaluate(&p, &theta1)?;
    let repolish = problem.needs_repolish(&e1);
    out.push(Candidate {
        objective: e1.objective,
        start_index: index,
        stage: 1,
        d_e: job.d_e,
        theta: theta1.clone(),
    });
    if repolish {
        let theta2 = polish(&theta1, 2.0 * opts.mu1, 2.0 * opts.mu2);
        let e2 = problem.evaluate(&p, &theta2)?;
        out.push(Candidate {
            objective: e2.objective,
            start_index: index,
            stage: 2,
            d_e: job.d_e,
            theta: theta2,
        });
    }
    Ok(out)
}

fn optimize(
    target: &ChannelTarget,
    h_s: &HermitianOperator,
    c: &AdmissibleConstraints,
    t_eval: f64,
    opts: &OptimizerOptions,
    seeds: &[Dilation],
    mode_of: impl Fn(f64) -> Mode,
) -> Result<OptimizationResult> {
    c.validate()?;
    opts.validate()?;
    if !(t_eval >= 0.0 && t_eval <= c.t_final()) {
        return Err(GqcError::InvalidArgument(format!(
            "t_eval = {t_eval} outside [0, {}]",
            c.t_final()
        )));
    }
    let d_s = h_s.dim();
    if d_s < 2 {
        return Err(GqcError::InvalidArgument("system dimension must be at least 2".into()));
    }
    if target.d_s().is_some_and(|d| d != d_s) {
        return Err(dim_err("target and h_S act on different systems"));
    }
    if let Some(s) = seeds.iter().find(|s| s.d_s() != d_s) {
        return Err(dim_err(format!("seed dilation has d_S = {}", s.d_s())));
    }
    let target_choi = target.choi_family(&c.t_grid)?;
    let problem = Problem {
        h_s,
        c,
        t_eval,
        targets: target_choi.iter().map(|m| m.matrix().clone()).collect(),
        mode: mode_of(hs_complexity_static(h_s, t_eval, d_s)?),
    };
    let jobs = build_jobs(&problem, target, seeds, opts)?;

    let run_all = || -> Result<Vec<Vec<Candidate>>> {
        jobs.par_iter()
            .enumerate()
            .map(|(i, job)| run_job(&problem, job, i, opts))
            .collect()
    };
    let per_job = match opts.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| GqcError::InvalidArgument(format!("thread pool: {e}")))?
            .install(run_all)?,
        None => run_all()?,
    };

    let mut candidates: Vec<Candidate> = per_job.into_iter().flatten().filter(|c| c.objective.is_finite()).collect();
    candidates.sort_by(|a, b| {
        a.objective
            .total_cmp(&b.objective)
            .then(a.start_index.cmp(&b.start_index))
            .then(a.stage.cmp(&b.stage))
    });
    for cand in candidates {
        let p = DilationParameterization::new(d_s, cand.d_e);
        let d = p.decode(&cand.theta)?;
        let report = admissible_check(&d, c, &target_choi)?;
        if report.admissible {
            let complexity_value = channel_complexity(&d, h_s, t_eval)?.value;
            return Ok(OptimizationResult {
                best_value: cand.objective,
                complexity_value,
                best_dilation: d,
                channel_residual: report.channel_residual,
                op_norm: report.op_norm,
                feasible: true,
                starts_used: jobs.len(),
                seed: opts.seed,
                d_e: cand.d_e,
                start_index: cand.start_index,
                stage: STAGES[cand.stage as usize],
            });
        }
    }
    Err(GqcError::Infeasible(format!(
        "none of {} starts met channel_tol = {:e}, J_max = {} and d_E ≤ {}",
        jobs.len(),
        c.channel_tol,
        c.j_max,
        c.d_e_max
    )))
}

/// Minimizes the channel complexity at `t_eval` over admissible dilations.
/// `seeds` are extra starts; each feasible seed bounds the result from above.
pub fn intrinsic_complexity(
    target: &ChannelTarget,
    h_s: &HermitianOperator,
    c: &AdmissibleConstraints,
    t_eval: f64,
    opts: &OptimizerOptions,
    seeds: &[Dilation],
) -> Result<OptimizationResult> {
    optimize(target, h_s, c, t_eval, opts, seeds, |_| Mode::Value)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntrinsicNoiseResult {
    /// Direct minimization of `|𝒢(Λ;𝔇) − 𝒢(U_S)|`.
    pub result: OptimizationResult,
    /// `|𝒢_intr − 𝒢(U_S)|`, valid when both infima share a minimizer.
    pub simplified: f64,
    pub intrinsic_complexity: f64,
    pub ideal: f64,
}

pub fn intrinsic_noise(
    target: &ChannelTarget,
    c: &AdmissibleConstraints,
    h_s: &HermitianOperator,
    t_eval: f64,
    opts: &OptimizerOptions,
    seeds: &[Dilation],
) -> Result<IntrinsicNoiseResult> {
    let result = optimize(target, h_s, c, t_eval, opts, seeds, |ideal| Mode::Noise { ideal })?;
    let ideal = hs_complexity_static(h_s, t_eval, h_s.dim())?;
    let intr = intrinsic_complexity(target, h_s, c, t_eval, opts, seeds)?;
    Ok(IntrinsicNoiseResult {
        simplified: (intr.best_value - ideal).abs(),
        intrinsic_complexity: intr.best_value,
        ideal,
        result,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{c64, tensor, DensityOperator};
    use crate::pauli::{sigma_x, sigma_z};

    fn h_s() -> HermitianOperator {
        HermitianOperator::new(sigma_z() * c64(0.5, 0.0)).unwrap()
    }

    fn quick() -> OptimizerOptions {
        OptimizerOptions { starts: 3, max_iters: 40, seed: 5, ..Default::default() }
    }

    #[test]
    fn unitary_target_with_trivial_environment() {
        let c = AdmissibleConstraints::new(1, 2.0, vec![0.0, 0.5, 1.0]).unwrap();
        let r = intrinsic_complexity(&ChannelTarget::unitary(&h_s()), &h_s(), &c, 1.0, &quick(), &[]).unwrap();
        assert!((r.best_value - 0.408248290463863).abs() < 1e-6, "{r:?}");
        assert!(r.feasible && r.d_e == 1);
    }

    #[test]
    fn seed_bounds_result_and_admissibility() {
        let g = 0.4;
        let h_tot = HermitianOperator::new(
            tensor(&sigma_z(), &sigma_x()) * c64(g, 0.0) + h_s().embed_system(2).into_matrix(),
        )
        .unwrap();
        let seed = Dilation::new(2, 2, DensityOperator::basis_state(2, 0).unwrap(), h_tot).unwrap();
        let c = AdmissibleConstraints::new(2, 2.0, vec![0.0, 0.5, 1.0]).unwrap();
        let target = ChannelTarget::Dilation(seed.clone());
        let r = intrinsic_complexity(&target, &h_s(), &c, 1.0, &quick(), &[]).unwrap();
        let seed_value = channel_complexity(&seed, &h_s(), 1.0).unwrap().value;
        assert!(r.best_value <= seed_value + 1e-9);
        let check = admissible_check(&r.best_dilation, &c, &target.choi_family(&c.t_grid).unwrap()).unwrap();
        assert!(check.admissible);
    }

    #[test]
    fn empty_admissible_set_is_reported() {
        let c = AdmissibleConstraints::new(1, 1e-3, vec![0.0, 1.0]).unwrap();
        let err = intrinsic_complexity(&ChannelTarget::unitary(&h_s()), &h_s(), &c, 1.0, &quick(), &[]).unwrap_err();
        assert!(matches!(err, GqcError::Infeasible(_)));
        assert!(AdmissibleConstraints::new(0, 1.0, vec![0.0, 1.0]).is_err());
        assert!(AdmissibleConstraints::new(1, 1.0, vec![0.0]).is_err());
    }

    #[test]
    fn unitary_noise_is_zero() {
        let c = AdmissibleConstraints::new(1, 2.0, vec![0.0, 1.0]).unwrap();
        let r = intrinsic_noise(&ChannelTarget::unitary(&h_s()), &c, &h_s(), 1.0, &quick(), &[]).unwrap();
        assert!(r.result.best_value < 1e-6, "{r:?}");
    }

    #[test]
    fn admissible_check_examples() {
        let c = AdmissibleConstraints::new(1, 2.0, vec![0.0, 1.0]).unwrap();
        let d = Dilation::trivial(&h_s());
        let target = ChannelTarget::unitary(&h_s()).choi_family(&c.t_grid).unwrap();
        let ok = admissible_check(&d, &c, &target).unwrap();
        assert!(ok.admissible && ok.channel_residual == 0.0);
        let tight = AdmissibleConstraints::new(1, 0.1, vec![0.0, 1.0]).unwrap();
        let bad = admissible_check(&d, &tight, &target).unwrap();
        assert!(!bad.admissible && (bad.norm_excess - 0.4).abs() < 1e-12);
        assert!(admissible_check(&d, &c, &target[..1]).is_err());
    }
}
