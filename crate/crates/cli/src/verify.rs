//! Seeded property suites behind `gqc verify`: one named check per module
//! invariant.

use gqc_core::coherence::{
    coherence, coherence_growth_check, dephase, dephase_matrix, lower_bound_appendix, verify_main_bound,
};
use gqc_core::complexity::{
    channel_complexity, env_surrogate, postulate_check, sqrt_trace_identity, P4_TOL,
};
use gqc_core::dilation::{
    channel_apply, channel_apply_matrix, channel_distance, choi_matrix, gauge_transform, kraus_from_dilation, Dilation,
};
use gqc_core::geometry::{
    euler_arnold_geodesic, hs_complexity_static, path_length, uniform_grid, HamiltonianPath, PenaltyMetric,
};
use gqc_core::gksl::{
    benchmark_channel, dissipator_scale, growth_bound, semigroup_evolve, standard_dilation,
    BathModel, BenchmarkKind, BenchmarkSpec, GkslGenerator,
};
use gqc_core::intrinsic::{
    admissible_check, intrinsic_complexity, AdmissibleConstraints, ChannelTarget, OptimizerOptions,
};
use gqc_core::operator::{
    c64, commutator, hs_inner, hs_norm, identity, partial_trace_env, tensor, zeros, ComplexMatrix,
};
use gqc_core::pauli::{sigma_x, sigma_y, sigma_z};
use gqc_core::random::{
    random_density, random_hermitian, random_matrix, random_psd, random_traceless_hermitian, random_unitary, seeded,
    GqcRng,
};
use gqc_core::report::ReportTable;
use gqc_core::spectral::{eig_hermitian, matrix_fn, unitary_evolve, SpectralFn};
use gqc_core::{DensityOperator, GqcError, HermitianOperator, UnitaryOperator};

pub const SUITES: [&str; 7] = ["operator", "geometry", "dilation", "complexity", "intrinsic", "gksl", "coherence"];

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed residual or count, for the report.
    pub detail: String,
}

type Outcome = Result<(bool, String), GqcError>;

fn run(suite: &'static str, name: &'static str, f: impl FnOnce() -> Outcome) -> CheckResult {
    let (passed, detail) = match f() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    CheckResult { suite, name, passed, detail }
}

fn within(worst: f64, tol: f64) -> Outcome {
    Ok((worst <= tol, format!("max residual {worst:.3e} (tol {tol:.0e})")))
}

fn random_dilation(rng: &mut GqcRng, d_s: usize, d_e: usize) -> (Dilation, HermitianOperator) {
    let h_s = random_hermitian(rng, d_s, 1.0);
    let d = Dilation::new(d_s, d_e, random_density(rng, d_e), random_hermitian(rng, d_s * d_e, 1.0))
        .expect("dimensions agree");
    (d, h_s)
}

fn half_sigma_z() -> HermitianOperator {
    HermitianOperator::new(sigma_z() * c64(0.5, 0.0)).expect("hermitian")
}

/// Shipped benchmark specifications used by several checks.
pub fn shipped_benchmarks() -> Vec<BenchmarkSpec> {
    let mk = |k, r: Vec<f64>| BenchmarkSpec::new(k, 1.0, r).expect("valid benchmark");
    vec![
        mk(BenchmarkKind::Dephasing, vec![0.2]),
        mk(BenchmarkKind::Dephasing, vec![1.0]),
        mk(BenchmarkKind::AmplitudeDamping, vec![0.3]),
        mk(BenchmarkKind::AmplitudeDamping, vec![1.0]),
        mk(BenchmarkKind::Depolarizing, vec![0.1]),
        mk(BenchmarkKind::Depolarizing, vec![0.5]),
        mk(BenchmarkKind::Pauli, vec![0.1, 0.3, 0.6]),
    ]
}

fn operator_suite(seed: u64) -> Vec<CheckResult> {
    let s = "operator";
    vec![
        run(s, "hs_inner_symmetric_positive", || {
            let mut rng = seeded(seed);
            let mut worst = 0.0f64;
            let mut positive = true;
            for d in 1..=4 {
                for _ in 0..10 {
                    let a = random_matrix(&mut rng, d, d);
                    let b = random_matrix(&mut rng, d, d);
                    worst = worst.max((hs_inner(&a, &b)? - hs_inner(&b, &a)?.conj()).norm());
                    positive &= hs_inner(&a, &a)?.re > 0.0;
                }
            }
            Ok((positive && worst <= 1e-12, format!("symmetry defect {worst:.3e}")))
        }),
        run(s, "sqrt_squares_back", || {
            let mut rng = seeded(seed ^ 1);
            let mut worst = 0.0f64;
            for d in 1..=5 {
                for _ in 0..8 {
                    let p = random_psd(&mut rng, d);
                    let r = matrix_fn(&p, SpectralFn::Sqrt)?;
                    worst = worst.max(hs_norm(&(r.matrix() * r.matrix() - p.matrix())));
                }
            }
            within(worst, 1e-9)
        }),
        run(s, "partial_trace_inverts_tensor", || {
            let mut rng = seeded(seed ^ 2);
            let mut worst = 0.0f64;
            for (d_s, d_e) in [(1, 2), (2, 2), (2, 3), (3, 3)] {
                let x = random_matrix(&mut rng, d_s, d_s);
                let rho = random_density(&mut rng, d_e);
                worst = worst.max(hs_norm(&(partial_trace_env(&tensor(&x, rho.matrix()), d_s, d_e)? - &x)));
            }
            within(worst, 1e-12)
        }),
        run(s, "unitary_invariance_of_hs_norm", || {
            let mut rng = seeded(seed ^ 3);
            let mut worst = 0.0f64;
            for d in 2..=5 {
                let u = unitary_evolve(&random_hermitian(&mut rng, d, 1.0), 1.3)?;
                let h = random_hermitian(&mut rng, d, 1.0);
                worst = worst.max((h.conjugate(&u)?.hs_norm() - h.hs_norm()).abs());
            }
            within(worst, 1e-10)
        }),
        run(s, "pauli_oracles", || {
            let z = eig_hermitian(&HermitianOperator::new(sigma_z())?)?;
            let ok = (z.eigenvalues[0] + 1.0).abs() < 1e-15 && (z.eigenvalues[1] - 1.0).abs() < 1e-15;
            let n = hs_norm(&sigma_x());
            let anti = hs_norm(&(sigma_x() * sigma_y() + sigma_y() * sigma_x()));
            Ok((ok && (n - 2f64.sqrt()).abs() < 1e-15 && anti == 0.0, format!("‖σx‖ = {n}")))
        }),
    ]
}

fn geometry_suite(seed: u64) -> Vec<CheckResult> {
    let s = "geometry";
    vec![
        run(s, "ideal_unitary_anchor", || {
            let v = hs_complexity_static(&half_sigma_z(), 1.0, 2)?;
            let exact = (0.5f64).sqrt() / 3f64.sqrt();
            within((v - exact).abs(), 1e-10)
        }),
        run(s, "static_conjugation_invariance", || {
            let mut rng = seeded(seed ^ 10);
            let mut worst = 0.0f64;
            for d in 2..=4 {
                let h = random_hermitian(&mut rng, d, 1.0);
                let w = random_unitary(&mut rng, d);
                worst = worst.max((hs_complexity_static(&h, 1.7, d)? - hs_complexity_static(&h.conjugate(&w)?, 1.7, d)?).abs());
            }
            within(worst, 1e-10)
        }),
        run(s, "path_refinement_second_order", || {
            let metric = PenaltyMetric::uniform(2)?;
            let gen = |s: f64| HermitianOperator::new(sigma_x() * c64(1.0 + s * s, 0.0) + sigma_z() * c64(0.5 * s, 0.0));
            let len = |n| path_length(&metric, &HamiltonianPath::from_fn(uniform_grid(0.0, 1.0, n)?, gen)?);
            let (a, b, c) = (len(17)?, len(33)?, len(65)?);
            let ratio = (a - b).abs() / (b - c).abs().max(1e-300);
            Ok((ratio > 3.5, format!("error ratio {ratio:.3}")))
        }),
        run(s, "euler_arnold_uniform", || {
            let metric = PenaltyMetric::uniform(2)?;
            let a0 = HermitianOperator::new(sigma_z())?;
            let g = euler_arnold_geodesic(&metric, &a0, 1.0, 128)?;
            let exact = unitary_evolve(&a0, 1.0)?;
            let err = hs_norm(&(g.endpoint().matrix() - exact.matrix()));
            let drift = g.body_velocities.iter().map(|v| (v.hs_norm() - a0.hs_norm()).abs()).fold(0.0, f64::max);
            Ok((err <= 1e-8 && drift <= 1e-10 && g.max_unitarity_defect() <= 1e-10, format!("endpoint {err:.3e}, norm drift {drift:.3e}")))
        }),
        run(s, "euler_arnold_anisotropic_speed", || {
            let metric = PenaltyMetric::with_weights(2, vec![1.0, 2.0, 4.0])?;
            let mut rng = seeded(seed ^ 11);
            let a0 = random_traceless_hermitian(&mut rng, 2, 1.0);
            let g = euler_arnold_geodesic(&metric, &a0, 1.0, 512)?;
            let s0 = metric.omega_norm(&a0)?;
            let mut worst = 0.0f64;
            for v in &g.body_velocities {
                worst = worst.max((metric.omega_norm(v)? - s0).abs());
            }
            within(worst, 1e-7)
        }),
        run(s, "right_invariance_surrogate", || {
            let mut rng = seeded(seed ^ 12);
            let mut worst = 0.0f64;
            for d in 2..=4 {
                let h = random_hermitian(&mut rng, d, 0.5);
                let t = 0.4;
                let w = random_unitary(&mut rng, d);
                let m = unitary_evolve(&h, t)?.compose(&w)?.compose(&w.adjoint())?.into_matrix();
                // recover the generator of UW·W⁻¹ from its eigenphases
                let spec = eig_hermitian(&HermitianOperator::new((&m - m.adjoint()) * c64(0.0, -0.5))?)?;
                let phases: Vec<_> = (0..d)
                    .map(|k| {
                        let col = spec.eigenvectors.column(k);
                        c64(-col.dotc(&(&m * col)).arg() / t, 0.0)
                    })
                    .collect();
                let recovered = HermitianOperator::new(spec.rebuild_diag(&phases))?;
                worst = worst.max((hs_complexity_static(&recovered, t, d)? - hs_complexity_static(&h, t, d)?).abs());
            }
            within(worst, 1e-8)
        }),
    ]
}

fn basis_defect(d: &Dilation, t: f64) -> Result<f64, GqcError> {
    let k = kraus_from_dilation(d, t)?;
    let n = d.d_s();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let mut e = zeros(n, n);
            e[(i, j)] = c64(1.0, 0.0);
            worst = worst.max(hs_norm(&(k.apply(&e)? - channel_apply_matrix(d, t, &e)?)));
        }
    }
    Ok(worst)
}

fn dilation_suite(seed: u64) -> Vec<CheckResult> {
    let s = "dilation";
    vec![
        run(s, "channel_output_valid", || {
            let mut rng = seeded(seed ^ 20);
            for (d_s, d_e) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
                let (d, _) = random_dilation(&mut rng, d_s, d_e);
                let out = channel_apply(&d, 1.1, &random_density(&mut rng, d_s))?;
                DensityOperator::new(out.into_matrix())?;
            }
            Ok((true, "4 dilations".into()))
        }),
        run(s, "kraus_direct_consistency", || {
            let mut rng = seeded(seed ^ 21);
            let mut worst = 0.0f64;
            for d_s in 1..=3 {
                for d_e in 1..=3 {
                    let (d, _) = random_dilation(&mut rng, d_s, d_e);
                    worst = worst.max(basis_defect(&d, 0.9)?);
                }
            }
            within(worst, 1e-9)
        }),
        run(s, "gauge_orbit_invariance", || {
            let mut rng = seeded(seed ^ 22);
            let mut worst = 0.0f64;
            for d_e in 1..=3 {
                let (d, h_s) = random_dilation(&mut rng, 2, d_e);
                let g = gauge_transform(&d, &random_unitary(&mut rng, d_e))?;
                worst = worst.max(channel_distance(&choi_matrix(&d, 1.0)?, &choi_matrix(&g, 1.0)?)?);
                worst = worst.max((d.h_tot().hs_norm() - g.h_tot().hs_norm()).abs());
                let a = env_surrogate(d.h_tot(), &h_s, d_e)?.hs_norm();
                let b = env_surrogate(g.h_tot(), &h_s, d_e)?.hs_norm();
                worst = worst.max((a - b).abs());
            }
            within(worst, 1e-9)
        }),
    ]
}

fn benchmark_dilations() -> Result<Vec<(Dilation, HermitianOperator)>, GqcError> {
    shipped_benchmarks()
        .iter()
        .map(|spec| {
            let g = benchmark_channel(spec)?;
            let env = BathModel::default().spec_for(g.lindblad_ops().len())?;
            Ok((standard_dilation(&g, &env)?, g.h_s().clone()))
        })
        .collect()
}

fn complexity_suite(seed: u64) -> Vec<CheckResult> {
    let s = "complexity";
    vec![
        run(s, "gauge_invariance", || {
            let mut rng = seeded(seed ^ 30);
            let mut worst = 0.0f64;
            for i in 0..10 {
                let (d, h_s) = random_dilation(&mut rng, 2, 2 + i % 2);
                let v0 = channel_complexity(&d, &h_s, 1.0)?.value;
                for _ in 0..5 {
                    let g = gauge_transform(&d, &random_unitary(&mut rng, d.d_e()))?;
                    worst = worst.max((channel_complexity(&g, &h_s, 1.0)?.value - v0).abs());
                }
            }
            within(worst, 1e-9)
        }),
        run(s, "time_homogeneity", || {
            let mut worst = 0.0f64;
            for (d, h_s) in benchmark_dilations()? {
                let v = channel_complexity(&d, &h_s, 1.0)?.value;
                for c in [0.5, 2.0, 10.0] {
                    let vc = channel_complexity(&d, &h_s, c)?.value;
                    worst = worst.max((vc - c * v).abs() / (c * v).abs().max(1e-300));
                }
            }
            within(worst, 1e-12)
        }),
        run(s, "benchmark_nonnegativity", || {
            let mut worst = f64::INFINITY;
            for (d, h_s) in benchmark_dilations()? {
                for t in [0.5, 1.0, 3.0] {
                    worst = worst.min(channel_complexity(&d, &h_s, t)?.value);
                }
            }
            Ok((worst >= -1e-10, format!("min value {worst:.3e}")))
        }),
        run(s, "surrogate_gauge_covariance", || {
            let mut rng = seeded(seed ^ 31);
            let mut worst = 0.0f64;
            for d_e in 1..=3 {
                let (d, h_s) = random_dilation(&mut rng, 2, d_e);
                let v = random_unitary(&mut rng, d_e);
                let w = UnitaryOperator::new(tensor(&identity(2), v.matrix()))?;
                let lhs = env_surrogate(&d.h_tot().conjugate(&w)?, &h_s, d_e)?;
                let rhs = env_surrogate(d.h_tot(), &h_s, d_e)?.conjugate(&w)?;
                worst = worst.max(hs_norm(&(lhs.matrix() - rhs.matrix())));
            }
            within(worst, 1e-10)
        }),
        run(s, "postulates_p1_to_p4", || {
            let mut rng = seeded(seed ^ 32);
            let grid = [0.5, 1.0, 2.0];
            let h_s = half_sigma_z();
            let trivial = postulate_check(&Dilation::trivial(&h_s), &h_s, &grid, seed)?;
            let zero = HermitianOperator::zero(2);
            let env_only = Dilation::decoupled(&zero, &random_hermitian(&mut rng, 2, 1.0), random_density(&mut rng, 2))?;
            let env = postulate_check(&env_only, &zero, &grid, seed)?;
            let (d, hs) = random_dilation(&mut rng, 2, 2);
            let generic = postulate_check(&d, &hs, &grid, seed)?;
            let p1 = trivial.get("P1").is_some_and(|o| o.applicable && o.passed);
            let p2 = env.get("P2").is_some_and(|o| o.applicable && o.passed);
            let ok = p1 && p2 && trivial.all_passed() && env.all_passed() && generic.all_passed();
            Ok((ok, format!("P1 {p1}, P2 {p2}, P3/P4 {}", generic.all_passed())))
        }),
        run(s, "sqrt_trace_identity", || {
            let mut rng = seeded(seed ^ 33);
            let mut worst = 0.0f64;
            for d in 1..=6 {
                worst = worst.max(sqrt_trace_identity(&random_psd(&mut rng, d))?.residual);
            }
            within(worst, P4_TOL)
        }),
    ]
}

fn coupled_dephasing(g: f64) -> Result<Dilation, GqcError> {
    let h = HermitianOperator::new(half_sigma_z().embed_system(2).into_matrix() + tensor(&sigma_z(), &sigma_x()) * c64(g, 0.0))?;
    Dilation::new(2, 2, DensityOperator::basis_state(2, 0)?, h)
}

fn intrinsic_suite(seed: u64) -> Vec<CheckResult> {
    let s = "intrinsic";
    let opts = OptimizerOptions { starts: 4, max_iters: 60, seed, ..Default::default() };
    let grid = vec![0.0, 0.5, 1.0];
    vec![
        run(s, "unitary_recovery", || {
            let h_s = half_sigma_z();
            let c = AdmissibleConstraints::new(1, 2.0, grid.clone())?;
            let r = intrinsic_complexity(&ChannelTarget::unitary(&h_s), &h_s, &c, 1.0, &opts, &[])?;
            within((r.best_value - hs_complexity_static(&h_s, 1.0, 2)?).abs(), 1e-6)
        }),
        run(s, "seed_upper_bound_and_soundness", || {
            let h_s = half_sigma_z();
            let seed_d = coupled_dephasing(0.3)?;
            let c = AdmissibleConstraints::new(2, 2.0, grid.clone())?;
            let target = ChannelTarget::Dilation(seed_d.clone());
            let r = intrinsic_complexity(&target, &h_s, &c, 1.0, &opts, std::slice::from_ref(&seed_d))?;
            let sv = channel_complexity(&seed_d, &h_s, 1.0)?.value;
            let check = admissible_check(&r.best_dilation, &c, &target.choi_family(&c.t_grid)?)?;
            Ok((r.best_value <= sv + 1e-9 && check.admissible, format!("best {:.6e} vs seed {sv:.6e}", r.best_value)))
        }),
        run(s, "constraint_monotonicity", || {
            let h_s = half_sigma_z();
            let target = ChannelTarget::Dilation(coupled_dephasing(0.3)?);
            let tight = AdmissibleConstraints::new(2, 1.0, grid.clone())?;
            let loose = AdmissibleConstraints::new(3, 2.0, grid.clone())?;
            let a = intrinsic_complexity(&target, &h_s, &tight, 1.0, &opts, &[])?;
            let b = intrinsic_complexity(&target, &h_s, &loose, 1.0, &OptimizerOptions { starts: 2, ..opts.clone() }, std::slice::from_ref(&a.best_dilation))?;
            Ok((b.best_value <= a.best_value + 1e-9, format!("{:.6e} ≤ {:.6e}", b.best_value, a.best_value)))
        }),
        run(s, "reproducibility", || {
            let h_s = half_sigma_z();
            let target = ChannelTarget::Dilation(coupled_dephasing(0.2)?);
            let c = AdmissibleConstraints::new(2, 2.0, grid.clone())?;
            let a = intrinsic_complexity(&target, &h_s, &c, 1.0, &opts, &[])?;
            let b = intrinsic_complexity(&target, &h_s, &c, 1.0, &OptimizerOptions { threads: Some(1), ..opts.clone() }, &[])?;
            Ok((a.best_value.to_bits() == b.best_value.to_bits(), format!("{:e}", a.best_value)))
        }),
    ]
}

fn gksl_suite(seed: u64) -> Vec<CheckResult> {
    let s = "gksl";
    vec![
        run(s, "closed_form_decay", || {
            let plus = DensityOperator::pure(&[c64(1.0 / 2f64.sqrt(), 0.0), c64(1.0 / 2f64.sqrt(), 0.0)])?;
            let excited = DensityOperator::basis_state(2, 1)?;
            let (gamma, kappa) = (0.7, 1.3);
            let deph = benchmark_channel(&BenchmarkSpec::new(BenchmarkKind::Dephasing, 0.0, vec![gamma])?)?;
            let ad = benchmark_channel(&BenchmarkSpec::new(BenchmarkKind::AmplitudeDamping, 0.0, vec![kappa])?)?;
            let mut worst = 0.0f64;
            for i in 0..=30 {
                let t = 3.0 / gamma * i as f64 / 30.0;
                let r = semigroup_evolve(&deph, &plus, t)?;
                worst = worst.max((r.matrix()[(0, 1)].re - 0.5 * (-gamma * t).exp()).abs());
                let t = 3.0 / kappa * i as f64 / 30.0;
                let r = semigroup_evolve(&ad, &excited, t)?;
                worst = worst.max((r.matrix()[(1, 1)].re - (-kappa * t).exp()).abs());
            }
            within(worst, 1e-9)
        }),
        run(s, "semigroup_cptp_composition", || {
            let mut rng = seeded(seed ^ 40);
            let ops = vec![random_matrix(&mut rng, 3, 3) * c64(0.4, 0.0), random_matrix(&mut rng, 3, 3) * c64(0.4, 0.0)];
            let g = GkslGenerator::new(random_hermitian(&mut rng, 3, 1.0), ops)?;
            let rho = random_density(&mut rng, 3);
            let direct = semigroup_evolve(&g, &rho, 1.5)?;
            DensityOperator::new(direct.matrix().clone())?;
            let staged = semigroup_evolve(&g, &semigroup_evolve(&g, &rho, 0.6)?, 0.9)?;
            within(hs_norm(&(direct.matrix() - staged.matrix())), 1e-8)
        }),
        run(s, "bound_domination", || {
            let mut worst = f64::NEG_INFINITY;
            for spec in shipped_benchmarks() {
                let g = benchmark_channel(&spec)?;
                let env = BathModel::default().spec_for(g.lindblad_ops().len())?;
                let d = standard_dilation(&g, &env)?;
                for t in uniform_grid(0.0, 3.0, 7)? {
                    let v = channel_complexity(&d, g.h_s(), t)?.value;
                    let b = growth_bound(&g, &env, t)?;
                    worst = worst.max(v - b.bound_reduced).max(b.bound_reduced - b.bound_full);
                }
            }
            Ok((worst <= 1e-9, format!("max excess {worst:.3e}")))
        }),
        run(s, "gamma_additivity", || {
            let mut rng = seeded(seed ^ 41);
            let h = random_hermitian(&mut rng, 2, 1.0);
            let a = GkslGenerator::new(h.clone(), vec![random_matrix(&mut rng, 2, 2)])?;
            let b = GkslGenerator::new(h, vec![random_matrix(&mut rng, 2, 2), random_matrix(&mut rng, 2, 2)])?;
            let u = a.disjoint_union(&b)?;
            let sum = dissipator_scale(&a) + dissipator_scale(&b);
            within((dissipator_scale(&u) - sum).abs(), 4.0 * f64::EPSILON * sum)
        }),
        run(s, "depolarizing_fixed_point", || {
            let mut rng = seeded(seed ^ 42);
            let g = benchmark_channel(&BenchmarkSpec::new(BenchmarkKind::Depolarizing, 0.0, vec![0.8])?)?;
            let rho = random_density(&mut rng, 2);
            let half = identity(2) * c64(0.5, 0.0);
            let mut prev = f64::INFINITY;
            let mut monotone = true;
            for i in 0..=20 {
                let dist = hs_norm(&(semigroup_evolve(&g, &rho, 0.25 * i as f64)?.matrix() - &half));
                monotone &= dist <= prev + 1e-13;
                prev = dist;
            }
            Ok((monotone, format!("final distance {prev:.3e}")))
        }),
        run(s, "norm_anchors", || {
            let (gamma, kappa) = (0.36, 0.49);
            let hs_sum = |kind, rate: f64| -> Result<f64, GqcError> {
                let g = benchmark_channel(&BenchmarkSpec::new(kind, 1.0, vec![rate])?)?;
                let env = BathModel::default().spec_for(g.lindblad_ops().len())?;
                Ok(growth_bound(&g, &env, 1.0)?.lindblad_hs_sum)
            };
            let worst = (hs_sum(BenchmarkKind::Dephasing, gamma)? - gamma.sqrt())
                .abs()
                .max((hs_sum(BenchmarkKind::AmplitudeDamping, kappa)? - kappa.sqrt()).abs())
                .max((hs_sum(BenchmarkKind::Depolarizing, gamma)? - 3.0 * gamma.sqrt()).abs());
            within(worst, 4.0 * f64::EPSILON)
        }),
    ]
}

fn coherence_suite(seed: u64) -> Vec<CheckResult> {
    let s = "coherence";
    vec![
        run(s, "projector_properties", || {
            let mut rng = seeded(seed ^ 50);
            let mut worst = 0.0f64;
            for d in 1..=5 {
                let a = random_matrix(&mut rng, d, d);
                let b = random_matrix(&mut rng, d, d);
                let ea = dephase_matrix(&a);
                worst = worst.max(hs_norm(&(dephase_matrix(&ea) - &ea)));
                worst = worst.max((hs_inner(&a, &dephase_matrix(&b))? - hs_inner(&ea, &b)?).norm());
                worst = worst.max((hs_norm(&ea) - hs_norm(&a)).max(0.0));
            }
            within(worst, 1e-12)
        }),
        run(s, "coherence_is_offdiagonal_norm", || {
            let mut rng = seeded(seed ^ 51);
            let mut worst = 0.0f64;
            for d in 1..=5 {
                let rho = random_density(&mut rng, d);
                let tau: ComplexMatrix = rho.matrix() - dephase(&rho).matrix();
                worst = worst.max((coherence(&rho).c_value - hs_norm(&tau).powi(2)).abs());
            }
            within(worst, 1e-10)
        }),
        run(s, "dephase_idempotent_bitwise", || {
            let rho = random_density(&mut seeded(seed ^ 52), 4);
            let once = dephase(&rho);
            Ok((dephase(&once).matrix() == once.matrix(), "bitwise".into()))
        }),
        run(s, "commutator_bound", || {
            let mut rng = seeded(seed ^ 53);
            let mut violations = 0;
            for i in 0..50 {
                let d = 1 + i % 4;
                let h = random_hermitian(&mut rng, d, 1.0);
                let rho = random_density(&mut rng, d);
                if hs_norm(&commutator(h.matrix(), rho.matrix())) > 2.0 * h.hs_norm() + 1e-12 {
                    violations += 1;
                }
            }
            Ok((violations == 0, format!("{violations} violations")))
        }),
        run(s, "growth_inequality", || {
            let mut rng = seeded(seed ^ 54);
            let a = random_hermitian(&mut rng, 2, 1.0);
            let b = random_hermitian(&mut rng, 2, 1.0);
            let path = HamiltonianPath::from_fn(uniform_grid(0.0, 2.0, 11)?, |s| a.scale(s.cos()).add(&b.scale(s.sin())))?;
            let r = coherence_growth_check(&path, &DensityOperator::basis_state(2, 0)?)?;
            let ok = r.all_pass && r.rows[1..].iter().all(|row| row.margin > 0.0);
            Ok((ok, format!("min margin {:.3e}", r.min_margin)))
        }),
        run(s, "appendix_bound_domination", || {
            let mut rng = seeded(seed ^ 55);
            let rho0 = DensityOperator::basis_state(2, 0)?;
            let mut violations = 0;
            for i in 0..20 {
                let h = random_hermitian(&mut rng, 2, 1.0);
                let t = 0.2 * (i + 1) as f64;
                let rho_t = rho0.conjugate(&unitary_evolve(&h, t)?)?;
                if lower_bound_appendix(&rho0, &rho_t, 2)? > hs_complexity_static(&h, t, 2)? + 1e-12 {
                    violations += 1;
                }
            }
            Ok((violations == 0, format!("{violations} violations")))
        }),
        run(s, "main_bound_verifier", || {
            // recorded, never asserted
            let mut rng = seeded(seed ^ 56);
            let rho0 = DensityOperator::basis_state(2, 0)?;
            let mut violations = 0;
            for i in 0..20 {
                let h = random_hermitian(&mut rng, 2, 1.0);
                if verify_main_bound(&h, &rho0, 0.2 * (i + 1) as f64)?.violated {
                    violations += 1;
                }
            }
            Ok((true, format!("{violations} of 20 violated")))
        }),
    ]
}

pub fn run_suite(name: &str, seed: u64) -> Option<Vec<CheckResult>> {
    Some(match name {
        "operator" => operator_suite(seed),
        "geometry" => geometry_suite(seed),
        "dilation" => dilation_suite(seed),
        "complexity" => complexity_suite(seed),
        "intrinsic" => intrinsic_suite(seed),
        "gksl" => gksl_suite(seed),
        "coherence" => coherence_suite(seed),
        "all" => SUITES.iter().flat_map(|s| run_suite(s, seed).unwrap_or_default()).collect(),
        _ => return None,
    })
}

pub fn results_table(results: &[CheckResult]) -> ReportTable {
    let mut t = ReportTable::new("verify", &["suite", "check", "passed", "detail"]);
    for r in results {
        t.push_row(vec![
            r.suite.into(),
            r.name.into(),
            if r.passed { "true" } else { "false" }.into(),
            r.detail.clone().into(),
        ])
        .expect("text-only row");
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_suites_pass() {
        for s in ["operator", "geometry", "dilation", "coherence", "gksl", "complexity"] {
            for r in run_suite(s, 7).unwrap() {
                assert!(r.passed, "{r:?}");
            }
        }
        assert!(run_suite("nope", 7).is_none());
    }
}
