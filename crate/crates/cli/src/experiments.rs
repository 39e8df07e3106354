//! The experiment catalogue. Each runner turns a config into CSV rows and
//! SVG plots; all randomness comes from the config seed.

use reactive_paths::analytic::{
    conditional_tau0_cdf, convolution_residual, duplication_relative_error, gaussian_tail,
    hit_probability, limit_law_for, Theorem,
};
use reactive_paths::path::{
    conditioned_exit_times, horizon_hit_fraction, isometry_from_outcomes, simulate_batch,
    ConditionedBatch, EquivalenceEstimate, EventPair,
};
use reactive_paths::saddle::{conditional_cf_from_taus, saddle_exit_batch};
use reactive_paths::samplers::{sample_limit, sample_tau0_given_hit};
use reactive_paths::stats::{dkw_bound, ks_one_sample, ks_two_sample, EmpiricalSample, Z_99};
use reactive_paths::{ConditioningMethod, Error, LimitLaw, RunPlan, Time, WallModel1D};

use crate::config::{ConfigError, ExperimentConfig, ExperimentKind};
use crate::output::ResultRow;
use crate::svg::{cdf_overlay_svg, qq_svg, Curve, QqReference};

/// Grid size of the deterministic reach-zero convergence check.
pub const SUP_GRID_POINTS: usize = 10_000;
/// Grid of the characteristic-function convolution check.
pub const CONVOLUTION_GRID: (f64, f64, usize) = (-20.0, 20.0, 401);
pub const CF_R_GRID: [f64; 4] = [0.5, 1.0, 2.0, 4.0];

#[derive(Debug, Default)]
pub struct ExperimentOutput {
    pub rows: Vec<ResultRow>,
    /// `(file name, SVG markup)`.
    pub plots: Vec<(String, String)>,
    pub budget_exceeded: bool,
}

/// Independent master seed for sub-run `salt`.
pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    seed.wrapping_add(salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Sup-distance between the recentred exact conditional CDF of the hitting
/// time of 0 and its Gumbel limit, on limit quantiles `p ∈ [1e-9, 1 - 1e-9]`.
pub fn th3_sup_distance(model: &WallModel1D) -> reactive_paths::Result<f64> {
    let law = limit_law_for(Theorem::Characteristic, model)?;
    let shift = law.centering(model.eps());
    let mut worst: f64 = 0.0;
    for k in 0..SUP_GRID_POINTS {
        let p = 1e-9 + (1.0 - 2e-9) * k as f64 / (SUP_GRID_POINTS - 1) as f64;
        let x = law.quantile(p)?;
        let t = x + shift;
        let exact = if t <= 0.0 {
            0.0
        } else {
            conditional_tau0_cdf(model, Time::Finite(t))?
        };
        worst = worst.max((exact - law.cdf(x)?).abs());
    }
    Ok(worst)
}

/// Largest `|cf_th2 - cf_th3 cf_th4|` on the convolution grid.
pub fn max_convolution_residual(model: &WallModel1D) -> reactive_paths::Result<f64> {
    let (lo, hi, n) = CONVOLUTION_GRID;
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let t = lo + (hi - lo) * k as f64 / (n - 1) as f64;
        worst = worst.max(convolution_residual(model, t)?.norm());
    }
    Ok(worst)
}

/// Largest relative error of the duplication formula over the convolution grid.
pub fn max_duplication_error() -> reactive_paths::Result<f64> {
    let (lo, hi, n) = CONVOLUTION_GRID;
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let t = lo + (hi - lo) * k as f64 / (n - 1) as f64;
        worst = worst.max(duplication_relative_error(t)?);
    }
    Ok(worst)
}

struct Recorder<'a> {
    config: &'a ExperimentConfig,
    out: ExperimentOutput,
}

impl<'a> Recorder<'a> {
    fn new(config: &'a ExperimentConfig) -> Self {
        Self {
            config,
            out: ExperimentOutput::default(),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn row(
        &mut self,
        eps: Option<f64>,
        n: usize,
        name: &str,
        statistic: f64,
        threshold: f64,
        pass: bool,
        attempts: u64,
        detail: String,
    ) {
        self.out.rows.push(ResultRow {
            experiment: self.config.experiment.name().to_string(),
            eps,
            n,
            statistic_name: name.to_string(),
            statistic,
            threshold,
            pass,
            attempts,
            detail,
        });
    }

    /// A failed sampling step becomes a flagged row; the run continues.
    fn failure(&mut self, eps: Option<f64>, err: &Error) {
        let (name, attempts) = match err {
            Error::BudgetExceeded { attempts } => {
                self.out.budget_exceeded = true;
                ("budget_exceeded", *attempts)
            }
            Error::StepSizeFailure { .. } => ("step_size_failure", 0),
            _ => ("error", 0),
        };
        self.row(
            eps,
            0,
            name,
            f64::NAN,
            f64::NAN,
            false,
            attempts,
            err.to_string(),
        );
    }

    fn plot(&mut self, name: String, svg: String) {
        self.out.plots.push((name, svg));
    }

    fn plan(&self, salt: u64) -> RunPlan {
        RunPlan::new(derive_seed(self.config.seed, salt), self.config.workers)
    }
}

fn eps_tag(eps: f64) -> String {
    format!("{eps}").replace('.', "p")
}

fn model(config: &ExperimentConfig, eps: f64) -> Result<WallModel1D, ConfigError> {
    config.model(eps)
}

pub fn run(config: &ExperimentConfig) -> Result<ExperimentOutput, ConfigError> {
    config.validate()?;
    let mut rec = Recorder::new(config);
    match config.experiment {
        ExperimentKind::Th2Convergence => exit_time_convergence(&mut rec, Theorem::ExitRight)?,
        ExperimentKind::Th4Convergence => exit_time_convergence(&mut rec, Theorem::FromSaddle)?,
        ExperimentKind::Th3Convergence => th3_convergence(&mut rec)?,
        ExperimentKind::EquivalenceRatios => equivalence_ratios(&mut rec)?,
        ExperimentKind::IsometryIdentity => isometry_identity(&mut rec)?,
        ExperimentKind::ConvolutionCheck => convolution_check(&mut rec)?,
        ExperimentKind::SaddleExit => saddle_exit(&mut rec)?,
        ExperimentKind::CfCheck => cf_check(&mut rec)?,
    }
    Ok(rec.out)
}

fn pairing_error(e: Error) -> ConfigError {
    ConfigError::new(e.to_string())
}

fn batch_detail(method: &ConditioningMethod, b: &ConditionedBatch) -> String {
    format!(
        "method={};left_exit_fraction={:.6};guarded_fraction={:.3e}",
        method.name(),
        b.left_exit_fraction(),
        b.guarded_fraction()
    )
}

fn exit_time_convergence(rec: &mut Recorder, theorem: Theorem) -> Result<(), ConfigError> {
    let config = rec.config;
    let method = config.conditioning();
    for (k, &eps) in config.eps_list.iter().enumerate() {
        let m = model(config, eps)?;
        let law = limit_law_for(theorem, &m).map_err(pairing_error)?;
        let batch = match conditioned_exit_times(&m, &method, &rec.plan(k as u64), config.samples) {
            Ok(b) => b,
            Err(e) => {
                rec.failure(Some(eps), &e);
                continue;
            }
        };
        let centering = law.centering(eps);
        let sample = EmpiricalSample::new(batch.taus.iter().map(|t| t - centering).collect())
            .expect("exit times are finite");
        let ks = ks_one_sample(&sample, |x| law.cdf(x).unwrap_or(f64::NAN));
        let bound = dkw_bound(sample.n(), 0.01);
        rec.row(
            Some(eps),
            sample.n(),
            "ks_limit",
            ks,
            bound,
            ks < bound,
            batch.attempts,
            batch_detail(&method, &batch),
        );
        if config.cross_check {
            let rejection = ConditioningMethod::Rejection {
                grid: config.grid(),
                max_paths: config.max_paths,
            };
            let other = if matches!(method, ConditioningMethod::Rejection { .. }) {
                ConditioningMethod::HTransform { dt: config.dt }
            } else {
                rejection
            };
            match conditioned_exit_times(&m, &other, &rec.plan(1000 + k as u64), config.samples) {
                Ok(b) => {
                    let two = ks_two_sample(
                        &EmpiricalSample::new(batch.taus.clone()).expect("finite"),
                        &EmpiricalSample::new(b.taus).expect("finite"),
                    );
                    rec.row(
                        Some(eps),
                        config.samples,
                        "ks_rejection_vs_htransform",
                        two.statistic,
                        two.threshold_1pct,
                        two.passes(),
                        b.attempts,
                        format!("other_method={}", other.name()),
                    );
                }
                Err(e) => rec.failure(Some(eps), &e),
            }
        }
        rec.plot(
            format!("qq_{}_eps{}.svg", config.experiment, eps_tag(eps)),
            qq_svg(
                &sample,
                &QqReference::Law(&law),
                &format!(
                    "{} eps={eps}: centred exit time vs {}",
                    theorem.name(),
                    law.name()
                ),
            ),
        );
    }
    Ok(())
}

fn th3_convergence(rec: &mut Recorder) -> Result<(), ConfigError> {
    let config = rec.config;
    let mut previous = f64::INFINITY;
    for (k, &eps) in config.eps_list.iter().enumerate() {
        let m = model(config, eps)?;
        let law = limit_law_for(Theorem::Characteristic, &m).map_err(pairing_error)?;
        let sup = th3_sup_distance(&m).map_err(pairing_error)?;
        rec.row(
            Some(eps),
            SUP_GRID_POINTS,
            "sup_dist",
            sup,
            previous,
            sup < previous,
            0,
            "threshold=previous_eps_value".into(),
        );
        previous = sup;

        match rec
            .plan(k as u64)
            .collect(config.samples, |rng| sample_tau0_given_hit(&m, rng))
        {
            Ok(draws) => {
                let s = EmpiricalSample::new(draws).expect("finite draws");
                let ks = ks_one_sample(&s, |t| {
                    conditional_tau0_cdf(&m, Time::Finite(t.max(0.0))).unwrap_or(f64::NAN)
                });
                let bound = dkw_bound(s.n(), 0.01);
                rec.row(
                    Some(eps),
                    s.n(),
                    "sampler_ks",
                    ks,
                    bound,
                    ks < bound,
                    0,
                    String::new(),
                );
            }
            Err(e) => rec.failure(Some(eps), &e),
        }

        let shift = law.centering(eps);
        let (lo, hi) = (
            law.quantile(1e-4).unwrap_or(-5.0),
            law.quantile(1.0 - 1e-4).unwrap_or(5.0),
        );
        rec.plot(
            format!("cdf_{}_eps{}.svg", config.experiment, eps_tag(eps)),
            cdf_overlay_svg(
                &[
                    Curve::function("exact recentred", lo, hi, |x| {
                        let t = x + shift;
                        if t <= 0.0 {
                            0.0
                        } else {
                            conditional_tau0_cdf(&m, Time::Finite(t)).unwrap_or(f64::NAN)
                        }
                    }),
                    Curve::function("gumbel limit", lo, hi, |x| law.cdf(x).unwrap_or(f64::NAN)),
                ],
                &format!("th3 eps={eps}: sup distance {sup:.4}"),
                "t - (1/lambda) ln(1/eps)",
            ),
        );
    }
    Ok(())
}

fn equivalence_ratios(rec: &mut Recorder) -> Result<(), ConfigError> {
    let config = rec.config;
    let grid = config.grid();
    let mut previous: [Option<EquivalenceEstimate>; 3] = [None; 3];
    for (k, &eps) in config.eps_list.iter().enumerate() {
        let m = model(config, eps)?;
        let paths = simulate_batch(&m, &grid, &rec.plan(k as u64), config.samples);
        let warning = grid.coarseness_warning(&m).unwrap_or_default();
        for (idx, pair) in EventPair::ALL.into_iter().enumerate() {
            let name = format!("ratio_{}", pair.to_string().replace(',', ""));
            let est = match EquivalenceEstimate::from_outcomes(pair, &paths) {
                Ok(e) => e,
                Err(e) => {
                    rec.failure(Some(eps), &e);
                    continue;
                }
            };
            // CI-separated decrease relative to the previous (larger) ε
            let (threshold, pass) = match previous[idx] {
                Some(p) => {
                    let bar = p.ratio - p.ci_halfwidth;
                    (bar, est.ratio + est.ci_halfwidth < bar)
                }
                None => (f64::INFINITY, true),
            };
            rec.row(
                Some(eps),
                est.n_paths,
                &name,
                est.ratio,
                threshold,
                pass,
                0,
                format!(
                    "ci_halfwidth={:.6e};count_a={};count_sym_diff={};{warning}",
                    est.ci_halfwidth, est.count_a, est.count_sym_diff
                ),
            );
            if pair == EventPair::EF {
                let b = m.q_plus() * (2.0 * m.lambda()).sqrt() / eps;
                let sigma = est.ci_halfwidth / Z_99;
                for (label, exact) in [
                    ("ef_vs_two_sided_tail", 2.0 * gaussian_tail(b)),
                    ("ef_vs_one_sided_tail", gaussian_tail(b)),
                ] {
                    let dev = (est.ratio - exact).abs();
                    rec.row(
                        Some(eps),
                        est.n_paths,
                        label,
                        dev,
                        3.0 * sigma,
                        dev < 3.0 * sigma,
                        0,
                        format!("estimate={:.6e};closed_form={exact:.6e}", est.ratio),
                    );
                }
            }
            previous[idx] = Some(est);
        }

        let centering = 2.0 / m.lambda() * (1.0 / eps).ln();
        let on_c: Vec<f64> = paths
            .iter()
            .filter(|o| o.flags.c)
            .filter_map(|o| o.exit_time.finite())
            .map(|t| t - centering)
            .collect();
        let on_f: Vec<f64> = paths
            .iter()
            .filter(|o| o.flags.f)
            .filter_map(|o| o.theta.finite())
            .map(|t| t - centering)
            .collect();
        if let (Ok(c), Ok(f)) = (EmpiricalSample::new(on_c), EmpiricalSample::new(on_f)) {
            let two = ks_two_sample(&c, &f);
            rec.plot(
                format!("cdf_{}_eps{}.svg", config.experiment, eps_tag(eps)),
                cdf_overlay_svg(
                    &[
                        Curve::ecdf("exit time on C", &c),
                        Curve::ecdf("theta on F", &f),
                    ],
                    &format!("eps={eps}: two-sample KS {:.4}", two.statistic),
                    "time - (2/lambda) ln(1/eps)",
                ),
            );
        }
    }
    Ok(())
}

fn isometry_identity(rec: &mut Recorder) -> Result<(), ConfigError> {
    let config = rec.config;
    let grid = config.grid();
    for (k, &eps) in config.eps_list.iter().enumerate() {
        let m = model(config, eps)?;
        if m.x0() >= 0.0 {
            return Err(ConfigError::new("isometry-identity needs x0 < 0"));
        }
        let paths = simulate_batch(&m, &grid, &rec.plan(k as u64), config.samples);
        let n = paths.len();
        match isometry_from_outcomes(&m, &paths) {
            Ok(c) => {
                rec.row(
                    Some(eps),
                    n,
                    "d_over_f",
                    c.d_over_f,
                    c.d_over_f_ci,
                    (c.d_over_f - 2.0).abs() < c.d_over_f_ci,
                    0,
                    format!("p_d={:.6e};p_f={:.6e};target=2", c.p_d, c.p_f),
                );
                rec.row(
                    Some(eps),
                    n,
                    "isometry_ratio",
                    c.ratio,
                    c.ratio_ci,
                    (c.ratio - 1.0).abs() < c.ratio_ci,
                    0,
                    format!(
                        "lhs={:.6e};rhs={:.6e};target=1;stopping_time=tau0",
                        c.lhs, c.rhs
                    ),
                );
                rec.row(
                    Some(eps),
                    n,
                    "isometry_ratio_theta",
                    c.theta_ratio,
                    c.theta_ratio_ci,
                    (c.theta_ratio - 1.0).abs() < c.theta_ratio_ci,
                    0,
                    "target=1;stopping_time=theta;normalised_by=p_e".into(),
                );
            }
            Err(e) => rec.failure(Some(eps), &e),
        }
        for (label, r) in [
            ("hit_r0.5", Time::Finite(0.5)),
            ("hit_r1", Time::Finite(1.0)),
            ("hit_rinf", Time::Infinite),
        ] {
            let p = horizon_hit_fraction(&paths, r);
            let exact = hit_probability(&m, m.x0(), r).map_err(pairing_error)?;
            let dev = (p.estimate() - exact).abs();
            rec.row(
                Some(eps),
                n,
                label,
                dev,
                3.0 * p.std_error(),
                dev < 3.0 * p.std_error(),
                0,
                format!("estimate={:.6e};closed_form={exact:.6e}", p.estimate()),
            );
        }
        let taus: Vec<f64> = paths.iter().filter_map(|o| o.tau0.finite()).collect();
        if let Ok(s) = EmpiricalSample::new(taus) {
            let hi = s.quantile(0.999);
            rec.plot(
                format!("cdf_{}_eps{}.svg", config.experiment, eps_tag(eps)),
                cdf_overlay_svg(
                    &[
                        Curve::ecdf("simulated hitting time of 0", &s),
                        Curve::function("exact conditional CDF", 0.0, hi, |t| {
                            conditional_tau0_cdf(&m, Time::Finite(t)).unwrap_or(f64::NAN)
                        }),
                    ],
                    &format!("eps={eps}: hitting time of 0 given it happens"),
                    "t",
                ),
            );
        }
    }
    Ok(())
}

fn convolution_check(rec: &mut Recorder) -> Result<(), ConfigError> {
    let config = rec.config;
    let eps = config.eps_list[0];
    let m = model(config, eps)?;
    let residual = max_convolution_residual(&m).map_err(pairing_error)?;
    let (_, _, grid_n) = CONVOLUTION_GRID;
    rec.row(
        None,
        grid_n,
        "max_cf_residual",
        residual,
        1e-10,
        residual < 1e-10,
        0,
        String::new(),
    );
    let dup = max_duplication_error().map_err(pairing_error)?;
    rec.row(
        None,
        grid_n,
        "duplication_rel_err",
        dup,
        1e-10,
        dup < 1e-10,
        0,
        String::new(),
    );

    let th2 = limit_law_for(Theorem::ExitRight, &m).map_err(pairing_error)?;
    let th3 = limit_law_for(Theorem::Characteristic, &m).map_err(pairing_error)?;
    let th4 = limit_law_for(Theorem::FromSaddle, &m).map_err(pairing_error)?;
    let n = config.samples;
    let direct = rec
        .plan(0)
        .collect(n, |rng| Ok::<_, ()>(sample_limit(&th2, rng)))
        .unwrap_or_default();
    let summed = rec
        .plan(1)
        .collect(n, |rng| {
            Ok::<_, ()>(sample_limit(&th3, rng) + sample_limit(&th4, rng))
        })
        .unwrap_or_default();
    let (a, b) = (
        EmpiricalSample::new(direct).expect("finite"),
        EmpiricalSample::new(summed).expect("finite"),
    );
    let ks = ks_two_sample(&a, &b);
    rec.row(
        None,
        n,
        "mc_two_sample_ks",
        ks.statistic,
        ks.threshold_1pct,
        ks.passes(),
        0,
        String::new(),
    );
    let (lo, hi) = (
        th2.quantile(1e-3).unwrap_or(-5.0),
        th2.quantile(1.0 - 1e-3).unwrap_or(5.0),
    );
    rec.plot(
        format!("cdf_{}.svg", config.experiment),
        cdf_overlay_svg(
            &[
                Curve::function("exit-right limit", lo, hi, |x| {
                    th2.cdf(x).unwrap_or(f64::NAN)
                }),
                Curve::ecdf("reach-zero + leave-zero draws", &b),
            ],
            "limit law vs convolution of its two stages",
            "centred exit time",
        ),
    );
    Ok(())
}

fn saddle_exit(rec: &mut Recorder) -> Result<(), ConfigError> {
    let config = rec.config;
    let method = config.conditioning();
    let mut previous_negative = f64::INFINITY;
    for (k, &eps) in config.eps_list.iter().enumerate() {
        let params = config.saddle(eps)?;
        let (beta, regime) = params.beta_exponent();
        let draws = match saddle_exit_batch(&params, &rec.plan(k as u64), config.samples, &method) {
            Ok(d) => d,
            Err(e) => {
                rec.failure(Some(eps), &e);
                continue;
            }
        };
        let attempts = draws.iter().map(|d| d.attempts).sum();
        let scale = eps.powf(beta);
        let sample = EmpiricalSample::new(draws.iter().map(|d| d.x2_exit / scale).collect())
            .expect("finite exits");
        let law: LimitLaw = params.limit_law().map_err(pairing_error)?;
        let limit_draws = rec
            .plan(1000 + k as u64)
            .collect(config.samples, |rng| Ok::<_, ()>(sample_limit(&law, rng)))
            .unwrap_or_default();
        let reference = EmpiricalSample::new(limit_draws).expect("finite");
        let ks = ks_two_sample(&sample, &reference);
        let detail = format!(
            "regime={regime};beta={beta};xi={};method={}",
            params.xi(),
            method.name()
        );
        rec.row(
            Some(eps),
            sample.n(),
            "ks_vs_limit",
            ks.statistic,
            ks.threshold_1pct,
            ks.passes(),
            attempts,
            detail.clone(),
        );
        let negative = sample.fraction_below(0.0);
        rec.row(
            Some(eps),
            sample.n(),
            "negative_fraction",
            negative,
            previous_negative,
            negative < previous_negative,
            attempts,
            format!("{detail};threshold=previous_eps_value"),
        );
        previous_negative = negative;
        rec.row(
            Some(eps),
            sample.n(),
            "variance",
            sample.variance(),
            1.0 / (2.0 * params.mu()),
            sample.variance() > 1.0 / (2.0 * params.mu()),
            attempts,
            format!("{detail};threshold=gaussian_term_variance"),
        );
        rec.plot(
            format!("qq_{}_eps{}.svg", config.experiment, eps_tag(eps)),
            qq_svg(
                &sample,
                &QqReference::Sample(&reference),
                &format!("saddle {regime} eps={eps}: rescaled exit vs limit draws"),
            ),
        );
    }
    Ok(())
}

fn cf_check(rec: &mut Recorder) -> Result<(), ConfigError> {
    let config = rec.config;
    let method = config.conditioning();
    let mut previous: Option<(f64, f64)> = None;
    for (k, &eps) in config.eps_list.iter().enumerate() {
        let params = config.saddle(eps)?;
        let m = params.first_coordinate();
        let batch = match conditioned_exit_times(&m, &method, &rec.plan(k as u64), config.samples) {
            Ok(b) => b,
            Err(e) => {
                rec.failure(Some(eps), &e);
                continue;
            }
        };
        let check = conditional_cf_from_taus(params.mu(), &batch.taus, &CF_R_GRID)
            .map_err(pairing_error)?;
        let se = check.max_deviation_std_error();
        let (threshold, pass) = match previous {
            Some((dev, prev_se)) => {
                let bar = dev - Z_99 * prev_se;
                (bar, check.max_deviation + Z_99 * se < bar)
            }
            None => (f64::INFINITY, true),
        };
        rec.row(
            Some(eps),
            batch.taus.len(),
            "max_cf_deviation",
            check.max_deviation,
            threshold,
            pass,
            batch.attempts,
            format!("std_error={se:.6e};{}", batch_detail(&method, &batch)),
        );
        for p in &check.points {
            rec.row(
                Some(eps),
                batch.taus.len(),
                &format!("cf_estimate_r{}", p.r),
                p.estimate,
                p.target,
                p.estimate <= 1.0,
                batch.attempts,
                format!("std_error={:.6e};threshold=limit_value", p.std_error),
            );
        }
        previous = Some((check.max_deviation, se));

        let fine: Vec<f64> = (0..=40).map(|i| 0.125 * i as f64).collect();
        let curve =
            conditional_cf_from_taus(params.mu(), &batch.taus, &fine).map_err(pairing_error)?;
        let mu = params.mu();
        rec.plot(
            format!("cdf_{}_eps{}.svg", config.experiment, eps_tag(eps)),
            cdf_overlay_svg(
                &[
                    Curve {
                        label: "conditional estimate".into(),
                        points: curve.points.iter().map(|p| (p.r, p.estimate)).collect(),
                    },
                    Curve::function("limit exp(-r^2/(4 mu))", 0.0, 5.0, |r| {
                        (-r * r / (4.0 * mu)).exp()
                    }),
                ],
                &format!("eps={eps}: characteristic function of the Gaussian part"),
                "r",
            ),
        );
    }
    Ok(())
}
