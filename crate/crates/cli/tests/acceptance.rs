//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs the experiment catalogue at reference parameters. Exits 0 so that
//! `cargo test` reports honest FAIL lines without aborting; set
//! `ACCEPTANCE_STRICT=1` to exit 1 when any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use reactive_paths::analytic::conditional_tau0_cdf;
use reactive_paths::samplers::{sample_r_at, sample_tau0_given_hit};
use reactive_paths::stats::{dkw_bound, ks_one_sample, EmpiricalSample};
use reactive_paths::{RunPlan, Time, WallModel1D, XiSampler};
use reactive_paths_cli::experiments::{self, max_convolution_residual, max_duplication_error};
use reactive_paths_cli::{run_experiment, ExperimentConfig, ExperimentKind, ResultRow};

const SUP_DIST_BOUND: f64 = 0.05;
const KS_ALPHA: f64 = 0.01;
const EXIT_KS_BOUND: f64 = 0.1;
const R_KS_BOUND: f64 = 0.02;
const IDENTITY_TOL: f64 = 1e-10;
const NEGATIVE_FRACTION_BOUND: f64 = 0.02;
const SAMPLER_DRAWS: usize = 100_000;
const EXIT_DRAWS: usize = 10_000;
const PATH_DRAWS: usize = 100_000;
const R_DRAWS: usize = 100_000;
const REPRO_DRAWS: usize = 2_000;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    summary: String,
}

impl Outcome {
    fn new(pass: bool, summary: impl Into<String>) -> Self {
        Self {
            pass,
            summary: summary.into(),
        }
    }
}

fn config(kind: ExperimentKind, edit: impl FnOnce(&mut ExperimentConfig)) -> ExperimentConfig {
    let mut c = ExperimentConfig::defaults(kind);
    edit(&mut c);
    c.validate().expect("acceptance config is valid");
    c
}

fn rows(c: &ExperimentConfig) -> Vec<ResultRow> {
    experiments::run(c).expect("experiment runs").rows
}

fn named<'a>(rows: &'a [ResultRow], name: &str) -> Vec<&'a ResultRow> {
    rows.iter().filter(|r| r.statistic_name == name).collect()
}

fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

fn fmt_list(xs: &[f64]) -> String {
    xs.iter()
        .map(|x| format!("{x:.4}"))
        .collect::<Vec<_>>()
        .join(" > ")
}

fn info(line: &str) {
    println!("INFO      {line}");
}

fn reach_zero_convergence() -> Outcome {
    let c = config(ExperimentKind::Th3Convergence, |c| c.samples = 1000);
    let sup: Vec<f64> = c
        .eps_list
        .iter()
        .map(|&e| experiments::th3_sup_distance(&c.model(e).unwrap()).unwrap())
        .collect();
    let last = *sup.last().unwrap();
    Outcome::new(
        strictly_decreasing(&sup) && last < SUP_DIST_BOUND,
        format!(
            "sup distance {} (bound {SUP_DIST_BOUND} at eps=0.05)",
            fmt_list(&sup)
        ),
    )
}

fn exact_sampler_consistency() -> Outcome {
    let bound = dkw_bound(SAMPLER_DRAWS, KS_ALPHA);
    let mut pass = true;
    let mut parts = Vec::new();
    for (k, (lambda, x0, eps)) in [(1.0, -0.5, 0.2), (0.5, -1.0, 0.7), (3.0, -0.2, 0.05)]
        .into_iter()
        .enumerate()
    {
        let m = WallModel1D::new(lambda, eps, x0, -2.0, 0.0).unwrap();
        let draws = RunPlan::new(experiments::derive_seed(11, k as u64), 4)
            .collect(SAMPLER_DRAWS, |rng| sample_tau0_given_hit(&m, rng))
            .unwrap();
        let d = ks_one_sample(&EmpiricalSample::new(draws).unwrap(), |t| {
            conditional_tau0_cdf(&m, Time::Finite(t.max(0.0))).unwrap()
        });
        pass &= d < bound;
        parts.push(format!("({lambda},{x0},{eps}) {d:.5}"));
    }
    Outcome::new(pass, format!("KS {} vs DKW {bound:.5}", parts.join(", ")))
}

fn exit_right_convergence() -> Outcome {
    let c = config(ExperimentKind::Th2Convergence, |c| {
        c.samples = EXIT_DRAWS;
        c.workers = 4;
    });
    let r = rows(&c);
    let ks: Vec<f64> = named(&r, "ks_limit").iter().map(|r| r.statistic).collect();
    let cross = config(ExperimentKind::Th2Convergence, |c| {
        c.samples = EXIT_DRAWS;
        c.eps_list = vec![0.35];
        c.cross_check = true;
        c.workers = 4;
    });
    let r2 = rows(&cross);
    let two = named(&r2, "ks_rejection_vs_htransform")[0];
    let last = *ks.last().unwrap_or(&f64::NAN);
    let pass = ks.len() == 3 && strictly_decreasing(&ks) && last < EXIT_KS_BOUND && two.pass;
    Outcome::new(
        pass,
        format!(
            "KS to limit {} (bound {EXIT_KS_BOUND} at eps=0.25); rejection vs h-transform KS {:.4} vs {:.4}",
            fmt_list(&ks),
            two.statistic,
            two.threshold
        ),
    )
}

fn exact_identities() -> Outcome {
    let c = config(ExperimentKind::IsometryIdentity, |c| {
        c.samples = PATH_DRAWS;
        c.workers = 4;
    });
    let r = rows(&c);
    let pick = |n: &str| named(&r, n)[0].clone();
    let names = [
        "d_over_f",
        "isometry_ratio",
        "hit_r0.5",
        "hit_r1",
        "hit_rinf",
    ];
    let picked: Vec<ResultRow> = names.iter().map(|n| pick(n)).collect();
    let theta = pick("isometry_ratio_theta");
    info(&format!(
        "isometry with theta as stopping time, normalised by P(E): {:.4} +/- {:.4}",
        theta.statistic, theta.threshold
    ));
    let summary = picked
        .iter()
        .map(|r| {
            format!(
                "{} {:.4} ({})",
                r.statistic_name,
                r.statistic,
                if r.pass { "ok" } else { "off" }
            )
        })
        .collect::<Vec<_>>()
        .join(", ");
    Outcome::new(picked.iter().all(|r| r.pass), summary)
}

fn asymptotic_equivalence() -> Outcome {
    let c = config(ExperimentKind::EquivalenceRatios, |c| {
        c.samples = PATH_DRAWS;
        c.workers = 4;
    });
    let r = rows(&c);
    let mut pass = true;
    let mut parts = Vec::new();
    for name in ["ratio_CD", "ratio_CE", "ratio_EF"] {
        let rs = named(&r, name);
        let vals: Vec<f64> = rs.iter().map(|r| r.statistic).collect();
        // endpoint CI separation: every later ε is below the previous lower CI bound
        let ok = rs.len() == 3 && rs.iter().all(|r| r.pass) && strictly_decreasing(&vals);
        pass &= ok;
        parts.push(format!("{name} {}", fmt_list(&vals)));
    }
    let closed = named(&r, "ef_vs_two_sided_tail");
    pass &= closed.len() == 3 && closed.iter().all(|r| r.pass);
    for row in &closed {
        parts.push(format!(
            "eps={} |EF - 2(1-Phi)| {:.4} vs 3 sigma {:.4}",
            row.eps.unwrap_or(f64::NAN),
            row.statistic,
            row.threshold
        ));
    }
    for row in named(&r, "ef_vs_one_sided_tail") {
        info(&format!(
            "eps={} |EF - (1-Phi)| {:.4} vs 3 sigma {:.4} ({})",
            row.eps.unwrap_or(f64::NAN),
            row.statistic,
            row.threshold,
            if row.pass { "within" } else { "outside" }
        ));
    }
    Outcome::new(pass, parts.join("; "))
}

fn log_conditioning() -> Outcome {
    let gumbel = |x: f64| (-(-x).exp()).exp();
    let ks: Vec<f64> = [2.0, 5.0, 20.0]
        .into_iter()
        .enumerate()
        .map(|(k, a)| {
            let draws = RunPlan::new(experiments::derive_seed(12, k as u64), 4)
                .collect(R_DRAWS, |rng| sample_r_at(a, rng))
                .unwrap();
            ks_one_sample(&EmpiricalSample::new(draws).unwrap(), gumbel)
        })
        .collect();
    Outcome::new(
        strictly_decreasing(&ks) && ks[2] < R_KS_BOUND,
        format!(
            "KS to standard Gumbel at a=2,5,20: {} (bound {R_KS_BOUND})",
            fmt_list(&ks)
        ),
    )
}

fn convolution_identity() -> Outcome {
    let models = [
        WallModel1D::new(1.0, 0.3, -0.5, -1.0, 0.5).unwrap(),
        WallModel1D::new(2.5, 0.1, -0.2, -3.0, 1.5).unwrap(),
    ];
    let residuals: Vec<f64> = models
        .iter()
        .map(|m| max_convolution_residual(m).unwrap())
        .collect();
    let dup = max_duplication_error().unwrap();
    Outcome::new(
        residuals.iter().all(|&r| r < IDENTITY_TOL) && dup < IDENTITY_TOL,
        format!(
            "max residual {:.2e}, {:.2e}; duplication {dup:.2e} (tolerance {IDENTITY_TOL:e})",
            residuals[0], residuals[1]
        ),
    )
}

fn saddle(edit: impl FnOnce(&mut ExperimentConfig)) -> Vec<ResultRow> {
    rows(&config(ExperimentKind::SaddleExit, |c| {
        c.samples = EXIT_DRAWS;
        c.eps_list = vec![0.25];
        c.workers = 4;
        edit(c);
    }))
}

fn saddle_regimes() -> Outcome {
    let gaussian = saddle(|c| {
        c.mu = 1.0;
        c.alpha = 0.0;
        c.xi = XiSampler::PointMass(0.0);
    });
    let g = named(&gaussian, "ks_vs_limit")[0].clone();
    let rademacher = saddle(|c| {
        c.mu = 1.0;
        c.alpha = 0.0;
        c.xi = XiSampler::Rademacher;
    });
    let gr = named(&rademacher, "ks_vs_limit")[0];
    info(&format!(
        "gaussian-only regime with xi = +/-1: KS {:.4} vs {:.4} ({})",
        gr.statistic,
        gr.threshold,
        if gr.pass { "pass" } else { "fail" }
    ));

    let mixture = saddle(|c| {
        c.mu = 0.25;
        c.alpha = 0.0;
        c.xi = XiSampler::PointMass(1.0);
        c.eps_list = vec![0.5, 0.35, 0.25];
    });
    let neg: Vec<f64> = named(&mixture, "negative_fraction")
        .iter()
        .map(|r| r.statistic)
        .collect();
    let mixture_ok =
        neg.len() == 3 && strictly_decreasing(&neg) && neg[2] < NEGATIVE_FRACTION_BOUND;

    let intermediate = saddle(|c| {
        c.mu = 0.25;
        c.alpha = 0.5;
    });
    let i = named(&intermediate, "ks_vs_limit")[0].clone();

    Outcome::new(
        g.pass && mixture_ok && i.pass,
        format!(
            "(i) KS {:.4} vs {:.4}; (ii) negative fraction {} (bound {NEGATIVE_FRACTION_BOUND}); (iii) KS {:.4} vs {:.4}",
            g.statistic,
            g.threshold,
            fmt_list(&neg),
            i.statistic,
            i.threshold
        ),
    )
}

fn conditional_cf() -> Outcome {
    let c = config(ExperimentKind::CfCheck, |c| {
        c.samples = EXIT_DRAWS;
        c.workers = 4;
    });
    let r = rows(&c);
    let rs = named(&r, "max_cf_deviation");
    let vals: Vec<f64> = rs.iter().map(|r| r.statistic).collect();
    Outcome::new(
        rs.len() == 3 && rs.iter().all(|r| r.pass) && strictly_decreasing(&vals),
        format!("max |cf - limit| {}", fmt_list(&vals)),
    )
}

fn reproducibility() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut mismatched = Vec::new();
    for kind in ExperimentKind::ALL {
        let csv = |tag: &str, workers: usize| {
            let c = config(kind, |c| {
                c.samples = REPRO_DRAWS;
                c.dt = 1e-3;
                c.workers = workers;
                c.out_dir = dir.path().join(format!("{kind}_{tag}"));
            });
            run_experiment(&c).unwrap();
            std::fs::read(c.out_dir.join("results.csv")).unwrap()
        };
        let (a, b, c) = (csv("a", 1), csv("b", 1), csv("c", 8));
        if a != b || a != c {
            mismatched.push(kind.name());
        }
    }
    Outcome::new(
        mismatched.is_empty(),
        if mismatched.is_empty() {
            "results.csv byte-identical across reruns and workers 1 vs 8 for all 8 experiments"
                .to_string()
        } else {
            format!("differences in {}", mismatched.join(", "))
        },
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("reach-zero CDF convergence", reach_zero_convergence),
        ("exact hitting-time sampler", exact_sampler_consistency),
        ("exit-right Monte Carlo convergence", exit_right_convergence),
        ("reflection and isometry identities", exact_identities),
        ("asymptotic event equivalence", asymptotic_equivalence),
        ("log-conditioning Gumbel limit", log_conditioning),
        ("convolution identity", convolution_identity),
        ("saddle exit regimes", saddle_regimes),
        ("conditional characteristic function", conditional_cf),
        ("reproducibility", reproducibility),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} [{:>2}] {name}: {} ({:.1}s)",
            if o.pass { "PASS" } else { "FAIL" },
            k + 1,
            o.summary,
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {}/{} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if strict && failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
