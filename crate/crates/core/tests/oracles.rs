//! Cross-module oracles: simulated paths against closed forms, limit laws
//! against each other, and the determinism contract.

use reactive_paths::analytic::{
    conditional_tau0_cdf, gaussian_tail, hit_probability, limit_law_for, Theorem,
};
use reactive_paths::path::{
    conditioned_exit_times, horizon_hit_fraction, q_statistic, simulate_batch, ConditioningMethod,
};
use reactive_paths::samplers::{sample_limit, sample_tau0_given_hit};
use reactive_paths::stats::{
    dkw_bound, ks_one_sample, ks_two_sample, EmpiricalSample, Proportion, Z_99,
};
use reactive_paths::{GridSpec, RunPlan, Time, WallModel1D};

fn sample(xs: Vec<f64>) -> EmpiricalSample {
    EmpiricalSample::new(xs).unwrap()
}

#[test]
fn exit_right_limit_is_convolution_of_hit_and_leave_limits() {
    let m = WallModel1D::new(1.0, 0.3, -0.5, -1.0, 0.5).unwrap();
    let th2 = limit_law_for(Theorem::ExitRight, &m).unwrap();
    let th3 = limit_law_for(Theorem::Characteristic, &m).unwrap();
    let th4 = limit_law_for(Theorem::FromSaddle, &m).unwrap();
    let n = 20_000;
    let plan = RunPlan::sequential(101);
    let direct = plan
        .collect(n, |rng| Ok::<_, ()>(sample_limit(&th2, rng)))
        .unwrap();
    let summed = RunPlan::sequential(102)
        .collect(n, |rng| {
            Ok::<_, ()>(sample_limit(&th3, rng) + sample_limit(&th4, rng))
        })
        .unwrap();
    let ks = ks_two_sample(&sample(direct), &sample(summed));
    assert!(ks.passes(), "{ks:?}");
}

#[test]
fn exact_tau0_sampler_matches_its_cdf() {
    for (lambda, x0, eps) in [(1.0, -0.5, 0.2), (0.5, -1.0, 0.7), (3.0, -0.2, 0.05)] {
        let m = WallModel1D::new(lambda, eps, x0, -2.0, 0.0).unwrap();
        let n = 50_000;
        let xs = RunPlan::sequential(103)
            .collect(n, |rng| sample_tau0_given_hit(&m, rng))
            .unwrap();
        let d = ks_one_sample(&sample(xs), |t| {
            conditional_tau0_cdf(&m, Time::Finite(t.max(0.0))).unwrap()
        });
        assert!(d < dkw_bound(n, 0.01), "({lambda}, {x0}, {eps}): {d}");
    }
}

#[test]
fn simulated_hits_match_reflection_principle_and_tau0_law() {
    let m = WallModel1D::new(1.0, 0.4, -0.3, -1.0, 0.5).unwrap();
    let paths = simulate_batch(&m, &GridSpec::default(), &RunPlan::sequential(104), 100_000);
    let f = Proportion {
        hits: paths.iter().filter(|o| o.flags.f).count() as u64,
        n: paths.len() as u64,
    };
    assert!((f.estimate() - gaussian_tail(m.a())).abs() < 3.0 * f.std_error());
    let d = horizon_hit_fraction(&paths, Time::Infinite);
    let exact = hit_probability(&m, m.x0(), Time::Infinite).unwrap();
    assert!((d.estimate() - exact).abs() < 3.0 * d.std_error());

    // grid τ₀ on D-paths follows the conditional law up to a half-step shift
    let taus: Vec<f64> = paths.iter().filter_map(|o| o.tau0.finite()).collect();
    let n = taus.len();
    let dist = ks_one_sample(&sample(taus), |t| {
        conditional_tau0_cdf(&m, Time::Finite(t.max(0.0))).unwrap()
    });
    assert!(dist < dkw_bound(n, 0.01), "{dist}");
}

#[test]
fn grid_refinement_moves_hit_probability_less_than_noise() {
    let m = WallModel1D::new(1.0, 0.4, -0.3, -1.0, 0.5).unwrap();
    let n = 50_000;
    let coarse = GridSpec::new(250, true).unwrap();
    let fine = GridSpec::new(1000, true).unwrap();
    let p = |g: &GridSpec| {
        horizon_hit_fraction(
            &simulate_batch(&m, g, &RunPlan::sequential(105), n),
            Time::Infinite,
        )
    };
    let (a, b) = (p(&coarse), p(&fine));
    let ci = Z_99 * (a.std_error().powi(2) + b.std_error().powi(2)).sqrt();
    assert!((a.estimate() - b.estimate()).abs() < ci, "{a:?} {b:?}");
}

#[test]
fn batches_do_not_depend_on_worker_count() {
    let m = WallModel1D::new(1.0, 0.4, -0.3, -1.0, 0.5).unwrap();
    let grid = GridSpec::default();
    let one = simulate_batch(&m, &grid, &RunPlan::new(106, 1), 3_000);
    let four = simulate_batch(&m, &grid, &RunPlan::new(106, 4), 3_000);
    assert_eq!(one, four);
    let method = ConditioningMethod::HTransform { dt: 1e-3 };
    let a = conditioned_exit_times(&m, &method, &RunPlan::new(107, 1), 600).unwrap();
    let b = conditioned_exit_times(&m, &method, &RunPlan::new(107, 3), 600).unwrap();
    assert_eq!(a, b);
}

#[test]
fn q_statistic_concentrates_at_zero() {
    let median_abs_q = |eps: f64| {
        let m = WallModel1D::new(1.0, eps, -0.25, -1.0, 0.5).unwrap();
        let paths = simulate_batch(&m, &GridSpec::default(), &RunPlan::sequential(108), 60_000);
        let qs: Vec<f64> = paths
            .iter()
            .filter(|o| o.flags.f)
            .map(|o| q_statistic(o, &m).unwrap().abs())
            .collect();
        assert!(qs.iter().all(|q| q.is_finite()));
        sample(qs)
    };
    let (wide, narrow) = (median_abs_q(0.5), median_abs_q(0.25));
    // order-statistic 99% bands for the medians
    let band = |s: &EmpiricalSample| {
        let half = Z_99 * 0.5 / (s.n() as f64).sqrt();
        (s.quantile(0.5 - half), s.quantile(0.5 + half))
    };
    assert!(band(&narrow).1 < band(&wide).0);
}

#[test]
fn exit_time_on_c_and_theta_on_f_become_indistinguishable() {
    let distance = |eps: f64| {
        let m = WallModel1D::new(1.0, eps, -0.25, -1.0, 0.5).unwrap();
        let paths = simulate_batch(&m, &GridSpec::default(), &RunPlan::sequential(109), 60_000);
        let on_c: Vec<f64> = paths
            .iter()
            .filter(|o| o.flags.c)
            .filter_map(|o| o.exit_time.finite())
            .collect();
        let on_f: Vec<f64> = paths
            .iter()
            .filter(|o| o.flags.f)
            .filter_map(|o| o.theta.finite())
            .collect();
        ks_two_sample(&sample(on_c), &sample(on_f)).statistic
    };
    assert!(distance(0.3) < distance(0.5));
}
