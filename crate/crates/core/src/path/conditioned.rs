//! Sampling the exit time conditioned on leaving through `q₊`.

use std::f64::consts::PI;

use super::{simulate_path, ExitSide, GridSpec, PathOutcome};
use crate::analytic::{erfc, erfcx};
use crate::error::{invalid, Error, Result};
use crate::model::WallModel1D;
use crate::parallel::RunPlan;
use crate::rng::SimRng;

/// Distance above `q₋` below which the h-transform integrator clamps.
pub const GUARD_OFFSET: f64 = 1e-9;

/// Attempts allowed per h-transform draw before giving up.
const HTRANSFORM_MAX_ATTEMPTS: u64 = 10_000;

/// Exit-right probability and its log-derivative for `dX = λX dt + ε dW`.
///
/// With `c = √λ/ε` the scale density is `e^{-c²y²}` and everything reduces to
/// `G(x) = ∫_{q₋}^x e^{-c²y²} dy`, written through `erfc`/`erfcx`.
#[derive(Debug, Clone, Copy)]
struct ScaleFunction {
    lambda: f64,
    eps2: f64,
    c: f64,
    q_minus: f64,
    q_plus: f64,
    erfc_left: f64,
    erfcx_left: f64,
}

impl ScaleFunction {
    fn new(model: &WallModel1D) -> Result<Self> {
        if model.q_plus() <= 0.0 {
            return Err(invalid("conditioning on a right exit needs q_plus > 0"));
        }
        let c = model.lambda().sqrt() / model.eps();
        let v = c * model.q_minus().abs();
        Ok(Self {
            lambda: model.lambda(),
            eps2: model.eps() * model.eps(),
            c,
            q_minus: model.q_minus(),
            q_plus: model.q_plus(),
            erfc_left: erfc(v),
            erfcx_left: erfcx(v),
        })
    }

    fn check(&self, x: f64) -> Result<()> {
        if x > self.q_minus && x < self.q_plus {
            Ok(())
        } else {
            Err(Error::OutsideInterval {
                x,
                lo: self.q_minus,
                hi: self.q_plus,
            })
        }
    }

    /// `(2c/√π) G(x)`.
    fn integral(&self, x: f64) -> f64 {
        if x <= 0.0 {
            erfc(self.c * x.abs()) - self.erfc_left
        } else {
            2.0 - erfc(self.c * x) - self.erfc_left
        }
    }

    fn h(&self, x: f64) -> f64 {
        self.integral(x) / self.integral(self.q_plus)
    }

    /// `h'(x)/h(x) = e^{-c²x²} / G(x)`.
    fn log_derivative(&self, x: f64) -> f64 {
        let c = self.c;
        let gap = x - self.q_minus;
        if c * gap < 1e-4 {
            // midpoint rule, relative error O((c·gap)²)
            let mid = 0.5 * (x + self.q_minus);
            return (-c * c * (x * x - mid * mid)).exp() / gap;
        }
        let norm = 2.0 * c / PI.sqrt();
        if x <= 0.0 {
            let u = c * x.abs();
            let v = c * self.q_minus.abs();
            // erfcx(u) - erfcx(v) e^{u²-v²}
            let expo = (u - v) * (u + v);
            let denom = (erfcx(u) - self.erfcx_left) - self.erfcx_left * expo.exp_m1();
            norm / denom
        } else {
            norm * (-c * c * x * x).exp() / (2.0 - erfc(c * x) - self.erfc_left)
        }
    }

    fn drift(&self, x: f64) -> f64 {
        self.lambda * x + self.eps2 * self.log_derivative(x)
    }
}

/// Probability of leaving `(q₋, q₊)` through `q₊` when started at `x`.
pub fn exit_right_probability(model: &WallModel1D, x: f64) -> Result<f64> {
    let scale = ScaleFunction::new(model)?;
    if x <= model.q_minus() {
        return Ok(0.0);
    }
    if x >= model.q_plus() {
        return Ok(1.0);
    }
    Ok(scale.h(x))
}

/// Drift of the process conditioned to exit through `q₊`: `λx + ε² h'(x)/h(x)`.
pub fn doob_conditioned_drift(model: &WallModel1D, x: f64) -> Result<f64> {
    let scale = ScaleFunction::new(model)?;
    scale.check(x)?;
    Ok(scale.drift(x))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RejectionDraw {
    pub tau: f64,
    pub outcome: PathOutcome,
    pub attempts: u64,
}

/// Simulates paths until one exits right; `max_paths` bounds the attempts.
pub fn sample_exit_conditioned_rejection(
    model: &WallModel1D,
    grid: &GridSpec,
    rng: &mut SimRng,
    max_paths: u64,
) -> Result<RejectionDraw> {
    for attempts in 1..=max_paths {
        let outcome = simulate_path(model, grid, rng);
        if outcome.exit_side == ExitSide::Right {
            if let Some(tau) = outcome.exit_time.finite() {
                return Ok(RejectionDraw {
                    tau,
                    outcome,
                    attempts,
                });
            }
        }
    }
    Err(Error::BudgetExceeded {
        attempts: max_paths,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HTransformDraw {
    pub tau: f64,
    /// Integrations discarded because they left through `q₋`.
    pub left_exits: u64,
    pub steps: u64,
    pub guarded_steps: u64,
}

fn integrate_htransform(
    model: &WallModel1D,
    scale: &ScaleFunction,
    dt: f64,
    rng: &mut SimRng,
) -> Result<HTransformDraw> {
    let sd = model.eps() * dt.sqrt();
    let floor = model.q_minus() + GUARD_OFFSET;
    let mut draw = HTransformDraw {
        tau: 0.0,
        left_exits: 0,
        steps: 0,
        guarded_steps: 0,
    };
    'attempt: for _ in 0..HTRANSFORM_MAX_ATTEMPTS {
        let mut x = model.x0();
        let mut k: u64 = 0;
        loop {
            k += 1;
            x += scale.drift(x) * dt + sd * rng.normal();
            if x >= scale.q_plus {
                draw.steps += k;
                draw.tau = k as f64 * dt;
                return Ok(draw);
            }
            if x <= scale.q_minus {
                draw.steps += k;
                draw.left_exits += 1;
                continue 'attempt;
            }
            if x < floor {
                x = floor;
                draw.guarded_steps += 1;
            }
        }
    }
    Err(Error::BudgetExceeded {
        attempts: HTRANSFORM_MAX_ATTEMPTS,
    })
}

/// Euler–Maruyama on the conditioned drift; left exits are discretization
/// artifacts and are retried.
pub fn sample_exit_conditioned_htransform(
    model: &WallModel1D,
    dt: f64,
    rng: &mut SimRng,
) -> Result<HTransformDraw> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid(format!("time step must be positive, got {dt}")));
    }
    if model.x0() <= model.q_minus() {
        return Err(invalid("start must lie above q_minus"));
    }
    let scale = ScaleFunction::new(model)?;
    integrate_htransform(model, &scale, dt, rng)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConditioningMethod {
    Rejection { grid: GridSpec, max_paths: u64 },
    HTransform { dt: f64 },
}

impl ConditioningMethod {
    pub fn name(&self) -> &'static str {
        match self {
            ConditioningMethod::Rejection { .. } => "rejection",
            ConditioningMethod::HTransform { .. } => "htransform",
        }
    }
}

/// One conditioned exit time with its cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionedTau {
    pub tau: f64,
    /// Paths simulated (rejection) or integrations started (h-transform).
    pub attempts: u64,
    pub left_exits: u64,
    pub steps: u64,
    pub guarded_steps: u64,
}

pub fn sample_conditioned_tau(
    model: &WallModel1D,
    method: &ConditioningMethod,
    rng: &mut SimRng,
) -> Result<ConditionedTau> {
    match *method {
        ConditioningMethod::Rejection { grid, max_paths } => {
            let d = sample_exit_conditioned_rejection(model, &grid, rng, max_paths)?;
            Ok(ConditionedTau {
                tau: d.tau,
                attempts: d.attempts,
                left_exits: 0,
                steps: 0,
                guarded_steps: 0,
            })
        }
        ConditioningMethod::HTransform { dt } => {
            let d = sample_exit_conditioned_htransform(model, dt, rng)?;
            Ok(ConditionedTau {
                tau: d.tau,
                attempts: 1 + d.left_exits,
                left_exits: d.left_exits,
                steps: d.steps,
                guarded_steps: d.guarded_steps,
            })
        }
    }
}

/// Conditioned exit times with aggregate cost counters.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionedBatch {
    pub taus: Vec<f64>,
    pub attempts: u64,
    pub left_exits: u64,
    pub steps: u64,
    pub guarded_steps: u64,
}

impl ConditionedBatch {
    /// Discarded left exits per integration started.
    pub fn left_exit_fraction(&self) -> f64 {
        self.left_exits as f64 / self.attempts as f64
    }

    pub fn guarded_fraction(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.guarded_steps as f64 / self.steps as f64
        }
    }

    pub fn mean_attempts(&self) -> f64 {
        self.attempts as f64 / self.taus.len() as f64
    }
}

/// `n` conditioned exit times under `plan`.
///
/// For the h-transform a left-exit fraction above 1% is a step-size failure.
pub fn conditioned_exit_times(
    model: &WallModel1D,
    method: &ConditioningMethod,
    plan: &RunPlan,
    n: usize,
) -> Result<ConditionedBatch> {
    let draws = plan.collect(n, |rng| sample_conditioned_tau(model, method, rng))?;
    let mut batch = ConditionedBatch {
        taus: Vec::with_capacity(n),
        attempts: 0,
        left_exits: 0,
        steps: 0,
        guarded_steps: 0,
    };
    for d in draws {
        batch.taus.push(d.tau);
        batch.attempts += d.attempts;
        batch.left_exits += d.left_exits;
        batch.steps += d.steps;
        batch.guarded_steps += d.guarded_steps;
    }
    if let ConditioningMethod::HTransform { .. } = method {
        let fraction = batch.left_exit_fraction();
        if fraction > 0.01 {
            return Err(Error::StepSizeFailure { fraction });
        }
    }
    Ok(batch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::gaussian_tail;
    use crate::stats::{ks_two_sample, EmpiricalSample, Proportion};

    fn model(eps: f64) -> WallModel1D {
        WallModel1D::new(1.0, eps, -0.25, -1.0, 0.5).unwrap()
    }

    #[test]
    fn drift_blows_up_at_wrong_boundary() {
        let m = WallModel1D::new(1.0, 0.3, -0.5, -1.0, 0.5).unwrap();
        let v = doob_conditioned_drift(&m, -1.0 + 1e-6).unwrap();
        assert!(v > 1e3, "{v}");
        // continuity across the midpoint-rule switch
        let c = 1.0f64.sqrt() / 0.3;
        let x = -1.0 + 1e-4 / c;
        let lo = doob_conditioned_drift(&m, x * (1.0 + 1e-12)).unwrap();
        let hi = doob_conditioned_drift(&m, x * (1.0 - 1e-12)).unwrap();
        assert!((lo / hi - 1.0).abs() < 1e-6);
    }

    #[test]
    fn drift_is_linear_far_above_zero() {
        let m = WallModel1D::new(1.0, 0.3, -0.5, -1.0, 3.0).unwrap();
        for x in [0.9, 1.2, 2.0, 2.9] {
            let v = doob_conditioned_drift(&m, x).unwrap();
            assert!((v / x - 1.0).abs() < 0.01, "x = {x}: {v}");
        }
    }

    #[test]
    fn drift_rejects_outside_points() {
        let m = model(0.3);
        assert!(doob_conditioned_drift(&m, -1.0).is_err());
        assert!(doob_conditioned_drift(&m, 0.5).is_err());
        let characteristic = WallModel1D::new(1.0, 0.3, -0.5, -1.0, 0.0).unwrap();
        assert!(doob_conditioned_drift(&characteristic, -0.5).is_err());
    }

    #[test]
    fn exit_probability_is_half_at_centre_of_symmetric_interval() {
        let m = WallModel1D::new(1.3, 0.4, -0.5, -0.7, 0.7).unwrap();
        assert!((exit_right_probability(&m, 0.0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(exit_right_probability(&m, -0.7).unwrap(), 0.0);
        assert_eq!(exit_right_probability(&m, 0.7).unwrap(), 1.0);
    }

    #[test]
    fn log_derivative_matches_finite_difference_of_h() {
        let m = WallModel1D::new(1.0, 0.3, -0.5, -1.0, 0.5).unwrap();
        let s = ScaleFunction::new(&m).unwrap();
        for x in [-0.9, -0.5, -0.1, 0.2, 0.4] {
            let hstep = 1e-6;
            let fd = (s.h(x + hstep).ln() - s.h(x - hstep).ln()) / (2.0 * hstep);
            assert!((fd / s.log_derivative(x) - 1.0).abs() < 1e-6, "x = {x}");
        }
    }

    #[test]
    fn rejection_returns_right_exits_after_tau0() {
        let m = model(0.4);
        let mut rng = SimRng::new(31, 0);
        for _ in 0..500 {
            let d = sample_exit_conditioned_rejection(&m, &GridSpec::default(), &mut rng, 10_000)
                .unwrap();
            assert_eq!(d.outcome.exit_side, ExitSide::Right);
            assert!(d.outcome.tau0.finite().unwrap() <= d.tau);
            assert!(d.attempts >= 1);
        }
    }

    #[test]
    fn rejection_budget_is_reported() {
        let m = WallModel1D::new(1.0, 0.05, -0.5, -0.6, 0.5).unwrap();
        let mut rng = SimRng::new(32, 0);
        let err = sample_exit_conditioned_rejection(&m, &GridSpec::default(), &mut rng, 3);
        assert_eq!(err.unwrap_err(), Error::BudgetExceeded { attempts: 3 });
    }

    #[test]
    fn rejection_acceptance_rate_tracks_upcrossing_probability() {
        // λ=1, x0=-0.25, ε=0.35: P(C) ≈ 1 - Φ(a) up to the C/F symmetric difference.
        let m = model(0.35);
        let plan = RunPlan::sequential(33);
        let n = 100_000;
        let paths = super::super::simulate_batch(&m, &GridSpec::default(), &plan, n);
        let c = paths.iter().filter(|o| o.flags.c).count() as u64;
        let sym: u64 = paths.iter().filter(|o| o.flags.c != o.flags.f).count() as u64;
        let p = Proportion {
            hits: c,
            n: n as u64,
        };
        let exact = gaussian_tail(m.a());
        let tol = 3.0 * p.std_error() + sym as f64 / n as f64;
        assert!(
            (p.estimate() - exact).abs() < tol,
            "{} vs {exact} ± {tol}",
            p.estimate()
        );
    }

    #[test]
    fn htransform_left_exits_are_rare_at_fine_step() {
        let m = WallModel1D::new(1.0, 0.3, -0.25, -1.0, 0.5).unwrap();
        let method = ConditioningMethod::HTransform { dt: 1e-4 };
        let batch = conditioned_exit_times(&m, &method, &RunPlan::sequential(34), 300).unwrap();
        assert!(batch.left_exit_fraction() < 0.01);
        assert!(batch.guarded_fraction() < 1e-4);
        let expected = 1.0 + batch.left_exits as f64 / batch.taus.len() as f64;
        assert!((batch.mean_attempts() - expected).abs() < 1e-12);
    }

    #[test]
    fn htransform_and_rejection_agree_in_law() {
        let m = model(0.35);
        let n = 4_000;
        let rej = ConditioningMethod::Rejection {
            grid: GridSpec::default(),
            max_paths: 1_000_000,
        };
        let ht = ConditioningMethod::HTransform { dt: 1e-3 };
        let a = conditioned_exit_times(&m, &rej, &RunPlan::sequential(35), n).unwrap();
        let b = conditioned_exit_times(&m, &ht, &RunPlan::sequential(36), n).unwrap();
        let ks = ks_two_sample(
            &EmpiricalSample::new(a.taus).unwrap(),
            &EmpiricalSample::new(b.taus).unwrap(),
        );
        assert!(ks.passes(), "{ks:?}");
    }
}
