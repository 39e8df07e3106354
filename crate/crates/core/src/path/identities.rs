//! Event-family comparisons and exact identities checked on simulated paths.

use std::fmt;

use super::{simulate_batch, EventFlags, GridSpec, PathOutcome};
use crate::error::{invalid, Error, Result};
use crate::model::{Time, WallModel1D};
use crate::parallel::RunPlan;
use crate::stats::{MeanEstimate, Proportion, Z_99};

/// A pair `(A, B)` of event families compared through `P(AΔB)/P(A)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventPair {
    CD,
    CE,
    EF,
}

impl EventPair {
    pub const ALL: [EventPair; 3] = [EventPair::CD, EventPair::CE, EventPair::EF];

    pub fn events(self, f: &EventFlags) -> (bool, bool) {
        match self {
            EventPair::CD => (f.c, f.d),
            EventPair::CE => (f.c, f.e),
            EventPair::EF => (f.e, f.f),
        }
    }
}

impl fmt::Display for EventPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EventPair::CD => "C,D",
            EventPair::CE => "C,E",
            EventPair::EF => "E,F",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalenceEstimate {
    pub pair: EventPair,
    pub n_paths: usize,
    pub count_a: u64,
    pub count_sym_diff: u64,
    /// `#(AΔB) / #(A)`.
    pub ratio: f64,
    /// 99% delta-method half-width.
    pub ci_halfwidth: f64,
}

impl EquivalenceEstimate {
    /// Ratio estimate from an existing path set.
    ///
    /// The half-width uses `Z_i = 1{AΔB} - r 1{A}`, whose mean is zero at the
    /// estimate, so `Var(r̂) ≈ E[Z²] / (n P(A)²)`.
    pub fn from_outcomes(pair: EventPair, outcomes: &[PathOutcome]) -> Result<Self> {
        let n = outcomes.len();
        let (mut count_a, mut sym, mut sym_in_a) = (0u64, 0u64, 0u64);
        for o in outcomes {
            let (a, b) = pair.events(&o.flags);
            count_a += a as u64;
            if a != b {
                sym += 1;
                sym_in_a += a as u64;
            }
        }
        if count_a == 0 {
            return Err(Error::NoConditioningEvents { n_paths: n });
        }
        let ratio = sym as f64 / count_a as f64;
        let nf = n as f64;
        let second_moment =
            (sym as f64 - 2.0 * ratio * sym_in_a as f64 + ratio * ratio * count_a as f64) / nf;
        let p_a = count_a as f64 / nf;
        Ok(Self {
            pair,
            n_paths: n,
            count_a,
            count_sym_diff: sym,
            ratio,
            ci_halfwidth: Z_99 * (second_moment.max(0.0) / nf).sqrt() / p_a,
        })
    }
}

pub fn estimate_equivalence_ratio(
    model: &WallModel1D,
    grid: &GridSpec,
    plan: &RunPlan,
    n_paths: usize,
    pair: EventPair,
) -> Result<EquivalenceEstimate> {
    if n_paths == 0 {
        return Err(invalid("n_paths must be positive"));
    }
    EquivalenceEstimate::from_outcomes(pair, &simulate_batch(model, grid, plan, n_paths))
}

/// Both sides of the second-moment identity and the reflection-principle ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsometryCheck {
    /// `mean(Δ² 1_D)` with `Δ = e^{λτ₀} ε (U(∞) - U(τ₀))`.
    pub lhs: f64,
    /// `ε² P̂(D) / (2λ)`.
    pub rhs: f64,
    /// `lhs / rhs` and its 99% half-width.
    pub ratio: f64,
    pub ratio_ci: f64,
    /// Same ratio with `Δ` built at `θ` and compared with `ε² P̂(E) / (2λ)`.
    pub theta_ratio: f64,
    pub theta_ratio_ci: f64,
    pub p_d: f64,
    pub p_f: f64,
    /// `P̂(D) / P̂(F)`, which should be 2.
    pub d_over_f: f64,
    pub d_over_f_ci: f64,
}

fn normalized_square(model: &WallModel1D, t: Time, u_at: Option<f64>, u_inf: f64) -> Option<f64> {
    let (t, u) = (t.finite()?, u_at?);
    let lambda = model.lambda();
    // e^{2λt}(U(∞) - U(t))² · 2λ, mean one given the stopping time
    let d = u_inf - u;
    Some((2.0 * lambda * t).exp() * d * d * 2.0 * lambda)
}

/// Evaluates the identities on an existing path set.
pub fn isometry_from_outcomes(
    model: &WallModel1D,
    outcomes: &[PathOutcome],
) -> Result<IsometryCheck> {
    let n = outcomes.len();
    let scaled: Vec<f64> = outcomes
        .iter()
        .filter_map(|o| normalized_square(model, o.tau0, o.u_at_tau0, o.u_infinity))
        .collect();
    let scaled_theta: Vec<f64> = outcomes
        .iter()
        .filter_map(|o| normalized_square(model, o.theta, o.u_at_theta, o.u_infinity))
        .collect();
    let n_f = outcomes.iter().filter(|o| o.flags.f).count();
    if scaled.is_empty() || scaled_theta.is_empty() || n_f == 0 {
        return Err(Error::NoConditioningEvents { n_paths: n });
    }
    let on_d = MeanEstimate::from_values(&scaled)?;
    let on_e = MeanEstimate::from_values(&scaled_theta)?;
    let eps2 = model.eps() * model.eps();
    let two_lambda = 2.0 * model.lambda();
    let nf = n as f64;
    let p_d = scaled.len() as f64 / nf;
    let p_f = n_f as f64 / nf;

    // F ⊆ D, so Z = 1_D - r 1_F has E[Z²] = P(D) + (r² - 2r) P(F)
    let r = p_d / p_f;
    let second_moment = p_d + (r * r - 2.0 * r) * p_f;
    Ok(IsometryCheck {
        lhs: on_d.mean * p_d * eps2 / two_lambda,
        rhs: eps2 * p_d / two_lambda,
        ratio: on_d.mean,
        ratio_ci: on_d.ci_halfwidth(),
        theta_ratio: on_e.mean,
        theta_ratio_ci: on_e.ci_halfwidth(),
        p_d,
        p_f,
        d_over_f: r,
        d_over_f_ci: Z_99 * (second_moment.max(0.0) / nf).sqrt() / p_f,
    })
}

pub fn check_ito_isometry_identity(
    model: &WallModel1D,
    grid: &GridSpec,
    plan: &RunPlan,
    n_paths: usize,
) -> Result<IsometryCheck> {
    isometry_from_outcomes(model, &simulate_batch(model, grid, plan, n_paths))
}

/// Fraction of paths that reached 0 by time `r` (`τ₀` node at or before `r`).
pub fn horizon_hit_fraction(outcomes: &[PathOutcome], r: Time) -> Proportion {
    let hits = outcomes
        .iter()
        .filter(|o| match (o.tau0, r) {
            (Time::Finite(_), Time::Infinite) => true,
            (Time::Finite(t), Time::Finite(r)) => t <= r,
            (Time::Infinite, _) => false,
        })
        .count();
    Proportion {
        hits: hits as u64,
        n: outcomes.len() as u64,
    }
}

/// `(1/λ) ln[(x0 + εU(∞)) / (x0 + εU(θ))]` on a path in `F`.
pub fn q_statistic(outcome: &PathOutcome, model: &WallModel1D) -> Result<f64> {
    let u_theta = match (outcome.theta, outcome.u_at_theta) {
        (Time::Finite(_), Some(u)) => u,
        _ => return Err(invalid("Q needs a path that reached q_plus")),
    };
    let num = model.x0() + model.eps() * outcome.u_infinity;
    let den = model.x0() + model.eps() * u_theta;
    if num <= 0.0 || den <= 0.0 {
        return Err(invalid("Q needs x0 + εU(∞) > 0 and x0 + εU(θ) > 0"));
    }
    Ok((num / den).ln() / model.lambda())
}
