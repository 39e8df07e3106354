//! Trajectory simulation on the Brownian clock.
//!
//! A path is generated as the Brownian motion `B` behind `U(t) = B(s(t))` and
//! read back through `X(t) = e^{λt}(x0 + εB(s(t)))`. In the `B` picture the
//! events become boundary crossings on the finite interval `[0, 1/(2λ)]`:
//!
//! * `D` (X reaches 0): `B` crosses the flat level `|x0|/ε`;
//! * `E` (X reaches `q₊`): `B` crosses `|x0|/ε + (q₊/ε) e^{-λt}`;
//! * `F` (`x0 + εU(∞) > 0`): `B(1/(2λ)) > |x0|/ε`;
//! * `C` (exit through `q₊`): `E` happens before the left boundary is hit.
//!
//! Grid nodes are equally spaced in `t` and mapped exactly onto the clock; the
//! final node is the clock end `1/(2λ)`. Simulation stops as soon as every
//! flag is decided and `B(1/(2λ))` is drawn in one exact Gaussian step.

mod conditioned;
mod identities;

pub use conditioned::{
    conditioned_exit_times, doob_conditioned_drift, exit_right_probability, sample_conditioned_tau,
    sample_exit_conditioned_htransform, sample_exit_conditioned_rejection, ConditionedBatch,
    ConditionedTau, ConditioningMethod, HTransformDraw, RejectionDraw, GUARD_OFFSET,
};
pub use identities::{
    check_ito_isometry_identity, estimate_equivalence_ratio, horizon_hit_fraction,
    isometry_from_outcomes, q_statistic, EquivalenceEstimate, EventPair, IsometryCheck,
};

use crate::error::{invalid, Result};
use crate::model::{Time, WallModel1D};
use crate::parallel::RunPlan;
use crate::rng::SimRng;

/// Once a path has left through `q₋`, stop when the chance of still reaching
/// 0 later is below `2(1 - Φ(8)) ≈ 1.2e-15`.
const LEFT_EXIT_CUTOFF_Z: f64 = 8.0;

/// Time discretization of a simulated path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    /// Grid steps per unit of model time.
    pub n_steps: u32,
    /// Register level crossings of `|x0|/ε` inside grid cells with the
    /// Brownian-bridge crossing probability.
    pub bridge_correction: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n_steps: 1000,
            bridge_correction: true,
        }
    }
}

impl GridSpec {
    pub fn new(n_steps: u32, bridge_correction: bool) -> Result<Self> {
        if n_steps == 0 {
            return Err(invalid("grid needs at least one step per unit time"));
        }
        Ok(Self {
            n_steps,
            bridge_correction,
        })
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.n_steps as f64
    }

    /// Last regular node; a path still inside the interval there jumps
    /// straight to the clock end.
    pub fn horizon(&self, model: &WallModel1D) -> f64 {
        (40.0 + 2.0 * (1.0 / model.eps()).ln().max(0.0)) / model.lambda()
    }

    /// Heuristic resolution check: per-step displacement `ε√dt` should stay
    /// below a twentieth of the interval.
    pub fn coarseness_warning(&self, model: &WallModel1D) -> Option<String> {
        let step = model.eps() * self.dt().sqrt();
        let width = model.q_plus() - model.q_minus();
        (step > width / 20.0).then(|| {
            format!(
                "grid too coarse: per-step displacement {step:.4} exceeds (q_plus - q_minus)/20 = {:.4}",
                width / 20.0
            )
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitSide {
    Left,
    Right,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EventFlags {
    /// Exit through `q₊`.
    pub c: bool,
    /// `X` reaches 0 at some time.
    pub d: bool,
    /// `X` reaches `q₊` at some time.
    pub e: bool,
    /// `x0 + εU(∞) > 0`.
    pub f: bool,
}

/// What one simulated trajectory did.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathOutcome {
    pub exit_time: Time,
    pub exit_side: ExitSide,
    /// First grid time at which reaching 0 is registered.
    pub tau0: Time,
    /// First grid time at which `X ≥ q₊`.
    pub theta: Time,
    /// `U` at the node where `τ₀` was registered.
    pub u_at_tau0: Option<f64>,
    pub u_at_theta: Option<f64>,
    /// `U(∞) = B(1/(2λ))`.
    pub u_infinity: f64,
    pub flags: EventFlags,
}

/// Crossing probability of a Brownian bridge from `x` to `y` over a cell of
/// clock length `ds` for a level above both endpoints.
#[inline]
fn bridge_crossing_exponent(x: f64, y: f64, level: f64, ds: f64) -> f64 {
    -2.0 * (level - x) * (level - y) / ds
}

pub fn simulate_path(model: &WallModel1D, grid: &GridSpec, rng: &mut SimRng) -> PathOutcome {
    let lambda = model.lambda();
    let eps = model.eps();
    let x0 = model.x0();
    let (q_minus, q_plus) = (model.q_minus(), model.q_plus());
    let level = model.zero_level();
    let characteristic = model.is_characteristic();
    let dt = grid.dt();
    let last_regular = (grid.horizon(model) / dt).ceil() as u64;
    let two_lambda = 2.0 * lambda;

    // g = e^{-λt}; remaining clock = g²/(2λ); cell variance = g_prev² (1 - e^{-2λdt}) / (2λ)
    let decay = (-lambda * dt).exp();
    let cell_sd = (-(-two_lambda * dt).exp_m1() / two_lambda).sqrt();

    let mut b = 0.0;
    let mut g = 1.0;
    let mut tau0: Option<(f64, f64)> = (x0 == 0.0).then_some((0.0, 0.0));
    let mut theta: Option<(f64, f64)> = None;
    let mut exit: Option<(f64, ExitSide)> = None;
    let mut k: u64 = 0;

    let u_infinity = loop {
        k += 1;
        let last = k > last_regular;
        let (t, g_next, ds) = if last {
            (last_regular as f64 * dt, 0.0, g * g / two_lambda)
        } else {
            let sd = g * cell_sd;
            (k as f64 * dt, g * decay, sd * sd)
        };
        let b_next = b + ds.sqrt() * rng.normal();

        let mut crossed_now = false;
        if tau0.is_none() {
            let mut crossed = b_next >= level;
            if !crossed && grid.bridge_correction {
                let expo = bridge_crossing_exponent(b, b_next, level, ds);
                crossed = expo > -40.0 && rng.uniform() < expo.exp();
            }
            if crossed {
                tau0 = Some((t, b_next));
                crossed_now = true;
            }
        }

        let y = x0 + eps * b_next;
        if !characteristic && theta.is_none() && y >= q_plus * g_next {
            theta = Some((t, b_next));
        }
        if exit.is_none() {
            let right = if characteristic {
                crossed_now
            } else {
                y >= q_plus * g_next
            };
            if right {
                exit = Some((t, ExitSide::Right));
            } else if y <= q_minus * g_next {
                exit = Some((t, ExitSide::Left));
            }
        }

        b = b_next;
        g = g_next;
        if last {
            break b;
        }

        let remaining_sd = g / two_lambda.sqrt();
        match exit {
            Some((_, ExitSide::Right)) => break b + remaining_sd * rng.normal(),
            Some((_, ExitSide::Left)) => {
                let pending = tau0.is_none() || (!characteristic && theta.is_none());
                if !pending {
                    break b + remaining_sd * rng.normal();
                }
                if b < level && (level - b) > LEFT_EXIT_CUTOFF_Z * remaining_sd {
                    // Reaching the level again is below the cutoff; draw the end
                    // point on the side consistent with "never reached".
                    break loop {
                        let v = b + remaining_sd * rng.normal();
                        if v < level {
                            break v;
                        }
                    };
                }
            }
            _ => {}
        }
    };

    if characteristic {
        theta = tau0;
    }
    let (exit_time, exit_side) = match exit {
        Some((t, side)) => (Time::Finite(t), side),
        None => (Time::Infinite, ExitSide::None),
    };
    let flags = EventFlags {
        c: exit_side == ExitSide::Right,
        d: tau0.is_some(),
        e: theta.is_some(),
        f: u_infinity > level,
    };
    PathOutcome {
        exit_time,
        exit_side,
        tau0: tau0.map_or(Time::Infinite, |(t, _)| Time::Finite(t)),
        theta: theta.map_or(Time::Infinite, |(t, _)| Time::Finite(t)),
        u_at_tau0: tau0.map(|(_, u)| u),
        u_at_theta: theta.map(|(_, u)| u),
        u_infinity,
        flags,
    }
}

/// Simulates `n_paths` independent trajectories under `plan`.
pub fn simulate_batch(
    model: &WallModel1D,
    grid: &GridSpec,
    plan: &RunPlan,
    n_paths: usize,
) -> Vec<PathOutcome> {
    plan.collect(n_paths, |rng| Ok::<_, ()>(simulate_path(model, grid, rng)))
        .unwrap_or_default()
}
