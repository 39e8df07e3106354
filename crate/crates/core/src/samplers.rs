//! Exact samplers that need no path simulation.

use crate::analytic::{gaussian_tail_quantile_log, log_gaussian_tail, LimitKind, LimitLaw};
use crate::error::{invalid, Result};
use crate::model::WallModel1D;
use crate::rng::SimRng;

/// Below this threshold `N | N > a` is drawn by plain rejection.
pub const TAIL_PROPOSAL_THRESHOLD: f64 = 0.5;

/// Distribution of the initial second coordinate `ξ` in the saddle model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum XiSampler {
    PointMass(f64),
    Uniform01,
    StandardNormal,
    /// `±1` with equal probability.
    Rademacher,
}

impl XiSampler {
    pub fn sample(&self, rng: &mut SimRng) -> f64 {
        match *self {
            XiSampler::PointMass(v) => v,
            XiSampler::Uniform01 => rng.uniform(),
            XiSampler::StandardNormal => rng.normal(),
            XiSampler::Rademacher => {
                if rng.coin() {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }

    pub fn is_symmetric(&self) -> bool {
        matches!(
            self,
            XiSampler::StandardNormal | XiSampler::Rademacher | XiSampler::PointMass(0.0)
        )
    }

    pub fn variance(&self) -> f64 {
        match self {
            XiSampler::PointMass(_) => 0.0,
            XiSampler::Uniform01 => 1.0 / 12.0,
            XiSampler::StandardNormal | XiSampler::Rademacher => 1.0,
        }
    }
}

impl std::str::FromStr for XiSampler {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(XiSampler::Uniform01),
            "normal" | "gaussian" => Ok(XiSampler::StandardNormal),
            "rademacher" | "pm1" => Ok(XiSampler::Rademacher),
            _ => match s.strip_prefix("point:") {
                Some(v) => v
                    .parse()
                    .map(XiSampler::PointMass)
                    .map_err(|_| invalid(format!("bad point mass '{v}'"))),
                None => Err(invalid(format!(
                    "unknown xi sampler '{s}' (uniform, normal, rademacher, point:<value>)"
                ))),
            },
        }
    }
}

impl std::fmt::Display for XiSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            XiSampler::PointMass(v) => write!(f, "point:{v}"),
            XiSampler::Uniform01 => f.write_str("uniform"),
            XiSampler::StandardNormal => f.write_str("normal"),
            XiSampler::Rademacher => f.write_str("rademacher"),
        }
    }
}

/// Draws the overshoot `N - a` of `N | N > a` together with the number of
/// proposals it took.
///
/// For `a ≥ 0.5` the proposal is `a + Exp(α)/α` with the optimal rate
/// `α = (a + √(a² + 4)) / 2`; the overshoot is produced directly, so it keeps
/// full precision even when `a` is large.
pub fn gaussian_tail_overshoot(a: f64, rng: &mut SimRng) -> (f64, u32) {
    let mut proposals = 0;
    if a < TAIL_PROPOSAL_THRESHOLD {
        loop {
            proposals += 1;
            let n = rng.normal();
            if n > a {
                return (n - a, proposals);
            }
        }
    }
    let alpha = 0.5 * (a + (a * a + 4.0).sqrt());
    loop {
        proposals += 1;
        let z = rng.exponential() / alpha;
        let d = a + z - alpha;
        if z > 0.0 && rng.uniform() <= (-0.5 * d * d).exp() {
            return (z, proposals);
        }
    }
}

/// A draw of `N | N > a`.
pub fn sample_gaussian_tail(a: f64, rng: &mut SimRng) -> f64 {
    let (z, _) = gaussian_tail_overshoot(a, rng);
    a + z
}

/// Inverse of the conditional law of `τ₀` given `τ₀ < ∞` at level `u`.
///
/// With `1 - Φ(s) = u (1 - Φ(a))`, so `s ≥ a`, returns `-ln(1 - a²/s²) / (2λ)`.
pub fn tau0_from_uniform(model: &WallModel1D, u: f64) -> Result<f64> {
    let a = model.a();
    if a <= 0.0 {
        return Err(invalid("the hitting time of 0 needs x0 < 0"));
    }
    if !(u > 0.0 && u < 1.0) {
        return Err(crate::error::Error::ProbabilityOutOfRange(u));
    }
    let mut s = gaussian_tail_quantile_log(u.ln() + log_gaussian_tail(a))?;
    if s <= a {
        s = a.next_up();
    }
    // 1 - a²/s² = (s - a)(s + a)/s²
    let log_gap = (s - a).ln() + (s + a).ln() - 2.0 * s.ln();
    Ok(-log_gap / (2.0 * model.lambda()))
}

pub fn sample_tau0_given_hit(model: &WallModel1D, rng: &mut SimRng) -> Result<f64> {
    tau0_from_uniform(model, rng.uniform())
}

/// The residual-life statistic `R = -ln(N - a) - ln a` under `N > a`.
pub fn sample_r(model: &WallModel1D, rng: &mut SimRng) -> Result<f64> {
    sample_r_at(model.a(), rng)
}

pub fn sample_r_at(a: f64, rng: &mut SimRng) -> Result<f64> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(invalid(format!(
            "R needs a positive threshold, got a = {a}"
        )));
    }
    let (z, _) = gaussian_tail_overshoot(a, rng);
    Ok(-z.ln() - a.ln())
}

pub fn sample_limit(law: &LimitLaw, rng: &mut SimRng) -> f64 {
    match law.kind {
        LimitKind::Gumbel => law.location - law.scale * (-rng.uniform().ln()).ln(),
        LimitKind::NegLogAbsNormal => law.location - law.scale * rng.normal().abs().ln(),
        LimitKind::SaddleMixture(mix) => {
            let mut value = 0.0;
            if mix.mixture_term {
                // V = e^{-Z} for standard Gumbel Z, i.e. -ln U.
                let v = -rng.uniform().ln();
                let ratio = mix.mu / mix.lambda;
                let xi = mix.xi.sample(rng);
                value += (v / (2.0 * mix.lambda * mix.q_plus * mix.x1.abs())).powf(ratio) * xi;
            }
            if mix.gaussian_term {
                value += rng.normal() / (2.0 * mix.mu).sqrt();
            }
            value
        }
    }
}
