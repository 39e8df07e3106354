//! Closed-form probabilities, limit laws and their characteristic functions.

pub mod gamma;
pub mod gaussian;
pub mod limit;

pub use gamma::{complex_gamma, complex_log_gamma, duplication_relative_error};
pub use gaussian::{
    erfc, erfcx, gaussian_cdf, gaussian_pdf, gaussian_quantile, gaussian_tail,
    gaussian_tail_quantile, gaussian_tail_quantile_log, log_gaussian_tail, mills_ratio,
    two_sided_tail,
};
pub use limit::{
    convolution_residual, limit_cdf, limit_cf, limit_law_for, LimitKind, LimitLaw, SaddleMixture,
    Theorem,
};

use crate::error::{Error, Result};
use crate::model::{Time, WallModel1D};

/// Probability that `εU` reaches `z` during `[0, r)`:
/// `2(1 - Φ(|z| √(2λ) / (ε √(1 - e^{-2λr}))))` by the reflection principle.
pub fn hit_probability(model: &WallModel1D, z: f64, r: Time) -> Result<f64> {
    let lambda = model.lambda();
    let frac = match r {
        Time::Infinite => 1.0,
        Time::Finite(r) if r < 0.0 || r.is_nan() => return Err(Error::NegativeTime(r)),
        Time::Finite(0.0) => return Ok(0.0),
        Time::Finite(r) => -(-2.0 * lambda * r).exp_m1(),
    };
    if z == 0.0 {
        return Ok(1.0);
    }
    Ok(two_sided_tail(
        z.abs() * (2.0 * lambda).sqrt() / (model.eps() * frac.sqrt()),
    ))
}

/// `P(τ₀ ≤ t | τ₀ < ∞) = (1 - Φ(a / √(1 - e^{-2λt}))) / (1 - Φ(a))`.
///
/// Evaluated as a difference of log-tails so the ratio survives when both
/// tails underflow.
pub fn conditional_tau0_cdf(model: &WallModel1D, t: Time) -> Result<f64> {
    let t = match t {
        Time::Infinite => return Ok(1.0),
        Time::Finite(t) if t < 0.0 || t.is_nan() => return Err(Error::NegativeTime(t)),
        Time::Finite(t) => t,
    };
    if t == 0.0 {
        return Ok(0.0);
    }
    let a = model.a();
    let frac = -(-2.0 * model.lambda() * t).exp_m1();
    let ratio = (log_gaussian_tail(a / frac.sqrt()) - log_gaussian_tail(a)).exp();
    Ok(ratio.min(1.0))
}
