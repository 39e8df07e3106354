//! Standard Gaussian tail, log-tail and quantiles.
//!
//! The tail is `1 - Φ(x) = erfc(x/√2)/2`. Above `x = 5` it is evaluated through
//! the scaled complementary error function so the logarithm stays accurate long
//! after `1 - Φ` itself underflows.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use crate::error::{Error, Result};

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Scaled complementary error function `erfcx(x) = e^{x²} erfc(x)`.
pub fn erfcx(x: f64) -> f64 {
    if x < 5.0 {
        if x < -26.0 {
            return f64::INFINITY;
        }
        return libm::erfc(x) * (x * x).exp();
    }
    // Laplace continued fraction, evaluated bottom-up:
    // erfcx(x) = (1/√π) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))).
    let terms = if x < 10.0 { 60 } else { 24 };
    let mut tail = x;
    for k in (1..=terms).rev() {
        tail = x + 0.5 * k as f64 / tail;
    }
    FRAC_2_SQRT_PI * 0.5 / tail
}

/// Upper tail `1 - Φ(x)`.
pub fn gaussian_tail(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

/// `Φ(x)`, accurate in the left tail.
pub fn gaussian_cdf(x: f64) -> f64 {
    gaussian_tail(-x)
}

pub fn gaussian_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// `ln(1 - Φ(x))`, finite for every finite `x`.
pub fn log_gaussian_tail(x: f64) -> f64 {
    if x > 5.0 {
        (0.5 * erfcx(x * FRAC_1_SQRT_2)).ln() - 0.5 * x * x
    } else if x < -5.0 {
        (-gaussian_tail(-x)).ln_1p()
    } else {
        gaussian_tail(x).ln()
    }
}

/// Mills ratio `(1 - Φ(x)) / φ(x)`.
pub fn mills_ratio(x: f64) -> f64 {
    (PI / 2.0).sqrt() * erfcx(x * FRAC_1_SQRT_2)
}

// Acklam's rational approximation to Φ^{-1}, relative error below 1.2e-9.
const A: [f64; 6] = [
    -3.969683028665376e+01,
    2.209460984245205e+02,
    -2.759285104469687e+02,
    1.383577518672690e+02,
    -3.066479806614716e+01,
    2.506628277459239e+00,
];
const B: [f64; 5] = [
    -5.447609879822406e+01,
    1.615858368580409e+02,
    -1.556989798598866e+02,
    6.680131188771972e+01,
    -1.328068155288572e+01,
];
const C: [f64; 6] = [
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e+00,
    -2.549732539343734e+00,
    4.374664141464968e+00,
    2.938163982698783e+00,
];
const D: [f64; 4] = [
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e+00,
    3.754408661907416e+00,
];

fn acklam_lower(p: f64) -> f64 {
    let q = (-2.0 * p.ln()).sqrt();
    (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
        / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
}

fn acklam_central(p: f64) -> f64 {
    let q = p - 0.5;
    let r = q * q;
    (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
        / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
}

/// Solves `1 - Φ(x) = p` for `p ∈ (0, 1)`.
///
/// Small `p` is handled directly rather than through `1 - p`, so the result keeps
/// full relative accuracy deep in the upper tail.
pub fn gaussian_tail_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    const P_LOW: f64 = 0.02425;
    let x0 = if p < P_LOW {
        -acklam_lower(p)
    } else if p > 1.0 - P_LOW {
        acklam_lower(1.0 - p)
    } else {
        -acklam_central(p)
    };
    // One Halley step on g(x) = tail(x) - p; g' = -φ, g'' = xφ.
    let err = if x0 > 0.0 {
        gaussian_tail(x0) - p
    } else {
        // 1 - Φ(x0) - p = (1 - p) - Φ(x0) keeps the error small near p = 1.
        (1.0 - p) - gaussian_cdf(x0)
    };
    let u = err / gaussian_pdf(x0);
    Ok(x0 + u / (1.0 + 0.5 * x0 * u))
}

/// `Φ^{-1}(p)`.
pub fn gaussian_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    if p < 0.5 {
        Ok(-gaussian_tail_quantile(p)?)
    } else {
        gaussian_tail_quantile(1.0 - p)
    }
}

/// Solves `ln(1 - Φ(x)) = log_p` for `log_p < 0`, including levels far below
/// the smallest positive double.
pub fn gaussian_tail_quantile_log(log_p: f64) -> Result<f64> {
    if !(log_p < 0.0) {
        return Err(Error::ProbabilityOutOfRange(log_p.exp()));
    }
    if log_p > -600.0 {
        let x = gaussian_tail_quantile(log_p.exp())?;
        if x < 5.0 {
            return Ok(x);
        }
        return Ok(newton_log_tail(x, log_p));
    }
    // Leading-order inversion of ln tail(x) ≈ -x²/2 - ln(x √(2π)).
    let l = -2.0 * log_p;
    let mut x = (l - (l * 2.0 * PI).ln()).sqrt();
    if !x.is_finite() || x <= 0.0 {
        x = l.sqrt();
    }
    Ok(newton_log_tail(x, log_p))
}

fn newton_log_tail(mut x: f64, log_p: f64) -> f64 {
    // d/dx ln tail(x) = -1 / mills(x)
    for _ in 0..50 {
        let step = (log_gaussian_tail(x) - log_p) * mills_ratio(x);
        x += step;
        if step.abs() <= 1e-15 * x.abs() {
            break;
        }
    }
    x
}

/// `2(1 - Φ(x))`, the reflection-principle hitting probability.
pub fn two_sided_tail(x: f64) -> f64 {
    erfc(x / SQRT_2)
}
