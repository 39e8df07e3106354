use num_complex::Complex64;
use std::f64::consts::PI;

use super::gamma::complex_log_gamma;
use super::gaussian::{gaussian_tail, gaussian_tail_quantile};
use crate::error::{invalid, Error, Result};
use crate::model::WallModel1D;
use crate::samplers::XiSampler;

/// Which limit statement a [`LimitLaw`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    /// Exit through `q_plus > 0` from `x0 < 0`.
    ExitRight,
    /// Exit through the characteristic boundary `q_plus = 0`.
    Characteristic,
    /// Exit through `q_plus > 0` starting from the saddle `x0 = 0`.
    FromSaddle,
}

impl Theorem {
    pub fn name(self) -> &'static str {
        match self {
            Theorem::ExitRight => "th2",
            Theorem::Characteristic => "th3",
            Theorem::FromSaddle => "th4",
        }
    }
}

/// Rescaled exit-location limit of the two-dimensional saddle.
///
/// Draws `1{mixture} V^{μ/λ} ξ / (2λ q₊ |x₁|)^{μ/λ} + 1{gaussian} N / √(2μ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleMixture {
    pub lambda: f64,
    pub mu: f64,
    pub q_plus: f64,
    pub x1: f64,
    pub mixture_term: bool,
    pub gaussian_term: bool,
    pub xi: XiSampler,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitKind {
    /// `location + scale · Z` with `Z` standard Gumbel.
    Gumbel,
    /// `location + scale · Θ` with `Θ = -ln|N|`.
    NegLogAbsNormal,
    SaddleMixture(SaddleMixture),
}

/// A limiting law together with the `ln(1/ε)` centering the raw statistic
/// needs before it is compared against the law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitLaw {
    pub kind: LimitKind,
    pub location: f64,
    pub scale: f64,
    pub centering_coefficient: f64,
}

impl LimitLaw {
    pub fn gumbel(location: f64, scale: f64, centering_coefficient: f64) -> Result<Self> {
        Self::checked(LimitKind::Gumbel, location, scale, centering_coefficient)
    }

    pub fn neg_log_abs_normal(shift: f64, scale: f64, centering_coefficient: f64) -> Result<Self> {
        Self::checked(
            LimitKind::NegLogAbsNormal,
            shift,
            scale,
            centering_coefficient,
        )
    }

    pub fn saddle_mixture(mixture: SaddleMixture) -> Result<Self> {
        Self::checked(LimitKind::SaddleMixture(mixture), 0.0, 1.0, 0.0)
    }

    fn checked(
        kind: LimitKind,
        location: f64,
        scale: f64,
        centering_coefficient: f64,
    ) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(invalid(format!(
                "limit-law scale must be positive, got {scale}"
            )));
        }
        if !location.is_finite() {
            return Err(invalid(format!(
                "limit-law location must be finite, got {location}"
            )));
        }
        Ok(Self {
            kind,
            location,
            scale,
            centering_coefficient,
        })
    }

    pub fn for_theorem(theorem: Theorem, model: &WallModel1D) -> Result<Self> {
        limit_law_for(theorem, model)
    }

    /// `centering_coefficient · ln(1/ε)`.
    pub fn centering(&self, eps: f64) -> f64 {
        self.centering_coefficient * (1.0 / eps).ln()
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            LimitKind::Gumbel => "gumbel",
            LimitKind::NegLogAbsNormal => "neg-log-abs-normal",
            LimitKind::SaddleMixture(_) => "saddle-mixture",
        }
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        limit_cdf(self, x)
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::ProbabilityOutOfRange(p));
        }
        match self.kind {
            LimitKind::Gumbel => Ok(self.location - self.scale * (-p.ln()).ln()),
            // P(shift + sΘ ≤ x) = 2 tail(e^{-(x - shift)/s})
            LimitKind::NegLogAbsNormal => {
                Ok(self.location - self.scale * gaussian_tail_quantile(0.5 * p)?.ln())
            }
            LimitKind::SaddleMixture(_) => Err(Error::Unsupported {
                law: "saddle-mixture",
                what: "quantile",
            }),
        }
    }

    pub fn cf(&self, t: f64) -> Result<Complex64> {
        limit_cf(self, t)
    }
}

pub fn limit_law_for(theorem: Theorem, model: &WallModel1D) -> Result<LimitLaw> {
    let lambda = model.lambda();
    let x0 = model.x0().abs();
    let q_plus = model.q_plus();
    match theorem {
        Theorem::ExitRight => {
            if q_plus <= 0.0 || x0 == 0.0 {
                return Err(Error::InvalidPairing {
                    theorem: "th2",
                    reason: "requires q_plus > 0 and x0 < 0",
                });
            }
            LimitLaw::gumbel(
                (2.0 * lambda * q_plus * x0).ln() / lambda,
                1.0 / lambda,
                2.0 / lambda,
            )
        }
        Theorem::Characteristic => {
            if x0 == 0.0 {
                return Err(Error::InvalidPairing {
                    theorem: "th3",
                    reason: "requires x0 < 0",
                });
            }
            LimitLaw::gumbel(
                (x0 * x0 * lambda).ln() / (2.0 * lambda),
                0.5 / lambda,
                1.0 / lambda,
            )
        }
        Theorem::FromSaddle => {
            if q_plus <= 0.0 {
                return Err(Error::InvalidPairing {
                    theorem: "th4",
                    reason: "requires q_plus > 0",
                });
            }
            let shift = q_plus.ln() / lambda + (2.0 * lambda).ln() / (2.0 * lambda);
            LimitLaw::neg_log_abs_normal(shift, 1.0 / lambda, 1.0 / lambda)
        }
    }
}

pub fn limit_cdf(law: &LimitLaw, x: f64) -> Result<f64> {
    let z = (x - law.location) / law.scale;
    match law.kind {
        LimitKind::Gumbel => Ok((-(-z).exp()).exp()),
        LimitKind::NegLogAbsNormal => Ok(2.0 * gaussian_tail((-z).exp())),
        LimitKind::SaddleMixture(_) => Err(Error::Unsupported {
            law: "saddle-mixture",
            what: "CDF",
        }),
    }
}

/// Characteristic function `E e^{itX}`.
///
/// Gumbel: `e^{itm} Γ(1 - ist)`. For `c + sΘ`: `e^{itc} E|N|^{-ist}` with
/// `E|N|^p = 2^{p/2} Γ((p+1)/2) / √π`.
pub fn limit_cf(law: &LimitLaw, t: f64) -> Result<Complex64> {
    let i = Complex64::i();
    let phase = (i * t * law.location).exp();
    match law.kind {
        LimitKind::Gumbel => {
            let g = complex_log_gamma(Complex64::new(1.0, -law.scale * t))?;
            Ok(phase * g.exp())
        }
        LimitKind::NegLogAbsNormal => {
            let p = Complex64::new(0.0, -law.scale * t);
            let log_moment = 0.5 * p * std::f64::consts::LN_2 + complex_log_gamma(0.5 * (p + 1.0))?
                - 0.5 * PI.ln();
            Ok(phase * log_moment.exp())
        }
        LimitKind::SaddleMixture(_) => Err(Error::Unsupported {
            law: "saddle-mixture",
            what: "characteristic function",
        }),
    }
}

/// `cf_th2(t) - cf_th3(t) · cf_th4(t)`, which vanishes when the exit-right
/// limit is the convolution of the reach-zero and leave-from-zero limits.
///
/// The centerings agree (`2/λ = 1/λ + 1/λ`), so no `ε` enters.
pub fn convolution_residual(model: &WallModel1D, t: f64) -> Result<Complex64> {
    let th2 = limit_law_for(Theorem::ExitRight, model)?;
    let th3 = limit_law_for(Theorem::Characteristic, model)?;
    let th4 = limit_law_for(Theorem::FromSaddle, model)?;
    Ok(th2.cf(t)? - th3.cf(t)? * th4.cf(t)?)
}
