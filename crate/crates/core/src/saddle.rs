//! Exit location of the two-dimensional linear saddle
//! `dX¹ = λX¹ dt + ε dW¹`, `dX² = -μX² dt + ε dW²` conditioned to leave the
//! strip `q₋ < X¹ < q₊` through `q₊`.
//!
//! The coordinates are independent and only the first is conditioned, so the
//! exit time comes from the one-dimensional machinery and the second
//! coordinate at that time is sampled exactly:
//! `X²(τ) = e^{-μτ} ε^α ξ + ε √((1 - e^{-2μτ})/(2μ)) N`.

use std::fmt;

use crate::analytic::{LimitLaw, SaddleMixture};
use crate::error::{invalid, Result};
use crate::model::WallModel1D;
use crate::parallel::RunPlan;
use crate::path::{sample_conditioned_tau, ConditioningMethod};
use crate::rng::SimRng;
use crate::samplers::XiSampler;
use crate::stats::{EmpiricalSample, MeanEstimate};

/// Tolerance on `2μ/λ + α = 1` for the intermediate regime.
const REGIME_TOL: f64 = 1e-12;

/// Which term survives in the rescaled exit-location limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `2μ/λ + α > 1`: only the Gaussian term.
    GaussianOnly,
    /// `2μ/λ + α < 1`: only the initial-condition term.
    MixtureOnly,
    /// `2μ/λ + α = 1`: both, independently.
    Intermediate,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::GaussianOnly => "gaussian-only",
            Regime::MixtureOnly => "mixture-only",
            Regime::Intermediate => "intermediate",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleModel2D {
    lambda: f64,
    mu: f64,
    eps: f64,
    x1: f64,
    alpha: f64,
    xi: XiSampler,
    q_minus: f64,
    q_plus: f64,
}

impl SaddleModel2D {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        lambda: f64,
        mu: f64,
        eps: f64,
        x1: f64,
        alpha: f64,
        xi: XiSampler,
        q_minus: f64,
        q_plus: f64,
    ) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(invalid(format!("mu must be positive, got {mu}")));
        }
        if !alpha.is_finite() {
            return Err(invalid(format!("alpha must be finite, got {alpha}")));
        }
        if !(x1 < 0.0 && q_plus > 0.0) {
            return Err(invalid("saddle start needs x1 < 0 < q_plus"));
        }
        // validates λ, ε and the strip ordering
        WallModel1D::new(lambda, eps, x1, q_minus, q_plus)?;
        Ok(Self {
            lambda,
            mu,
            eps,
            x1,
            alpha,
            xi,
            q_minus,
            q_plus,
        })
    }

    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        Self::new(
            self.lambda,
            self.mu,
            eps,
            self.x1,
            self.alpha,
            self.xi,
            self.q_minus,
            self.q_plus,
        )
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn eps(&self) -> f64 {
        self.eps
    }
    pub fn x1(&self) -> f64 {
        self.x1
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn xi(&self) -> XiSampler {
        self.xi
    }

    /// `2μ/λ + α`.
    pub fn critical_sum(&self) -> f64 {
        2.0 * self.mu / self.lambda + self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta_exponent().0
    }

    pub fn beta_exponent(&self) -> (f64, Regime) {
        let s = self.critical_sum();
        let regime = if (s - 1.0).abs() <= REGIME_TOL {
            Regime::Intermediate
        } else if s > 1.0 {
            Regime::GaussianOnly
        } else {
            Regime::MixtureOnly
        };
        (s.min(1.0), regime)
    }

    /// The first coordinate as a one-dimensional wall model.
    pub fn first_coordinate(&self) -> WallModel1D {
        WallModel1D::new(self.lambda, self.eps, self.x1, self.q_minus, self.q_plus)
            .expect("validated at construction")
    }

    /// `e^{-μτ} ε^α ξ + ε √((1 - e^{-2μτ})/(2μ)) N`.
    pub fn x2_exit_from(&self, tau: f64, xi: f64, normal: f64) -> f64 {
        let memory = (-self.mu * tau).exp() * self.eps.powf(self.alpha) * xi;
        let spread = (-(-2.0 * self.mu * tau).exp_m1() / (2.0 * self.mu)).sqrt();
        memory + self.eps * spread * normal
    }

    /// Limit of `X²(τ)/ε^β` given a right exit.
    pub fn limit_law(&self) -> Result<LimitLaw> {
        let (_, regime) = self.beta_exponent();
        LimitLaw::saddle_mixture(SaddleMixture {
            lambda: self.lambda,
            mu: self.mu,
            q_plus: self.q_plus,
            x1: self.x1,
            mixture_term: regime != Regime::GaussianOnly,
            gaussian_term: regime != Regime::MixtureOnly,
            xi: self.xi,
        })
    }
}

/// One conditioned saddle exit with the random inputs that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleDraw {
    pub tau: f64,
    pub xi: f64,
    pub normal: f64,
    pub x2_exit: f64,
    pub attempts: u64,
}

pub fn sample_saddle_exit_conditioned(
    params: &SaddleModel2D,
    rng: &mut SimRng,
    method: &ConditioningMethod,
) -> Result<SaddleDraw> {
    let c = sample_conditioned_tau(&params.first_coordinate(), method, rng)?;
    let xi = params.xi.sample(rng);
    let normal = rng.normal();
    Ok(SaddleDraw {
        tau: c.tau,
        xi,
        normal,
        x2_exit: params.x2_exit_from(c.tau, xi, normal),
        attempts: c.attempts,
    })
}

pub fn saddle_exit_batch(
    params: &SaddleModel2D,
    plan: &RunPlan,
    n: usize,
    method: &ConditioningMethod,
) -> Result<Vec<SaddleDraw>> {
    plan.collect(n, |rng| sample_saddle_exit_conditioned(params, rng, method))
}

/// `n` draws of `X²(τ)/ε^β` and the total attempts spent.
pub fn rescaled_exit_sample(
    params: &SaddleModel2D,
    plan: &RunPlan,
    n: usize,
    method: &ConditioningMethod,
) -> Result<(EmpiricalSample, u64)> {
    let draws = saddle_exit_batch(params, plan, n, method)?;
    let scale = params.eps.powf(params.beta());
    let attempts = draws.iter().map(|d| d.attempts).sum();
    let sample = EmpiricalSample::new(draws.iter().map(|d| d.x2_exit / scale).collect())?;
    Ok((sample, attempts))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfPoint {
    pub r: f64,
    pub estimate: f64,
    pub std_error: f64,
    /// `e^{-r²/(4μ)}`.
    pub target: f64,
}

impl CfPoint {
    pub fn deviation(&self) -> f64 {
        (self.estimate - self.target).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CfCheck {
    pub points: Vec<CfPoint>,
    pub max_deviation: f64,
}

impl CfCheck {
    /// Standard error at the point of largest deviation.
    pub fn max_deviation_std_error(&self) -> f64 {
        self.points
            .iter()
            .max_by(|a, b| a.deviation().total_cmp(&b.deviation()))
            .map_or(0.0, |p| p.std_error)
    }
}

/// Compares `E[exp(-r²(1 - e^{-2μτ})/(4μ)) | C]` over conditioned exit times
/// with its limit `e^{-r²/(4μ)}`.
pub fn conditional_cf_from_taus(mu: f64, taus: &[f64], r_grid: &[f64]) -> Result<CfCheck> {
    let mut points = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let k = r * r / (4.0 * mu);
        let values: Vec<f64> = taus
            .iter()
            .map(|&t| (k * (-2.0 * mu * t).exp_m1()).exp())
            .collect();
        let m = MeanEstimate::from_values(&values)?;
        points.push(CfPoint {
            r,
            estimate: m.mean,
            std_error: m.std_error,
            target: (-k).exp(),
        });
    }
    let max_deviation = points.iter().map(CfPoint::deviation).fold(0.0, f64::max);
    Ok(CfCheck {
        points,
        max_deviation,
    })
}

pub fn conditional_cf_check(
    params: &SaddleModel2D,
    plan: &RunPlan,
    n: usize,
    r_grid: &[f64],
    method: &ConditioningMethod,
) -> Result<CfCheck> {
    let draws = saddle_exit_batch(params, plan, n, method)?;
    let taus: Vec<f64> = draws.iter().map(|d| d.tau).collect();
    conditional_cf_from_taus(params.mu, &taus, r_grid)
}
