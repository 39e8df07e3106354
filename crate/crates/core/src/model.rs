//! The linear one-dimensional wall problem and its Brownian-clock representation.
//!
//! The solution of `dX = λX dt + ε dW`, `X(0) = x0` is
//! `X(t) = e^{λt} (x0 + ε U(t))` with `U(t) = B(s(t))` for a standard Brownian
//! motion `B` and the clock `s(t) = (1 - e^{-2λt}) / (2λ)`. The clock maps the
//! whole half-line onto `[0, 1/(2λ)]`, so events that need information at
//! `t = ∞` are decided on a compact interval.

use crate::error::{invalid, Error, Result};

/// A time on `[0, ∞]`; `Infinite` marks hitting times that never occur.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum Time {
    Finite(f64),
    Infinite,
}

impl Time {
    pub fn is_finite(self) -> bool {
        matches!(self, Time::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Time::Finite(t) => Some(t),
            Time::Infinite => None,
        }
    }

    /// Strict comparison `self < r` with `∞ < ∞` false.
    pub fn before(self, r: Time) -> bool {
        match (self, r) {
            (Time::Finite(a), Time::Finite(b)) => a < b,
            (Time::Finite(_), Time::Infinite) => true,
            (Time::Infinite, _) => false,
        }
    }
}

impl From<f64> for Time {
    fn from(t: f64) -> Self {
        if t == f64::INFINITY {
            Time::Infinite
        } else {
            Time::Finite(t)
        }
    }
}

/// The linear problem instance: drift `λx`, noise `ε`, start `x0`, exit
/// interval `(q_minus, q_plus)`.
///
/// `q_plus = 0` is the characteristic-boundary case; `x0 = 0` is allowed so the
/// start-at-the-saddle limit can be simulated, every operation that needs a
/// genuine wall checks `x0 < 0` itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallModel1D {
    lambda: f64,
    eps: f64,
    x0: f64,
    q_minus: f64,
    q_plus: f64,
    a: f64,
}

impl WallModel1D {
    pub fn new(lambda: f64, eps: f64, x0: f64, q_minus: f64, q_plus: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(invalid(format!("lambda must be positive, got {lambda}")));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(invalid(format!("eps must be positive, got {eps}")));
        }
        if !(q_minus.is_finite() && q_plus.is_finite() && x0.is_finite()) {
            return Err(invalid("positions must be finite"));
        }
        if !(q_minus < x0 && x0 <= 0.0 && q_plus >= 0.0) {
            return Err(invalid(format!(
                "need q_minus < x0 <= 0 <= q_plus, got q_minus={q_minus}, x0={x0}, q_plus={q_plus}"
            )));
        }
        if x0 == 0.0 && q_plus == 0.0 {
            return Err(invalid("x0 = 0 needs q_plus > 0"));
        }
        let a = x0.abs() * (2.0 * lambda).sqrt() / eps;
        Ok(Self {
            lambda,
            eps,
            x0,
            q_minus,
            q_plus,
            a,
        })
    }

    /// Same geometry at a different noise level.
    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        Self::new(self.lambda, eps, self.x0, self.q_minus, self.q_plus)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn eps(&self) -> f64 {
        self.eps
    }
    pub fn x0(&self) -> f64 {
        self.x0
    }
    pub fn q_minus(&self) -> f64 {
        self.q_minus
    }
    pub fn q_plus(&self) -> f64 {
        self.q_plus
    }

    /// Tail threshold `a = |x0| sqrt(2λ) / ε`; reaching 0 ever is `{N > a}` up to reflection.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// Level of `B` at which `X` reaches 0, i.e. `|x0| / ε`.
    pub fn zero_level(&self) -> f64 {
        self.x0.abs() / self.eps
    }

    pub fn is_characteristic(&self) -> bool {
        self.q_plus == 0.0
    }

    pub fn clock(&self) -> BrownianClock {
        BrownianClock {
            lambda: self.lambda,
        }
    }

    pub fn drift(&self, x: f64) -> f64 {
        drift_1d(self, x)
    }

    pub fn time_change(&self, t: Time) -> Result<f64> {
        time_change(self, t)
    }

    pub fn path_position(&self, u: f64, t: f64) -> f64 {
        path_position(self, u, t)
    }
}

/// Deterministic time change `s(t) = (1 - e^{-2λt}) / (2λ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrownianClock {
    lambda: f64,
}

impl BrownianClock {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(invalid(format!("lambda must be positive, got {lambda}")));
        }
        Ok(Self { lambda })
    }

    pub fn s_max(&self) -> f64 {
        0.5 / self.lambda
    }

    pub fn s(&self, t: f64) -> f64 {
        -(-2.0 * self.lambda * t).exp_m1() / (2.0 * self.lambda)
    }

    /// Clock time still left after `t`, `s_max - s(t) = e^{-2λt} / (2λ)`,
    /// computed without cancellation.
    pub fn remaining(&self, t: f64) -> f64 {
        (-2.0 * self.lambda * t).exp() / (2.0 * self.lambda)
    }

    /// Inverse clock `t(s) = -ln(1 - 2λs) / (2λ)`; `s_max` maps to `∞`.
    pub fn inverse(&self, s: f64) -> Result<Time> {
        if !(0.0..=self.s_max()).contains(&s) {
            return Err(invalid(format!(
                "clock time {s} outside [0, {}]",
                self.s_max()
            )));
        }
        if s == self.s_max() {
            return Ok(Time::Infinite);
        }
        Ok(Time::Finite(
            -(-2.0 * self.lambda * s).ln_1p() / (2.0 * self.lambda),
        ))
    }
}

pub fn drift_1d(model: &WallModel1D, x: f64) -> f64 {
    model.lambda * x
}

pub fn time_change(model: &WallModel1D, t: Time) -> Result<f64> {
    let clock = model.clock();
    match t {
        Time::Infinite => Ok(clock.s_max()),
        Time::Finite(t) if t < 0.0 || t.is_nan() => Err(Error::NegativeTime(t)),
        Time::Finite(t) => Ok(clock.s(t)),
    }
}

/// `X(t) = e^{λt} (x0 + ε u)` for a value `u` of `U(t)`.
pub fn path_position(model: &WallModel1D, u: f64, t: f64) -> f64 {
    (model.lambda * t).exp() * (model.x0 + model.eps * u)
}
