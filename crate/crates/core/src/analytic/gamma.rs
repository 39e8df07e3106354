//! Complex log-gamma by the Lanczos approximation (g = 7, nine terms).

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

const G: f64 = 7.0;
const COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(z)` on the branch that is real on the positive axis and continuous in
/// the right half-plane; the reflection formula covers `Re z < 1/2`.
pub fn complex_log_gamma(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(Error::Pole(z.re));
    }
    Ok(log_gamma_unchecked(z))
}

fn log_gamma_unchecked(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Γ(z) Γ(1-z) = π / sin(πz)
        let one = Complex64::new(1.0, 0.0);
        return Complex64::new(PI.ln(), 0.0) - (z * PI).sin().ln() - log_gamma_unchecked(one - z);
    }
    let z = z - 1.0;
    let mut series = Complex64::new(COEFFS[0], 0.0);
    for (k, &c) in COEFFS.iter().enumerate().skip(1) {
        series += c / (z + k as f64);
    }
    let t = z + G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + series.ln()
}

pub fn complex_gamma(z: Complex64) -> Result<Complex64> {
    complex_log_gamma(z).map(|l| l.exp())
}

/// Relative error of `Γ(z)Γ(z + 1/2) = 2^{1-2z} √π Γ(2z)` at `z = (1 - it)/2`,
/// the point where the two-stage exit limit factorizes.
pub fn duplication_relative_error(t: f64) -> Result<f64> {
    let z = Complex64::new(0.5, -0.5 * t);
    let lhs = complex_log_gamma(z)? + complex_log_gamma(z + 0.5)?;
    let rhs =
        (1.0 - 2.0 * z) * std::f64::consts::LN_2 + 0.5 * PI.ln() + complex_log_gamma(2.0 * z)?;
    Ok((lhs.exp() - rhs.exp()).norm() / complex_gamma(2.0 * z)?.norm())
}
