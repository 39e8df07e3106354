//! Empirical distributions and Kolmogorov–Smirnov machinery.

use crate::error::{Error, Result};

/// Two-sample KS critical coefficient at the 1% level.
pub const KS_C_1PCT: f64 = 1.628;

/// z-quantile for two-sided 99% normal intervals.
pub const Z_99: f64 = 2.575_829_303_548_901;

/// A sorted sample with its right-continuous ECDF.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSample {
    values: Vec<f64>,
}

impl EmpiricalSample {
    /// Sorts `values`; NaNs are rejected.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidParameter("sample contains NaN".into()));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// `#{x_i ≤ x} / n`.
    pub fn ecdf(&self, x: f64) -> f64 {
        let count = self.values.partition_point(|&v| v <= x);
        count as f64 / self.n() as f64
    }

    /// Empirical quantile by the inverse ECDF.
    pub fn quantile(&self, p: f64) -> f64 {
        let n = self.n();
        let idx = ((p * n as f64).ceil() as usize).clamp(1, n) - 1;
        self.values[idx]
    }

    pub fn median(&self) -> f64 {
        self.quantile(0.5)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.n() as f64
    }

    pub fn variance(&self) -> f64 {
        let n = self.n();
        if n < 2 {
            return 0.0;
        }
        let m = self.mean();
        self.values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1) as f64
    }

    /// Fraction of values strictly below `x`.
    pub fn fraction_below(&self, x: f64) -> f64 {
        self.values.partition_point(|&v| v < x) as f64 / self.n() as f64
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.values.iter().map(|&v| f(v)).collect())
    }
}

/// `sup_x |F_n(x) - F(x)|`, attained at the sample points.
pub fn ks_one_sample(sample: &EmpiricalSample, cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sample.n() as f64;
    sample
        .values()
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let upper = (i + 1) as f64 / n - f;
            let lower = f - i as f64 / n;
            upper.abs().max(lower.abs())
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSampleKs {
    pub statistic: f64,
    pub threshold_1pct: f64,
}

impl TwoSampleKs {
    pub fn passes(&self) -> bool {
        self.statistic < self.threshold_1pct
    }
}

pub fn ks_two_sample(a: &EmpiricalSample, b: &EmpiricalSample) -> TwoSampleKs {
    let (xs, ys) = (a.values(), b.values());
    let (n1, n2) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n1 - j as f64 / n2).abs());
    }
    TwoSampleKs {
        statistic: d,
        threshold_1pct: KS_C_1PCT * ((n1 + n2) / (n1 * n2)).sqrt(),
    }
}

/// Dvoretzky–Kiefer–Wolfowitz bound `sqrt(ln(2/α) / (2n))`.
pub fn dkw_bound(n: usize, alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / (2.0 * n as f64)).sqrt()
}

/// Binomial proportion with a 99% normal-approximation half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Proportion {
    pub hits: u64,
    pub n: u64,
}

impl Proportion {
    pub fn estimate(&self) -> f64 {
        self.hits as f64 / self.n as f64
    }

    pub fn std_error(&self) -> f64 {
        let p = self.estimate();
        (p * (1.0 - p) / self.n as f64).sqrt()
    }

    pub fn ci_halfwidth(&self) -> f64 {
        Z_99 * self.std_error()
    }
}

/// Sample mean with standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
}

impl MeanEstimate {
    pub fn from_values(values: &[f64]) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::EmptySample);
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Ok(Self {
            mean,
            std_error: (var / n as f64).sqrt(),
            n,
        })
    }

    pub fn ci_halfwidth(&self) -> f64 {
        Z_99 * self.std_error
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SimRng;
    use proptest::prelude::*;

    fn sample(v: &[f64]) -> EmpiricalSample {
        EmpiricalSample::new(v.to_vec()).unwrap()
    }

    #[test]
    fn one_sample_examples() {
        assert_eq!(ks_one_sample(&sample(&[0.3]), |_| 0.5), 0.5);
        let d = ks_one_sample(&sample(&[0.1, 0.9]), |x| x.clamp(0.0, 1.0));
        assert!((d - 0.4).abs() < 1e-15);
    }

    #[test]
    fn one_sample_own_law_below_dkw() {
        let mut rng = SimRng::new(21, 0);
        let n = 100_000;
        let s = EmpiricalSample::new((0..n).map(|_| rng.uniform()).collect()).unwrap();
        assert!(ks_one_sample(&s, |x| x.clamp(0.0, 1.0)) < dkw_bound(n, 0.01));
    }

    #[test]
    fn two_sample_examples() {
        let a = sample(&[1.0, 2.0, 3.0]);
        assert_eq!(ks_two_sample(&a, &a).statistic, 0.0);
        let b = sample(&[10.0, 11.0]);
        assert_eq!(ks_two_sample(&a, &b).statistic, 1.0);
        let t = ks_two_sample(&a, &b).threshold_1pct;
        assert!((t - 1.628 * (5.0f64 / 6.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn two_sample_ties_are_handled() {
        let a = sample(&[1.0, 1.0, 2.0]);
        let b = sample(&[1.0, 2.0, 2.0]);
        assert!((ks_two_sample(&a, &b).statistic - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn two_sample_level() {
        // Same Gumbel law, 100 seeded repetitions: the 1% test should reject rarely.
        let mut passes = 0;
        for rep in 0..100 {
            let mut rng = SimRng::new(99, rep);
            let mut draw = |n: usize| {
                EmpiricalSample::new((0..n).map(|_| -(-rng.uniform().ln()).ln()).collect()).unwrap()
            };
            let (a, b) = (draw(10_000), draw(10_000));
            if ks_two_sample(&a, &b).passes() {
                passes += 1;
            }
        }
        assert!(passes >= 95, "{passes}/100");
    }

    #[test]
    fn dkw_examples() {
        assert!((dkw_bound(100_000, 0.01) - 0.005_146_997_846_583_985).abs() < 1e-15);
        let alpha = 2.0 * (-2.0f64).exp();
        assert!((dkw_bound(400, alpha) - 0.05).abs() < 1e-15);
        assert!(dkw_bound(10, 0.05) > dkw_bound(11, 0.05));
    }

    #[test]
    fn empty_rejected() {
        assert_eq!(EmpiricalSample::new(vec![]), Err(Error::EmptySample));
        assert!(EmpiricalSample::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn ecdf_limits() {
        let s = sample(&[-1.0, 0.0, 5.0]);
        assert_eq!(s.ecdf(f64::INFINITY), 1.0);
        assert_eq!(s.ecdf(f64::NEG_INFINITY), 0.0);
        assert_eq!(s.ecdf(0.0), 2.0 / 3.0);
    }

    proptest! {
        #[test]
        fn ks_invariant_under_monotone_maps(xs in proptest::collection::vec(0.001f64..0.999, 1..60)) {
            let s = EmpiricalSample::new(xs.clone()).unwrap();
            let d = ks_one_sample(&s, |x| x.clamp(0.0, 1.0));
            // x ↦ ln(x/(1-x)) with the logistic CDF
            let t = s.map(|x| (x / (1.0 - x)).ln()).unwrap();
            let d2 = ks_one_sample(&t, |y| 1.0 / (1.0 + (-y).exp()));
            prop_assert!((d - d2).abs() < 1e-9);
        }

        #[test]
        fn two_sample_symmetric(xs in proptest::collection::vec(-5.0f64..5.0, 1..40),
                                ys in proptest::collection::vec(-5.0f64..5.0, 1..40)) {
            let (a, b) = (EmpiricalSample::new(xs).unwrap(), EmpiricalSample::new(ys).unwrap());
            prop_assert_eq!(ks_two_sample(&a, &b).statistic, ks_two_sample(&b, &a).statistic);
        }
    }
}
