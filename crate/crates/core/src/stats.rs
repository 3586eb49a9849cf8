//! Interval estimates and goodness-of-fit checks for simulation output.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.96;

/// Point estimate with a 95% confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub half_width: f64,
}

impl Estimate {
    /// Standard error implied by the half-width.
    pub fn sigma(&self) -> f64 {
        self.half_width / Z95
    }

    pub fn within_sigmas(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.sigma()
    }

    pub fn contains(&self, target: f64) -> bool {
        (self.value - target).abs() <= self.half_width
    }
}

/// Binomial proportion `successes / trials`; NaN when there are no trials.
pub fn proportion(successes: u64, trials: u64) -> Estimate {
    if trials == 0 {
        return Estimate {
            value: f64::NAN,
            half_width: f64::NAN,
        };
    }
    let n = trials as f64;
    let v = successes as f64 / n;
    Estimate {
        value: v,
        half_width: Z95 * (v * (1.0 - v) / n).sqrt(),
    }
}

/// Sample mean from exact integer moments.
pub fn mean_from_moments(n: u64, sum: u128, sum_sq: u128) -> Estimate {
    if n == 0 {
        return Estimate {
            value: f64::NAN,
            half_width: f64::NAN,
        };
    }
    let nf = n as f64;
    let mean = sum as f64 / nf;
    let var = if n > 1 {
        // Exact in integers before the single conversion.
        let num = (n as u128) * sum_sq - sum * sum;
        num as f64 / (nf * (nf - 1.0))
    } else {
        0.0
    };
    Estimate {
        value: mean,
        half_width: Z95 * (var / nf).sqrt(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Observed and expected counts per bin; the last bin is the open tail.
    pub observed: Vec<u64>,
    pub expected: Vec<f64>,
}

impl ChiSquareTest {
    pub fn passes(&self, significance: f64) -> bool {
        self.p_value > significance
    }
}

/// Minimum expected count per bin.
const MIN_EXPECTED: f64 = 5.0;

/// Pearson test of `counts` (each >= 1) against Geometric(`gamma`) on
/// `{1, 2, ...}`, binning individual values while every bin keeps an
/// expected count of at least 5 and lumping the rest into an open tail.
pub fn geometric_chi_square(counts: &[u64], gamma: f64) -> Result<ChiSquareTest> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Degenerate(format!("geometric law with gamma = {gamma}")));
    }
    if counts.contains(&0) {
        return Err(Error::invalid("counts", "iteration counts start at 1"));
    }
    let n = counts.len() as f64;
    let survive = |k: u64| (1.0 - gamma).powf(k as f64);
    // Individual bins 1..=m, tail k > m.
    let mut m: u64 = 1;
    while n * gamma * survive(m) >= MIN_EXPECTED && n * survive(m + 1) >= MIN_EXPECTED {
        m += 1;
    }
    if n * gamma < MIN_EXPECTED || n * survive(m) < MIN_EXPECTED {
        return Err(Error::invalid("counts", "too few samples for a chi-square test"));
    }
    let mut observed = vec![0u64; m as usize + 1];
    for &c in counts {
        let bin = (c.min(m + 1) - 1) as usize;
        observed[bin] += 1;
    }
    let mut expected: Vec<f64> = (1..=m).map(|k| n * gamma * survive(k - 1)).collect();
    expected.push(n * survive(m));
    let statistic = observed
        .iter()
        .zip(&expected)
        .map(|(&o, &e)| {
            let d = o as f64 - e;
            d * d / e
        })
        .sum();
    let dof = observed.len() - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::invalid("dof", e.to_string()))?;
    Ok(ChiSquareTest {
        statistic,
        dof,
        p_value: 1.0 - dist.cdf(statistic),
        observed,
        expected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn proportion_interval() {
        let e = proportion(600, 1000);
        assert_eq!(e.value, 0.6);
        assert!((e.half_width - 1.96 * (0.24f64 / 1000.0).sqrt()).abs() < 1e-15);
        assert!(proportion(0, 0).value.is_nan());
    }

    #[test]
    fn moments() {
        let xs = [1u64, 2, 3, 4];
        let sum: u128 = xs.iter().map(|&x| x as u128).sum();
        let sq: u128 = xs.iter().map(|&x| (x * x) as u128).sum();
        let e = mean_from_moments(4, sum, sq);
        assert_eq!(e.value, 2.5);
        // sample variance 5/3
        assert!((e.half_width - 1.96 * (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn exact_geometric_sample_passes() {
        // Counts laid out exactly at their expectations.
        let gamma: f64 = 0.25;
        let n = 100_000usize;
        let mut counts = Vec::with_capacity(n);
        let mut k = 1u64;
        while counts.len() < n {
            let want = (n as f64 * gamma * (1.0 - gamma).powi(k as i32 - 1)).round() as usize;
            for _ in 0..want.max(1) {
                if counts.len() < n {
                    counts.push(k);
                }
            }
            k += 1;
        }
        let t = geometric_chi_square(&counts, gamma).unwrap();
        assert!(t.passes(0.001), "{t:?}");
        assert_eq!(t.observed.iter().sum::<u64>(), n as u64);
    }

    #[test]
    fn wrong_law_fails() {
        let counts = vec![1u64; 5000].into_iter().chain(vec![2u64; 5000]).collect::<Vec<_>>();
        let t = geometric_chi_square(&counts, 0.25).unwrap();
        assert!(!t.passes(0.001));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(geometric_chi_square(&[1, 2, 3], 0.0).is_err());
        assert!(geometric_chi_square(&[0, 1], 0.5).is_err());
        assert!(geometric_chi_square(&[1, 2], 0.5).is_err());
    }
}
