//! Summary statistics for repeated-run success indicators.

use serde::{Deserialize, Serialize};

pub fn mean(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        None
    } else {
        Some(xs.iter().sum::<f64>() / xs.len() as f64)
    }
}

/// Sample standard deviation (Bessel-corrected, `n - 1` denominator).
/// Zero for fewer than two samples.
pub fn sample_std(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let m = xs.iter().sum::<f64>() / n as f64;
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (n - 1) as f64).sqrt()
}

/// Mean, sample σ and the `mean ± 2σ` band of a set of 0/1 outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuccessSummary {
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    pub band_lo: f64,
    pub band_hi: f64,
}

impl SuccessSummary {
    pub fn from_flags(flags: &[bool]) -> Option<Self> {
        let xs: Vec<f64> = flags.iter().map(|&f| if f { 1.0 } else { 0.0 }).collect();
        let mean = mean(&xs)?;
        let std = sample_std(&xs);
        Some(Self {
            n: xs.len(),
            mean,
            std,
            band_lo: mean - 2.0 * std,
            band_hi: mean + 2.0 * std,
        })
    }

    pub fn contains(&self, rate: f64) -> bool {
        rate >= self.band_lo && rate <= self.band_hi
    }
}

/// Outcome of comparing a candidate success rate against a baseline band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BandComparison {
    Above,
    Within,
    Below,
}

pub fn compare_to_band(baseline: &SuccessSummary, rate: f64) -> BandComparison {
    if rate > baseline.band_hi {
        BandComparison::Above
    } else if rate < baseline.band_lo {
        BandComparison::Below
    } else {
        BandComparison::Within
    }
}

/// One-sided two-proportion z statistic for `a > b`, pooled variance.
/// Returns 0 when both proportions are degenerate at the same value.
pub fn two_proportion_z(successes_a: usize, n_a: usize, successes_b: usize, n_b: usize) -> f64 {
    let pa = successes_a as f64 / n_a as f64;
    let pb = successes_b as f64 / n_b as f64;
    let pooled = (successes_a + successes_b) as f64 / (n_a + n_b) as f64;
    let var = pooled * (1.0 - pooled) * (1.0 / n_a as f64 + 1.0 / n_b as f64);
    if var <= 0.0 {
        return 0.0;
    }
    (pa - pb) / var.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_successes() {
        let s = SuccessSummary::from_flags(&[true; 50]).unwrap();
        assert_eq!(s.mean, 1.0);
        assert_eq!(s.std, 0.0);
    }

    #[test]
    fn half_successes_matches_binomial_sample_std() {
        let flags: Vec<bool> = (0..50).map(|i| i < 25).collect();
        let s = SuccessSummary::from_flags(&flags).unwrap();
        assert_eq!(s.mean, 0.5);
        // Σ(x - 0.5)² = 50 · 0.25, divided by 49.
        let expected = 0.5 * (50.0f64 / 49.0).sqrt();
        assert!((s.std - expected).abs() < 1e-12);
        assert!((s.band_hi - (0.5 + 2.0 * expected)).abs() < 1e-12);
    }

    #[test]
    fn empty_has_no_summary() {
        assert!(SuccessSummary::from_flags(&[]).is_none());
        assert_eq!(sample_std(&[3.0]), 0.0);
    }

    #[test]
    fn band_comparison() {
        let flags: Vec<bool> = (0..50).map(|i| i < 25).collect();
        let s = SuccessSummary::from_flags(&flags).unwrap();
        assert_eq!(compare_to_band(&s, 0.5), BandComparison::Within);
        assert_eq!(compare_to_band(&s, 2.0), BandComparison::Above);
        assert_eq!(compare_to_band(&s, -1.0), BandComparison::Below);
    }

    #[test]
    fn z_statistic_sign() {
        assert!(two_proportion_z(40, 50, 20, 50) > 3.0);
        assert!(two_proportion_z(20, 50, 40, 50) < -3.0);
        assert_eq!(two_proportion_z(50, 50, 50, 50), 0.0);
    }
}
