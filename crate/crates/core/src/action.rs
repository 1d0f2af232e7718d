//! Continuous actions and their per-dimension bounds.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Stream;

/// Closed interval `[lo, hi]` for one action dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    /// Maps `x` to `[0, 1]`; a degenerate interval maps everything to 0.
    pub fn normalize(&self, x: f64) -> f64 {
        let w = self.width();
        if w > 0.0 {
            (x - self.lo) / w
        } else {
            0.0
        }
    }
}

/// Per-dimension bounds of an action space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionBounds(pub Vec<Interval>);

impl ActionBounds {
    pub fn new(intervals: Vec<Interval>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        for (dim, iv) in intervals.iter().enumerate() {
            if !(iv.lo.is_finite() && iv.hi.is_finite()) || iv.lo > iv.hi {
                return Err(Error::InvertedBounds {
                    dim,
                    lo: iv.lo,
                    hi: iv.hi,
                });
            }
        }
        Ok(Self(intervals))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.0
    }

    /// Checks dimension and containment of `action`.
    pub fn check(&self, action: &ContinuousAction) -> Result<()> {
        if action.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: action.dim(),
            });
        }
        for (dim, (&v, iv)) in action.values().iter().zip(&self.0).enumerate() {
            if !iv.contains(v) {
                return Err(Error::ActionOutOfBounds {
                    dim,
                    value: v,
                    lo: iv.lo,
                    hi: iv.hi,
                });
            }
        }
        Ok(())
    }

    /// Per-dimension min-max scaling of `action` into the unit cube.
    pub fn normalize(&self, action: &ContinuousAction) -> Vec<f64> {
        action
            .values()
            .iter()
            .zip(&self.0)
            .map(|(&v, iv)| iv.normalize(v))
            .collect()
    }
}

/// A point in a continuous action space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuousAction(Vec<f64>);

impl ContinuousAction {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl From<Vec<f64>> for ContinuousAction {
    fn from(values: Vec<f64>) -> Self {
        Self(values)
    }
}

impl fmt::Display for ContinuousAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{v:.4}")?;
        }
        write!(f, ")")
    }
}

/// Draws one action uniformly from `bounds`, one stream draw per dimension.
pub fn sample_action(bounds: &[Interval], rng: &mut Stream) -> Result<ContinuousAction> {
    for (dim, iv) in bounds.iter().enumerate() {
        if iv.lo > iv.hi {
            return Err(Error::InvertedBounds {
                dim,
                lo: iv.lo,
                hi: iv.hi,
            });
        }
    }
    Ok(ContinuousAction(
        bounds.iter().map(|iv| rng.uniform(iv.lo, iv.hi)).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{derive_stream, StreamKey};

    #[test]
    fn degenerate_interval_samples_the_point() {
        let mut rng = derive_stream(&StreamKey::new(0));
        let a = sample_action(&[Interval::new(0.0, 0.0)], &mut rng).unwrap();
        assert_eq!(a.values(), &[0.0]);
    }

    #[test]
    fn sampling_is_reproducible() {
        let bounds = [Interval::new(0.0, 1.0), Interval::new(-1.0, 1.0)];
        let key = StreamKey::new(11);
        let a = sample_action(&bounds, &mut derive_stream(&key)).unwrap();
        let b = sample_action(&bounds, &mut derive_stream(&key)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sampling_consumes_one_draw_per_dimension() {
        let bounds = [Interval::new(0.0, 1.0); 3];
        let key = StreamKey::new(5);
        let mut a = derive_stream(&key);
        sample_action(&bounds, &mut a).unwrap();
        let mut b = derive_stream(&key);
        for _ in 0..3 {
            b.next_u64();
        }
        assert_eq!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn inverted_bounds_rejected() {
        let mut rng = derive_stream(&StreamKey::new(0));
        let err = sample_action(&[Interval::new(1.0, 0.0)], &mut rng).unwrap_err();
        assert!(matches!(err, Error::InvertedBounds { dim: 0, .. }));
        assert!(ActionBounds::new(vec![Interval::new(2.0, 1.0)]).is_err());
    }

    #[test]
    fn empirical_mean_of_unit_interval() {
        let mut rng = derive_stream(&StreamKey::new(99).child("lln", 0));
        let n = 100_000;
        let sum: f64 = (0..n)
            .map(|_| sample_action(&[Interval::new(0.0, 1.0)], &mut rng).unwrap().values()[0])
            .sum();
        assert!((sum / n as f64 - 0.5).abs() < 0.01);
    }

    #[test]
    fn check_rejects_out_of_bounds() {
        let b = ActionBounds::new(vec![Interval::new(0.0, 1.0)]).unwrap();
        assert!(b.check(&ContinuousAction::new(vec![0.5])).is_ok());
        assert!(b.check(&ContinuousAction::new(vec![1.5])).is_err());
        assert!(b.check(&ContinuousAction::new(vec![0.5, 0.5])).is_err());
    }
}
