use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tunable constants of a search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    /// UCT exploration constant `c`.
    pub uct_exploration_c: f64,
    /// Progressive widening coefficient: `|A(s)| <= floor(k · N(s)^alpha)`.
    pub pw_coefficient: f64,
    /// Progressive widening exponent `alpha`, in `[0, 1]`.
    pub pw_exponent: f64,
    /// RBF kernel bandwidth on min-max normalized actions.
    pub kernel_bandwidth: f64,
    pub discount_factor: f64,
    /// Maximum search depth below the root, in steps.
    pub planning_horizon: usize,
    pub iteration_budget: usize,
    /// Actions sampled on a node's first visit.
    pub initial_action_count: usize,
    /// Kernel values below this are ignored. `1.0` switches similarity
    /// sharing off entirely.
    pub similarity_floor: f64,
    pub rng_seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            uct_exploration_c: 1.0,
            pw_coefficient: 1.0,
            pw_exponent: 0.5,
            kernel_bandwidth: 50.0,
            discount_factor: 1.0,
            planning_horizon: 10,
            iteration_budget: 1000,
            initial_action_count: 1,
            similarity_floor: 1e-4,
            rng_seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::InvalidConfig(msg.to_owned()));
        if !(self.uct_exploration_c.is_finite() && self.uct_exploration_c >= 0.0) {
            return fail("uct_exploration_c must be finite and >= 0");
        }
        if !(self.pw_coefficient.is_finite() && self.pw_coefficient > 0.0) {
            return fail("pw_coefficient must be > 0");
        }
        if !(0.0..=1.0).contains(&self.pw_exponent) {
            return fail("pw_exponent must lie in [0, 1]");
        }
        if !(self.kernel_bandwidth.is_finite() && self.kernel_bandwidth > 0.0) {
            return fail("kernel_bandwidth must be > 0");
        }
        if !(self.discount_factor > 0.0 && self.discount_factor <= 1.0) {
            return fail("discount_factor must lie in (0, 1]");
        }
        if self.planning_horizon == 0 {
            return fail("planning_horizon must be >= 1");
        }
        if self.iteration_budget == 0 {
            return fail("iteration_budget must be >= 1");
        }
        if self.initial_action_count == 0 {
            return fail("initial_action_count must be >= 1");
        }
        if !(0.0..=1.0).contains(&self.similarity_floor) {
            return fail("similarity_floor must lie in [0, 1]");
        }
        Ok(())
    }

    /// Validated copy, for builder-style construction.
    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn similarity_enabled(&self) -> bool {
        self.similarity_floor < 1.0
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.iteration_budget = budget;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        SearchConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_out_of_range() {
        let bad = [
            SearchConfig {
                pw_exponent: 1.5,
                ..Default::default()
            },
            SearchConfig {
                discount_factor: 0.0,
                ..Default::default()
            },
            SearchConfig {
                kernel_bandwidth: -1.0,
                ..Default::default()
            },
            SearchConfig {
                iteration_budget: 0,
                ..Default::default()
            },
            SearchConfig {
                pw_coefficient: 0.0,
                ..Default::default()
            },
            SearchConfig {
                similarity_floor: 1.5,
                ..Default::default()
            },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn floor_of_one_disables_similarity() {
        let cfg = SearchConfig {
            similarity_floor: 1.0,
            ..Default::default()
        };
        cfg.validate().unwrap();
        assert!(!cfg.similarity_enabled());
        assert!(SearchConfig::default().similarity_enabled());
    }
}
