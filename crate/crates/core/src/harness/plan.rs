use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::env::preset;
use crate::error::{Error, Result};
use crate::parallel::{RootBudget, StrategyKind, VisitCredit};
use crate::search::SearchConfig;

/// Partial override of a preset's search defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchOverrides {
    pub uct_exploration_c: Option<f64>,
    pub pw_coefficient: Option<f64>,
    pub pw_exponent: Option<f64>,
    pub kernel_bandwidth: Option<f64>,
    pub discount_factor: Option<f64>,
    pub planning_horizon: Option<usize>,
    pub initial_action_count: Option<usize>,
    pub similarity_floor: Option<f64>,
}

impl SearchOverrides {
    pub fn apply(&self, mut cfg: SearchConfig) -> SearchConfig {
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { cfg.$f = v; } )* };
        }
        set!(
            uct_exploration_c,
            pw_coefficient,
            pw_exponent,
            kernel_bandwidth,
            discount_factor,
            planning_horizon,
            initial_action_count,
            similarity_floor
        );
        cfg
    }
}

fn default_repetitions() -> usize {
    50
}

/// A sweep over scenarios × strategies × budgets × worker counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub scenarios: Vec<String>,
    pub strategies: Vec<StrategyKind>,
    pub iteration_budgets: Vec<usize>,
    pub worker_counts: Vec<usize>,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub root_budget: RootBudget,
    #[serde(default)]
    pub visit_credit: VisitCredit,
    #[serde(default)]
    pub search: SearchOverrides,
}

/// One cell of the sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Combination {
    pub index: usize,
    pub scenario: String,
    pub strategy: StrategyKind,
    pub workers: usize,
    pub budget: usize,
}

impl ExperimentPlan {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let plan: Self = toml::from_str(s)?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("plan serializes")
    }

    /// Checks list sizes, ranges and that every scenario is a known preset.
    pub fn validate(&self) -> Result<()> {
        let invalid = |m: String| Err(Error::InvalidPlan(m));
        if self.scenarios.is_empty() {
            return invalid("scenarios is empty".into());
        }
        if self.strategies.is_empty() {
            return invalid("strategies is empty".into());
        }
        if self.iteration_budgets.is_empty() {
            return invalid("iteration_budgets is empty".into());
        }
        if self.worker_counts.is_empty() {
            return invalid("worker_counts is empty".into());
        }
        if self.repetitions == 0 {
            return invalid("repetitions must be >= 1".into());
        }
        if self.iteration_budgets.contains(&0) {
            return invalid("iteration budgets must be >= 1".into());
        }
        if self.worker_counts.contains(&0) {
            return invalid("worker counts must be >= 1".into());
        }
        for s in &self.scenarios {
            let p = preset(s)?;
            self.search.apply(p.config).validate()?;
        }
        Ok(())
    }

    /// Every combination, scenario-major, then strategy, budget, workers.
    pub fn combinations(&self) -> Vec<Combination> {
        let mut out = Vec::new();
        for scenario in &self.scenarios {
            for &strategy in &self.strategies {
                for &budget in &self.iteration_budgets {
                    for &workers in &self.worker_counts {
                        out.push(Combination {
                            index: out.len(),
                            scenario: scenario.clone(),
                            strategy,
                            workers,
                            budget,
                        });
                    }
                }
            }
        }
        out
    }

    pub fn expected_records(&self) -> usize {
        self.scenarios.len()
            * self.strategies.len()
            * self.iteration_budgets.len()
            * self.worker_counts.len()
            * self.repetitions
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const EXAMPLE: &str = r#"
scenarios = ["merge-3a-tight", "narrow-5pct"]
strategies = ["single", "root_vote"]
iteration_budgets = [100, 400]
worker_counts = [1, 8]
repetitions = 50
base_seed = 42
output = "results.csv"
root_budget = "full"
visit_credit = "per_iteration"

[search]
uct_exploration_c = 3.0
"#;

    #[test]
    fn parses_example() {
        let plan = ExperimentPlan::from_toml_str(EXAMPLE).unwrap();
        assert_eq!(plan.strategies, vec![StrategyKind::Single, StrategyKind::RootVote]);
        assert_eq!(plan.expected_records(), 2 * 2 * 2 * 2 * 50);
        assert_eq!(plan.combinations().len(), 16);
        assert_eq!(plan.search.uct_exploration_c, Some(3.0));
        let back = ExperimentPlan::from_toml_str(&plan.to_toml_string()).unwrap();
        assert_eq!(back, plan);
    }

    #[test]
    fn defaults_fill_in() {
        let plan = ExperimentPlan::from_toml_str(
            "scenarios=[\"toy-parabola\"]\nstrategies=[\"single\"]\niteration_budgets=[10]\nworker_counts=[1]\n",
        )
        .unwrap();
        assert_eq!(plan.repetitions, 50);
        assert_eq!(plan.base_seed, 0);
    }

    #[test]
    fn rejects_bad_plans() {
        let base = ExperimentPlan::from_toml_str(EXAMPLE).unwrap();
        let mut p = base.clone();
        p.scenarios = vec!["nope".into()];
        assert!(matches!(p.validate(), Err(Error::UnknownPreset(_))));
        let mut p = base.clone();
        p.worker_counts.clear();
        assert!(p.validate().is_err());
        let mut p = base.clone();
        p.repetitions = 0;
        assert!(p.validate().is_err());
        let mut p = base;
        p.search.pw_exponent = Some(2.0);
        assert!(p.validate().is_err());
        assert!(ExperimentPlan::from_toml_str("scenarios = 3").is_err());
    }
}
