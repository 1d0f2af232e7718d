//! Experiment harness: closed-loop episodes swept over scenarios,
//! strategies, iteration budgets and worker counts.

mod aggregate;
mod episode;
mod plan;
mod records;

pub use aggregate::{
    aggregate, aggregate_pooled, scenario_set_name, write_aggregate_csv, write_plot_data,
    AggregateRow,
};
pub use episode::{plan_seed, run_episode, Episode};
pub use plan::{Combination, ExperimentPlan, SearchOverrides};
pub use records::{
    read_csv, read_csv_file, to_csv_string, write_csv, write_csv_file, RunRecord, RunResult,
    CSV_HEADER,
};

use rayon::prelude::*;

use crate::env::{preset, Preset};
use crate::error::Result;
use crate::parallel::{Strategy, StrategyKind};
use crate::rng::StreamKey;

/// Seed of repetition `rep` of combination `combination`.
pub fn episode_seed(base_seed: u64, combination: usize, rep: usize) -> u64 {
    StreamKey::new(base_seed)
        .child("combination", combination as u64)
        .child("rep", rep as u64)
        .to_seed()
}

/// Strategy actually run for a combination. `single` always runs one
/// worker, whatever the combination's worker count.
pub fn strategy_for(plan: &ExperimentPlan, kind: StrategyKind, workers: usize) -> Strategy {
    let workers = if kind == StrategyKind::Single { 1 } else { workers };
    let mut s = Strategy::new(kind, workers).expect("validated worker count");
    s.visit_credit = plan.visit_credit;
    s.root_budget = plan.root_budget;
    s
}

/// Runs every repetition of every combination.
///
/// Presets are resolved before anything runs. Episodes may run
/// concurrently; results come back ordered by combination, then repetition.
/// A failed episode is recorded as an unsuccessful run.
pub fn run_plan(plan: &ExperimentPlan) -> Result<Vec<RunResult>> {
    plan.validate()?;
    let presets: Vec<Preset> = plan
        .scenarios
        .iter()
        .map(|s| preset(s))
        .collect::<Result<_>>()?;
    let combos = plan.combinations();
    let jobs: Vec<(usize, usize)> = (0..combos.len())
        .flat_map(|c| (0..plan.repetitions).map(move |r| (c, r)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(c, rep)| {
            let combo = &combos[c];
            let p = presets
                .iter()
                .find(|p| p.name == combo.scenario)
                .expect("resolved above");
            let strategy = strategy_for(plan, combo.strategy, combo.workers);
            let mut config = plan.search.apply(p.config.clone());
            config.iteration_budget = combo.budget;
            let seed = episode_seed(plan.base_seed, combo.index, rep);
            let ep = run_episode(p.env.as_ref(), &strategy, &config, seed);
            if let Some(e) = &ep.error {
                log::warn!(
                    "{} {} w={} b={} rep {rep} failed: {e}",
                    combo.scenario,
                    combo.strategy,
                    strategy.workers,
                    combo.budget
                );
            }
            RunResult {
                record: RunRecord {
                    scenario: combo.scenario.clone(),
                    strategy: combo.strategy,
                    workers: strategy.workers,
                    budget: combo.budget,
                    rep,
                    seed,
                    success: ep.success,
                    steps: ep.steps,
                    wall_ms: ep.wall_ms,
                },
                trace: ep
                    .trace
                    .into_iter()
                    .map(|joint| joint.into_iter().map(|a| a.into_inner()).collect())
                    .collect(),
                error: ep.error,
            }
        })
        .collect();
    Ok(results)
}
