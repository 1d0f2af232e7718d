//! Parallel search strategies behind one interface.
//!
//! * Leaf parallelization runs `workers` rollouts from every expanded node
//!   and backpropagates their mean or maximum once.
//! * Root parallelization grows `workers` independent trees and combines
//!   their root statistics with a kernel-similarity merge or vote.
//!
//! Every worker owns streams derived from `(seed, worker)`, and results are
//! collected in worker order, so outcomes never depend on scheduling.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::action::{ActionBounds, ContinuousAction};
use crate::env::{Environment, State};
use crate::error::{Error, Result};
use crate::rng::{derive_stream, Stream};
use crate::search::{
    rollout_key, run_search_as_worker, similarity, simulate, ActionStat, LeafEstimate,
    LeafEvaluator, SearchConfig, SearchOutcome, Searcher, TreeNode,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    Single,
    LeafMean,
    LeafMax,
    RootMerge,
    RootVote,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 5] = [
        StrategyKind::Single,
        StrategyKind::LeafMean,
        StrategyKind::LeafMax,
        StrategyKind::RootMerge,
        StrategyKind::RootVote,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            StrategyKind::Single => "single",
            StrategyKind::LeafMean => "leaf_mean",
            StrategyKind::LeafMax => "leaf_max",
            StrategyKind::RootMerge => "root_merge",
            StrategyKind::RootVote => "root_vote",
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, StrategyKind::LeafMean | StrategyKind::LeafMax)
    }

    pub fn is_root(&self) -> bool {
        matches!(self, StrategyKind::RootMerge | StrategyKind::RootVote)
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        StrategyKind::ALL
            .into_iter()
            .find(|k| k.as_str() == norm)
            .ok_or_else(|| Error::InvalidPlan(format!("unknown strategy '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeafAggregation {
    Mean,
    Max,
}

/// How many direct visits one aggregated leaf evaluation is worth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VisitCredit {
    /// One visit per backpropagation.
    #[default]
    PerIteration,
    /// One visit per rollout, i.e. `workers` per backpropagation.
    PerRollout,
}

/// Iterations given to each tree under root parallelization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootBudget {
    /// Every tree gets the full budget.
    #[default]
    Full,
    /// The budget is split evenly across trees (at least one each).
    Divided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootCombine {
    SimilarityMerge,
    SimilarityVote,
}

/// A strategy with its worker count and options.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Strategy {
    pub kind: StrategyKind,
    pub workers: usize,
    #[serde(default)]
    pub visit_credit: VisitCredit,
    #[serde(default)]
    pub root_budget: RootBudget,
}

impl Strategy {
    pub fn new(kind: StrategyKind, workers: usize) -> Result<Self> {
        if workers == 0 {
            return Err(Error::InvalidConfig("worker count must be >= 1".into()));
        }
        if kind == StrategyKind::Single && workers != 1 {
            return Err(Error::InvalidConfig(
                "the single strategy requires exactly one worker".into(),
            ));
        }
        Ok(Self {
            kind,
            workers,
            visit_credit: VisitCredit::default(),
            root_budget: RootBudget::default(),
        })
    }

    pub fn single() -> Self {
        Self::new(StrategyKind::Single, 1).expect("valid")
    }

    /// Plans one joint action from `state`.
    pub fn plan(&self, env: &dyn Environment, state: &State, config: &SearchConfig) -> Result<Decision> {
        match self.kind {
            StrategyKind::Single => {
                let out = run_search_as_worker(env, state.clone(), config, 0)?;
                Ok(Decision::new(out.best))
            }
            StrategyKind::LeafMean | StrategyKind::LeafMax => {
                let agg = if self.kind == StrategyKind::LeafMean {
                    LeafAggregation::Mean
                } else {
                    LeafAggregation::Max
                };
                let out =
                    leaf_parallel_search(env, state, config, self.workers, agg, self.visit_credit)?;
                Ok(Decision::new(out.best))
            }
            StrategyKind::RootMerge | StrategyKind::RootVote => {
                let combine = if self.kind == StrategyKind::RootMerge {
                    RootCombine::SimilarityMerge
                } else {
                    RootCombine::SimilarityVote
                };
                root_parallel_search(env, state, config, self.workers, combine, self.root_budget)
            }
        }
    }
}

/// A planned joint action, with the number of root-parallel trees that
/// failed and were dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub joint: Vec<ContinuousAction>,
    pub failed_workers: usize,
}

impl Decision {
    fn new(joint: Vec<ContinuousAction>) -> Self {
        Self {
            joint,
            failed_workers: 0,
        }
    }
}

/// Per-agent combination of several rollout returns.
pub fn aggregate(values: &[Vec<f64>], how: LeafAggregation) -> Vec<f64> {
    let Some(first) = values.first() else {
        return Vec::new();
    };
    let agents = first.len();
    (0..agents)
        .map(|a| {
            let it = values.iter().map(|v| v[a]);
            match how {
                LeafAggregation::Mean => it.sum::<f64>() / values.len() as f64,
                LeafAggregation::Max => it.fold(f64::NEG_INFINITY, f64::max),
            }
        })
        .collect()
}

/// Runs one rollout per stream from `state` and aggregates them. Blocks
/// until every rollout has finished; any failure fails the whole call.
pub fn leaf_parallel_simulate(
    env: &dyn Environment,
    state: &State,
    config: &SearchConfig,
    depth_limit: usize,
    streams: &mut [Stream],
    how: LeafAggregation,
) -> Result<Vec<f64>> {
    if streams.is_empty() {
        return Err(Error::InvalidConfig("worker count must be >= 1".into()));
    }
    let results: Vec<Result<Vec<f64>>> = if streams.len() == 1 {
        vec![simulate(env, state, config, depth_limit, &mut streams[0])]
    } else {
        streams
            .par_iter_mut()
            .map(|rng| simulate(env, state, config, depth_limit, rng))
            .collect()
    };
    let values = results
        .into_iter()
        .enumerate()
        .map(|(worker, r)| {
            r.map_err(|e| Error::Worker {
                worker,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate(&values, how))
}

/// Leaf evaluator holding one persistent rollout stream per worker.
#[derive(Debug, Clone)]
pub struct ParallelRollouts {
    streams: Vec<Stream>,
    how: LeafAggregation,
    credit: VisitCredit,
}

impl ParallelRollouts {
    pub fn new(seed: u64, workers: usize, how: LeafAggregation, credit: VisitCredit) -> Self {
        Self {
            streams: (0..workers)
                .map(|w| derive_stream(&rollout_key(seed, w)))
                .collect(),
            how,
            credit,
        }
    }
}

impl LeafEvaluator for ParallelRollouts {
    fn evaluate(
        &mut self,
        env: &dyn Environment,
        state: &State,
        config: &SearchConfig,
        depth_limit: usize,
    ) -> Result<LeafEstimate> {
        let value = leaf_parallel_simulate(env, state, config, depth_limit, &mut self.streams, self.how)?;
        Ok(LeafEstimate {
            value,
            credit: self.terminal_credit(),
        })
    }

    fn terminal_credit(&self) -> u64 {
        match self.credit {
            VisitCredit::PerIteration => 1,
            VisitCredit::PerRollout => self.streams.len() as u64,
        }
    }
}

/// Single tree whose leaves are evaluated by `workers` parallel rollouts.
pub fn leaf_parallel_search(
    env: &dyn Environment,
    state: &State,
    config: &SearchConfig,
    workers: usize,
    how: LeafAggregation,
    credit: VisitCredit,
) -> Result<SearchOutcome> {
    if workers == 0 {
        return Err(Error::InvalidConfig("worker count must be >= 1".into()));
    }
    let evaluator = ParallelRollouts::new(config.rng_seed, workers, how, credit);
    let mut searcher = Searcher::new(env, state.clone(), config.clone(), 0, evaluator)?;
    searcher.run()?;
    let best = searcher.best_joint_action()?;
    Ok(SearchOutcome {
        root: searcher.into_root(),
        best,
    })
}

/// Root statistics of one tree: per agent, its directly visited actions in
/// insertion order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSummary {
    pub tree: usize,
    pub per_agent: Vec<Vec<ActionStat>>,
}

impl RootSummary {
    pub fn from_root(tree: usize, root: &TreeNode) -> Self {
        Self {
            tree,
            per_agent: root
                .per_agent_stats
                .iter()
                .map(|stats| {
                    stats
                        .iter()
                        .filter(|s| s.raw_visit_count > 0)
                        .cloned()
                        .collect()
                })
                .collect(),
        }
    }

    /// The tree's own choice for `agent`: highest value estimate, lowest
    /// index on ties.
    pub fn best(&self, agent: usize) -> Option<&ActionStat> {
        let stats = self.per_agent.get(agent)?;
        let mut best: Option<&ActionStat> = None;
        for s in stats {
            if best.map_or(true, |b| s.value_estimate > b.value_estimate) {
                best = Some(s);
            }
        }
        best
    }
}

/// Pairwise kernel values between a list of actions.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl SimilarityMatrix {
    pub fn build(actions: &[&ContinuousAction], bounds: &ActionBounds, gamma: f64) -> Result<Self> {
        let n = actions.len();
        let mut entries = vec![1.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let s = similarity(actions[i], actions[j], bounds, gamma)?;
                entries[i * n + j] = s;
                entries[j * n + i] = s;
            }
        }
        let m = Self { n, entries };
        debug_assert!(m.is_well_formed(), "similarity matrix malformed");
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    /// Symmetric, unit diagonal, entries in `[0, 1]` (exact zeros only from
    /// floating-point underflow of far-apart actions).
    pub fn is_well_formed(&self) -> bool {
        (0..self.n).all(|i| {
            self.get(i, i) == 1.0
                && (0..self.n).all(|j| {
                    let s = self.get(i, j);
                    s == self.get(j, i) && (0.0..=1.0).contains(&s)
                })
        })
    }

    /// `S · v`.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }
}

/// Outcome of combining root statistics for one agent.
#[derive(Debug, Clone, PartialEq)]
pub struct Combined {
    pub action: ContinuousAction,
    /// Position of the winner in the pooled (merge) or submitted (vote) list.
    pub index: usize,
    /// Merged value (merge) or vote score (vote) of the winner.
    pub score: f64,
}

fn argmax_first(xs: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &x) in xs.iter().enumerate() {
        if best.map_or(true, |b| x > xs[b]) {
            best = Some(i);
        }
    }
    best
}

/// Merges the root actions of all trees with kernel-weighted visit counts
/// and values computed from the pre-merge statistics, and returns the action
/// with the highest merged value.
pub fn similarity_merge(
    summaries: &[RootSummary],
    agent: usize,
    bounds: &ActionBounds,
    config: &SearchConfig,
) -> Result<Combined> {
    let pool: Vec<&ActionStat> = summaries
        .iter()
        .filter_map(|s| s.per_agent.get(agent))
        .flatten()
        .collect();
    if pool.is_empty() {
        return Err(Error::EmptyPool);
    }
    let actions: Vec<&ContinuousAction> = pool.iter().map(|s| &s.action).collect();
    let sim = SimilarityMatrix::build(&actions, bounds, config.kernel_bandwidth)?;
    let weight = |s: f64| {
        if config.similarity_enabled() && s >= config.similarity_floor {
            s
        } else {
            0.0
        }
    };
    let merged: Vec<f64> = (0..pool.len())
        .map(|i| {
            let mut n_sim = pool[i].visit_count;
            let mut weighted = pool[i].visit_count * pool[i].value_estimate;
            for (j, other) in pool.iter().enumerate() {
                if j == i {
                    continue;
                }
                let w = weight(sim.get(i, j)) * other.visit_count;
                n_sim += w;
                weighted += w * other.value_estimate;
            }
            if n_sim > 0.0 {
                weighted / n_sim
            } else {
                pool[i].value_estimate
            }
        })
        .collect();
    let index = argmax_first(&merged).ok_or(Error::EmptyPool)?;
    Ok(Combined {
        action: pool[index].action.clone(),
        index,
        score: merged[index],
    })
}

/// Each tree submits its best root action; the submission with the highest
/// kernel-weighted vote `S · V` wins, where `V` holds the submitting trees'
/// value estimates. Trees without an explored action are skipped.
pub fn similarity_vote(
    summaries: &[RootSummary],
    agent: usize,
    bounds: &ActionBounds,
    config: &SearchConfig,
) -> Result<Combined> {
    let submitted: Vec<&ActionStat> = summaries.iter().filter_map(|s| s.best(agent)).collect();
    if submitted.is_empty() {
        return Err(Error::EmptyPool);
    }
    let actions: Vec<&ContinuousAction> = submitted.iter().map(|s| &s.action).collect();
    let sim = SimilarityMatrix::build(&actions, bounds, config.kernel_bandwidth)?;
    let votes: Vec<f64> = submitted.iter().map(|s| s.value_estimate).collect();
    let scores = sim.mul_vec(&votes);
    let index = argmax_first(&scores).ok_or(Error::EmptyPool)?;
    Ok(Combined {
        action: submitted[index].action.clone(),
        index,
        score: scores[index],
    })
}

/// Combines summaries for every agent independently.
pub fn combine_roots(
    summaries: &[RootSummary],
    agents: usize,
    bounds: &ActionBounds,
    config: &SearchConfig,
    how: RootCombine,
) -> Result<Vec<ContinuousAction>> {
    (0..agents)
        .map(|agent| {
            let c = match how {
                RootCombine::SimilarityMerge => similarity_merge(summaries, agent, bounds, config)?,
                RootCombine::SimilarityVote => similarity_vote(summaries, agent, bounds, config)?,
            };
            Ok(c.action)
        })
        .collect()
}

/// Grows `workers` independent trees and combines their roots.
pub fn root_parallel_search(
    env: &dyn Environment,
    state: &State,
    config: &SearchConfig,
    workers: usize,
    how: RootCombine,
    budget: RootBudget,
) -> Result<Decision> {
    let summaries = root_summaries(env, state, config, workers, budget)?;
    let failed = workers - summaries.len();
    let spec = env.spec();
    let joint = combine_roots(&summaries, spec.agent_count, &spec.action_bounds, config, how)?;
    Ok(Decision {
        joint,
        failed_workers: failed,
    })
}

/// Runs the independent trees of a root-parallel search and collects their
/// root summaries in worker order. Failed trees are dropped with a warning.
pub fn root_summaries(
    env: &dyn Environment,
    state: &State,
    config: &SearchConfig,
    workers: usize,
    budget: RootBudget,
) -> Result<Vec<RootSummary>> {
    if workers == 0 {
        return Err(Error::InvalidConfig("worker count must be >= 1".into()));
    }
    let mut tree_config = config.clone();
    if budget == RootBudget::Divided {
        tree_config.iteration_budget = (config.iteration_budget / workers).max(1);
    }
    let run = |w: usize| run_search_as_worker(env, state.clone(), &tree_config, w);
    let results: Vec<Result<SearchOutcome>> = if workers == 1 {
        vec![run(0)]
    } else {
        (0..workers).into_par_iter().map(run).collect()
    };
    let mut summaries = Vec::with_capacity(workers);
    let mut first_error = None;
    for (w, r) in results.into_iter().enumerate() {
        match r {
            Ok(out) => summaries.push(RootSummary::from_root(w, &out.root)),
            Err(e) => {
                log::warn!("root-parallel tree {w} failed and was dropped: {e}");
                first_error.get_or_insert(e);
            }
        }
    }
    if summaries.is_empty() {
        if let Some(Error::NothingToPlan) = first_error {
            return Err(Error::NothingToPlan);
        }
        return Err(Error::AllWorkersFailed(workers));
    }
    Ok(summaries)
}
