//! Single-threaded MCTS over continuous actions with progressive widening,
//! kernel-similarity value sharing and Decoupled-UCT for several agents.
//!
//! Each agent keeps its own action statistics at every node. An iteration
//! walks down from the root choosing one action per agent (widen, try an
//! untried action, or UCT), steps the environment along the way, evaluates
//! the first newly created node with a rollout, and backpropagates the
//! discounted return-to-go. Nothing in the tree changes until the leaf
//! evaluation has succeeded, so a failed iteration leaves no trace.

mod config;
mod tree;

pub use config::SearchConfig;
pub use tree::{ActionStat, Edge, JointActionId, TreeNode};

use crate::action::{sample_action, ActionBounds, ContinuousAction};
use crate::env::{Environment, State};
use crate::error::{Error, Result};
use crate::rng::{derive_stream, Stream, StreamKey};

/// UCT score: `Q + c·sqrt(2 ln N(s) / N(s,a))`.
pub fn uct_value(stat: &ActionStat, node_visit_count: u64, c: f64) -> Result<f64> {
    if stat.visit_count <= 0.0 {
        return Err(Error::UnvisitedAction);
    }
    let n = node_visit_count.max(1) as f64;
    Ok(stat.value_estimate + c * (2.0 * n.ln() / stat.visit_count).sqrt())
}

/// Index of the agent's action with the highest UCT score, lowest index on
/// ties.
pub fn select_child(node: &TreeNode, agent: usize, config: &SearchConfig) -> Result<usize> {
    select_by_uct(
        node.stats(agent),
        node.node_visit_count,
        config.uct_exploration_c,
    )
}

pub(crate) fn select_by_uct(stats: &[ActionStat], node_visits: u64, c: f64) -> Result<usize> {
    if stats.is_empty() {
        return Err(Error::NodeNotExpanded);
    }
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (i, s) in stats.iter().enumerate() {
        let score = uct_value(s, node_visits, c)?;
        if score > best_score {
            best = i;
            best_score = score;
        }
    }
    Ok(best)
}

/// Action-set size admitted at `node_visit_count` visits:
/// `max(initial, floor(k · N^alpha))`.
pub fn widening_bound(node_visit_count: u64, config: &SearchConfig) -> usize {
    let grown = (config.pw_coefficient * (node_visit_count as f64).powf(config.pw_exponent)).floor();
    config.initial_action_count.max(grown as usize)
}

pub fn should_widen(node: &TreeNode, agent: usize, config: &SearchConfig) -> bool {
    node.stats(agent).len() < widening_bound(node.node_visit_count, config)
}

/// RBF kernel `exp(-gamma ‖â_i - â_j‖²)` on actions min-max normalized by
/// `bounds`.
pub fn similarity(
    a: &ContinuousAction,
    b: &ContinuousAction,
    bounds: &ActionBounds,
    kernel_bandwidth: f64,
) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    if a.dim() != bounds.dim() {
        return Err(Error::DimensionMismatch {
            expected: bounds.dim(),
            got: a.dim(),
        });
    }
    let sq: f64 = a
        .values()
        .iter()
        .zip(b.values())
        .zip(bounds.intervals())
        .map(|((&x, &y), iv)| {
            let d = iv.normalize(x) - iv.normalize(y);
            d * d
        })
        .sum();
    Ok((-kernel_bandwidth * sq).exp())
}

/// Shares `return_value`, observed for `stats[source]`, with every other
/// action whose kernel value reaches the similarity floor.
pub fn similarity_update(
    stats: &mut [ActionStat],
    source: usize,
    return_value: f64,
    bounds: &ActionBounds,
    config: &SearchConfig,
) -> Result<()> {
    if !config.similarity_enabled() || stats.len() < 2 {
        return Ok(());
    }
    let source_action = stats
        .get(source)
        .ok_or_else(|| Error::CorruptPath(format!("no action {source} at node")))?
        .action
        .clone();
    for (j, stat) in stats.iter_mut().enumerate() {
        if j == source {
            continue;
        }
        let w = similarity(&source_action, &stat.action, bounds, config.kernel_bandwidth)?;
        if w >= config.similarity_floor && w > 0.0 {
            stat.record_weighted(return_value, w);
        }
    }
    Ok(())
}

/// Draws one uniform action per agent.
pub fn sample_joint(
    bounds: &ActionBounds,
    agent_count: usize,
    rng: &mut Stream,
) -> Result<Vec<ContinuousAction>> {
    (0..agent_count)
        .map(|_| sample_action(bounds.intervals(), rng))
        .collect()
}

/// Uniform random rollout from `state` until a terminal state or
/// `depth_limit`; returns the per-agent discounted reward sum, discounting
/// from the first simulated step.
pub fn simulate(
    env: &dyn Environment,
    state: &State,
    config: &SearchConfig,
    depth_limit: usize,
    rng: &mut Stream,
) -> Result<Vec<f64>> {
    let spec = env.spec();
    let mut total = vec![0.0; spec.agent_count];
    let mut discount = 1.0;
    let mut current = state.clone();
    while !current.terminal && current.depth < depth_limit {
        let joint = sample_joint(&spec.action_bounds, spec.agent_count, rng)?;
        let t = env.step(&current, &joint, rng)?;
        for (acc, r) in total.iter_mut().zip(&t.rewards) {
            *acc += discount * r;
        }
        discount *= config.discount_factor;
        current = t.state;
    }
    Ok(total)
}

/// One traversed edge of an iteration: the joint action taken and the
/// per-agent rewards it produced.
#[derive(Debug, Clone, PartialEq)]
pub struct PathStep {
    pub id: JointActionId,
    pub rewards: Vec<f64>,
}

/// Per-agent discounted returns-to-go along `path`, ending in `leaf_value`.
pub fn returns_to_go(path: &[PathStep], leaf_value: &[f64], discount: f64) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new(); path.len()];
    let mut g = leaf_value.to_vec();
    for (i, step) in path.iter().enumerate().rev() {
        g = step
            .rewards
            .iter()
            .zip(&g)
            .map(|(r, next)| r + discount * next)
            .collect();
        out[i] = g.clone();
    }
    out
}

/// Applies direct and similarity updates along `path` from `root`.
///
/// Node `i` on the path is reached from the root through `path[..i]`; it is
/// credited with the return-to-go starting at `path[i]`. `credit` is the
/// direct visit weight (1 unless a leaf-parallel strategy counts every
/// rollout).
pub fn backpropagate(
    root: &mut TreeNode,
    path: &[PathStep],
    leaf_value: &[f64],
    bounds: &ActionBounds,
    config: &SearchConfig,
    credit: u64,
) -> Result<()> {
    if path.is_empty() {
        return Err(Error::CorruptPath("empty path".into()));
    }
    validate_path(root, path, leaf_value.len())?;
    let returns = returns_to_go(path, leaf_value, config.discount_factor);
    let mut node = root;
    for (depth, (step, g)) in path.iter().zip(&returns).enumerate() {
        node.node_visit_count += credit;
        for (agent, idx) in step.id.indices().enumerate() {
            let stats = &mut node.per_agent_stats[agent];
            stats[idx].record(g[agent], credit);
            similarity_update(stats, idx, g[agent], bounds, config)?;
        }
        if depth + 1 < path.len() {
            node = &mut node
                .children
                .get_mut(&step.id)
                .expect("path validated")
                .node;
        }
    }
    Ok(())
}

fn validate_path(root: &TreeNode, path: &[PathStep], agents: usize) -> Result<()> {
    let mut node = root;
    for (depth, step) in path.iter().enumerate() {
        if step.id.0.len() != node.agent_count()
            || agents != node.agent_count()
            || step.rewards.len() != node.agent_count()
        {
            return Err(Error::CorruptPath(format!(
                "agent count mismatch at depth {depth}"
            )));
        }
        for (agent, idx) in step.id.indices().enumerate() {
            if idx >= node.per_agent_stats[agent].len() {
                return Err(Error::CorruptPath(format!(
                    "agent {agent} has no action {idx} at depth {depth}"
                )));
            }
        }
        if depth + 1 < path.len() {
            node = node.child(&step.id).ok_or_else(|| {
                Error::CorruptPath(format!("missing child {:?} at depth {depth}", step.id))
            })?;
        }
    }
    Ok(())
}

/// Value of a newly expanded leaf, and how many direct visits it is worth.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafEstimate {
    pub value: Vec<f64>,
    pub credit: u64,
}

/// Simulation phase of an iteration.
pub trait LeafEvaluator {
    fn evaluate(
        &mut self,
        env: &dyn Environment,
        state: &State,
        config: &SearchConfig,
        depth_limit: usize,
    ) -> Result<LeafEstimate>;

    /// Visit credit of a leaf that needs no simulation (terminal or at the
    /// depth limit).
    fn terminal_credit(&self) -> u64 {
        1
    }
}

/// A single uniform random rollout per leaf.
#[derive(Debug, Clone)]
pub struct RandomRollout {
    rng: Stream,
}

impl RandomRollout {
    pub fn new(rng: Stream) -> Self {
        Self { rng }
    }

    pub fn for_worker(seed: u64, worker: usize) -> Self {
        Self::new(derive_stream(&rollout_key(seed, worker)))
    }
}

impl LeafEvaluator for RandomRollout {
    fn evaluate(
        &mut self,
        env: &dyn Environment,
        state: &State,
        config: &SearchConfig,
        depth_limit: usize,
    ) -> Result<LeafEstimate> {
        Ok(LeafEstimate {
            value: simulate(env, state, config, depth_limit, &mut self.rng)?,
            credit: 1,
        })
    }
}

/// Stream used for sampling and stepping inside worker `worker`'s tree.
pub fn tree_key(seed: u64, worker: usize) -> StreamKey {
    StreamKey::new(seed).child("worker", worker as u64).child("tree", 0)
}

/// Stream used for worker `worker`'s rollouts.
pub fn rollout_key(seed: u64, worker: usize) -> StreamKey {
    StreamKey::new(seed)
        .child("worker", worker as u64)
        .child("rollout", 0)
}

/// Chooses each agent's action at `node`: widen when allowed, else try an
/// untried action, else UCT. Returns the joint id, the joint action and the
/// newly sampled actions per agent.
fn choose(
    node: &TreeNode,
    config: &SearchConfig,
    bounds: &ActionBounds,
    rng: &mut Stream,
) -> Result<(JointActionId, Vec<ContinuousAction>, Vec<Vec<ContinuousAction>>)> {
    let agents = node.agent_count();
    let mut ids = Vec::with_capacity(agents);
    let mut joint = Vec::with_capacity(agents);
    let mut new_actions = vec![Vec::new(); agents];
    for agent in 0..agents {
        let stats = node.stats(agent);
        let idx = if should_widen(node, agent, config) {
            let count = if stats.is_empty() {
                config.initial_action_count
            } else {
                1
            };
            for _ in 0..count {
                new_actions[agent].push(sample_action(bounds.intervals(), rng)?);
            }
            joint.push(new_actions[agent][0].clone());
            stats.len()
        } else if let Some(untried) = stats.iter().position(|s| s.raw_visit_count == 0) {
            joint.push(stats[untried].action.clone());
            untried
        } else {
            let i = select_child(node, agent, config)?;
            joint.push(stats[i].action.clone());
            i
        };
        ids.push(idx as u32);
    }
    Ok((JointActionId(ids), joint, new_actions))
}

/// Actions to add to the node where an iteration's descent stopped, and the
/// state of the child it created.
struct Expansion {
    new_actions: Vec<Vec<ContinuousAction>>,
    child: State,
}

/// Incremental search over one tree.
pub struct Searcher<'e, L> {
    env: &'e dyn Environment,
    config: SearchConfig,
    root: TreeNode,
    depth_limit: usize,
    tree_rng: Stream,
    evaluator: L,
    iterations: usize,
}

impl<'e> Searcher<'e, RandomRollout> {
    /// Plain single-rollout search using worker `worker`'s streams.
    pub fn with_rollouts(
        env: &'e dyn Environment,
        root_state: State,
        config: SearchConfig,
        worker: usize,
    ) -> Result<Self> {
        let rollout = RandomRollout::for_worker(config.rng_seed, worker);
        Self::new(env, root_state, config, worker, rollout)
    }
}

impl<'e, L: LeafEvaluator> Searcher<'e, L> {
    pub fn new(
        env: &'e dyn Environment,
        root_state: State,
        config: SearchConfig,
        worker: usize,
        evaluator: L,
    ) -> Result<Self> {
        config.validate()?;
        let spec = env.spec();
        if root_state.terminal || root_state.depth >= spec.horizon {
            return Err(Error::NothingToPlan);
        }
        let depth_limit = (root_state.depth + config.planning_horizon).min(spec.horizon);
        Ok(Self {
            env,
            tree_rng: derive_stream(&tree_key(config.rng_seed, worker)),
            root: TreeNode::new(root_state, spec.agent_count),
            config,
            depth_limit,
            evaluator,
            iterations: 0,
        })
    }

    pub fn root(&self) -> &TreeNode {
        &self.root
    }

    pub fn into_root(self) -> TreeNode {
        self.root
    }

    pub fn config(&self) -> &SearchConfig {
        &self.config
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Runs one select / expand / simulate / backpropagate cycle. On error
    /// the tree is left exactly as it was.
    pub fn iterate(&mut self) -> Result<()> {
        let env = self.env;
        let mut path: Vec<PathStep> = Vec::new();
        let mut state = self.root.state.clone();
        let mut expansion: Option<Expansion> = None;

        let bounds = &env.spec().action_bounds;
        let mut node = &self.root;
        while !state.terminal && state.depth < self.depth_limit {
            let (id, joint, new_actions) = choose(node, &self.config, bounds, &mut self.tree_rng)?;
            let t = env.step(&state, &joint, &mut self.tree_rng)?;
            let widened = new_actions.iter().any(|v| !v.is_empty());
            let next = if widened { None } else { node.child(&id) };
            path.push(PathStep {
                id,
                rewards: t.rewards,
            });
            state = t.state;
            match next {
                Some(child) => node = child,
                None => {
                    expansion = Some(Expansion {
                        new_actions,
                        child: state.clone(),
                    });
                    break;
                }
            }
        }

        if path.is_empty() {
            // Only reachable when the root itself cannot be expanded.
            return Err(Error::NothingToPlan);
        }

        let leaf = if state.terminal || state.depth >= self.depth_limit {
            LeafEstimate {
                value: vec![0.0; self.root.agent_count()],
                credit: self.evaluator.terminal_credit(),
            }
        } else {
            self.evaluator
                .evaluate(env, &state, &self.config, self.depth_limit)?
        };

        if let Some(exp) = expansion {
            let mut node = &mut self.root;
            for step in &path[..path.len() - 1] {
                node = &mut node
                    .children
                    .get_mut(&step.id)
                    .expect("descent followed existing edges")
                    .node;
            }
            for (agent, actions) in exp.new_actions.into_iter().enumerate() {
                node.per_agent_stats[agent].extend(actions.into_iter().map(ActionStat::new));
            }
            let last = path.last().expect("non-empty path");
            let agents = node.agent_count();
            node.children.entry(last.id.clone()).or_insert_with(|| Edge {
                rewards: last.rewards.clone(),
                node: TreeNode::new(exp.child, agents),
            });
        }

        backpropagate(
            &mut self.root,
            &path,
            &leaf.value,
            bounds,
            &self.config,
            leaf.credit,
        )?;
        self.iterations += 1;
        Ok(())
    }

    /// Runs iterations until the configured budget is spent.
    pub fn run(&mut self) -> Result<()> {
        while self.iterations < self.config.iteration_budget {
            self.iterate()?;
        }
        Ok(())
    }

    /// Per agent, the root action with the highest value estimate among
    /// directly visited ones.
    pub fn best_joint_action(&self) -> Result<Vec<ContinuousAction>> {
        best_joint_action(&self.root)
    }
}

pub fn best_joint_action(root: &TreeNode) -> Result<Vec<ContinuousAction>> {
    (0..root.agent_count())
        .map(|agent| {
            root.best_action(agent)
                .map(|i| root.stats(agent)[i].action.clone())
                .ok_or(Error::NodeNotExpanded)
        })
        .collect()
}

/// Result of a complete single-tree search.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub root: TreeNode,
    pub best: Vec<ContinuousAction>,
}

/// Runs a full single-threaded search with worker 0's streams.
pub fn run_search(env: &dyn Environment, root_state: State, config: &SearchConfig) -> Result<SearchOutcome> {
    run_search_as_worker(env, root_state, config, 0)
}

pub(crate) fn run_search_as_worker(
    env: &dyn Environment,
    root_state: State,
    config: &SearchConfig,
    worker: usize,
) -> Result<SearchOutcome> {
    let mut searcher = Searcher::with_rollouts(env, root_state, config.clone(), worker)?;
    searcher.run()?;
    let best = searcher.best_joint_action()?;
    Ok(SearchOutcome {
        root: searcher.into_root(),
        best,
    })
}
