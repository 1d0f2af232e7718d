use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::action::ContinuousAction;
use crate::env::State;

/// Statistics of one candidate action of one agent at one node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionStat {
    pub action: ContinuousAction,
    /// Direct visits plus similarity-weighted fractional visits.
    pub visit_count: f64,
    pub value_estimate: f64,
    /// Direct visits only.
    pub raw_visit_count: u64,
}

impl ActionStat {
    pub fn new(action: ContinuousAction) -> Self {
        Self {
            action,
            visit_count: 0.0,
            value_estimate: 0.0,
            raw_visit_count: 0,
        }
    }

    /// Incremental-mean update with weight `credit`.
    pub fn record(&mut self, value: f64, credit: u64) {
        let w = credit as f64;
        self.visit_count += w;
        self.raw_visit_count += credit;
        self.value_estimate += (w / self.visit_count) * (value - self.value_estimate);
    }

    /// Fractional update from a similar action's return; leaves
    /// `raw_visit_count` alone.
    pub fn record_weighted(&mut self, value: f64, weight: f64) {
        self.visit_count += weight;
        self.value_estimate += (weight / self.visit_count) * (value - self.value_estimate);
    }
}

/// One stat index per agent; identifies an outgoing joint action.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct JointActionId(pub Vec<u32>);

impl JointActionId {
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&i| i as usize)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    /// Per-agent rewards observed the first time this edge was taken.
    pub rewards: Vec<f64>,
    pub node: TreeNode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    /// State observed when the node was created.
    pub state: State,
    pub per_agent_stats: Vec<Vec<ActionStat>>,
    pub children: BTreeMap<JointActionId, Edge>,
    pub node_visit_count: u64,
}

impl TreeNode {
    pub fn new(state: State, agent_count: usize) -> Self {
        Self {
            state,
            per_agent_stats: vec![Vec::new(); agent_count],
            children: BTreeMap::new(),
            node_visit_count: 0,
        }
    }

    pub fn agent_count(&self) -> usize {
        self.per_agent_stats.len()
    }

    pub fn stats(&self, agent: usize) -> &[ActionStat] {
        &self.per_agent_stats[agent]
    }

    pub fn child(&self, id: &JointActionId) -> Option<&TreeNode> {
        self.children.get(id).map(|e| &e.node)
    }

    /// Index of the agent's action with the highest value estimate among
    /// directly visited ones; ties go to the lowest index.
    pub fn best_action(&self, agent: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, s) in self.per_agent_stats[agent].iter().enumerate() {
            if s.raw_visit_count == 0 {
                continue;
            }
            match best {
                Some((_, q)) if s.value_estimate <= q => {}
                _ => best = Some((i, s.value_estimate)),
            }
        }
        best.map(|(i, _)| i)
    }

    /// Number of nodes in the subtree rooted here, this node included.
    pub fn size(&self) -> usize {
        1 + self.children.values().map(|e| e.node.size()).sum::<usize>()
    }

    /// Depth-first visit of every node in the subtree.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a TreeNode)) {
        f(self);
        for e in self.children.values() {
            e.node.walk(f);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stat(q: f64, raw: u64) -> ActionStat {
        ActionStat {
            action: ContinuousAction::new(vec![q]),
            visit_count: raw as f64,
            value_estimate: q,
            raw_visit_count: raw,
        }
    }

    #[test]
    fn record_first_sample_sets_mean() {
        let mut s = ActionStat::new(ContinuousAction::new(vec![0.0]));
        s.record(2.0, 1);
        assert_eq!((s.visit_count, s.value_estimate, s.raw_visit_count), (1.0, 2.0, 1));
        s.record(0.0, 1);
        assert_eq!((s.visit_count, s.value_estimate, s.raw_visit_count), (2.0, 1.0, 2));
    }

    #[test]
    fn best_action_skips_unvisited_and_breaks_ties_low() {
        let mut node = TreeNode::new(State::new(vec![], 0), 1);
        node.per_agent_stats[0] = vec![stat(5.0, 0), stat(1.0, 2), stat(1.0, 3), stat(0.5, 1)];
        assert_eq!(node.best_action(0), Some(1));
        node.per_agent_stats[0].clear();
        assert_eq!(node.best_action(0), None);
    }
}
