//! The environment interface and the built-in environments.

use serde::{Deserialize, Serialize};

use crate::action::{ActionBounds, ContinuousAction, Interval};
use crate::error::{Error, Result};
use crate::rng::Stream;

mod merge;
mod narrow;
mod presets;
mod toy;

pub use merge::{CoopMerge, CoopMergeState, MergeAgent, MergeParams};
pub use narrow::{NarrowPassage, NarrowPassageParams};
pub use presets::{preset, preset_names, Preset};
pub use toy::{ToyParabola, TOY_OPTIMUM};

/// An environment state: an opaque vector plus the bookkeeping search needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub values: Vec<f64>,
    pub terminal: bool,
    /// Steps elapsed since the start of the episode.
    pub depth: usize,
}

impl State {
    pub fn new(values: Vec<f64>, depth: usize) -> Self {
        Self {
            values,
            terminal: false,
            depth,
        }
    }
}

/// Result of one environment step.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: State,
    /// One reward per agent.
    pub rewards: Vec<f64>,
}

impl Transition {
    pub fn terminal(&self) -> bool {
        self.state.terminal
    }
}

/// Static description of an environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentSpec {
    pub name: String,
    pub agent_count: usize,
    pub action_bounds: ActionBounds,
    /// Episode length; a state at this depth is always terminal.
    pub horizon: usize,
}

impl EnvironmentSpec {
    pub fn new(
        name: impl Into<String>,
        agent_count: usize,
        bounds: Vec<Interval>,
        horizon: usize,
    ) -> Result<Self> {
        if agent_count == 0 {
            return Err(Error::InvalidConfig("agent_count must be >= 1".into()));
        }
        if horizon == 0 {
            return Err(Error::InvalidConfig("horizon must be >= 1".into()));
        }
        Ok(Self {
            name: name.into(),
            agent_count,
            action_bounds: ActionBounds::new(bounds)?,
            horizon,
        })
    }

    pub fn action_dimension(&self) -> usize {
        self.action_bounds.dim()
    }

    /// Validates a joint action: one in-bounds action per agent.
    pub fn check_joint(&self, joint: &[ContinuousAction]) -> Result<()> {
        if joint.len() != self.agent_count {
            return Err(Error::AgentCountMismatch {
                expected: self.agent_count,
                got: joint.len(),
            });
        }
        joint.iter().try_for_each(|a| self.action_bounds.check(a))
    }
}

/// A multi-agent, continuous-action environment.
///
/// `step` must not mutate `self`; implementations are shared across worker
/// threads by reference.
pub trait Environment: Send + Sync {
    fn spec(&self) -> &EnvironmentSpec;

    fn initial_state(&self) -> State;

    /// Advances `state` by one joint action. Out-of-bounds actions are an
    /// error; stepping a terminal state is an error.
    fn step(&self, state: &State, joint: &[ContinuousAction], rng: &mut Stream)
        -> Result<Transition>;

    /// Whether an episode that ended in `state` counts as a success.
    fn is_success(&self, state: &State) -> bool;
}

impl<E: Environment + ?Sized> Environment for Box<E> {
    fn spec(&self) -> &EnvironmentSpec {
        (**self).spec()
    }

    fn initial_state(&self) -> State {
        (**self).initial_state()
    }

    fn step(
        &self,
        state: &State,
        joint: &[ContinuousAction],
        rng: &mut Stream,
    ) -> Result<Transition> {
        (**self).step(state, joint, rng)
    }

    fn is_success(&self, state: &State) -> bool {
        (**self).is_success(state)
    }
}

pub(crate) fn check_step_preconditions(
    spec: &EnvironmentSpec,
    state: &State,
    joint: &[ContinuousAction],
) -> Result<()> {
    if state.terminal || state.depth >= spec.horizon {
        return Err(Error::TerminalState);
    }
    spec.check_joint(joint)
}
