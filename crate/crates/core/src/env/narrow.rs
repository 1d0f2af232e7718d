//! One-dimensional corridor that rewards precise action selection.
//!
//! At every depth `d` a narrow band of width `band_fraction` of the action
//! range, centred at a depth-dependent point, lets the agent progress with
//! reward +1. A wide exit region ends the episode with a fixed consolation
//! reward. Everything else is a crash: reward 0 and terminal. Passing every
//! band until the horizon earns the completion bonus on the last step and is
//! the only outcome counted as success.
//!
//! Random continuations from inside the corridor mostly crash, so averaging
//! rollouts undervalues the corridor relative to the exit; the best of several
//! rollouts does not.

use crate::action::{ContinuousAction, Interval};
use crate::error::Result;
use crate::rng::Stream;

use super::{check_step_preconditions, Environment, EnvironmentSpec, State, Transition};

const ACTION_LO: f64 = -1.0;
const ACTION_HI: f64 = 1.0;

/// Outcome codes stored in the state vector.
const RUNNING: f64 = 0.0;
const CRASHED: f64 = 1.0;
const EXITED: f64 = 2.0;
const FINISHED: f64 = 3.0;

#[derive(Debug, Clone, PartialEq)]
pub struct NarrowPassageParams {
    pub horizon: usize,
    /// Band width as a fraction of the action range.
    pub band_fraction: f64,
    /// Actions at or below this value take the exit.
    pub exit_threshold: f64,
    pub exit_reward: f64,
    /// Added to the +1 progress reward on the final band.
    pub completion_bonus: f64,
    /// Half-width of uniform actuation noise; 0 disables noise and the
    /// environment never touches its random stream.
    pub noise: f64,
}

impl Default for NarrowPassageParams {
    fn default() -> Self {
        Self {
            horizon: 5,
            band_fraction: 0.05,
            exit_threshold: -0.5,
            exit_reward: 2.0,
            completion_bonus: 5.0,
            noise: 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NarrowPassage {
    spec: EnvironmentSpec,
    params: NarrowPassageParams,
}

impl NarrowPassage {
    pub fn new(name: &str, params: NarrowPassageParams) -> Result<Self> {
        let spec = EnvironmentSpec::new(
            name,
            1,
            vec![Interval::new(ACTION_LO, ACTION_HI)],
            params.horizon,
        )?;
        Ok(Self { spec, params })
    }

    pub fn params(&self) -> &NarrowPassageParams {
        &self.params
    }

    /// Centre of the band at `depth`; always inside `(exit_threshold, 1)`.
    pub fn band_center(depth: usize) -> f64 {
        0.1 + 0.3 * (2.3 * depth as f64 + 1.0).sin()
    }

    pub fn band(&self, depth: usize) -> Interval {
        let half = 0.5 * self.params.band_fraction * (ACTION_HI - ACTION_LO);
        let c = Self::band_center(depth);
        Interval::new(c - half, c + half)
    }

    /// Single-agent convenience wrapper around [`Environment::step`].
    pub fn narrow_passage_step(
        &self,
        state: &State,
        action: f64,
        rng: &mut Stream,
    ) -> Result<(State, f64, bool)> {
        let t = self.step(state, &[ContinuousAction::new(vec![action])], rng)?;
        let terminal = t.terminal();
        Ok((t.state, t.rewards[0], terminal))
    }

    pub fn outcome(state: &State) -> f64 {
        state.values[1]
    }
}

impl Environment for NarrowPassage {
    fn spec(&self) -> &EnvironmentSpec {
        &self.spec
    }

    /// `values = [progress, outcome, last_action]`
    fn initial_state(&self) -> State {
        State::new(vec![0.0, RUNNING, f64::NAN], 0)
    }

    fn step(
        &self,
        state: &State,
        joint: &[ContinuousAction],
        rng: &mut Stream,
    ) -> Result<Transition> {
        check_step_preconditions(&self.spec, state, joint)?;
        let commanded = joint[0].values()[0];
        let a = if self.params.noise > 0.0 {
            (commanded + rng.uniform(-self.params.noise, self.params.noise))
                .clamp(ACTION_LO, ACTION_HI)
        } else {
            commanded
        };
        let depth = state.depth + 1;
        let progress = state.values[0];
        let (reward, outcome, progress) = if self.band(state.depth).contains(a) {
            if depth >= self.spec.horizon {
                (1.0 + self.params.completion_bonus, FINISHED, progress + 1.0)
            } else {
                (1.0, RUNNING, progress + 1.0)
            }
        } else if a <= self.params.exit_threshold {
            (self.params.exit_reward, EXITED, progress)
        } else {
            (0.0, CRASHED, progress)
        };
        Ok(Transition {
            state: State {
                values: vec![progress, outcome, commanded],
                terminal: outcome != RUNNING || depth >= self.spec.horizon,
                depth,
            },
            rewards: vec![reward],
        })
    }

    fn is_success(&self, state: &State) -> bool {
        Self::outcome(state) == FINISHED
    }
}
