use crate::action::{ContinuousAction, Interval};
use crate::error::Result;
use crate::rng::Stream;

use super::{check_step_preconditions, Environment, EnvironmentSpec, State, Transition};

/// Analytic optimum `(action, reward)` of the toy world.
pub const TOY_OPTIMUM: (f64, f64) = (0.7, 1.0);

/// Distance from the optimum within which a toy episode counts as solved.
pub const TOY_SUCCESS_RADIUS: f64 = 0.05;

/// Single-agent, single-step world with reward `1 - (a - 0.7)^2` on `[0, 1]`.
///
/// The state records the last action taken so success can be judged from
/// the final state alone.
#[derive(Debug, Clone)]
pub struct ToyParabola {
    spec: EnvironmentSpec,
}

impl ToyParabola {
    pub fn new() -> Self {
        Self {
            spec: EnvironmentSpec::new("toy-parabola", 1, vec![Interval::new(0.0, 1.0)], 1)
                .expect("static spec"),
        }
    }

    pub fn reward(action: f64) -> f64 {
        1.0 - (action - TOY_OPTIMUM.0).powi(2)
    }

    pub fn optimal() -> (f64, f64) {
        TOY_OPTIMUM
    }
}

impl Default for ToyParabola {
    fn default() -> Self {
        Self::new()
    }
}

impl Environment for ToyParabola {
    fn spec(&self) -> &EnvironmentSpec {
        &self.spec
    }

    fn initial_state(&self) -> State {
        State::new(vec![f64::NAN], 0)
    }

    fn step(
        &self,
        state: &State,
        joint: &[ContinuousAction],
        _rng: &mut Stream,
    ) -> Result<Transition> {
        check_step_preconditions(&self.spec, state, joint)?;
        let a = joint[0].values()[0];
        let depth = state.depth + 1;
        Ok(Transition {
            state: State {
                values: vec![a],
                terminal: depth >= self.spec.horizon,
                depth,
            },
            rewards: vec![Self::reward(a)],
        })
    }

    fn is_success(&self, state: &State) -> bool {
        let a = state.values[0];
        a.is_finite() && (a - TOY_OPTIMUM.0).abs() <= TOY_SUCCESS_RADIUS
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{derive_stream, StreamKey};

    #[test]
    fn optimum_and_reward() {
        assert_eq!(ToyParabola::optimal(), (0.7, 1.0));
        assert_eq!(ToyParabola::reward(0.7), 1.0);
    }

    #[test]
    fn grid_search_agrees_with_analytic_optimum() {
        let (best_a, best_r) = (0..=1000)
            .map(|i| i as f64 * 1e-3)
            .map(|a| (a, ToyParabola::reward(a)))
            .fold((f64::NAN, f64::NEG_INFINITY), |acc, (a, r)| {
                if r > acc.1 {
                    (a, r)
                } else {
                    acc
                }
            });
        assert!((best_a - TOY_OPTIMUM.0).abs() <= 1e-3);
        assert!((best_r - TOY_OPTIMUM.1).abs() <= 1e-3);
    }

    #[test]
    fn single_step_terminates() {
        let env = ToyParabola::new();
        let mut rng = derive_stream(&StreamKey::new(0));
        let t = env
            .step(&env.initial_state(), &[ContinuousAction::new(vec![0.72])], &mut rng)
            .unwrap();
        assert!(t.terminal());
        assert!(env.is_success(&t.state));
        assert!(env
            .step(&t.state, &[ContinuousAction::new(vec![0.5])], &mut rng)
            .is_err());
        assert!(!env.is_success(&env.initial_state()));
    }
}
