use std::time::Instant;

use crate::action::ContinuousAction;
use crate::env::Environment;
use crate::error::Result;
use crate::parallel::Strategy;
use crate::rng::{derive_stream, StreamKey};
use crate::search::SearchConfig;

/// Outcome of one closed-loop episode.
#[derive(Debug, Clone, PartialEq)]
pub struct Episode {
    pub success: bool,
    pub steps: usize,
    pub wall_ms: f64,
    /// Joint action executed at every step.
    pub trace: Vec<Vec<ContinuousAction>>,
    /// Set when planning or stepping failed; the episode counts as failed.
    pub error: Option<String>,
}

/// Seed used to plan step `step` of an episode seeded with `episode_seed`.
pub fn plan_seed(episode_seed: u64, step: usize) -> u64 {
    StreamKey::new(episode_seed)
        .child("plan", step as u64)
        .to_seed()
}

/// Plans, executes the first joint action and replans until the episode
/// ends. `config` supplies everything but the seed.
pub fn run_episode(
    env: &dyn Environment,
    strategy: &Strategy,
    config: &SearchConfig,
    episode_seed: u64,
) -> Episode {
    let start = Instant::now();
    let mut env_rng = derive_stream(&StreamKey::new(episode_seed).child("episode-env", 0));
    let mut state = env.initial_state();
    let mut trace = Vec::new();
    let mut error = None;
    while !state.terminal {
        let step = trace.len();
        let cfg = config.clone().with_seed(plan_seed(episode_seed, step));
        let outcome: Result<_> = strategy
            .plan(env, &state, &cfg)
            .and_then(|d| Ok((env.step(&state, &d.joint, &mut env_rng)?, d.joint)));
        match outcome {
            Ok((t, joint)) => {
                trace.push(joint);
                state = t.state;
            }
            Err(e) => {
                error = Some(e.to_string());
                break;
            }
        }
    }
    Episode {
        success: error.is_none() && env.is_success(&state),
        steps: trace.len(),
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
        trace,
        error,
    }
}
