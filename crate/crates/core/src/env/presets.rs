//! Named scenario presets: an environment plus tuned search defaults.

use crate::error::{Error, Result};
use crate::search::SearchConfig;

use super::merge::{CoopMerge, MergeAgent, MergeParams, GOAL_TOLERANCE};
use super::narrow::{NarrowPassage, NarrowPassageParams};
use super::toy::ToyParabola;
use super::Environment;

/// Iteration budgets swept by default for every preset.
pub const DEFAULT_BUDGETS: [usize; 6] = [100, 200, 400, 1000, 2000, 4000];

pub struct Preset {
    pub name: &'static str,
    pub env: Box<dyn Environment>,
    /// Search defaults; budget and seed are overridden per run.
    pub config: SearchConfig,
    /// Easy presets saturate single-threaded and are left out of
    /// scalability scoring.
    pub easy: bool,
    pub budgets: Vec<usize>,
}

impl std::fmt::Debug for Preset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Preset")
            .field("name", &self.name)
            .field("env", &self.env.spec())
            .field("config", &self.config)
            .field("easy", &self.easy)
            .finish()
    }
}

const NAMES: [&str; 4] = ["merge-2a-easy", "merge-3a-tight", "narrow-5pct", "toy-parabola"];

pub fn preset_names() -> &'static [&'static str] {
    &NAMES
}

fn agent(x: f64, lane: f64, goal_lane: f64) -> MergeAgent {
    MergeAgent {
        x,
        lane,
        speed: 10.0,
        goal_lane,
    }
}

fn merge_config(horizon: usize) -> SearchConfig {
    SearchConfig {
        uct_exploration_c: 4.0,
        pw_coefficient: 1.0,
        pw_exponent: 0.5,
        kernel_bandwidth: 20.0,
        planning_horizon: horizon,
        ..SearchConfig::default()
    }
}

pub fn preset(name: &str) -> Result<Preset> {
    let p = match name {
        "merge-2a-easy" => {
            let horizon = 6;
            let env = CoopMerge::new(
                name,
                MergeParams {
                    lanes: 2,
                    merge_end: Some(70.0),
                    desired_speed: 10.0,
                    goal_tolerance: GOAL_TOLERANCE,
                    horizon,
                    agents: vec![agent(0.0, 0.0, 1.0), agent(30.0, 1.0, 1.0)],
                },
            )?;
            Preset {
                name: NAMES[0],
                env: Box::new(env),
                config: merge_config(horizon),
                easy: true,
                budgets: DEFAULT_BUDGETS.to_vec(),
            }
        }
        "merge-3a-tight" => {
            let horizon = 6;
            let env = CoopMerge::new(
                name,
                MergeParams {
                    lanes: 3,
                    merge_end: Some(45.0),
                    desired_speed: 10.0,
                    // the merging car must centre in a busy lane
                    goal_tolerance: 0.07,
                    horizon,
                    agents: vec![agent(10.0, 0.0, 1.0), agent(0.0, 1.0, 1.0), agent(20.0, 1.0, 1.0)],
                },
            )?;
            Preset {
                name: NAMES[1],
                env: Box::new(env),
                config: SearchConfig {
                    uct_exploration_c: 0.5,
                    kernel_bandwidth: 1000.0,
                    ..merge_config(horizon)
                },
                easy: false,
                budgets: DEFAULT_BUDGETS.to_vec(),
            }
        }
        "narrow-5pct" => {
            let params = NarrowPassageParams::default();
            let horizon = params.horizon;
            Preset {
                name: NAMES[2],
                env: Box::new(NarrowPassage::new(name, params)?),
                config: SearchConfig {
                    uct_exploration_c: 1.0,
                    pw_coefficient: 3.0,
                    pw_exponent: 0.5,
                    kernel_bandwidth: 2000.0,
                    planning_horizon: horizon,
                    ..SearchConfig::default()
                },
                easy: false,
                budgets: DEFAULT_BUDGETS.to_vec(),
            }
        }
        "toy-parabola" => Preset {
            name: NAMES[3],
            env: Box::new(ToyParabola::new()),
            config: SearchConfig {
                uct_exploration_c: 0.5,
                pw_coefficient: 1.0,
                pw_exponent: 0.5,
                kernel_bandwidth: 200.0,
                planning_horizon: 1,
                ..SearchConfig::default()
            },
            easy: true,
            budgets: DEFAULT_BUDGETS.to_vec(),
        },
        other => return Err(Error::UnknownPreset(other.to_owned())),
    };
    p.config.validate()?;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_resolves() {
        for name in preset_names() {
            let p = preset(name).unwrap();
            assert_eq!(p.name, *name);
            assert_eq!(p.env.spec().name, *name);
        }
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(preset("sc07"), Err(Error::UnknownPreset(_))));
    }
}
