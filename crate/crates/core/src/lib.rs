//! Parallel Monte Carlo Tree Search for continuous state and action spaces.
//!
//! * [`search`]: single-tree MCTS with progressive widening, kernel
//!   similarity updates and Decoupled-UCT.
//! * [`parallel`]: leaf parallelization (mean / max aggregation) and root
//!   parallelization (similarity merge / similarity vote).
//! * [`env`]: the environment interface and built-in scenario presets.
//! * [`harness`]: closed-loop episodes, experiment plans, result files.
//! * [`rng`], [`stats`]: seed splitting and success-rate statistics.

pub mod action;
pub mod env;
pub mod error;
pub mod harness;
pub mod parallel;
pub mod rng;
pub mod search;
pub mod stats;

pub use action::{ActionBounds, ContinuousAction, Interval};
pub use env::{Environment, EnvironmentSpec, State, Transition};
pub use error::{Error, Result};
pub use parallel::{Strategy, StrategyKind};
pub use search::{run_search, ActionStat, SearchConfig, TreeNode};
