use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unvisited action has infinite priority")]
    UnvisitedAction,
    #[error("node not expanded")]
    NodeNotExpanded,
    #[error("inverted bounds: dimension {dim} has lo {lo} > hi {hi}")]
    InvertedBounds { dim: usize, lo: f64, hi: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("action component {dim} = {value} outside [{lo}, {hi}]")]
    ActionOutOfBounds {
        dim: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("joint action has {got} agent actions, environment has {expected} agents")]
    AgentCountMismatch { expected: usize, got: usize },
    #[error("corrupt path: {0}")]
    CorruptPath(String),
    #[error("nothing to plan: root state is terminal")]
    NothingToPlan,
    #[error("state is terminal")]
    TerminalState,
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("empty action pool")]
    EmptyPool,
    #[error("all {0} workers failed")]
    AllWorkersFailed(usize),
    #[error("worker {worker} failed: {source}")]
    Worker {
        worker: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("unknown preset '{0}'")]
    UnknownPreset(String),
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("environment failure: {0}")]
    Environment(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
