use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}, field `{field}`: {message}")]
    Parse {
        line: usize,
        field: String,
        message: String,
    },

    /// A hard size or work cap was exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("dynamic programming requires integer weights and capacity ({0}); use branch-and-bound")]
    NonIntegerWeights(String),

    #[error("infeasible at marginal parameter {marginal}: total dispatch {supply} < load {load}")]
    InfeasibleAtMarginal {
        marginal: f64,
        supply: f64,
        load: f64,
    },

    #[error("committed capacity {capacity} cannot meet load {load}")]
    DemandInfeasible { capacity: f64, load: f64 },

    #[error("committed minimum generation {min_generation} exceeds load {load}")]
    MinGenerationExceedsLoad { min_generation: f64, load: f64 },

    #[error("no feasible solution: {0}")]
    NoSolution(String),

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn at_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
