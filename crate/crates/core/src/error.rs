use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("model `{model}` failed at sample {sample}: {message}")]
    ModelEvaluation {
        model: String,
        sample: usize,
        message: String,
    },

    #[error("model `{model}` returned a non-finite value at sample {sample}")]
    NonFiniteOutput { model: String, sample: usize },

    #[error("model `{model}` (column {index}) has zero variance; correlation is undefined")]
    DegenerateModel { model: String, index: usize },

    #[error("models {first} and {second} have equal squared correlation with the high-fidelity model")]
    TiedCorrelations { first: usize, second: usize },

    #[error("{count} models exceeds the selection cap of {cap}")]
    TooManyModels { count: usize, cap: usize },

    #[error("squared correlations are not strictly decreasing at position {index}")]
    UnorderedCorrelations { index: usize },

    #[error("cost-ratio condition fails at position {index}")]
    CostRatio { index: usize },

    #[error("budget {budget} leaves no residual for the free models (fixed cost {fixed})")]
    InsufficientResidualBudget { budget: f64, fixed: f64 },

    #[error("budget {budget} is below the minimum {minimum} needed to evaluate every model once")]
    BudgetInfeasible { budget: f64, minimum: f64 },

    #[error("no integer allocation satisfies the budget")]
    EmptyFeasibleSet,

    #[error("evaluation count for model {index} is zero")]
    ZeroCount { index: usize },

    #[error("plan has {plan} entries but {models} models were supplied")]
    PlanMismatch { plan: usize, models: usize },

    #[error("snapshot matrix has numerical rank {rank}, below the requested dimension {requested}")]
    RankDeficient { rank: usize, requested: usize },

    #[error("non-finite state at time step {step}")]
    NonFiniteState { step: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
