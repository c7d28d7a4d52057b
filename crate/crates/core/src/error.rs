use thiserror::Error;

/// Errors produced by the solver and its inputs.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("not a simplex point: {weights:?} (sum {sum})")]
    NotASimplexPoint { weights: Vec<f64>, sum: f64 },

    #[error("empty weight vector")]
    EmptyMeasure,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("action index {index} out of range for {n} actions")]
    ActionOutOfRange { index: usize, n: usize },

    #[error("invalid tolerance {0}; must be positive")]
    InvalidTolerance(f64),

    #[error("alpha {0} outside (0, 1]")]
    InvalidAlpha(f64),

    #[error("alpha {0} outside (0, 1); this operation needs herding players")]
    AlphaNotBelowOne(f64),

    #[error("herding mass too small: mu[{action}] = {mass} < 1 - alpha = {required}")]
    HerdingMassTooSmall {
        action: usize,
        mass: f64,
        required: f64,
    },

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("invalid built-in parameters: {0}")]
    InvalidParams(String),

    #[error("schema violation at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("degenerate game: support {support:?} admits a solution set of dimension {nullity}")]
    DegenerateGame { support: Vec<usize>, nullity: usize },

    #[error("ratio undefined: social optimum is zero")]
    UndefinedRatio,

    #[error("influence game is ill-posed: herding action {herding_action} has {count} lower-level equilibria")]
    IllPosed { herding_action: usize, count: String },

    #[error("equilibrium-herding set is empty")]
    EmptyHerdingSet,

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
