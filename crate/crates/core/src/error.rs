use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),

    #[error("action `{action}` is not available in state `{state}`")]
    UnavailableAction { state: String, action: String },

    #[error("grid initial cell ({row}, {col}) lies outside a {height}x{width} grid")]
    InitialCellOutOfBounds {
        row: usize,
        col: usize,
        height: usize,
        width: usize,
    },

    #[error("unknown built-in `{0}`")]
    UnknownBuiltin(String),

    #[error("state budget of {cap} exceeded with {frontier} states still queued")]
    BudgetExceeded { cap: usize, frontier: usize },

    #[error("policy budget exceeded: {count} deterministic policies, limit {limit}")]
    PolicyBudgetExceeded { count: f64, limit: usize },

    #[error("policy undefined at reachable state {0}")]
    PolicyGap(String),

    #[error("accepting-set index {index} out of range 1..={count}")]
    AcceptingIndex { index: usize, count: usize },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
