use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A coefficient or map evaluator produced a non-finite or invalid value.
    #[error("evaluation failed at t = {t}: {reason}")]
    Evaluation { t: f64, reason: String },

    #[error("assembly failed at collocation index k = {k} (t = {t}): {reason}")]
    Assembly { k: i64, t: f64, reason: String },

    /// The weight matrix of a generalized system is not positive definite.
    #[error("weight entry {index} is {value:e}, expected a positive value")]
    NotPositiveDefinite { index: usize, value: f64 },

    #[error("eigensolver did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("insufficient data: {usable} usable records, at least {needed} required")]
    InsufficientData { usable: usize, needed: usize },

    /// A failure inside a convergence study, tagged with where it happened.
    #[error("{problem} ({method}, n = {n}): {source}")]
    Study {
        problem: String,
        method: String,
        n: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors caused by the problem setup rather than by the numerics.
    pub fn is_configuration(&self) -> bool {
        if let Error::Study { source, .. } = self {
            return source.is_configuration();
        }
        matches!(
            self,
            Error::Domain(_)
                | Error::Parse { .. }
                | Error::Config(_)
                | Error::Io(_)
                | Error::Csv(_)
        )
    }
}
