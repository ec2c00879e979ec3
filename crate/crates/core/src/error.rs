use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The correlation kernel has an eigenvalue below the clamp tolerance.
    #[error("correlation matrix is not PSD: eigenvalue {eigenvalue:e} below -{tolerance:e}")]
    NotPositiveSemidefinite { eigenvalue: f64, tolerance: f64 },

    #[error("infeasible frame: pilots and guard leave no data samples (eta = {eta})")]
    InfeasibleFrame { eta: f64 },

    #[error("config error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Config {
        line: Option<usize>,
        message: String,
    },

    #[error("infeasible link: {0:?}")]
    Infeasible(crate::linkbudget::Infeasibility),

    #[error("oracle refused: {0}")]
    OracleRefused(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

impl Error {
    /// Infeasibility outcomes are counted by sweeps rather than aborting them.
    pub fn infeasibility(&self) -> Option<crate::linkbudget::Infeasibility> {
        match self {
            Error::Infeasible(i) => Some(*i),
            Error::InfeasibleFrame { .. } => Some(crate::linkbudget::Infeasibility::FrameOverhead),
            _ => None,
        }
    }
}
