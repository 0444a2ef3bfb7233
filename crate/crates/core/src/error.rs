use thiserror::Error;

use crate::exposure::LoanId;
use crate::matrix::BankId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("bank {0} is outside the {1}-bank universe")]
    UnknownBank(BankId, usize),

    #[error("loan {0} is not on the ledger")]
    UnknownLoan(LoanId),

    #[error("invalid loan: {0}")]
    InvalidLoan(String),

    #[error("invalid CDS contract: {0}")]
    InvalidContract(String),

    #[error("naked CDS contracts are not allowed in this regime")]
    NakedForbidden,

    #[error("bank {0} is marked solvent but has non-positive equity")]
    ZeroEquity(BankId),

    #[error("invalid bank capital: {0}")]
    InvalidCapital(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("incomparable inputs: {0}")]
    Mismatch(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("io error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// Configuration problems map to a different process exit code than
    /// runtime failures.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(source: std::io::Error) -> Self {
        Error::Io {
            path: "<stream>".into(),
            source,
        }
    }
}
