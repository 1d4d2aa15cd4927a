use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical error: {message} (achieved error estimate {estimate:e})")]
    Numerical { message: String, estimate: f64 },

    #[error("inverse tail mass underflows the positive range at u = {u:e}")]
    Underflow { u: f64 },

    #[error("moment of order {order} diverges for {family}")]
    Divergent { family: String, order: u32 },

    #[error("truncation produced an empty measure")]
    EmptyMeasure,

    #[error("measure has zero total mass")]
    ZeroMass,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
