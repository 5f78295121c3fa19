//! Error type shared by every module in the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid spatial dimension N = {0}: N >= 1 required")]
    InvalidDimension(u32),

    #[error("invalid force sign delta = {0}: expected -1, 0, or +1")]
    InvalidForceSign(i32),

    #[error("negative density {value}{}", .cell.map(|i| format!(" at cell {i}")).unwrap_or_default())]
    NegativeDensity { value: f64, cell: Option<usize> },

    #[error("initial profile violates compact support: {field}(R) = {value}, expected 0")]
    SupportViolation { field: &'static str, value: f64 },

    #[error("invalid weight exponent n = {0}: n > 0 required")]
    InvalidExponent(f64),

    #[error("theorem hypothesis violated: H0 = {h0} is not positive")]
    HypothesisViolated { h0: f64 },

    #[error("riccati floor undefined at t = {t}: domain is 0 <= t < {limit}")]
    FloorDomain { t: f64, limit: f64 },

    #[error("non-finite {quantity} at t = {time}, cell {cell}")]
    NumericalOverflow {
        time: f64,
        cell: usize,
        quantity: &'static str,
    },

    #[error("characteristics oracle not applicable: {0}")]
    OracleNotApplicable(String),

    #[error("characteristic fan needs at least two shells, got {0}")]
    InsufficientShells(usize),

    #[error("invalid field sample: {0}")]
    InvalidState(String),

    #[error("configuration field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("failed to parse configuration: {0}")]
    ConfigParse(String),

    #[error("inconsistent report inputs: {0}")]
    Consistency(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(field: &str, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
