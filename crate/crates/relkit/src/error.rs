//! Error type shared across the crate.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    Domain(String),
    /// A floating-point computation produced something unusable.
    Numeric(String),
    /// A root was not bracketed or an iteration failed to converge.
    RootNotBracketed(String),
    /// A time step or solver run failed (CFL violation, vacuum, ...).
    Solver(String),
    /// Elliptic gauge condition violated (non-neutral periodic data).
    Gauge(String),
    /// Configuration file problem (unknown key, parse failure, ...).
    Config(String),
    /// Quadrature failed to converge to the requested tolerance.
    QuadratureNonConvergence(String),
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Numeric(m) => write!(f, "numeric error: {m}"),
            Error::RootNotBracketed(m) => write!(f, "root not bracketed: {m}"),
            Error::Solver(m) => write!(f, "solver error: {m}"),
            Error::Gauge(m) => write!(f, "gauge error: {m}"),
            Error::Config(m) => write!(f, "config error: {m}"),
            Error::QuadratureNonConvergence(m) => write!(f, "quadrature did not converge: {m}"),
            Error::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
