use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at position {position}: expected {expected}")]
    Syntax { position: usize, expected: String },

    #[error("unknown identifier `{name}` at position {position}")]
    UnknownIdentifier { name: String, position: usize },

    #[error("domain error in `{expr}` at x = {x}")]
    Domain { expr: String, x: f64 },

    #[error("quadrature did not converge (estimate {estimate:e}, error {error:e})")]
    Quadrature { estimate: f64, error: f64 },

    #[error("no sign change on [{a}, {b}]")]
    Bracket { a: f64, b: f64 },

    #[error("{0} failed to converge")]
    Convergence(String),

    #[error("lambda = {0} lies outside the spectrum")]
    OutsideSpectrum(f64),

    #[error("invalid input: {0}")]
    Invalid(String),
}
