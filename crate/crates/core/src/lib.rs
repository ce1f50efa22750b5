//! Asymptotic eigenvalue distributions of smooth tridiagonal and band-diagonal
//! matrix sequences, with first-order 1/D corrections, eigenstate profiles and
//! an exact finite-dimensional oracle.

pub mod error;
pub mod exec;
pub mod expr;
pub mod models;
pub mod numerics;
pub mod oracle;
pub mod sequence;
pub mod spectra;
pub mod states;
pub mod symbols;

pub use error::{Error, Result};
pub use exec::Execution;
