//! Exact scalar arithmetic for q-deformed computer algebra: rational
//! functions in `q` and declared formal parameters, q-numbers, Gaussian
//! binomials (including negative upper index) and q-Pochhammer symbols.
//!
//! Everything here is immutable and pure; values can be shared freely
//! across threads.

pub mod poly;
mod qfun;
mod qrat;

pub use poly::MPoly;
pub use qfun::{q_binom, q_int, q_int_base, q_pochhammer, q_pochhammer_base};
pub use qrat::{ParamContext, QRat};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QCoreError {
    /// The denominator vanishes at the requested evaluation point.
    #[error("denominator vanishes at the evaluation point")]
    PoleAtPoint,
    /// A parameter name was used without being declared in the context.
    #[error("undeclared parameter `{0}`")]
    UndeclaredParameter(String),
}
