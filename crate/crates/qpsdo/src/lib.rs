//! The q-pseudodifferential-operator ring over the Jackson derivative:
//! twisted Leibniz composition, adjoints, the shift-to-derivative
//! (Cigler) and lambda-product formulas, the Dickey residue lemma, the
//! qKdV Lax machinery, and the classical Lenard recursion.

pub mod cigler;
pub mod coeff;
pub mod dickey;
pub mod lax;
pub mod lenard;
pub mod psdo;

pub use cigler::{cigler_expand, f_prefactors, lambda_products, LambdaProducts};
pub use coeff::{ring_qbinom, ring_qint, Atom, CoeffExpr, CoeffOps, ExprRing, SeriesRing, TermKey};
pub use dickey::{dickey_residue_check, DickeyReport};
pub use lax::{
    flow_consistency_residual, lax_solve, lax_solve_series, lax_solve_symbolic_q1,
    s1_flow_closed_form, u_flow_closed_form, w2_series_check, LaxData,
};
pub use lenard::{integrate_exact, lenard_operator, lenard_recursion};
pub use psdo::{
    psdo_add, psdo_adjoint, psdo_apply, psdo_commutator, psdo_from, psdo_minus, psdo_mul,
    psdo_neg, psdo_plus, psdo_residue, psdo_sub, QPsdo,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QPsdoError {
    #[error("a requested order lies below the truncation depth")]
    DepthExceeded,
    #[error("1 + q^{0} vanishes, (1+D)^{{-1}} undefined")]
    DegenerateDenominator(i64),
    #[error("a d_q^{{>=1}} coefficient of [L^3_+, L] failed to cancel: {0}")]
    NonvanishingHighOrder(String),
    #[error("right side is not an exact x-derivative: {0}")]
    NotExactDerivative(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}
