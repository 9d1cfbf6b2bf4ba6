//! q-special functions as truncated series, verifiers for their
//! q-difference equations, the Frobenius-type regular-singularity solver,
//! and the q-wave/heat/Helmholtz solution families.

mod bessel;
mod frobenius;
mod grid;
mod hermite;
mod laguerre;
mod pde;
mod phi;

pub use bessel::{bessel_eq11_residual, q_bessel, BesselKind};
pub use frobenius::{frobenius_solve, hypergeom_problem, FrobeniusProblem, FrobeniusSolution};
pub use grid::BiPoly;
pub use hermite::{discrete_q_hermite, q_hermite};
pub use laguerre::{classical_laguerre_coeff, q_laguerre};
pub use pde::{pde_solution_check, PdeCase};
pub use phi::{phi_rs, PhiSpec};

use qcore::{ParamContext, QCoreError, QRat};
use qseries::XSeries;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QSpecialError {
    #[error("denominator Pochhammer vanishes at term {0}")]
    UndefinedTerm(i64),
    #[error("indicial equation fails: {0}")]
    ResonantExponent(String),
    #[error("parameter constraint violated: {0}")]
    ConstraintViolated(String),
    #[error(transparent)]
    Core(#[from] QCoreError),
    #[error(transparent)]
    Series(#[from] qseries::QSeriesError),
}

/// Outcome of substituting a candidate solution into an equation: the
/// residual with a list of offending (degree, coefficient) pairs when
/// nonzero. A nonzero residual is a report, not an error.
#[derive(Debug, Clone)]
pub struct ResidualReport {
    pub case: String,
    pub zero: bool,
    pub offending: Vec<String>,
}

impl ResidualReport {
    pub fn from_series(case: &str, r: &XSeries, ctx: &ParamContext) -> Self {
        let offending: Vec<String> = r
            .degrees()
            .map(|(d, c)| format!("deg {}: {}", d, c.render(ctx)))
            .collect();
        ResidualReport {
            case: case.to_string(),
            zero: offending.is_empty(),
            offending,
        }
    }
}

/// Residual verifier for the named second-order equations.
pub enum OdeCase {
    /// The q-Bessel ladder product equation, order parameter m >= 1.
    BesselSecondOrder { m: i64 },
    /// The q-hypergeometric equation in formal A=q^a, B=q^b, C=q^c,
    /// checked on a supplied candidate (series plus leading exponent).
    Hypergeometric {
        ctx: ParamContext,
        candidate: FrobeniusSolution,
    },
}

pub fn verify_special_ode(case: &OdeCase, trunc: i64) -> Result<ResidualReport, QSpecialError> {
    match case {
        OdeCase::BesselSecondOrder { m } => Ok(bessel_eq11_residual(*m, trunc)),
        OdeCase::Hypergeometric { ctx, candidate } => {
            frobenius::hypergeom_residual(ctx, candidate, trunc)
        }
    }
}

/// The q-hypergeometric 2phi1(a, b; c; q, x) series.
pub fn two_phi_one(a: &QRat, b: &QRat, c: &QRat, trunc: i64) -> Result<XSeries, QSpecialError> {
    phi_rs(&PhiSpec {
        num_params: vec![a.clone(), b.clone()],
        den_params: vec![c.clone()],
        scale: QRat::one(),
        trunc,
    })
}
