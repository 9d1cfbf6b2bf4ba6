//! Schur-polynomial calculus, residue-based Hirota equation generation
//! for KP and its q-deformations, and tau-function verification by exact
//! rational arithmetic.

pub mod bilinear;
pub mod kp;
pub mod schur;
pub mod tau;
pub mod tpoly;

pub use bilinear::{
    bilinear_generate, eval_diffpoly, residue_oracle, residue_oracle_direct, tau_library,
    BilinearKey, BilinearSpec, DiffPoly, OracleReport, TauDecor,
};
pub use kp::{kp_extract, lambda_identity, printed_identity, FPoly};
pub use schur::{schur_apply, schur_monomials, schur_p, schur_p_signed};
pub use tau::verify_kp;
pub use tpoly::{c_of_x, d_shift, dq_x, dt, hirota_ctx, shift_times, t, tau_q, x_val};
