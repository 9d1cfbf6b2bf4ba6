//! Rule-driven noncommutative differential calculus: normal forms over a
//! calculus preset, exterior derivative, zero-curvature derivations,
//! Maurer-Cartan eliminations, and the ordering symbol map between
//! q-differential and classical differential operators.

pub mod expr;
pub mod mc;
pub mod oz;
pub mod preset;
pub mod scalar;
pub mod zerocurv;

pub use expr::{apply_op, apply_word, Decor, NcAtom, NcExpr, NcKey};
pub use preset::{preset_parse, CalculusPreset, OpKind, PassTerm, RuleTerm};
pub use zerocurv::{classical_limit_nc, zero_curvature, ZeroCurvature};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NcError {
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("rule set fails the termination measure: {0}")]
    NonTerminating(String),
    #[error("confluence witness failed: {0}")]
    ConfluenceFailure(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("elimination left a nonzero residual: {0}")]
    EliminationFailed(String),
    #[error(transparent)]
    Core(#[from] qcore::QCoreError),
}

/// Parse a named built-in preset (validation is a separate, heavier step).
pub fn builtin(name: &str) -> Result<CalculusPreset, NcError> {
    let src = builtin_source(name)
        .ok_or_else(|| NcError::Unsupported(format!("unknown preset `{}`", name)))?;
    preset_parse(src)
}

pub fn builtin_source(name: &str) -> Option<&'static str> {
    Some(match name {
        "qkp74" => include_str!("../presets/qkp74.dsl"),
        "qplane_xt" => include_str!("../presets/qplane_xt.dsl"),
        "genplane_burgers" => include_str!("../presets/genplane_burgers.dsl"),
        "manin_xy" => include_str!("../presets/manin_xy.dsl"),
        "wz_plane" => include_str!("../presets/wz_plane.dsl"),
        "gamma_plus" => include_str!("../presets/gamma_plus.dsl"),
        "dmh_burgers" => include_str!("../presets/dmh_burgers.dsl"),
        "dmh_kp" => include_str!("../presets/dmh_kp.dsl"),
        "qline" => include_str!("../presets/qline.dsl"),
        "example_51" => include_str!("../presets/example_51.dsl"),
        _ => return None,
    })
}

pub const BUILTIN_NAMES: [&str; 10] = [
    "qkp74",
    "qplane_xt",
    "genplane_burgers",
    "manin_xy",
    "wz_plane",
    "gamma_plus",
    "dmh_burgers",
    "dmh_kp",
    "qline",
    "example_51",
];
