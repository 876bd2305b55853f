//! Arc length, causal checks and Frenet apparatus of timelike curves in
//! `E^2_1`, `E^3_1` and `E^4_2`.
//!
//! Frame conventions, with `'` the arc-length derivative:
//!
//! * `E^4_2`: `t' = -k1 n1`, `n1' = k1 t + k2 n2`, `n2' = k2 n1 + k3 n3`,
//!   `n3' = -k3 n2`; `t`, `n1` timelike; `k1 > 0`, `k2 > 0`, `k3` signed.
//! * `E^3_1`: `t' = k1 n`, `n' = k1 t + k2 b`, `b' = -k2 n`; `k1 > 0`.
//! * `E^2_1`: `t' = k1 n`, `n' = k1 t`; `k1 > 0`.
//!
//! The last frame vector is chosen so that the frame determinant is `+1`,
//! except in `E^2_1`, where `k1 > 0` fixes `n` and the determinant sign is
//! reported instead.

mod apparatus;
mod arclength;
mod curve;
mod sampled;

use thiserror::Error;

use crate::curve_dsl::EvalError;
use crate::pseudo_linalg::{CausalCharacter, LinalgError};

pub use apparatus::{
    curvature_matrix, frenet_apparatus, frenet_space, FrenetApparatus, FrenetEngine, FrenetSample, FrenetSpace,
    FrenetTolerances, DEFAULT_GRID,
};
pub use arclength::{arclength_reparam, arclength_reparam_with, ArcLength};
pub use curve::{speed_and_character, CurveRepr, CurveSpec, Interval};
pub use sampled::{SampleTable, DEFAULT_FD_SPACING};

pub(crate) use curve::linspace;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrenetError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("expected {expected} components, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unsupported space E{index}_{dimension}; supported: E1_2, E1_3, E2_4")]
    UnsupportedSpace { dimension: usize, index: usize },
    #[error("invalid domain [{start}, {end}]")]
    InvalidDomain { start: f64, end: f64 },
    #[error("invalid sample table: {0}")]
    InvalidTable(String),
    #[error("parameter {param} outside [{lo}, {hi}]")]
    OutOfRange { param: f64, lo: f64, hi: f64 },
    #[error("arc length {s} outside [0, {length}]")]
    ArcLengthOutOfRange { s: f64, length: f64 },
    #[error("curve is {character} at parameter {param}, expected timelike")]
    NotTimelike { param: f64, character: CausalCharacter },
    #[error("degenerate Frenet flag at derivative order {order} (parameter {param})")]
    DegenerateFlag { order: usize, param: f64 },
    #[error("frame convention violated at parameter {param}: {message}")]
    ConventionViolation { param: f64, message: String },
    #[error("curvature k{index} changes sign near arc length {s}")]
    CurvatureSignChange { index: usize, s: f64 },
}
