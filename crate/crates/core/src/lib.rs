//! Phase-plane analysis of scalar-flat `U(n)`-invariant Kähler metrics on
//! domains of `C^n`.

// `!(a > b)` is used on purpose so that NaN takes the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod extrapolate;
pub mod ode;
pub mod penrose;
pub mod phase;
pub mod profile;
pub mod quad;
pub mod roots;
pub mod sphere;
pub mod verify;

pub use error::{Error, Result};
pub use phase::{classify, lambda_critical, level_value, vector_field, Dimension, PhasePoint, RegionLabel, RegionTag};

/// Formats a float with 16 digits after the point in exponent form.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}
