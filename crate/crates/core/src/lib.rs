//! Norms, dual norms, level functions and modulars in Orlicz-Lorentz
//! function and sequence spaces.

// `!(x > 0.0)` is used on purpose so NaN lands in the rejecting branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod duality;
pub mod error;
pub mod level;
pub mod norms;
pub mod oracle;
pub mod orlicz;
pub mod quad;
pub mod rearrange;
pub mod scalar;

pub use error::{Error, Result};
