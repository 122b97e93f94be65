//! Directional traces and directional boundary measures on general bounded
//! open domains.

// Parameter guards are written as `!(x > 0.0)` so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calculus;
pub mod cli;
pub mod error;
pub mod fields;
pub mod fractal;
pub mod geometry;
pub mod measure;
pub mod oned;
pub mod quadrature;
pub mod trace;

pub use error::{Error, Result};
