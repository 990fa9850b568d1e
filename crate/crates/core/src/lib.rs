//! Nonconvex composite minimization `min h(x) + P(Mx)` by a proximal
//! alternating direction method of multipliers, with a proximal gradient
//! reference solver and reproducible experiment drivers.

// `!(x > 0.0)` guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod admm;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod pg;
pub mod prox;
pub mod smooth;
pub mod sweep;

pub use error::{Error, Result};
