//! Numerics on the Siegel half-space of degree 2 and its ball model.

// `!(a < b)` is used on purpose so that NaN fails the test
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod boundary;
pub mod cli;
pub mod contraction;
pub mod error;
pub mod fixedset;
pub mod matkernel;
pub mod sampling;
pub mod siegel;
pub mod verify;

pub use error::{Error, Result};
