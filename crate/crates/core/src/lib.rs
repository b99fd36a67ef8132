//! Numerical lab for nonlocal difference-quotient functionals on the line:
//! exact interval geometry, weight functions, truncated double integrals,
//! and level-set region estimates.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod functional;
pub mod interval;
pub mod levelset;
pub mod logscalar;
pub mod piecewise;
pub mod montecarlo;
pub mod quadrature;
pub mod rational;
pub mod weight;

pub use error::{Error, Result};
