#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod conformal;
pub mod convexity;
pub mod energy;
pub mod error;
pub mod field;
pub mod linearized;
pub mod sampling;
pub mod tensor;

pub use error::{Error, Result};
