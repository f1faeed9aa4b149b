// `!(x > 0.0)` is used throughout so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exec;
pub mod format;
pub mod grid;
pub mod kernel;
pub mod models;
pub mod quadrature;
pub mod scaling;
pub mod specfn;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Execution;
