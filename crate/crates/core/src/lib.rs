//! Numerical workbench for Kropina metrics `F = alpha^2 / beta`.

pub mod einstein;
pub mod error;
pub mod expr;
pub mod fd;
pub mod finsler;
pub mod forms;
pub mod jet;
pub mod linalg;
pub mod riemann;
pub mod sampling;
pub mod scalar;
pub mod workbench;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, ParseError, Result};
pub use expr::{parse_expr, Expr};
pub use jet::{Jet, MultiIndex};
pub use scalar::Scalar;
