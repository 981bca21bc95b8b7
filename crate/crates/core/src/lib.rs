//! Quantum geometry of parametrized pure states and the multi-parameter
//! estimation bounds that follow from it.
//!
//! The numerical core is generic over the scalar type ([`Real`], implemented
//! for `f32` and `f64`); the `*64` aliases below fix it to `f64`, which is what
//! the command-line front end uses.

// `!(x > 0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimation;
pub mod geometry;
pub mod matkernel;
pub mod models;
pub mod protocol;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Real, C};

pub type CMatrix64 = matkernel::CMatrix<f64>;
pub type RMatrix64 = matkernel::RMatrix<f64>;
pub type Hermitian64 = matkernel::Hermitian<f64>;
