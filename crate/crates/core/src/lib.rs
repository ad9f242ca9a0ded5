//! Sato-Tate groups of the Jacobians of y² = x^(2^m) − c and y² = x^(2^d+1) − cx:
//! exact construction from generators, Haar-measure moments, and numerical
//! moments from point counts.

pub mod arith;
pub mod curves;
pub mod cyclo;
pub mod error;
pub mod moments;
pub mod mtrank;
pub mod stgroup;

pub use error::{Error, Result};
