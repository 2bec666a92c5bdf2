#![forbid(unsafe_code)]
//! Tridiagonalization of the classical hypergeometric, Laguerre and Hermite
//! operators, the resulting Heun-type operators, their quadratic algebra and
//! the associated polynomial families, computed in exact rational arithmetic.

pub mod batch;
pub mod classical;
pub mod error;
pub mod exactnum;
pub mod heunpoly;
pub mod report;
pub mod rhalgebra;
pub mod sampling;
pub mod su11;
pub mod tridiag;
pub mod weylops;

pub use error::{Error, Result};
