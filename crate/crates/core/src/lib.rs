//! Numerical laboratory for bilinear and multilinear maximal averages over the
//! surfaces `Σ |y^j|^{a_j} = 1` and over finite-type plane curves.

pub mod bilinear;
pub mod curves;
pub mod error;
pub mod fields;
pub mod fit;
pub mod lab;
pub mod multilinear;
pub mod quad;
pub mod regions;
pub mod sampling;

pub use error::{Error, Result};
