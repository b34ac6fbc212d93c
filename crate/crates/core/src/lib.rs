//! Hyperbolic Coxeter 4-polytopes presented by space-like normals in `R^{1,4}`.
//!
//! The Kerckhoff–Storm family `P_t` is built in as reference data.

pub mod acceptance;
pub mod arith;
pub mod assembly;
pub mod cli;
pub mod coxeter;
pub mod family;
pub mod lorentz;
pub mod scalar;
pub mod volume;

pub use scalar::{eps, Scalar};
