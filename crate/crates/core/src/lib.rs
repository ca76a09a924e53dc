//! Integration of functions on finite-dimensional algebras through
//! step-function refinement limits, with Lebesgue-Stieltjes measures and
//! measure-preserving transport between algebras.

pub mod algebra;
pub mod expr;
pub mod func;
pub mod integrator;
pub mod measure;
pub mod region;
pub mod scalar;
pub mod step;
pub mod transport;

pub use scalar::{rational, Rational, Scalar};
