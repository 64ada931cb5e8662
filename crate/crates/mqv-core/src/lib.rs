//! Exact computational toolkit for multiplicative quiver varieties.
//!
//! The crate provides dense linear algebra over the Gaussian rationals,
//! doubled quivers with explicit factor orders, the multiplicative
//! preprojective relation and its additive linearization, theta-stability
//! verdicts with certificates, the middle convolution functor, and the
//! dictionary between star-shaped quiver representations and monodromy
//! tuples on the punctured sphere.

pub mod error;
pub mod scalar;
pub mod matrix;
pub mod numeric;
pub mod intertwiner;
pub mod quiver;
pub mod root;
pub mod rep;
pub mod subspace;
pub mod framed;
pub mod stability;
pub mod convolution;
pub mod star;
pub mod jacobian;
pub mod json;

pub use error::CoreError;
pub use scalar::{GaussianRational, Mode, Scalar};
pub use matrix::Matrix;
