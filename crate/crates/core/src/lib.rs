//! Exact-arithmetic homological algebra over concrete ring backends:
//! projective resolutions, Tor/Ext, finitistic-flat dimensions relative to
//! witness families, and small-finitistic-dimension certificates, all with
//! machine-checkable certificates and no floating point.

pub mod derived;
pub mod dsl;
pub mod error;
pub mod finitistic;
pub mod linalg;
pub mod matrix;
pub mod module;
pub mod resolution;
pub mod ring;
pub mod scalar;
pub mod snf;
pub mod suite;

pub use error::{Error, Result};
pub use matrix::Mat;
pub use ring::{FdAlgebra, RingHandle, TriangularData};
pub use scalar::{Domain, Field, Scalar};
