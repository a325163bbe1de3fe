//! Numerical workbench for the A2n(2) open quantum spin chain.
//!
//! The crate builds the R-matrix, the two diagonal K-matrix families, the
//! double-row transfer matrix and the two-site Hamiltonians; realizes the
//! Uq(Bn) / Uq(Cn) generators and their coproducts; solves the nested Bethe
//! equations; and reconciles Bethe predictions with dense exact
//! diagonalization and with the classical tensor-power decompositions.
//!
//! Index conventions follow [`tensor::kron`]: site 1 is the slowest-varying
//! tensor factor. Local basis indices in the public API are 1-based, matching
//! the usual `e_{ab}` notation; internal storage is 0-based.

pub mod bethe;
pub mod chain;
pub mod error;
mod jet;
pub mod kmatrix;
pub mod params;
pub mod pipeline;
pub mod qgroup;
pub mod rep;
pub mod report;
pub mod rmatrix;
pub mod sampling;
pub mod spectrum;
pub mod tables;
pub mod tensor;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use params::{Algebra, BoundarySet, ModelParams};
pub use tensor::Operator;
