//! Exact computer algebra for `S_n`-graded extensions of Lie algebras
//! (fractional superalgebras), their Hopf structure and their duals.

pub mod dualside;
pub mod error;
pub mod freealg;
pub mod gradesolve;
pub mod hopfcheck;
pub mod liealg;
pub mod linalg;
pub mod realize;
pub mod scalar;

pub use error::{Error, Result};
pub use freealg::{Gen, NcPoly, TensorPoly, Word};
pub use scalar::{CyclotomicConfig, Scalar};
