//! Operator-valued free probability over finite-dimensional matrix models.
//!
//! The crate computes moments, cumulants and conditional expectations with
//! amalgamation over a subalgebra tower `D ⊂ B`, and uses them to test
//! freeness with amalgamation, conjugate-variable and liberation-gradient
//! identities, and the limit laws of Gaussian band matrices.

pub mod algebra;
pub mod error;
pub mod linalg;
pub mod nc;
pub mod rng;
pub mod space;
pub mod cumulants;
pub mod fock;
pub mod freeness;
pub mod liberation;
pub mod randmat;
pub mod io;

pub use algebra::{AlgebraContext, DBlock, SubalgebraSpec, Target};
pub use error::{Error, Result};
pub use linalg::Mat;
pub use nc::{enumerate_nc, nesting_forest, NCPartition};
