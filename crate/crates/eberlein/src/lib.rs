//! Block Eberlein diagonalization method.
//!
//! A Jacobi-type eigensolver for arbitrary complex square matrices. Each
//! outer step works on one pivot block pair (p, q): a unitary elementary
//! block transformation diagonalizes the pivot submatrix of the Hermitian
//! part, then a non-unitary elementary block transformation built from
//! hyperbolic shears reduces the Frobenius norm. The iterates converge to
//! a normal matrix whose diagonal (after optional scalar preconditioning)
//! carries the eigenvalues, while the accumulated transformation columns
//! carry the eigenvectors.

pub mod blockmat;
pub mod cli;
pub mod driver;
pub mod io;
pub mod pivot;
pub mod shear_stage;
pub mod unitary_stage;

mod error;
mod rng;

pub use blockmat::{BlockPartition, Complex64, ComplexDenseMatrix, ElementaryBlockTransform, PivotPair};
pub use driver::{EberleinResult, Eigenpair, SolveOptions, SolveStatus};
pub use error::{Error, Result};
pub use pivot::PivotOrdering;
