//! Matrix ingestion, test-matrix generators and result serialization.

mod generators;
mod matrix_market;
mod outputs;

pub use generators::{gen_test_matrix, random_unitary, TestMatrixKind, TestMatrixSpec};
pub use matrix_market::{read_matrix_market, write_matrix_market};
pub use outputs::{atomic_write, write_outputs, ResultDocument, RunConfig};
