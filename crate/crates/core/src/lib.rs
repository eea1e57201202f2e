//! Matrix-level norms for operator-space structures on sequence spaces.
//!
//! The crate evaluates norms of matrices with entries in `ℓ_p` under the
//! minimal and maximal quantizations, the row, column and OH structures and
//! complex interpolations between them. Optimization-defined norms come back
//! as certified intervals. The [`twist`] module covers the Kalton–Peck map and
//! twisted-sum quasinorms, and [`experiments`] reproduces the witness tables
//! and growth arguments as CSV.

pub mod error;
pub mod experiments;
pub mod interp;
pub mod linalg;
pub mod osnorm;
pub mod rng;
pub mod seqspace;
pub mod twist;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use osnorm::{evaluate, Budget, NormEstimate, Structure};
pub use seqspace::{FinSeq, MatrixSeq};
