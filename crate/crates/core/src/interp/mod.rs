//! Complex interpolation on the strip `S = {0 ≤ Re z ≤ 1}`.
//!
//! Elements of the interpolation space are represented by explicit analytic
//! candidates (finite sums of exponentials, optionally multiplied by powers
//! of the conformal map φ and a Gaussian damping factor). The norm of a
//! candidate is the larger of its two boundary suprema, evaluated on a
//! symmetric grid of vertical offsets `t`.

mod candidate;
mod checks;
mod derived;
mod geometry;

pub use candidate::{boundary_norm, boundary_norm_with, single_exp_candidate, value_family_search, BoundaryReport, ExpCandidate, ExpTerm, GridConfig};
pub use checks::{ker_derivative_check, random_kernel_candidate, schwarz_pick_check, CheckReport, DiskGrid, MatrixPolynomial};
pub use derived::{derived_sandwich, derived_upper, derived_upper_with, DerivedBound};
pub use geometry::{beta_of, StripGeometry};
