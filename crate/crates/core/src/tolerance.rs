//! Numerical tolerances shared by every module.
//!
//! Matrix norms are max-abs entry norms throughout.

/// Hermiticity check, relative to the largest entry.
pub const HERMITIAN: f64 = 1e-12;
/// Trace of a density operator.
pub const TRACE: f64 = 1e-12;
/// Smallest eigenvalue accepted for an input density operator.
pub const DENSITY_EIGEN: f64 = -1e-10;
/// Eigenvalues above `-EVOLVED_EIGEN` are clipped to zero after evolution;
/// anything lower is reported as a breakdown.
pub const EVOLVED_EIGEN: f64 = 1e-9;
/// Cutoff on `p_i + p_j` (and on outcome probabilities) in Fisher sums.
pub const FISHER_PROB: f64 = 1e-12;
/// Algebraic identities of the spherical-tensor basis.
pub const TENSOR: f64 = 1e-10;
/// Eigendecomposition reconstruction and orthonormality.
pub const EIGEN: f64 = 1e-10;
/// Negative eigenvalues smaller than this are treated as exact zeros.
pub const ROUNDOFF: f64 = 1e-14;
