//! Named tolerances used throughout the crate.

/// Eigen-residual tolerance, relative to `‖A‖_F`.
pub const TOL_EIG: f64 = 1e-10;
/// Orthonormality tolerance on `‖QᵀQ − I‖_F`.
pub const TOL_ORTH: f64 = 1e-10;
/// Householder pivot tolerance, relative to `‖M‖_F`.
pub const TOL_RANK: f64 = 1e-12;
/// Minimum distance of a shift from the spectrum, relative to `‖A‖_F`.
pub const TOL_SHIFT: f64 = 1e-12;
/// Smallest admissible eigenvalue of an SPD matrix, relative to its norm.
pub const TOL_SPD: f64 = 1e-12;
/// Relative slack allowed when checking a bound: `rhs − lhs ≥ −BOUND_SLACK·max(1, rhs)`.
pub const BOUND_SLACK: f64 = 1e-8;
/// Jacobi stopping threshold on the off-diagonal Frobenius mass, relative to `‖A‖_F`.
pub const JACOBI_OFF_DIAGONAL: f64 = 1e-12;
/// Rotation budget factor: at most `JACOBI_ROTATION_FACTOR·n²` rotations.
pub const JACOBI_ROTATION_FACTOR: usize = 30;
/// Eigenvalues closer than this (relative to `‖A‖_F`) form one cluster.
pub const CLUSTER_GAP: f64 = 1e-8;
/// Commutation residual `‖TA − AT‖_F / (‖A‖_F‖T‖_F)` accepted as commuting.
pub const TOL_COMMUTE: f64 = 1e-8;
/// Tolerance for `K ⊆ range(X)` containment checks.
pub const TOL_CONTAIN: f64 = 1e-10;
/// Matrix text files may carry at most this relative skew.
pub const TOL_SKEW: f64 = 1e-12;
