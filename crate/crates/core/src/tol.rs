//! Numerical tolerances shared across the crate.
//!
//! They are centralised so that library code and tests agree on what
//! "equal", "zero", and "degenerate" mean. All comparisons are absolute:
//! every matrix handled here has unit trace (or unit norm), so the scales
//! are already normalised.

/// Hermiticity, trace, and positivity checks when validating density matrices.
pub const STATE_CHECK: f64 = 1e-10;

/// Eigenvalues below this are treated as numerical zeros and dropped from
/// spectral decompositions (rank detection).
pub const ZERO_EIGENVALUE: f64 = 1e-10;

/// Two eigenvalues closer than this share a degenerate block.
pub const DEGENERACY: f64 = 1e-8;

/// Jacobi sweep target: off-diagonal Frobenius mass relative to the input
/// scale. Quadratic convergence makes this reachable in a handful of sweeps.
pub const JACOBI_OFF_DIAGONAL: f64 = 1e-15;

/// Hard cap on Jacobi sweeps; never reached for the dimensions handled here.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigenvalues of the fidelity operator below this floor are discarded
/// before the square root. Without the floor, O(1e-14) numerical junk turns
/// into O(1e-7) after the square root and pollutes values that should be
/// exact zeros.
pub const FIDELITY_EIGENVALUE_FLOOR: f64 = 1e-12;

/// Purity deficits 1 - Tr(rho^2) below this are numerical zeros: the
/// deficit of an exactly-product state lands within a few ulps of zero,
/// and the square root in the generalised concurrence would blow that up
/// to ~1e-9 if it were kept.
pub const PURITY_NOISE: f64 = 1e-14;

/// Unitarity check on caller-supplied block rotations.
pub const UNITARY_CHECK: f64 = 1e-9;

/// Default optimizer convergence tolerance (spread of objective values
/// across the simplex).
pub const OPTIMIZER_CONVERGENCE: f64 = 1e-9;

/// Default threshold under which a measure value counts as zero when
/// classifying states.
pub const CLASSIFY: f64 = 1e-6;
