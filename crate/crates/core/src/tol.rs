//! Numerical tolerances used across the crate.
//!
//! Every comparison against an exact algebraic statement (completeness,
//! positivity, design residuals) goes through one of these constants so the
//! acceptance thresholds live in a single place.

/// Vectors with squared norm below this cannot be normalized into a state.
pub const STATE_NORM_FLOOR: f64 = 1e-12;

/// Max-entry residual allowed in `M - M^dagger` before a matrix is rejected
/// as non-Hermitian. Eigenvalue checks always run on the Hermitian part
/// `(M + M^dagger) / 2`, so this only guards against genuinely bad input.
pub const HERMITICITY: f64 = 1e-12;

/// Eigenvalues of an effect must lie in `[-EIG_SLACK, 1 + EIG_SLACK]`.
/// The same slack bounds how negative an eigenvalue of a density matrix
/// may be before it is rejected rather than clamped.
pub const EIG_SLACK: f64 = 1e-10;

/// Max-entry tolerance for matrix equality checks (completeness sums,
/// reconstruction checks).
pub const MATRIX_EQ: f64 = 1e-10;

/// Tolerance on scalar sums that must equal an exact value: ensemble weights
/// summing to 1, effect traces summing to d, density matrix trace 1.
pub const TRACE_EQ: f64 = 1e-10;

/// Born-rule probabilities may round slightly negative; anything in
/// `[CLAMP_NEGATIVE_PROB, 0)` is clamped to zero.
pub const CLAMP_NEGATIVE_PROB: f64 = -1e-12;

/// Max-entry residual below which a moment matrix counts as matching the
/// symmetric-subspace projector, i.e. the POVM passes order k.
pub const DESIGN_RESIDUAL: f64 = 1e-9;

/// Interpolation knots closer than this are rejected: the Hermite system
/// becomes numerically singular well before knots actually collide.
pub const KNOT_SEPARATION: f64 = 1e-6;

/// Hard cap on the tensor-product dimension `d^k`. Matrices at the cap are
/// 1024 x 1024, about 16 MiB of complex entries; beyond that the moment
/// checks stop being interactive.
pub const TENSOR_DIM_CAP: usize = 1024;

/// Largest base dimension accepted by the mutual-information maximizer.
/// The search space grows as d^2 states times 2d real amplitudes each.
pub const MI_DIM_CAP: usize = 4;
