//! Shared numerical tolerances.

/// Fast and direct evaluation paths.
pub const PATH_AGREEMENT: f64 = 1e-9;
/// Algebraic identities (duality, replacement, reconstruction).
pub const IDENTITY: f64 = 1e-10;
/// Brute-force oracles on small grids.
pub const ORACLE: f64 = 1e-12;
/// Transform round trips and Parseval.
pub const ROUND_TRIP: f64 = 1e-12;
/// Values treated as vanishing outside a declared support.
pub const SUPPORT_ZERO: f64 = 1e-13;
/// Relative threshold for spectrum support detection.
pub const SPECTRUM_REL: f64 = 1e-10;
/// Relative tolerance of x-independence spot checks.
pub const X_INDEPENDENCE: f64 = 1e-12;
/// Hölder relation 1/p + 1/q = 1/r.
pub const HOLDER: f64 = 1e-12;
/// Slope-fit half width for lemma exponents.
pub const SLOPE_FIT: f64 = 0.2;
/// Slope-fit half width for kernel exponents.
pub const KERNEL_SLOPE_FIT: f64 = 0.15;
