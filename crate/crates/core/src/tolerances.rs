//! Numerical tolerances shared by checks and experiments.

/// Absolute tolerance for identities that are exact in exact arithmetic
/// (recovery, plaquette closure, crossing and monotonicity inequalities).
pub const IDENTITY: f64 = 1e-9;

/// Tolerance on the total mass of a path measure.
pub const MASS: f64 = 1e-12;

/// Lower bound on `alpha` and `1 - alpha` for stationary cocycles.
pub const ALPHA_MARGIN: f64 = 1e-6;
