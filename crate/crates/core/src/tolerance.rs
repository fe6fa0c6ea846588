//! Numeric tolerances shared by the kernel and the Hilbert-space backend.

/// Allowed deviation of a domain's probability sum from 1.
pub const PROB_SUM_TOL: f64 = 1e-9;
/// Born weights at or below this are treated as zero and their outcome dropped.
pub const OUTCOME_CUTOFF: f64 = 1e-9;
/// Norm, orthonormality, hermiticity, trace and phase comparisons.
pub const STATE_TOL: f64 = 1e-9;
/// Smallest Schmidt coefficient above this means the state is entangled.
pub const ENTANGLEMENT_TOL: f64 = 1e-7;
/// Reconstruction error allowed for a Schmidt decomposition.
pub const SCHMIDT_RECON_TOL: f64 = 1e-7;
/// Largest denominator of probabilities handed from floats to exact rationals.
pub const MAX_DENOMINATOR: i64 = 1_000_000;
