//! Central tolerance constants.
//!
//! Two tiers: `STRUCTURAL` for single-operation guarantees (Hermiticity,
//! unitarity, normalization), `COMPOSITIONAL` for quantities accumulated
//! through propagators and products.

/// Structural tolerance for single operations (Hermitian, unitary, norm).
pub const STRUCTURAL: f64 = 1e-12;

/// Compositional tolerance for quantities built from chained propagators.
pub const COMPOSITIONAL: f64 = 1e-10;

/// Imaginary-part threshold below which a distribution counts as classical.
pub const CLASSICAL: f64 = 1e-10;

/// Hard cap on total qubit count for dense representations.
pub const MAX_QUBITS: usize = 14;
