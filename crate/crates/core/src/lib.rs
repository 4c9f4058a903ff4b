//! Kirkwood-Dirac quasiprobabilities in a qubit system-environment model.
//!
//! This crate computes KD quasiprobability distributions and their
//! non-classicality measures for a single system qubit coupled to a small
//! qubit environment, sweeps Haar-random measurement settings to map where
//! the model stops behaving classically, and emulates the gate-level
//! cycle-test circuit that measures the quasiprobabilities on hardware,
//! including Trotterized propagation, shot sampling, and stochastic Pauli
//! noise.
//!
//! # Qubit ordering
//!
//! Qubit 0 is the leftmost tensor factor, i.e. the most significant bit of
//! a computational basis index. The system qubit is always qubit 0;
//! environment qubit `E_i` is qubit `i`. Every module in this crate uses
//! this convention.

pub mod circuit;
pub mod error;
pub mod kdq;
pub mod model;
pub mod numerics;
pub mod sweep;
pub mod tol;

pub use error::{Error, Result};
pub use numerics::{DenseOperator, StateVector, C64};
