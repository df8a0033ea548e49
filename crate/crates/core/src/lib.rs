//! Exact numerics for Rydberg-blockaded spin chains and the quantum link
//! model family.
//!
//! The crate is organized around a handful of building blocks:
//!
//! - [`hilbert`]: enumeration and indexing of the blockaded state space,
//!   including translation-sector projections for periodic chains.
//! - [`ops`] / [`trace`]: a small symbolic algebra for operator strings over
//!   `{P, Z, σ⁺, σ⁻}` with exact traces and Hilbert-Schmidt inner products,
//!   both at finite size and in the thermodynamic limit.
//! - [`models`]: sparse Hamiltonians (PXP, long-range Rydberg, spin form of
//!   the lattice Schwinger model, Ising/XXZ comparison models).
//! - [`evolve`]: Krylov time evolution and time-domain observables.
//! - [`spectral`]: full diagonalization, dynamical structure factors and
//!   their variants, participation ratios, scaling collapse, diagonal
//!   ensembles, and scar scans.
//! - [`liouville`]: the operator-space hopping graph built from an
//!   orthonormalized string basis, operator-size-truncated spectral
//!   functions, and mean-field dispersions.
//! - [`wigner`]: many-body Wigner distributions over field/current
//!   quadratures with Fejér-kernel regularization.
//! - [`entangle`]: reduced density matrices, mutual information, and
//!   logarithmic negativity on the non-factorizable blockaded space.
//! - [`analyze`]: bitstring datasets, post-selection, bootstrap errors,
//!   correlation fronts, Fourier band reconstruction, Ursell correlators,
//!   and cluster statistics.
//!
//! The [`acceptance`] module packages the end-to-end validation suite that
//! both `cargo test` and the CLI `report` subcommand execute.

pub mod acceptance;
pub mod analyze;
pub mod entangle;
pub mod error;
pub mod evolve;
pub mod grid;
pub mod hilbert;
pub mod io;
pub mod linalg;
pub mod liouville;
pub mod models;
pub mod ops;
pub mod sparse;
pub mod spectral;
pub mod trace;
pub mod wigner;

pub use error::{Error, Result};

/// The golden ratio, φ = (1 + √5)/2.
pub const PHI: f64 = 1.618033988749894848;

/// One drive cycle of the PXP model in natural units (Ω = 2 convention).
pub const PXP_CYCLE: f64 = std::f64::consts::PI;
