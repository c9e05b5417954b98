//! Numerical toolkit for elliptic analysis on ALG ends.
//!
//! The end is modeled as `[R, ∞) × S¹ × Y` with the product metric
//! `(i/2)dz dz̄ + ω_Y`; every field is stored mode-wise as radial profiles
//! indexed by a circle frequency `k` and a fiber Laplace eigenvalue `μ`.
//! On top of that representation the crate provides:
//!
//! * the compact fiber reduced to its Laplace spectrum ([`fiber_spectrum`]),
//! * per-mode radial operators, Green solves, harmonic extensions, weighted
//!   norms and Poincaré constants ([`spectral_laplace`]),
//! * the quadratic volume-form nonlinearity, decay-exponent fits and the
//!   doubling bootstrap ([`decay_bootstrap`]),
//! * the explicit ansatz constants: radial potentials, cutoff integrals,
//!   the constraint solver, the gluing positivity check, the local
//!   `i∂∂̄` relations and σ-averaging ([`ansatz_toolkit`]),
//! * the fixed-locus census: Betti numbers, family dimensions, tables and
//!   the admissible-order list ([`nikulin_census`]),
//! * reproducible file-emitting commands ([`runner`]).

pub mod ansatz_toolkit;
pub mod bessel;
pub mod decay_bootstrap;
pub mod error;
pub mod fiber_spectrum;
pub mod nikulin_census;
pub mod runner;
pub mod spectral_laplace;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
