//! Numerical laboratory for the deformed Hermitian Yang-Mills (dHYM / LYZ)
//! equation on flat Kähler tori.
//!
//! The crate solves the supercritical family
//! `θ_ω(χ + tω + i∂∂̄u) = θ(t)` by a damped, spectrally discretized Newton
//! method, marches `t → 0` toward the critical phase `(n−2)π/2`, and ships
//! desk-scale checkers for the cone algebra, phase brackets, dichotomy
//! constants, mollification identities, and the 3D/4D Hessian corollaries
//! that the continuity method rests on.
//!
//! Modules mirror the pipeline:
//! - [`cone`]: elementary symmetric polynomials, angle sums, Garding cones.
//! - [`field`]: periodic grids, spectral calculus, Hermitian matrix fields.
//! - [`phase`]: central charge `Z(t)`, principal argument, subsolution checks.
//! - [`solver`]: the damped Newton solver with free phase constant.
//! - [`continuation`]: the `t`-schedule driver and its trace.
//! - [`suites`]: end-to-end 3D (`σ₂ = 1`) and 4D (`σ₃ = σ₁`) experiments.
//! - [`weak`]: mollification, viscosity/cone checkers, comparison principle.
//! - [`report`]: configs, field files, trace CSV, JSON reports.

pub mod cone;
pub mod continuation;
pub mod error;
pub mod field;
pub mod herm;
pub mod labs;
pub mod phase;
pub mod reduce;
pub mod report;
pub mod sampling;
pub mod solver;
pub mod suites;
pub mod weak;

pub use error::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
