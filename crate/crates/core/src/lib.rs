//! Probe-field dispersion in a collision-deformed two-mode condensate.
//!
//! The crate computes the linear and nonlinear susceptibilities seen by a weak
//! probe coupled to a condensate of three-level atoms driven in the
//! transparency regime, keeping the counter-rotating corrections to the
//! exciton-photon coupling and an algebraic deformation modelling atomic
//! collisions. From the susceptibility it derives the refractive index, group
//! index and group velocity as functions of probe detuning.
//!
//! Every closed-form quantity has an independent brute-force check: the
//! steady state of the three-level master equation is solved numerically, and
//! the perturbative spectrum is compared against exact diagonalization on
//! small truncated Fock spaces (see [`oracle`] and [`validate`]).

pub mod algebra;
pub mod bloch;
pub mod chi;
pub mod oracle;
pub mod params;
pub mod spectrum;
pub mod sweep;
pub mod validate;

use num_complex::Complex64;

/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Vacuum permittivity (F/m).
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;

pub(crate) type C64 = Complex64;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("linear solve failed: {0}")]
    Solver(String),
    #[error("matrix {label} is not Hermitian (max asymmetry {deviation:.3e})")]
    NotHermitian { label: String, deviation: f64 },
    #[error("rotation is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("generator times angle is not anti-Hermitian (deviation {0:.3e})")]
    NotAntiHermitian(f64),
    #[error("degenerate unperturbed levels {a} and {b} (spacing {spacing:.3e})")]
    DegenerateLevels { a: usize, b: usize, spacing: f64 },
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("near-singular denominator in {what} (magnitude {magnitude:.3e})")]
    NearSingular { what: &'static str, magnitude: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub type Result<T> = std::result::Result<T, Error>;
