//! Brute-force matrix oracles on small truncated Fock spaces.
//!
//! Every closed form in [`crate::spectrum`] and every algebraic identity in
//! [`crate::algebra`] is re-derived here the expensive way: ladder operators
//! are laid down as dense matrices, operator products are computed by matrix
//! multiplication (never by hand-simplified amplitudes), Hamiltonians are
//! assembled term by term, rotations use a genuine matrix exponential, and
//! spectra come from dense Hermitian diagonalization. Agreement between the
//! two routes is the evidence the closed forms are transcribed correctly;
//! disagreement is attributed term by term in the validation report.
//!
//! Energies are expressed in units of ħ (rad/s) throughout this module so
//! that matrix entries stay O(1) for well-scaled test parameters.

mod hamiltonian;
mod perturb;
mod rotate;
mod space;

pub use hamiltonian::{
    build_hamiltonian, build_perturbation_term, HamiltonianVariant, PerturbTerm, SpaceSpec,
    ALL_PERTURB_TERMS,
};
pub use perturb::{
    exact_levels, first_order_state, matrix_element_oracle, matrix_element_oracle_block,
    unperturbed_levels,
};
pub use rotate::{
    bch2, conjugate_by, crt_projection, expm, rotate, rotation_operator, verify_crt_elimination,
    CrtReport,
};
pub use space::{
    block_index_of, block_indices, build_block_operators, coupling_between_blocks,
    deformed_gardiner_matrix, deformed_mode_matrix, restrict_to_block, BlockOperators,
    ExcitationBlock, FockOps, SpinOps, TensorSpace, TwoModeAtoms,
};

use nalgebra::DMatrix;

use crate::{Error, Result, C64};

/// Dense complex matrix tagged with the operator it represents.
#[derive(Debug, Clone)]
pub struct LabeledMatrix {
    pub label: String,
    pub entries: DMatrix<C64>,
}

impl LabeledMatrix {
    pub fn new(label: impl Into<String>, entries: DMatrix<C64>) -> Self {
        Self {
            label: label.into(),
            entries,
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }
}

/// Real parameter set for oracle-mode Hamiltonians. The susceptibility
/// pipeline runs with a complex coupling; validation replaces it by a real
/// one so every Hamiltonian stays Hermitian and exact diagonalization is
/// well-posed. The closed forms are polynomial in the coupling, so real-k
/// agreement pins them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleParams {
    /// Probe mode frequency (rad/s, O(1) in tests).
    pub omega_p: f64,
    /// Probe detuning (rad/s).
    pub delta: f64,
    /// Single-emitter coupling k (real, oracle mode).
    pub k: f64,
    /// Collective coupling K (real, oracle mode; not tied to √N·k here).
    pub k_collective: f64,
    /// Rotation parameter.
    pub lambda: f64,
    /// Collision deformation rate.
    pub kappa: f64,
    /// Condensate atom number entering η = 1/N.
    pub big_n: f64,
}

impl OracleParams {
    /// (−1/N + κ), the collision combination of the exciton terms.
    pub fn collision_combo(&self) -> f64 {
        self.kappa - 1.0 / self.big_n
    }

    /// (κ/2 − 1/2N), the collision combination of the coupling terms.
    pub fn half_collision_combo(&self) -> f64 {
        0.5 * self.collision_combo()
    }
}

/// Frobenius norm of a complex matrix.
pub fn frobenius(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest entry deviation from Hermiticity.
pub fn hermiticity_deviation(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Errors unless `m` is Hermitian to `tol` relative to its own scale.
pub fn require_hermitian(label: &str, m: &DMatrix<C64>, tol: f64) -> Result<()> {
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let dev = hermiticity_deviation(m);
    if dev > tol * scale {
        return Err(Error::NotHermitian {
            label: label.to_string(),
            deviation: dev,
        });
    }
    Ok(())
}
