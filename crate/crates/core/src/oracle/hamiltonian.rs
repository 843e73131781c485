//! Term-by-term Hamiltonian assembly on truncated spaces.
//!
//! Every variant is built from ladder-matrix products and checked for
//! Hermiticity before it is handed to a solver; a failure there means a term
//! was transcribed wrongly, not that the physics is non-Hermitian.

use nalgebra::DMatrix;

use super::space::{
    block_indices, restrict_to_block, ExcitationBlock, FockOps, SpinOps, TensorSpace,
    TwoModeAtoms,
};
use super::{require_hermitian, LabeledMatrix, OracleParams};
use crate::{Error, Result, C64};

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Which model Hamiltonian to assemble (all in units of ħ).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HamiltonianVariant {
    /// Free probe + emitters with both the conserving and the
    /// counter-rotating coupling, on photon ⊗ collective-spin space.
    FullCrt,
    /// Effective model after the small rotation: dynamical Stark shift plus
    /// intensity-dependent coupling, on photon ⊗ collective-spin space.
    Effective,
    /// Same effective model written with two atomic modes (excited/ground),
    /// on photon ⊗ fixed-atom-number sector, exactly as printed.
    SecondQuantized,
    /// Collective-phonon form: the two-mode pair b_g⁺b_e enters only through
    /// b_q = N^{-1/2} b_g⁺ b_e, on photon ⊗ fixed-atom-number sector.
    Gardiner,
    /// Resonant exciton-photon part ω_p(a⁺a + b⁺b) + K(ab⁺ + a⁺b), plain
    /// bosonic exciton mode.
    H0,
    /// Perturbation: exciton energy, collision, Stark, phase-space-filling
    /// and counter-rotating corrections (number-conserving form).
    HPrime,
    /// H0 + HPrime.
    Total,
}

/// Truncated space on which to realize a variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceSpec {
    /// Photon mode ⊗ collective spin of `n_atoms` two-level emitters.
    Dicke { photon_dim: usize, n_atoms: usize },
    /// Photon mode ⊗ two atomic modes cut to the `n_atoms` sector.
    TwoMode { photon_dim: usize, n_atoms: usize },
    /// Photon mode ⊗ plain bosonic exciton mode, full truncated tensor grid.
    Bosonic {
        photon_dim: usize,
        exciton_dim: usize,
    },
    /// Single conserved block n + n_e = `n_exc` (valid for conserving
    /// variants only; built on an ambient grid with headroom, then cut).
    Block { n_exc: usize },
}

/// One named term of the perturbation, so residuals can be attributed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbTerm {
    /// ħ(ω_p/2 + Δ) b⁺b
    ExcitonEnergy,
    /// ħ(3ω_p/2 + Δ)(κ − 1/N) b⁺b⁺bb
    ExcitonCollision,
    /// ħλk b⁺b a⁺a
    StarkCross,
    /// ħλk(κ − 1/N) b⁺b⁺bb a⁺a (conserving form); the source prints
    /// b⁺b⁺b a⁺a, kept available for the diff report
    StarkCollision,
    /// ħK(κ/2 − 1/2N)(a b⁺b⁺b + a⁺ b⁺bb)
    PhaseSpaceFilling,
    /// −ħλ²K(a a⁺a b⁺ + a⁺a a⁺ b)
    CrtCoupling,
    /// −ħλ²K(κ/2 − 1/2N)(a a⁺a b⁺b⁺b + a⁺a a⁺ b⁺bb)
    CrtCouplingCollision,
}

pub const ALL_PERTURB_TERMS: [PerturbTerm; 7] = [
    PerturbTerm::ExcitonEnergy,
    PerturbTerm::ExcitonCollision,
    PerturbTerm::StarkCross,
    PerturbTerm::StarkCollision,
    PerturbTerm::PhaseSpaceFilling,
    PerturbTerm::CrtCoupling,
    PerturbTerm::CrtCouplingCollision,
];

impl PerturbTerm {
    pub fn label(&self) -> &'static str {
        match self {
            PerturbTerm::ExcitonEnergy => "exciton_energy",
            PerturbTerm::ExcitonCollision => "exciton_collision",
            PerturbTerm::StarkCross => "stark_cross",
            PerturbTerm::StarkCollision => "stark_collision",
            PerturbTerm::PhaseSpaceFilling => "phase_space_filling",
            PerturbTerm::CrtCoupling => "crt_coupling",
            PerturbTerm::CrtCouplingCollision => "crt_coupling_collision",
        }
    }
}

struct BosonicOps {
    space: TensorSpace,
    a: DMatrix<C64>,
    a_dag: DMatrix<C64>,
    b: DMatrix<C64>,
    b_dag: DMatrix<C64>,
}

impl BosonicOps {
    fn new(photon_dim: usize, exciton_dim: usize) -> Self {
        let space = TensorSpace::new(photon_dim, exciton_dim);
        Self {
            a: space.a(),
            a_dag: space.a_dag(),
            b: space.b(),
            b_dag: space.b_dag(),
            space,
        }
    }
}

fn h0_matrix(ops: &BosonicOps, p: &OracleParams) -> DMatrix<C64> {
    let na = &ops.a_dag * &ops.a;
    let nb = &ops.b_dag * &ops.b;
    (&na + &nb) * c(p.omega_p)
        + (&ops.a * &ops.b_dag + &ops.a_dag * &ops.b) * c(p.k_collective)
}

fn perturb_term_matrix(
    ops: &BosonicOps,
    term: PerturbTerm,
    p: &OracleParams,
    conserving_fix: bool,
) -> DMatrix<C64> {
    let (a, ad, b, bd) = (&ops.a, &ops.a_dag, &ops.b, &ops.b_dag);
    let na = ad * a;
    let nb = bd * b;
    match term {
        PerturbTerm::ExcitonEnergy => &nb * c(p.omega_p / 2.0 + p.delta),
        PerturbTerm::ExcitonCollision => {
            bd * bd * b * b * c((1.5 * p.omega_p + p.delta) * p.collision_combo())
        }
        PerturbTerm::StarkCross => &nb * &na * c(p.lambda * p.k),
        PerturbTerm::StarkCollision => {
            let coeff = c(p.lambda * p.k * p.collision_combo());
            if conserving_fix {
                bd * bd * b * b * &na * coeff
            } else {
                bd * bd * b * &na * coeff
            }
        }
        PerturbTerm::PhaseSpaceFilling => {
            (a * bd * bd * b + ad * bd * b * b) * c(p.k_collective * p.half_collision_combo())
        }
        PerturbTerm::CrtCoupling => {
            (a * ad * a * bd + ad * a * ad * b)
                * c(-p.lambda * p.lambda * p.k_collective)
        }
        PerturbTerm::CrtCouplingCollision => {
            (a * ad * a * bd * bd * b + ad * a * ad * bd * b * b)
                * c(-p.lambda * p.lambda * p.k_collective * p.half_collision_combo())
        }
    }
}

fn dicke_matrix(
    variant: HamiltonianVariant,
    p: &OracleParams,
    photon_dim: usize,
    n_atoms: usize,
) -> DMatrix<C64> {
    let photon = FockOps::new(photon_dim);
    let spin = SpinOps::new(n_atoms);
    let sdim = spin.dim;
    let id_ph = photon.identity();
    let id_sp = DMatrix::<C64>::identity(sdim, sdim);
    let a = photon.lower.kronecker(&id_sp);
    let ad = photon.raise.kronecker(&id_sp);
    let n_ph = &ad * &a;
    let s3 = id_ph.kronecker(&spin.s3);
    let sp = id_ph.kronecker(&spin.s_plus);
    let sm = id_ph.kronecker(&spin.s_minus);
    let id = DMatrix::<C64>::identity(n_ph.nrows(), n_ph.ncols());
    let half_atoms = &id * c(n_atoms as f64 / 2.0);
    let free = (&n_ph + &s3 + &half_atoms) * c(p.omega_p) + &s3 * c(p.delta);
    let rwa = (&a * &sp + &ad * &sm) * c(p.k);
    match variant {
        HamiltonianVariant::FullCrt => {
            let crt = (&ad * &sp + &a * &sm) * c(p.k);
            free + rwa + crt
        }
        HamiltonianVariant::Effective => {
            let stark =
                (&s3 * (&n_ph + &id * c(0.5)) - &half_atoms) * c(p.lambda * p.k);
            let nonlinear = (&ad * &a * &ad * &sm + &sp * &a * &ad * &a)
                * c(-p.lambda * p.lambda * p.k);
            free + stark + rwa + nonlinear
        }
        _ => unreachable!("dicke_matrix only handles FullCrt and Effective"),
    }
}

fn two_mode_matrix(
    variant: HamiltonianVariant,
    p: &OracleParams,
    photon_dim: usize,
    n_atoms: usize,
) -> DMatrix<C64> {
    let photon = FockOps::new(photon_dim);
    let atoms = TwoModeAtoms::new(n_atoms);
    let adim = atoms.dim();
    let id_at = DMatrix::<C64>::identity(adim, adim);
    let a = photon.lower.kronecker(&id_at);
    let ad = photon.raise.kronecker(&id_at);
    let n_ph = &ad * &a;
    let id = DMatrix::<C64>::identity(n_ph.nrows(), n_ph.ncols());
    match variant {
        HamiltonianVariant::SecondQuantized => {
            // Population difference and total enter exactly as printed:
            // the difference is NOT halved here, unlike the spin form.
            let diff = photon
                .identity()
                .kronecker(&(&atoms.be_dag_be - &atoms.bg_dag_bg));
            let total = photon
                .identity()
                .kronecker(&(&atoms.be_dag_be + &atoms.bg_dag_bg));
            let raise_e = photon.identity().kronecker(&atoms.raise_e);
            let lower_e = photon.identity().kronecker(&atoms.lower_e);
            (&n_ph + &diff + &total * c(0.5)) * c(p.omega_p)
                + &diff * c(p.delta)
                + (&diff * (&n_ph + &id * c(0.5)) - &total * c(0.5)) * c(p.lambda * p.k)
                + (&ad * &lower_e + &a * &raise_e) * c(p.k)
                + (&ad * &a * &ad * &lower_e + &a * &ad * &a * &raise_e)
                    * c(-p.lambda * p.lambda * p.k)
        }
        HamiltonianVariant::Gardiner => {
            let bq = photon.identity().kronecker(&atoms.b_q);
            let bq_dag = photon.identity().kronecker(&atoms.b_q_dag);
            let n_q = &bq_dag * &bq;
            &n_ph * c(p.omega_p)
                + &n_q * c(1.5 * p.omega_p + p.delta)
                + &n_q * &n_ph * c(p.lambda * p.k)
                + (&ad * &bq + &a * &bq_dag) * c(p.k_collective)
                + (&ad * &a * &ad * &bq + &a * &ad * &a * &bq_dag)
                    * c(-p.lambda * p.lambda * p.k_collective)
        }
        _ => unreachable!("two_mode_matrix only handles SecondQuantized and Gardiner"),
    }
}

fn bosonic_variant_matrix(
    variant: HamiltonianVariant,
    p: &OracleParams,
    ops: &BosonicOps,
) -> DMatrix<C64> {
    match variant {
        HamiltonianVariant::H0 => h0_matrix(ops, p),
        HamiltonianVariant::HPrime => {
            let mut sum = DMatrix::<C64>::zeros(ops.space.dim(), ops.space.dim());
            for term in ALL_PERTURB_TERMS {
                sum += perturb_term_matrix(ops, term, p, true);
            }
            sum
        }
        HamiltonianVariant::Total => {
            h0_matrix(ops, p) + bosonic_variant_matrix(HamiltonianVariant::HPrime, p, ops)
        }
        _ => unreachable!("bosonic_variant_matrix only handles H0/HPrime/Total"),
    }
}

fn variant_label(variant: HamiltonianVariant) -> &'static str {
    match variant {
        HamiltonianVariant::FullCrt => "H_full_crt",
        HamiltonianVariant::Effective => "H_effective",
        HamiltonianVariant::SecondQuantized => "H_second_quantized",
        HamiltonianVariant::Gardiner => "H_gardiner",
        HamiltonianVariant::H0 => "H0",
        HamiltonianVariant::HPrime => "H_prime",
        HamiltonianVariant::Total => "H_total",
    }
}

/// Assembles `variant` on `space` (units of ħ) and verifies Hermiticity.
pub fn build_hamiltonian(
    variant: HamiltonianVariant,
    p: &OracleParams,
    space: SpaceSpec,
) -> Result<LabeledMatrix> {
    let label = variant_label(variant);
    let entries = match (variant, space) {
        (
            HamiltonianVariant::FullCrt | HamiltonianVariant::Effective,
            SpaceSpec::Dicke {
                photon_dim,
                n_atoms,
            },
        ) => dicke_matrix(variant, p, photon_dim, n_atoms),
        (
            HamiltonianVariant::SecondQuantized | HamiltonianVariant::Gardiner,
            SpaceSpec::TwoMode {
                photon_dim,
                n_atoms,
            },
        ) => two_mode_matrix(variant, p, photon_dim, n_atoms),
        (
            HamiltonianVariant::H0 | HamiltonianVariant::HPrime | HamiltonianVariant::Total,
            SpaceSpec::Bosonic {
                photon_dim,
                exciton_dim,
            },
        ) => {
            let ops = BosonicOps::new(photon_dim, exciton_dim);
            bosonic_variant_matrix(variant, p, &ops)
        }
        (
            HamiltonianVariant::H0 | HamiltonianVariant::HPrime | HamiltonianVariant::Total,
            SpaceSpec::Block { n_exc },
        ) => {
            let block = ExcitationBlock { n_exc };
            let ambient = block.ambient();
            let ops = BosonicOps::new(ambient.photon.dim, ambient.exciton.dim);
            let full = bosonic_variant_matrix(variant, p, &ops);
            let idx = block_indices(&ops.space, n_exc);
            restrict_to_block(&full, &idx)
        }
        (v, s) => {
            return Err(Error::Dimension(format!(
                "variant {v:?} cannot be realized on space {s:?}"
            )))
        }
    };
    require_hermitian(label, &entries, 1e-10)?;
    Ok(LabeledMatrix::new(label, entries))
}

/// Builds a single named perturbation term on `space` without any
/// Hermiticity check, so the as-printed non-conserving variant can be
/// inspected by the diff report.
pub fn build_perturbation_term(
    term: PerturbTerm,
    p: &OracleParams,
    space: SpaceSpec,
    conserving_fix: bool,
) -> Result<LabeledMatrix> {
    let entries = match space {
        SpaceSpec::Bosonic {
            photon_dim,
            exciton_dim,
        } => {
            let ops = BosonicOps::new(photon_dim, exciton_dim);
            perturb_term_matrix(&ops, term, p, conserving_fix)
        }
        SpaceSpec::Block { n_exc } => {
            let block = ExcitationBlock { n_exc };
            let ambient = block.ambient();
            let ops = BosonicOps::new(ambient.photon.dim, ambient.exciton.dim);
            let full = perturb_term_matrix(&ops, term, p, conserving_fix);
            let idx = block_indices(&ops.space, n_exc);
            restrict_to_block(&full, &idx)
        }
        other => {
            return Err(Error::Dimension(format!(
                "perturbation terms live on bosonic spaces, not {other:?}"
            )))
        }
    };
    Ok(LabeledMatrix::new(term.label(), entries))
}
