//! Truncated Fock spaces, ladder matrices and restriction to conserved
//! blocks.
//!
//! Operator products are always formed by dense matrix multiplication on a
//! space with enough headroom that no intermediate state leaks through the
//! cutoff; hand-simplified amplitudes never enter the oracle side.

use nalgebra::DMatrix;

use crate::algebra::DeformationFunction;
use crate::{Error, Result, C64};

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Ladder matrices of one bosonic mode truncated to `dim` Fock states.
#[derive(Debug, Clone)]
pub struct FockOps {
    pub dim: usize,
    pub lower: DMatrix<C64>,
    pub raise: DMatrix<C64>,
    pub number: DMatrix<C64>,
}

impl FockOps {
    pub fn new(dim: usize) -> Self {
        let mut lower = DMatrix::<C64>::zeros(dim, dim);
        for n in 1..dim {
            lower[(n - 1, n)] = c((n as f64).sqrt());
        }
        let raise = lower.adjoint();
        let number = &raise * &lower;
        Self {
            dim,
            lower,
            raise,
            number,
        }
    }

    pub fn identity(&self) -> DMatrix<C64> {
        DMatrix::identity(self.dim, self.dim)
    }
}

/// Collective spin matrices for `n_atoms` two-level emitters in the fully
/// symmetric manifold, S = n_atoms/2, basis m = −S … +S.
#[derive(Debug, Clone)]
pub struct SpinOps {
    pub n_atoms: usize,
    pub dim: usize,
    pub s3: DMatrix<C64>,
    pub s_plus: DMatrix<C64>,
    pub s_minus: DMatrix<C64>,
}

impl SpinOps {
    pub fn new(n_atoms: usize) -> Self {
        let dim = n_atoms + 1;
        let s = n_atoms as f64 / 2.0;
        let mut s3 = DMatrix::<C64>::zeros(dim, dim);
        let mut s_plus = DMatrix::<C64>::zeros(dim, dim);
        for i in 0..dim {
            let m = i as f64 - s;
            s3[(i, i)] = c(m);
            if i + 1 < dim {
                s_plus[(i + 1, i)] = c((s * (s + 1.0) - m * (m + 1.0)).sqrt());
            }
        }
        let s_minus = s_plus.adjoint();
        Self {
            n_atoms,
            dim,
            s3,
            s_plus,
            s_minus,
        }
    }
}

/// Photon mode ⊗ exciton mode, both plain bosons. Index layout:
/// `i = n_photons * exciton_dim + n_excitons`.
#[derive(Debug, Clone)]
pub struct TensorSpace {
    pub photon: FockOps,
    pub exciton: FockOps,
}

impl TensorSpace {
    pub fn new(photon_dim: usize, exciton_dim: usize) -> Self {
        Self {
            photon: FockOps::new(photon_dim),
            exciton: FockOps::new(exciton_dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.photon.dim * self.exciton.dim
    }

    pub fn a(&self) -> DMatrix<C64> {
        self.photon.lower.kronecker(&self.exciton.identity())
    }

    pub fn a_dag(&self) -> DMatrix<C64> {
        self.photon.raise.kronecker(&self.exciton.identity())
    }

    pub fn b(&self) -> DMatrix<C64> {
        self.photon.identity().kronecker(&self.exciton.lower)
    }

    pub fn b_dag(&self) -> DMatrix<C64> {
        self.photon.identity().kronecker(&self.exciton.raise)
    }

    pub fn identity(&self) -> DMatrix<C64> {
        DMatrix::identity(self.dim(), self.dim())
    }

    /// Total excitation n + n_e of tensor index `i`.
    pub fn excitation_of(&self, i: usize) -> usize {
        i / self.exciton.dim + i % self.exciton.dim
    }
}

/// The conserved subspace n + n_e = N_exc, dimension N_exc + 1, basis
/// ordered by photon number n = 0 … N_exc (so m = n − j runs −j … +j).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExcitationBlock {
    pub n_exc: usize,
}

impl ExcitationBlock {
    pub fn dim(&self) -> usize {
        self.n_exc + 1
    }

    /// Headroom so that every cubic operator product stays inside the
    /// truncated tensor space when applied to block states.
    pub fn ambient(&self) -> TensorSpace {
        TensorSpace::new(self.n_exc + 4, self.n_exc + 4)
    }
}

/// Tensor-space indices of the block states, ordered by photon number.
pub fn block_indices(space: &TensorSpace, n_exc: usize) -> Vec<usize> {
    (0..=n_exc)
        .map(|n| n * space.exciton.dim + (n_exc - n))
        .collect()
}

/// Restriction of a full-space operator to the given index set.
pub fn restrict_to_block(m: &DMatrix<C64>, indices: &[usize]) -> DMatrix<C64> {
    let d = indices.len();
    DMatrix::from_fn(d, d, |r, s| m[(indices[r], indices[s])])
}

/// Largest matrix element connecting states of different total excitation —
/// zero for every conserving Hamiltonian.
pub fn coupling_between_blocks(m: &DMatrix<C64>, space: &TensorSpace) -> f64 {
    let mut worst: f64 = 0.0;
    for r in 0..m.nrows() {
        for s in 0..m.ncols() {
            if space.excitation_of(r) != space.excitation_of(s) {
                worst = worst.max(m[(r, s)].norm());
            }
        }
    }
    worst
}

/// Angular-momentum and number operators restricted to one excitation block,
/// all obtained from ladder-matrix products on the ambient space.
#[derive(Debug, Clone)]
pub struct BlockOperators {
    pub n_exc: usize,
    pub j_x: DMatrix<C64>,
    pub j_y: DMatrix<C64>,
    pub j_z: DMatrix<C64>,
    pub j_plus: DMatrix<C64>,
    pub j_minus: DMatrix<C64>,
    pub n_hat: DMatrix<C64>,
    pub photon_number: DMatrix<C64>,
    pub exciton_number: DMatrix<C64>,
}

pub fn build_block_operators(n_exc: usize) -> BlockOperators {
    let block = ExcitationBlock { n_exc };
    let space = block.ambient();
    let idx = block_indices(&space, n_exc);
    let (a, ad, b, bd) = (space.a(), space.a_dag(), space.b(), space.b_dag());
    let na = &ad * &a;
    let nb = &bd * &b;
    let j_plus_full = &ad * &b;
    let j_minus_full = &a * &bd;
    let half = c(0.5);
    let i2 = C64::new(0.0, 2.0);
    let j_z_full = (&na - &nb) * half;
    let j_x_full = (&j_plus_full + &j_minus_full) * half;
    let j_y_full = (&j_plus_full - &j_minus_full) / i2;
    BlockOperators {
        n_exc,
        j_x: restrict_to_block(&j_x_full, &idx),
        j_y: restrict_to_block(&j_y_full, &idx),
        j_z: restrict_to_block(&j_z_full, &idx),
        j_plus: restrict_to_block(&j_plus_full, &idx),
        j_minus: restrict_to_block(&j_minus_full, &idx),
        n_hat: restrict_to_block(&(&na + &nb), &idx),
        photon_number: restrict_to_block(&na, &idx),
        exciton_number: restrict_to_block(&nb, &idx),
    }
}

/// Two atomic modes (excited e, ground g) cut to the sector with exactly
/// `n_atoms` atoms: basis n_e = 0 … N, n_g = N − n_e. The collective phonon
/// b_q = N^{-1/2} b_g⁺ b_e is a genuine two-mode matrix product restricted
/// afterwards.
#[derive(Debug, Clone)]
pub struct TwoModeAtoms {
    pub n_atoms: usize,
    pub be_dag_be: DMatrix<C64>,
    pub bg_dag_bg: DMatrix<C64>,
    /// b_e⁺ b_g (raises n_e).
    pub raise_e: DMatrix<C64>,
    /// b_g⁺ b_e (lowers n_e).
    pub lower_e: DMatrix<C64>,
    pub b_q: DMatrix<C64>,
    pub b_q_dag: DMatrix<C64>,
}

impl TwoModeAtoms {
    pub fn new(n_atoms: usize) -> Self {
        let d = n_atoms + 2;
        let e = FockOps::new(d);
        let g = FockOps::new(d);
        // Full two-mode space, index i = n_e * d + n_g.
        let be = e.lower.kronecker(&g.identity());
        let bg = e.identity().kronecker(&g.lower);
        let be_dag = be.adjoint();
        let bg_dag = bg.adjoint();
        // N-conserving sector, ordered by n_e.
        let idx: Vec<usize> = (0..=n_atoms).map(|ne| ne * d + (n_atoms - ne)).collect();
        let lower_full = &bg_dag * &be;
        let raise_full = &be_dag * &bg;
        let scale = c(1.0 / (n_atoms as f64).sqrt());
        let lower_e = restrict_to_block(&lower_full, &idx);
        let raise_e = restrict_to_block(&raise_full, &idx);
        TwoModeAtoms {
            n_atoms,
            be_dag_be: restrict_to_block(&(&be_dag * &be), &idx),
            bg_dag_bg: restrict_to_block(&(&bg_dag * &bg), &idx),
            b_q: &lower_e * scale,
            b_q_dag: &raise_e * scale,
            lower_e,
            raise_e,
        }
    }

    pub fn dim(&self) -> usize {
        self.n_atoms + 1
    }
}

/// Generic deformed lowering operator A = c·f(n̂) as a matrix: the diagonal
/// of f comes straight from the profile, the lowering from the ladder
/// matrix.
pub fn deformed_mode_matrix(dim: usize, f: &DeformationFunction) -> DMatrix<C64> {
    let mode = FockOps::new(dim);
    let f_diag = DMatrix::from_fn(dim, dim, |r, s| {
        if r == s {
            c(f.eval(r as u64))
        } else {
            c(0.0)
        }
    });
    &mode.lower * &f_diag
}

/// The expanded collision-deformed collective phonon as a verbatim operator
/// product: (b − (1/2N) b⁺bb)·[1 − (κ/2)(1 − (b⁺b − (1/N) b⁺b⁺bb))], with
/// the bracketed factor applied to the state first.
pub fn deformed_gardiner_matrix(dim: usize, kappa: f64, big_n: f64) -> DMatrix<C64> {
    let m = FockOps::new(dim);
    let (b, bd) = (&m.lower, &m.raise);
    let nb = bd * b;
    let depleted = b - bd * b * b * c(0.5 / big_n);
    let pair = bd * bd * b * b;
    let inner = &nb - &pair * c(1.0 / big_n);
    let bracket = m.identity() - (m.identity() - inner) * c(kappa / 2.0);
    depleted * bracket
}

/// Checks `2j` and `2m` describe a valid state and returns the block index
/// n = j + m.
pub fn block_index_of(two_j: u64, two_m: i64) -> Result<usize> {
    let two_j_i = two_j as i64;
    if two_m.abs() > two_j_i || (two_j_i - two_m) % 2 != 0 {
        return Err(Error::InvalidParameter {
            name: "two_m",
            reason: format!("(2j, 2m) = ({two_j}, {two_m}) is not a valid angular state"),
        });
    }
    Ok(((two_j_i + two_m) / 2) as usize)
}
