//! Master equation of the driven three-level atom and its steady state.
//!
//! States are labelled 1 (dark ground state), 2 (driven ground state) and
//! 3 (excited state). The strong field `g1` couples 1-3, the weak probe `g2`
//! couples 2-3. `delta` is the probe detuning and `delta2` the drive
//! detuning; all rates are angular (rad/s).
//!
//! Two routes to the stationary coherence between levels 3 and 2 are kept
//! deliberately independent: a dense linear solve of the full equation of
//! motion ([`steady_state_numeric`]) and the weak-probe closed form
//! ([`analytic_rho32`]). The test suite plays them against each other.

use nalgebra::{DMatrix, DVector, Matrix3};
use num_complex::Complex64;

use crate::{params::AtomSpec, Error, Result, C64};

/// Density matrix of the three-level atom; entry (i, j) is rho_{i+1, j+1}.
pub type DensityMatrix3 = Matrix3<Complex64>;

/// Collapsed decay rates entering the stationary coherence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveGamma {
    /// Optical coherence decay (gamma31 + gamma32) / 2 (rad/s).
    pub opt: f64,
    /// Ground-state coherence decay gamma12 (rad/s).
    pub mag: f64,
}

impl EffectiveGamma {
    pub fn from_atom(atom: &AtomSpec) -> Self {
        Self {
            opt: 0.5 * (atom.gamma31 + atom.gamma32),
            mag: atom.gamma12,
        }
    }
}

const I: C64 = Complex64::new(0.0, 1.0);

/// Right-hand side of the master equation, complex-linear in all nine
/// entries of `rho` (the conjugate equations are written out explicitly, so
/// the map stays linear even for non-Hermitian input and a Hermitian input
/// yields a Hermitian derivative).
pub fn bloch_rhs(
    rho: &DensityMatrix3,
    atom: &AtomSpec,
    g1: C64,
    g2: C64,
    delta: f64,
    delta2: f64,
) -> DensityMatrix3 {
    let (g31, g32, g12) = (atom.gamma31, atom.gamma32, atom.gamma12);
    let r = |i: usize, j: usize| rho[(i - 1, j - 1)];
    let mut out = DensityMatrix3::zeros();

    // Populations.
    out[(0, 0)] = -I * g1 * r(1, 3) + I * g1.conj() * r(3, 1) - 2.0 * g12 * r(1, 1)
        + 2.0 * g31 * r(3, 3);
    out[(1, 1)] = -I * g2 * r(2, 3) + I * g2.conj() * r(3, 2) + 2.0 * g12 * r(1, 1)
        + 2.0 * g32 * r(3, 3);
    out[(2, 2)] = I * g1 * r(1, 3) - I * g1.conj() * r(3, 1) + I * g2 * r(2, 3)
        - I * g2.conj() * r(3, 2)
        - 2.0 * (g32 + g31) * r(3, 3);

    // Lower-triangle coherences.
    out[(1, 0)] = -I * (delta2 - delta) * r(2, 1) - I * g1 * r(2, 3) + I * g2.conj() * r(3, 1)
        - g12 * r(2, 1);
    out[(2, 0)] = -I * delta2 * r(3, 1) + I * g1 * (r(1, 1) - r(3, 3)) + I * g2 * r(2, 1)
        - (g12 + g32 + g31) * r(3, 1);
    out[(2, 1)] = -I * delta * r(3, 2) + I * g2 * (r(2, 2) - r(3, 3)) + I * g1 * r(1, 2)
        - (g32 + g31) * r(3, 2);

    // Conjugate equations with rho_{ab} -> rho_{ba} and coefficients
    // conjugated, keeping the map linear in the independent entries.
    out[(0, 1)] = I * (delta2 - delta) * r(1, 2) + I * g1.conj() * r(3, 2)
        - I * g2 * r(1, 3)
        - g12 * r(1, 2);
    out[(0, 2)] = I * delta2 * r(1, 3) - I * g1.conj() * (r(1, 1) - r(3, 3))
        - I * g2.conj() * r(1, 2)
        - (g12 + g32 + g31) * r(1, 3);
    out[(1, 2)] = I * delta * r(2, 3) - I * g2.conj() * (r(2, 2) - r(3, 3))
        - I * g1.conj() * r(2, 1)
        - (g32 + g31) * r(2, 3);
    out
}

fn flat(i: usize, j: usize) -> usize {
    3 * i + j
}

/// Stationary density matrix from a dense solve of the nine coupled linear
/// equations, with the population equation for level 1 replaced by the trace
/// constraint. The residual of the stationary condition is checked against
/// `1e-10 * max(gamma31, |g1|)`.
pub fn steady_state_numeric(
    atom: &AtomSpec,
    g1: C64,
    g2: C64,
    delta: f64,
    delta2: f64,
) -> Result<DensityMatrix3> {
    atom.validate()?;
    let mut l = DMatrix::<C64>::zeros(9, 9);
    for col in 0..9 {
        let mut basis = DensityMatrix3::zeros();
        basis[(col / 3, col % 3)] = C64::new(1.0, 0.0);
        let image = bloch_rhs(&basis, atom, g1, g2, delta, delta2);
        for i in 0..3 {
            for j in 0..3 {
                l[(flat(i, j), col)] = image[(i, j)];
            }
        }
    }
    let mut b = DVector::<C64>::zeros(9);
    // Trace row replaces the redundant population equation rho_11.
    for k in 0..3 {
        l[(flat(0, 0), flat(k, k))] = C64::new(1.0, 0.0);
    }
    for col in 0..9 {
        if col != flat(0, 0) && col != flat(1, 1) && col != flat(2, 2) {
            l[(flat(0, 0), col)] = C64::new(0.0, 0.0);
        }
    }
    b[flat(0, 0)] = C64::new(1.0, 0.0);

    let lu = l.lu();
    let x = lu
        .solve(&b)
        .ok_or_else(|| Error::Solver("stationary system is singular".into()))?;
    let mut rho = DensityMatrix3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            rho[(i, j)] = x[flat(i, j)];
        }
    }

    let scale = atom.gamma31.max(g1.norm()).max(1.0);
    let resid = bloch_rhs(&rho, atom, g1, g2, delta, delta2);
    let max_resid = resid.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max_resid > 1e-10 * scale {
        return Err(Error::Solver(format!(
            "stationary residual {max_resid:.3e} exceeds {:.3e}",
            1e-10 * scale
        )));
    }
    let herm_dev = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .map(|(i, j)| (rho[(i, j)] - rho[(j, i)].conj()).norm())
        .fold(0.0, f64::max);
    if herm_dev > 1e-10 {
        return Err(Error::NotHermitian {
            label: "steady state".into(),
            deviation: herm_dev,
        });
    }
    Ok(rho)
}

/// Denominator of the weak-probe stationary coherence:
/// `Gamma = delta - 2i gamma_opt + |g1|^2 / (i gamma_mag - delta)`.
pub fn coherence_denominator(atom: &AtomSpec, g1: C64, delta: f64) -> C64 {
    let eg = EffectiveGamma::from_atom(atom);
    C64::new(delta, -2.0 * eg.opt) + g1.norm_sqr() / C64::new(-delta, eg.mag)
}

/// Weak-probe stationary coherence per unit probe Rabi frequency,
/// `rho_32 / g2 = 1 / Gamma`, valid to first order in the probe and for a
/// resonant drive.
pub fn analytic_rho32(atom: &AtomSpec, g1: C64, delta: f64) -> Result<C64> {
    atom.validate()?;
    let gamma = coherence_denominator(atom, g1, delta);
    if gamma.norm() < 1e-300 {
        return Err(Error::NearSingular {
            what: "weak-probe coherence denominator",
            magnitude: gamma.norm(),
        });
    }
    Ok(gamma.inv())
}

/// Ratio of the undriven to the driven coherence denominator. This rescales
/// the bare exciton-photon coupling into the effective one: it tends to 1 as
/// the drive switches off and suppresses the coupling near two-photon
/// resonance.
pub fn linear_coupling(atom: &AtomSpec, g1: C64, delta: f64) -> Result<C64> {
    atom.validate()?;
    let bare = coherence_denominator(atom, C64::new(0.0, 0.0), delta);
    let driven = coherence_denominator(atom, g1, delta);
    if driven.norm() < 1e-300 {
        return Err(Error::NearSingular {
            what: "driven coherence denominator",
            magnitude: driven.norm(),
        });
    }
    Ok(bare / driven)
}
