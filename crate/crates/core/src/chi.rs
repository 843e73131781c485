//! Susceptibilities, refractive index and group index of the probe.
//!
//! The energy-derivative coefficient braces appear twice in the source
//! material — once in the polarization polynomial and once in the χ
//! formulas — and are transcribed here twice, independently, in their
//! respective token orders ([`polarization_braces`] and the χ-side braces
//! inside [`chi_orders`]). Their agreement at random parameter points is an
//! acceptance check against transcription error; it is asserted, never
//! assumed.
//!
//! Occupation numbers enter the braces as continuous values: the photon
//! number substitutes for (j + m) and the exciton number for (j − m)
//! wherever those labels appear.

use serde::{Deserialize, Serialize};

use crate::params::{derive_couplings, AtomSpec, DeformationSpec, DriveSpec};
use crate::spectrum::SpectrumParams;
use crate::{Error, Result, C64, EPSILON_0, HBAR};

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Output toggles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineFlags {
    /// Keep the static (ω_p/2 + Δ) summand inside χ⁽¹⁾. It is printed in the
    /// source and kept by default; figure-style output drops it because it
    /// dwarfs every dispersive feature.
    #[serde(default = "default_true")]
    pub include_free_term: bool,
}

fn default_true() -> bool {
    true
}

impl Default for PipelineFlags {
    fn default() -> Self {
        Self {
            include_free_term: true,
        }
    }
}

/// Coefficient braces {A, B, C} of the polarization polynomial
/// P = −ħ(A√n + B(√n)³ + C(√n)⁵), transcribed from the polarization
/// expansion.
pub fn polarization_braces(
    p: &SpectrumParams,
    n_photons: f64,
    n_excitons: f64,
) -> [C64; 3] {
    let combo = p.collision_combo();
    let half = p.half_collision_combo();
    let lam2 = p.lambda * p.lambda;
    let ne = n_excitons;
    let a = re(p.omega_p / 2.0 + p.delta)
        + re((1.5 * p.omega_p + p.delta) * combo * (-0.5 + 2.0 * n_photons))
        - p.k * (p.lambda / 2.0)
        + p.k * (p.lambda * combo * (0.25 * ne * ne - 0.5 * ne + 0.5))
        - p.k_collective * half
        - p.k_collective * lam2
        - p.k_collective * (lam2 * half * (0.5 * ne * ne));
    let b = re((1.5 * p.omega_p + p.delta) * combo)
        + p.k * p.lambda
        + p.k * (p.lambda * combo * (ne / 2.0 - 1.5))
        + p.k_collective * (2.0 * half)
        - p.k_collective * (2.0 * lam2)
        + p.k_collective * (lam2 * half * (1.0 + ne));
    let c = p.k * (1.5 * p.lambda * half) - p.k_collective * (1.5 * lam2 * half);
    [a, b, c]
}

/// Polarization P = −ħ(A√n + B(√n)³ + C(√n)⁵), exactly the printed
/// polynomial (the braces are evaluated at the given occupations).
pub fn polarization(n_photons: f64, n_excitons: f64, p: &SpectrumParams) -> C64 {
    let [a, b, c] = polarization_braces(p, n_photons, n_excitons);
    let s = n_photons.sqrt();
    let s3 = s * s * s;
    let s5 = s3 * s * s;
    -(a * s + b * s3 + c * s5) * HBAR
}

/// The independent χ-side transcription of the same three braces, in the
/// token order of the susceptibility formulas.
fn susceptibility_braces(p: &SpectrumParams, n_photons: f64, n_excitons: f64) -> [C64; 3] {
    let combo = p.collision_combo();
    let half = p.half_collision_combo();
    let lam2 = p.lambda * p.lambda;
    let ne = n_excitons;
    let brace1 = re(p.omega_p / 2.0 + p.delta)
        + re((1.5 * p.omega_p + p.delta) * combo * (-0.5 + 2.0 * n_photons))
        - p.k * (p.lambda / 2.0)
        + p.k * (p.lambda * combo * (0.25 * ne * ne - 0.5 * ne + 0.5))
        - p.k_collective * half
        - p.k_collective * lam2
        - p.k_collective * (lam2 * half * (0.5 * ne * ne));
    let brace3 = re((1.5 * p.omega_p + p.delta) * combo)
        + p.k * p.lambda
        + p.k * (p.lambda * combo * (ne / 2.0 - 1.5))
        + p.k_collective * (2.0 * half)
        - p.k_collective * (2.0 * lam2)
        + p.k_collective * (lam2 * half * (1.0 + ne));
    let brace5 =
        p.k * (1.5 * p.lambda * half) - p.k_collective * (1.5 * lam2 * half);
    [brace1, brace3, brace5]
}

/// First, third and fifth order susceptibilities (all higher orders are
/// identically zero in this model).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiOrders {
    pub chi1: C64,
    pub chi3: C64,
    pub chi5: C64,
}

/// χ⁽¹⁾, χ⁽³⁾, χ⁽⁵⁾ with prefactors −ħ/(ε^{2r}ε₀).
pub fn chi_orders(
    p: &SpectrumParams,
    epsilon: f64,
    n_photons: f64,
    n_excitons: f64,
) -> Result<ChiOrders> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            reason: format!("field amplitude must be positive and finite, got {epsilon}"),
        });
    }
    let [b1, b3, b5] = susceptibility_braces(p, n_photons, n_excitons);
    let e2 = epsilon * epsilon;
    let e4 = e2 * e2;
    let e6 = e4 * e2;
    Ok(ChiOrders {
        chi1: b1 * (-HBAR / (e2 * EPSILON_0)),
        chi3: b3 * (-HBAR / (e4 * EPSILON_0)),
        chi5: b5 * (-HBAR / (e6 * EPSILON_0)),
    })
}

/// Assembled totals at one field strength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiTotals {
    pub chi1: C64,
    /// χ⁽³⁾|E|², dimensionless.
    pub chi3_scaled: C64,
    /// χ⁽⁵⁾|E|⁴, dimensionless.
    pub chi5_scaled: C64,
    pub chi_nl: C64,
    pub chi_total: C64,
}

/// Totals with |E|² = ε²·n; `include_free_term = false` removes the static
/// (ω_p/2 + Δ) summand from χ⁽¹⁾.
pub fn chi_total(
    p: &SpectrumParams,
    epsilon: f64,
    n_photons: f64,
    n_excitons: f64,
    flags: PipelineFlags,
) -> Result<ChiTotals> {
    let orders = chi_orders(p, epsilon, n_photons, n_excitons)?;
    let chi1 = if flags.include_free_term {
        orders.chi1
    } else {
        let free = re(p.omega_p / 2.0 + p.delta)
            * (-HBAR / (epsilon * epsilon * EPSILON_0));
        orders.chi1 - free
    };
    let intensity = epsilon * epsilon * n_photons;
    let chi3_scaled = orders.chi3 * intensity;
    let chi5_scaled = orders.chi5 * (intensity * intensity);
    let chi_nl = chi3_scaled + chi5_scaled;
    Ok(ChiTotals {
        chi1,
        chi3_scaled,
        chi5_scaled,
        chi_nl,
        chi_total: chi1 + chi_nl,
    })
}

/// n = √(1 + χ), principal branch (Re ≥ 0). The boolean flags the branch
/// ambiguity when 1 + χ lands exactly on the negative real axis (n is then
/// purely imaginary).
pub fn refractive_index(chi: C64) -> (C64, bool) {
    let w = C64::new(1.0, 0.0) + chi;
    let flagged = w.im == 0.0 && w.re < 0.0;
    let mut n = w.sqrt();
    if n.re < 0.0 {
        n = -n;
    }
    (n, flagged)
}

/// One fully evaluated sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SusceptibilityPoint {
    /// Probe detuning (rad/s).
    pub delta: f64,
    pub chi1: C64,
    pub chi3_scaled: C64,
    pub chi5_scaled: C64,
    pub chi_nl: C64,
    pub chi_total: C64,
    pub n_index: C64,
    /// Re[n + ω_p dn/dω_p].
    pub n_group: f64,
    /// 1/n_group, signed; ±∞ sentinel when |n_group| < 1e-12.
    pub vg_over_c: f64,
    /// True when 1 + χ fell on the negative real axis at this point.
    pub branch_flagged: bool,
}

/// End-to-end evaluator: detuning in, susceptibilities and indices out.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub atom: AtomSpec,
    pub drive: DriveSpec,
    pub deform: DeformationSpec,
    pub flags: PipelineFlags,
}

impl Pipeline {
    pub fn new(
        atom: AtomSpec,
        drive: DriveSpec,
        deform: DeformationSpec,
        flags: PipelineFlags,
    ) -> Result<Self> {
        atom.validate()?;
        drive.validate()?;
        deform.validate()?;
        Ok(Self {
            atom,
            drive,
            deform,
            flags,
        })
    }

    /// Default finite-difference step: 1e-3 of the narrowest spectral scale
    /// (the ground-coherence decay rate).
    pub fn default_fd_step(&self) -> f64 {
        1e-3 * self.atom.gamma12
    }

    fn chi_at(&self, delta: f64) -> Result<(ChiTotals, C64, bool, f64)> {
        let d = derive_couplings(&self.atom, &self.drive, &self.deform, delta)?;
        let sp = SpectrumParams::from_derived(&d, self.deform.kappa, self.deform.big_n);
        let totals = chi_total(
            &sp,
            d.epsilon,
            self.drive.n_photons,
            self.drive.n_excitons as f64,
            self.flags,
        )?;
        let (n_index, flagged) = refractive_index(totals.chi_total);
        Ok((totals, n_index, flagged, d.omega_p))
    }

    /// Full point evaluation with a symmetric ω_p-stencil for the group
    /// index: ω_p ± h corresponds to Δ ∓ h at fixed atomic frequency.
    pub fn point(&self, delta: f64, fd_step: Option<f64>) -> Result<SusceptibilityPoint> {
        let h = fd_step.unwrap_or_else(|| self.default_fd_step());
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidParameter {
                name: "fd_step",
                reason: format!("finite-difference step must be positive, got {h}"),
            });
        }
        let (totals, n_index, branch_flagged, omega_p) = self.chi_at(delta)?;
        let (_, n_up, _, _) = self.chi_at(delta - h)?; // ω_p + h
        let (_, n_down, _, _) = self.chi_at(delta + h)?; // ω_p − h
        let dn_domega = (n_up - n_down) / (2.0 * h);
        let n_group_c = n_index + dn_domega * omega_p;
        let n_group = n_group_c.re;
        if !n_group.is_finite() {
            return Err(Error::NonFinite("group index stencil"));
        }
        let vg_over_c = if n_group.abs() < 1e-12 {
            f64::INFINITY.copysign(n_group)
        } else {
            1.0 / n_group
        };
        Ok(SusceptibilityPoint {
            delta,
            chi1: totals.chi1,
            chi3_scaled: totals.chi3_scaled,
            chi5_scaled: totals.chi5_scaled,
            chi_nl: totals.chi_nl,
            chi_total: totals.chi_total,
            n_index,
            n_group,
            vg_over_c,
            branch_flagged,
        })
    }

    /// Group index and v_g/c at one detuning with an explicit step.
    pub fn group_index(&self, delta: f64, h: f64) -> Result<(f64, f64)> {
        let pt = self.point(delta, Some(h))?;
        Ok((pt.n_group, pt.vg_over_c))
    }
}
