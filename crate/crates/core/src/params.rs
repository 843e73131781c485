//! Physical input parameters and per-detuning derived couplings.
//!
//! All frequencies and rates are stored as angular quantities (rad/s).
//! External interfaces (the JSON parameter file) take ordinary frequencies in
//! Hz and are multiplied by 2π on ingest, so no other module ever converts.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{bloch, Error, Result, EPSILON_0, HBAR};

/// Three-level atom constants for the driven transition.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomSpec {
    /// Angular frequency of the probe transition (rad/s).
    pub omega: f64,
    /// Ground-state hyperfine splitting (rad/s).
    pub omega12: f64,
    /// Decay rate of the upper level into the dark ground state (rad/s).
    pub gamma31: f64,
    /// Decay rate of the upper level into the driven ground state (rad/s).
    pub gamma32: f64,
    /// Ground-state coherence decay rate (rad/s).
    pub gamma12: f64,
    /// Dipole matrix element of the probe transition (C m).
    pub mu32: f64,
    /// Atom number density (m^-3).
    pub density: f64,
    /// Total atom count. Stored as f64: realistic condensates exceed u64.
    pub n_atoms: f64,
}

impl AtomSpec {
    pub fn validate(&self) -> Result<()> {
        let positives = [
            ("omega", self.omega),
            ("omega12", self.omega12),
            ("gamma31", self.gamma31),
            ("gamma32", self.gamma32),
            ("gamma12", self.gamma12),
            ("mu32", self.mu32),
            ("density", self.density),
        ];
        for (name, value) in positives {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be strictly positive and finite, got {value}"),
                });
            }
        }
        if !(self.n_atoms >= 1.0) || !self.n_atoms.is_finite() {
            return Err(Error::InvalidParameter {
                name: "n_atoms",
                reason: format!("must be >= 1, got {}", self.n_atoms),
            });
        }
        Ok(())
    }
}

/// Drive and probe occupation parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveSpec {
    /// Coupling-field Rabi frequency (rad/s). Complex allowed, real by default.
    pub g1: Complex64,
    /// Two-photon detuning (rad/s).
    pub delta2: f64,
    /// Mean probe photon number.
    pub n_photons: f64,
    /// Exciton number.
    pub n_excitons: u64,
}

impl DriveSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.n_photons >= 0.0) || !self.n_photons.is_finite() {
            return Err(Error::InvalidParameter {
                name: "n_photons",
                reason: format!("must be >= 0, got {}", self.n_photons),
            });
        }
        Ok(())
    }
}

/// How the rotation parameter lambda is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LambdaMode {
    /// Use the configured value as-is. Default: the interesting dispersion
    /// regimes treat lambda as a free knob.
    Fixed,
    /// Use |k| / (2 omega_bar), the value that cancels the counter-rotating
    /// coupling at first order.
    Derived,
}

/// Deformation knobs of the collective phonon algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformationSpec {
    /// Collision-rate deformation parameter, dimensionless in [0, 1].
    pub kappa: f64,
    /// Total atom number entering eta = 1/N. Stored as f64; infinity encodes
    /// the eta -> 0 limit.
    pub big_n: f64,
    /// Rotation parameter for the counter-rotating corrections.
    pub lambda: f64,
    pub lambda_mode: LambdaMode,
}

impl DeformationSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.kappa) {
            return Err(Error::InvalidParameter {
                name: "kappa",
                reason: format!("must lie in [0, 1], got {}", self.kappa),
            });
        }
        if !(self.big_n >= 1.0) {
            return Err(Error::InvalidParameter {
                name: "big_n",
                reason: format!("must be >= 1, got {}", self.big_n),
            });
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidParameter {
                name: "lambda",
                reason: format!("must be finite and >= 0, got {}", self.lambda),
            });
        }
        Ok(())
    }

    /// eta = 1/N in (0, 1]; zero exactly when big_n is infinite.
    pub fn eta(&self) -> f64 {
        1.0 / self.big_n
    }
}

/// Quantities derived from the specs at one detuning.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedCouplings {
    /// Probe detuning omega - omega_p (rad/s) these couplings were built at.
    pub delta: f64,
    /// Probe angular frequency omega - Delta (rad/s).
    pub omega_p: f64,
    /// omega_p + Delta/2 (rad/s).
    pub omega_bar: f64,
    /// Quantization volume n_atoms / density (m^3).
    pub volume: f64,
    /// Single-photon field amplitude sqrt(hbar omega_p / (2 eps0 V)) (V/m).
    pub epsilon: f64,
    /// Single-photon Rabi frequency mu32 sqrt(omega_p / (2 hbar eps0 V)) (rad/s).
    pub k0: f64,
    /// Complex linear coupling factor from the driven three-level steady state.
    pub l_l: Complex64,
    /// Effective coupling k0 * L_l (rad/s).
    pub k: Complex64,
    /// Collective coupling sqrt(n_atoms) * k (rad/s).
    pub k_collective: Complex64,
    /// Rotation parameter actually in effect (fixed value or |k|/2 omega_bar).
    pub lambda_eff: f64,
}

/// Derives the per-detuning couplings. Delta is the probe detuning
/// omega - omega_p, so the probe frequency omega_p = omega - Delta varies
/// while the atomic transition stays fixed.
pub fn derive_couplings(
    atom: &AtomSpec,
    _drive: &DriveSpec,
    deform: &DeformationSpec,
    delta: f64,
) -> Result<DerivedCouplings> {
    atom.validate()?;
    deform.validate()?;
    let omega_p = atom.omega - delta;
    if !(omega_p > 0.0) || !omega_p.is_finite() {
        return Err(Error::InvalidParameter {
            name: "delta",
            reason: format!("omega - delta must stay positive, got omega_p = {omega_p}"),
        });
    }
    let omega_bar = omega_p + delta / 2.0;
    let volume = atom.n_atoms / atom.density;
    let epsilon = (HBAR * omega_p / (2.0 * EPSILON_0 * volume)).sqrt();
    let k0 = atom.mu32 * (omega_p / (2.0 * HBAR * EPSILON_0 * volume)).sqrt();
    let l_l = bloch::linear_coupling(atom, _drive.g1, delta)?;
    let k = l_l * k0;
    let k_collective = k * atom.n_atoms.sqrt();
    let lambda_eff = match deform.lambda_mode {
        LambdaMode::Fixed => deform.lambda,
        LambdaMode::Derived => k.norm() / (2.0 * omega_bar),
    };
    let derived = DerivedCouplings {
        delta,
        omega_p,
        omega_bar,
        volume,
        epsilon,
        k0,
        l_l,
        k,
        k_collective,
        lambda_eff,
    };
    for (name, v) in [
        ("volume", derived.volume),
        ("epsilon", derived.epsilon),
        ("k0", derived.k0),
        ("lambda_eff", derived.lambda_eff),
    ] {
        if !v.is_finite() {
            return Err(Error::NonFinite(match name {
                "volume" => "derive_couplings volume",
                "epsilon" => "derive_couplings epsilon",
                "k0" => "derive_couplings k0",
                _ => "derive_couplings lambda_eff",
            }));
        }
    }
    if !derived.k.is_finite() || !derived.k_collective.is_finite() {
        return Err(Error::NonFinite("derive_couplings coupling"));
    }
    Ok(derived)
}

/// Flat JSON parameter file. All frequencies in Hz; density in cm^-3.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamFile {
    pub omega_hz: f64,
    pub omega12_hz: f64,
    pub gamma31_hz: f64,
    pub gamma32_hz: f64,
    pub gamma12_hz: f64,
    #[serde(rename = "mu32_Cm")]
    pub mu32_cm: f64,
    pub density_per_cm3: f64,
    pub n_atoms: f64,
    pub g1_hz: f64,
    #[serde(default)]
    pub delta2_hz: f64,
    pub n_photons: f64,
    pub n_excitons: u64,
    pub kappa: f64,
    pub big_n: f64,
    pub lambda: f64,
    pub lambda_mode: LambdaMode,
}

impl ParamFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParameter {
            name: "params_file",
            reason: e.to_string(),
        })
    }

    pub fn into_specs(self) -> Result<(AtomSpec, DriveSpec, DeformationSpec)> {
        let atom = AtomSpec {
            omega: TAU * self.omega_hz,
            omega12: TAU * self.omega12_hz,
            gamma31: TAU * self.gamma31_hz,
            gamma32: TAU * self.gamma32_hz,
            gamma12: TAU * self.gamma12_hz,
            mu32: self.mu32_cm,
            density: self.density_per_cm3 * 1e6,
            n_atoms: self.n_atoms,
        };
        let drive = DriveSpec {
            g1: Complex64::new(TAU * self.g1_hz, 0.0),
            delta2: TAU * self.delta2_hz,
            n_photons: self.n_photons,
            n_excitons: self.n_excitons,
        };
        let deform = DeformationSpec {
            kappa: self.kappa,
            big_n: self.big_n,
            lambda: self.lambda,
            lambda_mode: self.lambda_mode,
        };
        atom.validate()?;
        drive.validate()?;
        deform.validate()?;
        Ok((atom, drive, deform))
    }
}

/// Reference sodium condensate parameters used throughout the test suite.
pub fn sodium_atom() -> AtomSpec {
    AtomSpec {
        omega: TAU * 5.1e14,
        omega12: TAU * 1.772e9,
        gamma31: TAU * 5.0e6,
        gamma32: TAU * 5.0e6,
        gamma12: TAU * 38.0e3,
        mu32: 2.2e-29,
        density: 3.3e12 * 1e6,
        n_atoms: 1e20,
    }
}

pub fn sodium_drive() -> DriveSpec {
    DriveSpec {
        g1: Complex64::new(TAU * 2.14e7, 0.0),
        delta2: 0.0,
        n_photons: 25.0,
        n_excitons: 1,
    }
}

pub fn sodium_deformation() -> DeformationSpec {
    DeformationSpec {
        kappa: 0.0,
        big_n: 1e20,
        lambda: 0.1,
        lambda_mode: LambdaMode::Fixed,
    }
}
