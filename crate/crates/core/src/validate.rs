//! Runtime validation suite: every closed form against an independent
//! matrix oracle or an exact reduction, reported as structured check
//! records.
//!
//! Hard checks gate the process exit code of the `validate` subcommand;
//! soft checks publish residuals (notably the term-by-term diffs of the
//! diagonal energy correction, where the source expressions are transcribed
//! verbatim and two terms are known not to reduce to the oracle).

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{
    deformed_commutator_diag, deformed_gardiner_lowering_coeff, gardiner_commutator_eigenvalue,
    DeformationFunction,
};
use crate::bloch::{analytic_rho32, linear_coupling, steady_state_numeric, EffectiveGamma};
use crate::chi::{chi_orders, chi_total, polarization_braces, Pipeline, PipelineFlags};
use crate::oracle::{
    build_block_operators, build_hamiltonian, build_perturbation_term, conjugate_by,
    coupling_between_blocks, deformed_gardiner_matrix, deformed_mode_matrix, exact_levels,
    frobenius, hermiticity_deviation, matrix_element_oracle_block, rotation_operator,
    unperturbed_levels, verify_crt_elimination, HamiltonianVariant, LabeledMatrix, OracleParams,
    SpaceSpec, TensorSpace, ALL_PERTURB_TERMS,
};
use crate::params::{derive_couplings, AtomSpec, DeformationSpec, DriveSpec, LambdaMode};
use crate::spectrum::{correction_terms, AngularState, SpectrumParams, StarkBracketForm};
use crate::{Result, C64};

/// One validation check outcome.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub check_name: String,
    pub parameters: String,
    pub residual: f64,
    pub bound: f64,
    pub pass: bool,
    /// Hard checks gate the exit code; soft checks only publish numbers.
    pub hard: bool,
    pub skipped: bool,
    pub reason: String,
}

/// Full report; `hard_pass` is the exit-code verdict.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub hard_pass: bool,
    pub checks: Vec<CheckResult>,
}

pub fn hard_pass(checks: &[CheckResult]) -> bool {
    checks.iter().all(|c| !c.hard || c.pass)
}

fn guarded(
    name: &str,
    hard: bool,
    bound: f64,
    body: impl FnOnce() -> Result<(f64, String)>,
) -> CheckResult {
    match body() {
        Ok((residual, parameters)) => CheckResult {
            check_name: name.into(),
            parameters,
            residual,
            bound,
            pass: residual <= bound,
            hard,
            skipped: false,
            reason: String::new(),
        },
        Err(e) => CheckResult {
            check_name: name.into(),
            parameters: String::new(),
            residual: f64::INFINITY,
            bound,
            pass: false,
            hard,
            skipped: false,
            reason: e.to_string(),
        },
    }
}

fn skipped(name: &str, reason: &str) -> CheckResult {
    CheckResult {
        check_name: name.into(),
        parameters: String::new(),
        residual: 0.0,
        bound: 0.0,
        pass: true,
        hard: false,
        skipped: true,
        reason: reason.into(),
    }
}

/// O(1)-scaled parameter set used by the matrix oracles.
fn base_oracle() -> OracleParams {
    OracleParams {
        omega_p: 1.0,
        delta: 0.37,
        k: 0.21,
        k_collective: 0.83,
        lambda: 0.15,
        kappa: 0.3,
        big_n: 17.0,
    }
}

/// Base set plus five seeded random real-parameter sets.
fn seeded_oracle_sets() -> Vec<OracleParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0f0c_a11e);
    let mut sets = vec![base_oracle()];
    for _ in 0..5 {
        sets.push(OracleParams {
            omega_p: rng.gen_range(0.5..2.0),
            delta: rng.gen_range(-0.5..0.5),
            k: rng.gen_range(0.05..0.4),
            k_collective: rng.gen_range(0.2..1.5),
            lambda: rng.gen_range(0.02..0.3),
            kappa: rng.gen_range(0.0..0.5),
            big_n: rng.gen_range(8.0_f64..40.0).round(),
        });
    }
    sets
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn j_y_generator(n_exc: usize) -> LabeledMatrix {
    let ops = build_block_operators(n_exc);
    LabeledMatrix::new(format!("i*J_y[{n_exc}]"), ops.j_y * C64::i())
}

// ---------------------------------------------------------------- optics --

fn check_steady_state(atom: &AtomSpec, drive: &DriveSpec) -> CheckResult {
    let name = "steady_state_matches_liouvillian";
    if drive.g1.norm() == 0.0 {
        return skipped(name, "g1=0: probe-normalized coherence undefined");
    }
    guarded(name, true, 1e-3, || {
        let eg = EffectiveGamma::from_atom(atom);
        let g2 = drive.g1 * 1e-3;
        let mut worst = 0.0f64;
        for delta in [0.0, eg.opt, -eg.opt, 10.0 * eg.opt, -10.0 * eg.opt] {
            let rho = steady_state_numeric(atom, drive.g1, g2, delta, 0.0)?;
            let closed = analytic_rho32(atom, drive.g1, delta)?;
            let rel = (rho[(2, 1)] / g2 - closed).norm() / closed.norm();
            worst = worst.max(rel);
        }
        Ok((
            worst,
            format!("delta in {{0, ±γ_opt, ±10γ_opt}}, |g2| = 1e-3|g1| = {:.3e}", g2.norm()),
        ))
    })
}

fn check_linear_coupling_resonance(atom: &AtomSpec, drive: &DriveSpec) -> CheckResult {
    guarded("linear_coupling_resonance_closed_form", true, 1e-2, || {
        let eg = EffectiveGamma::from_atom(atom);
        let g2 = drive.g1.norm_sqr();
        let expected = 2.0 * eg.opt * eg.mag / (2.0 * eg.opt * eg.mag + g2);
        let actual = linear_coupling(atom, drive.g1, 0.0)?;
        let rel = (actual - C64::from(expected)).norm() / expected;
        Ok((rel, format!("expected L_l(0) = {expected:.4e}")))
    })
}

fn check_linear_coupling_unit(atom: &AtomSpec) -> CheckResult {
    guarded("linear_coupling_unit_without_drive", true, 1e-12, || {
        let eg = EffectiveGamma::from_atom(atom);
        let mut worst = 0.0f64;
        for delta in [0.0, eg.opt, -eg.opt, 7.3 * eg.opt] {
            let l = linear_coupling(atom, C64::from(0.0), delta)?;
            worst = worst.max((l - C64::from(1.0)).norm());
        }
        Ok((worst, "g1 = 0 over four detunings".into()))
    })
}

fn check_linear_coupling_symmetry(atom: &AtomSpec, drive: &DriveSpec) -> CheckResult {
    guarded("linear_coupling_conjugate_symmetry", true, 1e-12, || {
        let eg = EffectiveGamma::from_atom(atom);
        let span = 10.0 * eg.opt;
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for i in 0..100 {
            let delta = -span + 2.0 * span * (i as f64 / 99.0);
            let plus = linear_coupling(atom, drive.g1, delta)?;
            let minus = linear_coupling(atom, drive.g1, -delta)?;
            worst = worst.max((minus - plus.conj()).norm());
            scale = scale.max(plus.norm());
        }
        Ok((worst / scale.max(1e-300), "100-point grid over ±10γ_opt".into()))
    })
}

fn check_expansion_validity(drive: &DriveSpec, deform: &DeformationSpec) -> CheckResult {
    guarded("collision_expansion_validity", false, 0.5, || {
        let value = (deform.kappa * (1.0 - drive.n_photons)).abs();
        Ok((
            value,
            format!(
                "|κ(1−n)| with κ = {}, n = {}; soft validity guard of the κ-expansion",
                deform.kappa, drive.n_photons
            ),
        ))
    })
}

// --------------------------------------------------------------- algebra --

fn check_deformed_commutator() -> CheckResult {
    guarded("deformed_commutator_closed_form", true, 1e-12, || {
        let mut worst = 0.0f64;
        for kappa in [0.0, 0.1, 0.5] {
            let f = DeformationFunction::Collision { kappa };
            let a = deformed_mode_matrix(12, &f);
            let a_dag = a.adjoint();
            let comm = &a * &a_dag - &a_dag * &a;
            for n in 0..=8usize {
                let closed = deformed_commutator_diag(n as u64, &f);
                worst = worst.max((comm[(n, n)] - C64::from(closed)).norm());
            }
        }
        Ok((worst, "κ in {0, 0.1, 0.5}, n ≤ 8, cutoff 12".into()))
    })
}

fn check_gardiner_lowering() -> CheckResult {
    guarded("gardiner_lowering_closed_form", true, 1e-12, || {
        let mut worst = 0.0f64;
        for kappa in [0.0, 0.1, 0.5] {
            for big_n in [5.0, 10.0, 20.0] {
                let g = deformed_gardiner_matrix(12, kappa, big_n);
                for n in 1..=8usize {
                    let closed = deformed_gardiner_lowering_coeff(n as u64, kappa, big_n);
                    worst = worst.max((g[(n - 1, n)] - C64::from(closed)).norm());
                }
            }
        }
        Ok((worst, "κ ≤ 0.5, N ≤ 20, n ≤ 8: operator product vs closed coefficient".into()))
    })
}

fn check_gardiner_commutator() -> CheckResult {
    guarded("gardiner_commutator_two_mode", true, 1e-12, || {
        let mut worst = 0.0f64;
        for n_atoms in [2usize, 5, 10] {
            let tm = crate::oracle::TwoModeAtoms::new(n_atoms);
            let comm = &tm.b_q * &tm.b_q_dag - &tm.b_q_dag * &tm.b_q;
            for ne in 0..=n_atoms {
                let closed = gardiner_commutator_eigenvalue(ne as u64, n_atoms as f64);
                worst = worst.max((comm[(ne, ne)] - C64::from(closed)).norm());
                for other in 0..=n_atoms {
                    if other != ne {
                        worst = worst.max(comm[(ne, other)].norm());
                    }
                }
            }
        }
        Ok((worst, "N in {2, 5, 10}: collective-pair commutator spectrum".into()))
    })
}

// ---------------------------------------------------------- fock oracles --

fn check_angular_momentum_algebra() -> CheckResult {
    guarded("angular_momentum_algebra", true, 1e-12, || {
        let i = C64::i();
        let mut worst = 0.0f64;
        for n_exc in [2usize, 7, 12] {
            let ops = build_block_operators(n_exc);
            let comms = [
                (&ops.j_x * &ops.j_y - &ops.j_y * &ops.j_x, &ops.j_z),
                (&ops.j_y * &ops.j_z - &ops.j_z * &ops.j_y, &ops.j_x),
                (&ops.j_z * &ops.j_x - &ops.j_x * &ops.j_z, &ops.j_y),
            ];
            for (comm, target) in comms {
                worst = worst.max(max_abs(&(comm - target * i)));
            }
            let j = n_exc as f64 / 2.0;
            let casimir = &ops.j_x * &ops.j_x + &ops.j_y * &ops.j_y + &ops.j_z * &ops.j_z;
            let expected =
                DMatrix::<C64>::identity(n_exc + 1, n_exc + 1) * C64::from(j * (j + 1.0));
            worst = worst.max(max_abs(&(casimir - expected)));
        }
        Ok((worst, "commutator cycle and Casimir on blocks 2j in {2, 7, 12}".into()))
    })
}

fn check_beam_splitter_identity() -> CheckResult {
    guarded("beam_splitter_identity", true, 1e-12, || {
        let p = base_oracle();
        let mut worst = 0.0f64;
        for n_exc in 1..=8usize {
            let h0 = build_hamiltonian(HamiltonianVariant::H0, &p, SpaceSpec::Block { n_exc })?;
            let ops = build_block_operators(n_exc);
            let id = DMatrix::<C64>::identity(n_exc + 1, n_exc + 1);
            let expected = id * C64::from(p.omega_p * n_exc as f64)
                + &ops.j_x * C64::from(2.0 * p.k_collective);
            worst = worst
                .max(frobenius(&(&h0.entries - &expected)) / frobenius(&h0.entries));
            let levels = exact_levels(&h0)?;
            let reference = unperturbed_levels(n_exc as u64, &p);
            let scale = reference.iter().fold(1.0f64, |acc, e| acc.max(e.abs()));
            for (a, b) in levels.iter().zip(reference.iter()) {
                worst = worst.max((a - b).abs() / scale);
            }
        }
        Ok((worst, "ω_p·N̂ + 2K·J_x form and its ladder spectrum, blocks 2j ≤ 8".into()))
    })
}

fn check_block_conservation() -> CheckResult {
    guarded("excitation_block_conservation", true, 1e-12, || {
        let p = base_oracle();
        let mut worst = 0.0f64;
        let bosonic_space = TensorSpace::new(8, 8);
        for variant in [
            HamiltonianVariant::H0,
            HamiltonianVariant::HPrime,
            HamiltonianVariant::Total,
        ] {
            let h = build_hamiltonian(
                variant,
                &p,
                SpaceSpec::Bosonic {
                    photon_dim: 8,
                    exciton_dim: 8,
                },
            )?;
            worst = worst.max(
                coupling_between_blocks(&h.entries, &bosonic_space)
                    / max_abs(&h.entries).max(1e-300),
            );
        }
        let sector_space = TensorSpace::new(8, 5);
        for variant in [
            HamiltonianVariant::Effective,
            HamiltonianVariant::SecondQuantized,
            HamiltonianVariant::Gardiner,
        ] {
            let space = if variant == HamiltonianVariant::Effective {
                SpaceSpec::Dicke {
                    photon_dim: 8,
                    n_atoms: 4,
                }
            } else {
                SpaceSpec::TwoMode {
                    photon_dim: 8,
                    n_atoms: 4,
                }
            };
            let h = build_hamiltonian(variant, &p, space)?;
            worst = worst.max(
                coupling_between_blocks(&h.entries, &sector_space)
                    / max_abs(&h.entries).max(1e-300),
            );
        }
        Ok((worst, "all number-conserving variants, photon cutoff 8".into()))
    })
}

fn crt_oracle_params() -> OracleParams {
    OracleParams {
        omega_p: 1.0,
        delta: 0.2,
        k: 0.02,
        k_collective: 0.04,
        lambda: 0.0,
        kappa: 0.0,
        big_n: 1e6,
    }
}

fn check_crt_suite(lambda_eff: f64) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let report = match verify_crt_elimination(&crt_oracle_params(), 4, 8, None) {
        Ok(r) => r,
        Err(e) => {
            out.push(CheckResult {
                check_name: "crt_elimination_suppression".into(),
                parameters: String::new(),
                residual: f64::INFINITY,
                bound: 0.01,
                pass: false,
                hard: true,
                skipped: false,
                reason: e.to_string(),
            });
            return out;
        }
    };
    if lambda_eff == 0.0 {
        out.push(skipped("crt_elimination_suppression", "lambda=0"));
    } else {
        out.push(guarded("crt_elimination_suppression", true, 0.01, || {
            Ok((
                if report.suppression.is_finite() {
                    1.0 / report.suppression
                } else {
                    0.0
                },
                format!(
                    "matched λ = {:.4e}: coefficient {:.4e} -> {:.4e} ({:.1}x)",
                    report.lambda,
                    report.coeff_unrotated,
                    report.coeff_rotated,
                    report.suppression
                ),
            ))
        }));
    }
    out.push(guarded("crt_cubic_remainder_ratio", true, 2.0, || {
        Ok((
            (report.bch_ratio - 8.0).abs(),
            format!(
                "second-order remainder at λ, λ/2: {:.4e}, {:.4e} (ratio {:.3})",
                report.bch_residual, report.bch_residual_half, report.bch_ratio
            ),
        ))
    }));
    out.push(guarded("printed_second_order_expansion", false, f64::INFINITY, || {
        Ok((
            report.printed_residual,
            format!(
                "printed closed form kept verbatim: residual at λ, λ/2 = {:.4e}, {:.4e} \
                 (ratio {:.3}; a quadratic remainder is expected experimentally)",
                report.printed_residual, report.printed_residual_half, report.printed_ratio
            ),
        ))
    }));
    out
}

fn check_second_quantized_gardiner() -> CheckResult {
    guarded("second_quantized_gardiner_offdiag", true, 1e-12, || {
        let mut worst = 0.0f64;
        for n_atoms in [4usize, 8] {
            let mut p = base_oracle();
            p.k_collective = p.k * (n_atoms as f64).sqrt();
            p.big_n = n_atoms as f64;
            let space = SpaceSpec::TwoMode {
                photon_dim: 8,
                n_atoms,
            };
            let h_sq = build_hamiltonian(HamiltonianVariant::SecondQuantized, &p, space)?;
            let h_g = build_hamiltonian(HamiltonianVariant::Gardiner, &p, space)?;
            let mut diff = &h_sq.entries - &h_g.entries;
            for i in 0..diff.nrows() {
                diff[(i, i)] = C64::from(0.0);
            }
            worst = worst.max(max_abs(&diff) / max_abs(&h_sq.entries).max(1e-300));
        }
        Ok((worst, "K = √N·k, N in {4, 8}: coupling structure identical off-diagonal".into()))
    })
}

fn check_printed_stark_collision() -> CheckResult {
    guarded("stark_collision_printed_operator", false, f64::INFINITY, || {
        let p = base_oracle();
        let space = SpaceSpec::Bosonic {
            photon_dim: 8,
            exciton_dim: 8,
        };
        let printed = build_perturbation_term(
            crate::oracle::PerturbTerm::StarkCollision,
            &p,
            space,
            false,
        )?;
        let herm = hermiticity_deviation(&printed.entries);
        let leak = coupling_between_blocks(&printed.entries, &TensorSpace::new(8, 8));
        Ok((
            herm,
            format!(
                "printed cubic operator: hermiticity deviation {:.3e}, \
                 inter-block coupling {:.3e}; the number-conserving quartic form \
                 is used in the normative pipeline",
                herm, leak
            ),
        ))
    })
}

fn check_gardiner_bosonic_corner() -> CheckResult {
    guarded("gardiner_bosonic_expansion_corner", false, f64::INFINITY, || {
        let mut residuals = Vec::new();
        for n_atoms in [10usize, 20] {
            let mut p = base_oracle();
            p.kappa = 0.0;
            p.big_n = n_atoms as f64;
            let h_two_mode = build_hamiltonian(
                HamiltonianVariant::Gardiner,
                &p,
                SpaceSpec::TwoMode {
                    photon_dim: 6,
                    n_atoms,
                },
            )?;
            let h_bosonic = build_hamiltonian(
                HamiltonianVariant::Total,
                &p,
                SpaceSpec::Bosonic {
                    photon_dim: 6,
                    exciton_dim: 6,
                },
            )?;
            let sector = n_atoms + 1;
            let mut worst = 0.0f64;
            for ph_row in 0..4usize {
                for e_row in 0..4usize {
                    for ph_col in 0..4usize {
                        for e_col in 0..4usize {
                            let tm = h_two_mode.entries
                                [(ph_row * sector + e_row, ph_col * sector + e_col)];
                            let bo = h_bosonic.entries
                                [(ph_row * 6 + e_row, ph_col * 6 + e_col)];
                            worst = worst.max((tm - bo).norm());
                        }
                    }
                }
            }
            residuals.push(worst);
        }
        Ok((
            residuals[0],
            format!(
                "exact collective pair vs first-order 1/N boson expansion, κ = 0, \
                 corner n, n_e ≤ 3: residual N=10: {:.4e}, N=20: {:.4e} (ratio {:.2}, \
                 ≈4 for a second-order remainder)",
                residuals[0],
                residuals[1],
                residuals[0] / residuals[1]
            ),
        ))
    })
}

fn check_effective_two_mode_map() -> CheckResult {
    guarded("effective_two_mode_population_convention", false, f64::INFINITY, || {
        let p = base_oracle();
        let n_atoms = 4usize;
        let photon_dim = 6usize;
        let h_eff = build_hamiltonian(
            HamiltonianVariant::Effective,
            &p,
            SpaceSpec::Dicke {
                photon_dim,
                n_atoms,
            },
        )?;
        let h_sq = build_hamiltonian(
            HamiltonianVariant::SecondQuantized,
            &p,
            SpaceSpec::TwoMode {
                photon_dim,
                n_atoms,
            },
        )?;
        let photon = crate::oracle::FockOps::new(photon_dim);
        let spin = crate::oracle::SpinOps::new(n_atoms);
        let s3 = photon.identity().kronecker(&spin.s3);
        let id_spin = DMatrix::<C64>::identity(spin.dim, spin.dim);
        let n_ph = (&photon.raise * &photon.lower).kronecker(&id_spin);
        let dim = s3.nrows();
        let id = DMatrix::<C64>::identity(dim, dim);
        let predicted = &s3 * C64::from(p.omega_p + p.delta)
            + &s3 * (&n_ph + &id * C64::from(0.5)) * C64::from(p.lambda * p.k);
        let residual = frobenius(&(&h_sq.entries - &h_eff.entries - &predicted))
            / frobenius(&h_sq.entries);
        Ok((
            residual,
            "doubled population-difference convention: difference of the two \
             printed forms equals (ω_p + Δ + λk(n̂ + 1/2))·S₃ exactly"
                .into(),
        ))
    })
}

// ----------------------------------------------------------- spectrum ----

/// Maps the 2j = 1 … 8 excitation blocks, in parallel when the `parallel`
/// feature is on; results come back in block order either way.
#[cfg(feature = "parallel")]
fn map_blocks<T, F>(f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    use rayon::prelude::*;
    (1..=8u64).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_blocks<T, F>(f: F) -> Result<Vec<T>>
where
    F: Fn(u64) -> Result<T>,
{
    (1..=8u64).map(f).collect()
}

fn check_perturbation_order_scaling() -> CheckResult {
    guarded("perturbation_order_scaling", true, 0.8, || {
        // The ratio test reads off the s² slope of the first-order error, so
        // it needs ‖H′‖ well inside the H₀ gap scale; otherwise third-order
        // terms contaminate the ratio at the pinned s values on levels whose
        // second-order coefficient happens to be small. The exactness checks
        // above deliberately use a strong deformation; this one must not.
        let p = OracleParams {
            omega_p: 1.0,
            delta: 0.2,
            k: 0.1,
            k_collective: 1.0,
            lambda: 0.05,
            kappa: 0.05,
            big_n: 40.0,
        };
        let per_block = map_blocks(|two_j| {
            let n_exc = two_j as usize;
            let h0 = build_hamiltonian(HamiltonianVariant::H0, &p, SpaceSpec::Block { n_exc })?;
            let hp =
                build_hamiltonian(HamiltonianVariant::HPrime, &p, SpaceSpec::Block { n_exc })?;
            let e0 = unperturbed_levels(two_j, &p);
            let e1 = matrix_element_oracle_block(two_j, &p)?;
            let scale = frobenius(&h0.entries);
            let floor = 1e-11 * scale;
            let err_at = |s: f64| -> Result<Vec<f64>> {
                let total = LabeledMatrix::new(
                    format!("H0 + {s}·H' [{n_exc}]"),
                    &h0.entries + &hp.entries * C64::from(s),
                );
                let exact = exact_levels(&total)?;
                Ok(exact
                    .iter()
                    .enumerate()
                    .map(|(n, e)| (e - e0[n] - s * e1[n]).abs())
                    .collect())
            };
            let coarse = err_at(1e-2)?;
            let fine = err_at(5e-3)?;
            let mut worst = 0.0f64;
            for n in 0..=n_exc {
                if coarse[n] < floor || fine[n] < floor {
                    continue; // level with no measurable second-order shift
                }
                worst = worst.max((coarse[n] / fine[n] - 4.0).abs());
            }
            Ok(worst)
        })?;
        let worst = per_block.into_iter().fold(0.0f64, f64::max);
        Ok((
            worst,
            "s in {1e-2, 5e-3}, every level of every block 2j ≤ 8, perturbative real-k set".into(),
        ))
    })
}

#[derive(Default)]
struct TermDiffStats {
    /// Worst relative residual per perturbation term, oracle vs closed form.
    printed: [f64; 7],
    /// Same with the derivative-consistent Stark bracket.
    consistent_stark: f64,
    /// |(printed Stark − oracle) − λk·j| (the exact printed offset).
    printed_stark_offset: f64,
}

impl TermDiffStats {
    fn merge_max(mut self, other: &TermDiffStats) -> TermDiffStats {
        for t in 0..7 {
            self.printed[t] = self.printed[t].max(other.printed[t]);
        }
        self.consistent_stark = self.consistent_stark.max(other.consistent_stark);
        self.printed_stark_offset = self.printed_stark_offset.max(other.printed_stark_offset);
        self
    }
}

fn term_diff_block(two_j: u64) -> Result<TermDiffStats> {
    let mut stats = TermDiffStats::default();
    let n_exc = two_j as usize;
    let gen = j_y_generator(n_exc);
    // One unitary per block; every term of every parameter set rotates
    // through the same frame.
    let u = rotation_operator(&gen, FRAC_PI_2)?;
    for p in seeded_oracle_sets() {
        let sp = SpectrumParams::from_oracle(&p);
        let rotated: Vec<DMatrix<C64>> = ALL_PERTURB_TERMS
            .iter()
            .map(|&term| {
                let m = build_perturbation_term(term, &p, SpaceSpec::Block { n_exc }, true)?;
                Ok(conjugate_by(&m, &u).entries)
            })
            .collect::<Result<_>>()?;
        for idx in 0..=n_exc {
            let two_m = 2 * idx as i64 - two_j as i64;
            let state = AngularState::new(two_j, two_m)?;
            let printed = correction_terms(state, &sp, StarkBracketForm::Printed);
            let consistent = correction_terms(state, &sp, StarkBracketForm::DerivativeConsistent);
            for (t, rot) in rotated.iter().enumerate() {
                let oracle = rot[(idx, idx)];
                let closed = printed.named()[t].1;
                let denom = oracle.norm().max(closed.norm()).max(1.0);
                let diff = (closed - oracle).norm() / denom;
                stats.printed[t] = stats.printed[t].max(diff);
                if t == 2 {
                    let closed_c = consistent.named()[t].1;
                    stats.consistent_stark =
                        stats.consistent_stark.max((closed_c - oracle).norm() / denom);
                    let offset = C64::from(p.lambda * p.k * (two_j as f64 / 2.0));
                    stats.printed_stark_offset = stats
                        .printed_stark_offset
                        .max((closed - oracle - offset).norm() / denom);
                }
            }
        }
    }
    Ok(stats)
}

fn term_diff_stats() -> Result<TermDiffStats> {
    let per_block = map_blocks(term_diff_block)?;
    Ok(per_block
        .into_iter()
        .fold(TermDiffStats::default(), |acc, b| acc.merge_max(&b)))
}

fn check_matrix_element_terms() -> Vec<CheckResult> {
    let stats = match term_diff_stats() {
        Ok(s) => s,
        Err(e) => {
            return vec![CheckResult {
                check_name: "matrix_element_term_diffs".into(),
                parameters: String::new(),
                residual: f64::INFINITY,
                bound: 1e-10,
                pass: false,
                hard: true,
                skipped: false,
                reason: e.to_string(),
            }];
        }
    };
    let grid = "2j ≤ 8, all m, base + 5 seeded parameter sets";
    let mut out = vec![
        guarded("term_exciton_energy_matches_oracle", true, 1e-10, || {
            Ok((stats.printed[0], grid.into()))
        }),
        guarded("term_exciton_collision_matches_oracle", true, 1e-10, || {
            Ok((stats.printed[1], grid.into()))
        }),
        guarded("term_stark_cross_consistent_matches_oracle", true, 1e-10, || {
            Ok((stats.consistent_stark, grid.into()))
        }),
        guarded("term_stark_cross_printed_offset_is_lambda_k_j", true, 1e-10, || {
            Ok((
                stats.printed_stark_offset,
                format!("printed bracket exceeds the oracle by exactly λk·j; {grid}"),
            ))
        }),
        guarded("term_stark_collision_matches_oracle", true, 1e-10, || {
            Ok((stats.printed[3], format!("number-conserving form; {grid}")))
        }),
    ];
    for (t, name) in [
        (4usize, "term_phase_space_filling_residual"),
        (5, "term_crt_coupling_residual"),
        (6, "term_crt_coupling_collision_residual"),
    ] {
        let value = stats.printed[t];
        out.push(guarded(name, false, f64::INFINITY, || {
            Ok((
                value,
                format!("published diff of the verbatim closed form vs oracle; {grid}"),
            ))
        }));
    }
    out
}

// ------------------------------------------------------ susceptibility ---

fn check_brace_identity() -> CheckResult {
    guarded("polarization_chi_brace_identity", true, 1e-12, || {
        let mut rng = ChaCha8Rng::seed_from_u64(0xb12a_ce5);
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let sp = SpectrumParams {
                omega_p: rng.gen_range(0.5..2.0),
                delta: rng.gen_range(-0.5..0.5),
                k: C64::new(rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4)),
                k_collective: C64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)),
                lambda: rng.gen_range(0.0..0.3),
                kappa: rng.gen_range(0.0..0.5),
                big_n: rng.gen_range(5.0_f64..40.0),
            };
            let eps = rng.gen_range(0.3..1.7);
            let n = rng.gen_range(0.0..30.0);
            let ne = rng.gen_range(0..4) as f64;
            let braces = polarization_braces(&sp, n, ne);
            let orders = chi_orders(&sp, eps, n, ne)?;
            let chi = [orders.chi1, orders.chi3, orders.chi5];
            for r in 0..3 {
                let e2r = eps.powi(2 * (r as i32 + 1));
                let back = chi[r] * C64::from(-e2r * crate::EPSILON_0 / crate::HBAR);
                let denom = braces[r].norm().max(back.norm()).max(1e-300);
                worst = worst.max((braces[r] - back).norm() / denom);
            }
        }
        Ok((worst, "100 seeded random points, complex coupling".into()))
    })
}

fn check_undeformed_reduction() -> CheckResult {
    guarded("undeformed_chi_nl_is_exactly_zero", true, 0.0, || {
        let sp = SpectrumParams {
            omega_p: 1.0,
            delta: 0.37,
            k: C64::new(0.21, -0.05),
            k_collective: C64::new(0.83, 0.11),
            lambda: 0.0,
            kappa: 0.0,
            big_n: f64::INFINITY,
        };
        let totals = chi_total(&sp, 0.7, 25.0, 1.0, PipelineFlags::default())?;
        Ok((totals.chi_nl.norm(), "λ = κ = η = 0".into()))
    })
}

fn check_matched_collision_reduction() -> CheckResult {
    guarded("matched_collision_chi5_is_exactly_zero", true, 0.0, || {
        let sp = SpectrumParams {
            omega_p: 1.0,
            delta: 0.37,
            k: C64::new(0.21, -0.05),
            k_collective: C64::new(0.83, 0.11),
            lambda: 0.15,
            kappa: 1.0 / 17.0,
            big_n: 17.0,
        };
        let orders = chi_orders(&sp, 0.7, 25.0, 1.0)?;
        Ok((orders.chi5.norm(), "κ = 1/N = 1/17".into()))
    })
}

fn pinned_pipeline(
    atom: &AtomSpec,
    drive: &DriveSpec,
    deform: &DeformationSpec,
    lambda: f64,
    kappa: f64,
    big_n: f64,
    include_free_term: bool,
) -> Result<Pipeline> {
    let mut d = deform.clone();
    d.lambda = lambda;
    d.kappa = kappa;
    d.big_n = big_n;
    d.lambda_mode = LambdaMode::Fixed;
    Pipeline::new(
        atom.clone(),
        drive.clone(),
        d,
        PipelineFlags { include_free_term },
    )
}

fn check_on_resonance_imaginary(
    atom: &AtomSpec,
    drive: &DriveSpec,
    deform: &DeformationSpec,
) -> CheckResult {
    guarded("chi_imaginary_vanishes_on_resonance", true, 1e-12, || {
        let pipeline = Pipeline::new(
            atom.clone(),
            drive.clone(),
            deform.clone(),
            PipelineFlags::default(),
        )?;
        let span = 10.0 * EffectiveGamma::from_atom(atom).opt;
        let mut max_im = 0.0f64;
        for i in 0..101 {
            let delta = -span + 2.0 * span * (i as f64 / 100.0);
            max_im = max_im.max(pipeline.point(delta, None)?.chi_total.im.abs());
        }
        let center = pipeline.point(0.0, None)?.chi_total.im.abs();
        let residual = if max_im == 0.0 { 0.0 } else { center / max_im };
        Ok((
            residual,
            format!("|Im χ(0)| = {center:.3e} vs sweep max {max_im:.3e} over ±10γ_opt"),
        ))
    })
}

fn check_group_index_richardson(
    atom: &AtomSpec,
    drive: &DriveSpec,
    deform: &DeformationSpec,
) -> CheckResult {
    guarded("group_index_richardson", true, 0.01, || {
        let pipeline =
            pinned_pipeline(atom, drive, deform, deform.lambda, deform.kappa, deform.big_n, false)?;
        let gamma_opt = EffectiveGamma::from_atom(atom).opt;
        let h = pipeline.default_fd_step();
        let samples = [0.0, 0.5, -0.5, 1.0, -1.0, 3.0, -3.0].map(|x| x * gamma_opt);
        let coarse: Vec<f64> = samples
            .iter()
            .map(|&d| Ok(pipeline.group_index(d, h)?.0))
            .collect::<Result<_>>()?;
        let fine: Vec<f64> = samples
            .iter()
            .map(|&d| Ok(pipeline.group_index(d, h / 2.0)?.0))
            .collect::<Result<_>>()?;
        let scale = fine.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let mut worst = 0.0f64;
        for (c, f) in coarse.iter().zip(fine.iter()) {
            if f.abs() > 1e-3 * scale {
                worst = worst.max((c - f).abs() / f.abs());
            }
        }
        Ok((
            worst,
            format!("h = {h:.3e} rad/s halved at 7 detunings (free term excluded)"),
        ))
    })
}

fn check_group_index_sign_change(
    atom: &AtomSpec,
    drive: &DriveSpec,
    deform: &DeformationSpec,
) -> CheckResult {
    guarded("group_index_attains_both_signs", true, 0.5, || {
        let pipeline = pinned_pipeline(atom, drive, deform, 0.3, 0.0, 1e20, false)?;
        let span = 40.0 * EffectiveGamma::from_atom(atom).opt;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..=200 {
            let delta = -span + 2.0 * span * (i as f64 / 200.0);
            let ng = pipeline.point(delta, None)?.n_group;
            lo = lo.min(ng);
            hi = hi.max(ng);
        }
        let residual = if lo < 0.0 && hi > 0.0 { 0.0 } else { 1.0 };
        Ok((
            residual,
            format!("λ = 0.3, κ = 0, η ≈ 0: n_group range [{lo:.3e}, {hi:.3e}] over ±40γ_opt"),
        ))
    })
}

fn max_abs_re_chi_nl(pipeline: &Pipeline, span: f64) -> Result<f64> {
    let mut max_nl = 0.0f64;
    for i in 0..=200 {
        let delta = -span + 2.0 * span * (i as f64 / 200.0);
        max_nl = max_nl.max(pipeline.point(delta, None)?.chi_nl.re.abs());
    }
    Ok(max_nl)
}

fn check_nonlinearity_monotone(
    atom: &AtomSpec,
    drive: &DriveSpec,
    deform: &DeformationSpec,
) -> Vec<CheckResult> {
    let span = 40.0 * EffectiveGamma::from_atom(atom).opt;
    let grids: [(&str, &str, [(f64, f64, f64); 3]); 3] = [
        (
            "chi_nl_monotone_in_lambda",
            "λ in {0, 0.1, 0.3}, κ = 0, η ≈ 0",
            [(0.0, 0.0, 1e20), (0.1, 0.0, 1e20), (0.3, 0.0, 1e20)],
        ),
        (
            "chi_nl_monotone_in_kappa",
            "κ in {0, 0.005, 0.008}, λ = 0.1, η ≈ 0",
            [(0.1, 0.0, 1e20), (0.1, 0.005, 1e20), (0.1, 0.008, 1e20)],
        ),
        (
            "chi_nl_monotone_in_eta",
            "η in {1/30, 1/20, 1/10}, λ = 0.1, κ = 0",
            [(0.1, 0.0, 30.0), (0.1, 0.0, 20.0), (0.1, 0.0, 10.0)],
        ),
    ];
    grids
        .into_iter()
        .map(|(name, label, curves)| {
            guarded(name, true, 1e-12, || {
                let maxima: Vec<f64> = curves
                    .iter()
                    .map(|&(lambda, kappa, big_n)| {
                        let p =
                            pinned_pipeline(atom, drive, deform, lambda, kappa, big_n, false)?;
                        max_abs_re_chi_nl(&p, span)
                    })
                    .collect::<Result<_>>()?;
                let scale = maxima.iter().fold(1e-300f64, |acc, v| acc.max(*v));
                let mut violation = 0.0f64;
                for w in maxima.windows(2) {
                    violation = violation.max((w[0] - w[1]).max(0.0) / scale);
                }
                Ok((
                    violation,
                    format!(
                        "{label}: max|Re χ_nl| = [{:.3e}, {:.3e}, {:.3e}] over ±40γ_opt",
                        maxima[0], maxima[1], maxima[2]
                    ),
                ))
            })
        })
        .collect()
}

/// Runs the full suite for one physical parameter set.
pub fn run_suite(atom: &AtomSpec, drive: &DriveSpec, deform: &DeformationSpec) -> Vec<CheckResult> {
    let mut checks = vec![
        check_steady_state(atom, drive),
        check_linear_coupling_resonance(atom, drive),
        check_linear_coupling_unit(atom),
        check_linear_coupling_symmetry(atom, drive),
        check_expansion_validity(drive, deform),
        check_deformed_commutator(),
        check_gardiner_lowering(),
        check_gardiner_commutator(),
        check_angular_momentum_algebra(),
        check_beam_splitter_identity(),
        check_block_conservation(),
    ];
    let lambda_eff = derive_couplings(atom, drive, deform, 0.0)
        .map(|d| d.lambda_eff)
        .unwrap_or(f64::NAN);
    checks.extend(check_crt_suite(lambda_eff));
    checks.push(check_second_quantized_gardiner());
    checks.push(check_printed_stark_collision());
    checks.push(check_gardiner_bosonic_corner());
    checks.push(check_effective_two_mode_map());
    checks.push(check_perturbation_order_scaling());
    checks.extend(check_matrix_element_terms());
    checks.push(check_brace_identity());
    checks.push(check_undeformed_reduction());
    checks.push(check_matched_collision_reduction());
    checks.push(check_on_resonance_imaginary(atom, drive, deform));
    checks.push(check_group_index_richardson(atom, drive, deform));
    checks.push(check_group_index_sign_change(atom, drive, deform));
    checks.extend(check_nonlinearity_monotone(atom, drive, deform));
    checks
}

/// Suite plus the aggregated verdict.
pub fn report(atom: &AtomSpec, drive: &DriveSpec, deform: &DeformationSpec) -> ValidationReport {
    let checks = run_suite(atom, drive, deform);
    ValidationReport {
        hard_pass: hard_pass(&checks),
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{sodium_atom, sodium_deformation, sodium_drive};

    #[test]
    fn sodium_suite_hard_passes() {
        let checks = run_suite(&sodium_atom(), &sodium_drive(), &sodium_deformation());
        for c in &checks {
            if c.hard {
                assert!(
                    c.pass,
                    "{} failed: residual {:.3e} > bound {:.3e} ({} / {})",
                    c.check_name, c.residual, c.bound, c.parameters, c.reason
                );
            }
        }
        assert!(hard_pass(&checks));
    }

    #[test]
    fn zero_lambda_skips_crt_check() {
        let mut deform = sodium_deformation();
        deform.lambda = 0.0;
        let checks = run_suite(&sodium_atom(), &sodium_drive(), &deform);
        let crt = checks
            .iter()
            .find(|c| c.check_name == "crt_elimination_suppression")
            .unwrap();
        assert!(crt.skipped);
        assert_eq!(crt.reason, "lambda=0");
        assert!(crt.pass);
    }

    #[test]
    fn failure_is_reported_not_panicked() {
        let mut atom = sodium_atom();
        atom.gamma12 = -1.0; // invalid: every physical check should fail, not panic
        let checks = run_suite(&atom, &sodium_drive(), &sodium_deformation());
        assert!(!hard_pass(&checks));
        assert!(checks.iter().any(|c| !c.pass && !c.reason.is_empty()));
    }
}
