//! Acceptance gates for the dispersion pipeline: ten criteria, one printed
//! verdict line each. Every bound is pinned here as a constant so a
//! regression cannot slip through by loosening a tolerance elsewhere.
//!
//! Criteria 5 and 6 read the named checks of the runtime validation suite
//! (shared across tests through a `OnceLock`); everything else is computed
//! directly against the public API.

use std::f64::consts::TAU;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use defbec_core::algebra::gardiner_commutator_eigenvalue;
use defbec_core::bloch::{analytic_rho32, linear_coupling, steady_state_numeric, EffectiveGamma};
use defbec_core::chi::{chi_orders, polarization_braces, Pipeline, PipelineFlags};
use defbec_core::oracle::{
    build_block_operators, build_hamiltonian, verify_crt_elimination, HamiltonianVariant,
    OracleParams, SpaceSpec, TwoModeAtoms,
};
use defbec_core::params::{
    sodium_atom, sodium_deformation, sodium_drive, DeformationSpec, LambdaMode,
};
use defbec_core::spectrum::SpectrumParams;
use defbec_core::sweep::{run_sweep, to_csv, SweepConfig, SweepFlags};
use defbec_core::validate::{self, CheckResult, ValidationReport};
use defbec_core::{EPSILON_0, HBAR};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const STEADY_STATE_REL: f64 = 1e-3;
const STEADY_STATE_BUDGET: Duration = Duration::from_secs(1);
const COUPLING_RESONANCE_VALUE: f64 = 8.29e-4;
const COUPLING_RESONANCE_REL: f64 = 0.01;
const SYMMETRY_REL: f64 = 1e-12;
const ALGEBRA_ABS: f64 = 1e-12;
const CRT_MIN_SUPPRESSION: f64 = 100.0;
const CRT_RATIO_DEV: f64 = 2.0; // 25% of the cubic-remainder ratio 8
const ORDER_RATIO_DEV: f64 = 1.0; // 25% of the quadratic-remainder ratio 4
const TERM_ORACLE_REL: f64 = 1e-10;
const BRACE_IDENTITY_REL: f64 = 1e-12;
const RESONANCE_IM_REL: f64 = 1e-12;
const RICHARDSON_REL: f64 = 0.01;
const SWEEP_BUDGET: Duration = Duration::from_secs(5);

fn verdict(idx: u32, name: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("acceptance {idx:02} {name}: {tag} ({detail})");
}

fn suite() -> &'static ValidationReport {
    static SUITE: OnceLock<ValidationReport> = OnceLock::new();
    SUITE.get_or_init(|| {
        validate::report(&sodium_atom(), &sodium_drive(), &sodium_deformation())
    })
}

fn named_check(name: &str) -> &'static CheckResult {
    suite()
        .checks
        .iter()
        .find(|c| c.check_name == name)
        .unwrap_or_else(|| panic!("validation suite has no check named {name}"))
}

#[test]
fn criterion_01_steady_state_weak_probe_oracle() {
    let atom = sodium_atom();
    let drive = sodium_drive();
    let g_opt = EffectiveGamma::from_atom(&atom).opt;
    let g2 = drive.g1 * C64::from(1e-3);
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for delta in [0.0, g_opt, -g_opt, 10.0 * g_opt, -10.0 * g_opt] {
        let rho = steady_state_numeric(&atom, drive.g1, g2, delta, 0.0).unwrap();
        let numeric = rho[(2, 1)] / g2;
        let reference = analytic_rho32(&atom, drive.g1, delta).unwrap();
        worst = worst.max((numeric - reference).norm() / reference.norm());
    }
    let elapsed = t0.elapsed();
    let pass = worst <= STEADY_STATE_REL && elapsed <= STEADY_STATE_BUDGET;
    verdict(
        1,
        "steady_state_weak_probe_oracle",
        pass,
        &format!(
            "worst rel dev {worst:.2e} <= {STEADY_STATE_REL:.0e} over Δ ∈ {{0, ±γ_opt, ±10γ_opt}} at g2 = 1e-3·g1; {elapsed:.2?} < 1 s"
        ),
    );
    assert!(pass, "worst = {worst:.3e}, elapsed = {elapsed:.2?}");
}

#[test]
fn criterion_02_linear_coupling_value_and_symmetry() {
    let atom = sodium_atom();
    let drive = sodium_drive();
    let g_opt = EffectiveGamma::from_atom(&atom).opt;

    let at_resonance = linear_coupling(&atom, drive.g1, 0.0).unwrap();
    let value_dev =
        (at_resonance - C64::from(COUPLING_RESONANCE_VALUE)).norm() / COUPLING_RESONANCE_VALUE;

    let mut unit_dev = 0.0f64;
    for delta in [0.0, g_opt, -3.0 * g_opt] {
        let unit = linear_coupling(&atom, C64::new(0.0, 0.0), delta).unwrap();
        unit_dev = unit_dev.max((unit - C64::new(1.0, 0.0)).norm());
    }

    let mut sym_dev = 0.0f64;
    for i in 0..100 {
        let delta = -10.0 * g_opt + 20.0 * g_opt * (i as f64 / 99.0);
        let plus = linear_coupling(&atom, drive.g1, delta).unwrap();
        let minus = linear_coupling(&atom, drive.g1, -delta).unwrap();
        sym_dev = sym_dev.max((minus - plus.conj()).norm() / plus.norm());
    }

    let pass = value_dev <= COUPLING_RESONANCE_REL && unit_dev == 0.0 && sym_dev <= SYMMETRY_REL;
    verdict(
        2,
        "linear_coupling_value_and_symmetry",
        pass,
        &format!(
            "resonance value {:.4e} within {value_dev:.2e} of {COUPLING_RESONANCE_VALUE}; undriven ratio exactly 1; conjugate symmetry dev {sym_dev:.2e} over 100 points",
            at_resonance.re
        ),
    );
    assert!(pass, "value {value_dev:.3e}, unit {unit_dev:.3e}, sym {sym_dev:.3e}");
}

#[test]
fn criterion_03_angular_momentum_and_commutator_algebra() {
    let i = C64::i();
    let max_abs = |m: &DMatrix<C64>| m.iter().map(|z| z.norm()).fold(0.0, f64::max);

    let mut algebra_dev = 0.0f64;
    for n_exc in 1..=12usize {
        let ops = build_block_operators(n_exc);
        let comms = [
            (&ops.j_x * &ops.j_y - &ops.j_y * &ops.j_x, &ops.j_z),
            (&ops.j_y * &ops.j_z - &ops.j_z * &ops.j_y, &ops.j_x),
            (&ops.j_z * &ops.j_x - &ops.j_x * &ops.j_z, &ops.j_y),
        ];
        for (comm, target) in comms {
            algebra_dev = algebra_dev.max(max_abs(&(comm - target * i)));
        }
        let j = n_exc as f64 / 2.0;
        let casimir = &ops.j_x * &ops.j_x + &ops.j_y * &ops.j_y + &ops.j_z * &ops.j_z;
        let expected = DMatrix::<C64>::identity(n_exc + 1, n_exc + 1) * C64::from(j * (j + 1.0));
        algebra_dev = algebra_dev.max(max_abs(&(casimir - expected)));
    }

    let p = OracleParams {
        omega_p: 1.0,
        delta: 0.37,
        k: 0.21,
        k_collective: 0.83,
        lambda: 0.15,
        kappa: 0.3,
        big_n: 17.0,
    };
    let mut splitter_dev = 0.0f64;
    for n_exc in 1..=12usize {
        let h0 = build_hamiltonian(HamiltonianVariant::H0, &p, SpaceSpec::Block { n_exc }).unwrap();
        let ops = build_block_operators(n_exc);
        let expected = DMatrix::<C64>::identity(n_exc + 1, n_exc + 1)
            * C64::from(p.omega_p * n_exc as f64)
            + &ops.j_x * C64::from(2.0 * p.k_collective);
        let scale = h0.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let dev = (&h0.entries - &expected)
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt();
        splitter_dev = splitter_dev.max(dev / scale);
    }

    let mut gardiner_dev = 0.0f64;
    for n_atoms in 1..=10usize {
        let tm = TwoModeAtoms::new(n_atoms);
        let comm = &tm.b_q * &tm.b_q_dag - &tm.b_q_dag * &tm.b_q;
        for ne in 0..=n_atoms {
            let closed = gardiner_commutator_eigenvalue(ne as u64, n_atoms as f64);
            gardiner_dev = gardiner_dev.max((comm[(ne, ne)] - C64::from(closed)).norm());
            for other in 0..=n_atoms {
                if other != ne {
                    gardiner_dev = gardiner_dev.max(comm[(ne, other)].norm());
                }
            }
        }
    }

    let pass =
        algebra_dev <= ALGEBRA_ABS && splitter_dev <= ALGEBRA_ABS && gardiner_dev <= ALGEBRA_ABS;
    verdict(
        3,
        "angular_momentum_and_commutator_algebra",
        pass,
        &format!(
            "J-commutators/Casimir dev {algebra_dev:.2e} (blocks ≤ 12); beam-splitter form dev {splitter_dev:.2e}; collective-pair commutator dev {gardiner_dev:.2e} (N ≤ 10); all ≤ {ALGEBRA_ABS:.0e}"
        ),
    );
    assert!(
        pass,
        "algebra {algebra_dev:.3e}, splitter {splitter_dev:.3e}, gardiner {gardiner_dev:.3e}"
    );
}

#[test]
fn criterion_04_counter_rotating_elimination() {
    // Real coupling, matched rotation parameter k/2ω̄ ≤ 1e-2.
    let p = OracleParams {
        omega_p: 1.0,
        delta: 0.2,
        k: 0.02,
        k_collective: 0.04,
        lambda: 0.0,
        kappa: 0.0,
        big_n: 1e6,
    };
    let report = verify_crt_elimination(&p, 4, 8, None).unwrap();
    let ratio_dev = (report.bch_ratio - 8.0).abs();
    let pass = report.lambda <= 1e-2
        && report.suppression >= CRT_MIN_SUPPRESSION
        && ratio_dev <= CRT_RATIO_DEV;
    verdict(
        4,
        "counter_rotating_elimination",
        pass,
        &format!(
            "λ = {:.3e}: coupling coefficient suppressed {:.0}× (≥ {CRT_MIN_SUPPRESSION}); remainder ratio {:.3} within {CRT_RATIO_DEV} of 8",
            report.lambda, report.suppression, report.bch_ratio
        ),
    );
    assert!(
        pass,
        "lambda {:.3e}, suppression {:.1}, ratio {:.3}",
        report.lambda, report.suppression, report.bch_ratio
    );
}

#[test]
fn criterion_05_perturbation_order_scaling() {
    let check = named_check("perturbation_order_scaling");
    let pass = check.pass && check.residual <= ORDER_RATIO_DEV;
    verdict(
        5,
        "perturbation_order_scaling",
        pass,
        &format!(
            "worst |err(s)/err(s/2) − 4| = {:.3} ≤ {ORDER_RATIO_DEV} ({})",
            check.residual, check.parameters
        ),
    );
    assert!(pass, "residual {:.3e}", check.residual);
}

#[test]
fn criterion_06_first_order_energy_term_oracle() {
    let hard_terms = [
        "term_exciton_energy_matches_oracle",
        "term_exciton_collision_matches_oracle",
        "term_stark_cross_consistent_matches_oracle",
        "term_stark_cross_printed_offset_is_lambda_k_j",
        "term_stark_collision_matches_oracle",
    ];
    let mut worst = 0.0f64;
    let mut pass = true;
    for name in hard_terms {
        let check = named_check(name);
        worst = worst.max(check.residual);
        pass &= check.pass && check.residual <= TERM_ORACLE_REL;
    }
    // The remaining corrections are transcribed verbatim and publish their
    // oracle diff instead of asserting it (two contain a self-cancelling
    // bracket in the source expression).
    let published: Vec<String> = [
        "term_phase_space_filling_residual",
        "term_crt_coupling_residual",
        "term_crt_coupling_collision_residual",
    ]
    .iter()
    .map(|name| {
        let check = named_check(name);
        pass &= !check.hard;
        format!("{name} = {:.2e}", check.residual)
    })
    .collect();
    verdict(
        6,
        "first_order_energy_term_oracle",
        pass,
        &format!(
            "hard terms worst rel dev {worst:.2e} ≤ {TERM_ORACLE_REL:.0e}; published soft diffs: {}",
            published.join(", ")
        ),
    );
    assert!(pass, "worst hard residual {worst:.3e}");
}

#[test]
fn criterion_07_polarization_chi_brace_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0acc_e507);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let sp = SpectrumParams {
            omega_p: rng.gen_range(0.5..2.0),
            delta: rng.gen_range(-0.5..0.5),
            k: C64::new(rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4)),
            k_collective: C64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)),
            lambda: rng.gen_range(0.0..0.3),
            kappa: rng.gen_range(0.0..0.5),
            big_n: rng.gen_range(5.0_f64..40.0).round(),
        };
        let eps = rng.gen_range(0.3..1.7);
        let n = rng.gen_range(0.0..30.0);
        let ne = rng.gen_range(0..4) as f64;
        let braces = polarization_braces(&sp, n, ne);
        let orders = chi_orders(&sp, eps, n, ne).unwrap();
        let chi = [orders.chi1, orders.chi3, orders.chi5];
        for r in 0..3 {
            let lhs = -braces[r] * HBAR;
            let rhs = chi[r] * C64::from(EPSILON_0 * eps.powi(2 * (r as i32 + 1)));
            let denom = lhs.norm().max(rhs.norm()).max(1e-300);
            worst = worst.max((lhs - rhs).norm() / denom);
        }
    }
    let pass = worst <= BRACE_IDENTITY_REL;
    verdict(
        7,
        "polarization_chi_brace_identity",
        pass,
        &format!(
            "−ħ·brace_r vs ε₀·χ^(2r−1)·ε^(2r): worst rel dev {worst:.2e} ≤ {BRACE_IDENTITY_REL:.0e} at 100 random points"
        ),
    );
    assert!(pass, "worst = {worst:.3e}");
}

#[test]
fn criterion_08_exact_reductions() {
    // No rotation, no collisions, no finite-size correction: the nonlinear
    // orders vanish identically.
    let undeformed = SpectrumParams {
        omega_p: 1.0,
        delta: 0.37,
        k: C64::new(0.21, -0.05),
        k_collective: C64::new(0.83, 0.11),
        lambda: 0.0,
        kappa: 0.0,
        big_n: f64::INFINITY,
    };
    let orders = chi_orders(&undeformed, 0.7, 25.0, 1.0).unwrap();
    let nl_zero = orders.chi3 == C64::new(0.0, 0.0) && orders.chi5 == C64::new(0.0, 0.0);

    // Collision rate matched to the finite-size correction: the fifth order
    // vanishes identically.
    let matched = SpectrumParams {
        kappa: 1.0 / 17.0,
        big_n: 17.0,
        lambda: 0.15,
        ..undeformed
    };
    let chi5_zero = chi_orders(&matched, 0.7, 25.0, 1.0).unwrap().chi5 == C64::new(0.0, 0.0);

    // On resonance the susceptibility is purely real.
    let pipeline = Pipeline::new(
        sodium_atom(),
        sodium_drive(),
        sodium_deformation(),
        PipelineFlags::default(),
    )
    .unwrap();
    let g_opt = EffectiveGamma::from_atom(&pipeline.atom).opt;
    let mut max_im = 0.0f64;
    for i in 0..101 {
        let delta = -10.0 * g_opt + 20.0 * g_opt * (i as f64 / 100.0);
        max_im = max_im.max(pipeline.point(delta, None).unwrap().chi_total.im.abs());
    }
    let im_zero = pipeline.point(0.0, None).unwrap().chi_total.im.abs();
    let im_rel = im_zero / max_im;

    let pass = nl_zero && chi5_zero && im_rel <= RESONANCE_IM_REL;
    verdict(
        8,
        "exact_reductions",
        pass,
        &format!(
            "undeformed χ_nl ≡ 0: {nl_zero}; matched-collision χ⁽⁵⁾ ≡ 0: {chi5_zero}; |Im χ(0)| / max|Im χ| = {im_rel:.2e} ≤ {RESONANCE_IM_REL:.0e}"
        ),
    );
    assert!(pass, "nl_zero {nl_zero}, chi5_zero {chi5_zero}, im_rel {im_rel:.3e}");
}

fn figure_pipeline(lambda: f64, kappa: f64, big_n: f64) -> Pipeline {
    Pipeline::new(
        sodium_atom(),
        sodium_drive(),
        DeformationSpec {
            kappa,
            big_n,
            lambda,
            lambda_mode: LambdaMode::Fixed,
        },
        PipelineFlags {
            include_free_term: false,
        },
    )
    .unwrap()
}

fn max_abs_re_chi_nl(pipeline: &Pipeline) -> f64 {
    let span = TAU * 2.0e8;
    (0..201)
        .map(|i| {
            let delta = -span + 2.0 * span * (i as f64 / 200.0);
            pipeline.point(delta, None).unwrap().chi_nl.re.abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn criterion_09_dispersion_qualitative_behavior() {
    // Group index changes sign across the sweep for the strongest rotation.
    let strong = figure_pipeline(0.3, 0.0, 1e20);
    let span = TAU * 2.0e8;
    let (mut saw_pos, mut saw_neg) = (false, false);
    for i in 0..201 {
        let delta = -span + 2.0 * span * (i as f64 / 200.0);
        let ng = strong.point(delta, None).unwrap().n_group;
        saw_pos |= ng > 0.0;
        saw_neg |= ng < 0.0;
    }

    // The nonlinear response strength is nondecreasing in each knob.
    let chain = |values: &[(f64, f64, f64)]| -> (String, bool) {
        let maxima: Vec<f64> = values
            .iter()
            .map(|&(l, k, n)| max_abs_re_chi_nl(&figure_pipeline(l, k, n)))
            .collect();
        let ok = maxima.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12));
        let shown: Vec<String> = maxima.iter().map(|v| format!("{v:.3e}")).collect();
        (shown.join(" → "), ok)
    };
    let (lambda_maxima, lambda_ok) =
        chain(&[(0.0, 0.0, 1e20), (0.1, 0.0, 1e20), (0.3, 0.0, 1e20)]);
    let (kappa_maxima, kappa_ok) =
        chain(&[(0.1, 0.0, 1e20), (0.1, 0.005, 1e20), (0.1, 0.008, 1e20)]);
    let (eta_maxima, eta_ok) = chain(&[(0.1, 0.0, 30.0), (0.1, 0.0, 20.0), (0.1, 0.0, 10.0)]);

    let pass = saw_pos && saw_neg && lambda_ok && kappa_ok && eta_ok;
    verdict(
        9,
        "dispersion_qualitative_behavior",
        pass,
        &format!(
            "n_group attains both signs at λ = 0.3: {}; max|Re χ_nl| nondecreasing over λ [{lambda_maxima}], κ [{kappa_maxima}], η = 1/N [{eta_maxima}]",
            saw_pos && saw_neg
        ),
    );
    assert!(
        pass,
        "signs ({saw_pos}, {saw_neg}), λ {lambda_ok} {lambda_maxima:?}, κ {kappa_ok} {kappa_maxima:?}, η {eta_ok} {eta_maxima:?}"
    );
}

#[test]
fn criterion_10_numerical_hygiene() {
    // Halving the stencil step moves the group index by < 1% away from its
    // zero crossings.
    let pipeline = figure_pipeline(0.1, 0.0, 1e20);
    let g_opt = EffectiveGamma::from_atom(&pipeline.atom).opt;
    let h = pipeline.default_fd_step();
    let detunings = [
        0.0,
        0.5 * g_opt,
        -0.5 * g_opt,
        g_opt,
        -g_opt,
        3.0 * g_opt,
        -3.0 * g_opt,
    ];
    let coarse: Vec<f64> = detunings
        .iter()
        .map(|&d| pipeline.group_index(d, h).unwrap().0)
        .collect();
    let fine: Vec<f64> = detunings
        .iter()
        .map(|&d| pipeline.group_index(d, h / 2.0).unwrap().0)
        .collect();
    let scale = coarse.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let mut richardson_dev = 0.0f64;
    for (c, f) in coarse.iter().zip(&fine) {
        if c.abs() > 1e-3 * scale {
            richardson_dev = richardson_dev.max((c - f).abs() / c.abs());
        }
    }

    // The reference figure-scale sweep is fast and byte-deterministic.
    let config = SweepConfig {
        params_file: "unused".into(),
        delta_min_hz: -2.0e8,
        delta_max_hz: 2.0e8,
        steps: 1000,
        lambda_list: vec![0.0, 0.1, 0.3],
        kappa_list: vec![0.0],
        n_list: vec![1e20],
        flags: SweepFlags {
            include_free_term: false,
            lambda_mode: None,
        },
        fd_step_hz: None,
    };
    let atom = sodium_atom();
    let drive = sodium_drive();
    let deform = sodium_deformation();
    let t0 = Instant::now();
    let rows_first = run_sweep(&atom, &drive, &deform, &config).unwrap();
    let elapsed = t0.elapsed();
    let rows_second = run_sweep(&atom, &drive, &deform, &config).unwrap();
    let csv_first = to_csv(&rows_first);
    let csv_second = to_csv(&rows_second);
    let deterministic = csv_first == csv_second;

    let pass = richardson_dev <= RICHARDSON_REL
        && rows_first.len() == 3000
        && elapsed <= SWEEP_BUDGET
        && deterministic;
    verdict(
        10,
        "numerical_hygiene",
        pass,
        &format!(
            "group-index step-halving dev {richardson_dev:.2e} ≤ {RICHARDSON_REL}; 1000-point 3-curve sweep in {elapsed:.2?} < 5 s, {} bytes, repeat run byte-identical: {deterministic}",
            csv_first.len()
        ),
    );
    assert!(
        pass,
        "richardson {richardson_dev:.3e}, rows {}, elapsed {elapsed:.2?}, deterministic {deterministic}",
        rows_first.len()
    );
}
