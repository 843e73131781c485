//! Exact diagonalization and numeric first-order perturbation theory on the
//! conserved excitation blocks.

use nalgebra::DMatrix;

use super::hamiltonian::{build_hamiltonian, HamiltonianVariant, SpaceSpec};
use super::rotate::rotate;
use super::space::{block_index_of, build_block_operators};
use super::{frobenius, require_hermitian, LabeledMatrix, OracleParams};
use crate::{Error, Result, C64};

/// Unperturbed block levels E⁰/ħ = ω_p·2j + K·(2n − 2j), indexed by photon
/// number n = 0 … 2j (equivalently by m = n − j ascending).
pub fn unperturbed_levels(two_j: u64, p: &OracleParams) -> Vec<f64> {
    let n_exc = two_j as f64;
    (0..=two_j)
        .map(|n| p.omega_p * n_exc + p.k_collective * (2.0 * n as f64 - n_exc))
        .collect()
}

/// Full spectrum of a Hermitian matrix, ascending, with per-pair residuals
/// ‖Hv − Ev‖ ≤ 1e-10·‖H‖ verified.
pub fn exact_levels(h: &LabeledMatrix) -> Result<Vec<f64>> {
    require_hermitian(&h.label, &h.entries, 1e-10)?;
    // Hermitize exactly so the solver sees a symmetric problem.
    let sym = (&h.entries + h.entries.adjoint()) * C64::new(0.5, 0.0);
    let scale = frobenius(&sym).max(1.0);
    let eig = sym.clone().symmetric_eigen();
    for col in 0..eig.eigenvectors.ncols() {
        let v = eig.eigenvectors.column(col);
        let residual = &sym * v - v * C64::new(eig.eigenvalues[col], 0.0);
        let norm = residual.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-10 * scale {
            return Err(Error::Solver(format!(
                "eigenpair residual {norm:.3e} exceeds 1e-10·‖{}‖",
                h.label
            )));
        }
    }
    let mut levels: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    levels.sort_by(|a, b| a.partial_cmp(b).expect("real eigenvalues"));
    Ok(levels)
}

fn rotated_perturbation(two_j: u64, p: &OracleParams) -> Result<DMatrix<C64>> {
    let n_exc = two_j as usize;
    let hp = build_hamiltonian(HamiltonianVariant::HPrime, p, SpaceSpec::Block { n_exc })?;
    let ops = build_block_operators(n_exc);
    let generator = LabeledMatrix::new("iJ_y", &ops.j_y * C64::new(0.0, 1.0));
    Ok(rotate(&hp, &generator, std::f64::consts::FRAC_PI_2)?.entries)
}

/// All first-order energies of one block at once: the diagonal of the
/// rotated perturbation, indexed by photon number (m ascending). One
/// ambient build and one rotation serve the whole block.
pub fn matrix_element_oracle_block(two_j: u64, p: &OracleParams) -> Result<Vec<f64>> {
    let rotated = rotated_perturbation(two_j, p)?;
    let scale = rotated.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    rotated
        .diagonal()
        .iter()
        .map(|val| {
            if val.im.abs() > 1e-10 * scale {
                Err(Error::Solver(format!(
                    "rotated diagonal has imaginary part {:.3e}",
                    val.im
                )))
            } else {
                Ok(val.re)
            }
        })
        .collect()
}

/// Numeric diagonal element ⟨jm| e^{iπJ_y/2} H′ e^{−iπJ_y/2} |jm⟩ / ħ, the
/// independent reference every closed-form first-order energy is judged
/// against.
pub fn matrix_element_oracle(two_j: u64, two_m: i64, p: &OracleParams) -> Result<f64> {
    let idx = block_index_of(two_j, two_m)?;
    Ok(matrix_element_oracle_block(two_j, p)?[idx])
}

/// First-order coefficients from an already-rotated perturbation matrix and
/// unperturbed levels; index `k_index` labels the state being corrected.
pub fn first_order_from_matrix(
    rotated: &DMatrix<C64>,
    e0: &[f64],
    k_index: usize,
    degeneracy_scale: f64,
) -> Result<Vec<C64>> {
    let dim = e0.len();
    if rotated.nrows() != dim || k_index >= dim {
        return Err(Error::Dimension(format!(
            "first-order correction: matrix {}×{}, {} levels, index {}",
            rotated.nrows(),
            rotated.ncols(),
            dim,
            k_index
        )));
    }
    let mut coeffs = vec![C64::new(0.0, 0.0); dim];
    coeffs[k_index] = C64::new(1.0, 0.0);
    for n in 0..dim {
        if n == k_index {
            continue;
        }
        let gap = e0[k_index] - e0[n];
        if gap.abs() <= 1e-12 * degeneracy_scale.abs() {
            return Err(Error::DegenerateLevels {
                a: k_index,
                b: n,
                spacing: gap.abs(),
            });
        }
        coeffs[n] = rotated[(n, k_index)] / C64::new(gap, 0.0);
    }
    Ok(coeffs)
}

/// First-order corrected eigenvector of the block Hamiltonian in the
/// rotated (unperturbed-eigenstate) basis.
pub fn first_order_state(two_j: u64, k_index: usize, p: &OracleParams) -> Result<Vec<C64>> {
    let rotated = rotated_perturbation(two_j, p)?;
    let e0 = unperturbed_levels(two_j, p);
    first_order_from_matrix(&rotated, &e0, k_index, p.k_collective.max(1e-300))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_params() -> OracleParams {
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

    #[test]
    fn unperturbed_block_spectrum_matches_diagonalization() {
        let p = base_params();
        for two_j in [1u64, 2, 5, 8] {
            let h0 = build_hamiltonian(
                HamiltonianVariant::H0,
                &p,
                SpaceSpec::Block {
                    n_exc: two_j as usize,
                },
            )
            .unwrap();
            let exact = exact_levels(&h0).unwrap();
            let mut predicted = unperturbed_levels(two_j, &p);
            predicted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (e, pr) in exact.iter().zip(&predicted) {
                assert!((e - pr).abs() < 1e-11 * pr.abs().max(1.0));
            }
        }
    }

    #[test]
    fn zero_matrix_has_zero_spectrum() {
        let z = LabeledMatrix::new("zero", DMatrix::<C64>::zeros(4, 4));
        let levels = exact_levels(&z).unwrap();
        assert!(levels.iter().all(|e| e.abs() < 1e-300));
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let mut m = DMatrix::<C64>::zeros(2, 2);
        m[(0, 1)] = C64::new(1.0, 0.0);
        assert!(exact_levels(&LabeledMatrix::new("bad", m)).is_err());
    }

    #[test]
    fn vacuum_block_has_no_correction() {
        let p = base_params();
        assert_eq!(matrix_element_oracle(0, 0, &p).unwrap(), 0.0);
    }

    #[test]
    fn undeformed_uncoupled_limit_gives_exciton_energy_times_j() {
        // λ = κ = η = 0 leaves only the exciton-energy term; its rotated
        // diagonal is (ω_p/2 + Δ)·j independent of m.
        let p = OracleParams {
            lambda: 0.0,
            kappa: 0.0,
            big_n: f64::INFINITY,
            ..base_params()
        };
        let expected_unit = p.omega_p / 2.0 + p.delta;
        for two_j in [1u64, 2, 3, 6] {
            let j = two_j as f64 / 2.0;
            let mut m = -(two_j as i64);
            while m <= two_j as i64 {
                let got = matrix_element_oracle(two_j, m, &p).unwrap();
                assert!(
                    (got - expected_unit * j).abs() < 1e-12 * expected_unit.abs().max(1.0),
                    "2j={two_j}, 2m={m}: {got}"
                );
                m += 2;
            }
        }
    }

    #[test]
    fn spin_half_oracle_value_without_collisions() {
        // Hand evaluation on the 2-state block: exciton energy contributes
        // (ω_p/2 + Δ)/2, the Stark cross term b⁺b·a⁺a is the zero matrix on
        // this block, and the counter-rotating correction contributes
        // −λ²K·2m after rotation.
        let p = OracleParams {
            kappa: 0.0,
            big_n: f64::INFINITY,
            ..base_params()
        };
        let t1 = (p.omega_p / 2.0 + p.delta) / 2.0;
        let lower = matrix_element_oracle(1, -1, &p).unwrap();
        let upper = matrix_element_oracle(1, 1, &p).unwrap();
        let shift = p.lambda * p.lambda * p.k_collective;
        assert!((lower - (t1 + shift)).abs() < 1e-12);
        assert!((upper - (t1 - shift)).abs() < 1e-12);
    }

    #[test]
    fn zero_perturbation_leaves_unit_vector() {
        let p = OracleParams {
            omega_p: 0.0,
            delta: 0.0,
            k: 0.0,
            lambda: 0.0,
            kappa: 0.0,
            big_n: f64::INFINITY,
            ..base_params()
        };
        let coeffs = first_order_state(3, 1, &p).unwrap();
        assert!((coeffs[1] - C64::new(1.0, 0.0)).norm() < 1e-14);
        for (i, z) in coeffs.iter().enumerate() {
            if i != 1 {
                assert!(z.norm() < 1e-14);
            }
        }
    }

    #[test]
    fn spin_half_first_order_coefficient_matches_hand_value() {
        // Only the exciton-energy term on the 2j = 1 block: rotated matrix
        // (ω_p/2 + Δ)(N̂/2 + J_x), off-diagonal (ω_p/2 + Δ)/2, level gap
        // −2K, so the opposite-m coefficient is −(ω_p/2 + Δ)/(4K).
        let p = OracleParams {
            lambda: 0.0,
            kappa: 0.0,
            big_n: f64::INFINITY,
            ..base_params()
        };
        let coeffs = first_order_state(1, 0, &p).unwrap();
        let expected = -(p.omega_p / 2.0 + p.delta) / (4.0 * p.k_collective);
        assert!((coeffs[1] - C64::new(expected, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn first_order_coefficients_are_linear_in_perturbation() {
        let p = base_params();
        let rotated = rotated_perturbation(6, &p).unwrap();
        let e0 = unperturbed_levels(6, &p);
        let base = first_order_from_matrix(&rotated, &e0, 2, p.k_collective).unwrap();
        let scaled_matrix = &rotated * C64::new(0.37, 0.0);
        let scaled = first_order_from_matrix(&scaled_matrix, &e0, 2, p.k_collective).unwrap();
        for (i, (b, s)) in base.iter().zip(&scaled).enumerate() {
            if i == 2 {
                continue;
            }
            assert!((s - b * C64::new(0.37, 0.0)).norm() < 1e-10 * b.norm().max(1e-30));
        }
    }

    #[test]
    fn degenerate_levels_are_reported_with_pair() {
        let p = OracleParams {
            k_collective: 0.0,
            ..base_params()
        };
        match first_order_state(2, 0, &p) {
            Err(Error::DegenerateLevels { a, b, .. }) => {
                assert_eq!(a, 0);
                assert_ne!(a, b);
            }
            other => panic!("expected degeneracy error, got {other:?}"),
        }
    }
}
