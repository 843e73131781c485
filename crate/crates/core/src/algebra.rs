//! f-deformed oscillator coefficients and the collective-phonon algebra.
//!
//! A deformed mode replaces the annihilation operator c with c·f(n̂); the
//! choice f(n̂) = √(κn̂ + 1 − κ) models binary collisions with rate κ. The
//! collective phonon b_q = N^{-1/2} b_g⁺ b_e of an N-atom condensate obeys a
//! 1/N-deformed commutator on its own, so the collision deformation stacks on
//! top of it. Everything here is a closed-form coefficient; the matrix
//! counterparts live in [`crate::oracle`] and pin each formula.

/// Deformation profile applied to a bosonic mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeformationFunction {
    /// Undeformed oscillator, f(n) = 1.
    Identity,
    /// Collision deformation f(n) = √(κn + 1 − κ).
    Collision { kappa: f64 },
}

impl DeformationFunction {
    /// f(n). Always finite and non-negative for κ ∈ [0, 1].
    pub fn eval(&self, n: u64) -> f64 {
        match *self {
            DeformationFunction::Identity => 1.0,
            DeformationFunction::Collision { kappa } => f2(n, kappa),
        }
    }
}

/// Collision deformation profile f₂(n) = √(κn + 1 − κ).
///
/// For κ ∈ [0, 1] the radicand is 1 + κ(n − 1) ≥ 1 − κ ≥ 0.
pub fn f2(n: u64, kappa: f64) -> f64 {
    let radicand = kappa * n as f64 + (1.0 - kappa);
    debug_assert!(radicand >= 0.0, "negative radicand for kappa={kappa}, n={n}");
    radicand.sqrt()
}

/// Diagonal of the deformed commutator [A, A⁺] on |n⟩ for A = c·f(n̂):
/// (n+1)f²(n+1) − n f²(n).
pub fn deformed_commutator_diag(n: u64, f: &DeformationFunction) -> f64 {
    let up = f.eval(n + 1);
    let here = f.eval(n);
    (n + 1) as f64 * up * up - n as f64 * here * here
}

/// Eigenvalue of [b_q, b_q⁺] on a state with n_e excited atoms out of N:
/// 1 − 2 n_e / N.
pub fn gardiner_commutator_eigenvalue(n_e: u64, big_n: f64) -> f64 {
    1.0 - 2.0 * n_e as f64 / big_n
}

/// Lowering amplitude c(n) of the collision-deformed collective phonon in its
/// small-κ, leading-1/N expansion: B_q|n⟩ = c(n)|n−1⟩ with
/// c(n) = √n · (1 − (n−1)/(2N)) · (1 − (κ/2)(1 − n + n(n−1)/N)).
///
/// The κ-bracket acts on the state first; the matrix-product oracle pins this
/// ordering.
pub fn deformed_gardiner_lowering_coeff(n: u64, kappa: f64, big_n: f64) -> f64 {
    let nf = n as f64;
    let depletion = 1.0 - (nf - 1.0) / (2.0 * big_n);
    let collision = 1.0 - (kappa / 2.0) * (1.0 - nf + nf * (nf - 1.0) / big_n);
    nf.sqrt() * depletion * collision
}

/// Size of the expansion parameter κ(1 − n) behind the small-deformation
/// form. Values above 0.5 leave the trust region (soft warning, not an
/// error: exploratory sweeps may roam).
pub fn collision_expansion_parameter(n: u64, kappa: f64) -> f64 {
    (kappa * (1.0 - n as f64)).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn undeformed_limits() {
        for n in 0..20 {
            assert_eq!(f2(n, 0.0), 1.0);
            assert_eq!(DeformationFunction::Identity.eval(n), 1.0);
            assert_eq!(
                deformed_commutator_diag(n, &DeformationFunction::Identity),
                1.0
            );
        }
        // f₂(1) = 1 for every κ: κ·1 + 1 − κ = 1 identically.
        for kappa in [0.0, 0.1, 0.5, 1.0] {
            assert_relative_eq!(f2(1, kappa), 1.0, max_relative = 1e-15);
        }
    }

    #[test]
    fn collision_profile_values() {
        assert_relative_eq!(f2(3, 0.2), 1.4f64.sqrt(), max_relative = 1e-15);
        // n = 0 gives √(1−κ), nonzero: the deformed vacuum amplitude.
        assert_relative_eq!(f2(0, 0.19), 0.81f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn commutator_diagonal_values() {
        let f = DeformationFunction::Collision { kappa: 0.2 };
        // n = 0: f₂²(1) = 1.
        assert_relative_eq!(deformed_commutator_diag(0, &f), 1.0, max_relative = 1e-15);
        // n = 2: 3·1.4 − 2·1.2 = 1.8.
        assert_relative_eq!(deformed_commutator_diag(2, &f), 1.8, max_relative = 1e-14);
        // Closed form (n+1)(1+κn) − n(1+κ(n−1)) = 1 + 2κn.
        for n in 0..12 {
            assert_relative_eq!(
                deformed_commutator_diag(n, &f),
                1.0 + 2.0 * 0.2 * n as f64,
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn gardiner_commutator_values() {
        assert_eq!(gardiner_commutator_eigenvalue(0, 7.0), 1.0);
        assert_eq!(gardiner_commutator_eigenvalue(2, 4.0), 0.0);
        assert_relative_eq!(
            gardiner_commutator_eigenvalue(1, 4.0),
            0.5,
            max_relative = 1e-15
        );
    }

    #[test]
    fn lowering_coeff_values() {
        // Undeformed, infinite condensate: plain √n.
        for n in 1..10 {
            assert_relative_eq!(
                deformed_gardiner_lowering_coeff(n, 0.0, f64::INFINITY),
                (n as f64).sqrt(),
                max_relative = 1e-15
            );
        }
        // n = 1: both corrections are unity regardless of κ, N.
        assert_relative_eq!(
            deformed_gardiner_lowering_coeff(1, 0.3, 5.0),
            1.0,
            max_relative = 1e-15
        );
        // n = 2, N = 10, κ = 0.1: √2·0.95·1.04.
        assert_relative_eq!(
            deformed_gardiner_lowering_coeff(2, 0.1, 10.0),
            2f64.sqrt() * 0.95 * 1.04,
            max_relative = 1e-14
        );
    }

    #[test]
    fn expansion_parameter_flags_large_deformation() {
        assert!(collision_expansion_parameter(1, 1.0) == 0.0);
        assert!(collision_expansion_parameter(8, 0.1) > 0.5);
        assert!(collision_expansion_parameter(3, 0.008) < 0.5);
    }
}
