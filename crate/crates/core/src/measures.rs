//! Nonclassicality measures: l1-norm of coherence and negativity.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{
    hermitian_eig, partial_transpose_qubit, trace_norm, ComplexMatrix, HERMITICITY_TOL,
};
use crate::thermal_state::DensityMatrix;

/// Reference basis for the coherence measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CoherenceBasis {
    /// The fixed computational basis of the composite system.
    Computational,
    /// The eigenbasis of the battery Hamiltonian. Offered as a diagnostic:
    /// charger-only evolution is diagonal in the computational basis and
    /// leaves the computational coherence constant, while a rotated basis
    /// can expose the phase dynamics.
    BatteryEigenbasis,
}

/// Sum of |rho_ij| over i != j in the chosen basis.
///
/// `h_b` is required exactly when the basis is `BatteryEigenbasis`. The
/// value is 0 for states diagonal in the chosen basis and bounded by
/// d - 1 = 5.
pub fn l1_coherence(
    rho: &DensityMatrix,
    basis: CoherenceBasis,
    h_b: Option<&ComplexMatrix>,
) -> Result<f64> {
    let mat = match basis {
        CoherenceBasis::Computational => rho.mat().clone(),
        CoherenceBasis::BatteryEigenbasis => {
            let h_b = h_b.ok_or(Error::MissingHamiltonian)?;
            let eig = hermitian_eig(h_b, HERMITICITY_TOL)?;
            let v = &eig.eigenvectors;
            v.dagger().matmul(rho.mat()).matmul(v)
        }
    };
    let mut sum = 0.0;
    for i in 0..6 {
        for j in 0..6 {
            if i != j {
                sum += mat[(i, j)].norm();
            }
        }
    }
    Ok(sum)
}

/// Negativity from the magnitude of the negative eigenvalues of the
/// partial transpose; bounded by 1/2 for a 2x3 system.
pub fn negativity(rho: &DensityMatrix) -> Result<f64> {
    let pt = partial_transpose_qubit(rho.mat())?;
    let eig = hermitian_eig(&pt, HERMITICITY_TOL)?;
    // Fold from +0.0: the empty-sum identity of iter::Sum is -0.0, which
    // would leak a "-0" into serialized output for separable states.
    Ok(eig
        .eigenvalues
        .iter()
        .filter(|&&l| l < 0.0)
        .fold(0.0, |acc, l| acc - l))
}

/// Negativity via the trace norm, (|rho^T_A|_1 - 1)/2; the two routes must
/// agree for any unit-trace state.
pub fn negativity_trace_norm_form(rho: &DensityMatrix) -> Result<f64> {
    let pt = partial_transpose_qubit(rho.mat())?;
    Ok((trace_norm(&pt)? - 1.0) / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    use crate::charging::{evolve, Backend, ChargerParams, EvolutionMode};
    use crate::spin_model::{build_battery_hamiltonian, BatteryParams};
    use crate::thermal_state::{gibbs_state_closed, gibbs_state_numeric};

    fn embedded_bell() -> DensityMatrix {
        let mut m = ComplexMatrix::zeros(6, 6);
        for &(i, j) in &[(1, 1), (1, 3), (3, 1), (3, 3)] {
            m[(i, j)] = Complex64::new(0.5, 0.0);
        }
        DensityMatrix::new(m).unwrap()
    }

    #[test]
    fn maximally_mixed_is_incoherent_and_separable() {
        let rho = DensityMatrix::maximally_mixed();
        assert_eq!(
            l1_coherence(&rho, CoherenceBasis::Computational, None).unwrap(),
            0.0
        );
        assert!(negativity(&rho).unwrap().abs() < 1e-12);
    }

    #[test]
    fn bell_state_values() {
        let rho = embedded_bell();
        let c = l1_coherence(&rho, CoherenceBasis::Computational, None).unwrap();
        assert!((c - 1.0).abs() < 1e-12);
        let n = negativity(&rho).unwrap();
        assert!((n - 0.5).abs() < 1e-12);
        let n2 = negativity_trace_norm_form(&rho).unwrap();
        assert!((n - n2).abs() < 1e-12);
    }

    #[test]
    fn thermal_coherence_matches_off_diagonal_sum() {
        // C_l1 of the thermal state is 2(|rho_13| + |rho_24|) in 0-based
        // indexing, assembled here from the closed-form backend.
        let p = BatteryParams::new(1.0, 1.0, 1.0, 2.0, 2.0, 1.0, 1.0).unwrap();
        let rho = gibbs_state_closed(&p, 1.0).unwrap();
        let expect = 2.0 * (rho.get(1, 3).norm() + rho.get(2, 4).norm());
        let c = l1_coherence(&rho, CoherenceBasis::Computational, None).unwrap();
        assert!((c - expect).abs() < 1e-12);
        assert!(c > 0.0);
    }

    #[test]
    fn diagonal_states_are_ppt() {
        let m = ComplexMatrix::from_real_diagonal(&[0.3, 0.2, 0.1, 0.25, 0.1, 0.05]);
        let rho = DensityMatrix::new(m).unwrap();
        assert!(negativity(&rho).unwrap().abs() < 1e-14);
    }

    #[test]
    fn thermal_negativity_formulas_agree_at_field_free_point() {
        let p = BatteryParams::new(1.0, 1.0, 0.0, 2.0, 2.0, 0.0, 1.0).unwrap();
        let rho = gibbs_state_numeric(&p, 0.5).unwrap();
        let a = negativity(&rho).unwrap();
        let b = negativity_trace_norm_form(&rho).unwrap();
        assert!((a - b).abs() <= 1e-10);
        assert!(a >= 0.0);
    }

    #[test]
    fn eigenbasis_requires_hamiltonian() {
        let rho = DensityMatrix::maximally_mixed();
        assert!(matches!(
            l1_coherence(&rho, CoherenceBasis::BatteryEigenbasis, None),
            Err(Error::MissingHamiltonian)
        ));
    }

    #[test]
    fn thermal_state_is_incoherent_in_its_own_eigenbasis() {
        let p = BatteryParams::new(1.0, 1.0, 1.0, 2.0, 2.0, 1.0, 1.0).unwrap();
        let rho = gibbs_state_numeric(&p, 1.0).unwrap();
        let h_b = build_battery_hamiltonian(&p);
        let c = l1_coherence(&rho, CoherenceBasis::BatteryEigenbasis, Some(&h_b)).unwrap();
        assert!(c.abs() < 1e-10);
    }

    #[test]
    fn coherence_invariant_under_diagonal_phases() {
        let p = BatteryParams::new(1.0, 1.0, 0.5, 2.0, 2.0, 1.0, 1.0).unwrap();
        let rho = gibbs_state_numeric(&p, 0.7).unwrap();
        let base = l1_coherence(&rho, CoherenceBasis::Computational, None).unwrap();
        // Conjugation by random diagonal phases.
        let phases = [0.3, 1.2, -0.7, 2.9, -1.8, 0.05];
        let u = ComplexMatrix::from_fn(6, 6, |i, j| {
            if i == j {
                Complex64::new(0.0, phases[i]).exp()
            } else {
                Complex64::ZERO
            }
        });
        let rotated = DensityMatrix::new(rho.mat().conjugate_by(&u)).unwrap();
        let after = l1_coherence(&rotated, CoherenceBasis::Computational, None).unwrap();
        assert!((base - after).abs() <= 1e-12);
    }

    #[test]
    fn measures_constant_under_charger_only_evolution() {
        let p = BatteryParams::new(1.0, 1.0, 1.0, 2.0, 2.0, 1.0, 1.0).unwrap();
        let rho0 = gibbs_state_numeric(&p, 1.0).unwrap();
        let h_b = build_battery_hamiltonian(&p);
        let charger = ChargerParams::new(1.0, std::f64::consts::FRAC_PI_3).unwrap();
        let c0 = l1_coherence(&rho0, CoherenceBasis::Computational, None).unwrap();
        let n0 = negativity(&rho0).unwrap();
        for t in [0.4, 2.2, 9.1] {
            let rho = evolve(
                &rho0,
                &h_b,
                &charger,
                t,
                EvolutionMode::ChargerOnly,
                Backend::Numeric,
            )
            .unwrap();
            let c = l1_coherence(&rho, CoherenceBasis::Computational, None).unwrap();
            let n = negativity(&rho).unwrap();
            assert!((c - c0).abs() <= 1e-10);
            assert!((n - n0).abs() <= 1e-10);
        }
    }
}
