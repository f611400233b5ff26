//! Battery performance indicators.
//!
//! `stored_work` implements the mean-energy gain
//! Tr[H_B rho(t)] - Tr[H_B rho(0)]. The textbook passive-state ergotropy is
//! a different quantity and is exposed separately as `passive_ergotropy` so
//! the two cannot be conflated.

use num_complex::Complex64;
use serde::Serialize;

use crate::charging::{
    charger_diagonal, closed_form_phase_diagonal, Backend, ChargerParams, EvolutionMode,
};
use crate::error::{Error, Result};
use crate::numerics::{hermitian_eig, ComplexMatrix, HERMITICITY_TOL};
use crate::thermal_state::DensityMatrix;

/// One sampled row of the performance record.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PerformanceSample {
    pub t: f64,
    /// Stored work W(t).
    pub w: f64,
    /// Instantaneous power dW/dt.
    pub p: f64,
    /// Capacity; identical across all samples of a series.
    pub k: f64,
    /// Passive-state ergotropy of rho(t).
    pub w_passive: f64,
}

fn expect_6x6(m: &ComplexMatrix) -> Result<()> {
    if m.rows() != 6 || m.cols() != 6 {
        return Err(Error::WrongDimension {
            expected_rows: 6,
            expected_cols: 6,
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    Ok(())
}

fn energy_expectation(h_b: &ComplexMatrix, rho: &DensityMatrix) -> f64 {
    let mut sum = Complex64::ZERO;
    for i in 0..6 {
        for k in 0..6 {
            sum += h_b[(i, k)] * rho.get(k, i);
        }
    }
    sum.re
}

/// W(t) = Tr[H_B rho_t] - Tr[H_B rho_0]; exactly zero when the two states
/// are identical.
pub fn stored_work(
    h_b: &ComplexMatrix,
    rho_t: &DensityMatrix,
    rho_0: &DensityMatrix,
) -> Result<f64> {
    expect_6x6(h_b)?;
    Ok(energy_expectation(h_b, rho_t) - energy_expectation(h_b, rho_0))
}

/// How the power series is obtained from the stored-work series.
pub enum PowerMethod<'a> {
    /// (W[i+1] - W[i-1]) / 2h on interior points, one-sided at the ends.
    CentralDifference,
    /// Exact derivative of the sinusoidal closed form of W(t) under
    /// charger-only evolution with the given backend's phase law. Only
    /// defined for `EvolutionMode::ChargerOnly`.
    AnalyticPhase {
        h_b: &'a ComplexMatrix,
        rho0: &'a DensityMatrix,
        charger: &'a ChargerParams,
        mode: EvolutionMode,
        backend: Backend,
    },
}

/// Power series on a uniform time grid.
pub fn instantaneous_power(t: &[f64], w: &[f64], method: PowerMethod) -> Result<Vec<f64>> {
    if t.len() != w.len() || t.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "need at least 3 aligned samples, got {} times and {} values",
            t.len(),
            w.len()
        )));
    }
    let h = t[1] - t[0];
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidParameter(format!("bad grid spacing {h}")));
    }
    for i in 1..t.len() {
        let step = t[i] - t[i - 1];
        if (step - h).abs() > 1e-9 * h.abs().max(1.0) {
            return Err(Error::NonUniformGrid {
                index: i,
                found: step,
                expected: h,
            });
        }
    }

    match method {
        PowerMethod::CentralDifference => {
            let n = w.len();
            let mut p = vec![0.0; n];
            p[0] = (w[1] - w[0]) / h;
            p[n - 1] = (w[n - 1] - w[n - 2]) / h;
            for i in 1..n - 1 {
                p[i] = (w[i + 1] - w[i - 1]) / (2.0 * h);
            }
            Ok(p)
        }
        PowerMethod::AnalyticPhase {
            h_b,
            rho0,
            charger,
            mode,
            backend,
        } => {
            if mode != EvolutionMode::ChargerOnly {
                return Err(Error::AnalyticUnavailable);
            }
            expect_6x6(h_b)?;
            let diag = match backend {
                Backend::Numeric => charger_diagonal(charger),
                Backend::ClosedForm => closed_form_phase_diagonal(charger),
            };
            // W(t) = sum_{j<k} 2 Re[H_kj rho_jk(0) (e^{-i w_jk t} - 1)],
            // so P(t) = sum_{j<k} 2 Re[-i w_jk H_kj rho_jk(0) e^{-i w_jk t}].
            let mut terms = Vec::new();
            for j in 0..6 {
                for k in (j + 1)..6 {
                    let hkj = h_b[(k, j)];
                    let r = rho0.get(j, k);
                    let gap = diag[j] - diag[k];
                    if hkj == Complex64::ZERO || r == Complex64::ZERO || gap == 0.0 {
                        continue;
                    }
                    terms.push((gap, hkj * r));
                }
            }
            Ok(t.iter()
                .map(|&ti| {
                    terms
                        .iter()
                        .map(|&(gap, amp)| {
                            let phase = Complex64::new(0.0, -gap * ti).exp();
                            2.0 * (-Complex64::i() * gap * amp * phase).re
                        })
                        .sum()
                })
                .collect())
        }
    }
}

/// Capacity K = <11|H_B|11> - <00|H_B|00>, the gap between the composite
/// |11> and |00> basis energies; time independent by construction.
pub fn capacity(h_b: &ComplexMatrix) -> Result<f64> {
    expect_6x6(h_b)?;
    Ok(h_b[(4, 4)].re - h_b[(0, 0)].re)
}

/// Textbook passive-state ergotropy: Tr[H_B rho] minus the energy of the
/// passive rearrangement (state weights descending against energies
/// ascending). Nonnegative for every state.
pub fn passive_ergotropy(h_b: &ComplexMatrix, rho: &DensityMatrix) -> Result<f64> {
    expect_6x6(h_b)?;
    let energies = hermitian_eig(h_b, HERMITICITY_TOL)?.eigenvalues;
    let mut weights = rho.eigenvalues()?;
    weights.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let passive_energy: f64 = weights.iter().zip(&energies).map(|(r, e)| r * e).sum();
    Ok(energy_expectation(h_b, rho) - passive_energy)
}
