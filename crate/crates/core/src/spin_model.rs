//! Spin operators, the battery Hamiltonian, and its closed-form spectrum.
//!
//! The composite basis convention is fixed here once for the whole crate:
//! qubit |0> = m_s = +1/2, |1> = m_s = -1/2; qutrit |0>, |1>, |2> =
//! m_S = +1, 0, -1; composite index = 3*(qubit) + (qutrit), i.e. the
//! ordering {|00>, |01>, |02>, |10>, |11>, |12>}. Under this convention the
//! flip-flop coupling connects exactly the index pairs (1,3) and (2,4), and
//! the capacity equals E(|11>) - E(|00>).

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{kron, ComplexMatrix};

/// Human-readable tag for the fixed composite basis ordering.
pub const BASIS_CONVENTION: &str =
    "qubit(m_s=+1/2,-1/2) (x) qutrit(m_S=+1,0,-1); index = 3*qubit + qutrit";

/// Spin projections along z for each composite basis state, in basis order.
pub const QUBIT_MS: [f64; 6] = [0.5, 0.5, 0.5, -0.5, -0.5, -0.5];
pub const QUTRIT_MS: [f64; 6] = [1.0, 0.0, -1.0, 1.0, 0.0, -1.0];

/// Physical parameters of the battery Hamiltonian.
///
/// `j` is the exchange coupling, `delta` the exchange anisotropy, `d` the
/// uniaxial single-ion anisotropy of the spin-1, `g1`/`g2` the Lande factors
/// of the qubit and qutrit, `b` the magnetic field and `mu_b` the Bohr
/// magneton in the chosen unit system (1 in natural units, K/T in the
/// nickel presets).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BatteryParams {
    pub j: f64,
    pub delta: f64,
    pub d: f64,
    pub g1: f64,
    pub g2: f64,
    pub b: f64,
    pub mu_b: f64,
}

impl BatteryParams {
    pub fn new(j: f64, delta: f64, d: f64, g1: f64, g2: f64, b: f64, mu_b: f64) -> Result<Self> {
        let fields = [
            ("j", j),
            ("delta", delta),
            ("d", d),
            ("g1", g1),
            ("g2", g2),
            ("b", b),
            ("mu_b", mu_b),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite, got {value}"
                )));
            }
        }
        if mu_b <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "mu_b must be positive, got {mu_b}"
            )));
        }
        Ok(Self {
            j,
            delta,
            d,
            g1,
            g2,
            b,
            mu_b,
        })
    }

    /// Effective qubit field energy h1 = g1 mu_B B.
    pub fn h1(&self) -> f64 {
        self.g1 * self.mu_b * self.b
    }

    /// Effective qutrit field energy h2 = g2 mu_B B.
    pub fn h2(&self) -> f64 {
        self.g2 * self.mu_b * self.b
    }
}

/// Standard spin-1/2 operators (sx, sy, sz); sz eigenvalues are +-1/2.
pub fn spin_half_operators() -> (ComplexMatrix, ComplexMatrix, ComplexMatrix) {
    let c = Complex64::new;
    let mut sx = ComplexMatrix::zeros(2, 2);
    sx[(0, 1)] = c(0.5, 0.0);
    sx[(1, 0)] = c(0.5, 0.0);
    let mut sy = ComplexMatrix::zeros(2, 2);
    sy[(0, 1)] = c(0.0, -0.5);
    sy[(1, 0)] = c(0.0, 0.5);
    let sz = ComplexMatrix::from_real_diagonal(&[0.5, -0.5]);
    (sx, sy, sz)
}

/// Standard spin-1 operators (Sx, Sy, Sz) in the m_S = +1, 0, -1 basis.
pub fn spin_one_operators() -> (ComplexMatrix, ComplexMatrix, ComplexMatrix) {
    let c = Complex64::new;
    let w = std::f64::consts::FRAC_1_SQRT_2;
    let mut sx = ComplexMatrix::zeros(3, 3);
    sx[(0, 1)] = c(w, 0.0);
    sx[(1, 0)] = c(w, 0.0);
    sx[(1, 2)] = c(w, 0.0);
    sx[(2, 1)] = c(w, 0.0);
    let mut sy = ComplexMatrix::zeros(3, 3);
    sy[(0, 1)] = c(0.0, -w);
    sy[(1, 0)] = c(0.0, w);
    sy[(1, 2)] = c(0.0, -w);
    sy[(2, 1)] = c(0.0, w);
    let sz = ComplexMatrix::from_real_diagonal(&[1.0, 0.0, -1.0]);
    (sx, sy, sz)
}

/// Battery Hamiltonian
/// J [Delta (sx Sx + sy Sy) + sz Sz] + D Sz^2 - h1 sz - h2 Sz
/// assembled from the spin operators via Kronecker products.
pub fn build_battery_hamiltonian(p: &BatteryParams) -> ComplexMatrix {
    let (sx, sy, sz) = spin_half_operators();
    let (bx, by, bz) = spin_one_operators();
    let i2 = ComplexMatrix::identity(2);
    let i3 = ComplexMatrix::identity(3);

    let flip_flop = kron(&sx, &bx).add(&kron(&sy, &by));
    let ising = kron(&sz, &bz);
    let anisotropy = kron(&i2, &bz.matmul(&bz));
    let zeeman_qubit = kron(&sz, &i3);
    let zeeman_qutrit = kron(&i2, &bz);

    flip_flop
        .scale_real(p.j * p.delta)
        .add(&ising.scale_real(p.j))
        .add(&anisotropy.scale_real(p.d))
        .add(&zeeman_qubit.scale_real(-p.h1()))
        .add(&zeeman_qutrit.scale_real(-p.h2()))
}

/// Closed-form spectrum of the battery Hamiltonian.
///
/// The Hamiltonian conserves total z-magnetization, so it splits into the
/// two singleton sectors {|00>, |12>} and the two flip-flop-coupled 2x2
/// sectors {|01>, |10>} and {|02>, |11>}. `lambdas` holds the six
/// eigenvalues in that sector order: the singletons first, then the
/// eta_minus pair (lower, upper), then the eta_plus pair (lower, upper).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ClosedFormSpectrum {
    pub lambdas: [f64; 6],
    pub eta_minus: f64,
    pub eta_plus: f64,
    pub alpha_minus: f64,
    pub alpha_plus: f64,
    pub gamma_minus: f64,
    pub gamma_plus: f64,
    /// Candidate eigenvector normalization constants retained for the
    /// audit's cross-check only. They are dimensionally inconsistent
    /// (eta over eta^2 + 8 J^2) and do not reproduce the numeric
    /// eigenvector weights; nothing else in the crate consumes them.
    pub delta_minus: f64,
    pub delta_plus: f64,
    pub chi_minus: f64,
    pub chi_plus: f64,
}

impl ClosedFormSpectrum {
    /// Eigenvalues as an ascending-sorted vector for multiset comparisons.
    pub fn sorted_lambdas(&self) -> [f64; 6] {
        let mut out = self.lambdas;
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out
    }

    /// Adjudicated eigenvector weights |<01|phi>|^2 for the eta_minus
    /// sector, (lower eigenvector, upper eigenvector). Used by the audit to
    /// contrast with `delta_plus`/`delta_minus`.
    pub fn eta_minus_weights(&self) -> (f64, f64) {
        let ratio = self.gamma_minus / self.eta_minus;
        (0.5 * (1.0 - ratio), 0.5 * (1.0 + ratio))
    }

    /// Adjudicated eigenvector weights |<02|phi>|^2 for the eta_plus
    /// sector, (lower eigenvector, upper eigenvector).
    pub fn eta_plus_weights(&self) -> (f64, f64) {
        let ratio = self.gamma_plus / self.eta_plus;
        (0.5 * (1.0 + ratio), 0.5 * (1.0 - ratio))
    }
}

pub fn closed_form_spectrum(p: &BatteryParams) -> ClosedFormSpectrum {
    let (h1, h2) = (p.h1(), p.h2());
    let (j, d) = (p.j, p.d);

    let alpha_minus = j + 2.0 * d - (h1 + 2.0 * h2);
    let alpha_plus = j + 2.0 * d + (h1 + 2.0 * h2);
    let gamma_minus = j - 2.0 * d - 2.0 * (h1 - h2);
    let gamma_plus = j - 2.0 * d + 2.0 * (h1 - h2);
    let coupling_sq = 8.0 * (j * p.delta) * (j * p.delta);
    let eta_minus = (gamma_minus * gamma_minus + coupling_sq).sqrt();
    let eta_plus = (gamma_plus * gamma_plus + coupling_sq).sqrt();

    // Sector means come from the diagonal entries; the 2x2 sector
    // eigenvalues are mean -+ eta/4, which reproduces the Boltzmann
    // prefactors exp(beta (J - 2D +- 2 h2)/4) of the thermal state.
    let mean_minus = -(j - 2.0 * d + 2.0 * h2) / 4.0;
    let mean_plus = -(j - 2.0 * d - 2.0 * h2) / 4.0;

    let lambdas = [
        alpha_minus / 2.0,
        alpha_plus / 2.0,
        mean_minus - eta_minus / 4.0,
        mean_minus + eta_minus / 4.0,
        mean_plus - eta_plus / 4.0,
        mean_plus + eta_plus / 4.0,
    ];

    let norm_const =
        |eta: f64, sign: f64| (0.5 * (1.0 + sign * eta / (eta * eta + 8.0 * j * j))).sqrt();

    ClosedFormSpectrum {
        lambdas,
        eta_minus,
        eta_plus,
        alpha_minus,
        alpha_plus,
        gamma_minus,
        gamma_plus,
        delta_minus: norm_const(eta_minus, -1.0),
        delta_plus: norm_const(eta_minus, 1.0),
        chi_minus: norm_const(eta_plus, -1.0),
        chi_plus: norm_const(eta_plus, 1.0),
    }
}

/// Capacity K = -D - J/2 + h1 + h2, the energy gap E(|11>) - E(|00>).
pub fn capacity_closed_form(p: &BatteryParams) -> f64 {
    -p.d - p.j / 2.0 + p.h1() + p.h2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{hermitian_eig, HERMITICITY_TOL};

    fn params(j: f64, delta: f64, d: f64, b: f64, g1: f64, g2: f64) -> BatteryParams {
        BatteryParams::new(j, delta, d, g1, g2, b, 1.0).unwrap()
    }

    fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
        a.matmul(b).sub(&b.matmul(a))
    }

    #[test]
    fn spin_half_algebra() {
        let (sx, sy, sz) = spin_half_operators();
        let eig = hermitian_eig(&sz, HERMITICITY_TOL).unwrap();
        assert_eq!(eig.eigenvalues, vec![-0.5, 0.5]);

        let casimir = sx.matmul(&sx).add(&sy.matmul(&sy)).add(&sz.matmul(&sz));
        assert!(casimir.max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.75)) < 1e-14);

        let lhs = commutator(&sx, &sy);
        let rhs = sz.scale(Complex64::i());
        assert!(lhs.max_abs_diff(&rhs) < 1e-14);
        assert!(commutator(&sy, &sz).max_abs_diff(&sx.scale(Complex64::i())) < 1e-14);
        assert!(commutator(&sz, &sx).max_abs_diff(&sy.scale(Complex64::i())) < 1e-14);
    }

    #[test]
    fn spin_one_algebra() {
        let (sx, sy, sz) = spin_one_operators();
        let eig = hermitian_eig(&sz, HERMITICITY_TOL).unwrap();
        assert_eq!(eig.eigenvalues, vec![-1.0, 0.0, 1.0]);

        let casimir = sx.matmul(&sx).add(&sy.matmul(&sy)).add(&sz.matmul(&sz));
        assert!(casimir.max_abs_diff(&ComplexMatrix::identity(3).scale_real(2.0)) < 1e-14);

        let sz2 = sz.matmul(&sz);
        assert!(sz2.max_abs_diff(&ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 1.0])) < 1e-14);

        assert!(commutator(&sx, &sy).max_abs_diff(&sz.scale(Complex64::i())) < 1e-14);
    }

    #[test]
    fn hamiltonian_diagonal_when_delta_zero() {
        let h = build_battery_hamiltonian(&params(1.3, 0.0, 0.7, 0.9, 2.0, 1.5));
        for i in 0..6 {
            for j in 0..6 {
                if i != j {
                    assert_eq!(h[(i, j)], Complex64::ZERO);
                }
            }
        }
    }

    #[test]
    fn hamiltonian_off_diagonal_structure() {
        let p = params(1.0, 1.0, 1.0, 1.0, 2.0, 2.0);
        let h = build_battery_hamiltonian(&p);
        let coupling = p.j * p.delta / 2f64.sqrt();
        for i in 0..6 {
            for j in 0..6 {
                if i == j {
                    continue;
                }
                let expected = if matches!((i, j), (1, 3) | (3, 1) | (2, 4) | (4, 2)) {
                    Complex64::new(coupling, 0.0)
                } else {
                    Complex64::ZERO
                };
                assert!(
                    (h[(i, j)] - expected).norm() < 1e-14,
                    "entry ({i},{j}) = {:?}",
                    h[(i, j)]
                );
            }
        }
    }

    #[test]
    fn hamiltonian_ground_entry_example() {
        // <00|H|00> = J/2 + D - h1/2 - h2 at J = Delta = D = B = 1, g = 2.
        let h = build_battery_hamiltonian(&params(1.0, 1.0, 1.0, 1.0, 2.0, 2.0));
        assert!((h[(0, 0)].re - (-1.5)).abs() < 1e-14);
        assert!(h[(0, 0)].im.abs() < 1e-16);
    }

    #[test]
    fn hamiltonian_commutes_with_total_magnetization() {
        let (_, _, sz) = spin_half_operators();
        let (_, _, bz) = spin_one_operators();
        let total_z =
            kron(&sz, &ComplexMatrix::identity(3)).add(&kron(&ComplexMatrix::identity(2), &bz));
        for (j, delta, d, b) in [
            (1.0, 1.0, 0.5, 1.0),
            (-2.0, 1.7, 3.0, 0.3),
            (0.4, -0.8, -1.1, 2.2),
        ] {
            let h = build_battery_hamiltonian(&params(j, delta, d, b, 2.0, 1.3));
            assert!(commutator(&h, &total_z).max_abs() <= 1e-12);
        }
    }

    #[test]
    fn eta_field_free_example() {
        // B = 0, D = 0, Delta = 1, J = 1 gives eta = sqrt(1 + 8) = 3.
        let s = closed_form_spectrum(&params(1.0, 1.0, 0.0, 0.0, 2.0, 2.0));
        assert!((s.eta_minus - 3.0).abs() < 1e-14);
        assert!((s.eta_plus - 3.0).abs() < 1e-14);
    }

    #[test]
    fn lambda1_example_and_pair_sum() {
        let p = params(1.0, 1.0, 1.0, 1.0, 2.0, 2.0);
        let s = closed_form_spectrum(&p);
        assert!((s.lambdas[0] - (-1.5)).abs() < 1e-14);

        for (j, delta, d, b) in [(1.0, 1.0, 1.0, 1.0), (2.5, -1.0, 0.3, 4.0)] {
            let p = params(j, delta, d, b, 1.7, 2.4);
            let s = closed_form_spectrum(&p);
            // The Zeeman terms cancel in lambda1 + lambda2.
            assert!((s.lambdas[0] + s.lambdas[1] - (j + 2.0 * d)).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_matches_numeric_spectrum() {
        let points = [
            (1.0, 1.0, 0.5, 1.0, 2.0, 2.0),
            (1.0, 1.0, 1.0, 1.0, 2.0, 2.0),
            (-3.0, 2.0, 1.5, 4.0, 1.2, 2.8),
            (0.7, -1.3, -2.0, 0.0, 1.0, 3.0),
            (5.0, 3.0, 5.0, 5.0, 3.0, 1.0),
        ];
        for (j, delta, d, b, g1, g2) in points {
            let p = BatteryParams::new(j, delta, d, g1, g2, b, 1.0).unwrap();
            let h = build_battery_hamiltonian(&p);
            let numeric = hermitian_eig(&h, HERMITICITY_TOL).unwrap();
            let closed = closed_form_spectrum(&p).sorted_lambdas();
            for (a, b) in closed.iter().zip(&numeric.eigenvalues) {
                assert!((a - b).abs() < 1e-9, "mismatch at ({j},{delta},{d},{b})");
            }
        }
    }

    #[test]
    fn capacity_examples() {
        let p = params(1.0, 1.0, 1.0, 1.0, 2.0, 2.0);
        assert!((capacity_closed_form(&p) - 2.5).abs() < 1e-14);

        let p = params(-1.0, 1.0, 0.5, 0.0, 2.0, 2.0);
        assert!(capacity_closed_form(&p).abs() < 1e-14);

        let p = params(1.2, 1.0, 0.8, 0.0, 2.0, 2.0);
        assert!((capacity_closed_form(&p) - (-0.8 - 0.6)).abs() < 1e-14);
    }

    #[test]
    fn capacity_is_the_11_minus_00_gap() {
        for (j, delta, d, b) in [
            (1.0, 1.0, 1.0, 1.0),
            (2.0, 0.5, -1.0, 3.0),
            (-4.0, 2.9, 4.2, -2.0),
        ] {
            let p = params(j, delta, d, b, 1.9, 2.6);
            let h = build_battery_hamiltonian(&p);
            let gap = h[(4, 4)].re - h[(0, 0)].re;
            assert!((gap - capacity_closed_form(&p)).abs() <= 1e-12);
        }
    }

    #[test]
    fn params_validation() {
        assert!(BatteryParams::new(f64::NAN, 1.0, 0.0, 2.0, 2.0, 1.0, 1.0).is_err());
        assert!(BatteryParams::new(1.0, 1.0, 0.0, 2.0, 2.0, 1.0, 0.0).is_err());
        assert!(BatteryParams::new(1.0, 1.0, 0.0, 2.0, 2.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn effective_fields() {
        let p = BatteryParams::new(505.0, 1.0, 0.0, 2.005, 2.275, 200.0, 0.67171).unwrap();
        assert!((p.h1() - 2.005 * 0.67171 * 200.0).abs() < 1e-10);
        assert!((p.h2() - 2.275 * 0.67171 * 200.0).abs() < 1e-10);
    }
}
