//! Backend cross-validation over randomized parameter grids.
//!
//! The audit pits the closed-form spectrum, partition function, thermal
//! state and evolved state against the numeric oracle, adjudicates the
//! branch assignment of the analytic diagonal entries, and emits a
//! machine-readable discrepancy report. The report is the deliverable:
//! where the analytic forms carry ambiguities, the observed mapping and
//! the size of each rejected variant's deviation are recorded rather than
//! silently absorbed.

use std::io::Write;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::charging::{closed_form_evolved, evolve, Backend, ChargerParams, EvolutionMode};
use crate::error::{Error, Result};
use crate::numerics::{hermitian_eig, HERMITICITY_TOL};
use crate::spin_model::{build_battery_hamiltonian, closed_form_spectrum, BatteryParams};
use crate::thermal_state::{
    gibbs_state_closed, gibbs_state_numeric, log_partition_function_closed,
    log_partition_function_spectral, middle_diagonal_candidates, ThermalConfig,
};

/// Entrywise agreement threshold for the thermal backends; exceeding it
/// anywhere fails the audit.
pub const THERMAL_AGREEMENT_TOL: f64 = 1e-8;

/// Closed-form vs numeric spectrum agreement threshold.
pub const SPECTRUM_AGREEMENT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
pub struct AuditConfig {
    pub points: usize,
    pub seed: u64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            points: 100,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ParamPoint {
    pub j: f64,
    pub delta: f64,
    pub d: f64,
    pub g1: f64,
    pub g2: f64,
    pub b: f64,
    pub mu_b: f64,
    pub temperature: f64,
}

impl ParamPoint {
    fn battery(&self) -> BatteryParams {
        BatteryParams::new(
            self.j, self.delta, self.d, self.g1, self.g2, self.b, self.mu_b,
        )
        .expect("audit grid draws finite parameters")
    }
}

/// Draw a parameter point from the audit ranges: |J|, |D| <= 5,
/// |Delta| <= 3, |B| <= 5, g in [1, 3], T in [0.2, 5].
pub fn random_point(rng: &mut impl Rng) -> ParamPoint {
    ParamPoint {
        j: rng.random_range(-5.0..5.0),
        delta: rng.random_range(-3.0..3.0),
        d: rng.random_range(-5.0..5.0),
        g1: rng.random_range(1.0..3.0),
        g2: rng.random_range(1.0..3.0),
        b: rng.random_range(-5.0..5.0),
        mu_b: 1.0,
        temperature: rng.random_range(0.2..5.0),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DeviationRecord {
    pub max_abs_deviation: f64,
    pub worst_point: Option<ParamPoint>,
}

impl DeviationRecord {
    fn new() -> Self {
        Self {
            max_abs_deviation: 0.0,
            worst_point: None,
        }
    }

    fn update(&mut self, dev: f64, point: &ParamPoint) {
        if dev > self.max_abs_deviation || self.worst_point.is_none() {
            self.max_abs_deviation = dev;
            self.worst_point = Some(*point);
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ThermalViolation {
    pub entry: String,
    pub deviation: f64,
    pub point: ParamPoint,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThermalSection {
    pub tolerance: f64,
    pub max_abs_deviation: f64,
    pub worst_entry: String,
    pub worst_point: Option<ParamPoint>,
    /// Per-entry maxima of |closed - numeric| over the grid, row by row.
    pub per_entry_max: Vec<Vec<f64>>,
    /// Entries beyond tolerance; empty means the backends agree everywhere.
    pub violations: Vec<ThermalViolation>,
    /// Points skipped by the closed-form backend (degenerate eta).
    pub degenerate_eta_points: usize,
}

/// Which analytic branch the numeric diagonal realizes at one slot, and how
/// far the rejected alpha variant lands from it.
#[derive(Debug, Clone, Serialize)]
pub struct BranchRecord {
    /// Entry label in 1-based matrix notation (rho22 is the second diagonal
    /// slot, zero-based (1,1)).
    pub entry: String,
    pub position: String,
    pub family: String,
    pub branch: String,
    pub max_abs_deviation: f64,
    /// Deviation of the variant that substitutes alpha_minus for
    /// gamma_minus; only meaningful for the eta_minus slots where that
    /// variant is a candidate.
    pub alpha_variant_max_abs_deviation: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormalizationSection {
    /// Max |delta_+-^2 - numeric eigenvector weight| over the grid.
    pub delta_sq_max_abs_deviation: f64,
    /// Max |chi_+-^2 - numeric eigenvector weight| over the grid.
    pub chi_sq_max_abs_deviation: f64,
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvolvedPhaseSection {
    pub theta: f64,
    pub omega: f64,
    /// Net phase frequency of the closed-form evolved state on the coupled
    /// pairs: omega cos(theta).
    pub closed_form_frequency: f64,
    /// Net phase frequency of direct evolution under the charger:
    /// omega (cos(theta) - sin(theta)).
    pub numeric_frequency: f64,
    /// Max entrywise |closed-form evolved - numerically evolved| over the
    /// sampled times at the base parameter point.
    pub max_abs_entry_difference: f64,
    /// Same comparison at theta = 0, where the two phase laws coincide and
    /// the backends must agree.
    pub max_abs_entry_difference_at_theta_zero: f64,
    pub t_samples: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub generator: String,
    pub version: String,
    pub seed: u64,
    pub points: usize,
    pub passes: bool,
    pub spectrum: DeviationRecord,
    pub partition_function_log_rel: DeviationRecord,
    pub thermal_state: ThermalSection,
    pub branch_adjudication: Vec<BranchRecord>,
    pub eigenvector_normalization: NormalizationSection,
    pub evolved_phase: EvolvedPhaseSection,
}

pub fn run_audit(cfg: &AuditConfig) -> Result<AuditReport> {
    if cfg.points == 0 {
        return Err(Error::InvalidParameter(
            "audit needs at least one point".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut spectrum = DeviationRecord::new();
    let mut partition = DeviationRecord::new();
    let mut per_entry_max = vec![vec![0.0f64; 6]; 6];
    let mut thermal_worst = DeviationRecord::new();
    let mut worst_entry = String::from("none");
    let mut violations = Vec::new();
    let mut degenerate = 0usize;

    let mut branch_minus_gamma = DeviationRecord::new();
    let mut branch_plus_gamma = DeviationRecord::new();
    let mut branch_pp_gamma = DeviationRecord::new();
    let mut branch_pm_gamma = DeviationRecord::new();
    let mut alpha_variant_11 = DeviationRecord::new();
    let mut alpha_variant_22 = DeviationRecord::new();
    let mut delta_sq_dev = 0.0f64;
    let mut chi_sq_dev = 0.0f64;

    for _ in 0..cfg.points {
        let point = random_point(&mut rng);
        let p = point.battery();
        let h = build_battery_hamiltonian(&p);
        let numeric = hermitian_eig(&h, HERMITICITY_TOL)?;

        // Spectrum equivalence on sorted multisets.
        let closed = closed_form_spectrum(&p);
        let sorted = closed.sorted_lambdas();
        let spec_dev = sorted
            .iter()
            .zip(&numeric.eigenvalues)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        spectrum.update(spec_dev, &point);

        // Partition function: log-domain relative agreement.
        let log_closed = log_partition_function_closed(&p, point.temperature)?;
        let beta = 1.0 / point.temperature;
        let log_spectral = log_partition_function_spectral(&numeric.eigenvalues, beta);
        partition.update((log_closed - log_spectral).abs(), &point);

        // Thermal backends entrywise.
        let rho_numeric = gibbs_state_numeric(&p, point.temperature)?;
        let rho_closed = match gibbs_state_closed(&p, point.temperature) {
            Ok(rho) => rho,
            Err(Error::DegenerateEta { .. }) => {
                degenerate += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        for (i, row) in per_entry_max.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let dev = (rho_closed.get(i, j) - rho_numeric.get(i, j)).norm();
                if dev > *cell {
                    *cell = dev;
                }
                if dev > thermal_worst.max_abs_deviation {
                    worst_entry = format!("rho{}{}", i + 1, j + 1);
                }
                thermal_worst.update(dev, &point);
                if dev > THERMAL_AGREEMENT_TOL {
                    violations.push(ThermalViolation {
                        entry: format!("rho{}{}", i + 1, j + 1),
                        deviation: dev,
                        point,
                    });
                }
            }
        }

        // Branch adjudication of the middle diagonal slots.
        let candidates = middle_diagonal_candidates(&p, point.temperature)?;
        let diag = |i: usize| rho_numeric.get(i, i).re;
        branch_minus_gamma.update((diag(1) - candidates.eta_minus_minus_gamma).abs(), &point);
        branch_plus_gamma.update((diag(3) - candidates.eta_minus_plus_gamma).abs(), &point);
        branch_pp_gamma.update((diag(2) - candidates.eta_plus_plus_gamma).abs(), &point);
        branch_pm_gamma.update((diag(4) - candidates.eta_plus_minus_gamma).abs(), &point);
        alpha_variant_11.update((diag(1) - candidates.eta_minus_minus_alpha).abs(), &point);
        alpha_variant_22.update((diag(2) - candidates.eta_minus_minus_alpha).abs(), &point);

        // Stored normalization constants vs numeric eigenvector weights.
        let (w_lo, w_hi) = closed.eta_minus_weights();
        delta_sq_dev = delta_sq_dev
            .max((closed.delta_minus.powi(2) - w_lo).abs())
            .max((closed.delta_plus.powi(2) - w_hi).abs());
        let (x_lo, x_hi) = closed.eta_plus_weights();
        chi_sq_dev = chi_sq_dev
            .max((closed.chi_minus.powi(2) - x_lo).abs())
            .max((closed.chi_plus.powi(2) - x_hi).abs());
    }

    // Evolved-state phase comparison at the base point where the featured
    // mixing angle pi/4 makes direct charger evolution stationary while the
    // closed-form phase rule still rotates the coupled pairs.
    let base = BatteryParams::new(1.0, 1.0, 1.0, 2.0, 2.0, 1.0, 1.0).unwrap();
    let thermal = ThermalConfig::new(1.0)?;
    let charger = ChargerParams::new(1.0, std::f64::consts::FRAC_PI_4)?;
    let h_b = build_battery_hamiltonian(&base);
    let rho0 = gibbs_state_numeric(&base, 1.0)?;
    let t_samples = 41usize;
    let measure_dev = |charger: &ChargerParams| -> Result<f64> {
        let mut dev = 0.0f64;
        for i in 0..t_samples {
            let t = 5.0 * i as f64 / (t_samples - 1) as f64;
            let closed = closed_form_evolved(&base, &thermal, charger, t)?;
            let direct = evolve(
                &rho0,
                &h_b,
                charger,
                t,
                EvolutionMode::ChargerOnly,
                Backend::Numeric,
            )?;
            dev = dev.max(closed.mat().max_abs_diff(direct.mat()));
        }
        Ok(dev)
    };
    let phase_dev = measure_dev(&charger)?;
    let phase_dev_theta_zero = measure_dev(&ChargerParams::new(charger.omega, 0.0)?)?;

    let branch_adjudication = vec![
        BranchRecord {
            entry: "rho22".into(),
            position: "(1,1)".into(),
            family: "eta_minus".into(),
            branch: "cosh - (gamma_-/eta_-) sinh".into(),
            max_abs_deviation: branch_minus_gamma.max_abs_deviation,
            alpha_variant_max_abs_deviation: Some(alpha_variant_11.max_abs_deviation),
        },
        BranchRecord {
            entry: "rho33".into(),
            position: "(2,2)".into(),
            family: "eta_plus".into(),
            branch: "cosh + (gamma_+/eta_+) sinh".into(),
            max_abs_deviation: branch_pp_gamma.max_abs_deviation,
            alpha_variant_max_abs_deviation: Some(alpha_variant_22.max_abs_deviation),
        },
        BranchRecord {
            entry: "rho44".into(),
            position: "(3,3)".into(),
            family: "eta_minus".into(),
            branch: "cosh + (gamma_-/eta_-) sinh".into(),
            max_abs_deviation: branch_plus_gamma.max_abs_deviation,
            alpha_variant_max_abs_deviation: None,
        },
        BranchRecord {
            entry: "rho55".into(),
            position: "(4,4)".into(),
            family: "eta_plus".into(),
            branch: "cosh - (gamma_+/eta_+) sinh".into(),
            max_abs_deviation: branch_pm_gamma.max_abs_deviation,
            alpha_variant_max_abs_deviation: None,
        },
    ];

    let passes = violations.is_empty();
    Ok(AuditReport {
        generator: "qqb-core".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed: cfg.seed,
        points: cfg.points,
        passes,
        spectrum,
        partition_function_log_rel: partition,
        thermal_state: ThermalSection {
            tolerance: THERMAL_AGREEMENT_TOL,
            max_abs_deviation: thermal_worst.max_abs_deviation,
            worst_entry,
            worst_point: thermal_worst.worst_point,
            per_entry_max,
            violations,
            degenerate_eta_points: degenerate,
        },
        branch_adjudication,
        eigenvector_normalization: NormalizationSection {
            delta_sq_max_abs_deviation: delta_sq_dev,
            chi_sq_max_abs_deviation: chi_sq_dev,
            note: "stored delta/chi constants are dimensionally inconsistent and do not \
                   reproduce the numeric eigenvector weights; the gamma/eta weights do"
                .into(),
        },
        evolved_phase: EvolvedPhaseSection {
            theta: charger.theta,
            omega: charger.omega,
            closed_form_frequency: charger.omega * charger.theta.cos(),
            numeric_frequency: charger.omega * (charger.theta.cos() - charger.theta.sin()),
            max_abs_entry_difference: phase_dev,
            max_abs_entry_difference_at_theta_zero: phase_dev_theta_zero,
            t_samples,
        },
    })
}

pub fn write_report<W: Write>(report: &AuditReport, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, report)?;
    out.write_all(b"\n").map_err(|e| Error::Io {
        path: "<writer>".into(),
        source: e,
    })?;
    Ok(())
}

pub fn write_report_to_path(report: &AuditReport, path: &Path) -> Result<()> {
    let display = path.display().to_string();
    let file = std::fs::File::create(path).map_err(|e| Error::Io {
        path: display,
        source: e,
    })?;
    write_report(report, std::io::BufWriter::new(file))
}
