//! Declarative experiment runner: presets, parameter sweeps, and
//! deterministic CSV/JSON serialization of the sampled observables.

use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::charging::{Backend, ChargerParams, EvolutionMode, Propagator};
use crate::error::{Error, Result};
use crate::measures::{l1_coherence, negativity, CoherenceBasis};
use crate::metrics::{capacity, instantaneous_power, stored_work, PowerMethod};
use crate::spin_model::{build_battery_hamiltonian, BatteryParams, BASIS_CONVENTION};
use crate::thermal_state::{gibbs_state_closed, gibbs_state_numeric, ThermalConfig};

/// Bohr magneton over Boltzmann constant in K/T, used by the nickel presets
/// where energies are Kelvin and fields Tesla (CODATA value rounded to five
/// decimals).
pub const MU_B_PER_KB_KELVIN_PER_TESLA: f64 = 0.67171;

/// Swept parameter axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepParam {
    D,
    Temperature,
    B,
    Theta,
    Delta,
    J,
    Omega,
}

impl SweepParam {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParam::D => "d",
            SweepParam::Temperature => "temperature",
            SweepParam::B => "b",
            SweepParam::Theta => "theta",
            SweepParam::Delta => "delta",
            SweepParam::J => "j",
            SweepParam::Omega => "omega",
        }
    }
}

impl FromStr for SweepParam {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "d" => Ok(SweepParam::D),
            "t" | "temperature" => Ok(SweepParam::Temperature),
            "b" => Ok(SweepParam::B),
            "theta" => Ok(SweepParam::Theta),
            "delta" => Ok(SweepParam::Delta),
            "j" => Ok(SweepParam::J),
            "omega" => Ok(SweepParam::Omega),
            other => Err(Error::InvalidScenario(format!(
                "unknown sweep parameter '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Sweep {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

/// Uniform time grid: `n_steps` samples from 0 to `t_max` inclusive.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TimeGrid {
    pub t_max: f64,
    pub n_steps: usize,
}

impl TimeGrid {
    pub fn times(&self) -> Vec<f64> {
        let n = self.n_steps;
        (0..n)
            .map(|i| self.t_max * i as f64 / (n - 1) as f64)
            .collect()
    }

    pub fn spacing(&self) -> f64 {
        self.t_max / (self.n_steps - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UnitSystem {
    /// hbar = k_B = mu_B = 1.
    Natural,
    /// Energies in Kelvin, fields in Tesla, mu_B = 0.67171 K/T.
    KelvinTesla,
}

impl UnitSystem {
    pub fn name(&self) -> &'static str {
        match self {
            UnitSystem::Natural => "natural",
            UnitSystem::KelvinTesla => "kelvin-tesla",
        }
    }
}

impl FromStr for UnitSystem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "natural" => Ok(UnitSystem::Natural),
            "kelvin-tesla" => Ok(UnitSystem::KelvinTesla),
            other => Err(Error::InvalidScenario(format!(
                "unknown unit system '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidScenario(format!("unknown format '{other}'"))),
        }
    }
}

/// A fully specified experiment.
#[derive(Debug, Clone, Serialize)]
pub struct Scenario {
    pub label: String,
    pub battery: BatteryParams,
    pub charger: ChargerParams,
    pub thermal: ThermalConfig,
    pub grid: TimeGrid,
    pub mode: EvolutionMode,
    pub backend: Backend,
    pub coherence_basis: CoherenceBasis,
    pub sweep: Option<Sweep>,
    pub units: UnitSystem,
    /// Fields whose values are library defaults rather than pinned inputs
    /// of the scenario family; echoed in output metadata.
    pub artifact_chosen: Vec<String>,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.grid.t_max.is_finite() && self.grid.t_max > 0.0) {
            return Err(Error::InvalidScenario(format!(
                "t_max must be positive, got {}",
                self.grid.t_max
            )));
        }
        if self.grid.n_steps < 2 {
            return Err(Error::InvalidScenario(format!(
                "n_steps must be at least 2, got {}",
                self.grid.n_steps
            )));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(Error::InvalidScenario("sweep has no values".into()));
            }
            if sweep.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidScenario("sweep values must be finite".into()));
            }
        }
        if self.mode == EvolutionMode::TotalHamiltonian && self.backend == Backend::ClosedForm {
            return Err(Error::UnsupportedCombination);
        }
        Ok(())
    }

    fn mode_name(&self) -> &'static str {
        match self.mode {
            EvolutionMode::ChargerOnly => "charger-only",
            EvolutionMode::TotalHamiltonian => "total",
        }
    }

    fn backend_name(&self) -> &'static str {
        match self.backend {
            Backend::Numeric => "numeric",
            Backend::ClosedForm => "closed-form",
        }
    }

    fn basis_name(&self) -> &'static str {
        match self.coherence_basis {
            CoherenceBasis::Computational => "computational",
            CoherenceBasis::BatteryEigenbasis => "eigen",
        }
    }
}

/// Scenario with the fig-family base point and no sweep: theta = pi/4,
/// g1 = g2 = 2, B = J = Delta = Omega = T = 1, D = 1, natural units,
/// 2000 samples on [0, 20], charger-only numeric evolution.
pub fn base_scenario() -> Scenario {
    Scenario {
        label: "custom".into(),
        battery: BatteryParams::new(1.0, 1.0, 1.0, 2.0, 2.0, 1.0, 1.0).unwrap(),
        charger: ChargerParams::new(1.0, std::f64::consts::FRAC_PI_4).unwrap(),
        thermal: ThermalConfig::new(1.0).unwrap(),
        grid: TimeGrid {
            t_max: 20.0,
            n_steps: 2000,
        },
        mode: EvolutionMode::ChargerOnly,
        backend: Backend::Numeric,
        coherence_basis: CoherenceBasis::Computational,
        sweep: None,
        units: UnitSystem::Natural,
        artifact_chosen: Vec::new(),
    }
}

fn nickel_base() -> Scenario {
    let mut s = base_scenario();
    s.battery = BatteryParams::new(
        505.0,
        1.0,
        0.0,
        2.005,
        2.275,
        200.0,
        MU_B_PER_KB_KELVIN_PER_TESLA,
    )
    .unwrap();
    s.thermal = ThermalConfig::new(300.0).unwrap();
    s.units = UnitSystem::KelvinTesla;
    s.artifact_chosen.push("theta".into());
    s.artifact_chosen.push("delta".into());
    s
}

/// Named preset scenarios.
///
/// The fig presets share the base point and differ in the swept axis;
/// fig1/fig2 sweep D, fig3/fig4 sweep the temperature, fig7/fig8 sweep the
/// field. The nickel presets use the Kelvin/Tesla unit system with the
/// strong-exchange parameter set J = 505 K, g1 = 2.005, g2 = 2.275, D = 0.
pub fn preset(name: &str) -> Result<Scenario> {
    let mut s = base_scenario();
    match name {
        "fig1" | "fig2" => {
            s.label = name.into();
            s.sweep = Some(Sweep {
                param: SweepParam::D,
                values: vec![0.5, 1.0, 1.5, 2.0],
            });
            s.artifact_chosen.push("sweep_values".into());
        }
        "fig3" | "fig4" => {
            s.label = name.into();
            s.sweep = Some(Sweep {
                param: SweepParam::Temperature,
                values: vec![1.0, 2.0, 3.0, 4.0],
            });
        }
        "fig7" | "fig8" => {
            s.label = name.into();
            s.sweep = Some(Sweep {
                param: SweepParam::B,
                values: vec![0.5, 1.0, 1.5, 2.0],
            });
            s.artifact_chosen.push("sweep_values".into());
        }
        "nickel_T" | "nickel_t" => {
            s = nickel_base();
            s.label = "nickel_T".into();
            s.sweep = Some(Sweep {
                param: SweepParam::Temperature,
                values: vec![300.0, 400.0],
            });
            s.artifact_chosen.push("b".into());
        }
        "nickel_B" | "nickel_b" => {
            s = nickel_base();
            s.label = "nickel_B".into();
            s.sweep = Some(Sweep {
                param: SweepParam::B,
                values: vec![200.0, 300.0],
            });
            s.artifact_chosen.push("temperature".into());
        }
        other => return Err(Error::UnknownPreset(other.into())),
    }
    Ok(s)
}

pub fn preset_names() -> &'static [&'static str] {
    &[
        "fig1", "fig2", "fig3", "fig4", "fig7", "fig8", "nickel_T", "nickel_B",
    ]
}

/// Scenario echo plus provenance flags, serialized ahead of the rows.
#[derive(Debug, Clone, Serialize)]
pub struct TableMetadata {
    pub generator: String,
    pub version: String,
    pub label: String,
    pub basis_convention: String,
    pub battery: BatteryParams,
    pub charger: ChargerParams,
    pub temperature: f64,
    pub grid: TimeGrid,
    pub mode: String,
    pub backend: String,
    pub coherence_basis: String,
    pub power_method: String,
    pub units: String,
    pub sweep_param: String,
    pub sweep_values: Vec<f64>,
    pub artifact_chosen: Vec<String>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultRow {
    pub sweep_param: String,
    pub sweep_value: f64,
    pub t: f64,
    pub w: f64,
    pub p: f64,
    pub k: f64,
    pub c_l1: f64,
    pub negativity: f64,
    pub w_passive: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultTable {
    pub metadata: TableMetadata,
    pub rows: Vec<ResultRow>,
}

fn apply_sweep(
    s: &Scenario,
    param: SweepParam,
    value: f64,
) -> Result<(BatteryParams, ChargerParams, ThermalConfig)> {
    let b = &s.battery;
    let battery = match param {
        SweepParam::D => BatteryParams::new(b.j, b.delta, value, b.g1, b.g2, b.b, b.mu_b)?,
        SweepParam::B => BatteryParams::new(b.j, b.delta, b.d, b.g1, b.g2, value, b.mu_b)?,
        SweepParam::Delta => BatteryParams::new(b.j, value, b.d, b.g1, b.g2, b.b, b.mu_b)?,
        SweepParam::J => BatteryParams::new(value, b.delta, b.d, b.g1, b.g2, b.b, b.mu_b)?,
        _ => *b,
    };
    let charger = match param {
        SweepParam::Theta => ChargerParams::new(s.charger.omega, value)?,
        SweepParam::Omega => ChargerParams::new(value, s.charger.theta)?,
        _ => s.charger,
    };
    let thermal = match param {
        SweepParam::Temperature => ThermalConfig::new(value)?,
        _ => s.thermal,
    };
    Ok((battery, charger, thermal))
}

struct BranchResult {
    rows: Vec<ResultRow>,
    used_numeric_fallback: bool,
}

fn run_branch(
    s: &Scenario,
    sweep_name: &str,
    sweep_value: f64,
    param: Option<SweepParam>,
) -> Result<BranchResult> {
    let (battery, charger, thermal) = match param {
        Some(p) => apply_sweep(s, p, sweep_value)?,
        None => (s.battery, s.charger, s.thermal),
    };

    let h_b = build_battery_hamiltonian(&battery);
    let mut used_numeric_fallback = false;
    let rho0 = match s.backend {
        Backend::Numeric => gibbs_state_numeric(&battery, thermal.temperature())?,
        Backend::ClosedForm => match gibbs_state_closed(&battery, thermal.temperature()) {
            Ok(rho) => rho,
            Err(Error::DegenerateEta { .. }) => {
                used_numeric_fallback = true;
                gibbs_state_numeric(&battery, thermal.temperature())?
            }
            Err(e) => return Err(e),
        },
    };

    let propagator = Propagator::new(&h_b, &charger, s.mode, s.backend)?;
    let k = capacity(&h_b)?;
    let times = s.grid.times();

    let mut w_series = Vec::with_capacity(times.len());
    let mut c_series = Vec::with_capacity(times.len());
    let mut n_series = Vec::with_capacity(times.len());
    let mut wp_series = Vec::with_capacity(times.len());

    for &t in &times {
        let rho_t = propagator.state_at(&rho0, t).map_err(|e| {
            Error::InvariantViolation(format!("at sweep value {sweep_value}, t = {t}: {e}"))
        })?;
        w_series.push(stored_work(&h_b, &rho_t, &rho0)?);
        c_series.push(l1_coherence(&rho_t, s.coherence_basis, Some(&h_b))?);
        n_series.push(negativity(&rho_t)?);
        wp_series.push(crate::metrics::passive_ergotropy(&h_b, &rho_t)?);
    }

    let p_series = instantaneous_power(&times, &w_series, PowerMethod::CentralDifference)?;

    // Post-hoc audit of the branch.
    if w_series[0] != 0.0 {
        return Err(Error::InvariantViolation(format!(
            "W(0) = {} is not exactly zero at sweep value {sweep_value}",
            w_series[0]
        )));
    }
    for (i, (&n, &c)) in n_series.iter().zip(&c_series).enumerate() {
        if !(-1e-10..=0.5 + 1e-8).contains(&n) {
            return Err(Error::InvariantViolation(format!(
                "negativity {n} out of [0, 1/2] at row {i}, sweep value {sweep_value}"
            )));
        }
        if !(-1e-12..=5.0 + 1e-8).contains(&c) {
            return Err(Error::InvariantViolation(format!(
                "coherence {c} out of [0, 5] at row {i}, sweep value {sweep_value}"
            )));
        }
    }

    let rows = times
        .iter()
        .enumerate()
        .map(|(i, &t)| ResultRow {
            sweep_param: sweep_name.to_string(),
            sweep_value,
            t,
            w: w_series[i],
            p: p_series[i],
            k,
            c_l1: c_series[i],
            negativity: n_series[i],
            w_passive: wp_series[i],
        })
        .collect();

    Ok(BranchResult {
        rows,
        used_numeric_fallback,
    })
}

/// Run a scenario over its sweep (or the single base point) and collect the
/// observable table. Deterministic: identical scenarios produce identical
/// tables.
pub fn run(s: &Scenario) -> Result<ResultTable> {
    s.validate()?;

    let branches: Vec<(String, f64, Option<SweepParam>)> = match &s.sweep {
        Some(sweep) => sweep
            .values
            .iter()
            .map(|&v| (sweep.param.name().to_string(), v, Some(sweep.param)))
            .collect(),
        None => vec![("none".to_string(), 0.0, None)],
    };

    let mut rows = Vec::new();
    let mut notes = Vec::new();
    for (name, value, param) in &branches {
        let branch = run_branch(s, name, *value, *param)?;
        if branch.used_numeric_fallback {
            notes.push(format!(
                "closed-form thermal backend fell back to numeric at sweep value {value} (degenerate eta)"
            ));
        }
        rows.extend(branch.rows);
    }
    if s.mode == EvolutionMode::TotalHamiltonian {
        notes.push(
            "total mode is a diagnostic: evolution under battery + charger, not the charger-only protocol"
                .into(),
        );
    }
    if s.backend == Backend::ClosedForm {
        notes.push(
            "closed-form evolution applies the analytic phase rule (net frequency omega cos(theta)); run `audit` for its deviation from direct charger evolution"
                .into(),
        );
    }

    let metadata = TableMetadata {
        generator: "qqb-core".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        label: s.label.clone(),
        basis_convention: BASIS_CONVENTION.into(),
        battery: s.battery,
        charger: s.charger,
        temperature: s.thermal.temperature(),
        grid: s.grid,
        mode: s.mode_name().into(),
        backend: s.backend_name().into(),
        coherence_basis: s.basis_name().into(),
        power_method: "central-difference".into(),
        units: s.units.name().into(),
        sweep_param: s
            .sweep
            .as_ref()
            .map(|sw| sw.param.name().to_string())
            .unwrap_or_else(|| "none".into()),
        sweep_values: s
            .sweep
            .as_ref()
            .map(|sw| sw.values.clone())
            .unwrap_or_default(),
        artifact_chosen: s.artifact_chosen.clone(),
        notes,
    };

    Ok(ResultTable { metadata, rows })
}

pub const CSV_HEADER: &str = "sweep_param,sweep_value,t,W,P,K,C_l1,negativity,W_passive";

// `{}` on f64 prints the shortest decimal that parses back to the same bits,
// which is what makes the round-trip and determinism guarantees hold.
pub fn write_csv<W: Write>(table: &ResultTable, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in &table.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.sweep_param, r.sweep_value, r.t, r.w, r.p, r.k, r.c_l1, r.negativity, r.w_passive
        )?;
    }
    Ok(())
}

pub fn write_json<W: Write>(table: &ResultTable, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, table)?;
    out.write_all(b"\n").map_err(|e| Error::Io {
        path: "<writer>".into(),
        source: e,
    })?;
    Ok(())
}

/// Serialize the table to a file, surfacing the path on IO failure.
pub fn write_to_path(table: &ResultTable, format: OutputFormat, path: &Path) -> Result<()> {
    let display = path.display().to_string();
    let file = std::fs::File::create(path).map_err(|e| Error::Io {
        path: display.clone(),
        source: e,
    })?;
    let mut buf = std::io::BufWriter::new(file);
    match format {
        OutputFormat::Csv => write_csv(table, &mut buf).map_err(|e| Error::Io {
            path: display.clone(),
            source: e,
        })?,
        OutputFormat::Json => write_json(table, &mut buf)?,
    }
    use std::io::Write as _;
    buf.flush().map_err(|e| Error::Io {
        path: display,
        source: e,
    })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_names_resolve() {
        for name in preset_names() {
            let s = preset(name).unwrap();
            s.validate().unwrap();
        }
        assert!(matches!(preset("fig5"), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn fig3_sweeps_temperature() {
        let s = preset("fig3").unwrap();
        let sweep = s.sweep.unwrap();
        assert_eq!(sweep.param, SweepParam::Temperature);
        assert_eq!(sweep.values, vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn nickel_b_sweeps_field() {
        let s = preset("nickel_B").unwrap();
        let sweep = s.sweep.as_ref().unwrap();
        assert_eq!(sweep.param, SweepParam::B);
        assert_eq!(sweep.values, vec![200.0, 300.0]);
        assert_eq!(s.units, UnitSystem::KelvinTesla);
        assert!((s.battery.mu_b - 0.67171).abs() < 1e-12);
        // h2 at B = 200 T, g2 = 2.275 is computed, never hard-coded.
        assert!((s.battery.h2() - 2.275 * 0.67171 * 200.0).abs() < 1e-9);
    }

    #[test]
    fn library_defaults_are_flagged_in_metadata() {
        let mut s = preset("fig1").unwrap();
        s.grid = TimeGrid {
            t_max: 1.0,
            n_steps: 3,
        };
        let table = run(&s).unwrap();
        assert!(table
            .metadata
            .artifact_chosen
            .contains(&"sweep_values".to_string()));
        assert_eq!(table.metadata.basis_convention, BASIS_CONVENTION);

        let nickel = preset("nickel_T").unwrap();
        for flag in ["theta", "b"] {
            assert!(nickel.artifact_chosen.contains(&flag.to_string()));
        }
    }

    #[test]
    fn hypothesis_switches_produce_oscillations_through_the_engine() {
        // Eigenbasis coherence on the closed-form phase rule oscillates at
        // the symmetric angle where the literal protocol is frozen.
        let mut s = preset("fig1").unwrap();
        s.backend = Backend::ClosedForm;
        s.coherence_basis = CoherenceBasis::BatteryEigenbasis;
        s.grid = TimeGrid {
            t_max: 20.0,
            n_steps: 200,
        };
        let table = run(&s).unwrap();
        let branch: Vec<f64> = table
            .rows
            .iter()
            .filter(|r| r.sweep_value == 0.5)
            .map(|r| r.c_l1)
            .collect();
        let max = branch.iter().cloned().fold(f64::MIN, f64::max);
        let min = branch.iter().cloned().fold(f64::MAX, f64::min);
        assert!(max - min > 1e-6);
        assert!(table
            .metadata
            .notes
            .iter()
            .any(|n| n.contains("closed-form evolution")));
    }

    #[test]
    fn zero_anisotropy_scenario_is_null() {
        let mut s = base_scenario();
        s.battery = BatteryParams::new(1.0, 0.0, 1.0, 2.0, 2.0, 1.0, 1.0).unwrap();
        s.grid = TimeGrid {
            t_max: 5.0,
            n_steps: 50,
        };
        let table = run(&s).unwrap();
        assert_eq!(table.rows.len(), 50);
        for r in &table.rows {
            assert!(r.w.abs() <= 1e-12);
            assert!(r.p.abs() <= 1e-12);
            assert!(r.c_l1.abs() <= 1e-12);
            assert!(r.negativity.abs() <= 1e-12);
            assert_eq!(r.sweep_param, "none");
            assert_eq!(r.sweep_value, 0.0);
        }
    }

    #[test]
    fn fig2_capacity_per_branch() {
        let mut s = preset("fig2").unwrap();
        s.grid = TimeGrid {
            t_max: 2.0,
            n_steps: 10,
        };
        let table = run(&s).unwrap();
        assert_eq!(table.rows.len(), 4 * 10);
        for r in &table.rows {
            let expect = -r.sweep_value - 0.5 + 4.0;
            assert!((r.k - expect).abs() < 1e-12);
            if r.t == 0.0 {
                assert_eq!(r.w, 0.0);
            }
        }
    }

    #[test]
    fn sweep_branches_are_independent() {
        let mut full = preset("fig2").unwrap();
        full.grid = TimeGrid {
            t_max: 1.0,
            n_steps: 8,
        };
        let mut single = full.clone();
        single.sweep = Some(Sweep {
            param: SweepParam::D,
            values: vec![1.5],
        });
        let t_full = run(&full).unwrap();
        let t_single = run(&single).unwrap();
        let branch: Vec<_> = t_full
            .rows
            .iter()
            .filter(|r| r.sweep_value == 1.5)
            .collect();
        assert_eq!(branch.len(), t_single.rows.len());
        for (a, b) in branch.iter().zip(&t_single.rows) {
            assert_eq!(a.w.to_bits(), b.w.to_bits());
            assert_eq!(a.p.to_bits(), b.p.to_bits());
            assert_eq!(a.c_l1.to_bits(), b.c_l1.to_bits());
            assert_eq!(a.negativity.to_bits(), b.negativity.to_bits());
        }
    }

    #[test]
    fn csv_is_deterministic_and_round_trips() {
        let mut s = preset("fig3").unwrap();
        s.grid = TimeGrid {
            t_max: 3.0,
            n_steps: 12,
        };
        let table1 = run(&s).unwrap();
        let table2 = run(&s).unwrap();
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_csv(&table1, &mut a).unwrap();
        write_csv(&table2, &mut b).unwrap();
        assert_eq!(a, b, "two runs must serialize byte-identically");

        // Every float parses back to the identical bits.
        let text = String::from_utf8(a).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        for (line, row) in lines.zip(&table1.rows) {
            let cols: Vec<&str> = line.split(',').collect();
            assert_eq!(cols.len(), 9);
            let parsed: Vec<f64> = cols[1..].iter().map(|c| c.parse().unwrap()).collect();
            let expect = [
                row.sweep_value,
                row.t,
                row.w,
                row.p,
                row.k,
                row.c_l1,
                row.negativity,
                row.w_passive,
            ];
            for (p, e) in parsed.iter().zip(expect) {
                assert_eq!(p.to_bits(), e.to_bits());
            }
        }
    }

    #[test]
    fn json_round_trips() {
        let mut s = preset("fig1").unwrap();
        s.grid = TimeGrid {
            t_max: 1.0,
            n_steps: 5,
        };
        let table = run(&s).unwrap();
        let mut buf = Vec::new();
        write_json(&table, &mut buf).unwrap();
        let value: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(value["metadata"]["label"], "fig1");
        assert_eq!(value["rows"].as_array().unwrap().len(), table.rows.len());
        let w0 = value["rows"][0]["w"].as_f64().unwrap();
        assert_eq!(w0.to_bits(), table.rows[0].w.to_bits());
    }

    #[test]
    fn total_mode_with_closed_form_backend_is_rejected() {
        let mut s = base_scenario();
        s.mode = EvolutionMode::TotalHamiltonian;
        s.backend = Backend::ClosedForm;
        assert!(matches!(run(&s), Err(Error::UnsupportedCombination)));
    }

    #[test]
    fn degenerate_eta_falls_back_to_numeric() {
        let mut s = base_scenario();
        // Delta = 0 with gamma_- = 0: closed form undefined, numeric fine.
        s.battery = BatteryParams::new(1.0, 0.0, 0.5, 2.0, 2.0, 1.0, 1.0).unwrap();
        s.backend = Backend::ClosedForm;
        s.grid = TimeGrid {
            t_max: 1.0,
            n_steps: 4,
        };
        let table = run(&s).unwrap();
        assert!(table
            .metadata
            .notes
            .iter()
            .any(|n| n.contains("fell back to numeric")));
    }

    #[test]
    fn validation_rejects_bad_grids() {
        let mut s = base_scenario();
        s.grid.n_steps = 1;
        assert!(matches!(s.validate(), Err(Error::InvalidScenario(_))));
        let mut s = base_scenario();
        s.grid.t_max = -1.0;
        assert!(matches!(s.validate(), Err(Error::InvalidScenario(_))));
        let mut s = base_scenario();
        s.sweep = Some(Sweep {
            param: SweepParam::D,
            values: vec![],
        });
        assert!(matches!(s.validate(), Err(Error::InvalidScenario(_))));
    }
}
