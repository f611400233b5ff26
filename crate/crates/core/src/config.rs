//! Flat key-value scenario config files.
//!
//! One `key = value` pair per line; `#` starts a comment. Keys mirror the
//! scenario fields:
//!
//! ```text
//! label = custom
//! j = 1.0
//! delta = 1.0
//! d = 0.5
//! g1 = 2.0
//! g2 = 2.0
//! b = 1.0
//! mu_b = 1.0
//! temperature = 1.0
//! omega = 1.0
//! theta = 0.7853981633974483
//! t_max = 20.0
//! n_steps = 2000
//! mode = charger-only          # or: total
//! backend = numeric            # or: closed-form
//! coherence_basis = computational   # or: eigen
//! units = natural              # or: kelvin-tesla
//! sweep_param = d              # optional; "none" clears the sweep
//! sweep_values = 0.5,1.0,1.5,2.0
//! ```
//!
//! Unspecified keys keep the value of the scenario the config is applied
//! onto (a preset or the built-in base point).

use std::str::FromStr;

use crate::charging::{Backend, ChargerParams, EvolutionMode};
use crate::error::{Error, Result};
use crate::measures::CoherenceBasis;
use crate::scenario::{Scenario, Sweep, SweepParam, UnitSystem};
use crate::spin_model::BatteryParams;
use crate::thermal_state::ThermalConfig;

/// Apply a config text onto `base`, returning the updated scenario.
pub fn apply_config_str(text: &str, base: &Scenario) -> Result<Scenario> {
    let mut s = base.clone();
    let mut battery = s.battery;
    let mut sweep_param: Option<String> = None;
    let mut sweep_values: Option<Vec<f64>> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(Error::Config {
            line: line_no,
            message: format!("expected 'key = value', got '{raw}'"),
        })?;
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim();
        let parse_f64 = |v: &str| -> Result<f64> {
            v.parse::<f64>().map_err(|_| Error::Config {
                line: line_no,
                message: format!("'{v}' is not a number"),
            })
        };
        match key.as_str() {
            "label" => s.label = value.to_string(),
            "j" => battery.j = parse_f64(value)?,
            "delta" => battery.delta = parse_f64(value)?,
            "d" => battery.d = parse_f64(value)?,
            "g1" => battery.g1 = parse_f64(value)?,
            "g2" => battery.g2 = parse_f64(value)?,
            "b" => battery.b = parse_f64(value)?,
            "mu_b" => battery.mu_b = parse_f64(value)?,
            "temperature" | "t" => {
                s.thermal = ThermalConfig::new(parse_f64(value)?).map_err(|e| Error::Config {
                    line: line_no,
                    message: e.to_string(),
                })?
            }
            "omega" => s.charger = ChargerParams::new(parse_f64(value)?, s.charger.theta)?,
            "theta" => s.charger = ChargerParams::new(s.charger.omega, parse_f64(value)?)?,
            "t_max" => s.grid.t_max = parse_f64(value)?,
            "n_steps" => {
                s.grid.n_steps = value.parse().map_err(|_| Error::Config {
                    line: line_no,
                    message: format!("'{value}' is not a step count"),
                })?
            }
            "mode" => {
                s.mode = match value {
                    "charger-only" => EvolutionMode::ChargerOnly,
                    "total" => EvolutionMode::TotalHamiltonian,
                    other => {
                        return Err(Error::Config {
                            line: line_no,
                            message: format!(
                                "unknown mode '{other}' (expected charger-only or total)"
                            ),
                        })
                    }
                }
            }
            "backend" => {
                s.backend = match value {
                    "numeric" => Backend::Numeric,
                    "closed-form" => Backend::ClosedForm,
                    other => {
                        return Err(Error::Config {
                            line: line_no,
                            message: format!(
                                "unknown backend '{other}' (expected numeric or closed-form)"
                            ),
                        })
                    }
                }
            }
            "coherence_basis" => {
                s.coherence_basis = match value {
                    "computational" => CoherenceBasis::Computational,
                    "eigen" => CoherenceBasis::BatteryEigenbasis,
                    other => {
                        return Err(Error::Config {
                            line: line_no,
                            message: format!(
                            "unknown coherence basis '{other}' (expected computational or eigen)"
                        ),
                        })
                    }
                }
            }
            "units" => {
                s.units = UnitSystem::from_str(value).map_err(|e| Error::Config {
                    line: line_no,
                    message: e.to_string(),
                })?
            }
            "sweep_param" => sweep_param = Some(value.to_string()),
            "sweep_values" => {
                let values: Result<Vec<f64>> =
                    value.split(',').map(|v| parse_f64(v.trim())).collect();
                sweep_values = Some(values?);
            }
            other => {
                return Err(Error::Config {
                    line: line_no,
                    message: format!("unknown key '{other}'"),
                })
            }
        }
    }

    s.battery = BatteryParams::new(
        battery.j,
        battery.delta,
        battery.d,
        battery.g1,
        battery.g2,
        battery.b,
        battery.mu_b,
    )?;

    match (sweep_param.as_deref(), sweep_values) {
        (Some("none"), _) => s.sweep = None,
        (Some(p), Some(values)) => {
            s.sweep = Some(Sweep {
                param: SweepParam::from_str(p)?,
                values,
            })
        }
        (Some(p), None) => {
            // Keep existing values if the axis matches, else error.
            let param = SweepParam::from_str(p)?;
            match &mut s.sweep {
                Some(sweep) => sweep.param = param,
                None => {
                    return Err(Error::InvalidScenario(
                        "sweep_param given without sweep_values".into(),
                    ))
                }
            }
        }
        (None, Some(values)) => match &mut s.sweep {
            Some(sweep) => sweep.values = values,
            None => {
                return Err(Error::InvalidScenario(
                    "sweep_values given without sweep_param".into(),
                ))
            }
        },
        (None, None) => {}
    }

    s.validate()?;
    Ok(s)
}

/// Render a scenario in the config format; `apply_config_str` of the output
/// onto any base reproduces the scenario.
pub fn to_config_string(s: &Scenario) -> String {
    let mut out = String::new();
    let mut push = |k: &str, v: String| {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(&v);
        out.push('\n');
    };
    push("label", s.label.clone());
    push("j", format!("{}", s.battery.j));
    push("delta", format!("{}", s.battery.delta));
    push("d", format!("{}", s.battery.d));
    push("g1", format!("{}", s.battery.g1));
    push("g2", format!("{}", s.battery.g2));
    push("b", format!("{}", s.battery.b));
    push("mu_b", format!("{}", s.battery.mu_b));
    push("temperature", format!("{}", s.thermal.temperature()));
    push("omega", format!("{}", s.charger.omega));
    push("theta", format!("{}", s.charger.theta));
    push("t_max", format!("{}", s.grid.t_max));
    push("n_steps", format!("{}", s.grid.n_steps));
    push(
        "mode",
        match s.mode {
            EvolutionMode::ChargerOnly => "charger-only",
            EvolutionMode::TotalHamiltonian => "total",
        }
        .to_string(),
    );
    push(
        "backend",
        match s.backend {
            Backend::Numeric => "numeric",
            Backend::ClosedForm => "closed-form",
        }
        .to_string(),
    );
    push(
        "coherence_basis",
        match s.coherence_basis {
            CoherenceBasis::Computational => "computational",
            CoherenceBasis::BatteryEigenbasis => "eigen",
        }
        .to_string(),
    );
    push("units", s.units.name().to_string());
    match &s.sweep {
        Some(sweep) => {
            push("sweep_param", sweep.param.name().to_string());
            push(
                "sweep_values",
                sweep
                    .values
                    .iter()
                    .map(|v| format!("{v}"))
                    .collect::<Vec<_>>()
                    .join(","),
            );
        }
        None => push("sweep_param", "none".to_string()),
    }
    out
}
