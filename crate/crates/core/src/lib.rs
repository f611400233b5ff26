//! Simulator for a hybrid qubit-qutrit (spin-1/2 (x) spin-1) Heisenberg-dimer
//! quantum battery.
//!
//! The crate builds the battery and charger Hamiltonians, prepares thermal
//! initial states by two independent routes (numeric spectral exponentiation
//! and analytic closed forms), evolves them under the unitary charging
//! protocol, and computes nonclassicality measures (l1-norm of coherence,
//! negativity) together with performance indicators (stored work, power,
//! capacity, passive-state ergotropy).
//!
//! All pieces are pure functions over immutable inputs; the scenario engine
//! in [`scenario`] orchestrates presets and parameter sweeps, and [`audit`]
//! cross-validates the closed-form and numeric backends on randomized grids
//! and writes the discrepancy report.

pub mod audit;
pub mod charging;
pub mod config;
pub mod error;
pub mod measures;
pub mod metrics;
pub mod numerics;
pub mod scenario;
pub mod spin_model;
pub mod thermal_state;

pub use charging::{Backend, ChargerParams, EvolutionMode};
pub use error::{Error, Result};
pub use measures::CoherenceBasis;
pub use numerics::{ComplexMatrix, EigenSystem};
pub use scenario::{OutputFormat, ResultTable, Scenario};
pub use spin_model::BatteryParams;
pub use thermal_state::{DensityMatrix, ThermalConfig};
