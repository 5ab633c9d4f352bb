//! Scenario configuration, Monte-Carlo runs, trend experiments and output.

pub mod config;
pub mod experiments;
pub mod monte_carlo;
pub mod plot;
pub mod report;

pub use config::{DeviceConfig, ExperimentPlan, OpticalConfig, ScenarioConfig};
pub use experiments::{experiment_fig2, experiment_fig3, experiment_fig4_fig5};
pub use monte_carlo::{run_monte_carlo, simulate, Metric, RealizationOutcome};
pub use report::{emit_csv, DeviceKey, ExperimentResult, MetricRow, Summary, SweepPoint};
