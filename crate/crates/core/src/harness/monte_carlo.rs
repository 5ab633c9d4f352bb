//! Monte-Carlo runner over uplink channel realizations.
//!
//! Realization `i` draws its channels from stream `i` of the scenario seed,
//! so results do not depend on scheduling, and every sweep point of an
//! experiment sees the same channels.

use rayon::prelude::*;

use super::config::ScenarioConfig;
use super::report::{DeviceKey, ExperimentResult, MetricRow, Summary, SweepPoint};
use crate::error::{Error, Infeasibility, Result};
use crate::rf::optimal_beamformer;
use crate::solver::{solve_device, DeviceSolution, Tolerances};

/// Why a device has no usable solution in a realization.
#[derive(Debug, Clone, PartialEq)]
pub enum Unsolved {
    Infeasible(Infeasibility),
    /// Solved, but the constraint audit failed.
    AuditFailed(Vec<&'static str>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealizationOutcome {
    pub index: usize,
    pub devices: Vec<std::result::Result<DeviceSolution, Unsolved>>,
}

impl RealizationOutcome {
    pub fn all_feasible(&self) -> bool {
        self.devices.iter().all(|d| d.is_ok())
    }

    pub fn solution(&self, j: usize) -> Option<&DeviceSolution> {
        self.devices[j].as_ref().ok()
    }

    /// Sum of IRL powers, if every device is feasible.
    pub fn total_irl_power(&self) -> Option<f64> {
        self.devices
            .iter()
            .map(|d| d.as_ref().ok().map(|s| s.p_irl))
            .sum()
    }
}

/// Solves every device of realization `index`.
pub fn simulate_realization(
    cfg: &ScenarioConfig,
    index: usize,
    tols: &Tolerances,
) -> Result<RealizationOutcome> {
    let channels = cfg.draw_channels(index as u64)?;
    let devices = (0..cfg.devices.len())
        .map(|j| {
            let bf = optimal_beamformer(&channels, j)?;
            let dp = cfg.device_problem(j, bf)?;
            match solve_device(&dp, tols) {
                Ok(sol) if sol.feasible => Ok(Ok(sol)),
                Ok(sol) => Ok(Err(Unsolved::AuditFailed(
                    sol.constraints.violations(crate::solver::AUDIT_TOLERANCE),
                ))),
                Err(Error::Infeasible(inf)) => Ok(Err(Unsolved::Infeasible(inf))),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RealizationOutcome { index, devices })
}

/// All realizations of `cfg`, in index order.
pub fn simulate(cfg: &ScenarioConfig, tols: &Tolerances) -> Result<Vec<RealizationOutcome>> {
    cfg.validate()?;
    (0..cfg.realizations)
        .into_par_iter()
        .map(|i| simulate_realization(cfg, i, tols))
        .collect()
}

/// Per-device quantities that can be aggregated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    IrlPower,
    TransmissionTime,
    ComputationTime,
    TransCompRatio,
    EnergyRequired,
    CpuFrequency,
    UplinkPower,
}

impl Metric {
    pub const ALL: [Metric; 7] = [
        Metric::IrlPower,
        Metric::TransmissionTime,
        Metric::ComputationTime,
        Metric::TransCompRatio,
        Metric::EnergyRequired,
        Metric::CpuFrequency,
        Metric::UplinkPower,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::IrlPower => "p_irl",
            Metric::TransmissionTime => "t_trans",
            Metric::ComputationTime => "t_comp",
            Metric::TransCompRatio => "trans_comp_ratio",
            Metric::EnergyRequired => "energy_required",
            Metric::CpuFrequency => "f_cpu",
            Metric::UplinkPower => "p_uplink",
        }
    }

    pub fn value(self, s: &DeviceSolution) -> f64 {
        match self {
            Metric::IrlPower => s.p_irl,
            Metric::TransmissionTime => s.t_trans,
            Metric::ComputationTime => s.t_comp,
            Metric::TransCompRatio => s.trans_to_comp_ratio(),
            Metric::EnergyRequired => s.energy_required,
            Metric::CpuFrequency => s.f_cpu,
            Metric::UplinkPower => s.p_uplink,
        }
    }
}

pub const TOTAL_IRL_POWER: &str = "p_irl";

/// Per-device summaries of `metrics`, plus the `all` row of total IRL power
/// (realizations where every device is feasible).
pub fn summarize(
    outcomes: &[RealizationOutcome],
    devices: usize,
    metrics: &[Metric],
) -> Vec<MetricRow> {
    let totals: Vec<f64> = outcomes
        .iter()
        .filter_map(|o| o.total_irl_power())
        .collect();
    let mut rows = vec![MetricRow {
        device: DeviceKey::All,
        metric: TOTAL_IRL_POWER.to_string(),
        summary: Summary::from_values(&totals),
    }];
    for j in 0..devices {
        for &m in metrics {
            let values: Vec<f64> = outcomes
                .iter()
                .filter_map(|o| o.solution(j).map(|s| m.value(s)))
                .collect();
            rows.push(MetricRow {
                device: DeviceKey::Device(j),
                metric: m.name().to_string(),
                summary: Summary::from_values(&values),
            });
        }
    }
    rows
}

/// One sweep point from a full simulation of `cfg`.
pub fn sweep_point(
    cfg: &ScenarioConfig,
    sweep_name: &str,
    sweep_value: f64,
    metrics: &[Metric],
    tols: &Tolerances,
) -> Result<(SweepPoint, Vec<RealizationOutcome>)> {
    let outcomes = simulate(cfg, tols)?;
    let point = SweepPoint {
        sweep_name: sweep_name.to_string(),
        sweep_value,
        n_total: outcomes.len(),
        rows: summarize(&outcomes, cfg.devices.len(), metrics),
    };
    Ok((point, outcomes))
}

/// Plain Monte-Carlo run of the scenario as configured.
pub fn run_monte_carlo(cfg: &ScenarioConfig) -> Result<ExperimentResult> {
    let (point, _) = sweep_point(cfg, "none", 0.0, &Metric::ALL, &Tolerances::default())?;
    let mut result = ExperimentResult::new("single");
    result.points.push(point);
    result.canonicalize();
    Ok(result)
}
