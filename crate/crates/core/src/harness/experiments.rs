//! The four trend experiments: IRL power vs. uplink rate (fig2), time split
//! vs. rate (fig3), and compute time / additional IRL power vs. local
//! iterations for two frame lengths (fig4, fig5).
//!
//! Sweep points reuse the scenario seed, so all points share the same
//! channel realizations and differences between points are paired.

use super::config::ScenarioConfig;
use super::monte_carlo::{sweep_point, Metric, RealizationOutcome};
use super::report::{DeviceKey, ExperimentResult, MetricRow, Summary};
use crate::error::Result;
use crate::solver::Tolerances;

pub const THETA_SWEEP: &str = "theta_kbit";
pub const ADDITIONAL_IRL_POWER: &str = "additional_p_irl";

pub fn fig2_sweep_name(irl_semi_angle: f64) -> String {
    format!(
        "{THETA_SWEEP}|irl_semi_angle_deg={}",
        round_deg(irl_semi_angle)
    )
}

pub fn fig45_sweep_name(frame: f64) -> String {
    format!("local_iterations|frame_s={frame}")
}

fn round_deg(rad: f64) -> f64 {
    (rad.to_degrees() * 1e9).round() / 1e9
}

/// Total IRL power against the rate threshold, one curve per IRL LED
/// semi-angle (radians).
pub fn experiment_fig2(
    cfg: &ScenarioConfig,
    theta_values: &[f64],
    irl_semi_angles: &[f64],
) -> Result<ExperimentResult> {
    let tols = Tolerances::default();
    let mut result = ExperimentResult::new("fig2");
    for &angle in irl_semi_angles {
        let name = fig2_sweep_name(angle);
        let base = cfg.with_irl_semi_angle(angle);
        for &theta in theta_values {
            let c = base.with_rate_threshold(theta);
            let (point, _) = sweep_point(&c, &name, theta / 1e3, &[Metric::IrlPower], &tols)?;
            result.points.push(point);
        }
    }
    result.canonicalize();
    Ok(result)
}

/// Per-device transmission/computation time split against the rate threshold.
pub fn experiment_fig3(cfg: &ScenarioConfig, theta_values: &[f64]) -> Result<ExperimentResult> {
    let tols = Tolerances::default();
    let metrics = [
        Metric::TransCompRatio,
        Metric::TransmissionTime,
        Metric::ComputationTime,
    ];
    let mut result = ExperimentResult::new("fig3");
    for &theta in theta_values {
        let c = cfg.with_rate_threshold(theta);
        let (point, _) = sweep_point(&c, THETA_SWEEP, theta / 1e3, &metrics, &tols)?;
        result.points.push(point);
    }
    result.canonicalize();
    Ok(result)
}

/// Compute time and IRL power against `K` for each frame length, at rate
/// threshold `theta` (bits). Additional power is the paired difference
/// `P_1(K) - P_1(baseline_k)` per realization.
pub fn experiment_fig4_fig5(
    cfg: &ScenarioConfig,
    k_values: &[u32],
    frames: &[f64],
    theta: f64,
    baseline_k: u32,
) -> Result<ExperimentResult> {
    let tols = Tolerances::default();
    let metrics = [Metric::ComputationTime, Metric::IrlPower];
    let mut result = ExperimentResult::new("fig4_fig5");
    for &frame in frames {
        let name = fig45_sweep_name(frame);
        let base = cfg.with_rate_threshold(theta).with_frame(frame);
        let (_, baseline) = sweep_point(
            &base.with_local_iterations(baseline_k),
            &name,
            f64::from(baseline_k),
            &metrics,
            &tols,
        )?;
        for &k in k_values {
            let (mut point, outcomes) = sweep_point(
                &base.with_local_iterations(k),
                &name,
                f64::from(k),
                &metrics,
                &tols,
            )?;
            point.rows.extend(additional_power_rows(
                &outcomes,
                &baseline,
                cfg.devices.len(),
            ));
            result.points.push(point);
        }
    }
    result.canonicalize();
    Ok(result)
}

fn additional_power_rows(
    outcomes: &[RealizationOutcome],
    baseline: &[RealizationOutcome],
    devices: usize,
) -> Vec<MetricRow> {
    let pairs = || outcomes.iter().zip(baseline);
    let total: Vec<f64> = pairs()
        .filter_map(|(o, b)| Some(o.total_irl_power()? - b.total_irl_power()?))
        .collect();
    let mut rows = vec![MetricRow {
        device: DeviceKey::All,
        metric: ADDITIONAL_IRL_POWER.into(),
        summary: Summary::from_values(&total),
    }];
    for j in 0..devices {
        let diffs: Vec<f64> = pairs()
            .filter_map(|(o, b)| Some(o.solution(j)?.p_irl - b.solution(j)?.p_irl))
            .collect();
        rows.push(MetricRow {
            device: DeviceKey::Device(j),
            metric: ADDITIONAL_IRL_POWER.into(),
            summary: Summary::from_values(&diffs),
        });
    }
    rows
}

/// The fig4 view: mean computation time per local iteration.
pub fn fig4_view(result: &ExperimentResult) -> ExperimentResult {
    let mut r = result.clone().renamed("fig4");
    r.retain_metrics(&[Metric::ComputationTime.name()]);
    r
}

/// The fig5 view: additional and absolute IRL power.
pub fn fig5_view(result: &ExperimentResult) -> ExperimentResult {
    let mut r = result.clone().renamed("fig5");
    r.retain_metrics(&[ADDITIONAL_IRL_POWER, Metric::IrlPower.name()]);
    r
}
