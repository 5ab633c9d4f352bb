//! Scenario configuration.
//!
//! Files are TOML with the unit in every key name (`frame_s`,
//! `dark_current_ma`, ...). [`ScenarioConfig`] holds the same values in SI.

use std::path::Path;

use serde::Deserialize;

use crate::compute::ComputeParams;
use crate::error::{Error, Result};
use crate::optics::{HarvesterParams, LinkTemplate, OpticalLink};
use crate::rf::{self, Beamformer, LosSteering, RicianModel, UplinkChannelSet};
use crate::solver::DeviceProblem;

pub const DEFAULT_CONFIG_TOML: &str = include_str!("../../config/default.toml");

#[derive(Debug, Clone, PartialEq)]
pub struct DeviceConfig {
    pub distance_to_ap: f64,
    pub distance_to_optical: f64,
    pub compute: ComputeParams,
    /// Bits per frame.
    pub rate_threshold: f64,
    /// IRL budget, W.
    pub power_budget: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OpticalConfig {
    pub transmitter_height: f64,
    pub vl: LinkTemplate,
    pub irl: LinkTemplate,
    pub harvester: HarvesterParams,
    pub p_vl: f64,
}

/// Sweep grids for the four trend experiments.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    /// Bits per frame.
    pub fig2_theta: Vec<f64>,
    /// Radians.
    pub fig2_irl_semi_angles: Vec<f64>,
    pub fig3_theta: Vec<f64>,
    pub fig45_theta: f64,
    pub fig45_local_iterations: Vec<u32>,
    /// Seconds.
    pub fig45_frames: Vec<f64>,
    pub baseline_local_iterations: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub devices: Vec<DeviceConfig>,
    pub antennas: usize,
    pub bandwidth: f64,
    pub noise_variance: f64,
    pub rician: RicianModel,
    pub optical: OpticalConfig,
    pub frame: f64,
    pub realizations: usize,
    pub rng_seed: u64,
    pub experiments: ExperimentPlan,
}

impl ScenarioConfig {
    /// The built-in three-device scenario (`config/default.toml`).
    pub fn default_scenario() -> Self {
        Self::from_toml_str(DEFAULT_CONFIG_TOML).expect("bundled default config is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let cfg = raw.into_scenario()?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let cfg_err = |e: Error| Error::Config(e.to_string());
        if self.devices.is_empty() {
            return Err(Error::Config("at least one device is required".into()));
        }
        if self.realizations == 0 {
            return Err(Error::Config("realizations must be >= 1".into()));
        }
        if !(self.frame > 0.0 && self.frame.is_finite()) {
            return Err(Error::Config(format!(
                "frame_s must be > 0, got {}",
                self.frame
            )));
        }
        if self.antennas == 0 {
            return Err(Error::Config("antennas must be >= 1".into()));
        }
        if !(self.bandwidth > 0.0) || !(self.noise_variance > 0.0) {
            return Err(Error::Config(
                "bandwidth and noise variance must be > 0".into(),
            ));
        }
        self.rician.validate().map_err(cfg_err)?;
        self.optical.harvester.validate().map_err(cfg_err)?;
        if !(self.optical.p_vl >= 0.0) {
            return Err(Error::Config("p_vl_w must be >= 0".into()));
        }
        for (j, d) in self.devices.iter().enumerate() {
            let tag = |e: Error| Error::Config(format!("device {}: {e}", j + 1));
            d.compute.validate().map_err(tag)?;
            if !(d.distance_to_ap > 0.0) {
                return Err(Error::Config(format!(
                    "device {}: distance_to_ap_m must be > 0",
                    j + 1
                )));
            }
            if !(d.rate_threshold >= 0.0) || !(d.power_budget > 0.0) {
                return Err(Error::Config(format!(
                    "device {}: rate threshold must be >= 0 and power budget > 0",
                    j + 1
                )));
            }
            self.links(j).map_err(tag)?;
        }
        let plan = &self.experiments;
        if plan.baseline_local_iterations == 0 || plan.fig45_local_iterations.contains(&0) {
            return Err(Error::Config("local iteration counts must be >= 1".into()));
        }
        if plan.fig45_frames.iter().any(|f| !(*f > 0.0)) {
            return Err(Error::Config("fig45_frames_s entries must be > 0".into()));
        }
        for &a in &plan.fig2_irl_semi_angles {
            crate::optics::lambertian_order(a).map_err(cfg_err)?;
        }
        Ok(())
    }

    /// VL and IRL links of device `j`.
    pub fn links(&self, j: usize) -> Result<(OpticalLink, OpticalLink)> {
        let d = self.devices[j].distance_to_optical;
        let h = self.optical.transmitter_height;
        Ok((
            OpticalLink::from_height(&self.optical.vl, h, d)?,
            OpticalLink::from_height(&self.optical.irl, h, d)?,
        ))
    }

    pub fn ap_distances(&self) -> Vec<f64> {
        self.devices.iter().map(|d| d.distance_to_ap).collect()
    }

    /// Channel realization `index` of this scenario.
    pub fn draw_channels(&self, index: u64) -> Result<UplinkChannelSet> {
        let mut rng = rf::seeded_rng(self.rng_seed, index);
        let g = rf::draw_channels(&self.rician, &self.ap_distances(), self.antennas, &mut rng);
        UplinkChannelSet::new(g, self.noise_variance, self.bandwidth)
    }

    /// Device problem `j` for a fixed beamformer.
    pub fn device_problem(&self, j: usize, beamformer: Beamformer) -> Result<DeviceProblem> {
        let (vl_link, irl_link) = self.links(j)?;
        let dev = &self.devices[j];
        Ok(DeviceProblem {
            compute: dev.compute,
            beamformer,
            rate_threshold: dev.rate_threshold,
            bandwidth: self.bandwidth,
            frame: self.frame,
            power_budget: dev.power_budget,
            vl_link,
            irl_link,
            harvester: self.optical.harvester,
            p_vl: self.optical.p_vl,
        })
    }

    pub fn with_rate_threshold(&self, bits: f64) -> Self {
        let mut c = self.clone();
        c.devices.iter_mut().for_each(|d| d.rate_threshold = bits);
        c
    }

    pub fn with_irl_semi_angle(&self, radians: f64) -> Self {
        let mut c = self.clone();
        c.optical.irl.semi_angle_half_power = radians;
        c
    }

    pub fn with_local_iterations(&self, k: u32) -> Self {
        let mut c = self.clone();
        c.devices
            .iter_mut()
            .for_each(|d| d.compute.local_iterations = k);
        c
    }

    pub fn with_frame(&self, seconds: f64) -> Self {
        let mut c = self.clone();
        c.frame = seconds;
        c
    }

    pub fn with_realizations(&self, n: usize) -> Self {
        let mut c = self.clone();
        c.realizations = n;
        c
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        let mut c = self.clone();
        c.rng_seed = seed;
        c
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    frame_s: f64,
    realizations: usize,
    rng_seed: u64,
    uplink: RawUplink,
    optical: RawOptical,
    compute: RawCompute,
    devices: Vec<RawDevice>,
    #[serde(default)]
    experiments: RawExperiments,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawUplink {
    antennas: usize,
    bandwidth_hz: f64,
    noise_variance_w: f64,
    rician_factor_db: f64,
    pathloss_exponent: f64,
    reference_gain_db: f64,
    #[serde(default)]
    los_steering: RawLos,
    #[serde(default)]
    los_angle_deg: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RawLos {
    #[default]
    Broadside,
    Ula,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOptical {
    transmitter_height_m: f64,
    p_vl_w: f64,
    vl: RawBand,
    /// Defaults to the VL receiver.
    irl: Option<RawBand>,
    harvester: RawHarvester,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBand {
    active_area_cm2: f64,
    semi_angle_deg: f64,
    fov_deg: f64,
    #[serde(default = "one")]
    filter_gain: f64,
    #[serde(default = "default_concentrator_index")]
    concentrator_index: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHarvester {
    fill_factor: f64,
    responsivity_a_per_w: f64,
    dark_current_ma: f64,
    #[serde(default = "default_thermal_voltage_mv")]
    thermal_voltage_mv: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCompute {
    capacitance_coeff: f64,
    cycles_per_sample: f64,
    dataset_size_samples: Option<f64>,
    dataset_size_mbit: Option<f64>,
    f_min_ghz: f64,
    f_max_ghz: f64,
    local_iterations: u32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDevice {
    distance_to_ap_m: f64,
    distance_to_optical_m: f64,
    rate_threshold_kbit: f64,
    power_budget_w: f64,
    compute: Option<RawCompute>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawExperiments {
    fig2_theta_kbit: Vec<f64>,
    fig2_irl_semi_angles_deg: Vec<f64>,
    fig3_theta_kbit: Vec<f64>,
    fig45_theta_kbit: f64,
    fig45_local_iterations: Vec<u32>,
    fig45_frames_s: Vec<f64>,
    baseline_local_iterations: u32,
}

impl Default for RawExperiments {
    fn default() -> Self {
        Self {
            fig2_theta_kbit: vec![20.0, 36.0, 40.0, 60.0, 80.0, 100.0],
            fig2_irl_semi_angles_deg: vec![20.0, 45.0, 60.0],
            fig3_theta_kbit: vec![40.0, 60.0, 80.0, 100.0],
            fig45_theta_kbit: 40.0,
            fig45_local_iterations: vec![1, 2, 3],
            fig45_frames_s: vec![2.2, 2.6],
            baseline_local_iterations: 1,
        }
    }
}

fn one() -> f64 {
    1.0
}

fn default_concentrator_index() -> f64 {
    1.5
}

/// kT/q at 300 K.
fn default_thermal_voltage_mv() -> f64 {
    25.85
}

const KBIT: f64 = 1e3;
const GHZ: f64 = 1e9;

impl RawBand {
    fn template(&self) -> LinkTemplate {
        LinkTemplate {
            active_area: self.active_area_cm2 / 1e4,
            fov: self.fov_deg.to_radians(),
            semi_angle_half_power: self.semi_angle_deg.to_radians(),
            filter_gain: self.filter_gain,
            concentrator_index: self.concentrator_index,
        }
    }
}

impl RawCompute {
    fn params(&self) -> Result<ComputeParams> {
        let dataset_size = match (self.dataset_size_samples, self.dataset_size_mbit) {
            (Some(n), None) => n,
            (None, Some(mbit)) => mbit * 1e6,
            _ => {
                return Err(Error::Config(
                    "set exactly one of dataset_size_samples / dataset_size_mbit".into(),
                ))
            }
        };
        Ok(ComputeParams {
            capacitance_coeff: self.capacitance_coeff,
            cycles_per_sample: self.cycles_per_sample,
            dataset_size,
            f_min: self.f_min_ghz * GHZ,
            f_max: self.f_max_ghz * GHZ,
            local_iterations: self.local_iterations,
        })
    }
}

impl RawConfig {
    fn into_scenario(self) -> Result<ScenarioConfig> {
        let shared = self.compute.params()?;
        let devices = self
            .devices
            .iter()
            .map(|d| {
                Ok(DeviceConfig {
                    distance_to_ap: d.distance_to_ap_m,
                    distance_to_optical: d.distance_to_optical_m,
                    compute: match &d.compute {
                        Some(c) => c.params()?,
                        None => shared,
                    },
                    rate_threshold: d.rate_threshold_kbit * KBIT,
                    power_budget: d.power_budget_w,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let u = &self.uplink;
        let los = match u.los_steering {
            RawLos::Broadside => LosSteering::Broadside,
            RawLos::Ula => LosSteering::Ula {
                angle: u.los_angle_deg.to_radians(),
            },
        };
        let vl = self.optical.vl.template();
        let irl = self
            .optical
            .irl
            .as_ref()
            .map(RawBand::template)
            .unwrap_or(vl);
        let h = &self.optical.harvester;
        let e = &self.experiments;
        Ok(ScenarioConfig {
            devices,
            antennas: u.antennas,
            bandwidth: u.bandwidth_hz,
            noise_variance: u.noise_variance_w,
            rician: RicianModel {
                rician_factor_db: u.rician_factor_db,
                pathloss_exponent: u.pathloss_exponent,
                reference_gain: 10f64.powf(u.reference_gain_db / 10.0),
                los,
            },
            optical: OpticalConfig {
                transmitter_height: self.optical.transmitter_height_m,
                vl,
                irl,
                harvester: HarvesterParams {
                    fill_factor: h.fill_factor,
                    responsivity: h.responsivity_a_per_w,
                    dark_current: h.dark_current_ma * 1e-3,
                    thermal_voltage: h.thermal_voltage_mv * 1e-3,
                },
                p_vl: self.optical.p_vl_w,
            },
            frame: self.frame_s,
            realizations: self.realizations,
            rng_seed: self.rng_seed,
            experiments: ExperimentPlan {
                fig2_theta: e.fig2_theta_kbit.iter().map(|t| t * KBIT).collect(),
                fig2_irl_semi_angles: e
                    .fig2_irl_semi_angles_deg
                    .iter()
                    .map(|a| a.to_radians())
                    .collect(),
                fig3_theta: e.fig3_theta_kbit.iter().map(|t| t * KBIT).collect(),
                fig45_theta: e.fig45_theta_kbit * KBIT,
                fig45_local_iterations: e.fig45_local_iterations.clone(),
                fig45_frames: e.fig45_frames_s.clone(),
                baseline_local_iterations: e.baseline_local_iterations,
            },
        })
    }
}
