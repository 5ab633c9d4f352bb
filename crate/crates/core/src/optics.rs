//! Optical downlink: Lambertian line-of-sight gain and solar-panel harvesting.
//!
//! Band index 0 is visible light (VL), index 1 infrared (IRL). Both bands use
//! the same formulas and differ only in their [`OpticalLink`] parameters.

use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use crate::error::{Error, Result};

/// Geometry and receiver front-end of one transmitter-to-device light path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalLink {
    /// Photodetector active area, m².
    pub active_area: f64,
    /// Transmitter-to-device distance, m.
    pub distance: f64,
    /// Angle of irradiance at the transmitter, rad.
    pub irradiation_angle: f64,
    /// Angle of incidence at the receiver, rad.
    pub incidence_angle: f64,
    /// Concentrator field-of-view half angle, rad.
    pub fov: f64,
    /// LED semi-angle at half power, rad.
    pub semi_angle_half_power: f64,
    /// Optical band-pass filter gain.
    pub filter_gain: f64,
    /// Refractive index of the optical concentrator.
    pub concentrator_index: f64,
}

impl OpticalLink {
    /// Link for a downward-facing transmitter mounted `height` metres above an
    /// upward-facing panel at slant `distance`. Irradiance and incidence
    /// angles are then equal: `arccos(height / distance)`.
    pub fn from_height(template: &LinkTemplate, height: f64, distance: f64) -> Result<Self> {
        if !(height > 0.0) {
            return Err(Error::domain("transmitter_height", height, "> 0"));
        }
        if !(distance >= height) {
            return Err(Error::domain(
                "distance",
                distance,
                ">= transmitter height (slant distance)",
            ));
        }
        let angle = (height / distance).acos();
        let link = OpticalLink {
            active_area: template.active_area,
            distance,
            irradiation_angle: angle,
            incidence_angle: angle,
            fov: template.fov,
            semi_angle_half_power: template.semi_angle_half_power,
            filter_gain: template.filter_gain,
            concentrator_index: template.concentrator_index,
        };
        link.validate()?;
        Ok(link)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.active_area > 0.0) {
            return Err(Error::domain("active_area", self.active_area, "> 0"));
        }
        if !(self.distance > 0.0) {
            return Err(Error::domain("distance", self.distance, "> 0"));
        }
        if !(0.0..=FRAC_PI_2).contains(&self.fov) {
            return Err(Error::domain("fov", self.fov, "in [0, pi/2]"));
        }
        if !(self.semi_angle_half_power > 0.0 && self.semi_angle_half_power < FRAC_PI_2) {
            return Err(Error::domain(
                "semi_angle_half_power",
                self.semi_angle_half_power,
                "in (0, pi/2)",
            ));
        }
        if !(self.filter_gain >= 0.0) {
            return Err(Error::domain("filter_gain", self.filter_gain, ">= 0"));
        }
        if !(self.concentrator_index > 0.0) {
            return Err(Error::domain(
                "concentrator_index",
                self.concentrator_index,
                "> 0",
            ));
        }
        Ok(())
    }
}

/// Per-band receiver parameters shared by every device; geometry is filled
/// in per device by [`OpticalLink::from_height`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkTemplate {
    pub active_area: f64,
    pub fov: f64,
    pub semi_angle_half_power: f64,
    pub filter_gain: f64,
    pub concentrator_index: f64,
}

/// Solar-cell electrical parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarvesterParams {
    /// Fill factor, (0, 1].
    pub fill_factor: f64,
    /// Photodetector responsivity, A/W.
    pub responsivity: f64,
    /// Dark saturation current, A.
    pub dark_current: f64,
    /// Thermal voltage kT/q, V.
    pub thermal_voltage: f64,
}

impl HarvesterParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.fill_factor > 0.0 && self.fill_factor <= 1.0) {
            return Err(Error::domain("fill_factor", self.fill_factor, "in (0, 1]"));
        }
        for (name, v) in [
            ("responsivity", self.responsivity),
            ("dark_current", self.dark_current),
            ("thermal_voltage", self.thermal_voltage),
        ] {
            if !(v > 0.0) {
                return Err(Error::domain(name, v, "> 0"));
            }
        }
        Ok(())
    }
}

/// Lambertian mode number `m = -ln 2 / ln(cos(semi_angle))`.
pub fn lambertian_order(semi_angle_half_power: f64) -> Result<f64> {
    if !(semi_angle_half_power > 0.0 && semi_angle_half_power < FRAC_PI_2) {
        return Err(Error::domain(
            "semi_angle_half_power",
            semi_angle_half_power,
            "in (0, pi/2)",
        ));
    }
    Ok(lambertian_order_unchecked(semi_angle_half_power))
}

fn lambertian_order_unchecked(semi_angle: f64) -> f64 {
    -LN_2 / semi_angle.cos().ln()
}

/// Non-imaging concentrator gain `n² / sin²(fov)` inside the field of view,
/// zero outside.
pub fn concentrator_gain(link: &OpticalLink) -> f64 {
    if link.incidence_angle > link.fov {
        return 0.0;
    }
    let s = link.fov.sin();
    link.concentrator_index * link.concentrator_index / (s * s)
}

/// DC gain of the LOS path:
/// `A (m+1) / (2π d²) · cos^m(φ) · T_s · g(ψ) · cos(ψ)`.
pub fn channel_gain(link: &OpticalLink) -> f64 {
    let g = concentrator_gain(link);
    let cos_inc = link.incidence_angle.cos();
    if g == 0.0 || cos_inc <= 0.0 {
        return 0.0;
    }
    let m = lambertian_order_unchecked(link.semi_angle_half_power);
    let cos_irr = link.irradiation_angle.cos().max(0.0);
    link.active_area * (m + 1.0) / (2.0 * PI * link.distance * link.distance)
        * cos_irr.powf(m)
        * link.filter_gain
        * g
        * cos_inc
}

/// Harvested electrical power for a known channel gain.
///
/// `EH = f · I_G · V_t · ln(1 + I_G / I_d)` with `I_G = ν P h`.
pub fn harvested_power_from_gain(gain: f64, hp: &HarvesterParams, transmit_power: f64) -> f64 {
    let current = hp.responsivity * transmit_power * gain;
    hp.fill_factor * current * hp.thermal_voltage * (current / hp.dark_current).ln_1p()
}

/// Maximum power the panel draws from `transmit_power` watts over `link`.
pub fn harvested_power(link: &OpticalLink, hp: &HarvesterParams, transmit_power: f64) -> f64 {
    harvested_power_from_gain(channel_gain(link), hp, transmit_power)
}

/// Energy harvested from both bands over one frame, J.
pub fn total_harvested_energy(
    vl: &OpticalLink,
    irl: &OpticalLink,
    hp: &HarvesterParams,
    p_vl: f64,
    p_irl: f64,
    frame: f64,
) -> f64 {
    frame * (harvested_power(vl, hp, p_vl) + harvested_power(irl, hp, p_irl))
}
