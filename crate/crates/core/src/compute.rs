//! On-device FL computation: CPU energy and time per local iteration.

use crate::error::{Error, Result};

/// CPU model of one device.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComputeParams {
    /// Effective switched capacitance `α`; the energy model uses `α/2`.
    pub capacitance_coeff: f64,
    /// CPU cycles per data unit `c`.
    pub cycles_per_sample: f64,
    /// Local data units `D`. Whether a unit is a sample or a bit only changes
    /// the meaning of `cycles_per_sample`.
    pub dataset_size: f64,
    pub f_min: f64,
    pub f_max: f64,
    /// Local iterations per global round, `K`.
    pub local_iterations: u32,
}

impl ComputeParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("capacitance_coeff", self.capacitance_coeff),
            ("cycles_per_sample", self.cycles_per_sample),
            ("dataset_size", self.dataset_size),
            ("f_min", self.f_min),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(name, v, "finite and > 0"));
            }
        }
        if !(self.f_max >= self.f_min && self.f_max.is_finite()) {
            return Err(Error::domain("f_max", self.f_max, ">= f_min"));
        }
        if self.local_iterations == 0 {
            return Err(Error::domain("local_iterations", 0.0, ">= 1"));
        }
        Ok(())
    }

    /// Cycles for one pass over the local data, `cD`.
    pub fn cycles(&self) -> f64 {
        self.cycles_per_sample * self.dataset_size
    }

    pub fn iterations(&self) -> f64 {
        f64::from(self.local_iterations)
    }
}

/// Time for one local iteration at `f_cpu`: `cD / f`.
pub fn computation_time(p: &ComputeParams, f_cpu: f64) -> Result<f64> {
    if !(f_cpu >= p.f_min && f_cpu <= p.f_max) {
        return Err(Error::domain("f_cpu", f_cpu, "in [f_min, f_max]"));
    }
    Ok(p.cycles() / f_cpu)
}

/// Energy of one local iteration at `f_cpu`: `(α/2) cD f²`.
pub fn computation_energy_at_frequency(p: &ComputeParams, f_cpu: f64) -> f64 {
    0.5 * p.capacitance_coeff * p.cycles() * f_cpu * f_cpu
}

/// Energy of one local iteration finished in `t_comp` seconds:
/// `(α/2)(cD)³ / t²`.
pub fn computation_energy(p: &ComputeParams, t_comp: f64) -> f64 {
    let cd = p.cycles();
    0.5 * p.capacitance_coeff * cd * cd * cd / (t_comp * t_comp)
}

/// Compute energy once the transmission time is fixed:
/// `(α/2)(cD)³ K² / (τ - T_trans)²`, i.e. [`computation_energy`] at the
/// per-iteration time `(τ - T_trans) / K`.
pub fn total_compute_energy(p: &ComputeParams, t_trans: f64, frame: f64) -> Result<f64> {
    if !(t_trans > 0.0 && t_trans < frame) {
        return Err(Error::domain("t_trans", t_trans, "in (0, frame)"));
    }
    Ok(compute_energy_unchecked(p, t_trans, frame))
}

pub(crate) fn compute_energy_unchecked(p: &ComputeParams, t_trans: f64, frame: f64) -> f64 {
    let cd = p.cycles();
    let k = p.iterations();
    let slack = frame - t_trans;
    0.5 * p.capacitance_coeff * cd * cd * cd * k * k / (slack * slack)
}

/// CPU frequency implied by spending `frame - t_trans` on `K` iterations.
pub fn cpu_frequency(p: &ComputeParams, t_trans: f64, frame: f64) -> f64 {
    p.cycles() * p.iterations() / (frame - t_trans)
}
