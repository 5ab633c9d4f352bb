//! Lightwave power transfer for federated-learning devices.
//!
//! An optical transmitter charges each device over visible (VL) and infrared
//! (IRL) light. Every device spends the harvested energy on `K` local
//! training iterations and one RF uplink to a multi-antenna access point,
//! all inside a fixed frame. The solver finds the smallest IRL power that
//! keeps every device energy-neutral while meeting its uplink rate.
//!
//! Module map:
//! - [`optics`]: Lambertian LOS gain and solar-panel harvesting.
//! - [`rf`]: Rician uplink channels, receive beamforming, rate and power.
//! - [`compute`]: CPU energy and time for local iterations.
//! - [`solver`]: per-device exact solution (golden-section + bisection).
//! - [`oracle`]: brute-force verifiers for the solver.
//! - [`harness`]: scenario config, Monte-Carlo runs, experiments, CSV.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod compute;
pub mod error;
pub mod harness;
pub mod optics;
pub mod oracle;
pub mod rf;
pub mod solver;

pub use error::{Error, Infeasibility, Result};
