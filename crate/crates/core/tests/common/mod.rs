#![allow(dead_code)]

use lightfl::harness::ScenarioConfig;
use lightfl::optics::OpticalLink;
use lightfl::rf::{optimal_beamformer, seeded_rng};
use lightfl::solver::DeviceProblem;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(stream: u64) -> ChaCha8Rng {
    seeded_rng(0x5EED_0F11, stream)
}

fn jitter<R: Rng>(rng: &mut R, x: f64) -> f64 {
    x * rng.random_range(0.5..=1.5)
}

/// A device problem from the default scenario with every scalar parameter
/// scaled by an independent factor in [0.5, 1.5]. Draws that leave an
/// empty transmission window are rejected and redrawn.
pub fn random_problem<R: Rng>(rng: &mut R) -> DeviceProblem {
    let cfg = ScenarioConfig::default_scenario();
    loop {
        let j = rng.random_range(0..cfg.devices.len());
        let channels = cfg.draw_channels(rng.random()).unwrap();
        let mut dp = cfg
            .device_problem(j, optimal_beamformer(&channels, j).unwrap())
            .unwrap();

        let c = &mut dp.compute;
        c.capacitance_coeff = jitter(rng, c.capacitance_coeff);
        c.cycles_per_sample = jitter(rng, c.cycles_per_sample);
        c.dataset_size = jitter(rng, c.dataset_size);
        c.f_min = jitter(rng, c.f_min);
        c.f_max = jitter(rng, c.f_max);
        dp.beamformer.sinr_coefficient = jitter(rng, dp.beamformer.sinr_coefficient);
        dp.rate_threshold = jitter(rng, dp.rate_threshold);
        dp.bandwidth = jitter(rng, dp.bandwidth);
        dp.frame = jitter(rng, dp.frame);
        dp.power_budget = jitter(rng, dp.power_budget);
        dp.p_vl = jitter(rng, dp.p_vl);

        let height = jitter(rng, cfg.optical.transmitter_height);
        let distance = jitter(rng, cfg.devices[j].distance_to_optical).max(height);
        let mut irl = cfg.optical.irl;
        irl.semi_angle_half_power = jitter(rng, irl.semi_angle_half_power).min(1.5);
        let (Ok(vl_link), Ok(irl_link)) = (
            OpticalLink::from_height(&cfg.optical.vl, height, distance),
            OpticalLink::from_height(&irl, height, distance),
        ) else {
            continue;
        };
        dp.vl_link = vl_link;
        dp.irl_link = irl_link;

        if dp.validate().is_ok() && dp.window().is_ok() {
            return dp;
        }
    }
}
