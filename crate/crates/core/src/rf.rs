//! RF uplink: Rician channel draws, MMSE-type receive beamforming, rate and
//! transmit power.

use std::f64::consts::{LN_2, PI};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type ChannelVector = DVector<C64>;

/// One realization of every device-to-AP channel plus receiver noise.
#[derive(Debug, Clone, PartialEq)]
pub struct UplinkChannelSet {
    channels: Vec<ChannelVector>,
    noise_variance: f64,
    bandwidth: f64,
}

impl UplinkChannelSet {
    pub fn new(channels: Vec<ChannelVector>, noise_variance: f64, bandwidth: f64) -> Result<Self> {
        let antennas = channels.first().map(|g| g.len()).unwrap_or(0);
        if antennas == 0 {
            return Err(Error::domain(
                "antennas",
                0.0,
                ">= 1 and at least one device",
            ));
        }
        if let Some(g) = channels.iter().find(|g| g.len() != antennas) {
            return Err(Error::domain(
                "channel length",
                g.len() as f64,
                "equal for every device",
            ));
        }
        if !(noise_variance > 0.0) {
            return Err(Error::domain("noise_variance", noise_variance, "> 0"));
        }
        if !(bandwidth > 0.0) {
            return Err(Error::domain("bandwidth", bandwidth, "> 0"));
        }
        Ok(Self {
            channels,
            noise_variance,
            bandwidth,
        })
    }

    pub fn channels(&self) -> &[ChannelVector] {
        &self.channels
    }

    pub fn channel(&self, device: usize) -> &ChannelVector {
        &self.channels[device]
    }

    pub fn devices(&self) -> usize {
        self.channels.len()
    }

    pub fn antennas(&self) -> usize {
        self.channels[0].len()
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// Interference-plus-noise covariance seen by `device`:
    /// `Σ_{j'≠j} g_j' g_j'^H + σ² I`.
    pub fn interference_covariance(&self, device: usize) -> DMatrix<C64> {
        let m = self.antennas();
        let mut cov = DMatrix::<C64>::identity(m, m) * C64::new(self.noise_variance, 0.0);
        for (j, g) in self.channels.iter().enumerate() {
            if j != device {
                cov += g * g.adjoint();
            }
        }
        cov
    }
}

/// Unit-norm receive combiner and the SINR it achieves per watt of uplink
/// power.
#[derive(Debug, Clone, PartialEq)]
pub struct Beamformer {
    pub weights: ChannelVector,
    pub sinr_coefficient: f64,
}

impl Beamformer {
    /// A beamformer with a prescribed SINR coefficient, for single-antenna
    /// or analytical setups.
    pub fn scalar(sinr_coefficient: f64) -> Self {
        Self {
            weights: DVector::from_element(1, C64::new(1.0, 0.0)),
            sinr_coefficient,
        }
    }

    pub fn norm_squared(&self) -> f64 {
        self.weights.norm_squared()
    }
}

/// Deterministic line-of-sight steering vector of the AP array.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum LosSteering {
    /// All-ones phase vector.
    #[default]
    Broadside,
    /// Half-wavelength uniform linear array steered to `angle` rad off
    /// broadside.
    Ula { angle: f64 },
}

impl LosSteering {
    pub fn vector(&self, antennas: usize) -> ChannelVector {
        match *self {
            LosSteering::Broadside => DVector::from_element(antennas, C64::new(1.0, 0.0)),
            LosSteering::Ula { angle } => DVector::from_fn(antennas, |k, _| {
                C64::from_polar(1.0, PI * k as f64 * angle.sin())
            }),
        }
    }
}

/// Large-scale and Rician fading statistics of the uplink.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicianModel {
    /// LOS-to-scatter power ratio, dB. `+inf` gives a pure LOS channel.
    pub rician_factor_db: f64,
    pub pathloss_exponent: f64,
    /// Linear power gain at 1 m.
    pub reference_gain: f64,
    pub los: LosSteering,
}

impl RicianModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.pathloss_exponent > 0.0) {
            return Err(Error::domain(
                "pathloss_exponent",
                self.pathloss_exponent,
                "> 0",
            ));
        }
        if !(self.reference_gain > 0.0) {
            return Err(Error::domain("reference_gain", self.reference_gain, "> 0"));
        }
        if self.rician_factor_db.is_nan() {
            return Err(Error::domain("rician_factor_db", f64::NAN, "a number"));
        }
        Ok(())
    }

    /// Mean power gain at `distance` metres.
    pub fn pathloss(&self, distance: f64) -> f64 {
        self.reference_gain * distance.powf(-self.pathloss_exponent)
    }

    /// Amplitude weights `(√(K/(K+1)), √(1/(K+1)))` of the LOS and scattered parts.
    pub fn component_weights(&self) -> (f64, f64) {
        let k = 10f64.powf(self.rician_factor_db / 10.0);
        ((1.0 / (1.0 + 1.0 / k)).sqrt(), (1.0 / (k + 1.0)).sqrt())
    }
}

/// Generator for realization `stream` of a run seeded with `seed`.
/// Streams are independent, so realizations can be drawn in any order.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws one channel vector per distance:
/// `√pathloss(d) · (w_los · a + w_scatter · CN(0, I))`.
pub fn draw_channels<R: Rng + ?Sized>(
    model: &RicianModel,
    distances: &[f64],
    antennas: usize,
    rng: &mut R,
) -> Vec<ChannelVector> {
    let (w_los, w_scatter) = model.component_weights();
    let los = model.los.vector(antennas);
    distances
        .iter()
        .map(|&d| {
            let amp = model.pathloss(d).sqrt();
            DVector::from_fn(antennas, |k, _| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                let scatter = C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2;
                (los[k] * w_los + scatter * w_scatter) * amp
            })
        })
        .collect()
}

/// `|g^H w|² / (w^H B w)`.
pub fn rayleigh_quotient(g: &ChannelVector, cov: &DMatrix<C64>, w: &ChannelVector) -> f64 {
    let num = g.dotc(w).norm_sqr();
    let den = w.dotc(&(cov * w)).re;
    num / den
}

/// SINR-maximizing unit-norm combiner for `device`.
///
/// The numerator matrix `g g^H` has rank one, so the dominant generalized
/// eigenvector is `B⁻¹ g` and the maximum is `g^H B⁻¹ g`.
pub fn optimal_beamformer(channels: &UplinkChannelSet, device: usize) -> Result<Beamformer> {
    if device >= channels.devices() {
        return Err(Error::domain(
            "device",
            device as f64,
            "a valid device index",
        ));
    }
    let g = channels.channel(device);
    let cov = channels.interference_covariance(device);
    let chol = cov.clone().cholesky().ok_or_else(|| {
        Error::Numerical("interference covariance is not positive definite".into())
    })?;
    let x = chol.solve(g);
    let norm = x.norm();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::Numerical(format!(
            "beamformer solve returned norm {norm} for device {device}"
        )));
    }
    let weights = x.unscale(norm);
    let sinr_coefficient = rayleigh_quotient(g, &cov, &weights);
    if !(sinr_coefficient > 0.0 && sinr_coefficient.is_finite()) {
        return Err(Error::Numerical(format!(
            "SINR coefficient {sinr_coefficient} for device {device}"
        )));
    }
    Ok(Beamformer {
        weights,
        sinr_coefficient,
    })
}

/// Bits delivered in `t_trans` seconds: `T B log₂(1 + Γ P)`.
pub fn uplink_rate(bf: &Beamformer, tx_power: f64, t_trans: f64, bandwidth: f64) -> f64 {
    t_trans * bandwidth * (bf.sinr_coefficient * tx_power).ln_1p() / LN_2
}

/// Smallest uplink power delivering `rate_threshold` bits in `t_trans`:
/// `(2^{θ/(T B)} - 1) / Γ`.
pub fn required_uplink_power(
    bf: &Beamformer,
    rate_threshold: f64,
    t_trans: f64,
    bandwidth: f64,
) -> f64 {
    (rate_threshold / (t_trans * bandwidth) * LN_2).exp_m1() / bf.sinr_coefficient
}

pub fn transmission_energy(t_trans: f64, tx_power: f64) -> f64 {
    t_trans * tx_power
}
