//! Brute-force verifiers for the solver.
//!
//! Nothing here calls the golden-section or bisection routines; the grids
//! evaluate the energy model directly so they can certify the searches.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::compute;
use crate::error::{Error, Result};
use crate::rf::{self, Beamformer, ChannelVector, UplinkChannelSet, C64};
use crate::solver::{DeviceProblem, DeviceSolution};

/// Points per axis of a uniform grid (endpoints included).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    points_per_axis: usize,
}

impl GridSpec {
    /// Default 1-D grid for the transmission-time oracle.
    pub const LINE: GridSpec = GridSpec {
        points_per_axis: 100_000,
    };
    /// Default per-axis size for the joint (time, power) oracle.
    pub const JOINT: GridSpec = GridSpec {
        points_per_axis: 300,
    };

    pub fn new(points_per_axis: usize) -> Result<Self> {
        if points_per_axis < 2 {
            return Err(Error::domain(
                "points_per_axis",
                points_per_axis as f64,
                ">= 2",
            ));
        }
        Ok(Self { points_per_axis })
    }

    pub fn points(&self) -> usize {
        self.points_per_axis
    }

    pub fn step(&self, lo: f64, hi: f64) -> f64 {
        (hi - lo) / (self.points_per_axis - 1) as f64
    }

    /// The `i`-th grid point; the last one is exactly `hi`.
    pub fn point(&self, lo: f64, hi: f64, i: usize) -> f64 {
        if i + 1 == self.points_per_axis {
            hi
        } else {
            lo + self.step(lo, hi) * i as f64
        }
    }
}

/// Grid argmin and minimum of `f` on `[lo, hi]`. Ties keep the first point.
pub fn grid_minimize<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    grid: GridSpec,
) -> (f64, f64) {
    let mut best = (lo, f(lo));
    for i in 1..grid.points() {
        let x = grid.point(lo, hi, i);
        let v = f(x);
        if v < best.1 {
            best = (x, v);
        }
    }
    best
}

/// Energy demand evaluated from the component models.
fn demand(dp: &DeviceProblem, t_trans: f64) -> f64 {
    let t_comp = (dp.frame - t_trans) / dp.compute.iterations();
    let p_u = rf::required_uplink_power(&dp.beamformer, dp.rate_threshold, t_trans, dp.bandwidth);
    compute::computation_energy(&dp.compute, t_comp) + rf::transmission_energy(t_trans, p_u)
}

/// Grid minimum of the energy demand over the transmission-time window.
pub fn grid_min_psi(dp: &DeviceProblem, grid: GridSpec) -> Result<(f64, f64)> {
    let w = dp.window()?;
    Ok(grid_minimize(|t| demand(dp, t), w.lower, w.upper, grid))
}

/// Smallest grid IRL power in `[0, budget]` for which some grid
/// transmission time meets the rate, energy, time and CPU constraints.
/// `Ok(None)` marks a grid on which nothing is feasible.
pub fn joint_feasible_min_power(dp: &DeviceProblem, grid: GridSpec) -> Result<Option<f64>> {
    let w = match dp.window() {
        Ok(w) => w,
        Err(Error::Infeasible(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let times: Vec<f64> = (0..grid.points())
        .map(|i| grid.point(w.lower, w.upper, i))
        .collect();
    for i in 0..grid.points() {
        let p_irl = grid.point(0.0, dp.power_budget, i);
        let harvested = dp.harvested_energy(p_irl);
        let feasible = times.iter().any(|&t| {
            let f_cpu = compute::cpu_frequency(&dp.compute, t, dp.frame);
            f_cpu >= dp.compute.f_min * (1.0 - 1e-12)
                && f_cpu <= dp.compute.f_max * (1.0 + 1e-12)
                && demand(dp, t) <= harvested
        });
        if feasible {
            return Ok(Some(p_irl));
        }
    }
    Ok(None)
}

/// Best Rayleigh quotient among `probes` random unit vectors.
pub fn best_random_probe<R: Rng + ?Sized>(
    channels: &UplinkChannelSet,
    device: usize,
    probes: usize,
    rng: &mut R,
) -> f64 {
    let g = channels.channel(device);
    let cov = channels.interference_covariance(device);
    let m = channels.antennas();
    (0..probes)
        .map(|_| {
            let v: ChannelVector = DVector::from_fn(m, |_, _| {
                C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            let v = v.unscale(v.norm());
            rf::rayleigh_quotient(g, &cov, &v)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Cosine of the principal angle between two complex vectors.
pub fn alignment(a: &ChannelVector, b: &ChannelVector) -> f64 {
    a.dotc(b).norm() / (a.norm() * b.norm())
}

/// Second central difference of `f` at `x`.
pub fn central_second_difference<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
}

/// Outcome of checking one solved device against both grids.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub grid_argmin: f64,
    pub grid_min: f64,
    /// `(Ψ(T*) - grid min) / grid min`; should be <= 0 up to rounding.
    pub psi_excess: f64,
    /// Grid power minus solver power; must be >= `-power_step`.
    pub power_gap: Option<f64>,
    pub power_step: f64,
    pub time_step: f64,
}

impl Certificate {
    pub fn discrepancies(&self, solution: &DeviceSolution, time_tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        if self.psi_excess > 1e-9 {
            out.push(format!(
                "energy demand {} exceeds grid minimum {} (relative {:e})",
                solution.energy_required, self.grid_min, self.psi_excess
            ));
        }
        if (solution.t_trans - self.grid_argmin).abs() > self.time_step.max(time_tol) + time_tol {
            out.push(format!(
                "transmission time {} differs from grid argmin {}",
                solution.t_trans, self.grid_argmin
            ));
        }
        match self.power_gap {
            Some(gap) if gap < -self.power_step => out.push(format!(
                "joint grid found IRL power {} W below the solver's {} W",
                solution.p_irl + gap,
                solution.p_irl
            )),
            None => out.push("joint grid found no feasible point for a solved device".into()),
            _ => {}
        }
        out
    }
}

/// Runs both grid oracles on a solved device.
pub fn certify(
    dp: &DeviceProblem,
    solution: &DeviceSolution,
    line: GridSpec,
    joint: GridSpec,
) -> Result<Certificate> {
    let w = dp.window()?;
    let (grid_argmin, grid_min) = grid_min_psi(dp, line)?;
    let joint_power = joint_feasible_min_power(dp, joint)?;
    Ok(Certificate {
        grid_argmin,
        grid_min,
        psi_excess: (solution.energy_required - grid_min) / grid_min,
        power_gap: joint_power.map(|p| p - solution.p_irl),
        power_step: joint.step(0.0, dp.power_budget),
        time_step: line.step(w.lower, w.upper),
    })
}

/// Beamformer obtained by whitening with the Cholesky factor and taking the
/// dominant eigenvector of the whitened rank-one matrix.
pub fn eigen_beamformer(channels: &UplinkChannelSet, device: usize) -> Result<Beamformer> {
    let g = channels.channel(device);
    let cov = channels.interference_covariance(device);
    let chol = cov
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Numerical("covariance not positive definite".into()))?;
    let l = chol.l();
    let whitened = l
        .solve_lower_triangular(g)
        .ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))?;
    let c = &whitened * whitened.adjoint();
    let eig = c.symmetric_eigen();
    let (idx, _) =
        eig.eigenvalues
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &v)| {
                if v > best.1 {
                    (i, v)
                } else {
                    best
                }
            });
    let v = eig.eigenvectors.column(idx).into_owned();
    let w = l
        .adjoint()
        .solve_upper_triangular(&v)
        .ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))?;
    let w = w.unscale(w.norm());
    let sinr_coefficient = rf::rayleigh_quotient(g, &cov, &w);
    Ok(Beamformer {
        weights: w,
        sinr_coefficient,
    })
}
