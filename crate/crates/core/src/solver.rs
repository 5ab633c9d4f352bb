//! Exact per-device solution of the IRL power minimization.
//!
//! Devices are decoupled once their receive beamformers are fixed, and each
//! device problem splits into two one-dimensional searches:
//!
//! 1. minimize the energy demand `Ψ(T)` over the transmission-time window
//!    (convex, golden-section search);
//! 2. find the smallest IRL power whose harvested energy covers `min Ψ`
//!    (harvesting is increasing in power, bisection).
//!
//! Because the harvested energy grows with IRL power, the smallest power is
//! reached exactly when the demand is smallest, so the split loses nothing.

use std::f64::consts::LN_2;

use crate::compute::{self, ComputeParams};
use crate::error::{Error, Infeasibility, Result};
use crate::optics::{self, HarvesterParams, OpticalLink};
use crate::rf::{self, Beamformer};

/// `(3 - √5) / 2`: golden-section interior point ratio.
pub const GOLDEN_RHO: f64 = 0.381_966_011_250_105_1;

/// Normalized slack below which a constraint counts as violated.
pub const AUDIT_TOLERANCE: f64 = 1e-8;

/// One device's share of the joint problem, with the beamformer already
/// chosen.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceProblem {
    pub compute: ComputeParams,
    pub beamformer: Beamformer,
    /// Bits to deliver in the frame, `θ`.
    pub rate_threshold: f64,
    /// Uplink bandwidth, Hz.
    pub bandwidth: f64,
    /// Frame duration `τ`, s.
    pub frame: f64,
    /// IRL transmit power budget, W.
    pub power_budget: f64,
    pub vl_link: OpticalLink,
    pub irl_link: OpticalLink,
    pub harvester: HarvesterParams,
    /// Fixed VL transmit power, W.
    pub p_vl: f64,
}

/// Admissible transmission times `[τ - cDK/f_min, τ - cDK/f_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionWindow {
    pub lower: f64,
    pub upper: f64,
}

impl TransmissionWindow {
    pub fn contains(&self, t: f64) -> bool {
        t >= self.lower && t <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

impl DeviceProblem {
    pub fn validate(&self) -> Result<()> {
        self.compute.validate()?;
        self.vl_link.validate()?;
        self.irl_link.validate()?;
        self.harvester.validate()?;
        if !(self.frame > 0.0 && self.frame.is_finite()) {
            return Err(Error::domain("frame", self.frame, "finite and > 0"));
        }
        if !(self.power_budget > 0.0) {
            return Err(Error::domain("power_budget", self.power_budget, "> 0"));
        }
        if !(self.rate_threshold >= 0.0 && self.rate_threshold.is_finite()) {
            return Err(Error::domain("rate_threshold", self.rate_threshold, ">= 0"));
        }
        if !(self.bandwidth > 0.0) {
            return Err(Error::domain("bandwidth", self.bandwidth, "> 0"));
        }
        if !(self.beamformer.sinr_coefficient > 0.0) {
            return Err(Error::domain(
                "sinr_coefficient",
                self.beamformer.sinr_coefficient,
                "> 0",
            ));
        }
        if !(self.p_vl >= 0.0) {
            return Err(Error::domain("p_vl", self.p_vl, ">= 0"));
        }
        Ok(())
    }

    pub fn window(&self) -> Result<TransmissionWindow> {
        let work = self.compute.cycles() * self.compute.iterations();
        let lower = self.frame - work / self.compute.f_min;
        let upper = self.frame - work / self.compute.f_max;
        if !(lower > 0.0) {
            return Err(Error::Infeasible(Infeasibility::ComputeOverrunsFrame {
                lower_bound: lower,
            }));
        }
        if !(lower <= upper) {
            return Err(Error::Infeasible(Infeasibility::EmptyWindow {
                lower,
                upper,
            }));
        }
        Ok(TransmissionWindow { lower, upper })
    }

    /// VL harvested power, W.
    pub fn vl_harvest(&self) -> f64 {
        optics::harvested_power(&self.vl_link, &self.harvester, self.p_vl)
    }

    /// IRL harvested power at `p_irl`, W.
    pub fn irl_harvest(&self, p_irl: f64) -> f64 {
        optics::harvested_power(&self.irl_link, &self.harvester, p_irl)
    }

    /// Energy harvested over the frame at IRL power `p_irl`, J.
    pub fn harvested_energy(&self, p_irl: f64) -> f64 {
        optics::total_harvested_energy(
            &self.vl_link,
            &self.irl_link,
            &self.harvester,
            self.p_vl,
            p_irl,
            self.frame,
        )
    }

    fn transmit_energy_at(&self, t_trans: f64) -> f64 {
        let p_u = rf::required_uplink_power(
            &self.beamformer,
            self.rate_threshold,
            t_trans,
            self.bandwidth,
        );
        rf::transmission_energy(t_trans, p_u)
    }

    fn psi_unchecked(&self, t_trans: f64) -> f64 {
        compute::compute_energy_unchecked(&self.compute, t_trans, self.frame)
            + self.transmit_energy_at(t_trans)
    }
}

/// Per-iteration absolute tolerances are derived from these relative ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Golden-section width, as a fraction of the frame.
    pub time_rel: f64,
    /// Bisection width, as a fraction of the IRL power budget.
    pub power_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            time_rel: 1e-8,
            power_rel: 1e-14,
        }
    }
}

impl Tolerances {
    pub fn time(&self, dp: &DeviceProblem) -> f64 {
        self.time_rel * dp.frame
    }

    pub fn power(&self, dp: &DeviceProblem) -> f64 {
        self.power_rel * dp.power_budget
    }
}

/// Energy demand of the frame when transmitting for `t_trans` seconds:
/// compute energy plus the energy of the rate-meeting uplink power.
pub fn psi(dp: &DeviceProblem, t_trans: f64) -> Result<f64> {
    let w = dp.window()?;
    if !w.contains(t_trans) {
        return Err(Error::domain(
            "t_trans",
            t_trans,
            "inside the transmission window",
        ));
    }
    Ok(dp.psi_unchecked(t_trans))
}

/// `Ψ''(T) = 3α(cD)³K²/(τ-T)⁴ + (θ ln2 / B)² 2^{θ/(TB)} / (T³ Γ)`.
pub fn psi_second_derivative(dp: &DeviceProblem, t_trans: f64) -> Result<f64> {
    let w = dp.window()?;
    if !w.contains(t_trans) {
        return Err(Error::domain(
            "t_trans",
            t_trans,
            "inside the transmission window",
        ));
    }
    let cd = dp.compute.cycles();
    let k = dp.compute.iterations();
    let slack = dp.frame - t_trans;
    let compute = 3.0 * dp.compute.capacitance_coeff * cd * cd * cd * k * k / slack.powi(4);
    let a = dp.rate_threshold * LN_2 / dp.bandwidth;
    let transmit = a * a * (a / t_trans).exp()
        / (t_trans * t_trans * t_trans * dp.beamformer.sinr_coefficient);
    Ok(compute + transmit)
}

/// Minimizer returned by the one-dimensional searches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub argmin: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Golden-section search state. Each [`step`](Self::step) keeps
/// `[a_n, b_{n+1}]` when `f(a_{n+1}) <= f(b_{n+1})`, else `[a_{n+1}, b_n]`,
/// and costs one function evaluation.
pub struct GoldenSection<F> {
    f: F,
    a: f64,
    b: f64,
    x1: f64,
    x2: f64,
    f1: f64,
    f2: f64,
    iterations: usize,
}

impl<F: FnMut(f64) -> f64> GoldenSection<F> {
    pub fn new(mut f: F, lo: f64, hi: f64) -> Self {
        let x1 = lo + GOLDEN_RHO * (hi - lo);
        let x2 = lo + (1.0 - GOLDEN_RHO) * (hi - lo);
        let f1 = f(x1);
        let f2 = f(x2);
        Self {
            f,
            a: lo,
            b: hi,
            x1,
            x2,
            f1,
            f2,
            iterations: 0,
        }
    }

    pub fn bracket(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn step(&mut self) {
        if self.f1 <= self.f2 {
            self.b = self.x2;
            self.x2 = self.x1;
            self.f2 = self.f1;
            self.x1 = self.a + GOLDEN_RHO * (self.b - self.a);
            self.f1 = (self.f)(self.x1);
        } else {
            self.a = self.x1;
            self.x1 = self.x2;
            self.f1 = self.f2;
            self.x2 = self.a + (1.0 - GOLDEN_RHO) * (self.b - self.a);
            self.f2 = (self.f)(self.x2);
        }
        self.iterations += 1;
    }

    /// Interior points currently held, with their values.
    pub fn probes(&self) -> [(f64, f64); 2] {
        [(self.x1, self.f1), (self.x2, self.f2)]
    }

    pub fn eval(&mut self, x: f64) -> f64 {
        (self.f)(x)
    }
}

/// Minimizes a unimodal `f` on `[lo, hi]` until the bracket is narrower than
/// `tol`. The endpoints are candidates too, so a boundary minimum is
/// returned exactly. Ties go to the smallest argument.
pub fn golden_section_minimize<F: FnMut(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Minimum {
    let mut gs = GoldenSection::new(f, lo, hi);
    while gs.width() >= tol && gs.iterations() < 10_000 {
        gs.step();
    }
    let (a, b) = gs.bracket();
    let mut candidates = vec![
        (lo, gs.eval(lo)),
        (hi, gs.eval(hi)),
        (a, gs.eval(a)),
        (b, gs.eval(b)),
    ];
    candidates.extend(gs.probes());
    candidates.sort_by(|x, y| x.0.total_cmp(&y.0));
    let best = candidates
        .iter()
        .copied()
        .filter(|c| !c.1.is_nan())
        .reduce(|best, c| if c.1 < best.1 { c } else { best })
        .unwrap_or((lo, f64::NAN));
    Minimum {
        argmin: best.0,
        value: best.1,
        iterations: gs.iterations(),
    }
}

/// Smallest `x` in `[lo, hi]` (to within `tol`) with `f(x) >= target`, for
/// nondecreasing `f` with `f(hi) >= target`. The returned point always
/// satisfies the inequality; `x - tol` never does.
pub fn bisect_threshold<F: FnMut(f64) -> f64>(
    mut f: F,
    target: f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> f64 {
    if f(lo) >= target {
        return lo;
    }
    let mut guard = 0;
    while hi - lo > tol && guard < 2_000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
        guard += 1;
    }
    hi
}

/// Optimal transmission time: the minimizer of [`psi`] over the window.
pub fn solve_transmission_time(dp: &DeviceProblem, tol: f64) -> Result<f64> {
    minimize_psi(dp, tol).map(|m| m.argmin)
}

pub fn minimize_psi(dp: &DeviceProblem, tol: f64) -> Result<Minimum> {
    if !(tol > 0.0) {
        return Err(Error::domain("tol", tol, "> 0"));
    }
    let w = dp.window()?;
    if w.width() == 0.0 {
        return Ok(Minimum {
            argmin: w.lower,
            value: dp.psi_unchecked(w.lower),
            iterations: 0,
        });
    }
    Ok(golden_section_minimize(
        |t| dp.psi_unchecked(t),
        w.lower,
        w.upper,
        tol,
    ))
}

/// Smallest IRL power in `[0, budget]` whose harvest over the frame covers
/// `energy_required`. Returns 0 when VL alone suffices.
pub fn solve_irl_power(dp: &DeviceProblem, energy_required: f64, tol: f64) -> Result<f64> {
    if !(energy_required > 0.0) {
        return Err(Error::domain("energy_required", energy_required, "> 0"));
    }
    if !(tol > 0.0) {
        return Err(Error::domain("tol", tol, "> 0"));
    }
    let residual = energy_required / dp.frame - dp.vl_harvest();
    if residual <= 0.0 {
        return Ok(0.0);
    }
    let ceiling = dp.irl_harvest(dp.power_budget);
    if ceiling < residual {
        return Err(Error::Infeasible(Infeasibility::EnergyDeficit {
            deficit: dp.frame * (residual - ceiling),
        }));
    }
    Ok(bisect_threshold(
        |p| dp.irl_harvest(p),
        residual,
        0.0,
        dp.power_budget,
        tol,
    ))
}

/// Normalized slack of every constraint; negative means violated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintReport {
    /// `(R_U - θ) / θ`.
    pub rate: f64,
    /// `(EH - E_comp - E_trans) / (E_comp + E_trans)`.
    pub energy: f64,
    /// `P_1 / budget`.
    pub irl_power_floor: f64,
    /// `(budget - P_1) / budget`.
    pub irl_power_budget: f64,
    /// `-|K T_comp + T_trans - τ| / τ`.
    pub time_budget: f64,
    /// `(f - f_min) / f_min`.
    pub cpu_floor: f64,
    /// `(f_max - f) / f_max`.
    pub cpu_ceiling: f64,
    /// `-| ‖w‖² - 1 |`.
    pub beam_norm: f64,
}

impl ConstraintReport {
    pub fn entries(&self) -> [(&'static str, f64); 8] {
        [
            ("rate", self.rate),
            ("energy", self.energy),
            ("irl_power_floor", self.irl_power_floor),
            ("irl_power_budget", self.irl_power_budget),
            ("time_budget", self.time_budget),
            ("cpu_floor", self.cpu_floor),
            ("cpu_ceiling", self.cpu_ceiling),
            ("beam_norm", self.beam_norm),
        ]
    }

    pub fn min_slack(&self) -> f64 {
        self.entries()
            .iter()
            .map(|e| e.1)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn satisfied(&self, tol: f64) -> bool {
        self.entries().iter().all(|e| e.1 >= -tol)
    }

    pub fn violations(&self, tol: f64) -> Vec<&'static str> {
        self.entries()
            .iter()
            .filter(|e| !(e.1 >= -tol))
            .map(|e| e.0)
            .collect()
    }
}

/// Replays every constraint for a candidate operating point.
pub fn audit(
    dp: &DeviceProblem,
    t_trans: f64,
    t_comp: f64,
    f_cpu: f64,
    p_uplink: f64,
    p_irl: f64,
) -> ConstraintReport {
    let rate = rf::uplink_rate(&dp.beamformer, p_uplink, t_trans, dp.bandwidth);
    let rate_slack = if dp.rate_threshold > 0.0 {
        (rate - dp.rate_threshold) / dp.rate_threshold
    } else {
        rate
    };
    let spent = compute::computation_energy(&dp.compute, t_comp)
        + rf::transmission_energy(t_trans, p_uplink);
    let harvested = dp.harvested_energy(p_irl);
    ConstraintReport {
        rate: rate_slack,
        energy: (harvested - spent) / spent,
        irl_power_floor: p_irl / dp.power_budget,
        irl_power_budget: (dp.power_budget - p_irl) / dp.power_budget,
        time_budget: -(dp.compute.iterations() * t_comp + t_trans - dp.frame).abs() / dp.frame,
        cpu_floor: (f_cpu - dp.compute.f_min) / dp.compute.f_min,
        cpu_ceiling: (dp.compute.f_max - f_cpu) / dp.compute.f_max,
        beam_norm: -(dp.beamformer.norm_squared() - 1.0).abs(),
    }
}

/// Optimal operating point of one device.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceSolution {
    pub t_trans: f64,
    /// Time per local iteration.
    pub t_comp: f64,
    pub f_cpu: f64,
    pub p_uplink: f64,
    pub p_irl: f64,
    /// Minimum frame energy demand `min Ψ`, J.
    pub energy_required: f64,
    /// Whether the audit passed at [`AUDIT_TOLERANCE`].
    pub feasible: bool,
    pub constraints: ConstraintReport,
}

impl DeviceSolution {
    pub fn trans_to_comp_ratio(&self) -> f64 {
        self.t_trans / self.t_comp
    }
}

/// Solves one device: golden-section over the transmission time, then
/// bisection over the IRL power, then a full constraint audit.
pub fn solve_device(dp: &DeviceProblem, tols: &Tolerances) -> Result<DeviceSolution> {
    dp.validate()?;
    let best = minimize_psi(dp, tols.time(dp))?;
    let t_trans = best.argmin;
    let energy_required = best.value;
    let p_irl = solve_irl_power(dp, energy_required, tols.power(dp))?;
    let f_cpu = compute::cpu_frequency(&dp.compute, t_trans, dp.frame);
    let t_comp = (dp.frame - t_trans) / dp.compute.iterations();
    let p_uplink =
        rf::required_uplink_power(&dp.beamformer, dp.rate_threshold, t_trans, dp.bandwidth);
    let constraints = audit(dp, t_trans, t_comp, f_cpu, p_uplink, p_irl);
    Ok(DeviceSolution {
        t_trans,
        t_comp,
        f_cpu,
        p_uplink,
        p_irl,
        energy_required,
        feasible: constraints.satisfied(AUDIT_TOLERANCE),
        constraints,
    })
}
