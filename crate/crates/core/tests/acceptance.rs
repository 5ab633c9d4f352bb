//! Acceptance criteria 1-10. Runs as a plain binary (`harness = false`) and
//! prints one PASS/FAIL line per criterion; exits non-zero if any fails.

mod common;

use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::Rng;

use lightfl::harness::experiments::{
    fig2_sweep_name, fig45_sweep_name, ADDITIONAL_IRL_POWER, THETA_SWEEP,
};
use lightfl::harness::monte_carlo::{simulate, TOTAL_IRL_POWER};
use lightfl::harness::{
    experiment_fig2, experiment_fig3, experiment_fig4_fig5, run_monte_carlo, DeviceKey,
    ScenarioConfig,
};
use lightfl::optics::{channel_gain, harvested_power, harvested_power_from_gain, OpticalLink};
use lightfl::oracle::{
    alignment, best_random_probe, central_second_difference, eigen_beamformer, grid_min_psi,
    joint_feasible_min_power, GridSpec,
};
use lightfl::rf::{self, optimal_beamformer, rayleigh_quotient, UplinkChannelSet, C64};
use lightfl::solver::{
    minimize_psi, psi, psi_second_derivative, solve_device, Tolerances, AUDIT_TOLERANCE,
};
use lightfl::Error;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    check(elapsed.as_secs_f64() < limit_s, || {
        format!("took {:.1} s, limit {limit_s} s", elapsed.as_secs_f64())
    })
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = common::rng(1);
    let tols = Tolerances::default();
    let mut worst_excess = f64::NEG_INFINITY;
    let mut interior = 0;
    for case in 0..100 {
        let dp = common::random_problem(&mut rng);
        let w = dp.window().map_err(|e| e.to_string())?;
        let best = minimize_psi(&dp, tols.time(&dp)).map_err(|e| e.to_string())?;
        let (grid_t, grid_min) = grid_min_psi(&dp, GridSpec::LINE).map_err(|e| e.to_string())?;
        let allowed = (1e-8 * dp.frame).max(GridSpec::LINE.step(w.lower, w.upper));
        check((best.argmin - grid_t).abs() <= allowed, || {
            format!(
                "case {case}: T* = {} vs grid {grid_t} (allowed {allowed:e})",
                best.argmin
            )
        })?;
        if best.argmin > w.lower && best.argmin < w.upper {
            interior += 1;
        }
        let excess = (best.value - grid_min) / grid_min;
        worst_excess = worst_excess.max(excess);
        check(excess <= 1e-9, || {
            format!("case {case}: Psi(T*) exceeds grid minimum by {excess:e} relative")
        })?;
    }
    within(start.elapsed(), 30.0)?;
    Ok(format!(
        "100 instances ({interior} interior optima), worst relative excess {worst_excess:.2e}, {:.2} s",
        start.elapsed().as_secs_f64()
    ))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = common::rng(2);
    let tols = Tolerances::default();
    let (mut solved, mut infeasible) = (0, 0);
    for case in 0..50 {
        let mut dp = common::random_problem(&mut rng);
        if case % 5 == 0 {
            // Small budgets make some instances infeasible.
            dp.power_budget = rng.random_range(1.0..100.0);
        }
        let joint = joint_feasible_min_power(&dp, GridSpec::JOINT).map_err(|e| e.to_string())?;
        let step = GridSpec::JOINT.step(0.0, dp.power_budget);
        match solve_device(&dp, &tols) {
            Ok(sol) => {
                solved += 1;
                let p = joint
                    .ok_or_else(|| format!("case {case}: joint grid found nothing feasible"))?;
                check(p >= sol.p_irl - step, || {
                    format!(
                        "case {case}: joint grid P = {p} below solver {} - step {step}",
                        sol.p_irl
                    )
                })?;
            }
            Err(Error::Infeasible(_)) => {
                infeasible += 1;
                check(joint.is_none(), || {
                    format!("case {case}: solver infeasible but joint grid found {joint:?}")
                })?;
            }
            Err(e) => return Err(format!("case {case}: {e}")),
        }
    }
    within(start.elapsed(), 60.0)?;
    Ok(format!(
        "{solved} solved + {infeasible} infeasible instances, {:.2} s",
        start.elapsed().as_secs_f64()
    ))
}

fn criterion_3() -> Outcome {
    let cfg = ScenarioConfig::default_scenario();
    let mut rng = common::rng(3);
    let mut worst_cos = f64::INFINITY;
    for case in 0..200 {
        let g = rf::draw_channels(&cfg.rician, &cfg.ap_distances(), cfg.antennas, &mut rng);
        let set = UplinkChannelSet::new(g, cfg.noise_variance, cfg.bandwidth)
            .map_err(|e| e.to_string())?;
        for j in 0..set.devices() {
            let bf = optimal_beamformer(&set, j).map_err(|e| e.to_string())?;
            let cov = set.interference_covariance(j);
            let best_probe = best_random_probe(&set, j, 1000, &mut rng);
            check(bf.sinr_coefficient > best_probe, || {
                format!(
                    "case {case}, device {j}: {} <= probe {best_probe}",
                    bf.sinr_coefficient
                )
            })?;
            let closed: DMatrix<C64> = cov
                .clone()
                .lu()
                .solve(&DMatrix::from_column_slice(
                    set.antennas(),
                    1,
                    set.channel(j).as_slice(),
                ))
                .ok_or("singular covariance")?;
            let closed = nalgebra::DVector::from_column_slice(closed.as_slice());
            let cos = alignment(&bf.weights, &closed);
            let eig = eigen_beamformer(&set, j).map_err(|e| e.to_string())?;
            let cos_eig = alignment(&bf.weights, &eig.weights);
            worst_cos = worst_cos.min(cos).min(cos_eig);
            check(cos > 1.0 - 1e-9 && cos_eig > 1.0 - 1e-9, || {
                format!("case {case}, device {j}: alignment {cos} (eigen {cos_eig})")
            })?;
            let q = rayleigh_quotient(set.channel(j), &cov, &bf.weights);
            check((q / bf.sinr_coefficient - 1.0).abs() < 1e-9, || {
                format!(
                    "case {case}, device {j}: reported SINR coefficient disagrees with quotient"
                )
            })?;
        }
    }
    Ok(format!(
        "600 beamformers, worst cosine 1 - {:.1e}",
        1.0 - worst_cos
    ))
}

fn criterion_4() -> Outcome {
    let tols = Tolerances::default();
    let mut checked = 0usize;
    let mut interior = 0usize;
    let mut replay = |dp: &lightfl::solver::DeviceProblem, label: &str| -> Result<(), String> {
        let sol = match solve_device(dp, &tols) {
            Ok(s) => s,
            Err(Error::Infeasible(_)) => return Ok(()),
            Err(e) => return Err(format!("{label}: {e}")),
        };
        check(sol.feasible, || {
            format!("{label}: solution flagged infeasible")
        })?;
        let c = sol.constraints;
        check(c.min_slack() >= -AUDIT_TOLERANCE, || {
            format!("{label}: violations {:?}", c.violations(AUDIT_TOLERANCE))
        })?;
        checked += 1;
        let w = dp.window().map_err(|e| e.to_string())?;
        let t_interior = sol.t_trans > w.lower && sol.t_trans < w.upper;
        if sol.p_irl > 0.0 && sol.p_irl < dp.power_budget {
            interior += 1;
            check(c.rate.abs() <= 1e-6, || {
                format!("{label}: rate slack {:e}", c.rate)
            })?;
            check(c.energy.abs() <= 1e-6, || {
                format!("{label}: energy slack {:e}", c.energy)
            })?;
        } else if t_interior {
            check(c.rate.abs() <= 1e-6, || {
                format!("{label}: rate slack {:e}", c.rate)
            })?;
        }
        Ok(())
    };

    let mut rng = common::rng(4);
    for case in 0..500 {
        let dp = common::random_problem(&mut rng);
        replay(&dp, &format!("random case {case}"))?;
    }
    let base = ScenarioConfig::default_scenario().with_realizations(200);
    for theta_kbit in [20.0, 40.0, 60.0, 80.0, 100.0] {
        for k in [1, 2, 3] {
            let cfg = base
                .with_rate_threshold(theta_kbit * 1e3)
                .with_local_iterations(k)
                .with_frame(2.2);
            for i in 0..cfg.realizations {
                let set = cfg.draw_channels(i as u64).map_err(|e| e.to_string())?;
                for j in 0..cfg.devices.len() {
                    let dp = cfg
                        .device_problem(j, optimal_beamformer(&set, j).map_err(|e| e.to_string())?)
                        .map_err(|e| e.to_string())?;
                    replay(
                        &dp,
                        &format!("theta {theta_kbit} kbit, K {k}, realization {i}, device {j}"),
                    )?;
                }
            }
        }
    }
    Ok(format!(
        "{checked} feasible solutions replayed, {interior} with interior IRL power"
    ))
}

fn criterion_5() -> Outcome {
    let mut rng = common::rng(5);
    let mut worst = 0.0f64;
    for case in 0..100 {
        let dp = common::random_problem(&mut rng);
        let w = dp.window().map_err(|e| e.to_string())?;
        for i in 0..100 {
            let t = w.lower + (i as f64 + 0.5) / 100.0 * w.width();
            let exact = psi_second_derivative(&dp, t).map_err(|e| e.to_string())?;
            check(exact > 0.0, || format!("case {case}: Psi''({t}) = {exact}"))?;
            // Richardson-extrapolated central difference, with the step kept
            // well inside the window and below the length scale of 2^{θ/(TB)}.
            let scale = t * t * dp.bandwidth / (dp.rate_threshold * std::f64::consts::LN_2);
            let h = 0.25
                * (t - w.lower)
                    .min(w.upper - t)
                    .min(1e-2 * dp.frame)
                    .min(0.1 * scale);
            let f = |x: f64| psi(&dp, x).unwrap();
            let d1 = central_second_difference(f, t, h);
            let d2 = central_second_difference(f, t, 0.5 * h);
            let fd = (4.0 * d2 - d1) / 3.0;
            let rel = (fd - exact).abs() / exact;
            worst = worst.max(rel);
            check(rel <= 1e-4, || {
                format!("case {case}: Psi''({t}) = {exact} vs finite difference {fd} ({rel:e})")
            })?;
        }
    }
    Ok(format!(
        "10000 samples, worst relative mismatch {worst:.2e}"
    ))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let cfg = ScenarioConfig::default_scenario().with_realizations(1000);
    let thetas = [20e3, 40e3, 60e3, 80e3, 100e3];
    let angles: Vec<f64> = [20.0f64, 45.0, 60.0]
        .iter()
        .map(|a| a.to_radians())
        .collect();
    let r = experiment_fig2(&cfg, &thetas, &angles).map_err(|e| e.to_string())?;
    let curves: Vec<Vec<f64>> = angles
        .iter()
        .map(|&a| {
            r.curve(&fig2_sweep_name(a), DeviceKey::All, TOTAL_IRL_POWER)
                .iter()
                .map(|(_, s)| s.mean)
                .collect()
        })
        .collect();
    for (a, c) in angles.iter().zip(&curves) {
        check(
            c.len() == thetas.len() && c.iter().all(|m| m.is_finite()),
            || format!("missing points on the {:.0} deg curve", a.to_degrees()),
        )?;
        check(c.windows(2).all(|p| p[1] >= p[0]), || {
            format!("{:.0} deg curve not nondecreasing: {c:?}", a.to_degrees())
        })?;
    }
    for i in 0..thetas.len() {
        check(
            curves[0][i] <= curves[1][i] && curves[1][i] <= curves[2][i],
            || format!("curves not ordered at {} kbit", thetas[i] / 1e3),
        )?;
    }
    within(start.elapsed(), 120.0)?;
    Ok(format!(
        "60 deg curve {:.1} -> {:.1} W, {:.2} s",
        curves[2][0],
        curves[2][thetas.len() - 1],
        start.elapsed().as_secs_f64()
    ))
}

fn criterion_7() -> Outcome {
    let cfg = ScenarioConfig::default_scenario();
    let thetas = cfg.experiments.fig3_theta.clone();
    let r = experiment_fig3(&cfg, &thetas).map_err(|e| e.to_string())?;
    let distances = cfg.ap_distances();
    let nearest = (0..distances.len())
        .min_by(|&a, &b| distances[a].total_cmp(&distances[b]))
        .unwrap();
    let curves: Vec<Vec<f64>> = (0..cfg.devices.len())
        .map(|j| {
            r.curve(THETA_SWEEP, DeviceKey::Device(j), "trans_comp_ratio")
                .iter()
                .map(|(_, s)| s.mean)
                .collect()
        })
        .collect();
    for i in 0..thetas.len() {
        for j in 0..curves.len() {
            if j != nearest {
                check(curves[nearest][i] < curves[j][i], || {
                    format!(
                        "at {} kbit device {} ratio {} not below device {} ratio {}",
                        thetas[i] / 1e3,
                        nearest + 1,
                        curves[nearest][i],
                        j + 1,
                        curves[j][i]
                    )
                })?;
            }
        }
    }
    for (j, c) in curves.iter().enumerate() {
        check(
            c.len() == thetas.len() && c.windows(2).all(|p| p[1] > p[0]),
            || format!("device {} ratios not increasing in theta: {c:?}", j + 1),
        )?;
    }
    Ok(format!(
        "theta {:?} kbit, device {} ratio {:.3} -> {:.3}",
        thetas.iter().map(|t| t / 1e3).collect::<Vec<_>>(),
        nearest + 1,
        curves[nearest][0],
        curves[nearest][thetas.len() - 1]
    ))
}

fn criterion_8() -> Outcome {
    let cfg = ScenarioConfig::default_scenario();
    let plan = cfg.experiments.clone();
    let theta = 40e3;
    let mut frames = plan.fig45_frames.clone();
    frames.sort_by(f64::total_cmp);
    let (short, long) = (frames[0], frames[frames.len() - 1]);
    check(short < long, || "need two distinct frame lengths".into())?;
    let r = experiment_fig4_fig5(
        &cfg,
        &plan.fig45_local_iterations,
        &[short, long],
        theta,
        plan.baseline_local_iterations,
    )
    .map_err(|e| e.to_string())?;
    let (ns, nl) = (fig45_sweep_name(short), fig45_sweep_name(long));
    let mut gap_summary = Vec::new();
    for j in 0..cfg.devices.len() {
        let d = DeviceKey::Device(j);
        let cs = r.curve(&ns, d, "t_comp");
        let cl = r.curve(&nl, d, "t_comp");
        let gaps: Vec<f64> = cs
            .iter()
            .zip(&cl)
            .map(|(a, b)| b.1.mean - a.1.mean)
            .collect();
        check(gaps.windows(2).all(|p| p[1] >= p[0]), || {
            format!("device {}: T_comp gap not widening with K: {gaps:?}", j + 1)
        })?;
        check(gaps.last() > gaps.first(), || {
            format!("device {}: T_comp gap flat over K: {gaps:?}", j + 1)
        })?;
        gap_summary.push(format!("{:.3}", gaps.last().unwrap()));
    }
    let add_s = r.curve(&ns, DeviceKey::All, ADDITIONAL_IRL_POWER);
    let add_l = r.curve(&nl, DeviceKey::All, ADDITIONAL_IRL_POWER);
    for ((k, s), (_, l)) in add_s.iter().zip(&add_l) {
        if *k == f64::from(plan.baseline_local_iterations) {
            check(s.mean == 0.0 && l.mean == 0.0, || {
                format!("K = {k}: baseline additional power {} / {}", s.mean, l.mean)
            })?;
        } else {
            check(l.mean < s.mean, || {
                format!(
                    "K = {k}: tau = {long} needs {} W, tau = {short} needs {} W",
                    l.mean, s.mean
                )
            })?;
        }
    }
    let last = add_s.len() - 1;
    Ok(format!(
        "tau {short}/{long} s, final T_comp gaps [{}] s, additional power at K = {}: {:.2} vs {:.2} W",
        gap_summary.join(", "),
        add_s[last].0,
        add_s[last].1.mean,
        add_l[last].1.mean
    ))
}

fn criterion_9() -> Outcome {
    let cfg = ScenarioConfig::default_scenario();
    check(
        cfg.realizations == 10_000 && cfg.devices.len() == 3 && cfg.antennas == 4,
        || "default scenario is not 10000 x 3 devices x 4 antennas".into(),
    )?;
    let start = Instant::now();
    let first = run_monte_carlo(&cfg)
        .map_err(|e| e.to_string())?
        .to_csv_string();
    let elapsed = start.elapsed();
    within(elapsed, 60.0)?;
    let second = run_monte_carlo(&cfg)
        .map_err(|e| e.to_string())?
        .to_csv_string();
    check(first == second, || "repeat run differs".into())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| e.to_string())?;
    let serial = pool
        .install(|| run_monte_carlo(&cfg))
        .map_err(|e| e.to_string())?
        .to_csv_string();
    check(first == serial, || "single-threaded run differs".into())?;
    let outcomes = simulate(&cfg, &Tolerances::default()).map_err(|e| e.to_string())?;
    let feasible = outcomes.iter().filter(|o| o.all_feasible()).count();
    Ok(format!(
        "{:.2} s on {} threads, {feasible}/10000 fully feasible, CSV identical across runs and thread counts",
        elapsed.as_secs_f64(),
        rayon::current_num_threads()
    ))
}

fn criterion_10() -> Outcome {
    let cfg = ScenarioConfig::default_scenario();
    let hp = cfg.optical.harvester;
    let (_, irl) = cfg.links(0).map_err(|e| e.to_string())?;
    let mut rng = common::rng(10);
    for _ in 0..10_000 {
        let a: f64 = rng.random_range(0.0..5000.0);
        let b: f64 = rng.random_range(0.0..5000.0);
        if a == b {
            continue;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        check(
            harvested_power(&irl, &hp, lo) < harvested_power(&irl, &hp, hi),
            || format!("harvested power not increasing between {lo} and {hi} W"),
        )?;
    }
    check(harvested_power(&irl, &hp, 0.0) == 0.0, || {
        "nonzero harvest at zero power".into()
    })?;
    check(harvested_power_from_gain(0.0, &hp, 28.0) == 0.0, || {
        "nonzero harvest at zero gain".into()
    })?;
    let mut worst = 0.0f64;
    for d in [0.5, 1.0, 2.2, 3.7, 10.0] {
        let near = OpticalLink { distance: d, ..irl };
        let far = OpticalLink {
            distance: 2.0 * d,
            ..irl
        };
        let ratio = channel_gain(&near) / channel_gain(&far);
        worst = worst.max((ratio - 4.0).abs());
        check((ratio - 4.0).abs() <= 1e-12, || {
            format!("gain ratio {ratio} at d = {d}")
        })?;
    }
    Ok(format!(
        "10000 monotone pairs, worst inverse-square error {worst:.1e}"
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("solver matches 1-D grid optimum", criterion_1),
        ("joint grid certifies decomposition", criterion_2),
        ("beamformer optimality", criterion_3),
        ("constraint replay", criterion_4),
        ("convexity of the energy demand", criterion_5),
        ("IRL power vs. rate trends", criterion_6),
        ("transmission/computation split trends", criterion_7),
        ("local iteration trends", criterion_8),
        ("determinism and scale", criterion_9),
        ("harvesting model sanity", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
