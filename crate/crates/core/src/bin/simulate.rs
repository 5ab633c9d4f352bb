//! Command-line driver for the lightwave-powered FL experiments.
//!
//! Exit codes: 0 success, 1 configuration error, 2 no feasible realization,
//! 3 oracle discrepancy (with `--certify`).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use lightfl::harness::experiments::{fig4_view, fig5_view, ADDITIONAL_IRL_POWER};
use lightfl::harness::monte_carlo::TOTAL_IRL_POWER;
use lightfl::harness::plot::render_svg;
use lightfl::harness::{
    emit_csv, experiment_fig2, experiment_fig3, experiment_fig4_fig5, run_monte_carlo, DeviceKey,
    ExperimentResult, ScenarioConfig,
};
use lightfl::oracle::{certify, GridSpec};
use lightfl::rf::optimal_beamformer;
use lightfl::solver::{solve_device, Tolerances};
use lightfl::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Experiment {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Single,
}

impl Experiment {
    fn name(self) -> &'static str {
        match self {
            Experiment::Fig2 => "fig2",
            Experiment::Fig3 => "fig3",
            Experiment::Fig4 => "fig4",
            Experiment::Fig5 => "fig5",
            Experiment::Single => "single",
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "simulate",
    version,
    about = "Monte-Carlo IRL power allocation for lightwave-powered FL devices"
)]
struct Args {
    /// Scenario TOML file; the built-in three-device scenario if omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    experiment: Experiment,
    /// RNG seed; overrides `rng_seed` from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Check solver results against the grid oracles.
    #[arg(long)]
    certify: bool,
    /// Overrides `realizations` from the config.
    #[arg(long)]
    realizations: Option<usize>,
    /// Also write an SVG line plot next to the CSV.
    #[arg(long)]
    plot: bool,
}

const CERTIFIED_REALIZATIONS: usize = 5;

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&args) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn load_config(args: &Args) -> lightfl::Result<ScenarioConfig> {
    let mut cfg = match &args.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default_scenario(),
    };
    if let Some(seed) = args.seed {
        cfg = cfg.with_seed(seed);
    }
    if let Some(n) = args.realizations {
        cfg = cfg.with_realizations(n);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(args: &Args) -> lightfl::Result<u8> {
    let cfg = load_config(args)?;
    std::fs::create_dir_all(&args.out)
        .map_err(|e| Error::Config(format!("{}: {e}", args.out.display())))?;

    let plan = &cfg.experiments;
    let (result, plot_metric) = match args.experiment {
        Experiment::Fig2 => (
            experiment_fig2(&cfg, &plan.fig2_theta, &plan.fig2_irl_semi_angles)?,
            TOTAL_IRL_POWER,
        ),
        Experiment::Fig3 => (experiment_fig3(&cfg, &plan.fig3_theta)?, "trans_comp_ratio"),
        Experiment::Fig4 | Experiment::Fig5 => {
            let both = experiment_fig4_fig5(
                &cfg,
                &plan.fig45_local_iterations,
                &plan.fig45_frames,
                plan.fig45_theta,
                plan.baseline_local_iterations,
            )?;
            if args.experiment == Experiment::Fig4 {
                (fig4_view(&both), "t_comp")
            } else {
                (fig5_view(&both), ADDITIONAL_IRL_POWER)
            }
        }
        Experiment::Single => (run_monte_carlo(&cfg)?, TOTAL_IRL_POWER),
    };

    let name = args.experiment.name();
    let csv = args.out.join(format!("{name}.csv"));
    emit_csv(&result, &csv)?;
    eprintln!("wrote {}", csv.display());
    if args.plot {
        write_plot(
            &result,
            plot_metric,
            &cfg,
            &args.out.join(format!("{name}.svg")),
        )?;
    }

    if args.certify {
        let issues = certify_run(&cfg)?;
        for issue in &issues {
            eprintln!("oracle discrepancy: {issue}");
        }
        if !issues.is_empty() {
            return Ok(3);
        }
        eprintln!(
            "certified {} realization(s)",
            cfg.realizations.min(CERTIFIED_REALIZATIONS)
        );
    }

    if infeasible_only(&result) {
        eprintln!("no realization was feasible for all devices");
        return Ok(2);
    }
    Ok(0)
}

fn write_plot(
    result: &ExperimentResult,
    metric: &str,
    cfg: &ScenarioConfig,
    path: &Path,
) -> lightfl::Result<()> {
    let devices: Vec<DeviceKey> = if metric == TOTAL_IRL_POWER {
        vec![DeviceKey::All]
    } else {
        (0..cfg.devices.len()).map(DeviceKey::Device).collect()
    };
    let devices = if metric == ADDITIONAL_IRL_POWER {
        vec![DeviceKey::All]
    } else {
        devices
    };
    std::fs::write(path, render_svg(result, metric, &devices))
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

/// True when the result has rows and not one of them aggregates a feasible
/// realization.
fn infeasible_only(result: &ExperimentResult) -> bool {
    let mut rows = result.points.iter().flat_map(|p| &p.rows).peekable();
    rows.peek().is_some() && rows.all(|r| r.summary.n_feasible == 0)
}

/// Runs both grid oracles on every solved device of the first realizations.
fn certify_run(cfg: &ScenarioConfig) -> lightfl::Result<Vec<String>> {
    let tols = Tolerances::default();
    let mut issues = Vec::new();
    for index in 0..cfg.realizations.min(CERTIFIED_REALIZATIONS) {
        let channels = cfg.draw_channels(index as u64)?;
        for j in 0..cfg.devices.len() {
            let dp = cfg.device_problem(j, optimal_beamformer(&channels, j)?)?;
            let sol = match solve_device(&dp, &tols) {
                Ok(s) => s,
                Err(Error::Infeasible(_)) => continue,
                Err(e) => return Err(e),
            };
            if !sol.feasible {
                continue;
            }
            let cert = certify(&dp, &sol, GridSpec::LINE, GridSpec::JOINT)?;
            for d in cert.discrepancies(&sol, tols.time(&dp)) {
                issues.push(format!("realization {index}, device {}: {d}", j + 1));
            }
        }
    }
    Ok(issues)
}
