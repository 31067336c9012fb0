use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use hauv_ipp::bench::scenario::{sample_to_grid, SCENARIO2_ENV_SEED};
use hauv_ipp::bench::{
    check_path, compute_metrics, emit_results, read_path_csv, robustness_experiment, run_trials, sig6, RobustnessFamily,
    ScenarioSpec,
};
use hauv_ipp::config::RunConfig;
use hauv_ipp::env::generate_random_environment;
use hauv_ipp::ingest::write_grid;
use hauv_ipp::planners::{Algorithm, PlannerConfig};
use hauv_ipp::{Error, Result};

/// Information-driven path planning for a hybrid aerial-underwater vehicle.
#[derive(Parser, Debug)]
#[command(name = "hauv-ipp", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Planner seed (`plan`), base seed (`bench`, `robustness`) or
    /// environment seed (`gen-env`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (or file for `gen-env`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Planner: rast-ie, rast-i, rast, rrst, rigt or pso. `bench` runs all
    /// six unless given.
    #[arg(long, global = true)]
    algo: Option<Algorithm>,
    /// Built-in scenario 1 to 5.
    #[arg(long, global = true)]
    scenario: Option<u32>,
    /// IPGRID file replacing the bundled Scenario 2 grid.
    #[arg(long, global = true)]
    env_file: Option<PathBuf>,
    #[arg(long, global = true)]
    max_it: Option<usize>,
    #[arg(long, global = true)]
    it_stop: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write an analytic environment to an IPGRID file.
    GenEnv,
    /// Run one planner once.
    Plan,
    /// Repeated runs of a scenario.
    Bench {
        #[arg(long)]
        repetitions: Option<usize>,
    },
    /// Win counts over random maps.
    Robustness {
        /// 1/unbounded, 2/time-window or 3/weighted.
        #[arg(long)]
        family: Option<RobustnessFamily>,
        #[arg(long)]
        maps: Option<usize>,
    },
    /// Re-check an exported path CSV against the scenario's constraints.
    Verify {
        /// A path_<algo>_<seed>.csv file.
        #[arg(long)]
        path: PathBuf,
    },
}

struct Context {
    config: RunConfig,
    planner: PlannerConfig,
}

impl Context {
    fn new(g: &Global) -> Result<Self> {
        let config = match &g.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let mut planner = config.planner.clone();
        if let Some(m) = g.max_it {
            planner.max_it = m;
        }
        if let Some(s) = g.it_stop {
            planner.it_stop = s;
        }
        config.validate()?;
        planner.validate()?;
        Ok(Context { config, planner })
    }

    /// The scenario from `--scenario`, else the config file, else Scenario 1.
    fn scenario(&self, g: &Global) -> Result<ScenarioSpec> {
        let mut spec = match (g.scenario, &self.config.scenario) {
            (Some(id), _) => hauv_ipp::bench::scenario(id)?,
            (None, Some(spec)) => spec.clone(),
            (None, None) => hauv_ipp::bench::scenario(1)?,
        };
        if let Some(f) = &g.env_file {
            spec = spec.with_grid_file(f)?;
        }
        Ok(spec)
    }
}

fn out_dir(g: &Global, default: &str) -> PathBuf {
    g.out.clone().unwrap_or_else(|| PathBuf::from(default))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[derive(Serialize)]
struct BenchSummary<'a> {
    scenario: &'a ScenarioSpec,
    planner: &'a PlannerConfig,
    vehicle: &'a hauv_ipp::vehicle::VehicleModel,
    environment_fingerprint: u64,
}

fn run(cli: Cli) -> Result<ExitCode> {
    let g = &cli.global;
    let ctx = Context::new(g)?;
    match cli.command {
        Command::GenEnv => {
            let env = if g.scenario.is_some() || ctx.config.scenario.is_some() {
                let spec = ctx.scenario(g)?;
                spec.build_environment()?.with_kappa(1.0, 1.0)?
            } else {
                generate_random_environment(g.seed.unwrap_or(SCENARIO2_ENV_SEED), &ctx.config.environment)?
                    .with_kappa(1.0, 1.0)?
            };
            let out = out_dir(g, "environment.ipgrid");
            std::fs::write(&out, write_grid(&sample_to_grid(&env)?)).map_err(|e| Error::io(&out, e))?;
            println!("wrote {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Plan | Command::Bench { .. } => {
            let mut spec = ctx.scenario(g)?;
            let single = matches!(cli.command, Command::Plan);
            if let Command::Bench { repetitions: Some(r) } = cli.command {
                spec.repetitions = r;
            }
            if let Some(a) = g.algo {
                spec.algorithms = vec![a];
            } else if single {
                spec.algorithms = vec![Algorithm::RastIe];
            }
            if single {
                spec.repetitions = 1;
            }
            if let Some(s) = g.seed {
                spec.base_seed = s;
            }
            let env = spec.build_environment()?;
            let model = ctx.config.vehicle;
            let records = if single {
                let a = spec.algorithms[0];
                let seed = g.seed.unwrap_or(spec.base_seed);
                vec![hauv_ipp::bench::run_trial(spec.id, a, 0, seed, &env, &model, &spec.task, &ctx.planner)?]
            } else {
                run_trials(
                    spec.id,
                    &spec.algorithms,
                    spec.repetitions,
                    spec.base_seed,
                    &env,
                    &model,
                    &spec.task,
                    &ctx.planner,
                )?
            };
            let metrics = compute_metrics(&records);
            let out = out_dir(g, if single { "out/plan" } else { "out/bench" });
            let summary = BenchSummary {
                scenario: &spec,
                planner: &ctx.planner,
                vehicle: &model,
                environment_fingerprint: env.fingerprint(),
            };
            emit_results(&out, &records, &metrics, &summary)?;
            for r in &records {
                let status = match (&r.error, &r.check) {
                    (Some(e), _) => format!("error: {e}"),
                    (None, Some(c)) if c.passes() => "checker pass".into(),
                    (None, Some(c)) => format!("checker FAIL: {}", c.violations().join(", ")),
                    (None, None) => "no feasible path".into(),
                };
                println!(
                    "{:<10} rep {:<3} seed {:<20} ig {:<10} it {:<5} E {:<8} T {:<8}h {:.2}s  {status}",
                    r.algorithm.name(),
                    r.repetition,
                    r.seed,
                    sig6(r.best_ig),
                    r.iterations,
                    r.energy.map(sig6).unwrap_or_else(|| "-".into()),
                    r.time.map(|t| sig6(t / 3600.0)).unwrap_or_else(|| "-".into()),
                    r.wall_time,
                );
            }
            if !single {
                for m in &metrics {
                    println!(
                        "{:<10} mean {:<10} std {:<10} iterations {:<8} time {}s",
                        m.algorithm.name(),
                        sig6(m.i_mean),
                        m.i_std.map(sig6).unwrap_or_else(|| "NA".into()),
                        sig6(m.mean_iterations),
                        sig6(m.mean_wall_time),
                    );
                }
            }
            println!("results in {}", out.display());
            if records.iter().any(|r| r.error.is_some()) && single {
                return Ok(ExitCode::from(1));
            }
            if records.iter().all(|r| r.best_ig == 0.0) {
                return Ok(ExitCode::from(2));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Robustness { family, maps } => {
            let mut config = ctx.config.robustness.clone();
            if let Some(f) = family {
                config.family = f;
            }
            if let Some(m) = maps {
                config.maps = m;
            }
            if let Some(s) = g.seed {
                config.base_seed = s;
            }
            if let Some(a) = g.algo {
                config.algorithms = vec![a];
            }
            let report = robustness_experiment(&config, &ctx.config.vehicle, &ctx.planner)?;
            let out = out_dir(g, "out/robustness");
            std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
            write_json(&out.join("robustness.json"), &report)?;
            let mut csv = String::from("algorithm,wins\n");
            for (a, w) in &report.wins {
                csv.push_str(&format!("{},{}\n", a.slug(), sig6(*w)));
                println!("{:<10} {}", a.name(), sig6(*w));
            }
            let wins_path = out.join("wins.csv");
            std::fs::write(&wins_path, csv).map_err(|e| Error::io(&wins_path, e))?;
            if !report.excluded.is_empty() {
                println!("excluded (no feasible path): {:?}", report.excluded);
            }
            println!("results in {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { path } => {
            let spec = ctx.scenario(g)?;
            let env = spec.build_environment()?;
            let points = read_path_csv(&path)?;
            let report = check_path(&points, &spec.task, &env, &ctx.config.vehicle.vehicle)?;
            println!(
                "E {} T {}s transitions {}",
                sig6(report.energy),
                sig6(report.time),
                report.transitions
            );
            if report.passes() {
                println!("pass");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("violations: {}", report.violations().join(", "));
                Ok(ExitCode::from(2))
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
