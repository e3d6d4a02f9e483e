//! `auvplan` command-line front end.
//!
//! Exit codes: 0 on success, 1 when a mission or route fails its budget, 2 on
//! configuration or I/O errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use auvplan::grp::{plan_route, GaError};
use auvplan::harness::{
    export_campaign, export_graph, export_mission, export_path_run, export_route_run, export_suite,
    run_monte_carlo, run_scenario_suite, scenario_field, ExperimentConfig, GaSolver, Scenario,
};
use auvplan::lpp::plan_path;
use auvplan::mission::{generate_random_network, MissionGraph};
use auvplan::synchro::run_mission;
use auvplan::textfmt::sig;
use auvplan::{rng, Execution};

#[derive(Parser, Debug)]
#[command(name = "auvplan", version, about = "Two-layer AUV mission planner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Master seed; overrides the configuration file.
    #[arg(long)]
    seed: Option<u64>,
    /// TOML experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "auvplan-out")]
    out: PathBuf,
    /// Run every planner sequentially.
    #[arg(long)]
    sequential: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random waypoint network.
    GenNetwork {
        #[command(flatten)]
        common: Common,
    },
    /// Plan a route over a network with the genetic algorithm.
    PlanRoute {
        #[command(flatten)]
        common: Common,
        /// Network file; a random network is generated when absent.
        #[arg(long)]
        graph: Option<PathBuf>,
    },
    /// Plan a B-spline path through an obstacle field.
    PlanPath {
        #[command(flatten)]
        common: Common,
        /// Obstacle scenario, 1 to 4.
        #[arg(long)]
        scenario: Option<u8>,
        /// Number of obstacles.
        #[arg(long)]
        obstacles: Option<usize>,
    },
    /// Fly a full mission with replanning.
    RunMission {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        graph: Option<PathBuf>,
    },
    /// Route planner campaign over random networks.
    MonteCarlo {
        #[command(flatten)]
        common: Common,
        /// Number of runs; overrides `repetitions`.
        #[arg(long)]
        runs: Option<usize>,
    },
    /// Path planner sweep over obstacle counts for one scenario.
    ScenarioSuite {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        scenario: Option<u8>,
        /// Seeds per obstacle count; overrides `repetitions`.
        #[arg(long)]
        runs: Option<usize>,
    },
}

/// Outcome of a command that ran to completion.
enum Verdict {
    Ok,
    Failed,
}

fn load_config(common: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read config {}", path.display()))?;
            ExperimentConfig::from_toml(&text).with_context(|| format!("in {}", path.display()))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if common.sequential {
        cfg.ga.execution = Execution::Sequential;
        cfg.pso.execution = Execution::Sequential;
    }
    cfg.out_dir = Some(common.out.clone());
    cfg.validate()?;
    Ok(cfg)
}

fn load_graph(cfg: &ExperimentConfig, path: Option<&Path>) -> Result<MissionGraph> {
    match path.or(cfg.graph.as_deref()) {
        Some(p) => {
            let text = fs::read_to_string(p)
                .with_context(|| format!("cannot read graph {}", p.display()))?;
            MissionGraph::from_json(&text).with_context(|| format!("in {}", p.display()))
        }
        None => Ok(generate_random_network(&cfg.network, cfg.seed)?),
    }
}

fn report(files: &[PathBuf]) {
    for f in files {
        println!("wrote {}", f.display());
    }
}

fn execution(common: &Common) -> Execution {
    if common.sequential { Execution::Sequential } else { Execution::Parallel }
}

fn run(cli: Cli) -> Result<Verdict> {
    match cli.command {
        Command::GenNetwork { common } => {
            let cfg = load_config(&common)?;
            let g = generate_random_network(&cfg.network, cfg.seed)?;
            println!("network: {} waypoints, {} edges ({} arcs)", g.node_count(), g.edge_count(), g.arc_count());
            report(&export_graph(&g, &common.out)?);
            Ok(Verdict::Ok)
        }
        Command::PlanRoute { common, graph } => {
            let cfg = load_config(&common)?;
            let g = load_graph(&cfg, graph.as_deref())?;
            let seed = rng::derive_seed(cfg.seed, &[rng::tag::CAMPAIGN]);
            let (outcome, verdict) = match plan_route(&g, cfg.route_budget, cfg.vehicle_speed, &cfg.ga, seed) {
                Ok(o) => (o, Verdict::Ok),
                Err(GaError::Infeasible { best, .. }) => (*best, Verdict::Failed),
                Err(e) => return Err(e.into()),
            };
            println!(
                "route {}: {} s of {} s, weight {}, cost {}",
                outcome.route,
                sig(outcome.summary.time),
                sig(cfg.route_budget),
                sig(outcome.summary.weight),
                sig(outcome.cost)
            );
            report(&export_route_run(&outcome, &common.out)?);
            if matches!(verdict, Verdict::Failed) {
                eprintln!("no route fits the budget");
            }
            Ok(verdict)
        }
        Command::PlanPath { common, scenario, obstacles } => {
            let mut cfg = load_config(&common)?;
            if let Some(s) = scenario {
                cfg.scenario = s;
            }
            let scenario = Scenario::from_id(cfg.scenario)
                .ok_or_else(|| anyhow::anyhow!("scenario must be 1 to 4, got {}", cfg.scenario))?;
            let count = obstacles.unwrap_or(cfg.obstacle_counts.1);
            let field = scenario_field(&cfg, scenario, count, cfg.seed)?;
            let (path, stats) = plan_path(
                cfg.path.start,
                cfg.path.target,
                &field,
                cfg.vehicle_speed,
                &cfg.spline,
                &cfg.pso,
                rng::derive_seed(cfg.seed, &[rng::tag::PSO_INIT, count as u64]),
            )?;
            println!(
                "path: flight time {} s, length {} m, violation {}",
                sig(path.flight_time),
                sig(path.length),
                sig(path.violation)
            );
            report(&export_path_run(&path, &stats, &field, &common.out, "")?);
            Ok(Verdict::Ok)
        }
        Command::RunMission { common, graph } => {
            let cfg = load_config(&common)?;
            let g = load_graph(&cfg, graph.as_deref())?;
            let log = run_mission(&g, &cfg.obstacles, &cfg.mission_config(), cfg.seed)?;
            let outcome = log.outcome.clone().expect("finished mission has an outcome");
            println!(
                "mission: {outcome}; {} route plans, {} legs, waypoints {}",
                log.grp_calls.len(),
                log.legs.len(),
                log.visited().iter().map(ToString::to_string).collect::<Vec<_>>().join("-")
            );
            report(&export_mission(&log, &common.out)?);
            Ok(if outcome.is_success() { Verdict::Ok } else { Verdict::Failed })
        }
        Command::MonteCarlo { common, runs } => {
            let mut cfg = load_config(&common)?;
            if let Some(n) = runs {
                cfg.repetitions = n;
            }
            cfg.validate()?;
            let campaign = run_monte_carlo(&cfg, &GaSolver(cfg.ga.clone()), &cfg.campaign_seeds(), execution(&common))?;
            println!("campaign: {} runs, {} over budget", campaign.rows.len(), campaign.violations());
            report(&export_campaign(&campaign, &common.out)?);
            Ok(Verdict::Ok)
        }
        Command::ScenarioSuite { common, scenario, runs } => {
            let mut cfg = load_config(&common)?;
            if let Some(s) = scenario {
                cfg.scenario = s;
            }
            if let Some(n) = runs {
                cfg.repetitions = n;
            }
            cfg.validate()?;
            let scenario = Scenario::from_id(cfg.scenario).expect("validated scenario");
            let (lo, hi) = cfg.obstacle_counts;
            let suite = run_scenario_suite(&cfg, scenario, lo..=hi, &cfg.campaign_seeds())?;
            for count in lo..=hi {
                let clear = suite.clear_fraction(count).unwrap_or(1.0);
                println!("scenario {} with {count} obstacles: {}% collision-free", scenario.id(), sig(100.0 * clear));
            }
            report(&export_suite(&suite, &common.out)?);
            Ok(Verdict::Ok)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Verdict::Ok) => ExitCode::SUCCESS,
        Ok(Verdict::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
