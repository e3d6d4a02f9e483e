//! Experiment harness: configuration, Monte Carlo campaigns over the route
//! planner, obstacle scenario suites for the path planner, and flat-file
//! exports.

mod export;
mod metrics;
mod scenario;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use export::{
    export_campaign, export_graph, export_mission, export_path_run, export_route_run, export_suite, write_file,
    CONVERGENCE_HEADER, GA_CONVERGENCE_HEADER, TRAJECTORY_HEADER,
};
pub use metrics::{
    metrics_table, run_monte_carlo, summary_table, Campaign, GaSolver, MetricsRow, RouteSolver, Summary,
    METRICS_HEADER, SUMMARY_HEADER,
};
pub use scenario::{run_scenario_suite, scenario_field, Scenario, ScenarioRun, ScenarioSuite, SUITE_HEADER};

use crate::geometry::Point3;
use crate::grp::{GaConfig, GaError};
use crate::lpp::{BSplineConfig, PathError, PsoConfig};
use crate::mission::{ModelError, NetworkParams};
use crate::obstacles::ObstacleError;
use crate::synchro::{ComputeCharge, MissionConfig, RandomObstacles, SynchroError};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),
    #[error("cannot parse configuration: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("cannot write {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("run with seed {seed} panicked: {message}")]
    RunPanicked { seed: u64, message: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Route(#[from] GaError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Obstacles(#[from] ObstacleError),
    #[error(transparent)]
    Mission(#[from] SynchroError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    GenNetwork,
    PlanRoute,
    PlanPath,
    RunMission,
    MonteCarlo,
    ScenarioSuite,
}

/// End points of a single path planning problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PathEndpoints {
    pub start: Point3,
    pub target: Point3,
}

impl Default for PathEndpoints {
    fn default() -> Self {
        Self { start: Point3::new(0.0, 0.0, 50.0), target: Point3::new(3000.0, 2000.0, 60.0) }
    }
}

/// Everything one CLI invocation needs, as read from a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    pub seed: u64,
    /// Obstacle scenario, 1 to 4.
    pub scenario: u8,
    pub repetitions: usize,
    /// Obstacle counts swept by the scenario suite.
    pub obstacle_counts: (usize, usize),
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    /// Graph file to read instead of generating a network.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<PathBuf>,
    pub vehicle_speed: f64,
    /// Budget for standalone route planning and Monte Carlo runs.
    pub route_budget: f64,
    /// Budget for a full mission.
    pub mission_budget: f64,
    pub route_reserve: f64,
    pub compute_charge: ComputeCharge,
    pub clock_resolution: f64,
    pub network: NetworkParams,
    pub ga: GaConfig,
    pub pso: PsoConfig,
    pub spline: BSplineConfig,
    pub obstacles: RandomObstacles,
    pub path: PathEndpoints,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let mission = MissionConfig::default();
        Self {
            mode: None,
            seed: 0,
            scenario: 4,
            repetitions: 100,
            obstacle_counts: (3, 6),
            out_dir: None,
            graph: None,
            vehicle_speed: mission.vehicle_speed,
            route_budget: 25_200.0,
            mission_budget: mission.t_available,
            route_reserve: mission.route_reserve,
            compute_charge: mission.compute_charge,
            clock_resolution: mission.clock_resolution,
            network: NetworkParams::default(),
            ga: GaConfig::default(),
            pso: PsoConfig::default(),
            spline: BSplineConfig::default(),
            obstacles: RandomObstacles::default(),
            path: PathEndpoints::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serialises to TOML")
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::InvalidConfig(m));
        if self.repetitions == 0 {
            return bad("repetitions must be at least 1".into());
        }
        if Scenario::from_id(self.scenario).is_none() {
            return bad(format!("scenario must be 1 to 4, got {}", self.scenario));
        }
        if self.obstacle_counts.0 > self.obstacle_counts.1 {
            return bad(format!("obstacle_counts {:?} is not an ascending range", self.obstacle_counts));
        }
        if !(self.route_budget > 0.0 && self.route_budget.is_finite()) {
            return bad(format!("route_budget must be positive, got {}", self.route_budget));
        }
        if self.path.start.distance(&self.path.target) <= 0.0 {
            return bad("path start and target coincide".into());
        }
        self.obstacles.validate()?;
        self.mission_config().validate()?;
        Ok(())
    }

    pub fn mission_config(&self) -> MissionConfig {
        MissionConfig {
            ga: self.ga.clone(),
            pso: self.pso,
            spline: self.spline,
            vehicle_speed: self.vehicle_speed,
            t_available: self.mission_budget,
            route_reserve: self.route_reserve,
            compute_charge: self.compute_charge,
            clock_resolution: self.clock_resolution,
        }
    }

    /// Seeds of a campaign: `repetitions` consecutive values from `seed`.
    pub fn campaign_seeds(&self) -> Vec<u64> {
        (0..self.repetitions as u64).map(|i| self.seed.wrapping_add(i)).collect()
    }
}
