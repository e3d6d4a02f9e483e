//! Obstacle scenario suites for the path planner.

use std::fmt::Write as _;

use rand::seq::IndexedRandom;
use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, HarnessError};
use crate::lpp::{plan_path, BSplinePath, PathRunStats};
use crate::obstacles::{spawn_obstacles, KindCounts, ObstacleField, ObstacleKind, OperationWindow};
use crate::rng;
use crate::textfmt::sig;

/// Obstacle mixes by dynamicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    /// Static obstacles, known and uncertain.
    Static,
    /// Self-motivated moving obstacles.
    Moving,
    /// Obstacles drifting with the current.
    CurrentDriven,
    /// Random composite of all four kinds.
    Composite,
}

impl Scenario {
    pub fn from_id(id: u8) -> Option<Self> {
        match id {
            1 => Some(Scenario::Static),
            2 => Some(Scenario::Moving),
            3 => Some(Scenario::CurrentDriven),
            4 => Some(Scenario::Composite),
            _ => None,
        }
    }

    pub fn id(self) -> u8 {
        match self {
            Scenario::Static => 1,
            Scenario::Moving => 2,
            Scenario::CurrentDriven => 3,
            Scenario::Composite => 4,
        }
    }

    pub fn kinds(self) -> &'static [ObstacleKind] {
        match self {
            Scenario::Static => &[ObstacleKind::StaticKnown, ObstacleKind::StaticUncertain],
            Scenario::Moving => &[ObstacleKind::SelfMotivated],
            Scenario::CurrentDriven => &[ObstacleKind::CurrentDriven],
            Scenario::Composite => &ObstacleKind::ALL,
        }
    }
}

/// Field of `count` obstacles for the configured end points, kinds drawn
/// uniformly from the scenario's mix.
pub fn scenario_field(
    cfg: &ExperimentConfig,
    scenario: Scenario,
    count: usize,
    seed: u64,
) -> Result<ObstacleField, HarnessError> {
    let (start, target) = (cfg.path.start, cfg.path.target);
    let window = OperationWindow::around(start, target, cfg.obstacles.window_inflate)?;
    let mut r = rng::stream(seed, &[rng::tag::MISSION_SPAWN, count as u64]);
    let mut counts = KindCounts::default();
    for _ in 0..count {
        let k = *scenario.kinds().choose(&mut r).expect("every scenario has kinds");
        counts.0[k as usize] += 1;
    }
    let mut params = cfg.obstacles.params;
    params.radius_max = params
        .radius_max
        .min(cfg.obstacles.leg_radius_fraction * start.distance(&target))
        .max(params.radius_min);
    Ok(spawn_obstacles(window, counts, params, seed)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRun {
    pub count: usize,
    pub seed: u64,
    pub field: ObstacleField,
    pub path: BSplinePath,
    pub stats: PathRunStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSuite {
    pub scenario: Scenario,
    pub runs: Vec<ScenarioRun>,
}

pub const SUITE_HEADER: &str = "scenario,count,seed,obstacles,flight_time,length,violation,cost";

impl ScenarioSuite {
    /// Share of runs with `count` obstacles whose best path is collision-free.
    pub fn clear_fraction(&self, count: usize) -> Option<f64> {
        let runs: Vec<_> = self.runs.iter().filter(|r| r.count == count).collect();
        if runs.is_empty() {
            return None;
        }
        Some(runs.iter().filter(|r| r.path.violation == 0.0).count() as f64 / runs.len() as f64)
    }

    pub fn table(&self) -> String {
        let mut s = format!("{SUITE_HEADER}\n");
        for r in &self.runs {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{}",
                self.scenario.id(),
                r.count,
                r.seed,
                r.field.obstacles.len(),
                sig(r.path.flight_time),
                sig(r.path.length),
                sig(r.path.violation),
                sig(r.path.cost)
            );
        }
        s
    }
}

/// Plans one path per (count, seed) pair, counts ascending, seeds in order.
pub fn run_scenario_suite(
    cfg: &ExperimentConfig,
    scenario: Scenario,
    counts: std::ops::RangeInclusive<usize>,
    seeds: &[u64],
) -> Result<ScenarioSuite, HarnessError> {
    let mut runs = Vec::new();
    for count in counts {
        for &seed in seeds {
            let field = scenario_field(cfg, scenario, count, seed)?;
            let (path, stats) = plan_path(
                cfg.path.start,
                cfg.path.target,
                &field,
                cfg.vehicle_speed,
                &cfg.spline,
                &cfg.pso,
                rng::derive_seed(seed, &[rng::tag::PSO_INIT, count as u64]),
            )?;
            runs.push(ScenarioRun { count, seed, field, path, stats });
        }
    }
    Ok(ScenarioSuite { scenario, runs })
}
