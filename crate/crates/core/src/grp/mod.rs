//! Global route planner: a genetic algorithm over feasible routes.
//!
//! Chromosomes are waypoint sequences. The initial population decodes random
//! priority vectors into routes ([`build_feasible_route`]); each generation
//! keeps the elite, then fills the rest by roulette selection, uniform
//! crossover and mutation. Every individual that enters the population passes
//! route validation.

mod decode;
mod operators;

pub use decode::{build_feasible_route, truncate_to_budget, PriorityVector, PRIORITY_RANGE, VISITED_PRIORITY};
pub use operators::{
    crossover_with_mask, insertion_move, inversion_move, mutate, swap_move, uniform_crossover, CrossoverOutcome,
    Feasibility, MutationKind, MIN_CROSSOVER_LEN,
};

use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::exec::Execution;
use crate::mission::{route_summary, validate_route, MissionGraph, ModelError, Route, RouteSummary};
use crate::rng;

#[derive(Debug, thiserror::Error)]
pub enum GaError {
    #[error("invalid GA configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("destination {dest} unreachable from {start}")]
    Unreachable { start: usize, dest: usize },
    #[error("no route within budget: best route {} needs {route_time:.1} s of {t_available:.1} s", best.route)]
    Infeasible { best: Box<GaOutcome>, route_time: f64, t_available: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population_size: usize,
    pub max_iterations: usize,
    /// Per-gene swap probability of uniform crossover.
    pub crossover_mix: f64,
    /// Probability that an offspring is mutated.
    pub mutation_probability: f64,
    /// Relative frequency of insertion, swap and inversion.
    pub mutation_weights: [f64; 3],
    pub stall_generations: usize,
    pub elite_count: usize,
    /// Multiplier applied to the cost of over-budget routes.
    pub penalty_factor: f64,
    /// Weight of the task term.
    pub phi_task: f64,
    /// Weight of the budget-fit term.
    pub phi_route: f64,
    pub execution: Execution,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 100,
            max_iterations: 150,
            crossover_mix: 0.5,
            mutation_probability: 0.3,
            mutation_weights: [1.0, 1.0, 1.0],
            stall_generations: 30,
            elite_count: 1,
            penalty_factor: 1.0e3,
            phi_task: 0.5,
            phi_route: 0.5,
            execution: Execution::default(),
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), GaError> {
        let bad = |m: &str| Err(GaError::InvalidConfig(m.to_string()));
        if self.population_size < 2 {
            return bad("population_size must be >= 2");
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be >= 1");
        }
        if !(0.0..=1.0).contains(&self.crossover_mix) || !(0.0..=1.0).contains(&self.mutation_probability) {
            return bad("probabilities must lie in [0, 1]");
        }
        if self.mutation_weights.iter().any(|w| w.is_nan() || *w < 0.0) || self.mutation_weights.iter().sum::<f64>() <= 0.0 {
            return bad("mutation weights must be non-negative and not all zero");
        }
        if self.elite_count == 0 || self.elite_count >= self.population_size {
            return bad("elite_count must be in 1..population_size");
        }
        if [self.phi_task, self.phi_route].iter().any(|w| w.is_nan() || *w < 0.0) {
            return bad("cost weights must be non-negative");
        }
        if self.penalty_factor.is_nan() || self.penalty_factor < 1.0 {
            return bad("penalty_factor must be >= 1");
        }
        Ok(())
    }

    fn pick_mutation(&self, rng: &mut impl Rng) -> MutationKind {
        let total: f64 = self.mutation_weights.iter().sum();
        let mut r = rng.random_range(0.0..total);
        for (k, w) in MutationKind::ALL.iter().zip(self.mutation_weights) {
            if r < w {
                return *k;
            }
            r -= w;
        }
        MutationKind::Inversion
    }
}

/// Scalar route cost, lower is better.
///
/// The task term is the mean `risk / priority` over the route's edges divided
/// by the graph-wide maximum of that ratio; the budget-fit term is
/// `|T_route - T_available| / T_available` capped at 1. Both lie in `[0, 1]`
/// and are mixed with `phi_task` and `phi_route`. A route over budget costs
/// `penalty_factor * (phi_task + phi_route + mixed)`, which exceeds the cost
/// of every route within budget.
pub fn route_cost(route: &Route, g: &MissionGraph, t_available: f64, vehicle_speed: f64, cfg: &GaConfig) -> Result<f64, GaError> {
    let summary = route_summary(route, g, vehicle_speed)?;
    Ok(cost_from_parts(route, g, &summary, t_available, cfg, g.max_risk_ratio()))
}

fn cost_from_parts(
    route: &Route,
    g: &MissionGraph,
    summary: &RouteSummary,
    t_available: f64,
    cfg: &GaConfig,
    max_ratio: f64,
) -> f64 {
    let task_term = if summary.n_tasks == 0 || max_ratio <= 0.0 {
        1.0
    } else {
        let total: f64 = route
            .legs()
            .filter_map(|(a, b)| g.edge_between(a, b))
            .map(|e| e.task.risk / e.task.priority)
            .sum();
        total / summary.n_tasks as f64 / max_ratio
    };
    let gap = (summary.time - t_available).abs() / t_available;
    let mixed = cfg.phi_task * task_term + cfg.phi_route * gap.min(1.0);
    if summary.time > t_available {
        cfg.penalty_factor * (cfg.phi_task + cfg.phi_route + cfg.phi_task * task_term + cfg.phi_route * gap)
    } else {
        mixed
    }
}

/// Roulette-wheel pick with fitness `max_cost - cost + 1e-9`.
pub fn roulette_select(costs: &[f64], rng: &mut impl Rng) -> usize {
    assert!(!costs.is_empty(), "roulette over an empty population");
    let wheel = RouletteWheel::new(costs);
    wheel.spin(rng)
}

const ROULETTE_EPS: f64 = 1.0e-9;

struct RouletteWheel {
    cumulative: Vec<f64>,
}

impl RouletteWheel {
    fn new(costs: &[f64]) -> Self {
        let max = costs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut acc = 0.0;
        let cumulative = costs
            .iter()
            .map(|c| {
                acc += max - c + ROULETTE_EPS;
                acc
            })
            .collect();
        Self { cumulative }
    }

    fn spin(&self, rng: &mut impl Rng) -> usize {
        let total = *self.cumulative.last().expect("non-empty wheel");
        let r = rng.random_range(0.0..total);
        self.cumulative.partition_point(|&c| c <= r).min(self.cumulative.len() - 1)
    }
}

/// Per-run record of a GA execution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaRunStats {
    /// Best cost after each generation (index 0 is the initial population).
    pub best_cost: Vec<f64>,
    pub mean_cost: Vec<f64>,
    /// Budget overrun of the best route, relative to the budget.
    pub best_violation: Vec<f64>,
    pub generations: usize,
    pub cpu_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaOutcome {
    pub route: Route,
    pub cost: f64,
    pub summary: RouteSummary,
    pub t_available: f64,
    pub stats: GaRunStats,
}

impl GaOutcome {
    /// Relative budget overrun, zero when within budget.
    pub fn violation(&self) -> f64 {
        budget_violation(self.summary.time, self.t_available)
    }
}

fn budget_violation(route_time: f64, t_available: f64) -> f64 {
    ((route_time - t_available) / t_available).max(0.0)
}

#[derive(Debug, Clone)]
struct Individual {
    route: Route,
    summary: RouteSummary,
    cost: f64,
}

struct Evaluator<'g> {
    graph: &'g MissionGraph,
    t_available: f64,
    vehicle_speed: f64,
    cfg: &'g GaConfig,
    max_ratio: f64,
}

impl Evaluator<'_> {
    fn evaluate(&self, route: Route) -> Individual {
        let summary = route_summary(&route, self.graph, self.vehicle_speed)
            .expect("population routes are structurally valid");
        let cost = cost_from_parts(&route, self.graph, &summary, self.t_available, self.cfg, self.max_ratio);
        Individual { route, summary, cost }
    }
}

fn best_index(pop: &[Individual]) -> usize {
    pop.iter()
        .enumerate()
        .min_by(|a, b| a.1.cost.total_cmp(&b.1.cost))
        .map(|(i, _)| i)
        .expect("non-empty population")
}

/// Runs the GA from the graph's start to its destination.
///
/// Returns the best route when it fits strictly inside `t_available`, and
/// [`GaError::Infeasible`] (carrying the best attempt) otherwise.
pub fn plan_route(
    g: &MissionGraph,
    t_available: f64,
    vehicle_speed: f64,
    cfg: &GaConfig,
    seed: u64,
) -> Result<GaOutcome, GaError> {
    cfg.validate()?;
    if !(t_available > 0.0 && t_available.is_finite()) {
        return Err(GaError::InvalidConfig(format!("t_available must be positive, got {t_available}")));
    }
    if !(vehicle_speed > 0.0 && vehicle_speed.is_finite()) {
        return Err(GaError::InvalidConfig(format!("vehicle speed must be positive, got {vehicle_speed}")));
    }
    if !g.is_reachable(g.start(), g.dest()) {
        return Err(GaError::Unreachable { start: g.start(), dest: g.dest() });
    }
    let clock = Instant::now();
    let eval = Evaluator { graph: g, t_available, vehicle_speed, cfg, max_ratio: g.max_risk_ratio() };
    let ctx = Feasibility { graph: g, t_available, vehicle_speed };
    let n = g.node_count();

    let mut pop: Vec<Individual> = cfg.execution.map_range(cfg.population_size, |i| {
        let mut rng = rng::stream(seed, &[rng::tag::GA_INIT, i as u64]);
        let pv = PriorityVector::random(n, &mut rng);
        let route = truncate_to_budget(build_feasible_route(&pv, g), g, t_available, vehicle_speed);
        eval.evaluate(route)
    });

    let mut stats = GaRunStats {
        best_cost: Vec::new(),
        mean_cost: Vec::new(),
        best_violation: Vec::new(),
        generations: 0,
        cpu_seconds: 0.0,
    };
    let record = |pop: &[Individual], stats: &mut GaRunStats| {
        let best = &pop[best_index(pop)];
        stats.best_cost.push(best.cost);
        stats.mean_cost.push(pop.iter().map(|i| i.cost).sum::<f64>() / pop.len() as f64);
        stats.best_violation.push(budget_violation(best.summary.time, t_available));
    };
    record(&pop, &mut stats);

    let mut stall = 0;
    for generation in 1..=cfg.max_iterations {
        let costs: Vec<f64> = pop.iter().map(|i| i.cost).collect();
        let wheel = RouletteWheel::new(&costs);
        let mut order: Vec<usize> = (0..pop.len()).collect();
        order.sort_by(|&a, &b| costs[a].total_cmp(&costs[b]).then(a.cmp(&b)));
        let elite: Vec<Individual> = order[..cfg.elite_count].iter().map(|&i| pop[i].clone()).collect();

        let children = cfg.execution.map_range(cfg.population_size - cfg.elite_count, |slot| {
            let mut rng = rng::stream(seed, &[rng::tag::GA_GEN, generation as u64, slot as u64]);
            let p1 = &pop[wheel.spin(&mut rng)].route;
            let p2 = &pop[wheel.spin(&mut rng)].route;
            let mut child = match uniform_crossover(p1, p2, cfg.crossover_mix, &ctx, &mut rng) {
                CrossoverOutcome::Offspring(mut kids) if !kids.is_empty() => {
                    let k = rng.random_range(0..kids.len());
                    kids.swap_remove(k)
                }
                _ => p1.clone(),
            };
            if rng.random_bool(cfg.mutation_probability) {
                let kind = cfg.pick_mutation(&mut rng);
                if let Some(m) = mutate(&child, kind, &ctx, &mut rng) {
                    child = m;
                }
            }
            eval.evaluate(child)
        });

        let previous_best = *stats.best_cost.last().expect("initial record");
        pop = elite;
        pop.extend(children);
        record(&pop, &mut stats);
        stats.generations = generation;
        if *stats.best_cost.last().unwrap() < previous_best {
            stall = 0;
        } else {
            stall += 1;
            if stall >= cfg.stall_generations {
                break;
            }
        }
    }
    stats.cpu_seconds = clock.elapsed().as_secs_f64();

    let best = pop.swap_remove(best_index(&pop));
    debug_assert!(validate_route(&best.route, g, f64::INFINITY, vehicle_speed).is_structurally_valid());
    let outcome = GaOutcome { route: best.route, cost: best.cost, summary: best.summary, t_available, stats };
    if outcome.summary.time < t_available {
        Ok(outcome)
    } else {
        let route_time = outcome.summary.time;
        Err(GaError::Infeasible { best: Box::new(outcome), route_time, t_available })
    }
}
