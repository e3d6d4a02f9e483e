//! Monte Carlo campaigns over the route planner.

use std::fmt::Write as _;
use std::panic::{catch_unwind, AssertUnwindSafe};

use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, HarnessError};
use crate::exec::Execution;
use crate::grp::{plan_route, GaConfig, GaError, GaOutcome};
use crate::mission::{generate_random_network, MissionGraph};
use crate::rng;
use crate::textfmt::sig;

/// A route planner the harness can benchmark.
pub trait RouteSolver: Sync {
    fn name(&self) -> &str;
    fn solve(&self, g: &MissionGraph, t_available: f64, vehicle_speed: f64, seed: u64) -> Result<GaOutcome, GaError>;
}

/// The genetic-algorithm planner.
#[derive(Debug, Clone, Default)]
pub struct GaSolver(pub GaConfig);

impl RouteSolver for GaSolver {
    fn name(&self) -> &str {
        "ga"
    }

    fn solve(&self, g: &MissionGraph, t_available: f64, vehicle_speed: f64, seed: u64) -> Result<GaOutcome, GaError> {
        plan_route(g, t_available, vehicle_speed, &self.0, seed)
    }
}

/// One campaign run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub seed: u64,
    pub cpu_seconds: f64,
    pub best_cost: f64,
    pub t_available: f64,
    pub t_route: f64,
    pub distance: f64,
    pub weight: f64,
    pub n_tasks: usize,
    /// Budget overrun relative to the budget.
    pub violation: f64,
    pub feasible: bool,
}

impl MetricsRow {
    pub fn from_outcome(seed: u64, o: &GaOutcome) -> Self {
        let violation = o.violation();
        Self {
            seed,
            cpu_seconds: o.stats.cpu_seconds,
            best_cost: o.cost,
            t_available: o.t_available,
            t_route: o.summary.time,
            distance: o.summary.distance,
            weight: o.summary.weight,
            n_tasks: o.summary.n_tasks,
            violation,
            feasible: Self::verdict(violation, o.summary.time, o.t_available),
        }
    }

    pub fn verdict(violation: f64, t_route: f64, t_available: f64) -> bool {
        violation == 0.0 && t_route < t_available
    }

    /// The stored verdict agrees with the row's own numbers.
    pub fn is_consistent(&self) -> bool {
        self.feasible == Self::verdict(self.violation, self.t_route, self.t_available)
    }
}

/// Five-number summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl Summary {
    /// Quartiles by linear interpolation between order statistics.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q = |p: f64| {
            let h = p * (v.len() - 1) as f64;
            let (lo, hi) = (h.floor() as usize, h.ceil() as usize);
            v[lo] + (h - lo as f64) * (v[hi] - v[lo])
        };
        Some(Self { min: v[0], q1: q(0.25), median: q(0.5), q3: q(0.75), max: v[v.len() - 1] })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Campaign {
    pub solver: String,
    pub rows: Vec<MetricsRow>,
    /// Summaries of route time, CPU time, weight and distance, by name.
    pub summaries: Vec<(String, Summary)>,
}

impl Campaign {
    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| !r.feasible).count()
    }
}

fn panic_message(p: &(dyn std::any::Any + Send)) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "non-string panic payload".into())
}

/// Runs `solver` once per seed on a freshly generated network. Runs execute in
/// parallel and are reduced in seed order.
pub fn run_monte_carlo(
    cfg: &ExperimentConfig,
    solver: &dyn RouteSolver,
    seeds: &[u64],
    execution: Execution,
) -> Result<Campaign, HarnessError> {
    if seeds.is_empty() {
        return Err(HarnessError::InvalidConfig("a campaign needs at least one seed".into()));
    }
    let results = execution.map_range(seeds.len(), |i| {
        let seed = seeds[i];
        let run = || -> Result<MetricsRow, HarnessError> {
            let g = generate_random_network(&cfg.network, seed)?;
            let solver_seed = rng::derive_seed(seed, &[rng::tag::CAMPAIGN]);
            match solver.solve(&g, cfg.route_budget, cfg.vehicle_speed, solver_seed) {
                Ok(o) => Ok(MetricsRow::from_outcome(seed, &o)),
                Err(GaError::Infeasible { best, .. }) => Ok(MetricsRow::from_outcome(seed, &best)),
                Err(e) => Err(e.into()),
            }
        };
        catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|p| Err(HarnessError::RunPanicked { seed, message: panic_message(p.as_ref()) }))
    });
    let rows = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let column = |f: fn(&MetricsRow) -> f64| Summary::of(&rows.iter().map(f).collect::<Vec<_>>()).expect("rows");
    let summaries = vec![
        ("t_route".to_string(), column(|r| r.t_route)),
        ("cpu_seconds".to_string(), column(|r| r.cpu_seconds)),
        ("weight".to_string(), column(|r| r.weight)),
        ("distance".to_string(), column(|r| r.distance)),
    ];
    Ok(Campaign { solver: solver.name().to_string(), rows, summaries })
}

pub const METRICS_HEADER: &str = "seed,best_cost,t_available,t_route,distance,weight,n_tasks,violation,feasible";
pub const SUMMARY_HEADER: &str = "metric,min,q1,median,q3,max";

/// Per-run rows without timings.
pub fn metrics_table(rows: &[MetricsRow]) -> String {
    let mut s = format!("{METRICS_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.seed,
            sig(r.best_cost),
            sig(r.t_available),
            sig(r.t_route),
            sig(r.distance),
            sig(r.weight),
            r.n_tasks,
            sig(r.violation),
            if r.feasible { "yes" } else { "no" }
        );
    }
    s
}

/// Summaries; CPU time is left out unless `with_timing`.
pub fn summary_table(summaries: &[(String, Summary)], with_timing: bool) -> String {
    let mut s = format!("{SUMMARY_HEADER}\n");
    for (name, m) in summaries {
        if name == "cpu_seconds" && !with_timing {
            continue;
        }
        let _ = writeln!(s, "{name},{},{},{},{},{}", sig(m.min), sig(m.q1), sig(m.median), sig(m.q3), sig(m.max));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mission::NetworkParams;

    #[test]
    fn quartiles_interpolate() {
        let s = Summary::of(&[4.0, 1.0, 3.0, 2.0, 5.0]).unwrap();
        assert_eq!((s.min, s.q1, s.median, s.q3, s.max), (1.0, 2.0, 3.0, 4.0, 5.0));
        let s = Summary::of(&[1.0, 2.0]).unwrap();
        assert_eq!((s.q1, s.median, s.q3), (1.25, 1.5, 1.75));
        assert!(Summary::of(&[]).is_none());
    }

    fn small_cfg() -> ExperimentConfig {
        ExperimentConfig {
            network: NetworkParams::new(10, 20),
            ga: GaConfig { population_size: 30, max_iterations: 30, ..Default::default() },
            route_budget: 12_000.0,
            ..Default::default()
        }
    }

    #[test]
    fn single_run_summary_is_the_row() {
        let c = run_monte_carlo(&small_cfg(), &GaSolver(small_cfg().ga), &[4], Execution::Sequential).unwrap();
        assert_eq!(c.rows.len(), 1);
        let r = &c.rows[0];
        for (name, s) in &c.summaries {
            let v = match name.as_str() {
                "t_route" => r.t_route,
                "cpu_seconds" => r.cpu_seconds,
                "weight" => r.weight,
                _ => r.distance,
            };
            assert_eq!([s.min, s.q1, s.median, s.q3, s.max], [v; 5]);
        }
    }

    #[test]
    fn modes_agree_in_seed_order() {
        let cfg = small_cfg();
        let solver = GaSolver(cfg.ga.clone());
        let seeds = [9, 3, 5, 1];
        let a = run_monte_carlo(&cfg, &solver, &seeds, Execution::Sequential).unwrap();
        let b = run_monte_carlo(&cfg, &solver, &seeds, Execution::Parallel).unwrap();
        assert_eq!(metrics_table(&a.rows), metrics_table(&b.rows));
        assert_eq!(a.rows.iter().map(|r| r.seed).collect::<Vec<_>>(), seeds);
        assert!(a.rows.iter().all(MetricsRow::is_consistent));
    }

    struct Exploding;

    impl RouteSolver for Exploding {
        fn name(&self) -> &str {
            "exploding"
        }
        fn solve(&self, _: &MissionGraph, _: f64, _: f64, seed: u64) -> Result<GaOutcome, GaError> {
            panic!("solver blew up on {seed}")
        }
    }

    #[test]
    fn panicking_run_names_its_seed() {
        let err = run_monte_carlo(&small_cfg(), &Exploding, &[42, 43], Execution::Parallel).unwrap_err();
        assert!(matches!(err, HarnessError::RunPanicked { seed: 42, .. }), "{err}");
    }

    #[test]
    fn infeasible_runs_are_reported_not_fatal() {
        let cfg = ExperimentConfig { route_budget: 1.0, ..small_cfg() };
        let c = run_monte_carlo(&cfg, &GaSolver(cfg.ga.clone()), &[1, 2], Execution::Sequential).unwrap();
        assert_eq!(c.violations(), 2);
        assert!(c.rows.iter().all(|r| r.is_consistent() && r.violation > 0.0));
    }
}
