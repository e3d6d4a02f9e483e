//! Mission loop coupling the route planner and the path planner.
//!
//! The route planner proposes a waypoint sequence from the current waypoint to
//! the destination. Each leg is then flown by the path planner in a fresh
//! obstacle field. After every leg the realised time is compared with the time
//! the route plan expected; an overrun triggers a new route on the pruned graph
//! with the remaining budget.

use std::fmt::{self, Write as _};
use std::time::Instant;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Point3;
use crate::grp::{plan_route, GaConfig, GaError};
use crate::lpp::{plan_path, BSplineConfig, PathError, PsoConfig};
use crate::mission::{edge_traverse_time, MissionGraph, ModelError, Route};
use crate::obstacles::{spawn_obstacles, KindCounts, ObstacleError, ObstacleField, ObstacleKind, ObstacleParams, OperationWindow};
use crate::rng;
use crate::textfmt::sig;

#[derive(Debug, Error)]
pub enum SynchroError {
    #[error("invalid mission configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Route(#[from] GaError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Obstacles(#[from] ObstacleError),
}

/// Outcome of the post-leg comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    Continue,
    Replan,
}

/// Continue iff the realised leg time does not exceed the expected one.
pub fn replan_check(t_path_flight: f64, t_expected: f64) -> Decision {
    if t_path_flight > t_expected {
        Decision::Replan
    } else {
        Decision::Continue
    }
}

/// Nominal time the route plan assigned to the leg `from -> to`.
pub fn expected_time(from: usize, to: usize, g: &MissionGraph, vehicle_speed: f64) -> Result<f64, ModelError> {
    let e = g.edge_between(from, to).ok_or(ModelError::MissingEdge { from, to })?;
    edge_traverse_time(e, vehicle_speed)
}

/// How planner compute time is charged against the budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComputeCharge {
    /// Fixed seconds per planner call; reproducible.
    Synthetic(f64),
    /// Measured wall-clock seconds.
    WallClock,
}

impl Default for ComputeCharge {
    fn default() -> Self {
        ComputeCharge::Synthetic(0.0)
    }
}

impl ComputeCharge {
    fn charge(&self, measured: f64) -> f64 {
        match *self {
            ComputeCharge::Synthetic(c) => c,
            ComputeCharge::WallClock => measured,
        }
    }
}

/// Produces the obstacle field for one leg.
pub trait FieldGenerator: Sync {
    fn generate(&self, start: Point3, target: Point3, seed: u64) -> Result<ObstacleField, ObstacleError>;
}

/// Obstacle-free legs.
#[derive(Debug, Clone, Copy)]
pub struct NoObstacles {
    pub window_inflate: f64,
}

impl Default for NoObstacles {
    fn default() -> Self {
        Self { window_inflate: 0.25 }
    }
}

impl FieldGenerator for NoObstacles {
    fn generate(&self, start: Point3, target: Point3, _seed: u64) -> Result<ObstacleField, ObstacleError> {
        Ok(ObstacleField::empty(OperationWindow::around(start, target, self.window_inflate)?))
    }
}

/// Random obstacles per leg: a uniform count in `min_count..=max_count`, each
/// of a kind drawn uniformly from `kinds`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RandomObstacles {
    pub min_count: usize,
    pub max_count: usize,
    pub kinds: Vec<ObstacleKind>,
    /// Window padding per axis as a fraction of the pair distance.
    pub window_inflate: f64,
    /// Upper radius limit as a fraction of the leg length, so short legs still
    /// leave room around both waypoints.
    pub leg_radius_fraction: f64,
    pub params: ObstacleParams,
}

impl Default for RandomObstacles {
    fn default() -> Self {
        Self {
            min_count: 3,
            max_count: 6,
            kinds: ObstacleKind::ALL.to_vec(),
            window_inflate: 0.25,
            leg_radius_fraction: 0.1,
            params: ObstacleParams::default(),
        }
    }
}

impl RandomObstacles {
    pub fn validate(&self) -> Result<(), ObstacleError> {
        if self.min_count > self.max_count {
            return Err(ObstacleError::InvalidParameter(format!(
                "min_count {} exceeds max_count {}",
                self.min_count, self.max_count
            )));
        }
        if self.max_count > 0 && self.kinds.is_empty() {
            return Err(ObstacleError::InvalidParameter("no obstacle kinds to draw from".into()));
        }
        if !(self.window_inflate > 0.0 && self.leg_radius_fraction > 0.0) {
            return Err(ObstacleError::InvalidParameter("window_inflate and leg_radius_fraction must be positive".into()));
        }
        Ok(())
    }
}

impl FieldGenerator for RandomObstacles {
    fn generate(&self, start: Point3, target: Point3, seed: u64) -> Result<ObstacleField, ObstacleError> {
        self.validate()?;
        let window = OperationWindow::around(start, target, self.window_inflate)?;
        let mut r = rng::stream(seed, &[rng::tag::MISSION_SPAWN]);
        let total = r.random_range(self.min_count..=self.max_count);
        let mut kinds: Vec<ObstacleKind> =
            (0..total).map(|_| *self.kinds.choose(&mut r).expect("kinds checked non-empty")).collect();
        let mut params = self.params;
        params.radius_max = params.radius_max.min(self.leg_radius_fraction * start.distance(&target)).max(params.radius_min);
        // Legs too short for the drawn count lose obstacles until they fit.
        loop {
            let mut counts = KindCounts::default();
            for k in &kinds {
                counts.0[*k as usize] += 1;
            }
            match spawn_obstacles(window, counts, params, seed) {
                Err(ObstacleError::SpawnFailure(_)) if !kinds.is_empty() => {
                    kinds.pop();
                }
                other => return other,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MissionConfig {
    pub ga: GaConfig,
    pub pso: PsoConfig,
    pub spline: BSplineConfig,
    pub vehicle_speed: f64,
    pub t_available: f64,
    /// Fraction of the remaining budget withheld from each route plan to
    /// absorb detours.
    pub route_reserve: f64,
    pub compute_charge: ComputeCharge,
    /// Leg times are rounded to this many seconds before comparison and
    /// bookkeeping.
    pub clock_resolution: f64,
}

impl Default for MissionConfig {
    fn default() -> Self {
        Self {
            ga: GaConfig::default(),
            pso: PsoConfig::default(),
            spline: BSplineConfig::default(),
            vehicle_speed: crate::mission::DEFAULT_VEHICLE_SPEED,
            t_available: 10_800.0,
            route_reserve: 0.05,
            compute_charge: ComputeCharge::default(),
            clock_resolution: 1e-3,
        }
    }
}

impl MissionConfig {
    pub fn validate(&self) -> Result<(), SynchroError> {
        let bad = |m: String| Err(SynchroError::InvalidConfig(m));
        if !(self.vehicle_speed > 0.0 && self.vehicle_speed.is_finite()) {
            return bad(format!("vehicle_speed must be positive, got {}", self.vehicle_speed));
        }
        if !(self.t_available > 0.0 && self.t_available.is_finite()) {
            return bad(format!("t_available must be positive, got {}", self.t_available));
        }
        if !(0.0..1.0).contains(&self.route_reserve) {
            return bad(format!("route_reserve must lie in [0, 1), got {}", self.route_reserve));
        }
        if !(self.clock_resolution >= 0.0 && self.clock_resolution.is_finite()) {
            return bad(format!("clock_resolution must be non-negative, got {}", self.clock_resolution));
        }
        if let ComputeCharge::Synthetic(c) = self.compute_charge {
            if !(c >= 0.0 && c.is_finite()) {
                return bad(format!("synthetic compute charge must be non-negative, got {c}"));
            }
        }
        self.ga.validate()?;
        self.pso.validate()?;
        self.spline.validate()?;
        Ok(())
    }

    fn quantise(&self, t: f64) -> f64 {
        if self.clock_resolution > 0.0 {
            (t / self.clock_resolution).round() * self.clock_resolution
        } else {
            t
        }
    }
}

/// One route planner call.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrpRecord {
    pub call: usize,
    pub start: usize,
    pub dest: usize,
    pub n_tasks: usize,
    pub weight: f64,
    pub cost: f64,
    pub cpu_seconds: f64,
    /// Remaining budget when the call was made.
    pub t_available: f64,
    pub t_route: f64,
    pub valid: bool,
    pub route: Route,
}

/// One path planner call.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegRecord {
    /// Route planner call that produced the leg.
    pub route_call: usize,
    /// Position of the leg within its route, from 1.
    pub pp_call: usize,
    pub from: usize,
    pub to: usize,
    pub violation: f64,
    pub path_cost: f64,
    pub cpu_seconds: f64,
    pub t_path_flight: f64,
    pub t_expected: f64,
    /// Remaining budget after the leg.
    pub t_available: f64,
    pub replan: bool,
    pub lpp_flag: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MissionOutcome {
    Success { remaining: f64 },
    /// The budget went negative during a leg.
    BudgetExhausted { at: usize, deficit: f64 },
    /// No route from the current waypoint fits the remaining budget.
    NoFeasibleRoute { at: usize, t_available: f64 },
    /// Pruning cut the current waypoint off from the destination.
    Disconnected { at: usize },
}

impl MissionOutcome {
    pub fn is_success(&self) -> bool {
        matches!(self, MissionOutcome::Success { .. })
    }
}

impl fmt::Display for MissionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MissionOutcome::Success { remaining } => write!(f, "success, {} s remaining", sig(*remaining)),
            MissionOutcome::BudgetExhausted { at, deficit } => {
                write!(f, "budget exhausted on the leg into waypoint {at}, {} s short", sig(*deficit))
            }
            MissionOutcome::NoFeasibleRoute { at, t_available } => {
                write!(f, "no route from waypoint {at} fits the remaining {} s", sig(*t_available))
            }
            MissionOutcome::Disconnected { at } => write!(f, "waypoint {at} is cut off from the destination"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionLog {
    pub t_budget: f64,
    pub grp_calls: Vec<GrpRecord>,
    pub legs: Vec<LegRecord>,
    pub outcome: Option<MissionOutcome>,
}

pub const GRP_HEADER: &str = "call,start,dest,n_tasks,weight,cost,t_available,t_route,valid,route";
pub const LPP_HEADER: &str =
    "route,pp_call,from,to,violation,cost,t_path_flight,t_expected,t_available,replan_flag,lpp_flag";
pub const TIMING_HEADER: &str = "planner,call,cpu_seconds";

impl MissionLog {
    pub fn new(t_budget: f64) -> Self {
        Self { t_budget, grp_calls: Vec::new(), legs: Vec::new(), outcome: None }
    }

    /// Waypoints actually visited, in order.
    pub fn visited(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.legs.first().map(|l| vec![l.from]).unwrap_or_default();
        v.extend(self.legs.iter().map(|l| l.to));
        v
    }

    pub fn replan_count(&self) -> usize {
        self.grp_calls.len().saturating_sub(1)
    }

    /// Route planner calls, one row each.
    pub fn grp_table(&self) -> String {
        let mut s = format!("{GRP_HEADER}\n");
        for r in &self.grp_calls {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{}",
                r.call,
                r.start,
                r.dest,
                r.n_tasks,
                sig(r.weight),
                sig(r.cost),
                sig(r.t_available),
                sig(r.t_route),
                if r.valid { "yes" } else { "no" },
                r.route
            );
        }
        s
    }

    /// Path planner calls, one row each.
    pub fn lpp_table(&self) -> String {
        let mut s = format!("{LPP_HEADER}\n");
        for l in &self.legs {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{}",
                l.route_call,
                l.pp_call,
                l.from,
                l.to,
                sig(l.violation),
                sig(l.path_cost),
                sig(l.t_path_flight),
                sig(l.t_expected),
                sig(l.t_available),
                u8::from(l.replan),
                u8::from(l.lpp_flag)
            );
        }
        s
    }

    /// Measured planner times, kept apart from the reproducible tables.
    pub fn timing_table(&self) -> String {
        let mut s = format!("{TIMING_HEADER}\n");
        for r in &self.grp_calls {
            let _ = writeln!(s, "grp,{},{}", r.call, sig(r.cpu_seconds));
        }
        for (i, l) in self.legs.iter().enumerate() {
            let _ = writeln!(s, "lpp,{},{}", i + 1, sig(l.cpu_seconds));
        }
        s
    }
}

/// Mutable mission state between planner calls.
#[derive(Debug, Clone)]
pub struct MissionState {
    pub graph: MissionGraph,
    pub current: usize,
    pub t_available: f64,
    pub active_route: Route,
    /// Index of the next leg of `active_route`.
    pub next_leg: usize,
    pub log: MissionLog,
    pub t_compute: f64,
}

impl MissionState {
    pub fn new(graph: MissionGraph, t_available: f64) -> Self {
        let current = graph.start();
        Self {
            graph,
            current,
            t_available,
            active_route: Route::new(vec![current]),
            next_leg: 0,
            log: MissionLog::new(t_available),
            t_compute: 0.0,
        }
    }

    /// Number of route re-plans so far.
    pub fn replans(&self) -> usize {
        self.log.replan_count()
    }

    /// Books a flown leg: charges its time, prunes the edge, advances the
    /// vehicle and appends the record. A negative balance is a mission
    /// failure; the leg is still logged.
    pub fn apply_leg(&mut self, mut leg: LegRecord) -> Result<(), MissionOutcome> {
        let expected = self.active_route.as_slice().get(self.next_leg..self.next_leg + 2);
        assert_eq!(
            expected,
            Some(&[leg.from, leg.to][..]),
            "leg {}-{} is not the next edge of route {}",
            leg.from,
            leg.to,
            self.active_route
        );
        self.t_available -= leg.t_path_flight;
        leg.t_available = self.t_available;
        self.graph.remove_edge(leg.from, leg.to);
        self.current = leg.to;
        self.next_leg += 1;
        self.log.legs.push(leg);
        if self.t_available < 0.0 {
            return Err(MissionOutcome::BudgetExhausted { at: self.current, deficit: -self.t_available });
        }
        Ok(())
    }
}

/// Flies a mission from the graph's start to its destination.
///
/// Configuration problems are errors; mission failures are reported through
/// [`MissionLog::outcome`].
pub fn run_mission(
    g: &MissionGraph,
    fields: &dyn FieldGenerator,
    cfg: &MissionConfig,
    seed: u64,
) -> Result<MissionLog, SynchroError> {
    cfg.validate()?;
    let dest = g.dest();
    let mut st = MissionState::new(g.clone(), cfg.t_available);
    let mut leg_index = 0u64;
    let outcome = 'mission: loop {
        if st.current == dest {
            break MissionOutcome::Success { remaining: st.t_available };
        }
        if !st.graph.is_reachable(st.current, dest) {
            break MissionOutcome::Disconnected { at: st.current };
        }
        let call = st.log.grp_calls.len() + 1;
        let working = st.graph.with_start(st.current)?;
        let budget = st.t_available * (1.0 - cfg.route_reserve);
        let clock = Instant::now();
        let planned = plan_route(
            &working,
            budget,
            cfg.vehicle_speed,
            &cfg.ga,
            rng::derive_seed(seed, &[rng::tag::MISSION_GRP, call as u64]),
        );
        let grp_cpu = clock.elapsed().as_secs_f64();
        let outcome = match planned {
            Ok(o) => o,
            Err(GaError::Infeasible { best, .. }) => {
                st.log.grp_calls.push(GrpRecord {
                    call,
                    start: st.current,
                    dest,
                    n_tasks: best.summary.n_tasks,
                    weight: best.summary.weight,
                    cost: best.cost,
                    cpu_seconds: grp_cpu,
                    t_available: st.t_available,
                    t_route: best.summary.time,
                    valid: false,
                    route: best.route,
                });
                break MissionOutcome::NoFeasibleRoute { at: st.current, t_available: st.t_available };
            }
            Err(GaError::Unreachable { .. }) => break MissionOutcome::Disconnected { at: st.current },
            Err(e) => return Err(e.into()),
        };
        st.log.grp_calls.push(GrpRecord {
            call,
            start: st.current,
            dest,
            n_tasks: outcome.summary.n_tasks,
            weight: outcome.summary.weight,
            cost: outcome.cost,
            cpu_seconds: grp_cpu,
            t_available: st.t_available,
            t_route: outcome.summary.time,
            valid: true,
            route: outcome.route.clone(),
        });
        st.active_route = outcome.route;
        st.next_leg = 0;
        let mut pending_compute = cfg.compute_charge.charge(grp_cpu);

        let n_legs = st.active_route.len() - 1;
        for pp_call in 1..=n_legs {
            leg_index += 1;
            let (from, to) = {
                let r = st.active_route.as_slice();
                (r[st.next_leg], r[st.next_leg + 1])
            };
            let a = st.graph.position(from).ok_or(ModelError::UnknownWaypoint(from))?;
            let b = st.graph.position(to).ok_or(ModelError::UnknownWaypoint(to))?;
            let edge = *st.graph.edge_between(from, to).ok_or(ModelError::MissingEdge { from, to })?;
            let field = fields.generate(a, b, rng::derive_seed(seed, &[rng::tag::MISSION_SPAWN, leg_index]))?;
            let clock = Instant::now();
            let (path, _) = plan_path(
                a,
                b,
                &field,
                cfg.vehicle_speed,
                &cfg.spline,
                &cfg.pso,
                rng::derive_seed(seed, &[rng::tag::MISSION_LEG, leg_index]),
            )?;
            let lpp_cpu = clock.elapsed().as_secs_f64();
            let compute = pending_compute + cfg.compute_charge.charge(lpp_cpu);
            pending_compute = 0.0;
            st.t_compute += compute;

            let t_expected = cfg.quantise(edge_traverse_time(&edge, cfg.vehicle_speed)?);
            let t_path_flight = cfg.quantise(path.flight_time + edge.task.completion_time + compute);
            let replan = replan_check(t_path_flight, t_expected) == Decision::Replan;
            let leg = LegRecord {
                route_call: call,
                pp_call,
                from,
                to,
                violation: path.violation,
                path_cost: path.cost,
                cpu_seconds: lpp_cpu,
                t_path_flight,
                t_expected,
                t_available: st.t_available,
                replan,
                lpp_flag: !replan && pp_call < n_legs,
            };
            if let Err(failure) = st.apply_leg(leg) {
                break 'mission failure;
            }
            if replan {
                break;
            }
        }
    };
    st.log.outcome = Some(outcome);
    Ok(st.log)
}
