//! Local path planner: particle swarm optimisation of a B-spline path between
//! two waypoints through a moving obstacle field.

mod bounds;
mod bspline;

use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bounds::{control_point_bounds, division_points};
pub use bspline::{
    basis_functions, bspline_curve, clamped_knots, path_flight_time, path_length, BSplineConfig, BasisTable,
};

use crate::exec::Execution;
use crate::geometry::{Aabb, Point3};
use crate::obstacles::{time_indexed_violation, ObstacleField};
use crate::rng;
use crate::textfmt::sig;

#[derive(Debug, Error)]
pub enum PathError {
    #[error("invalid path parameter: {0}")]
    InvalidParameter(String),
}

/// Inertia weight schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Inertia {
    Constant(f64),
    /// Linear decay from the first value at iteration 1 to the second at the last.
    Linear(f64, f64),
}

impl Inertia {
    pub fn at(&self, iteration: usize, iterations: usize) -> f64 {
        match *self {
            Inertia::Constant(w) => w,
            Inertia::Linear(a, b) => {
                if iterations <= 1 {
                    a
                } else {
                    a + (b - a) * (iteration - 1) as f64 / (iterations - 1) as f64
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PsoConfig {
    pub swarm_size: usize,
    pub iterations: usize,
    pub inertia: Inertia,
    pub c1: f64,
    pub c2: f64,
    /// Weight of the collision violation in the cost.
    pub penalty_weight: f64,
    /// Velocity limit per coordinate, as a fraction of the box width.
    pub velocity_clamp: f64,
    /// Lateral half-width of the control point boxes, as a fraction of the
    /// start-target distance.
    pub corridor_ratio: f64,
    pub max_vertical_half_width: f64,
    /// Steps of obstacle prediction used when scoring a path.
    pub prediction_horizon: usize,
    /// Start one particle on the straight segment.
    pub seed_straight_line: bool,
    /// Re-score personal bests against the current field every iteration, so
    /// the swarm does not chase memories the obstacles have since moved onto.
    pub rescore_memory: bool,
    pub execution: Execution,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            swarm_size: 150,
            iterations: 100,
            inertia: Inertia::Constant(0.72),
            c1: 2.0,
            c2: 2.0,
            penalty_weight: 100.0,
            velocity_clamp: 0.2,
            corridor_ratio: 0.5,
            max_vertical_half_width: 100.0,
            prediction_horizon: 10,
            seed_straight_line: true,
            rescore_memory: true,
            execution: Execution::default(),
        }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<(), PathError> {
        let bad = |m: String| Err(PathError::InvalidParameter(m));
        if self.swarm_size == 0 {
            return bad("swarm size must be positive".into());
        }
        let w_ok = |w: f64| w.is_finite() && w >= 0.0;
        let inertia_ok = match self.inertia {
            Inertia::Constant(w) => w_ok(w),
            Inertia::Linear(a, b) => w_ok(a) && w_ok(b),
        };
        if !inertia_ok {
            return bad(format!("invalid inertia {:?}", self.inertia));
        }
        for (name, v) in [
            ("c1", self.c1),
            ("c2", self.c2),
            ("penalty_weight", self.penalty_weight),
            ("corridor_ratio", self.corridor_ratio),
            ("max_vertical_half_width", self.max_vertical_half_width),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{name} must be non-negative, got {v}"));
            }
        }
        if !(self.velocity_clamp > 0.0 && self.velocity_clamp.is_finite()) {
            return bad(format!("velocity_clamp must be positive, got {}", self.velocity_clamp));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BSplinePath {
    pub control_points: Vec<Point3>,
    pub samples: Vec<Point3>,
    pub length: f64,
    pub flight_time: f64,
    /// Time-indexed collision violation against the field it was scored on.
    pub violation: f64,
    pub cost: f64,
}

impl BSplinePath {
    /// `index,x,y,z` per sample.
    pub fn trajectory_csv(&self) -> String {
        let mut s = String::from("index,x,y,z\n");
        for (i, p) in self.samples.iter().enumerate() {
            s.push_str(&format!("{i},{},{},{}\n", sig(p.x), sig(p.y), sig(p.z)));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRunStats {
    /// G-best cost after each iteration; index 0 is the initial swarm.
    pub best_cost: Vec<f64>,
    pub mean_cost: Vec<f64>,
    pub best_violation: Vec<f64>,
    /// Mean violation over the swarm's current positions.
    pub mean_violation: Vec<f64>,
    pub iterations: usize,
    pub cpu_seconds: f64,
    /// Field state against which the G-best was scored.
    pub best_field: ObstacleField,
    /// Field state after the last iteration.
    pub final_field: ObstacleField,
}

struct Problem<'a> {
    start: Point3,
    target: Point3,
    lo: Vec<f64>,
    hi: Vec<f64>,
    table: BasisTable,
    speed: f64,
    straight_time: f64,
    cfg: &'a PsoConfig,
}

struct Scored {
    control: Vec<Point3>,
    samples: Vec<Point3>,
    length: f64,
    violation: f64,
    cost: f64,
}

impl Problem<'_> {
    fn control(&self, x: &[f64]) -> Vec<Point3> {
        let mut c = Vec::with_capacity(x.len() / 3 + 2);
        c.push(self.start);
        c.extend(x.chunks_exact(3).map(|v| Point3::new(v[0], v[1], v[2])));
        c.push(self.target);
        c
    }

    fn score(&self, x: &[f64], predicted: &[ObstacleField]) -> Scored {
        let control = self.control(x);
        let samples = self.table.evaluate(&control);
        let length = path_length(&samples);
        let violation = time_indexed_violation(&samples, predicted);
        let cost = length / self.speed / self.straight_time + self.cfg.penalty_weight * violation;
        Scored { control, samples, length, violation, cost }
    }
}

#[derive(Clone)]
struct Particle {
    x: Vec<f64>,
    v: Vec<f64>,
    best_x: Vec<f64>,
    best_cost: f64,
    cost: f64,
    violation: f64,
}

fn boxes_to_vectors(boxes: &[Aabb]) -> (Vec<f64>, Vec<f64>) {
    let inner = &boxes[1..boxes.len() - 1];
    let lo = inner.iter().flat_map(|b| b.min.to_array()).collect();
    let hi = inner.iter().flat_map(|b| b.max.to_array()).collect();
    (lo, hi)
}

/// Plans a B-spline path from `start` to `target`.
///
/// The field advances one step per iteration; each candidate is scored on its
/// flight time relative to the straight segment plus the weighted collision
/// violation against the predicted obstacle states.
pub fn plan_path(
    start: Point3,
    target: Point3,
    field: &ObstacleField,
    vehicle_speed: f64,
    spline: &BSplineConfig,
    cfg: &PsoConfig,
    seed: u64,
) -> Result<(BSplinePath, PathRunStats), PathError> {
    cfg.validate()?;
    let table = BasisTable::new(spline)?;
    if !(vehicle_speed > 0.0 && vehicle_speed.is_finite()) {
        return Err(PathError::InvalidParameter(format!("vehicle speed must be positive, got {vehicle_speed}")));
    }
    let distance = start.distance(&target);
    let boxes = control_point_bounds(
        start,
        target,
        spline.n_control_points,
        cfg.corridor_ratio * distance,
        cfg.max_vertical_half_width,
    )?;
    let clock = Instant::now();
    let (lo, hi) = boxes_to_vectors(&boxes);
    let vmax: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| cfg.velocity_clamp * (h - l)).collect();
    let problem =
        Problem { start, target, lo, hi, table, speed: vehicle_speed, straight_time: distance / vehicle_speed, cfg };
    let dim = problem.lo.len();

    let mut field = field.clone();
    let mut predicted = field.predict_states(cfg.prediction_horizon);

    let mut swarm: Vec<Particle> = cfg.execution.map_range(cfg.swarm_size, |i| {
        let mut r = rng::stream(seed, &[rng::tag::PSO_INIT, i as u64]);
        let x: Vec<f64> = if i == 0 && cfg.seed_straight_line {
            // Midpoint of each box's along-track span lies on the segment.
            let n = spline.n_control_points;
            (1..n - 1)
                .flat_map(|k| start.lerp(&target, (k as f64 - 0.5) / (n - 1) as f64).to_array())
                .collect()
        } else {
            (0..dim)
                .map(|d| {
                    let (l, h) = (problem.lo[d], problem.hi[d]);
                    if h > l { r.random_range(l..=h) } else { l }
                })
                .collect()
        };
        let v = vmax.iter().map(|&m| if m > 0.0 { r.random_range(-m..=m) } else { 0.0 }).collect();
        let s = problem.score(&x, &predicted);
        Particle { best_x: x.clone(), x, v, best_cost: s.cost, cost: s.cost, violation: s.violation }
    });

    let pick_best = |swarm: &[Particle]| {
        swarm
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.best_cost.total_cmp(&b.1.best_cost))
            .map(|(i, _)| i)
            .expect("non-empty swarm")
    };
    // The swarm follows `guide`, the best memory under the current field; the
    // reported best is the best path seen in any iteration.
    let mut guide = swarm[pick_best(&swarm)].best_x.clone();
    let mut gbest = problem.score(&guide, &predicted);
    let mut best_field = field.clone();

    let mut stats = PathRunStats {
        best_cost: Vec::with_capacity(cfg.iterations + 1),
        mean_cost: Vec::with_capacity(cfg.iterations + 1),
        best_violation: Vec::with_capacity(cfg.iterations + 1),
        mean_violation: Vec::with_capacity(cfg.iterations + 1),
        iterations: 0,
        cpu_seconds: 0.0,
        best_field: field.clone(),
        final_field: field.clone(),
    };
    let record = |swarm: &[Particle], gbest: &Scored, stats: &mut PathRunStats| {
        let n = swarm.len() as f64;
        stats.best_cost.push(gbest.cost);
        stats.best_violation.push(gbest.violation);
        stats.mean_cost.push(swarm.iter().map(|p| p.cost).sum::<f64>() / n);
        stats.mean_violation.push(swarm.iter().map(|p| p.violation).sum::<f64>() / n);
    };
    record(&swarm, &gbest, &mut stats);

    for it in 1..=cfg.iterations {
        field.step_in_place();
        predicted = field.predict_states(cfg.prediction_horizon);
        let w = cfg.inertia.at(it, cfg.iterations);
        let g = &guide;
        cfg.execution.for_each_mut(&mut swarm, |i, p| {
            let mut r = rng::stream(seed, &[rng::tag::PSO_STEP, it as u64, i as u64]);
            for d in 0..dim {
                let (r1, r2): (f64, f64) = (r.random(), r.random());
                let v = w * p.v[d] + cfg.c1 * r1 * (p.best_x[d] - p.x[d]) + cfg.c2 * r2 * (g[d] - p.x[d]);
                p.v[d] = v.clamp(-vmax[d], vmax[d]);
                p.x[d] = (p.x[d] + p.v[d]).clamp(problem.lo[d], problem.hi[d]);
            }
            if cfg.rescore_memory {
                p.best_cost = problem.score(&p.best_x, &predicted).cost;
            }
            let s = problem.score(&p.x, &predicted);
            p.cost = s.cost;
            p.violation = s.violation;
            if s.cost < p.best_cost {
                p.best_cost = s.cost;
                p.best_x.clone_from(&p.x);
            }
        });
        let bi = pick_best(&swarm);
        guide.clone_from(&swarm[bi].best_x);
        if swarm[bi].best_cost < gbest.cost {
            gbest = problem.score(&guide, &predicted);
            best_field = field.clone();
        }
        record(&swarm, &gbest, &mut stats);
        stats.iterations = it;
    }

    stats.cpu_seconds = clock.elapsed().as_secs_f64();
    stats.best_field = best_field;
    stats.final_field = field;
    let path = BSplinePath {
        control_points: gbest.control,
        samples: gbest.samples,
        length: gbest.length,
        flight_time: gbest.length / vehicle_speed,
        violation: gbest.violation,
        cost: gbest.cost,
    };
    Ok((path, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::obstacles::{collision_violation, Obstacle, ObstacleKind, OperationWindow};

    const SPEED: f64 = 3.0;

    fn ends() -> (Point3, Point3) {
        (Point3::new(0.0, 0.0, 50.0), Point3::new(2000.0, 0.0, 50.0))
    }

    fn empty_field() -> ObstacleField {
        let (s, t) = ends();
        ObstacleField::empty(OperationWindow::around(s, t, 0.25).unwrap())
    }

    fn small() -> PsoConfig {
        PsoConfig { swarm_size: 60, iterations: 60, ..Default::default() }
    }

    #[test]
    fn empty_field_gives_near_straight_path() {
        let (s, t) = ends();
        for seed_line in [true, false] {
            let cfg = PsoConfig { seed_straight_line: seed_line, ..Default::default() };
            let (p, _) = plan_path(s, t, &empty_field(), SPEED, &BSplineConfig::default(), &cfg, 3).unwrap();
            let straight = s.distance(&t) / SPEED;
            assert!(p.flight_time <= 1.01 * straight, "seeded={seed_line}: {} vs {straight}", p.flight_time);
            assert!(p.flight_time >= straight - 1e-9);
            assert_eq!(p.violation, 0.0);
        }
    }

    #[test]
    fn straight_seed_is_exactly_straight() {
        let (s, t) = ends();
        let (p, _) = plan_path(s, t, &empty_field(), SPEED, &BSplineConfig::default(), &small(), 1).unwrap();
        assert!((p.length - s.distance(&t)).abs() < 1e-6);
    }

    #[test]
    fn centred_obstacle_forces_detour() {
        let (s, t) = ends();
        let mut field = empty_field();
        field.obstacles.push(Obstacle {
            kind: ObstacleKind::StaticKnown,
            position: s.lerp(&t, 0.5),
            radius: 150.0,
            halo: 0.0,
            base_radius: 150.0,
            radius_spread: 0.0,
            noise_state: 0.0,
        });
        let (p, stats) = plan_path(s, t, &field, SPEED, &BSplineConfig::default(), &PsoConfig::default(), 5).unwrap();
        assert_eq!(p.violation, 0.0);
        assert_eq!(collision_violation(&p.samples, &field), 0.0);
        assert!(p.length > s.distance(&t) + 1.0);
        assert!(stats.best_violation.last().copied().unwrap() == 0.0);
    }

    #[test]
    fn best_cost_never_increases_and_ends_pinned() {
        let (s, t) = (Point3::new(100.0, -300.0, 20.0), Point3::new(-900.0, 1200.0, 80.0));
        let field = ObstacleField::empty(OperationWindow::around(s, t, 0.25).unwrap());
        let spline = BSplineConfig::default();
        let cfg = PsoConfig { seed_straight_line: false, ..small() };
        let (p, stats) = plan_path(s, t, &field, SPEED, &spline, &cfg, 9).unwrap();
        assert_eq!(stats.best_cost.len(), cfg.iterations + 1);
        assert!(stats.best_cost.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(p.samples[0], s);
        assert!(p.samples.last().unwrap().distance(&t) < 1e-9);
        let boxes = control_point_bounds(s, t, 8, cfg.corridor_ratio * s.distance(&t), cfg.max_vertical_half_width)
            .unwrap();
        for (c, b) in p.control_points.iter().zip(&boxes) {
            assert!(b.contains(c), "{c:?} outside {b:?}");
        }
    }

    #[test]
    fn modes_agree_and_seed_repeats() {
        let (s, t) = ends();
        let spline = BSplineConfig::default();
        let seq = PsoConfig { execution: Execution::Sequential, seed_straight_line: false, ..small() };
        let par = PsoConfig { execution: Execution::Parallel, ..seq };
        let a = plan_path(s, t, &empty_field(), SPEED, &spline, &seq, 4).unwrap().0;
        let b = plan_path(s, t, &empty_field(), SPEED, &spline, &par, 4).unwrap().0;
        let c = plan_path(s, t, &empty_field(), SPEED, &spline, &par, 5).unwrap().0;
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn inertia_schedule() {
        assert_eq!(Inertia::Constant(0.7).at(5, 10), 0.7);
        let l = Inertia::Linear(0.9, 0.4);
        assert_eq!(l.at(1, 11), 0.9);
        assert!((l.at(11, 11) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let (s, t) = ends();
        let sp = BSplineConfig::default();
        assert!(plan_path(s, s, &empty_field(), SPEED, &sp, &small(), 0).is_err());
        assert!(plan_path(s, t, &empty_field(), 0.0, &sp, &small(), 0).is_err());
        let bad = PsoConfig { swarm_size: 0, ..small() };
        assert!(plan_path(s, t, &empty_field(), SPEED, &sp, &bad, 0).is_err());
    }
}
