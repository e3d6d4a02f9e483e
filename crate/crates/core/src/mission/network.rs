use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{MissionGraph, ModelError, Task};
use crate::geometry::Point3;
use crate::rng;

/// Sampling ranges for edge tasks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TaskRanges {
    /// Inclusive integer priority range.
    pub priority: (u32, u32),
    pub risk: (f64, f64),
    pub completion_time: (f64, f64),
}

impl Default for TaskRanges {
    fn default() -> Self {
        Self { priority: (1, 10), risk: (1.0, 100.0), completion_time: (60.0, 600.0) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NetworkParams {
    pub n_waypoints: usize,
    /// Undirected edge count.
    pub n_edges: usize,
    /// Horizontal side of the square area, metres.
    pub area_side: f64,
    pub max_depth: f64,
    pub tasks: TaskRanges,
}

impl Default for NetworkParams {
    fn default() -> Self {
        Self { n_waypoints: 20, n_edges: 95, area_side: 10_000.0, max_depth: 100.0, tasks: TaskRanges::default() }
    }
}

impl NetworkParams {
    pub fn new(n_waypoints: usize, n_edges: usize) -> Self {
        Self { n_waypoints, n_edges, ..Self::default() }
    }

    fn check(&self) -> Result<(), ModelError> {
        let n = self.n_waypoints;
        if n < 2 {
            return Err(ModelError::InvalidParameter(format!("need at least 2 waypoints, got {n}")));
        }
        let max = n * (n - 1) / 2;
        if self.n_edges < n - 1 || self.n_edges > max {
            return Err(ModelError::InvalidParameter(format!(
                "{} edges cannot form a connected simple graph on {n} waypoints (need {}..={max})",
                self.n_edges,
                n - 1
            )));
        }
        let t = &self.tasks;
        if t.priority.0 == 0 || t.priority.0 > t.priority.1 {
            return Err(ModelError::InvalidParameter(format!("bad priority range {:?}", t.priority)));
        }
        if !(t.risk.0 > 0.0 && t.risk.0 <= t.risk.1 && t.risk.1 <= 100.0) {
            return Err(ModelError::InvalidParameter(format!("bad risk range {:?}", t.risk)));
        }
        if !(t.completion_time.0 >= 0.0 && t.completion_time.0 <= t.completion_time.1) {
            return Err(ModelError::InvalidParameter(format!(
                "bad completion time range {:?}",
                t.completion_time
            )));
        }
        if !(self.area_side > 0.0 && self.max_depth >= 0.0) {
            return Err(ModelError::InvalidParameter("area dimensions must be positive".into()));
        }
        Ok(())
    }
}

fn uniform(rng: &mut impl Rng, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo { rng.random_range(lo..hi) } else { lo }
}

/// Random connected network: a random spanning tree plus uniformly chosen
/// extra edges. Waypoint 0 is the start, the last waypoint the destination.
pub fn generate_random_network(params: &NetworkParams, seed: u64) -> Result<MissionGraph, ModelError> {
    params.check()?;
    let n = params.n_waypoints;
    let mut rng = rng::stream(seed, &[rng::tag::NETWORK]);

    let positions: Vec<Point3> = (0..n)
        .map(|_| {
            Point3::new(
                uniform(&mut rng, (0.0, params.area_side)),
                uniform(&mut rng, (0.0, params.area_side)),
                uniform(&mut rng, (0.0, params.max_depth)),
            )
        })
        .collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut present = vec![false; n * n];
    let mut pairs = Vec::with_capacity(params.n_edges);
    for k in 1..n {
        let a = order[k];
        let b = order[rng.random_range(0..k)];
        present[a * n + b] = true;
        present[b * n + a] = true;
        pairs.push((a.min(b), a.max(b)));
    }
    let mut spare: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|&(a, b)| !present[a * n + b])
        .collect();
    spare.shuffle(&mut rng);
    pairs.extend(spare.into_iter().take(params.n_edges - (n - 1)));

    let t = params.tasks;
    let edges: Vec<(usize, usize, Task)> = pairs
        .into_iter()
        .map(|(a, b)| {
            let task = Task {
                priority: rng.random_range(t.priority.0..=t.priority.1) as f64,
                risk: uniform(&mut rng, t.risk),
                completion_time: uniform(&mut rng, t.completion_time),
            };
            (a, b, task)
        })
        .collect();
    MissionGraph::new(positions, edges, 0, n - 1)
}
