use rand::Rng;

use super::GaError;
use crate::mission::{route_time, MissionGraph, Route};

/// Priority assigned to visited nodes; below any admissible priority.
pub const VISITED_PRIORITY: f64 = -1.0e4;
pub const PRIORITY_RANGE: (f64, f64) = (-100.0, 100.0);

/// Per-node scores steering the greedy route decoder.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorityVector(Vec<f64>);

impl PriorityVector {
    pub fn new(values: Vec<f64>) -> Result<Self, GaError> {
        if let Some(v) = values
            .iter()
            .find(|v| !(v.is_finite() && (PRIORITY_RANGE.0..=PRIORITY_RANGE.1).contains(*v)))
        {
            return Err(GaError::InvalidConfig(format!("priority {v} outside [-100, 100]")));
        }
        Ok(Self(values))
    }

    pub fn random(n: usize, rng: &mut impl Rng) -> Self {
        Self((0..n).map(|_| rng.random_range(PRIORITY_RANGE.0..=PRIORITY_RANGE.1)).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

/// Decodes a priority vector into a simple start-to-destination route.
///
/// From the current node the walk moves to the unvisited neighbour with the
/// highest priority; visited nodes are marked with [`VISITED_PRIORITY`]. When
/// the walk stalls at a node with no unvisited neighbour, the stalled node is
/// replaced by the destination if its predecessor is adjacent to it; otherwise
/// the walk steps back and continues from the predecessor. The result is
/// structurally feasible whenever the destination is reachable.
pub fn build_feasible_route(pv: &PriorityVector, g: &MissionGraph) -> Route {
    let n = g.node_count();
    let (start, dest) = (g.start(), g.dest());
    let mut prio: Vec<f64> = (0..n).map(|i| pv.0.get(i).copied().unwrap_or(0.0)).collect();
    prio[start] = VISITED_PRIORITY;
    let mut path = vec![start];
    while let Some(&u) = path.last() {
        if u == dest {
            break;
        }
        let next = g
            .neighbors(u)
            .filter(|&v| prio[v] > VISITED_PRIORITY)
            .fold(None::<usize>, |best, v| match best {
                Some(b) if prio[b] >= prio[v] => Some(b),
                _ => Some(v),
            });
        if let Some(v) = next {
            prio[v] = VISITED_PRIORITY;
            path.push(v);
            continue;
        }
        let len = path.len();
        if len >= 2 && g.is_adjacent(path[len - 2], dest) {
            path[len - 1] = dest;
            break;
        }
        path.pop();
    }
    if path.is_empty() {
        // Destination unreachable.
        return Route::new(vec![start]);
    }
    Route::new(path)
}

/// Cuts an over-budget route back to its longest prefix that can hop straight
/// to the destination within the budget. Routes already within budget, or
/// with no such prefix, are returned unchanged.
pub fn truncate_to_budget(route: Route, g: &MissionGraph, t_available: f64, vehicle_speed: f64) -> Route {
    match route_time(&route, g, vehicle_speed) {
        Ok(t) if t < t_available => return route,
        Err(_) => return route,
        _ => {}
    }
    let seq = route.as_slice();
    let dest = g.dest();
    let mut elapsed = 0.0;
    let mut best = None;
    for k in 0..seq.len().saturating_sub(1) {
        if k > 0 {
            let Some(e) = g.edge_between(seq[k - 1], seq[k]) else { break };
            elapsed += e.distance / vehicle_speed + e.task.completion_time;
        }
        if let Some(e) = g.edge_between(seq[k], dest) {
            if elapsed + e.distance / vehicle_speed + e.task.completion_time < t_available {
                best = Some(k);
            }
        }
    }
    match best {
        Some(k) => {
            let mut s = seq[..=k].to_vec();
            s.push(dest);
            Route::new(s)
        }
        None => route,
    }
}
