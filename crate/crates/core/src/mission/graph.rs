use serde::{Deserialize, Serialize};

use super::{edge_distance, ModelError};
use crate::geometry::Point3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub id: usize,
    pub position: Point3,
}

/// Work attached to an edge: priority, risk percentage and completion time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub priority: f64,
    /// Percentage in `(0, 100]`.
    pub risk: f64,
    /// Seconds spent on the task, on top of transit.
    pub completion_time: f64,
}

impl Task {
    pub fn new(priority: f64, risk: f64, completion_time: f64) -> Result<Self, ModelError> {
        let task = Self { priority, risk, completion_time };
        task.check()?;
        Ok(task)
    }

    fn check(&self) -> Result<(), ModelError> {
        if !(self.priority > 0.0 && self.priority.is_finite()) {
            return Err(ModelError::InvalidParameter(format!(
                "task priority must be positive, got {}",
                self.priority
            )));
        }
        if !(self.risk > 0.0 && self.risk <= 100.0) {
            return Err(ModelError::InvalidParameter(format!(
                "task risk must lie in (0, 100], got {}",
                self.risk
            )));
        }
        if !(self.completion_time >= 0.0 && self.completion_time.is_finite()) {
            return Err(ModelError::InvalidParameter(format!(
                "task completion time must be >= 0, got {}",
                self.completion_time
            )));
        }
        Ok(())
    }

    /// Priority-to-risk ratio; the routing prize.
    pub fn weight(&self) -> f64 {
        self.priority / self.risk
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub distance: f64,
    pub task: Task,
}

impl Edge {
    pub fn weight(&self) -> f64 {
        self.task.weight()
    }

    pub fn connects(&self, a: usize, b: usize) -> bool {
        (self.from == a && self.to == b) || (self.from == b && self.to == a)
    }
}

/// Undirected waypoint graph with a designated start and destination.
///
/// Waypoint ids equal their index in `waypoints`. The adjacency matrix maps
/// each ordered pair to the index of the connecting edge, so lookups in either
/// direction hit the same [`Task`].
#[derive(Debug, Clone, PartialEq)]
pub struct MissionGraph {
    waypoints: Vec<Waypoint>,
    edges: Vec<Edge>,
    adjacency: Vec<Option<u32>>,
    start: usize,
    dest: usize,
}

impl MissionGraph {
    pub fn new(
        positions: Vec<Point3>,
        edges: impl IntoIterator<Item = (usize, usize, Task)>,
        start: usize,
        dest: usize,
    ) -> Result<Self, ModelError> {
        let n = positions.len();
        if let Some(p) = positions.iter().find(|p| !p.is_finite()) {
            return Err(ModelError::InvalidGraph(format!("non-finite coordinate {p:?}")));
        }
        if start >= n || dest >= n {
            return Err(ModelError::InvalidGraph(format!(
                "start {start} / dest {dest} outside {n} waypoints"
            )));
        }
        if start == dest {
            return Err(ModelError::InvalidGraph("start and destination coincide".into()));
        }
        let waypoints: Vec<Waypoint> = positions
            .into_iter()
            .enumerate()
            .map(|(id, position)| Waypoint { id, position })
            .collect();
        let mut graph = Self {
            waypoints,
            edges: Vec::new(),
            adjacency: vec![None; n * n],
            start,
            dest,
        };
        for (a, b, task) in edges {
            graph.insert_edge(a, b, task)?;
        }
        Ok(graph)
    }

    fn insert_edge(&mut self, a: usize, b: usize, task: Task) -> Result<(), ModelError> {
        let n = self.waypoints.len();
        if a >= n || b >= n {
            return Err(ModelError::InvalidGraph(format!("edge {a}-{b} references unknown waypoint")));
        }
        if a == b {
            return Err(ModelError::InvalidGraph(format!("self-loop at waypoint {a}")));
        }
        if self.adjacency[a * n + b].is_some() {
            return Err(ModelError::InvalidGraph(format!("duplicate edge {a}-{b}")));
        }
        task.check()?;
        let idx = self.edges.len() as u32;
        self.edges.push(Edge {
            from: a,
            to: b,
            distance: edge_distance(&self.waypoints[a].position, &self.waypoints[b].position),
            task,
        });
        self.adjacency[a * n + b] = Some(idx);
        self.adjacency[b * n + a] = Some(idx);
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.waypoints.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Non-zero entries of the adjacency matrix (two per undirected edge).
    pub fn arc_count(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn dest(&self) -> usize {
        self.dest
    }

    pub fn waypoints(&self) -> &[Waypoint] {
        &self.waypoints
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn position(&self, id: usize) -> Option<Point3> {
        self.waypoints.get(id).map(|w| w.position)
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.edge_index(a, b).is_some()
    }

    fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        let n = self.waypoints.len();
        if a >= n || b >= n {
            return None;
        }
        self.adjacency[a * n + b].map(|i| i as usize)
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<&Edge> {
        self.edge_index(a, b).map(|i| &self.edges[i])
    }

    pub fn neighbors(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        let n = self.waypoints.len();
        let row = if a < n { &self.adjacency[a * n..(a + 1) * n] } else { &[][..] };
        row.iter()
            .enumerate()
            .filter_map(|(b, e)| e.map(|_| b))
    }

    /// Largest `risk / priority` ratio over all edges (0 for an edgeless graph).
    pub fn max_risk_ratio(&self) -> f64 {
        self.edges
            .iter()
            .map(|e| e.task.risk / e.task.priority)
            .fold(0.0, f64::max)
    }

    /// Removes the edge `a`-`b`, returning it if it existed.
    pub fn remove_edge(&mut self, a: usize, b: usize) -> Option<Edge> {
        let n = self.waypoints.len();
        let idx = self.edge_index(a, b)?;
        let removed = self.edges.swap_remove(idx);
        self.adjacency[removed.from * n + removed.to] = None;
        self.adjacency[removed.to * n + removed.from] = None;
        if idx < self.edges.len() {
            let moved = self.edges[idx];
            self.adjacency[moved.from * n + moved.to] = Some(idx as u32);
            self.adjacency[moved.to * n + moved.from] = Some(idx as u32);
        }
        Some(removed)
    }

    /// Same network with a different start waypoint.
    pub fn with_start(&self, start: usize) -> Result<Self, ModelError> {
        if start >= self.node_count() {
            return Err(ModelError::UnknownWaypoint(start));
        }
        if start == self.dest {
            return Err(ModelError::InvalidGraph("start and destination coincide".into()));
        }
        Ok(Self { start, ..self.clone() })
    }

    /// Breadth-first reachability from `from` to `to`.
    pub fn is_reachable(&self, from: usize, to: usize) -> bool {
        let n = self.node_count();
        if from >= n || to >= n {
            return false;
        }
        let mut seen = vec![false; n];
        let mut queue = std::collections::VecDeque::from([from]);
        seen[from] = true;
        while let Some(u) = queue.pop_front() {
            if u == to {
                return true;
            }
            for v in self.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        false
    }

    pub fn to_document(&self) -> GraphDocument {
        GraphDocument {
            start: self.start,
            dest: self.dest,
            waypoints: self.waypoints.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeRecord {
                    from: e.from,
                    to: e.to,
                    priority: e.task.priority,
                    risk: e.task.risk,
                    completion_time: e.task.completion_time,
                })
                .collect(),
        }
    }

    pub fn from_document(doc: GraphDocument) -> Result<Self, ModelError> {
        for (i, w) in doc.waypoints.iter().enumerate() {
            if w.id != i {
                return Err(ModelError::InvalidGraph(format!(
                    "waypoint ids must be 0..n in order; record {i} has id {}",
                    w.id
                )));
            }
        }
        Self::new(
            doc.waypoints.iter().map(|w| w.position).collect(),
            doc.edges
                .iter()
                .map(|e| (e.from, e.to, Task { priority: e.priority, risk: e.risk, completion_time: e.completion_time })),
            doc.start,
            doc.dest,
        )
    }

    /// Pretty-printed JSON document; floats round-trip exactly.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("graph document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        Self::from_document(serde_json::from_str(text)?)
    }
}

/// Serialized form of a [`MissionGraph`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub start: usize,
    pub dest: usize,
    pub waypoints: Vec<Waypoint>,
    pub edges: Vec<EdgeRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub from: usize,
    pub to: usize,
    pub priority: f64,
    pub risk: f64,
    pub completion_time: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn task() -> Task {
        Task::new(5.0, 10.0, 60.0).unwrap()
    }

    fn square() -> MissionGraph {
        let pts = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(100.0, 0.0, 0.0),
            Point3::new(100.0, 100.0, 0.0),
            Point3::new(0.0, 100.0, 0.0),
        ];
        MissionGraph::new(pts, [(0, 1, task()), (1, 2, task()), (2, 3, task()), (0, 3, task())], 0, 2)
            .unwrap()
    }

    #[test]
    fn rejects_malformed_graphs() {
        let pts = vec![Point3::ORIGIN, Point3::new(1.0, 0.0, 0.0)];
        assert!(MissionGraph::new(pts.clone(), [(0, 0, task())], 0, 1).is_err());
        assert!(MissionGraph::new(pts.clone(), [(0, 1, task()), (1, 0, task())], 0, 1).is_err());
        assert!(MissionGraph::new(pts.clone(), [(0, 2, task())], 0, 1).is_err());
        assert!(MissionGraph::new(pts.clone(), [], 1, 1).is_err());
        assert!(Task::new(1.0, 0.0, 0.0).is_err());
        assert!(Task::new(0.0, 5.0, 0.0).is_err());
        assert!(Task::new(1.0, 101.0, 0.0).is_err());
        assert!(Task::new(1.0, 5.0, -1.0).is_err());
    }

    #[test]
    fn adjacency_is_symmetric_and_removal_keeps_it_consistent() {
        let mut g = square();
        assert!(g.is_adjacent(0, 1) && g.is_adjacent(1, 0));
        assert!(!g.is_adjacent(0, 2));
        assert_eq!(g.arc_count(), 8);
        let e = g.remove_edge(1, 0).unwrap();
        assert!(e.connects(0, 1));
        assert!(!g.is_adjacent(0, 1) && !g.is_adjacent(1, 0));
        for e in g.edges() {
            assert!(g.edge_between(e.from, e.to).unwrap().connects(e.from, e.to));
            assert!(g.edge_between(e.to, e.from).unwrap().connects(e.from, e.to));
        }
        assert_eq!(g.neighbors(0).collect::<Vec<_>>(), vec![3]);
        assert!(g.is_reachable(0, 2));
        g.remove_edge(0, 3);
        assert!(!g.is_reachable(0, 2));
    }

    #[test]
    fn weight_is_exact_ratio() {
        let t = Task::new(10.0, 2.0, 0.0).unwrap();
        assert_eq!(t.weight(), 5.0);
    }

    #[test]
    fn json_round_trip() {
        let g = square();
        let back = MissionGraph::from_json(&g.to_json()).unwrap();
        assert_eq!(g, back);
    }
}
