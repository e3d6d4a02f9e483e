//! Graph-world data model and deterministic routing arithmetic.
//!
//! The operating area is a set of waypoints joined by undirected edges; every
//! edge carries a [`Task`]. Routes are simple waypoint sequences from the start
//! to the destination, scored by traversal time and task weight.

mod graph;
mod network;
mod route;

pub use graph::{Edge, EdgeRecord, GraphDocument, MissionGraph, Task, Waypoint};
pub use network::{generate_random_network, NetworkParams, TaskRanges};
pub use route::{
    edge_traverse_time, route_summary, route_time, route_weight, validate_route,
    FeasibilityReport, Route, RouteSummary, RouteViolation,
};

use crate::geometry::Point3;

/// Default water-referenced vehicle speed, m/s.
pub const DEFAULT_VEHICLE_SPEED: f64 = 3.0;

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("no edge between waypoints {from} and {to}")]
    MissingEdge { from: usize, to: usize },
    #[error("unknown waypoint {0}")]
    UnknownWaypoint(usize),
    #[error("graph document: {0}")]
    Document(#[from] serde_json::Error),
}

/// Euclidean 3-D distance between two waypoint positions.
pub fn edge_distance(a: &Point3, b: &Point3) -> f64 {
    a.distance(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_examples() {
        let o = Point3::ORIGIN;
        assert_eq!(edge_distance(&o, &o), 0.0);
        assert_eq!(edge_distance(&o, &Point3::new(3.0, 4.0, 0.0)), 5.0);
        assert_eq!(
            edge_distance(&Point3::new(1.0, 2.0, 2.0), &Point3::new(4.0, 6.0, 14.0)),
            13.0
        );
    }
}
