use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Edge, MissionGraph, ModelError};

/// Ordered waypoint sequence; also the GA chromosome.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Route {
    sequence: Vec<usize>,
}

impl Route {
    pub fn new(sequence: Vec<usize>) -> Self {
        Self { sequence }
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.sequence
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.sequence
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    pub fn first(&self) -> Option<usize> {
        self.sequence.first().copied()
    }

    pub fn last(&self) -> Option<usize> {
        self.sequence.last().copied()
    }

    /// Consecutive waypoint pairs.
    pub fn legs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.sequence.windows(2).map(|w| (w[0], w[1]))
    }

    fn edges<'g>(&self, g: &'g MissionGraph) -> Result<Vec<&'g Edge>, ModelError> {
        self.legs()
            .map(|(a, b)| g.edge_between(a, b).ok_or(ModelError::MissingEdge { from: a, to: b }))
            .collect()
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for id in &self.sequence {
            if !first {
                f.write_str("-")?;
            }
            write!(f, "{id}")?;
            first = false;
        }
        Ok(())
    }
}

impl From<Vec<usize>> for Route {
    fn from(sequence: Vec<usize>) -> Self {
        Self::new(sequence)
    }
}

pub fn edge_traverse_time(edge: &Edge, vehicle_speed: f64) -> Result<f64, ModelError> {
    check_speed(vehicle_speed)?;
    Ok(edge.distance / vehicle_speed + edge.task.completion_time)
}

fn check_speed(vehicle_speed: f64) -> Result<(), ModelError> {
    if vehicle_speed > 0.0 && vehicle_speed.is_finite() {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter(format!(
            "vehicle speed must be positive, got {vehicle_speed}"
        )))
    }
}

/// Sum of edge traversal times (transit plus task time) along the route.
pub fn route_time(route: &Route, g: &MissionGraph, vehicle_speed: f64) -> Result<f64, ModelError> {
    check_speed(vehicle_speed)?;
    Ok(route
        .edges(g)?
        .iter()
        .map(|e| e.distance / vehicle_speed + e.task.completion_time)
        .sum())
}

/// Sum of task weights (priority / risk) over the route's edges.
pub fn route_weight(route: &Route, g: &MissionGraph) -> Result<f64, ModelError> {
    Ok(route.edges(g)?.iter().map(|e| e.weight()).sum())
}

/// Aggregate route figures reported by the planners.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RouteSummary {
    pub time: f64,
    pub weight: f64,
    pub distance: f64,
    pub n_tasks: usize,
}

pub fn route_summary(
    route: &Route,
    g: &MissionGraph,
    vehicle_speed: f64,
) -> Result<RouteSummary, ModelError> {
    check_speed(vehicle_speed)?;
    let edges = route.edges(g)?;
    Ok(RouteSummary {
        time: edges.iter().map(|e| e.distance / vehicle_speed + e.task.completion_time).sum(),
        weight: edges.iter().map(|e| e.weight()).sum(),
        distance: edges.iter().map(|e| e.distance).sum(),
        n_tasks: edges.len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum RouteViolation {
    Empty,
    WrongStart { found: usize },
    WrongEnd { found: usize },
    MissingEdge { from: usize, to: usize },
    RepeatedNode { node: usize },
    RepeatedEdge { from: usize, to: usize },
    TooLong { len: usize, max: usize },
    OverBudget { route_time: f64, available: f64 },
}

impl RouteViolation {
    /// Violations that make a sequence meaningless as a route, as opposed to
    /// one that merely runs over the time budget.
    pub fn is_structural(&self) -> bool {
        !matches!(self, RouteViolation::OverBudget { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeasibilityReport {
    pub violations: Vec<RouteViolation>,
    /// `None` when the route references a missing edge.
    pub route_time: Option<f64>,
}

impl FeasibilityReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn is_structurally_valid(&self) -> bool {
        !self.violations.iter().any(RouteViolation::is_structural)
    }
}

/// Checks a route against every feasibility criterion and lists the failures.
pub fn validate_route(
    route: &Route,
    g: &MissionGraph,
    t_available: f64,
    vehicle_speed: f64,
) -> FeasibilityReport {
    let mut report = FeasibilityReport::default();
    let seq = route.as_slice();
    let (Some(&first), Some(&last)) = (seq.first(), seq.last()) else {
        report.violations.push(RouteViolation::Empty);
        return report;
    };
    if first != g.start() {
        report.violations.push(RouteViolation::WrongStart { found: first });
    }
    if last != g.dest() {
        report.violations.push(RouteViolation::WrongEnd { found: last });
    }
    if seq.len() > g.node_count() {
        report
            .violations
            .push(RouteViolation::TooLong { len: seq.len(), max: g.node_count() });
    }
    let mut seen = HashSet::new();
    for &id in seq {
        if !seen.insert(id) {
            report.violations.push(RouteViolation::RepeatedNode { node: id });
        }
    }
    let mut seen_edges = HashSet::new();
    let mut all_edges_exist = true;
    for (a, b) in route.legs() {
        if !g.is_adjacent(a, b) {
            all_edges_exist = false;
            report.violations.push(RouteViolation::MissingEdge { from: a, to: b });
        }
        if !seen_edges.insert((a.min(b), a.max(b))) {
            report.violations.push(RouteViolation::RepeatedEdge { from: a, to: b });
        }
    }
    if all_edges_exist {
        if let Ok(t) = route_time(route, g, vehicle_speed) {
            report.route_time = Some(t);
            if t > t_available {
                report
                    .violations
                    .push(RouteViolation::OverBudget { route_time: t, available: t_available });
            }
        }
    }
    report
}
