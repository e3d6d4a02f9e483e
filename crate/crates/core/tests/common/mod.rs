//! Independent oracles shared by the integration tests. Nothing here calls the
//! code paths it is used to check.
#![allow(dead_code)]

use auvplan::mission::{MissionGraph, Route};

/// Every simple start-to-destination path, by depth-first enumeration.
pub fn all_simple_routes(g: &MissionGraph) -> Vec<Vec<usize>> {
    fn dfs(g: &MissionGraph, path: &mut Vec<usize>, on: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        let u = *path.last().unwrap();
        if u == g.dest() {
            out.push(path.clone());
            return;
        }
        for v in 0..g.node_count() {
            if !on[v] && g.edges().iter().any(|e| (e.from == u && e.to == v) || (e.from == v && e.to == u)) {
                on[v] = true;
                path.push(v);
                dfs(g, path, on, out);
                path.pop();
                on[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    let mut on = vec![false; g.node_count()];
    on[g.start()] = true;
    dfs(g, &mut vec![g.start()], &mut on, &mut out);
    out
}

fn edge_of(g: &MissionGraph, a: usize, b: usize) -> Option<&auvplan::mission::Edge> {
    g.edges().iter().find(|e| (e.from == a && e.to == b) || (e.from == b && e.to == a))
}

/// Route time summed straight from the edge list.
pub fn oracle_time(g: &MissionGraph, seq: &[usize], speed: f64) -> Option<f64> {
    seq.windows(2)
        .map(|w| edge_of(g, w[0], w[1]).map(|e| e.distance / speed + e.task.completion_time))
        .sum()
}

/// The five route feasibility bullets, coded directly:
/// endpoints, existing edges, no repeated node, no repeated edge, time budget.
pub fn oracle_structurally_valid(g: &MissionGraph, seq: &[usize]) -> bool {
    if seq.is_empty() || seq[0] != g.start() || *seq.last().unwrap() != g.dest() {
        return false;
    }
    if seq.windows(2).any(|w| edge_of(g, w[0], w[1]).is_none()) {
        return false;
    }
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] == seq[j] {
                return false;
            }
        }
    }
    let mut used: Vec<(usize, usize)> = Vec::new();
    for w in seq.windows(2) {
        let key = (w[0].min(w[1]), w[0].max(w[1]));
        if used.contains(&key) {
            return false;
        }
        used.push(key);
    }
    true
}

pub fn oracle_valid(g: &MissionGraph, seq: &[usize], budget: f64, speed: f64) -> bool {
    oracle_structurally_valid(g, seq) && oracle_time(g, seq, speed).is_some_and(|t| t <= budget)
}

pub fn route(seq: &[usize]) -> Route {
    Route::new(seq.to_vec())
}
