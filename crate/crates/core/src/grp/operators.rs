//! Variation operators on route chromosomes. Endpoint genes are never
//! touched; any offspring failing route validation is discarded.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::mission::{validate_route, MissionGraph, Route};

/// What an operator needs to judge feasibility of its output.
#[derive(Debug, Clone, Copy)]
pub struct Feasibility<'g> {
    pub graph: &'g MissionGraph,
    pub t_available: f64,
    pub vehicle_speed: f64,
}

impl Feasibility<'_> {
    pub fn accepts(&self, route: &Route) -> bool {
        validate_route(route, self.graph, self.t_available, self.vehicle_speed).is_valid()
    }
}

/// Minimum chromosome length that takes part in crossover.
pub const MIN_CROSSOVER_LEN: usize = 4;

/// Swaps genes of the overlapping interior (positions `1..min_len - 1`) where
/// `mask` is set. Each offspring keeps its own parent's length and tail.
/// Returns `None` when either parent is shorter than [`MIN_CROSSOVER_LEN`].
pub fn crossover_with_mask(p1: &[usize], p2: &[usize], mask: &[bool]) -> Option<(Vec<usize>, Vec<usize>)> {
    if p1.len() < MIN_CROSSOVER_LEN || p2.len() < MIN_CROSSOVER_LEN {
        return None;
    }
    let m = p1.len().min(p2.len());
    let (mut o1, mut o2) = (p1.to_vec(), p2.to_vec());
    for k in 1..m - 1 {
        if mask.get(k - 1).copied().unwrap_or(false) {
            std::mem::swap(&mut o1[k], &mut o2[k]);
        }
    }
    Some((o1, o2))
}

#[derive(Debug, Clone, PartialEq)]
pub enum CrossoverOutcome {
    /// A parent was too short to cross.
    Skipped,
    /// The feasible offspring (zero, one or two).
    Offspring(Vec<Route>),
}

/// Uniform crossover with per-gene swap probability `mix`.
pub fn uniform_crossover(
    p1: &Route,
    p2: &Route,
    mix: f64,
    ctx: &Feasibility<'_>,
    rng: &mut impl Rng,
) -> CrossoverOutcome {
    let m = p1.len().min(p2.len());
    let mask: Vec<bool> = (0..m.saturating_sub(2)).map(|_| rng.random_bool(mix)).collect();
    match crossover_with_mask(p1.as_slice(), p2.as_slice(), &mask) {
        None => CrossoverOutcome::Skipped,
        Some((a, b)) => CrossoverOutcome::Offspring(
            [a, b].into_iter().map(Route::new).filter(|r| ctx.accepts(r)).collect(),
        ),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MutationKind {
    Insertion,
    Swap,
    Inversion,
}

impl MutationKind {
    pub const ALL: [MutationKind; 3] = [MutationKind::Insertion, MutationKind::Swap, MutationKind::Inversion];
}

/// Inserts `node` before position `pos` (`1 <= pos <= len - 1`).
pub fn insertion_move(seq: &[usize], pos: usize, node: usize) -> Vec<usize> {
    assert!(pos >= 1 && pos < seq.len(), "insertion position {pos} outside interior");
    let mut out = Vec::with_capacity(seq.len() + 1);
    out.extend_from_slice(&seq[..pos]);
    out.push(node);
    out.extend_from_slice(&seq[pos..]);
    out
}

/// Exchanges interior genes `i` and `j`.
pub fn swap_move(seq: &[usize], i: usize, j: usize) -> Vec<usize> {
    assert!(interior(seq, i) && interior(seq, j), "swap indices {i},{j} outside interior");
    let mut out = seq.to_vec();
    out.swap(i, j);
    out
}

/// Reverses the interior segment between `i` and `j` inclusive.
pub fn inversion_move(seq: &[usize], i: usize, j: usize) -> Vec<usize> {
    assert!(interior(seq, i) && interior(seq, j), "inversion indices {i},{j} outside interior");
    let (lo, hi) = (i.min(j), i.max(j));
    let mut out = seq.to_vec();
    out[lo..=hi].reverse();
    out
}

fn interior(seq: &[usize], i: usize) -> bool {
    i >= 1 && i + 1 < seq.len()
}

/// Applies one mutation of `kind`. Returns `None` when the move is not
/// applicable (too few interior genes, no node left to insert) or its result
/// is infeasible.
pub fn mutate(route: &Route, kind: MutationKind, ctx: &Feasibility<'_>, rng: &mut impl Rng) -> Option<Route> {
    let seq = route.as_slice();
    let len = seq.len();
    let out = match kind {
        MutationKind::Insertion => {
            if len < 2 || len >= ctx.graph.node_count() {
                return None;
            }
            let unused: Vec<usize> = (0..ctx.graph.node_count()).filter(|v| !seq.contains(v)).collect();
            if unused.is_empty() {
                return None;
            }
            let node = unused[rng.random_range(0..unused.len())];
            insertion_move(seq, rng.random_range(1..len), node)
        }
        MutationKind::Swap | MutationKind::Inversion => {
            if len < 4 {
                return None;
            }
            let i = rng.random_range(1..len - 1);
            let j = rng.random_range(1..len - 1);
            if kind == MutationKind::Swap {
                swap_move(seq, i, j)
            } else {
                inversion_move(seq, i, j)
            }
        }
    };
    let out = Route::new(out);
    ctx.accepts(&out).then_some(out)
}
