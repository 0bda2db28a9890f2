//! Centralized (ℓ,k) scheduling by weighted bipartite edge coloring.
//!
//! Each demand is an edge from its sender to its receiver, weighted by the
//! distance. A partition of the edges into matchings is run matching by
//! matching as permutation routings; a matching costs its heaviest edge.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::algorithms::PolicyId;
use crate::engine::{run, SimConfig, SimResult};
use crate::error::{domain, Error, Result};
use crate::grid::{distance, DuplexMode, Node};
use crate::instances::{Demand, Instance};

/// Largest edge count accepted by [`weighted_color_exact`].
pub const EXACT_LIMIT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WeightedEdge {
    pub left: usize,
    pub right: usize,
    pub weight: u64,
}

/// Senders on the left, receivers on the right; parallel demands stay parallel.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct WeightedBipartiteGraph {
    pub left: Vec<Node>,
    pub right: Vec<Node>,
    /// Edge i is demand i.
    pub edges: Vec<WeightedEdge>,
}

impl WeightedBipartiteGraph {
    pub fn from_edges(n_left: usize, n_right: usize, edges: &[(usize, usize, u64)]) -> Self {
        WeightedBipartiteGraph {
            left: (0..n_left as i64).map(|i| Node::new(i, 0)).collect(),
            right: (0..n_right as i64).map(|i| Node::new(i, 0)).collect(),
            edges: edges.iter().map(|&(left, right, weight)| WeightedEdge { left, right, weight }).collect(),
        }
    }

    pub fn max_degree(&self) -> usize {
        let mut dl = vec![0; self.left.len()];
        let mut dr = vec![0; self.right.len()];
        for e in &self.edges {
            dl[e.left] += 1;
            dr[e.right] += 1;
        }
        dl.into_iter().chain(dr).max().unwrap_or(0)
    }
}

/// Matchings as lists of edge indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EdgeColoring {
    pub matchings: Vec<Vec<usize>>,
}

impl EdgeColoring {
    fn from_colors(colors: &[usize], n: usize) -> Self {
        let mut matchings = vec![Vec::new(); n];
        for (e, &c) in colors.iter().enumerate() {
            matchings[c].push(e);
        }
        EdgeColoring { matchings }
    }

    /// c(M) = heaviest edge of M (0 when empty).
    pub fn costs(&self, g: &WeightedBipartiteGraph) -> Vec<u64> {
        self.matchings.iter().map(|m| m.iter().map(|&e| g.edges[e].weight).max().unwrap_or(0)).collect()
    }

    pub fn objective(&self, g: &WeightedBipartiteGraph) -> u64 {
        self.costs(g).iter().sum()
    }

    /// Disjointness, full coverage and the matching property.
    pub fn check(&self, g: &WeightedBipartiteGraph) -> Result<()> {
        let mut seen = vec![false; g.edges.len()];
        for (i, m) in self.matchings.iter().enumerate() {
            let mut l = std::collections::HashSet::new();
            let mut r = std::collections::HashSet::new();
            for &e in m {
                if e >= seen.len() || std::mem::replace(&mut seen[e], true) {
                    return domain(format!("edge {e} is unknown or colored twice"));
                }
                if !l.insert(g.edges[e].left) || !r.insert(g.edges[e].right) {
                    return domain(format!("matching {i} has two edges at one node"));
                }
            }
        }
        match seen.iter().position(|s| !s) {
            Some(e) => domain(format!("edge {e} is uncolored")),
            None => Ok(()),
        }
    }
}

/// One edge per demand, weighted by the lattice distance.
pub fn build_bipartite(instance: &Instance) -> WeightedBipartiteGraph {
    let mut left: BTreeMap<Node, usize> = BTreeMap::new();
    let mut right: BTreeMap<Node, usize> = BTreeMap::new();
    for d in &instance.demands {
        let n = left.len();
        left.entry(d.origin).or_insert(n);
        let n = right.len();
        right.entry(d.destination).or_insert(n);
    }
    let edges = instance
        .demands
        .iter()
        .map(|d| WeightedEdge {
            left: left[&d.origin],
            right: right[&d.destination],
            weight: distance(instance.kind(), d.origin, d.destination) as u64,
        })
        .collect();
    let order = |m: BTreeMap<Node, usize>| {
        let mut v: Vec<(Node, usize)> = m.into_iter().collect();
        v.sort_by_key(|x| x.1);
        v.into_iter().map(|x| x.0).collect()
    };
    WeightedBipartiteGraph { left: order(left), right: order(right), edges }
}

/// Incremental proper coloring with Kempe-chain repair.
struct Palette {
    at_left: Vec<Vec<Option<usize>>>,
    at_right: Vec<Vec<Option<usize>>>,
    color: Vec<Option<usize>>,
}

impl Palette {
    fn new(g: &WeightedBipartiteGraph, colors: usize) -> Self {
        Palette {
            at_left: vec![vec![None; colors]; g.left.len()],
            at_right: vec![vec![None; colors]; g.right.len()],
            color: vec![None; g.edges.len()],
        }
    }

    fn free(&self, g: &WeightedBipartiteGraph, e: usize, c: usize) -> bool {
        let WeightedEdge { left, right, .. } = g.edges[e];
        self.at_left[left][c].is_none() && self.at_right[right][c].is_none()
    }

    fn set(&mut self, g: &WeightedBipartiteGraph, e: usize, c: usize) {
        let WeightedEdge { left, right, .. } = g.edges[e];
        self.at_left[left][c] = Some(e);
        self.at_right[right][c] = Some(e);
        self.color[e] = Some(c);
    }

    fn unset(&mut self, g: &WeightedBipartiteGraph, e: usize) {
        if let Some(c) = self.color[e].take() {
            let WeightedEdge { left, right, .. } = g.edges[e];
            self.at_left[left][c] = None;
            self.at_right[right][c] = None;
        }
    }

    /// Colors `e` with a color missing at its left end, swapping an alternating
    /// path from its right end if needed. Needs colors ≥ Δ.
    fn insert_kempe(&mut self, g: &WeightedBipartiteGraph, e: usize) {
        let WeightedEdge { left: u, right: v, .. } = g.edges[e];
        let a = self.at_left[u].iter().position(Option::is_none).expect("a color is free at the sender");
        if self.at_right[v][a].is_none() {
            self.set(g, e, a);
            return;
        }
        let b = self.at_right[v].iter().position(Option::is_none).expect("a color is free at the receiver");
        // Path from v: a-edge to a sender, b-edge to a receiver, and so on.
        let mut path = Vec::new();
        let (mut on_right, mut node, mut want) = (true, v, a);
        loop {
            let next = if on_right { self.at_right[node][want] } else { self.at_left[node][want] };
            let Some(f) = next else { break };
            path.push(f);
            node = if on_right { g.edges[f].left } else { g.edges[f].right };
            on_right = !on_right;
            want = if want == a { b } else { a };
        }
        let old: Vec<(usize, usize)> = path.iter().map(|&f| (f, self.color[f].unwrap())).collect();
        for &(f, _) in &old {
            self.unset(g, f);
        }
        for (f, c) in old {
            self.set(g, f, if c == a { b } else { a });
        }
        self.set(g, e, a);
    }

    fn finish(self, colors: usize) -> EdgeColoring {
        let colors_of: Vec<usize> = self.color.into_iter().map(|c| c.expect("every edge colored")).collect();
        EdgeColoring::from_colors(&colors_of, colors)
    }
}

/// Exactly Δ matchings, ignoring weights.
pub fn konig_decompose(g: &WeightedBipartiteGraph) -> EdgeColoring {
    let delta = g.max_degree();
    let mut p = Palette::new(g, delta);
    for e in 0..g.edges.len() {
        p.insert_kempe(g, e);
    }
    p.finish(delta)
}

fn by_weight_desc(g: &WeightedBipartiteGraph) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.edges.len()).collect();
    order.sort_by_key(|&e| (std::cmp::Reverse(g.edges[e].weight), e));
    order
}

/// Heaviest edge first, into the admissible matching that grows the objective
/// least (an opened matching costs the edge's weight); Kempe repair when none admits it.
pub fn weighted_color_greedy(g: &WeightedBipartiteGraph) -> EdgeColoring {
    let delta = g.max_degree();
    let mut p = Palette::new(g, delta);
    let mut cost = vec![0u64; delta];
    for e in by_weight_desc(g) {
        let w = g.edges[e].weight;
        let best = (0..delta).filter(|&c| p.free(g, e, c)).min_by_key(|&c| (w.saturating_sub(cost[c]), c));
        match best {
            Some(c) => p.set(g, e, c),
            None => p.insert_kempe(g, e),
        }
        let c = p.color[e].unwrap();
        cost[c] = cost[c].max(w);
    }
    p.finish(delta)
}

/// Minimum Σ c(M_i) over all partitions into at most Δ matchings, by branch and bound.
pub fn weighted_color_exact(g: &WeightedBipartiteGraph) -> Result<EdgeColoring> {
    if g.edges.len() > EXACT_LIMIT {
        return Err(Error::TooLarge { edges: g.edges.len(), limit: EXACT_LIMIT });
    }
    let delta = g.max_degree();
    let order = by_weight_desc(g);
    let seed = weighted_color_greedy(g);
    let mut best = (seed.objective(g), seed);

    struct Search<'a> {
        g: &'a WeightedBipartiteGraph,
        order: Vec<usize>,
        delta: usize,
        p: Palette,
        opened: usize,
    }
    fn go(s: &mut Search<'_>, i: usize, cost: u64, best: &mut (u64, EdgeColoring)) {
        if cost >= best.0 {
            return;
        }
        if i == s.order.len() {
            let colors: Vec<usize> = s.p.color.iter().map(|c| c.unwrap()).collect();
            *best = (cost, EdgeColoring::from_colors(&colors, s.delta));
            return;
        }
        let e = s.order[i];
        // Edges arrive heaviest first, so only opening a matching adds cost.
        for c in 0..s.opened {
            if s.p.free(s.g, e, c) {
                s.p.set(s.g, e, c);
                go(s, i + 1, cost, best);
                s.p.unset(s.g, e);
            }
        }
        if s.opened < s.delta {
            let c = s.opened;
            s.opened += 1;
            s.p.set(s.g, e, c);
            go(s, i + 1, cost + s.g.edges[e].weight, best);
            s.p.unset(s.g, e);
            s.opened -= 1;
        }
    }

    let mut s = Search { g, order, delta, p: Palette::new(g, delta), opened: 0 };
    if !g.edges.is_empty() {
        // The greedy seed is admissible; search for strictly better.
        go(&mut s, 0, 0, &mut best);
    }
    Ok(best.1)
}

/// Outcome of running each matching as a permutation routing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Schedule {
    pub per_matching: Vec<MatchingRun>,
    /// Completion time is the sum over matchings; usage and queue are merged.
    pub result: SimResult,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MatchingRun {
    pub cost: u64,
    pub completion_time: u64,
}

/// Runs the matchings one after another with the grid's permutation policy.
pub fn schedule_from_coloring(
    instance: &Instance,
    coloring: &EdgeColoring,
    duplex: DuplexMode,
    max_steps: Option<u64>,
) -> Result<Schedule> {
    let g = build_bipartite(instance);
    coloring.check(&g)?;
    let policy = PolicyId::permutation(instance.kind(), duplex);
    let mut total = SimResult { completion_time: 0, arc_usage: BTreeMap::new(), max_queue: 0, delivered: true };
    let mut per_matching = Vec::new();
    for (m, cost) in coloring.matchings.iter().zip(coloring.costs(&g)) {
        if m.is_empty() {
            continue;
        }
        let demands: Vec<Demand> = m.iter().map(|&e| instance.demands[e]).collect();
        let sub = Instance::new(instance.grid.clone(), duplex, demands, (1, 1))?;
        let mut cfg = SimConfig::new(policy, duplex, &sub);
        if let Some(s) = max_steps {
            cfg.max_steps = s;
        }
        let (r, _) = run(&sub, &cfg)?;
        per_matching.push(MatchingRun { cost, completion_time: r.completion_time });
        total.completion_time += r.completion_time;
        total.max_queue = total.max_queue.max(r.max_queue);
        total.delivered &= r.delivered;
        for (arc, c) in r.arc_usage {
            *total.arc_usage.entry(arc).or_insert(0) += c;
        }
    }
    Ok(Schedule { per_matching, result: total })
}
