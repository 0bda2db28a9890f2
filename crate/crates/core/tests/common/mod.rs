//! Oracles shared by the integration tests. Adjacency is written out here from
//! the lattice definitions rather than taken from the library.
#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use gridroute::grid::{GridKind, Node};

pub fn adjacent(kind: GridKind, n: Node) -> Vec<Node> {
    let Node { u, v, site } = n;
    match kind {
        GridKind::Square => vec![Node::new(u + 1, v), Node::new(u - 1, v), Node::new(u, v + 1), Node::new(u, v - 1)],
        GridKind::Triangular => vec![
            Node::new(u + 1, v),
            Node::new(u - 1, v),
            Node::new(u, v + 1),
            Node::new(u, v - 1),
            Node::new(u + 1, v + 1),
            Node::new(u - 1, v - 1),
        ],
        // A(u,v) touches B(u,v), B(u-1,v), B(u,v-1).
        GridKind::Hexagonal if site == 0 => vec![Node::hex(u, v, 1), Node::hex(u - 1, v, 1), Node::hex(u, v - 1, 1)],
        GridKind::Hexagonal => vec![Node::hex(u, v, 0), Node::hex(u + 1, v, 0), Node::hex(u, v + 1, 0)],
    }
}

/// Distances from `src` to every node accepted by `allowed`.
pub fn bfs(kind: GridKind, src: Node, allowed: impl Fn(Node) -> bool) -> HashMap<Node, u64> {
    let mut dist = HashMap::from([(src, 0)]);
    let mut q = VecDeque::from([src]);
    while let Some(x) = q.pop_front() {
        let d = dist[&x];
        for y in adjacent(kind, x) {
            if allowed(y) && !dist.contains_key(&y) {
                dist.insert(y, d + 1);
                q.push_back(y);
            }
        }
    }
    dist
}

/// Lattice distance by BFS on the unbounded grid (the search stops at `b`).
pub fn lattice_distance(kind: GridKind, a: Node, b: Node) -> u64 {
    let mut dist = HashMap::from([(a, 0u64)]);
    let mut q = VecDeque::from([a]);
    while let Some(x) = q.pop_front() {
        if x == b {
            return dist[&x];
        }
        let d = dist[&x];
        for y in adjacent(kind, x) {
            if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(y) {
                e.insert(d + 1);
                q.push_back(y);
            }
        }
    }
    unreachable!("the lattice is connected")
}

pub fn max_distance(kind: GridKind, pairs: impl IntoIterator<Item = (Node, Node)>) -> u64 {
    let mut cache: HashMap<Node, HashMap<Node, u64>> = HashMap::new();
    let mut best = 0;
    for (a, b) in pairs {
        if a == b {
            continue;
        }
        let d = match cache.get(&a).and_then(|m| m.get(&b)) {
            Some(d) => *d,
            None => {
                let d = lattice_distance(kind, a, b);
                cache.entry(a).or_default().insert(b, d);
                d
            }
        };
        best = best.max(d);
    }
    best
}

/// Minimum Σ max-weight over partitions of the edges into at most `delta`
/// matchings, by enumerating restricted-growth strings.
pub fn partition_optimum(edges: &[(usize, usize, u64)], delta: usize) -> u64 {
    fn rec(edges: &[(usize, usize, u64)], delta: usize, i: usize, blocks: &mut Vec<Vec<usize>>, best: &mut u64) {
        if i == edges.len() {
            let cost = blocks.iter().map(|b| b.iter().map(|&e| edges[e].2).max().unwrap_or(0)).sum();
            *best = (*best).min(cost);
            return;
        }
        let (l, r, _) = edges[i];
        for b in 0..blocks.len() {
            if blocks[b].iter().all(|&e| edges[e].0 != l && edges[e].1 != r) {
                blocks[b].push(i);
                rec(edges, delta, i + 1, blocks, best);
                blocks[b].pop();
            }
        }
        if blocks.len() < delta {
            blocks.push(vec![i]);
            rec(edges, delta, i + 1, blocks, best);
            blocks.pop();
        }
    }
    let mut best = u64::MAX;
    rec(edges, delta, 0, &mut Vec::new(), &mut best);
    if edges.is_empty() {
        0
    } else {
        best
    }
}
