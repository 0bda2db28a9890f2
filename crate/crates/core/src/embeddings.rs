//! Square-grid routings replayed on the triangular and hexagonal grids.
//!
//! The triangular map is the identity (diagonals unused). The hexagonal map is a
//! brick wall: even squares (x+y even) become A-sites, odd ones B-sites; three of
//! the four square edges at a node are honeycomb edges, and the vertical edge
//! above an odd square becomes a three-edge detour through its left neighbours.

use std::collections::{BTreeMap, HashMap};

use crate::engine::{StepRecord, Trace, TraceMove};
use crate::error::{domain, Result};
use crate::grid::{edge_class, ConvexSubgrid, Extent, GridKind, Node};
use crate::instances::{Demand, Instance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Embedding {
    pub target: GridKind,
}

pub fn square2triangle() -> Embedding {
    Embedding { target: GridKind::Triangular }
}

pub fn square2hexagon() -> Embedding {
    Embedding { target: GridKind::Hexagonal }
}

impl Embedding {
    pub fn node_map(&self, n: Node) -> Node {
        match self.target {
            GridKind::Hexagonal => {
                let (x, y) = (n.u, n.v);
                if (x + y).rem_euclid(2) == 0 {
                    Node::hex((y - x).div_euclid(2), (x + y).div_euclid(2), 0)
                } else {
                    Node::hex((y - 1 - x).div_euclid(2), (x + y - 1).div_euclid(2), 1)
                }
            }
            _ => Node::new(n.u, n.v),
        }
    }

    /// Square nodes whose images form the path for the square edge a–b, a first.
    pub fn square_path(&self, a: Node, b: Node) -> Vec<Node> {
        if self.target == GridKind::Hexagonal && a.u == b.u && (a.v - b.v).abs() == 1 {
            let low = if a.v < b.v { a } else { b };
            if (low.u + low.v).rem_euclid(2) == 1 {
                let (x, y) = (low.u, low.v);
                let mut p = vec![low, Node::new(x - 1, y), Node::new(x - 1, y + 1), Node::new(x, y + 1)];
                if low != a {
                    p.reverse();
                }
                return p;
            }
        }
        vec![a, b]
    }

    /// Target path (endpoints included) for the square arc a → b.
    pub fn edge_map(&self, a: Node, b: Node) -> Vec<Node> {
        self.square_path(a, b).into_iter().map(|n| self.node_map(n)).collect()
    }

    /// Target sub-steps per square step.
    pub fn slowdown(&self) -> u64 {
        match self.target {
            GridKind::Hexagonal => 3,
            _ => 1,
        }
    }

    /// Undirected target-edge multiplicities over the images of the square edges
    /// with both ends in `window`.
    pub fn edge_cover(&self, window: &[Node]) -> HashMap<(Node, Node), u32> {
        let set: std::collections::HashSet<Node> = window.iter().copied().collect();
        let mut out = HashMap::new();
        for &a in window {
            for b in [a.offset(1, 0), a.offset(0, 1)] {
                if !set.contains(&b) {
                    continue;
                }
                for w in self.edge_map(a, b).windows(2) {
                    *out.entry((w[0].min(w[1]), w[0].max(w[1]))).or_insert(0) += 1;
                }
            }
        }
        out
    }
}

/// Replays a square-grid trace on the target grid.
///
/// Square step t becomes target steps `slowdown·(t−1)+1 ..= slowdown·t`; a detour's
/// i-th edge runs in the i-th sub-step. Two square arcs may share a target arc in
/// one sub-step, so the result is valid with capacity 2 on the honeycomb.
pub fn transport_routing(emb: &Embedding, instance: &Instance, trace: &Trace) -> Result<(Instance, Trace)> {
    if instance.kind() != GridKind::Square {
        return domain("transport needs a square-grid instance");
    }
    let nodes = instance.grid.nodes()?;
    let inside = |n: Node| instance.grid.contains(n);
    let grid = match (emb.target, &instance.grid.extent) {
        (GridKind::Triangular, Extent::Rect { u0, v0, w, h }) => {
            ConvexSubgrid::rect(GridKind::Triangular, *u0, *v0, *w, *h)
        }
        _ => ConvexSubgrid::set(emb.target, nodes.iter().map(|n| emb.node_map(*n))),
    };
    let demands = instance
        .demands
        .iter()
        .map(|d| Demand { origin: emb.node_map(d.origin), destination: emb.node_map(d.destination) })
        .collect();
    let target = Instance { grid, duplex: instance.duplex, demands, limits: instance.limits };

    let k = emb.slowdown();
    let mut steps: BTreeMap<u64, Vec<TraceMove>> = BTreeMap::new();
    for rec in &trace.steps {
        for m in &rec.moves {
            if !inside(m.from) || !inside(m.to) {
                return domain(format!(
                    "step {}: {} -> {} leaves the window",
                    rec.step,
                    m.from.format(GridKind::Square),
                    m.to.format(GridKind::Square)
                ));
            }
            if edge_class(GridKind::Square, m.from, m.to).is_none() {
                return domain(format!("step {}: packet {} jumps", rec.step, m.packet));
            }
            let path = emb.edge_map(m.from, m.to);
            for (i, w) in path.windows(2).enumerate() {
                let t = k * (rec.step - 1) + 1 + i as u64;
                steps.entry(t).or_default().push(TraceMove { packet: m.packet, from: w[0], to: w[1] });
            }
        }
    }
    let steps = steps
        .into_iter()
        .map(|(step, mut moves)| {
            moves.sort_by_key(|m| m.packet);
            StepRecord { step, moves }
        })
        .collect();
    Ok((target, Trace { steps }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::distance;

    #[test]
    fn hex_images_are_edges_or_detours() {
        let e = square2hexagon();
        for x in -3..3 {
            for y in -3..3 {
                let a = Node::new(x, y);
                for b in [a.offset(1, 0), a.offset(0, 1)] {
                    let p = e.edge_map(a, b);
                    assert!(p.len() == 2 || p.len() == 4);
                    for w in p.windows(2) {
                        assert!(edge_class(GridKind::Hexagonal, w[0], w[1]).is_some());
                    }
                    let mut back = e.edge_map(b, a);
                    back.reverse();
                    assert_eq!(back, p);
                }
            }
        }
    }

    #[test]
    fn hex_map_is_injective() {
        let e = square2hexagon();
        let mut seen = std::collections::HashSet::new();
        for x in -6..6 {
            for y in -6..6 {
                assert!(seen.insert(e.node_map(Node::new(x, y))));
            }
        }
    }

    #[test]
    fn triangle_corner_distances_agree() {
        let n = 6;
        let (nw, se) = (Node::new(0, n - 1), Node::new(n - 1, 0));
        assert_eq!(distance(GridKind::Square, nw, se), distance(GridKind::Triangular, nw, se));
    }
}
