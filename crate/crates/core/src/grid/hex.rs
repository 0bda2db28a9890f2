//! Honeycomb realization: two sites per cell.
//!
//! A(u,v) = `(u,v,0)` joins B(u,v) by e1, B(u-1,v) by e2 and B(u,v-1) by e3.
//! A zigzag chain alternates two edge classes: c1 uses {e2,e3}, c2 uses {e1,e3},
//! c3 uses {e1,e2}. Chain indices are 0..3 for c1..c3.

use super::{EdgeClass, Node, RelativeAddress};

pub const CLASSES: [EdgeClass; 3] = [EdgeClass::E1, EdgeClass::E2, EdgeClass::E3];

/// Edge classes traversed by each chain.
pub const CHAIN_CLASSES: [[EdgeClass; 2]; 3] =
    [[EdgeClass::E2, EdgeClass::E3], [EdgeClass::E1, EdgeClass::E3], [EdgeClass::E1, EdgeClass::E2]];

// (site, chain, sign>0) -> (class index, du, dv)
const STEP: [[[(usize, i64, i64); 2]; 3]; 2] = [
    // from A: [negative, positive]
    [[(2, 0, -1), (1, -1, 0)], [(0, 0, 0), (2, 0, -1)], [(1, -1, 0), (0, 0, 0)]],
    // from B
    [[(1, 1, 0), (2, 0, 1)], [(2, 0, 1), (0, 0, 0)], [(0, 0, 0), (1, 1, 0)]],
];

// Cell displacement of two consecutive positive steps along each chain.
const PAIR: [(i64, i64); 3] = [(-1, 1), (0, -1), (1, 0)];

pub fn step(n: Node, chain: usize, sign: i64) -> (Node, EdgeClass) {
    let (cls, du, dv) = STEP[n.site as usize][chain][(sign > 0) as usize];
    (Node::hex(n.u + du, n.v + dv, 1 - n.site), CLASSES[cls])
}

/// Node reached after `m` steps along `chain` in direction `sign`.
pub fn walk(n: Node, chain: usize, sign: i64, m: i64) -> Node {
    if m <= 0 || sign == 0 {
        return n;
    }
    let (pu, pv) = PAIR[chain];
    let half = m / 2;
    let base = Node::hex(n.u + sign * half * pu, n.v + sign * half * pv, n.site);
    if m % 2 == 1 {
        step(base, chain, sign).0
    } else {
        base
    }
}

pub fn neighbors(n: Node) -> [(Node, EdgeClass); 3] {
    let Node { u, v, .. } = n;
    if n.site == 0 {
        [
            (Node::hex(u, v, 1), EdgeClass::E1),
            (Node::hex(u - 1, v, 1), EdgeClass::E2),
            (Node::hex(u, v - 1, 1), EdgeClass::E3),
        ]
    } else {
        [
            (Node::hex(u, v, 0), EdgeClass::E1),
            (Node::hex(u + 1, v, 0), EdgeClass::E2),
            (Node::hex(u, v + 1, 0), EdgeClass::E3),
        ]
    }
}

/// The two chains passing through an edge of the given class.
pub fn chains_through(class: EdgeClass) -> [usize; 2] {
    match class {
        EdgeClass::E1 => [1, 2],
        EdgeClass::E2 => [0, 2],
        EdgeClass::E3 => [0, 1],
        _ => panic!("not a honeycomb edge class: {class:?}"),
    }
}

// Cells form a triangular lattice; this is its hop distance for a cell offset.
fn cell_distance(du: i64, dv: i64) -> i64 {
    let a = super::canonical_address(0, -dv, du, super::GridKind::Triangular);
    a.a.max(a.b).max(a.c) - a.a.min(a.b).min(a.c)
}

pub fn distance(x: Node, y: Node) -> i64 {
    if x.site == y.site {
        return 2 * cell_distance(y.u - x.u, y.v - x.v);
    }
    if x.site == 0 {
        1 + neighbors(y).iter().map(|(a, _)| 2 * cell_distance(a.u - x.u, a.v - x.v)).min().unwrap()
    } else {
        1 + neighbors(x).iter().map(|(a, _)| 2 * cell_distance(y.u - a.u, y.v - a.v)).min().unwrap()
    }
}

/// Chain decomposition of a shortest path from `x` to `y`: `q` negative steps on
/// one chain followed by `p` positive steps on another.
///
/// Several decompositions can exist when the path has a bent edge shared by two
/// chains; the one maximizing `(|a|,|b|,|c|)` lexicographically is returned, which
/// attributes the shared edge to the smaller chain class.
pub fn relative_address(x: Node, y: Node) -> RelativeAddress {
    let d = distance(x, y);
    if d == 0 {
        return RelativeAddress::ZERO;
    }
    let key = |r: &RelativeAddress| (r.a.abs(), r.b.abs(), r.c.abs());
    let mut best: Option<RelativeAddress> = None;
    for neg in 0..3 {
        for pos in 0..3 {
            if neg == pos {
                continue;
            }
            for q in 0..=d {
                let mid = walk(x, neg, -1, q);
                if walk(mid, pos, 1, d - q) != y {
                    continue;
                }
                let mut r = RelativeAddress::ZERO;
                r.set(neg, -q);
                r.set(pos, d - q);
                if best.as_ref().is_none_or(|b| key(&r) > key(b)) {
                    best = Some(r);
                }
            }
        }
    }
    best.expect("every honeycomb pair admits a two-chain geodesic")
}

/// Phase permission table for the full-duplex hexagonal algorithm.
/// Phase 1: c1→e2, c2→e3, c3→e1. Phase 2: c1→e3, c2→e1, c3→e2.
pub fn phase_allows(phase: u8, chain: usize, class: EdgeClass) -> bool {
    const P1: [EdgeClass; 3] = [EdgeClass::E2, EdgeClass::E3, EdgeClass::E1];
    const P2: [EdgeClass; 3] = [EdgeClass::E3, EdgeClass::E1, EdgeClass::E2];
    match phase {
        1 => P1[chain] == class,
        _ => P2[chain] == class,
    }
}
