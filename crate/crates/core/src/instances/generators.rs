use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::flow::FlowNetwork;
use super::{Certificate, CertificateKind, Demand, Instance};
use crate::analysis::{lb_lk, lk_c, lk_d, Arc};
use crate::error::{domain, Error, Result};
use crate::grid::{distance, hex, lattice_arcs, ConvexSubgrid, DuplexMode, GridKind, Node};

/// A uniformly random permutation of the node set (fixed points allowed).
pub fn gen_random_permutation(grid: &ConvexSubgrid, seed: u64) -> Result<Instance> {
    let nodes = grid.nodes()?;
    let mut targets = nodes.clone();
    targets.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let demands = nodes.into_iter().zip(targets).map(|(origin, destination)| Demand { origin, destination }).collect();
    Ok(Instance { grid: grid.clone(), duplex: DuplexMode::Full, demands, limits: (1, 1) })
}

/// Random (ℓ,k) demands: ℓ copies of every node as a source, k copies as a
/// destination, both shuffled and paired up.
pub fn gen_random_lk(grid: &ConvexSubgrid, l: u32, k: u32, seed: u64) -> Result<Instance> {
    if l == 0 || k == 0 {
        return domain("ℓ and k must be at least 1");
    }
    let nodes = grid.nodes()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut srcs: Vec<Node> = nodes.iter().flat_map(|n| std::iter::repeat_n(*n, l as usize)).collect();
    let mut dsts: Vec<Node> = nodes.iter().flat_map(|n| std::iter::repeat_n(*n, k as usize)).collect();
    srcs.shuffle(&mut rng);
    dsts.shuffle(&mut rng);
    let demands = srcs.into_iter().zip(dsts).map(|(origin, destination)| Demand { origin, destination }).collect();
    Instance::new(grid.clone(), DuplexMode::Full, demands, (l, k))
}

/// 2ℓ_max packets on a line of the triangular grid, ℓ_max on each side of the
/// edge e = (0,0)–(1,0), each sent exactly ℓ_max hops across it.
pub fn gen_line_adversarial_tri(l_max: u64) -> Result<(Instance, Vec<Certificate>)> {
    if l_max == 0 {
        return domain("ℓ_max must be at least 1");
    }
    let l = l_max as i64;
    let kind = GridKind::Triangular;
    let grid = ConvexSubgrid::rect(kind, 1 - l, 0, 2 * l, 1);
    let mut demands = Vec::new();
    for p in (1 - l)..=0 {
        demands.push(Demand { origin: Node::new(p, 0), destination: Node::new(p + l, 0) });
    }
    for p in 1..=l {
        demands.push(Demand { origin: Node::new(p, 0), destination: Node::new(p - l, 0) });
    }
    let e = (Node::new(0, 0), Node::new(1, 0));
    let certs = vec![
        Certificate::new(CertificateKind::EdgeCongestion, DuplexMode::Half, kind, &[e], 2 * l_max),
        Certificate::new(CertificateKind::EdgeCongestion, DuplexMode::Full, kind, &[e, (e.1, e.0)], l_max),
    ];
    Ok((Instance::new(grid, DuplexMode::Half, demands, (1, 1))?, certs))
}

/// The X instance around the e1 edge between A(0,0) and B(0,0).
///
/// The two chains through e are c3 and c2. In each direction the chain that enters
/// e first contributes ℓ_max−1 sources ending on e's near side, the other chain
/// contributes ℓ_max−1 sources behind them; all destinations are ℓ_max hops ahead.
pub fn gen_x_adversarial_hex(l_max: u64) -> Result<(Instance, Vec<Certificate>)> {
    if l_max < 2 {
        return domain("the X construction needs ℓ_max ≥ 2");
    }
    let l = l_max as i64;
    let a = Node::hex(0, 0, 0);
    let b = Node::hex(0, 0, 1);
    // (start, (chain X, sign X), (chain Y, sign Y)) where both signs cross e away from start
    let dirs = [(a, (2usize, 1i64), (1usize, -1i64)), (b, (2, -1), (1, 1))];
    let mut demands = Vec::new();
    for (start, (xc, xs), (yc, ys)) in dirs {
        for j in 0..l - 1 {
            let s = hex::walk(start, xc, -xs, j);
            demands.push(Demand { origin: s, destination: hex::walk(s, xc, xs, l) });
        }
        for j in 1..l {
            let s = hex::walk(start, yc, -ys, j);
            demands.push(Demand { origin: s, destination: hex::walk(s, yc, ys, l) });
        }
    }
    let kind = GridKind::Hexagonal;
    let grid = ConvexSubgrid::ball(kind, a, l);
    let certs = vec![
        Certificate::new(CertificateKind::EdgeCongestion, DuplexMode::Half, kind, &[(a, b)], 4 * l_max - 4),
        Certificate::new(CertificateKind::EdgeCongestion, DuplexMode::Full, kind, &[(a, b), (b, a)], 2 * l_max - 2),
    ];
    Ok((Instance::new(grid, DuplexMode::Full, demands, (1, 1))?, certs))
}

/// Every node within distance r of the origin sends one packet to it.
pub fn gen_r_central(kind: GridKind, r: i64) -> Result<Instance> {
    if r < 1 {
        return domain("r must be at least 1");
    }
    let center = Node::new(0, 0);
    let grid = ConvexSubgrid::ball(kind, center, r);
    let demands: Vec<Demand> = grid
        .nodes()?
        .into_iter()
        .filter(|n| *n != center)
        .map(|origin| Demand { origin, destination: center })
        .collect();
    let k = demands.len().max(1) as u32;
    Instance::new(grid, DuplexMode::Full, demands, (1, k))
}

/// The arcs entering `center`.
pub fn r_central_cut(kind: GridKind, center: Node) -> Vec<Arc> {
    lattice_arcs(kind, center).into_iter().map(|(n, _)| (n, center)).collect()
}

/// Shape data for a generated rectangle instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RectangleInfo {
    /// Side of the source region: d for triangles and squares, cells for the honeycomb.
    pub side: u64,
    /// d from the lemma's formula.
    pub lemma_d: u64,
    pub sources: usize,
    pub boundary_arcs: usize,
}

// Builds the b-matching between `region` (sending `hi` each) and the nodes of
// `window` outside it (receiving ≤ `lo` each) with an edge for distance ≤ l_max.
fn rectangle_assignment(
    kind: GridKind,
    region: &[Node],
    window: &ConvexSubgrid,
    hi: u64,
    lo: u64,
    l_max: u64,
) -> Result<Vec<(Node, Node)>> {
    let in_region: HashSet<Node> = region.iter().copied().collect();
    let ring: Vec<Node> = window
        .nodes()?
        .into_iter()
        .filter(|y| !in_region.contains(y))
        .filter(|y| region.iter().any(|x| distance(kind, *x, *y) as u64 <= l_max))
        .collect();
    let (s, t) = (0, 1 + region.len() + ring.len());
    let mut net = FlowNetwork::new(t + 1);
    for i in 0..region.len() {
        net.add_edge(s, 1 + i, hi as i64);
    }
    for j in 0..ring.len() {
        net.add_edge(1 + region.len() + j, t, lo as i64);
    }
    let mut pairs = Vec::new();
    for (i, x) in region.iter().enumerate() {
        for (j, y) in ring.iter().enumerate() {
            if distance(kind, *x, *y) as u64 <= l_max {
                let e = net.add_edge(1 + i, 1 + region.len() + j, lo as i64);
                pairs.push((e, *x, *y));
            }
        }
    }
    let need = hi as i64 * region.len() as i64;
    let got = net.max_flow(s, t);
    if got < need {
        let side = net.source_side(s);
        let deficiency = region.iter().enumerate().filter(|(i, _)| side[1 + i]).map(|(_, x)| *x).collect();
        return Err(Error::Infeasible { detail: format!("flow {got} < demand {need}"), deficiency });
    }
    let mut out = Vec::new();
    for (e, x, y) in pairs {
        for _ in 0..net.flow_on(e) {
            out.push((x, y));
        }
    }
    Ok(out)
}

fn boundary(kind: GridKind, region: &[Node], window: &ConvexSubgrid) -> Vec<Arc> {
    let inside: HashSet<Node> = region.iter().copied().collect();
    let mut out = Vec::new();
    for &x in region {
        for (y, _) in lattice_arcs(kind, x) {
            if window.contains(y) && !inside.contains(&y) {
                out.push((x, y));
            }
        }
    }
    out.sort();
    out
}

fn square_region(kind: GridKind, side: i64) -> Vec<Node> {
    ConvexSubgrid::rect(kind, 0, 0, side, side).nodes().expect("finite")
}

/// The Hall-rectangle instance behind the second (ℓ,k) lower bound.
///
/// Triangles: the d×d rhombus with d = ⌊(ℓ_max+1)/√(c+1)⌋ sends max{ℓ,k} packets
/// per node into the cone ring; a max-flow oracle picks the destinations. Squares
/// reuse the formula and shrink d until the b-matching exists. The honeycomb uses
/// the largest feasible cell rhombus. The demand direction is reversed when ℓ < k.
pub fn gen_rectangle_lk(
    kind: GridKind,
    l: u64,
    k: u64,
    l_max: u64,
) -> Result<(Instance, Vec<Certificate>, RectangleInfo)> {
    if l == 0 || k == 0 || l_max == 0 {
        return domain("ℓ, k and ℓ_max must be at least 1");
    }
    let (lo, hi) = (l.min(k), l.max(k));
    let lemma_d = match kind {
        GridKind::Hexagonal => lb_lk(kind, l, k, l_max).d,
        _ => lk_d(lk_c(l, k), l_max),
    };
    let lm = l_max as i64;

    let (side, region, window, pairs) = match kind {
        GridKind::Triangular => {
            if lemma_d == 0 {
                return domain(format!("d = 0 for ℓ={l}, k={k}, ℓ_max={l_max}"));
            }
            let d = lemma_d as i64;
            let region = square_region(kind, d);
            let window = ConvexSubgrid::rect(kind, 0, 0, d + lm, d + lm);
            let pairs = rectangle_assignment(kind, &region, &window, hi, lo, l_max)?;
            (lemma_d, region, window, pairs)
        }
        GridKind::Square | GridKind::Hexagonal => {
            let (top, margin) = match kind {
                GridKind::Square => (lemma_d as i64, 0),
                _ => (lm + 1, lm),
            };
            let mut found = None;
            let mut last_err = None;
            let mut d = top;
            while d >= 1 && found.is_none() {
                let region = square_region(kind, d);
                let window = ConvexSubgrid::rect(kind, -margin, -margin, d + lm + margin, d + lm + margin);
                match rectangle_assignment(kind, &region, &window, hi, lo, l_max) {
                    Ok(p) => found = Some((d as u64, region, window, p)),
                    Err(e) => last_err = Some(e),
                }
                d -= 1;
            }
            match (found, last_err) {
                (Some(f), _) => f,
                (None, Some(e)) => return Err(e),
                (None, None) => return domain(format!("d = 0 for ℓ={l}, k={k}, ℓ_max={l_max}")),
            }
        }
    };

    let reversed = l < k;
    let mut cut = boundary(kind, &region, &window);
    let mut demands: Vec<Demand> = pairs.into_iter().map(|(x, y)| Demand { origin: x, destination: y }).collect();
    if reversed {
        for d in &mut demands {
            std::mem::swap(&mut d.origin, &mut d.destination);
        }
        for a in &mut cut {
            *a = (a.1, a.0);
        }
    }
    let m = demands.len() as u64;
    let info = RectangleInfo { side, lemma_d, sources: region.len(), boundary_arcs: cut.len() };
    let certs =
        vec![Certificate::new(CertificateKind::Bisection, DuplexMode::Full, kind, &cut, m.div_ceil(cut.len() as u64))];
    let inst = Instance::new(window, DuplexMode::Full, demands, (l as u32, k as u32))?;
    Ok((inst, certs, info))
}

/// The congestion instance behind the first (ℓ,k) lower bound: ℓ_max consecutive
/// nodes on a line each send min{ℓ,k} packets ℓ_max hops forward, so every packet
/// crosses the arc leaving the last source.
pub fn gen_lk_line(kind: GridKind, l: u64, k: u64, l_max: u64) -> Result<(Instance, Vec<Certificate>)> {
    if l == 0 || k == 0 || l_max == 0 {
        return domain("ℓ, k and ℓ_max must be at least 1");
    }
    let m = l.min(k);
    let lm = l_max as i64;
    let (grid, line): (ConvexSubgrid, Vec<(Node, Node)>) = match kind {
        GridKind::Square | GridKind::Triangular => (
            ConvexSubgrid::rect(kind, 1 - lm, 0, 2 * lm, 1),
            (0..lm).map(|j| (Node::new(-j, 0), Node::new(lm - j, 0))).collect(),
        ),
        GridKind::Hexagonal => {
            let a = Node::hex(0, 0, 0);
            (
                ConvexSubgrid::ball(kind, a, lm),
                (0..lm)
                    .map(|j| {
                        let s = hex::walk(a, 2, -1, j);
                        (s, hex::walk(s, 2, 1, lm))
                    })
                    .collect(),
            )
        }
    };
    let last = line[0].0;
    let next = match kind {
        GridKind::Hexagonal => hex::step(last, 2, 1).0,
        _ => last.offset(1, 0),
    };
    let mut demands = Vec::new();
    for &(s, d) in &line {
        for _ in 0..m {
            demands.push(Demand { origin: s, destination: d });
        }
    }
    let certs = vec![
        Certificate::new(CertificateKind::EdgeCongestion, DuplexMode::Full, kind, &[(last, next)], m * l_max),
        Certificate::new(CertificateKind::EdgeCongestion, DuplexMode::Half, kind, &[(last, next)], m * l_max),
    ];
    Ok((Instance::new(grid, DuplexMode::Full, demands, (l as u32, k as u32))?, certs))
}

/// The instance matching whichever (ℓ,k) lemma bound dominates.
pub fn gen_lk_adversarial(kind: GridKind, l: u64, k: u64, l_max: u64) -> Result<(Instance, Vec<Certificate>)> {
    let b = lb_lk(kind, l, k, l_max);
    if b.lb1 >= b.lb2 {
        gen_lk_line(kind, l, k, l_max)
    } else {
        gen_rectangle_lk(kind, l, k, l_max).map(|(i, c, _)| (i, c))
    }
}

/// Demand multiset as `(origin, destination) -> count`, for comparisons in tests.
pub fn demand_counts(inst: &Instance) -> BTreeMap<(Node, Node), usize> {
    let mut out = BTreeMap::new();
    for d in &inst.demands {
        *out.entry((d.origin, d.destination)).or_insert(0) += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{canonical_paths, path_congestion, verify_certificate};
    use crate::grid::bfs_within;

    #[test]
    fn random_permutation_is_seeded() {
        let g = ConvexSubgrid::rect(GridKind::Triangular, 0, 0, 5, 5);
        let a = gen_random_permutation(&g, 7).unwrap();
        assert_eq!(a, gen_random_permutation(&g, 7).unwrap());
        assert_ne!(a, gen_random_permutation(&g, 8).unwrap());
        assert_eq!(a.demands.len(), 25);
        a.validate().unwrap();
    }

    #[test]
    fn line_instance_certificates() {
        for lm in 1..9 {
            let (inst, certs) = gen_line_adversarial_tri(lm).unwrap();
            assert_eq!(inst.demands.len() as u64, 2 * lm);
            assert!(inst.demands.iter().all(|d| distance(GridKind::Triangular, d.origin, d.destination) as u64 == lm));
            assert_eq!(certs[0].value, 2 * lm);
            for c in &certs {
                assert_eq!(verify_certificate(&inst, c).unwrap(), c.value);
            }
            // every canonical path uses e
            let e = (Node::new(0, 0), Node::new(1, 0));
            let ps = canonical_paths(&inst);
            assert!(ps.paths.values().all(|p| p.contains(&e) || p.contains(&(e.1, e.0))));
        }
    }

    #[test]
    fn x_instance_shape() {
        assert!(gen_x_adversarial_hex(1).is_err());
        for lm in 2..11 {
            let (inst, certs) = gen_x_adversarial_hex(lm).unwrap();
            assert_eq!(inst.demands.len() as u64, 4 * lm - 4);
            let kind = GridKind::Hexagonal;
            assert!(inst.demands.iter().all(|d| distance(kind, d.origin, d.destination) as u64 == lm));
            for c in &certs {
                assert_eq!(verify_certificate(&inst, c).unwrap(), c.value, "{c:?}");
            }
            let ps = canonical_paths(&inst);
            assert_eq!(path_congestion(&ps, DuplexMode::Half), 4 * lm - 4);
            assert_eq!(path_congestion(&ps, DuplexMode::Full), 2 * lm - 2);
        }
    }

    #[test]
    fn r_central_source_counts() {
        for r in 1..8i64 {
            let b = (r * (r + 1) / 2) as usize;
            assert_eq!(gen_r_central(GridKind::Square, r).unwrap().demands.len(), 4 * b);
            assert_eq!(gen_r_central(GridKind::Triangular, r).unwrap().demands.len(), 6 * b);
            assert_eq!(gen_r_central(GridKind::Hexagonal, r).unwrap().demands.len(), 3 * b);
        }
    }

    #[test]
    fn rectangle_example() {
        let (inst, certs, info) = gen_rectangle_lk(GridKind::Triangular, 4, 1, 8).unwrap();
        assert_eq!((info.side, info.sources, info.boundary_arcs), (4, 16, 15));
        assert_eq!(inst.demands.len(), 64);
        let kind = GridKind::Triangular;
        for &(a, b) in demand_counts(&inst).keys() {
            let d = bfs_within(kind, a, |n| inst.grid.contains(n))[&b];
            assert!(d <= 8);
        }
        assert!(certs[0].value >= 4);
        assert_eq!(verify_certificate(&inst, &certs[0]).unwrap(), certs[0].value);
    }

    #[test]
    fn rectangle_reverses_when_k_dominates() {
        let (inst, _, info) = gen_rectangle_lk(GridKind::Triangular, 1, 4, 8).unwrap();
        inst.validate().unwrap();
        let region: HashSet<Node> = square_region(GridKind::Triangular, info.side as i64).into_iter().collect();
        assert!(inst.demands.iter().all(|d| region.contains(&d.destination) && !region.contains(&d.origin)));
    }

    #[test]
    fn lk_line_congestion() {
        for kind in GridKind::ALL {
            let (inst, certs) = gen_lk_line(kind, 3, 2, 5).unwrap();
            assert_eq!(inst.demands.len(), 10);
            assert_eq!(verify_certificate(&inst, &certs[0]).unwrap(), 10, "{kind}");
        }
    }
}
