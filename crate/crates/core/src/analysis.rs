//! Lower/upper bound calculators and path-system congestion.
//!
//! Every bound is evaluated in integers; square roots enter only through
//! comparisons of squares.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;

use crate::error::{domain, Result};
use crate::grid::{canonical_walk, DuplexMode, GridKind, Node};
use crate::instances::{Certificate, CertificateKind, Instance};

pub type Arc = (Node, Node);

/// Per-packet arc sequences, keyed by demand index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PathSystem {
    pub paths: BTreeMap<usize, Vec<Arc>>,
}

impl PathSystem {
    pub fn dilation(&self) -> usize {
        self.paths.values().map(Vec::len).max().unwrap_or(0)
    }
}

/// Negative component first, then the positive one (horizontal then vertical on squares).
pub fn canonical_paths(instance: &Instance) -> PathSystem {
    let kind = instance.kind();
    let paths = instance
        .demands
        .iter()
        .enumerate()
        .map(|(id, d)| {
            let walk = canonical_walk(kind, d.origin, d.destination);
            (id, walk.windows(2).map(|w| (w[0], w[1])).collect())
        })
        .collect();
    PathSystem { paths }
}

fn edge_key(duplex: DuplexMode, a: Node, b: Node) -> Arc {
    match duplex {
        DuplexMode::Full => (a, b),
        DuplexMode::Half => (a.min(b), a.max(b)),
    }
}

/// Load per arc (Full) or per undirected edge (Half, keyed with the smaller end first).
pub fn loads(ps: &PathSystem, duplex: DuplexMode) -> HashMap<Arc, u64> {
    let mut out = HashMap::new();
    for path in ps.paths.values() {
        for &(a, b) in path {
            *out.entry(edge_key(duplex, a, b)).or_insert(0) += 1;
        }
    }
    out
}

pub fn path_congestion(ps: &PathSystem, duplex: DuplexMode) -> u64 {
    loads(ps, duplex).into_values().max().unwrap_or(0)
}

/// ⌈m/|F|⌉ where `m` counts demands whose endpoints the cut separates.
pub fn bisection_bound(instance: &Instance, cut: &[Arc], duplex: DuplexMode) -> Result<u64> {
    let grid = &instance.grid;
    if !grid.extent.is_finite() {
        return domain("bisection needs a finite grid");
    }
    let removed: HashSet<Arc> = cut.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    let size = match duplex {
        DuplexMode::Full => cut.iter().collect::<HashSet<_>>().len(),
        DuplexMode::Half => removed.len(),
    } as u64;
    if size == 0 {
        return domain("empty cut");
    }
    let nodes = grid.nodes()?;
    let mut comp: HashMap<Node, usize> = HashMap::new();
    let mut count = 0;
    for &n in &nodes {
        if comp.contains_key(&n) {
            continue;
        }
        let mut stack = vec![n];
        comp.insert(n, count);
        while let Some(x) = stack.pop() {
            for (y, _) in crate::grid::lattice_arcs(grid.kind, x) {
                if grid.contains(y) && !removed.contains(&(x.min(y), x.max(y))) && !comp.contains_key(&y) {
                    comp.insert(y, count);
                    stack.push(y);
                }
            }
        }
        count += 1;
    }
    if count < 2 {
        return domain("the cut does not separate the grid");
    }
    let m = instance.demands.iter().filter(|d| comp[&d.origin] != comp[&d.destination]).count() as u64;
    Ok(m.div_ceil(size))
}

/// Recomputes a certificate's value from the instance.
pub fn verify_certificate(instance: &Instance, cert: &Certificate) -> Result<u64> {
    let arcs = cert.marked_arcs()?;
    match cert.kind {
        CertificateKind::EdgeCongestion => {
            let l = loads(&canonical_paths(instance), cert.duplex);
            Ok(arcs.iter().map(|&(a, b)| l.get(&edge_key(cert.duplex, a, b)).copied().unwrap_or(0)).max().unwrap_or(0))
        }
        CertificateKind::Bisection => bisection_bound(instance, &arcs, cert.duplex),
    }
}

/// Largest lower bound certified for this instance: distance, canonical congestion
/// (only meaningful when the policy routes on canonical paths) and attached certificates.
pub fn instance_lower_bound(
    instance: &Instance,
    duplex: DuplexMode,
    canonical: bool,
    certificates: &[Certificate],
) -> u64 {
    let mut lb = instance.l_max();
    if canonical {
        lb = lb.max(path_congestion(&canonical_paths(instance), duplex));
    }
    for c in certificates {
        if c.duplex == duplex && (canonical || c.kind == CertificateKind::Bisection) {
            if let Ok(v) = verify_certificate(instance, c) {
                lb = lb.max(v);
            }
        }
    }
    lb
}

/// c = ⌈max{ℓ,k} / min{ℓ,k}⌉.
pub fn lk_c(l: u64, k: u64) -> u64 {
    l.max(k).div_ceil(l.min(k))
}

/// Largest d with d²(c+1) ≤ (ℓ_max+1)², i.e. ⌊(ℓ_max+1)/√(c+1)⌋.
pub fn lk_d(c: u64, l_max: u64) -> u64 {
    let target = (l_max + 1) * (l_max + 1);
    let mut d = ((target as f64 / (c + 1) as f64).sqrt()) as u64 + 1;
    while d > 0 && d * d * (c + 1) > target {
        d -= 1;
    }
    d
}

/// ⌊√(73c+64ℓ²+121+144ℓ)/(8√(c+1)) − 3/8⌋, i.e. the largest d with (8d+3)²(c+1) ≤ N.
pub fn hex_lk_d(c: u64, l_max: u64) -> u64 {
    let n = 73 * c + 64 * l_max * l_max + 121 + 144 * l_max;
    let mut d = 0;
    while (8 * (d + 1) + 3) * (8 * (d + 1) + 3) * (c + 1) <= n {
        d += 1;
    }
    d
}

/// Node and boundary-edge counts of the hexagonal rectangle used by the hex LB2 lemma.
pub fn hex_rectangle_counts(d: u64) -> (u64, u64) {
    ((4 * d * d + d).saturating_sub(2), 2 * d + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LkLower {
    pub c: u64,
    pub d: u64,
    pub lb1: u64,
    pub lb2: u64,
    pub combined: u64,
}

/// The two (ℓ,k) lemma lower bounds for full duplex.
pub fn lb_lk(kind: GridKind, l: u64, k: u64, l_max: u64) -> LkLower {
    let (lo, hi) = (l.min(k), l.max(k));
    let c = lk_c(l, k);
    let (d, lb1, lb2) = match kind {
        GridKind::Square | GridKind::Triangular => {
            let d = lk_d(c, l_max);
            (d, lo * l_max, (hi * d).div_ceil(4))
        }
        GridKind::Hexagonal => {
            let d = hex_lk_d(c, l_max);
            // ⌈max·(2d + (d−2)/(2d+1))⌉ = ⌈max·(4d²+3d−2)/(2d+1)⌉, floored at 0
            let num = hi as i64 * (4 * (d * d) as i64 + 3 * d as i64 - 2);
            let den = 2 * d as i64 + 1;
            let lb2 = if num <= 0 { 0 } else { (num as u64).div_ceil(den as u64) };
            (d, (2 * lo * l_max).saturating_sub(lo), lb2)
        }
    };
    LkLower { c, d, lb1, lb2, combined: lb1.max(lb2) }
}

/// Running-time bound of the (ℓ,k) algorithm, full duplex.
pub fn ub_lk(kind: GridKind, l: u64, k: u64, l_max: u64) -> u64 {
    let (lo, hi) = (l.min(k), l.max(k));
    let c = lk_c(l, k);
    let base = if c <= l_max { lo * c * (c - 1) / 2 + hi * (l_max - c + 1) } else { lo * l_max * (l_max + 1) / 2 };
    match kind {
        GridKind::Hexagonal => 2 * base,
        _ => base,
    }
}

/// The printed crossover condition c/√(c+1) > 4ℓ_max/(ℓ_max+1), squared to stay in integers.
pub fn lb2_beats_lb1_condition(c: u64, l_max: u64) -> bool {
    let lhs = (c * (l_max + 1)) as u128;
    let rhs = 16 * (l_max as u128) * (l_max as u128) * (c as u128 + 1);
    lhs * lhs > rhs
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub kind: GridKind,
    pub duplex: DuplexMode,
    pub l: u64,
    pub k: u64,
    pub l_max: u64,
    pub c: u64,
    pub d: u64,
    /// Instance-level bounds; absent when only parameters are given.
    pub distance_bound: Option<u64>,
    pub congestion_bound: Option<u64>,
    pub bisection_bound: Option<u64>,
    pub lb1: u64,
    pub lb2: u64,
    pub lb_combined: u64,
    pub ub: u64,
    /// Square values reuse the triangular formulas.
    pub adapted: bool,
}

/// Parameter-only report; half duplex doubles both sides.
pub fn bound_report(kind: GridKind, l: u64, k: u64, l_max: u64, duplex: DuplexMode) -> BoundReport {
    let f = match duplex {
        DuplexMode::Full => 1,
        DuplexMode::Half => 2,
    };
    let lo = lb_lk(kind, l, k, l_max);
    BoundReport {
        kind,
        duplex,
        l,
        k,
        l_max,
        c: lo.c,
        d: lo.d,
        distance_bound: None,
        congestion_bound: None,
        bisection_bound: None,
        lb1: f * lo.lb1,
        lb2: f * lo.lb2,
        lb_combined: f * lo.combined,
        ub: f * ub_lk(kind, l, k, l_max),
        adapted: kind == GridKind::Square,
    }
}

/// Parameter report plus the instance's own distance and canonical congestion.
pub fn instance_report(instance: &Instance, duplex: DuplexMode, cut: Option<&[Arc]>) -> Result<BoundReport> {
    let (l, k) = instance.limits;
    let l_max = instance.l_max().max(1);
    let mut r = bound_report(instance.kind(), l as u64, k as u64, l_max, duplex);
    r.l_max = instance.l_max();
    r.distance_bound = Some(instance.l_max());
    r.congestion_bound = Some(path_congestion(&canonical_paths(instance), duplex));
    if let Some(cut) = cut {
        r.bisection_bound = Some(bisection_bound(instance, cut, duplex)?);
    }
    Ok(r)
}
