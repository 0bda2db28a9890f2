//! Lattice topologies, coordinates and shortest-path addressing.
//!
//! Square and triangular nodes live on the integer plane `(u, v)`. The triangular
//! lattice adds the diagonal `k = (-1,-1)`, so the three unit vectors satisfy
//! `i + j + k = 0`. The honeycomb uses two sites per cell; see [`hex`].

pub mod hex;
mod subgrid;

use std::cmp::Ordering;
use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

pub use subgrid::{ConvexSubgrid, Extent};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    #[serde(alias = "sq")]
    Square,
    #[serde(alias = "tri")]
    Triangular,
    #[serde(alias = "hex")]
    Hexagonal,
}

impl GridKind {
    pub const ALL: [GridKind; 3] = [GridKind::Square, GridKind::Triangular, GridKind::Hexagonal];

    /// Prefix used in the textual node syntax.
    pub fn tag(self) -> &'static str {
        match self {
            GridKind::Square => "sq",
            GridKind::Triangular => "tri",
            GridKind::Hexagonal => "hex",
        }
    }

    pub fn degree(self) -> usize {
        match self {
            GridKind::Square => 4,
            GridKind::Triangular => 6,
            GridKind::Hexagonal => 3,
        }
    }
}

impl fmt::Display for GridKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GridKind::Square => "square",
            GridKind::Triangular => "triangular",
            GridKind::Hexagonal => "hexagonal",
        })
    }
}

impl FromStr for GridKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sq" | "square" => Ok(GridKind::Square),
            "tri" | "triangular" | "triangle" => Ok(GridKind::Triangular),
            "hex" | "hexagonal" | "hexagon" => Ok(GridKind::Hexagonal),
            _ => domain(format!("unknown grid kind `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DuplexMode {
    Full,
    Half,
}

impl fmt::Display for DuplexMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DuplexMode::Full => "full",
            DuplexMode::Half => "half",
        })
    }
}

impl FromStr for DuplexMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(DuplexMode::Full),
            "half" => Ok(DuplexMode::Half),
            _ => domain(format!("unknown duplex mode `{s}`")),
        }
    }
}

/// A lattice node. `site` is 0 except for the B-sites of the honeycomb.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Node {
    pub u: i64,
    pub v: i64,
    pub site: u8,
}

impl Node {
    pub const fn new(u: i64, v: i64) -> Node {
        Node { u, v, site: 0 }
    }

    pub const fn hex(u: i64, v: i64, site: u8) -> Node {
        Node { u, v, site }
    }

    pub fn offset(self, du: i64, dv: i64) -> Node {
        Node { u: self.u + du, v: self.v + dv, site: self.site }
    }

    pub fn format(self, kind: GridKind) -> String {
        match kind {
            GridKind::Hexagonal => format!("hex:{},{},{}", self.u, self.v, self.site),
            _ => format!("{}:{},{}", kind.tag(), self.u, self.v),
        }
    }

    /// Parses `kind:u,v[,site]`.
    pub fn parse(text: &str) -> Result<(GridKind, Node)> {
        let (tag, rest) =
            text.trim().split_once(':').ok_or_else(|| Error::Domain(format!("node `{text}` lacks a kind prefix")))?;
        let kind: GridKind = tag.parse()?;
        let parts: Vec<i64> = rest
            .split(',')
            .map(|p| p.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Domain(format!("bad coordinates in node `{text}`")))?;
        let node = match (kind, parts.as_slice()) {
            (GridKind::Hexagonal, [u, v, s]) if *s == 0 || *s == 1 => Node::hex(*u, *v, *s as u8),
            (GridKind::Square | GridKind::Triangular, [u, v]) => Node::new(*u, *v),
            _ => return domain(format!("node `{text}` has the wrong shape for a {kind} grid")),
        };
        Ok((kind, node))
    }
}

/// Displacement in the axis (square, triangular) or chain (hexagonal) basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct RelativeAddress {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl RelativeAddress {
    pub const ZERO: RelativeAddress = RelativeAddress { a: 0, b: 0, c: 0 };

    pub const fn new(a: i64, b: i64, c: i64) -> Self {
        RelativeAddress { a, b, c }
    }

    pub fn get(&self, axis: usize) -> i64 {
        [self.a, self.b, self.c][axis]
    }

    pub fn set(&mut self, axis: usize, value: i64) {
        match axis {
            0 => self.a = value,
            1 => self.b = value,
            _ => self.c = value,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0 && self.c == 0
    }

    pub fn l1(&self) -> i64 {
        self.a.abs() + self.b.abs() + self.c.abs()
    }

    /// Lowest-index negative component, then lowest-index positive one.
    pub fn preferred_component(&self) -> Option<(usize, i64)> {
        let comps = [self.a, self.b, self.c];
        if let Some(i) = comps.iter().position(|&x| x < 0) {
            return Some((i, -1));
        }
        comps.iter().position(|&x| x > 0).map(|i| (i, 1))
    }
}

impl fmt::Display for RelativeAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgeClass {
    Horizontal,
    Vertical,
    I,
    J,
    K,
    E1,
    E2,
    E3,
}

impl EdgeClass {
    pub fn hex_index(self) -> Option<usize> {
        match self {
            EdgeClass::E1 => Some(0),
            EdgeClass::E2 => Some(1),
            EdgeClass::E3 => Some(2),
            _ => None,
        }
    }
}

/// A single hop: the target node, the class of the edge, and the address
/// component (`axis`, `sign`) it consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Move {
    pub to: Node,
    pub class: EdgeClass,
    pub axis: usize,
    pub sign: i64,
}

/// Triangular unit vectors i, j, k in (u, v) coordinates.
pub const TRI_AXES: [(i64, i64); 3] = [(1, 0), (0, 1), (-1, -1)];
const TRI_CLASSES: [EdgeClass; 3] = [EdgeClass::I, EdgeClass::J, EdgeClass::K];

/// The hop from `n` along `axis` in direction `sign` (±1).
///
/// Square axes: 0 horizontal, 1 vertical. Triangular: i, j, k. Hexagonal: chains c1..c3.
pub fn step(kind: GridKind, n: Node, axis: usize, sign: i64) -> Move {
    debug_assert!(sign == 1 || sign == -1);
    match kind {
        GridKind::Square => {
            let (to, class) = if axis == 0 {
                (n.offset(sign, 0), EdgeClass::Horizontal)
            } else {
                (n.offset(0, sign), EdgeClass::Vertical)
            };
            Move { to, class, axis, sign }
        }
        GridKind::Triangular => {
            let (du, dv) = TRI_AXES[axis];
            Move { to: n.offset(sign * du, sign * dv), class: TRI_CLASSES[axis], axis, sign }
        }
        GridKind::Hexagonal => {
            let (to, class) = hex::step(n, axis, sign);
            Move { to, class, axis, sign }
        }
    }
}

/// All arcs leaving `n` in the unbounded lattice.
pub fn lattice_arcs(kind: GridKind, n: Node) -> Vec<(Node, EdgeClass)> {
    match kind {
        GridKind::Square => vec![
            (n.offset(1, 0), EdgeClass::Horizontal),
            (n.offset(-1, 0), EdgeClass::Horizontal),
            (n.offset(0, 1), EdgeClass::Vertical),
            (n.offset(0, -1), EdgeClass::Vertical),
        ],
        GridKind::Triangular => {
            let mut out = Vec::with_capacity(6);
            for (axis, &(du, dv)) in TRI_AXES.iter().enumerate() {
                out.push((n.offset(du, dv), TRI_CLASSES[axis]));
                out.push((n.offset(-du, -dv), TRI_CLASSES[axis]));
            }
            out
        }
        GridKind::Hexagonal => hex::neighbors(n).to_vec(),
    }
}

/// Class of the lattice edge between `a` and `b`, if they are adjacent.
pub fn edge_class(kind: GridKind, a: Node, b: Node) -> Option<EdgeClass> {
    lattice_arcs(kind, a).into_iter().find(|(n, _)| *n == b).map(|(_, c)| c)
}

/// Shortest-path form of the triple `(a, b, c)`.
///
/// Triangular: subtract the median, which leaves one zero and two opposite signs.
/// Hexagonal: the triple is read as chain walks (c1, then c2, then c3) from the
/// A-site origin and the reached node is re-addressed with [`hex::relative_address`].
/// Square has no third axis; `c` is dropped.
pub fn canonical_address(a: i64, b: i64, c: i64, kind: GridKind) -> RelativeAddress {
    match kind {
        GridKind::Square => RelativeAddress::new(a, b, 0),
        GridKind::Triangular => {
            let mut s = [a, b, c];
            s.sort_unstable();
            let m = s[1];
            RelativeAddress::new(a - m, b - m, c - m)
        }
        GridKind::Hexagonal => {
            let origin = Node::hex(0, 0, 0);
            let mut at = origin;
            for (chain, x) in [a, b, c].into_iter().enumerate() {
                at = hex::walk(at, chain, x.signum(), x.unsigned_abs() as i64);
            }
            hex::relative_address(origin, at)
        }
    }
}

/// `min(|a-c|+|b-c|, |a-b|+|b-c|, |a-b|+|a-c|)`.
pub fn tri_distance(addr: RelativeAddress) -> i64 {
    let RelativeAddress { a, b, c } = addr;
    let ab = (a - b).abs();
    let ac = (a - c).abs();
    let bc = (b - c).abs();
    (ac + bc).min(ab + bc).min(ab + ac)
}

/// Canonical displacement from `from` to `to`.
pub fn relative_address(kind: GridKind, from: Node, to: Node) -> RelativeAddress {
    match kind {
        GridKind::Square => RelativeAddress::new(to.u - from.u, to.v - from.v, 0),
        GridKind::Triangular => canonical_address(to.u - from.u, to.v - from.v, 0, kind),
        GridKind::Hexagonal => hex::relative_address(from, to),
    }
}

/// Hop length of a canonical address.
pub fn address_length(kind: GridKind, addr: RelativeAddress) -> i64 {
    match kind {
        GridKind::Triangular => tri_distance(addr),
        _ => addr.l1(),
    }
}

/// Closed-form lattice distance.
pub fn distance(kind: GridKind, from: Node, to: Node) -> i64 {
    match kind {
        GridKind::Square => (to.u - from.u).abs() + (to.v - from.v).abs(),
        GridKind::Triangular => tri_distance(canonical_address(to.u - from.u, to.v - from.v, 0, kind)),
        GridKind::Hexagonal => hex::distance(from, to),
    }
}

/// Next hop on the canonical path: horizontal before vertical on squares, the negative
/// component before the positive one elsewhere.
pub fn canonical_move(kind: GridKind, at: Node, remaining: RelativeAddress) -> Option<Move> {
    let (axis, sign) = match kind {
        GridKind::Square => {
            if remaining.a != 0 {
                (0, remaining.a.signum())
            } else if remaining.b != 0 {
                (1, remaining.b.signum())
            } else {
                return None;
            }
        }
        _ => remaining.preferred_component()?,
    };
    Some(step(kind, at, axis, sign))
}

/// Remaining address after taking `mv` with `remaining` outstanding.
///
/// Hexagonal addresses are decremented along the consumed chain so that the
/// packet keeps its chain attribution; the other kinds are recomputed.
pub fn advance(kind: GridKind, remaining: RelativeAddress, mv: &Move, dest: Node) -> RelativeAddress {
    match kind {
        GridKind::Hexagonal => {
            let mut r = remaining;
            let cur = r.get(mv.axis);
            if cur != 0 && cur.signum() == mv.sign {
                r.set(mv.axis, cur - mv.sign);
                r
            } else {
                hex::relative_address(mv.to, dest)
            }
        }
        _ => relative_address(kind, mv.to, dest),
    }
}

/// Canonical node sequence from `from` to `to` (both endpoints included).
pub fn canonical_walk(kind: GridKind, from: Node, to: Node) -> Vec<Node> {
    let mut at = from;
    let mut rem = relative_address(kind, from, to);
    let mut out = vec![from];
    while let Some(mv) = canonical_move(kind, at, rem) {
        rem = advance(kind, rem, &mv, to);
        at = mv.to;
        out.push(at);
    }
    debug_assert_eq!(at, to);
    out
}

/// Canonical orientation used by half-duplex parity: an arc is positive when it
/// increases `(u, v, site)` lexicographically.
pub fn is_positive_arc(from: Node, to: Node) -> bool {
    from.cmp(&to) == Ordering::Less
}

/// Breadth-first distances from `src`, restricted to `allowed`.
pub fn bfs_within(kind: GridKind, src: Node, allowed: impl Fn(Node) -> bool) -> HashMap<Node, u64> {
    let mut dist = HashMap::new();
    if !allowed(src) {
        return dist;
    }
    dist.insert(src, 0u64);
    let mut queue = VecDeque::from([src]);
    while let Some(n) = queue.pop_front() {
        let d = dist[&n];
        for (m, _) in lattice_arcs(kind, n) {
            if allowed(m) && !dist.contains_key(&m) {
                dist.insert(m, d + 1);
                queue.push_back(m);
            }
        }
    }
    dist
}

/// Exact hop distance inside `grid`; `None` when `v` is unreachable.
pub fn bfs_distance(grid: &ConvexSubgrid, u: Node, v: Node) -> Result<Option<u64>> {
    for n in [u, v] {
        if !grid.contains(n) {
            return domain(format!("{} is not a member of the grid", n.format(grid.kind)));
        }
    }
    let dist = if grid.extent.is_finite() {
        bfs_within(grid.kind, u, |n| grid.contains(n))
    } else {
        // A geodesic never leaves the bounding box of its endpoints by more than one cell.
        let (lo_u, hi_u) = (u.u.min(v.u) - 2, u.u.max(v.u) + 2);
        let (lo_v, hi_v) = (u.v.min(v.v) - 2, u.v.max(v.v) + 2);
        bfs_within(grid.kind, u, |n| n.u >= lo_u && n.u <= hi_u && n.v >= lo_v && n.v <= hi_v)
    };
    Ok(dist.get(&v).copied())
}

/// Arcs leaving `n` that stay inside `grid`.
pub fn neighbors(grid: &ConvexSubgrid, n: Node) -> Result<Vec<((Node, Node), EdgeClass)>> {
    if !grid.contains(n) {
        return domain(format!("{} is not a member of the grid", n.format(grid.kind)));
    }
    Ok(lattice_arcs(grid.kind, n).into_iter().filter(|(m, _)| grid.contains(*m)).map(|(m, c)| ((n, m), c)).collect())
}

/// True iff every node on every lattice geodesic between two members is a member.
///
/// For each source, nodes are swept in BFS order and flagged when some geodesic
/// from the source reaches them through a non-member.
pub fn is_convex(grid: &ConvexSubgrid) -> Result<bool> {
    let members = grid.nodes()?;
    if members.len() <= 1 {
        return Ok(true);
    }
    let lo_u = members.iter().map(|n| n.u).min().unwrap() - 2;
    let hi_u = members.iter().map(|n| n.u).max().unwrap() + 2;
    let lo_v = members.iter().map(|n| n.v).min().unwrap() - 2;
    let hi_v = members.iter().map(|n| n.v).max().unwrap() + 2;
    let in_box = |n: Node| n.u >= lo_u && n.u <= hi_u && n.v >= lo_v && n.v <= hi_v;
    let member_set: std::collections::HashSet<Node> = members.iter().copied().collect();

    for &s in &members {
        let dist = bfs_within(grid.kind, s, in_box);
        let mut order: Vec<(u64, Node)> = dist.iter().map(|(n, d)| (*d, *n)).collect();
        order.sort_unstable();
        let mut bad: HashMap<Node, bool> = HashMap::with_capacity(order.len());
        for (d, x) in order {
            let mut b = !member_set.contains(&x);
            if !b && d > 0 {
                b = lattice_arcs(grid.kind, x).into_iter().any(|(y, _)| dist.get(&y) == Some(&(d - 1)) && bad[&y]);
            }
            if b && member_set.contains(&x) {
                return Ok(false);
            }
            bad.insert(x, b);
        }
    }
    Ok(true)
}
