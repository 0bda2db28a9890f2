//! Demand sets, their text format, and generators with certificates.

mod family;
pub mod flow;
mod generators;

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{distance, ConvexSubgrid, DuplexMode, GridKind, Node};

pub use family::{generate, Family, FamilyParams, Generated};
pub use generators::{
    demand_counts, gen_line_adversarial_tri, gen_lk_adversarial, gen_lk_line, gen_r_central, gen_random_lk,
    gen_random_permutation, gen_rectangle_lk, gen_x_adversarial_hex, r_central_cut, RectangleInfo,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Demand {
    pub origin: Node,
    pub destination: Node,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub grid: ConvexSubgrid,
    /// Link model named in the file header; runs may override it.
    pub duplex: DuplexMode,
    pub demands: Vec<Demand>,
    /// (ℓ, k): per-node send and receive limits.
    pub limits: (u32, u32),
}

impl Instance {
    pub fn new(grid: ConvexSubgrid, duplex: DuplexMode, demands: Vec<Demand>, limits: (u32, u32)) -> Result<Instance> {
        let inst = Instance { grid, duplex, demands, limits };
        inst.validate()?;
        Ok(inst)
    }

    pub fn empty(grid: ConvexSubgrid) -> Instance {
        Instance { grid, duplex: DuplexMode::Full, demands: Vec::new(), limits: (1, 1) }
    }

    pub fn kind(&self) -> GridKind {
        self.grid.kind
    }

    /// Checks membership and the (ℓ, k) multiplicities.
    pub fn validate(&self) -> Result<()> {
        let kind = self.kind();
        let (l, k) = self.limits;
        if l == 0 || k == 0 {
            return Err(Error::Domain("limits must be at least 1".into()));
        }
        let mut sent: HashMap<Node, u32> = HashMap::new();
        let mut recv: HashMap<Node, u32> = HashMap::new();
        for d in &self.demands {
            for n in [d.origin, d.destination] {
                if !self.grid.contains(n) {
                    return Err(Error::Domain(format!("{} is outside the grid", n.format(kind))));
                }
            }
            let s = sent.entry(d.origin).or_default();
            *s += 1;
            if *s > l {
                return Err(Error::Domain(format!("{} sends more than ℓ={l} packets", d.origin.format(kind))));
            }
            let r = recv.entry(d.destination).or_default();
            *r += 1;
            if *r > k {
                return Err(Error::Domain(format!("{} receives more than k={k} packets", d.destination.format(kind))));
            }
        }
        Ok(())
    }

    pub fn is_permutation(&self) -> bool {
        self.limits == (1, 1)
    }

    /// Longest origin–destination distance.
    pub fn l_max(&self) -> u64 {
        self.demands.iter().map(|d| distance(self.kind(), d.origin, d.destination) as u64).max().unwrap_or(0)
    }

    /// Default step budget: 8·(ℓ_max+1)·max{ℓ,k} + 8.
    pub fn default_max_steps(&self) -> u64 {
        let (l, k) = self.limits;
        8 * (self.l_max() + 1) * l.max(k) as u64 + 8
    }

    pub fn serialize(&self) -> String {
        let kind = self.kind();
        let mut out = String::new();
        writeln!(out, "grid {} {} {}", kind.tag(), self.duplex, self.grid).unwrap();
        writeln!(out, "limits {} {}", self.limits.0, self.limits.1).unwrap();
        for d in &self.demands {
            writeln!(out, "{} -> {}", d.origin.format(kind), d.destination.format(kind)).unwrap();
        }
        out
    }

    /// Parses the line format written by [`Instance::serialize`]. Blank lines and
    /// `#` comments are ignored; `limits` is optional and defaults to `1 1`.
    pub fn parse(text: &str) -> Result<Instance> {
        let err = |line: usize, msg: String| Error::Parse { line, msg };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let (hline, header) = lines.next().ok_or_else(|| err(1, "missing `grid` header".into()))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 4 || parts[0] != "grid" {
            return Err(err(hline, "expected `grid <kind> <duplex> <extent>`".into()));
        }
        let kind: GridKind = parts[1].parse().map_err(|e: Error| err(hline, e.to_string()))?;
        let duplex: DuplexMode = parts[2].parse().map_err(|e: Error| err(hline, e.to_string()))?;
        let grid = ConvexSubgrid::parse(kind, parts[3]).map_err(|e| err(hline, e.to_string()))?;

        let mut limits = (1, 1);
        let mut demands = Vec::new();
        let mut sent: HashMap<Node, u32> = HashMap::new();
        let mut recv: HashMap<Node, u32> = HashMap::new();
        for (no, line) in lines {
            if let Some(rest) = line.strip_prefix("limits") {
                if !demands.is_empty() {
                    return Err(err(no, "`limits` must precede the demands".into()));
                }
                let xs: Vec<u32> = rest
                    .split_whitespace()
                    .map(|x| x.parse::<u32>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| err(no, "expected `limits <l> <k>`".into()))?;
                match xs.as_slice() {
                    [l, k] if *l >= 1 && *k >= 1 => limits = (*l, *k),
                    _ => return Err(err(no, "expected `limits <l> <k>` with positive values".into())),
                }
                continue;
            }
            let (a, b) =
                line.split_once("->").ok_or_else(|| err(no, format!("expected `src -> dst`, got `{line}`")))?;
            let node = |t: &str| -> Result<Node> {
                let (k, n) = Node::parse(t).map_err(|e| err(no, e.to_string()))?;
                if k != kind {
                    return Err(err(no, format!("node `{}` is not a {kind} node", t.trim())));
                }
                if !grid.contains(n) {
                    return Err(err(no, format!("node `{}` is outside the grid", t.trim())));
                }
                Ok(n)
            };
            let origin = node(a)?;
            let destination = node(b)?;
            let s = sent.entry(origin).or_default();
            *s += 1;
            if *s > limits.0 {
                return Err(err(no, format!("{} sends more than ℓ={} packets", origin.format(kind), limits.0)));
            }
            let r = recv.entry(destination).or_default();
            *r += 1;
            if *r > limits.1 {
                return Err(err(no, format!("{} receives more than k={} packets", destination.format(kind), limits.1)));
            }
            demands.push(Demand { origin, destination });
        }
        Ok(Instance { grid, duplex, demands, limits })
    }
}

/// What a certificate measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    /// Canonical paths through the marked arc (Full) or edge (Half).
    EdgeCongestion,
    /// ⌈m/|F|⌉ over the marked cut.
    Bisection,
}

/// A claimed lower bound attached to a generated instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub duplex: DuplexMode,
    /// Marked arcs, in the grid's node syntax.
    pub arcs: Vec<(String, String)>,
    pub value: u64,
}

impl Certificate {
    pub fn new(kind: CertificateKind, duplex: DuplexMode, grid: GridKind, arcs: &[(Node, Node)], value: u64) -> Self {
        Certificate { kind, duplex, arcs: arcs.iter().map(|(a, b)| (a.format(grid), b.format(grid))).collect(), value }
    }

    pub fn marked_arcs(&self) -> Result<Vec<(Node, Node)>> {
        self.arcs.iter().map(|(a, b)| Ok((Node::parse(a)?.1, Node::parse(b)?.1))).collect()
    }
}
