//! Node-local routing policies.

mod central;
mod lk;
mod odd_even;
mod permutation;

use std::cmp::Reverse;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::ub_lk;
use crate::engine::{Dispatch, NodeView};
use crate::error::{Error, Result};
use crate::grid::{DuplexMode, Extent, GridKind, Node};
use crate::instances::Instance;

pub use central::RCentral;
pub use lk::LkGeneral;
pub use odd_even::OddEven;
pub use permutation::{hex_contention, HexContention, HexPerm, SquareXy, TriPerm};

/// A node-local routing rule. Implementations hold no mutable state: a decision
/// depends only on the view.
pub trait Policy: Send + Sync {
    fn name(&self) -> String;

    fn applies_to(&self, kind: GridKind, duplex: DuplexMode) -> bool;

    /// Rejects instances outside the policy's domain.
    fn prepare(&self, _instance: &Instance) -> Result<()> {
        Ok(())
    }

    fn decide(&self, view: &NodeView<'_>) -> Vec<Dispatch>;

    /// Every packet follows its canonical path (negative component first).
    fn canonical_paths(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyId {
    SquareXy,
    TriPermFull,
    TriPermHalf,
    HexPermFull,
    HexPermHalf,
    RCentral,
    LkGeneral,
}

impl PolicyId {
    pub const ALL: [PolicyId; 7] = [
        PolicyId::SquareXy,
        PolicyId::TriPermFull,
        PolicyId::TriPermHalf,
        PolicyId::HexPermFull,
        PolicyId::HexPermHalf,
        PolicyId::RCentral,
        PolicyId::LkGeneral,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolicyId::SquareXy => "square_xy",
            PolicyId::TriPermFull => "tri_perm_full",
            PolicyId::TriPermHalf => "tri_perm_half",
            PolicyId::HexPermFull => "hex_perm_full",
            PolicyId::HexPermHalf => "hex_perm_half",
            PolicyId::RCentral => "r_central",
            PolicyId::LkGeneral => "lk_general",
        }
    }

    /// The permutation policy of a grid kind.
    pub fn permutation(kind: GridKind, duplex: DuplexMode) -> PolicyId {
        match (kind, duplex) {
            (GridKind::Square, _) => PolicyId::SquareXy,
            (GridKind::Triangular, DuplexMode::Full) => PolicyId::TriPermFull,
            (GridKind::Triangular, DuplexMode::Half) => PolicyId::TriPermHalf,
            (GridKind::Hexagonal, DuplexMode::Full) => PolicyId::HexPermFull,
            (GridKind::Hexagonal, DuplexMode::Half) => PolicyId::HexPermHalf,
        }
    }
}

impl fmt::Display for PolicyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PolicyId::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| Error::Domain(format!("unknown policy `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PolicyParams {
    pub l: Option<u64>,
    pub k: Option<u64>,
    pub r: Option<i64>,
}

/// Instantiates `id` for a grid kind and link model. Full-duplex policies are
/// wrapped in [`OddEven`] for half duplex.
pub fn build_policy(
    id: PolicyId,
    params: &PolicyParams,
    kind: GridKind,
    duplex: DuplexMode,
) -> Result<Box<dyn Policy>> {
    let mismatch =
        || Error::PolicyMismatch { policy: id.name().into(), kind: kind.to_string(), duplex: duplex.to_string() };
    let inner: Box<dyn Policy> = match id {
        PolicyId::SquareXy => Box::new(SquareXy),
        PolicyId::TriPermFull | PolicyId::TriPermHalf => Box::new(TriPerm),
        PolicyId::HexPermFull | PolicyId::HexPermHalf => Box::new(HexPerm),
        PolicyId::RCentral => Box::new(RCentral { r: params.r }),
        PolicyId::LkGeneral => Box::new(LkGeneral { l: params.l, k: params.k }),
    };
    if !inner.applies_to(kind, DuplexMode::Full) {
        return Err(mismatch());
    }
    let explicit_half = matches!(id, PolicyId::TriPermHalf | PolicyId::HexPermHalf);
    match duplex {
        DuplexMode::Full if explicit_half => Err(mismatch()),
        DuplexMode::Full => Ok(inner),
        DuplexMode::Half => {
            let name = if explicit_half { id.name().to_string() } else { format!("odd_even({})", id.name()) };
            Ok(Box::new(OddEven::named(inner, name)))
        }
    }
}

/// Running-time guarantee of `id` on `instance`, when one is known.
pub fn upper_bound(id: PolicyId, params: &PolicyParams, instance: &Instance, duplex: DuplexMode) -> Option<u64> {
    let lm = instance.l_max();
    let factor = match duplex {
        DuplexMode::Full => 1,
        DuplexMode::Half => 2,
    };
    if lm == 0 {
        return Some(0);
    }
    let full = match id {
        PolicyId::SquareXy => match instance.grid.extent {
            Extent::Rect { w, h, .. } => (w + h - 2) as u64,
            _ => return None,
        },
        PolicyId::TriPermFull | PolicyId::TriPermHalf => lm,
        PolicyId::HexPermFull | PolicyId::HexPermHalf => (2 * lm).saturating_sub(2).max(1),
        PolicyId::RCentral => lm * (lm + 1) / 2,
        PolicyId::LkGeneral => {
            let l = params.l.unwrap_or(instance.limits.0 as u64);
            let k = params.k.unwrap_or(instance.limits.1 as u64);
            ub_lk(instance.kind(), l, k, lm)
        }
    };
    Some(factor * full)
}

/// Checks per-node send/receive counts against (ℓ, k).
pub(crate) fn check_multiplicity(instance: &Instance, l: u64, k: u64, what: &str) -> Result<()> {
    let kind = instance.kind();
    let mut sent: HashMap<Node, u64> = HashMap::new();
    let mut recv: HashMap<Node, u64> = HashMap::new();
    for d in &instance.demands {
        *sent.entry(d.origin).or_default() += 1;
        *recv.entry(d.destination).or_default() += 1;
    }
    if let Some((n, c)) = sent.iter().filter(|(_, c)| **c > l).min() {
        return Err(Error::Domain(format!("{what}: {} sends {c} packets, above ℓ={l}", n.format(kind))));
    }
    if let Some((n, c)) = recv.iter().filter(|(_, c)| **c > k).min() {
        return Err(Error::Domain(format!("{what}: {} receives {c} packets, above k={k}", n.format(kind))));
    }
    Ok(())
}

/// Keeps the smallest-key candidate per outgoing arc.
pub(crate) fn select_per_arc<K: Ord>(cands: impl IntoIterator<Item = (K, Dispatch)>) -> Vec<Dispatch> {
    let mut best: BTreeMap<Node, (K, Dispatch)> = BTreeMap::new();
    for (key, d) in cands {
        match best.get(&d.mv.to) {
            Some((k, _)) if *k <= key => {}
            _ => {
                best.insert(d.mv.to, (key, d));
            }
        }
    }
    let mut out: Vec<Dispatch> = best.into_values().map(|(_, d)| d).collect();
    out.sort_by_key(|d| d.packet);
    out
}

/// Priority key: larger remaining distance first, then lower id.
pub(crate) fn farthest_first(dist: i64, id: usize) -> (Reverse<i64>, usize) {
    (Reverse(dist), id)
}

/// Phase of the full-duplex honeycomb algorithm at a (1-based) step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    FirstStep,
    Phase1,
    Phase2,
}

pub fn hex_full_phase(step: u64) -> Phase {
    match step {
        0 | 1 => Phase::FirstStep,
        s if s % 2 == 0 => Phase::Phase1,
        _ => Phase::Phase2,
    }
}

/// Phase of the half-duplex honeycomb algorithm. Steps pair up into an "even"
/// sub-step (0-based index even: positive arcs) and an "odd" one (negative arcs).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfPhase {
    FirstEven,
    FirstOdd,
    P1Even,
    P1Odd,
    P2Even,
    P2Odd,
}

pub fn hex_half_phase(step: u64) -> HalfPhase {
    let even = step % 2 == 1;
    match (hex_full_phase(step.div_ceil(2)), even) {
        (Phase::FirstStep, true) => HalfPhase::FirstEven,
        (Phase::FirstStep, false) => HalfPhase::FirstOdd,
        (Phase::Phase1, true) => HalfPhase::P1Even,
        (Phase::Phase1, false) => HalfPhase::P1Odd,
        (Phase::Phase2, true) => HalfPhase::P2Even,
        (Phase::Phase2, false) => HalfPhase::P2Odd,
    }
}
