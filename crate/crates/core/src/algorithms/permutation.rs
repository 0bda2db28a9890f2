use std::cmp::Reverse;

use super::{check_multiplicity, farthest_first, hex_full_phase, select_per_arc, Phase, Policy};
use crate::engine::{Dispatch, NodeView};
use crate::error::Result;
use crate::grid::{canonical_move, hex, DuplexMode, GridKind};
use crate::instances::Instance;

/// Dimension-order routing on square meshes: horizontal first, farthest first.
#[derive(Debug, Clone, Copy, Default)]
pub struct SquareXy;

impl Policy for SquareXy {
    fn name(&self) -> String {
        "square_xy".into()
    }

    fn applies_to(&self, kind: GridKind, _duplex: DuplexMode) -> bool {
        kind == GridKind::Square
    }

    fn prepare(&self, instance: &Instance) -> Result<()> {
        check_multiplicity(instance, 1, 1, "square_xy needs a permutation")
    }

    fn decide(&self, view: &NodeView<'_>) -> Vec<Dispatch> {
        square_decide(view)
    }
}

pub(crate) fn square_decide(view: &NodeView<'_>) -> Vec<Dispatch> {
    select_per_arc(view.packets.iter().filter_map(|p| {
        let mv = canonical_move(view.kind, view.node, p.remaining)?;
        Some((farthest_first(p.distance(view.kind), p.id), Dispatch { packet: p.id, mv }))
    }))
}

/// Triangular permutation routing. Negative components go first and are served
/// FIFO by id; positive contenders are served farthest first.
#[derive(Debug, Clone, Copy, Default)]
pub struct TriPerm;

impl Policy for TriPerm {
    fn name(&self) -> String {
        "tri_perm_full".into()
    }

    fn applies_to(&self, kind: GridKind, _duplex: DuplexMode) -> bool {
        kind == GridKind::Triangular
    }

    fn prepare(&self, instance: &Instance) -> Result<()> {
        check_multiplicity(instance, 1, 1, "tri_perm needs a permutation")
    }

    fn decide(&self, view: &NodeView<'_>) -> Vec<Dispatch> {
        tri_decide(view)
    }
}

pub(crate) fn tri_decide(view: &NodeView<'_>) -> Vec<Dispatch> {
    select_per_arc(view.packets.iter().filter_map(|p| {
        let mv = canonical_move(view.kind, view.node, p.remaining)?;
        let key = if mv.sign < 0 { (0u8, Reverse(0), p.id) } else { (1u8, Reverse(p.distance(view.kind)), p.id) };
        Some((key, Dispatch { packet: p.id, mv }))
    }))
}

/// Phase-based honeycomb routing: from step 2 on, even steps open phase 1 and
/// odd steps phase 2, each admitting one edge class per chain.
#[derive(Debug, Clone, Copy, Default)]
pub struct HexPerm;

impl Policy for HexPerm {
    fn name(&self) -> String {
        "hex_perm_full".into()
    }

    fn applies_to(&self, kind: GridKind, _duplex: DuplexMode) -> bool {
        kind == GridKind::Hexagonal
    }

    fn prepare(&self, instance: &Instance) -> Result<()> {
        check_multiplicity(instance, 1, 1, "hex_perm needs a permutation")
    }

    fn decide(&self, view: &NodeView<'_>) -> Vec<Dispatch> {
        hex_decide(view)
    }
}

/// Per-arc priority: negative first, then farther, then lower id.
pub(crate) type HexKey = (u8, Reverse<i64>, usize);

/// Contenders for each arc at a honeycomb node, before tie-breaking.
pub(crate) fn hex_candidates(view: &NodeView<'_>) -> Vec<(HexKey, Dispatch)> {
    let phase = hex_full_phase(view.step);
    let all_last_hop = view.packets.iter().all(|p| p.distance(view.kind) == 1);
    view.packets
        .iter()
        .filter_map(|p| {
            let mv = canonical_move(view.kind, view.node, p.remaining)?;
            let open = match phase {
                Phase::FirstStep => true,
                _ if all_last_hop => true,
                Phase::Phase1 => hex::phase_allows(1, mv.axis, mv.class),
                Phase::Phase2 => hex::phase_allows(2, mv.axis, mv.class),
            };
            open.then(|| ((u8::from(mv.sign > 0), Reverse(p.distance(view.kind)), p.id), Dispatch { packet: p.id, mv }))
        })
        .collect()
}

pub(crate) fn hex_decide(view: &NodeView<'_>) -> Vec<Dispatch> {
    select_per_arc(hex_candidates(view))
}

/// Contention counts at one node and step of the honeycomb policy.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HexContention {
    /// Arcs with more than one eligible packet carrying a negative component.
    pub negative_ties: usize,
    /// Arcs whose positive contenders share the largest remaining distance.
    pub max_remaining_ties: usize,
}

/// Diagnostic for the two uniqueness properties of the honeycomb policy.
pub fn hex_contention(view: &NodeView<'_>) -> HexContention {
    use std::collections::BTreeMap;
    let mut per_arc: BTreeMap<_, Vec<(u8, i64)>> = BTreeMap::new();
    for ((neg, Reverse(d), _), disp) in hex_candidates(view) {
        per_arc.entry(disp.mv.to).or_default().push((neg, d));
    }
    let mut out = HexContention::default();
    for cands in per_arc.values() {
        if cands.iter().filter(|c| c.0 == 0).count() > 1 {
            out.negative_ties += 1;
        }
        let pos: Vec<i64> = cands.iter().filter(|c| c.0 == 1).map(|c| c.1).collect();
        if let Some(m) = pos.iter().max() {
            if cands.iter().all(|c| c.0 == 1) && pos.iter().filter(|d| *d == m).count() > 1 {
                out.max_remaining_ties += 1;
            }
        }
    }
    out
}
