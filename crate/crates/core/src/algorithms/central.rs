use super::{farthest_first, select_per_arc, Policy};
use crate::engine::{Dispatch, NodeView};
use crate::error::{Error, Result};
use crate::grid::{canonical_move, distance, step, DuplexMode, GridKind, Move, Node};
use crate::instances::Instance;

/// Triangular directions in cyclic order; consecutive entries span a sector.
const AX: [(i64, i64); 6] = [(1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1)];

/// Many-to-one routing toward a single centre. Each node funnels packets into a
/// sector so that every arc entering the centre carries a balanced share.
#[derive(Debug, Clone, Copy, Default)]
pub struct RCentral {
    /// Radius; defaults to the instance's longest distance.
    pub r: Option<i64>,
}

impl Policy for RCentral {
    fn name(&self) -> String {
        "r_central".into()
    }

    fn applies_to(&self, _kind: GridKind, _duplex: DuplexMode) -> bool {
        true
    }

    fn prepare(&self, instance: &Instance) -> Result<()> {
        let kind = instance.kind();
        let Some(first) = instance.demands.first() else {
            return Ok(());
        };
        let center = first.destination;
        let r = self.r.unwrap_or(instance.l_max() as i64);
        let mut seen = std::collections::HashSet::new();
        for d in &instance.demands {
            let bad = |why: &str| Err(Error::Domain(format!("not {r}-central: {} {why}", d.origin.format(kind))));
            if d.destination != center {
                return bad("targets a second destination");
            }
            if !seen.insert(d.origin) {
                return bad("sends twice");
            }
            if distance(kind, d.origin, center) > r {
                return bad("lies outside the radius");
            }
        }
        Ok(())
    }

    fn decide(&self, view: &NodeView<'_>) -> Vec<Dispatch> {
        select_per_arc(view.packets.iter().filter_map(|p| {
            let mv = match view.kind {
                GridKind::Hexagonal => canonical_move(view.kind, view.node, p.remaining)?,
                _ => sector_move(view.kind, view.node, p.destination)?,
            };
            Some((farthest_first(p.distance(view.kind), p.id), Dispatch { packet: p.id, mv }))
        }))
    }

    fn canonical_paths(&self) -> bool {
        false
    }
}

/// Next hop from `at` toward `center` under the sector rules.
pub(crate) fn sector_move(kind: GridKind, at: Node, center: Node) -> Option<Move> {
    let (a, b) = (at.u - center.u, at.v - center.v);
    if a == 0 && b == 0 {
        return None;
    }
    match kind {
        GridKind::Square => {
            let vertical = if a != 0 && b != 0 { a * b > 0 } else { a == 0 };
            Some(if vertical { step(kind, at, 1, -b.signum()) } else { step(kind, at, 0, -a.signum()) })
        }
        GridKind::Triangular => {
            // (a, b) = α·AX[m] + β·AX[m+1] with α ≥ 1, β ≥ 0; consecutive axes have determinant 1.
            let (m, beta) = (0..6).find_map(|m| {
                let (x1, y1) = AX[m];
                let (x2, y2) = AX[(m + 1) % 6];
                let alpha = a * y2 - b * x2;
                let beta = x1 * b - y1 * a;
                (alpha >= 1 && beta >= 0).then_some((m, beta))
            })?;
            let (du, dv) = if beta > 0 { AX[(m + 1) % 6] } else { AX[m] };
            Some(tri_step(at, -du, -dv))
        }
        GridKind::Hexagonal => None,
    }
}

fn tri_step(at: Node, du: i64, dv: i64) -> Move {
    let (axis, sign) = match (du, dv) {
        (1, 0) => (0, 1),
        (-1, 0) => (0, -1),
        (0, 1) => (1, 1),
        (0, -1) => (1, -1),
        (-1, -1) => (2, 1),
        (1, 1) => (2, -1),
        _ => unreachable!("not a unit vector: ({du}, {dv})"),
    };
    step(GridKind::Triangular, at, axis, sign)
}
