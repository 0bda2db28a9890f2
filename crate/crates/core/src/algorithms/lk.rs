use super::permutation::{hex_decide, square_decide, tri_decide};
use super::{check_multiplicity, Policy};
use crate::engine::{Dispatch, NodeView};
use crate::error::Result;
use crate::grid::{DuplexMode, GridKind};
use crate::instances::Instance;

/// (ℓ, k)-routing with the permutation rules of each grid kind: queues may hold
/// several packets, and every arc still serves one per step.
#[derive(Debug, Clone, Copy, Default)]
pub struct LkGeneral {
    pub l: Option<u64>,
    pub k: Option<u64>,
}

impl Policy for LkGeneral {
    fn name(&self) -> String {
        match (self.l, self.k) {
            (Some(l), Some(k)) => format!("lk_general({l},{k})"),
            _ => "lk_general".into(),
        }
    }

    fn applies_to(&self, _kind: GridKind, _duplex: DuplexMode) -> bool {
        true
    }

    fn prepare(&self, instance: &Instance) -> Result<()> {
        let l = self.l.unwrap_or(instance.limits.0 as u64);
        let k = self.k.unwrap_or(instance.limits.1 as u64);
        check_multiplicity(instance, l, k, "lk_general")
    }

    fn decide(&self, view: &NodeView<'_>) -> Vec<Dispatch> {
        match view.kind {
            GridKind::Square => square_decide(view),
            GridKind::Triangular => tri_decide(view),
            GridKind::Hexagonal => hex_decide(view),
        }
    }
}
