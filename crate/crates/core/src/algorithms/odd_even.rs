use super::Policy;
use crate::engine::{Dispatch, NodeView, Packet};
use crate::error::Result;
use crate::grid::{is_positive_arc, DuplexMode, GridKind};
use crate::instances::Instance;

/// Half-duplex realization of a full-duplex policy. Each inner step becomes two
/// sub-steps: the first serves positively oriented arcs, the second the rest,
/// skipping packets that moved in the first.
pub struct OddEven {
    inner: Box<dyn Policy>,
    name: String,
}

impl OddEven {
    pub fn new(inner: Box<dyn Policy>) -> Self {
        let name = format!("odd_even({})", inner.name());
        OddEven { inner, name }
    }

    pub fn named(inner: Box<dyn Policy>, name: String) -> Self {
        OddEven { inner, name }
    }
}

impl Policy for OddEven {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn applies_to(&self, kind: GridKind, duplex: DuplexMode) -> bool {
        duplex == DuplexMode::Half && self.inner.applies_to(kind, DuplexMode::Full)
    }

    fn prepare(&self, instance: &Instance) -> Result<()> {
        self.inner.prepare(instance)
    }

    fn decide(&self, view: &NodeView<'_>) -> Vec<Dispatch> {
        let s = view.step;
        let inner_step = s.div_ceil(2);
        let first = s % 2 == 1;
        let waiting: Vec<Packet>;
        let packets = if first {
            view.packets
        } else {
            waiting = view.packets.iter().filter(|p| p.arrived_at + 1 != s).cloned().collect();
            &waiting
        };
        if packets.is_empty() {
            return Vec::new();
        }
        let inner = NodeView { step: inner_step, packets, ..*view };
        self.inner.decide(&inner).into_iter().filter(|d| is_positive_arc(view.node, d.mv.to) == first).collect()
    }

    fn canonical_paths(&self) -> bool {
        self.inner.canonical_paths()
    }
}
