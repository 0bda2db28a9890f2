use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use super::{SimConfig, Trace};
use crate::grid::{distance, edge_class, DuplexMode, Node};
use crate::instances::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// Move does not start at the packet's position or is not a lattice edge.
    NotIncident,
    ArcCapacity,
    HalfDuplexExclusion,
    NotDelivered,
    HopCount,
    /// Unknown packet, a packet moving twice in one step, or out-of-order steps.
    Conservation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub step: Option<u64>,
    pub packet: Option<usize>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.kind)?;
        if let Some(s) = self.step {
            write!(f, " at step {s}")?;
        }
        if let Some(p) = self.packet {
            write!(f, " (packet {p})")?;
        }
        write!(f, ": {}", self.detail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidateOptions {
    pub duplex: DuplexMode,
    /// Check hop count == initial distance.
    pub shortest_path: bool,
    /// Packets allowed per arc (Full) or edge (Half) per step.
    pub capacity: u64,
}

/// Checks a trace against the port model for `config`.
pub fn validate_trace(instance: &Instance, config: &SimConfig, trace: &Trace) -> Vec<Violation> {
    let opts = ValidateOptions { duplex: config.duplex, shortest_path: true, capacity: 1 };
    validate_trace_with(instance, &opts, trace)
}

pub fn validate_trace_with(instance: &Instance, opts: &ValidateOptions, trace: &Trace) -> Vec<Violation> {
    let kind = instance.kind();
    let mut out = Vec::new();
    let mut pos: Vec<Node> = instance.demands.iter().map(|d| d.origin).collect();
    let mut hops = vec![0u64; pos.len()];
    let mut last_step = 0;
    let v = |kind, step, packet, detail: String| Violation { kind, step, packet, detail };

    for rec in &trace.steps {
        let s = Some(rec.step);
        if rec.step <= last_step {
            out.push(v(ViolationKind::Conservation, s, None, format!("step {} follows step {last_step}", rec.step)));
        }
        last_step = rec.step;
        let mut moved = HashSet::new();
        let mut arcs: HashMap<(Node, Node), u64> = HashMap::new();
        let mut edges: HashMap<(Node, Node), (u64, bool, bool)> = HashMap::new();
        let mut applied = Vec::new();
        for m in &rec.moves {
            let p = Some(m.packet);
            if m.packet >= pos.len() {
                out.push(v(ViolationKind::Conservation, s, p, "unknown packet".into()));
                continue;
            }
            if !moved.insert(m.packet) {
                out.push(v(ViolationKind::Conservation, s, p, "packet moves twice in one step".into()));
                continue;
            }
            if m.from != pos[m.packet] {
                out.push(v(
                    ViolationKind::NotIncident,
                    s,
                    p,
                    format!("packet is at {}, move starts at {}", pos[m.packet].format(kind), m.from.format(kind)),
                ));
            }
            if edge_class(kind, m.from, m.to).is_none() {
                out.push(v(
                    ViolationKind::NotIncident,
                    s,
                    p,
                    format!("{} -> {} is not an edge", m.from.format(kind), m.to.format(kind)),
                ));
            }
            *arcs.entry((m.from, m.to)).or_default() += 1;
            let key = (m.from.min(m.to), m.from.max(m.to));
            let e = edges.entry(key).or_default();
            e.0 += 1;
            if m.from < m.to {
                e.1 = true;
            } else {
                e.2 = true;
            }
            applied.push((m.packet, m.to));
        }
        match opts.duplex {
            DuplexMode::Full => {
                let mut over: Vec<_> = arcs.iter().filter(|(_, c)| **c > opts.capacity).collect();
                over.sort();
                for ((a, b), c) in over {
                    out.push(v(
                        ViolationKind::ArcCapacity,
                        s,
                        None,
                        format!("{} packets on {} -> {}", c, a.format(kind), b.format(kind)),
                    ));
                }
            }
            DuplexMode::Half => {
                let mut over: Vec<_> = edges.iter().filter(|(_, e)| e.0 > opts.capacity).collect();
                over.sort();
                for ((a, b), (c, fwd, back)) in over {
                    let k = if *fwd && *back { ViolationKind::HalfDuplexExclusion } else { ViolationKind::ArcCapacity };
                    out.push(v(k, s, None, format!("{} packets on edge {} -- {}", c, a.format(kind), b.format(kind))));
                }
            }
        }
        for (p, to) in applied {
            pos[p] = to;
            hops[p] += 1;
        }
    }

    for (i, d) in instance.demands.iter().enumerate() {
        if pos[i] != d.destination {
            out.push(v(
                ViolationKind::NotDelivered,
                None,
                Some(i),
                format!("ends at {}, destination {}", pos[i].format(kind), d.destination.format(kind)),
            ));
        } else if opts.shortest_path {
            let want = distance(kind, d.origin, d.destination) as u64;
            if hops[i] != want {
                out.push(v(ViolationKind::HopCount, None, Some(i), format!("{} hops for distance {want}", hops[i])));
            }
        }
    }
    out
}
