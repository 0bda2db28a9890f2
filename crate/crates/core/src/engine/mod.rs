//! Synchronous store-and-forward simulator.
//!
//! Each round the policy is asked, node by node, which queued packets leave on
//! which arcs. It sees only that node's packets, the global step counter and the
//! lattice. All dispatches of a round are applied together.

mod trace;
mod validate;

use std::collections::{BTreeMap, HashSet};

use crate::algorithms::{build_policy, Policy, PolicyId, PolicyParams};
use crate::error::{Error, Result};
use crate::grid::{
    address_length, advance, edge_class, relative_address, DuplexMode, GridKind, Move, Node, RelativeAddress,
};
use crate::instances::Instance;

pub use trace::{SimResult, StepRecord, Trace, TraceMove};
pub use validate::{validate_trace, validate_trace_with, ValidateOptions, Violation, ViolationKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Packet {
    /// Index of the demand in the instance.
    pub id: usize,
    pub origin: Node,
    pub destination: Node,
    pub remaining: RelativeAddress,
    pub location: Node,
    pub hops: u64,
    /// Step of the last hop (0 before the first).
    pub arrived_at: u64,
}

impl Packet {
    pub fn distance(&self, kind: GridKind) -> i64 {
        address_length(kind, self.remaining)
    }

    pub fn delivered(&self) -> bool {
        self.location == self.destination
    }
}

/// What a policy sees at one node in one round.
#[derive(Debug, Clone, Copy)]
pub struct NodeView<'a> {
    pub kind: GridKind,
    pub node: Node,
    /// 1-based round number.
    pub step: u64,
    /// Undelivered packets queued here, by ascending id.
    pub packets: &'a [Packet],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dispatch {
    pub packet: usize,
    pub mv: Move,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimConfig {
    pub policy: PolicyId,
    pub params: PolicyParams,
    pub duplex: DuplexMode,
    pub max_steps: u64,
    /// Reserved for randomized tie-breaks; every built-in policy is deterministic.
    pub seed: u64,
}

impl SimConfig {
    /// `policy` with the instance's default step budget.
    pub fn new(policy: PolicyId, duplex: DuplexMode, instance: &Instance) -> SimConfig {
        let (l, k) = instance.limits;
        SimConfig {
            policy,
            params: PolicyParams { l: Some(l as u64), k: Some(k as u64), r: None },
            duplex,
            max_steps: instance.default_max_steps(),
            seed: 0,
        }
    }
}

/// A run in progress; [`run`] drives it to completion.
pub struct Simulation<'a> {
    kind: GridKind,
    duplex: DuplexMode,
    policy: &'a dyn Policy,
    packets: Vec<Packet>,
    step: u64,
    undelivered: usize,
    trace: Trace,
    usage: BTreeMap<(Node, Node), u64>,
    max_queue: usize,
}

impl<'a> Simulation<'a> {
    pub fn new(instance: &Instance, policy: &'a dyn Policy, duplex: DuplexMode) -> Result<Self> {
        let kind = instance.kind();
        if !policy.applies_to(kind, duplex) {
            return Err(Error::PolicyMismatch {
                policy: policy.name(),
                kind: kind.to_string(),
                duplex: duplex.to_string(),
            });
        }
        policy.prepare(instance)?;
        let packets: Vec<Packet> = instance
            .demands
            .iter()
            .enumerate()
            .map(|(id, d)| Packet {
                id,
                origin: d.origin,
                destination: d.destination,
                remaining: relative_address(kind, d.origin, d.destination),
                location: d.origin,
                hops: 0,
                arrived_at: 0,
            })
            .collect();
        let undelivered = packets.iter().filter(|p| !p.delivered()).count();
        Ok(Simulation {
            kind,
            duplex,
            policy,
            packets,
            step: 0,
            undelivered,
            trace: Trace::default(),
            usage: BTreeMap::new(),
            max_queue: 0,
        })
    }

    pub fn packets(&self) -> &[Packet] {
        &self.packets
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn is_done(&self) -> bool {
        self.undelivered == 0
    }

    /// Undelivered packets grouped by node, each queue by ascending id.
    pub fn queues(&self) -> BTreeMap<Node, Vec<Packet>> {
        let mut q: BTreeMap<Node, Vec<Packet>> = BTreeMap::new();
        for p in self.packets.iter().filter(|p| !p.delivered()) {
            q.entry(p.location).or_default().push(p.clone());
        }
        q
    }

    /// Decisions for the next round, per node.
    pub fn decide(&self) -> BTreeMap<Node, Vec<Dispatch>> {
        let step = self.step + 1;
        self.queues()
            .into_iter()
            .map(|(node, packets)| {
                let view = NodeView { kind: self.kind, node, step, packets: &packets };
                (node, self.policy.decide(&view))
            })
            .collect()
    }

    /// Runs one round and returns its record.
    pub fn step(&mut self) -> Result<&StepRecord> {
        let queues = self.queues();
        self.max_queue = self.max_queue.max(queues.values().map(Vec::len).max().unwrap_or(0));
        let step = self.step + 1;
        let conflict = |detail: String| Error::PolicyConflict { step, detail };

        let mut moved = HashSet::new();
        let mut used = HashSet::new();
        let mut moves = Vec::new();
        for (node, packets) in &queues {
            let view = NodeView { kind: self.kind, node: *node, step, packets };
            for d in self.policy.decide(&view) {
                if !packets.iter().any(|p| p.id == d.packet) {
                    return Err(conflict(format!("packet {} is not queued at {}", d.packet, node.format(self.kind))));
                }
                if !moved.insert(d.packet) {
                    return Err(conflict(format!("packet {} dispatched twice", d.packet)));
                }
                if edge_class(self.kind, *node, d.mv.to).is_none() {
                    return Err(conflict(format!(
                        "{} is not adjacent to {}",
                        d.mv.to.format(self.kind),
                        node.format(self.kind)
                    )));
                }
                let key = match self.duplex {
                    DuplexMode::Full => (*node, d.mv.to),
                    DuplexMode::Half => ((*node).min(d.mv.to), (*node).max(d.mv.to)),
                };
                if !used.insert(key) {
                    return Err(conflict(format!(
                        "{} -> {} used twice",
                        node.format(self.kind),
                        d.mv.to.format(self.kind)
                    )));
                }
                moves.push((d, *node));
            }
        }

        moves.sort_by_key(|(d, _)| d.packet);
        let mut record = StepRecord { step, moves: Vec::with_capacity(moves.len()) };
        for (d, from) in moves {
            let p = &mut self.packets[d.packet];
            p.remaining = advance(self.kind, p.remaining, &d.mv, p.destination);
            p.location = d.mv.to;
            p.hops += 1;
            p.arrived_at = step;
            if p.delivered() {
                p.remaining = RelativeAddress::ZERO;
                self.undelivered -= 1;
            }
            *self.usage.entry((from, d.mv.to)).or_insert(0) += 1;
            record.moves.push(TraceMove { packet: d.packet, from, to: d.mv.to });
        }
        self.step = step;
        self.trace.steps.push(record);
        Ok(self.trace.steps.last().unwrap())
    }

    pub fn finish(self) -> (SimResult, Trace) {
        let result = SimResult {
            completion_time: self.step,
            arc_usage: self.usage,
            max_queue: self.max_queue,
            delivered: self.undelivered == 0,
        };
        (result, self.trace)
    }
}

/// Runs `policy` until every packet is delivered or `max_steps` rounds have passed.
/// A timeout is reported through `delivered == false`.
pub fn run_policy(
    instance: &Instance,
    policy: &dyn Policy,
    duplex: DuplexMode,
    max_steps: u64,
) -> Result<(SimResult, Trace)> {
    let mut sim = Simulation::new(instance, policy, duplex)?;
    while !sim.is_done() && sim.step_count() < max_steps {
        sim.step()?;
    }
    Ok(sim.finish())
}

/// Runs the policy named in `config`.
pub fn run(instance: &Instance, config: &SimConfig) -> Result<(SimResult, Trace)> {
    if config.max_steps == 0 {
        return Err(Error::Domain("max_steps must be positive".into()));
    }
    let policy = build_policy(config.policy, &config.params, instance.kind(), config.duplex)?;
    run_policy(instance, policy.as_ref(), config.duplex, config.max_steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::ConvexSubgrid;
    use crate::instances::{gen_random_permutation, gen_x_adversarial_hex, Demand};

    fn run_id(inst: &Instance, id: PolicyId, duplex: DuplexMode) -> (SimResult, Trace) {
        run(inst, &SimConfig::new(id, duplex, inst)).unwrap()
    }

    #[test]
    fn empty_instance_finishes_at_zero() {
        let inst = Instance::empty(ConvexSubgrid::rect(GridKind::Square, 0, 0, 4, 4));
        let (r, t) = run_id(&inst, PolicyId::SquareXy, DuplexMode::Full);
        assert_eq!(r.completion_time, 0);
        assert!(r.delivered && t.is_empty());
    }

    #[test]
    fn lone_packet_takes_its_distance() {
        let grid = ConvexSubgrid::rect(GridKind::Triangular, 0, 0, 6, 6);
        let d = Demand { origin: Node::new(0, 4), destination: Node::new(3, 2) };
        let inst = Instance::new(grid, DuplexMode::Full, vec![d], (1, 1)).unwrap();
        assert_eq!(distance_of(&inst), 5);
        let (r, t) = run_id(&inst, PolicyId::TriPermFull, DuplexMode::Full);
        assert_eq!(r.completion_time, 5);
        assert!(validate_trace(&inst, &SimConfig::new(PolicyId::TriPermFull, DuplexMode::Full, &inst), &t).is_empty());
    }

    fn distance_of(inst: &Instance) -> i64 {
        let d = inst.demands[0];
        crate::grid::distance(inst.kind(), d.origin, d.destination)
    }

    #[test]
    fn x_instance_meets_two_l_minus_two() {
        let (inst, _) = gen_x_adversarial_hex(4).unwrap();
        let (r, _) = run_id(&inst, PolicyId::HexPermFull, DuplexMode::Full);
        assert_eq!(r.completion_time, 6);
    }

    #[test]
    fn runs_are_deterministic() {
        let inst = gen_random_permutation(&ConvexSubgrid::ball(GridKind::Hexagonal, Node::hex(0, 0, 0), 5), 7).unwrap();
        let a = run_id(&inst, PolicyId::HexPermFull, DuplexMode::Full);
        let b = run_id(&inst, PolicyId::HexPermFull, DuplexMode::Full);
        assert_eq!(a, b);
    }

    #[test]
    fn decisions_ignore_queue_order() {
        let inst = gen_random_lk_for_test();
        let cfg = SimConfig::new(PolicyId::LkGeneral, DuplexMode::Full, &inst);
        let policy = build_policy(cfg.policy, &cfg.params, inst.kind(), cfg.duplex).unwrap();
        let sim = Simulation::new(&inst, policy.as_ref(), cfg.duplex).unwrap();
        for (node, mut packets) in sim.queues() {
            let view = NodeView { kind: inst.kind(), node, step: 1, packets: &packets };
            let forward = policy.decide(&view);
            packets.reverse();
            let view = NodeView { kind: inst.kind(), node, step: 1, packets: &packets };
            assert_eq!(forward, policy.decide(&view));
        }
    }

    fn gen_random_lk_for_test() -> Instance {
        crate::instances::gen_random_lk(&ConvexSubgrid::rect(GridKind::Triangular, 0, 0, 5, 5), 3, 2, 11).unwrap()
    }

    #[test]
    fn validator_flags_broken_traces() {
        let inst = gen_random_permutation(&ConvexSubgrid::rect(GridKind::Square, 0, 0, 4, 4), 3).unwrap();
        let cfg = SimConfig::new(PolicyId::SquareXy, DuplexMode::Full, &inst);
        let (_, trace) = run(&inst, &cfg).unwrap();
        assert!(validate_trace(&inst, &cfg, &trace).is_empty());

        let kinds = |t: &Trace| validate_trace(&inst, &cfg, t).into_iter().map(|v| v.kind).collect::<Vec<_>>();
        let mut dropped = trace.clone();
        dropped.steps.pop();
        assert!(kinds(&dropped).contains(&ViolationKind::NotDelivered));

        let mut teleport = trace.clone();
        if let Some(m) = teleport.steps[0].moves.first_mut() {
            m.to = m.to.offset(5, 5);
        }
        assert!(kinds(&teleport).contains(&ViolationKind::NotIncident));

        // Two packets squeezed onto one arc.
        let grid = ConvexSubgrid::rect(GridKind::Square, 0, 0, 3, 1);
        let demands = vec![
            Demand { origin: Node::new(0, 0), destination: Node::new(1, 0) },
            Demand { origin: Node::new(0, 0), destination: Node::new(2, 0) },
        ];
        let two = Instance::new(grid.clone(), DuplexMode::Full, demands, (2, 1)).unwrap();
        let m = |p, a: (i64, i64), b: (i64, i64)| TraceMove {
            packet: p,
            from: Node::new(a.0, a.1),
            to: Node::new(b.0, b.1),
        };
        let bad = Trace {
            steps: vec![
                StepRecord { step: 1, moves: vec![m(0, (0, 0), (1, 0)), m(1, (0, 0), (1, 0))] },
                StepRecord { step: 2, moves: vec![m(1, (1, 0), (2, 0))] },
            ],
        };
        let v = validate_trace(&two, &SimConfig::new(PolicyId::LkGeneral, DuplexMode::Full, &two), &bad);
        assert_eq!(v.iter().map(|v| v.kind).collect::<Vec<_>>(), vec![ViolationKind::ArcCapacity]);

        // Opposite directions on one edge in the same half-duplex step.
        let swap = Instance::new(
            grid,
            DuplexMode::Half,
            vec![
                Demand { origin: Node::new(0, 0), destination: Node::new(1, 0) },
                Demand { origin: Node::new(1, 0), destination: Node::new(0, 0) },
            ],
            (1, 1),
        )
        .unwrap();
        let both =
            Trace { steps: vec![StepRecord { step: 1, moves: vec![m(0, (0, 0), (1, 0)), m(1, (1, 0), (0, 0))] }] };
        let half = SimConfig::new(PolicyId::SquareXy, DuplexMode::Half, &swap);
        let v = validate_trace(&swap, &half, &both);
        assert_eq!(v.iter().map(|v| v.kind).collect::<Vec<_>>(), vec![ViolationKind::HalfDuplexExclusion]);
        assert!(validate_trace(&swap, &SimConfig::new(PolicyId::SquareXy, DuplexMode::Full, &swap), &both).is_empty());
    }

    #[test]
    fn policy_mismatch_is_an_error() {
        let inst = Instance::empty(ConvexSubgrid::rect(GridKind::Square, 0, 0, 2, 2));
        let cfg = SimConfig::new(PolicyId::HexPermFull, DuplexMode::Full, &inst);
        assert!(matches!(run(&inst, &cfg), Err(Error::PolicyMismatch { .. })));
    }
}
