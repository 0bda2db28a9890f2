//! Generators, certificates and embeddings checked from the outside.

mod common;

use std::collections::HashMap;

use gridroute::algorithms::PolicyId;
use gridroute::analysis::verify_certificate;
use gridroute::embeddings::{square2hexagon, square2triangle, transport_routing};
use gridroute::engine::{run, validate_trace_with, SimConfig, ValidateOptions};
use gridroute::grid::{ConvexSubgrid, DuplexMode, GridKind, Node};
use gridroute::instances::{gen_lk_adversarial, gen_random_permutation, gen_rectangle_lk, Instance};
use gridroute::Error;

use common::lattice_distance;

fn counts(inst: &Instance) -> (HashMap<Node, u64>, HashMap<Node, u64>) {
    let (mut sent, mut recv) = (HashMap::new(), HashMap::new());
    for d in &inst.demands {
        *sent.entry(d.origin).or_insert(0) += 1;
        *recv.entry(d.destination).or_insert(0) += 1;
    }
    (sent, recv)
}

#[test]
fn lk_instances_respect_limits_and_certificates() {
    for kind in [GridKind::Square, GridKind::Triangular, GridKind::Hexagonal] {
        for (l, k) in [(1, 1), (3, 1), (1, 3), (2, 5), (4, 4)] {
            for lm in [2, 4, 6] {
                let (inst, certs) = match gen_lk_adversarial(kind, l, k, lm) {
                    Ok(x) => x,
                    // Some small honeycomb cells admit no feasible rectangle.
                    Err(Error::Infeasible { .. }) | Err(Error::Domain(_)) => continue,
                    Err(e) => panic!("{kind:?} ({l},{k},{lm}): {e}"),
                };
                let (sent, recv) = counts(&inst);
                assert!(sent.values().all(|&c| c <= l) && recv.values().all(|&c| c <= k));
                for d in &inst.demands {
                    assert!(lattice_distance(kind, d.origin, d.destination) <= lm);
                }
                for c in &certs {
                    assert_eq!(verify_certificate(&inst, c).unwrap(), c.value, "{kind:?} ({l},{k},{lm})");
                }
            }
        }
    }
}

#[test]
fn rectangle_fills_its_region() {
    let (inst, _, info) = gen_rectangle_lk(GridKind::Triangular, 4, 1, 6).unwrap();
    assert_eq!(info.side, info.lemma_d);
    assert_eq!(inst.demands.len(), info.sources * 4);
    let (sent, _) = counts(&inst);
    assert_eq!(sent.len(), info.sources);
}

#[test]
fn transported_traces_are_valid() {
    let grid = ConvexSubgrid::rect(GridKind::Square, 0, 0, 6, 6);
    for seed in 0..5 {
        let inst = gen_random_permutation(&grid, seed).unwrap();
        let cfg = SimConfig::new(PolicyId::SquareXy, DuplexMode::Full, &inst);
        let (r, trace) = run(&inst, &cfg).unwrap();
        for (emb, capacity, slowdown) in [(square2triangle(), 1, 1), (square2hexagon(), 2, 3)] {
            let (target, moved) = transport_routing(&emb, &inst, &trace).unwrap();
            let opts = ValidateOptions { duplex: DuplexMode::Full, shortest_path: false, capacity };
            let v = validate_trace_with(&target, &opts, &moved);
            assert!(v.is_empty(), "{:?}: {v:?}", emb.target);
            assert!(moved.len() <= slowdown * r.completion_time);
        }
    }
}

#[test]
fn hexagonal_images_stretch_at_most_threefold() {
    let emb = square2hexagon();
    let nodes: Vec<Node> = (0..5).flat_map(|u| (0..5).map(move |v| Node::new(u, v))).collect();
    for &a in &nodes {
        for &b in &nodes {
            let dsq = lattice_distance(GridKind::Square, a, b);
            let dhex = lattice_distance(GridKind::Hexagonal, emb.node_map(a), emb.node_map(b));
            assert!(dsq <= dhex && dhex <= 3 * dsq, "{a:?} {b:?}: {dsq} vs {dhex}");
        }
    }
}

#[test]
fn transport_rejects_other_grids() {
    let inst = Instance::empty(ConvexSubgrid::rect(GridKind::Triangular, 0, 0, 3, 3));
    let trace = Default::default();
    assert!(transport_routing(&square2hexagon(), &inst, &trace).is_err());
}
