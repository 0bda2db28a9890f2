//! Property tests against the BFS oracle and round-trip properties.

mod common;

use gridroute::algorithms::PolicyId;
use gridroute::coloring::{konig_decompose, weighted_color_exact, weighted_color_greedy, WeightedBipartiteGraph};
use gridroute::engine::{run, SimConfig, Trace};
use gridroute::grid::{canonical_walk, distance, edge_class, ConvexSubgrid, DuplexMode, GridKind, Node};
use gridroute::instances::{gen_random_lk, gen_random_permutation, Instance};
use proptest::prelude::*;

use common::{lattice_distance, partition_optimum};

fn kind() -> impl Strategy<Value = GridKind> {
    prop_oneof![Just(GridKind::Square), Just(GridKind::Triangular), Just(GridKind::Hexagonal)]
}

fn node(kind: GridKind) -> impl Strategy<Value = Node> {
    let site = if kind == GridKind::Hexagonal { 1u8 } else { 0 };
    (-6i64..6, -6i64..6, 0..=site).prop_map(|(u, v, s)| Node::hex(u, v, s))
}

fn pair() -> impl Strategy<Value = (GridKind, Node, Node, Node)> {
    kind().prop_flat_map(|k| (Just(k), node(k), node(k), node(k)))
}

fn bipartite() -> impl Strategy<Value = (usize, usize, Vec<(usize, usize, u64)>)> {
    (1usize..5, 1usize..5)
        .prop_flat_map(|(l, r)| (Just(l), Just(r), prop::collection::vec((0..l, 0..r, 1u64..10), 0..9)))
}

proptest! {
    #[test]
    fn distance_is_a_metric_matching_bfs((k, a, b, c) in pair()) {
        let d = |x, y| distance(k, x, y);
        prop_assert_eq!(d(a, b) as u64, lattice_distance(k, a, b));
        prop_assert_eq!(d(a, b), d(b, a));
        prop_assert!(d(a, c) <= d(a, b) + d(b, c));
    }

    #[test]
    fn canonical_walks_are_shortest((k, a, b, _) in pair()) {
        let w = canonical_walk(k, a, b);
        prop_assert_eq!(w.len() as i64 - 1, distance(k, a, b));
        prop_assert_eq!(w[0], a);
        prop_assert_eq!(*w.last().unwrap(), b);
        for s in w.windows(2) {
            prop_assert!(edge_class(k, s[0], s[1]).is_some());
        }
    }

    #[test]
    fn instances_round_trip(k in kind(), side in 1i64..5, l in 1u32..3, m in 1u32..3, seed in any::<u64>()) {
        let grid = ConvexSubgrid::rect(k, 0, 0, side, side);
        let inst = gen_random_lk(&grid, l, m, seed).unwrap();
        let back = Instance::parse(&inst.serialize()).unwrap();
        prop_assert_eq!(back.serialize(), inst.serialize());
    }

    #[test]
    fn traces_round_trip(side in 2i64..6, seed in any::<u64>()) {
        let inst = gen_random_permutation(&ConvexSubgrid::rect(GridKind::Triangular, 0, 0, side, side), seed).unwrap();
        let cfg = SimConfig::new(PolicyId::TriPermFull, DuplexMode::Full, &inst);
        let (r, trace) = run(&inst, &cfg).unwrap();
        let (kind, back) = Trace::parse(&trace.to_text(GridKind::Triangular, Some(&r))).unwrap();
        // An empty trace carries no node syntax to infer the grid from.
        prop_assert_eq!(kind, (!trace.is_empty()).then_some(GridKind::Triangular));
        prop_assert_eq!(&back, &trace);
        let (_, back) = Trace::parse(&trace.to_json_lines(GridKind::Triangular, Some(&r))).unwrap();
        prop_assert_eq!(&back, &trace);
    }

    #[test]
    fn colorings_are_valid_and_ordered((nl, nr, edges) in bipartite()) {
        let g = WeightedBipartiteGraph::from_edges(nl, nr, &edges);
        let konig = konig_decompose(&g);
        let greedy = weighted_color_greedy(&g);
        let exact = weighted_color_exact(&g).unwrap();
        for c in [&konig, &greedy, &exact] {
            prop_assert!(c.check(&g).is_ok());
            prop_assert!(c.matchings.len() <= g.max_degree().max(1));
        }
        prop_assert_eq!(exact.objective(&g), partition_optimum(&edges, g.max_degree()));
        prop_assert!(greedy.objective(&g) >= exact.objective(&g));
    }
}
