use std::collections::{BTreeSet, VecDeque};

use proptest::prelude::*;
use skyway_core::synth::{self, RoadNetworkParams};
use skyway_core::{NodeId, SkywayNetwork};

fn degree_sum(net: &SkywayNetwork) -> usize {
    net.nodes().iter().map(|n| net.neighbors(n.id).unwrap().len()).sum()
}

fn reachable_from(net: &SkywayNetwork, start: NodeId) -> BTreeSet<NodeId> {
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for (v, _) in net.neighbors(u).unwrap() {
            if seen.insert(v) {
                queue.push_back(v);
            }
        }
    }
    seen
}

#[test]
fn forty_node_grid_handshake() {
    let net = synth::grid_network(5, 8, 500.0, 3);
    net.validate().unwrap();
    assert_eq!(net.node_count(), 40);
    // 5 rows of 7 horizontal edges, 4 rows of 8 vertical edges
    assert_eq!(net.segment_count(), 5 * 7 + 4 * 8);
    assert_eq!(degree_sum(&net), 2 * net.segment_count());
}

#[test]
fn neighbor_lists_are_symmetric() {
    let net = synth::road_network(&RoadNetworkParams { rows: 8, cols: 8, ..Default::default() }, 5);
    for n in net.nodes() {
        for (v, seg) in net.neighbors(n.id).unwrap() {
            assert_eq!(seg.other(n.id), Some(v));
            assert!(net.neighbors(v).unwrap().iter().any(|(w, s)| *w == n.id && s.id == seg.id));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn handshake_holds_on_road_networks(seed in any::<u64>(), rows in 2usize..10, cols in 2usize..10) {
        let net = synth::road_network(&RoadNetworkParams { rows, cols, ..Default::default() }, seed);
        prop_assert_eq!(degree_sum(&net), 2 * net.segment_count());
        prop_assert!(net.is_connected());
    }

    #[test]
    fn extraction_is_connected_induced_and_seeded(seed in any::<u64>(), n in 1usize..=64) {
        let net = synth::road_network(&RoadNetworkParams { rows: 8, cols: 8, ..Default::default() }, 99);
        let sub = net.extract_subnetwork(n, seed).unwrap();
        prop_assert_eq!(sub.node_count(), n);

        let members: BTreeSet<NodeId> = sub.nodes().iter().map(|r| r.id).collect();
        prop_assert_eq!(reachable_from(&sub, sub.nodes()[0].id), members.clone());

        let inside: Vec<_> = net
            .segments()
            .iter()
            .filter(|s| members.contains(&s.a) && members.contains(&s.b))
            .cloned()
            .collect();
        prop_assert_eq!(sub.segments(), inside.as_slice());
        for r in sub.nodes() {
            prop_assert_eq!(net.node(r.id), Some(r));
        }

        prop_assert_eq!(net.extract_subnetwork(n, seed).unwrap(), sub);
    }
}
