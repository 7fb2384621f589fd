//! Seeded generators for networks, fleets and station load.
//!
//! Used by the experiment runner when no input files are given, and by the
//! test suites. Every generator is deterministic in its seed.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::congestion::{RateBreakpoint, StationLoadProfile, StationProfiles};
use crate::fleet::DroneSpec;
use crate::math;
use crate::network::{NodeId, NodeRecord, Segment, SegmentId, SkywayNetwork};

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

fn distance(a: &NodeRecord, b: &NodeRecord) -> f64 {
    let (dx, dy) = (a.x - b.x, a.y - b.y);
    math::sqrt(dx * dx + dy * dy)
}

fn build(nodes: Vec<NodeRecord>, edges: Vec<(usize, usize, f64)>) -> SkywayNetwork {
    let segments = edges
        .into_iter()
        .enumerate()
        .map(|(i, (a, b, len))| Segment::new(SegmentId(i as u64), nodes[a].id, nodes[b].id, len))
        .collect();
    SkywayNetwork::new(nodes, segments).expect("generated networks are valid")
}

/// Regular `rows x cols` grid, ids row-major from 0, edges of `spacing_m`.
pub fn grid_network(rows: usize, cols: usize, spacing_m: f64, pads: u32) -> SkywayNetwork {
    let mut nodes = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            nodes.push(NodeRecord::new(NodeId((r * cols + c) as u64), c as f64 * spacing_m, r as f64 * spacing_m, pads));
        }
    }
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let i = r * cols + c;
            if c + 1 < cols {
                edges.push((i, i + 1, spacing_m));
            }
            if r + 1 < rows {
                edges.push((i, i + cols, spacing_m));
            }
        }
    }
    build(nodes, edges)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoadNetworkParams {
    pub rows: usize,
    pub cols: usize,
    pub spacing_m: f64,
    /// Node displacement as a fraction of the spacing.
    pub jitter: f64,
    /// Probability of keeping each grid edge beyond the spanning tree.
    pub extra_edge_prob: f64,
    /// Segment length is the straight-line distance times a factor drawn
    /// from `[1, max_detour]`.
    pub max_detour: f64,
    pub pads: u32,
}

impl Default for RoadNetworkParams {
    fn default() -> Self {
        Self { rows: 20, cols: 20, spacing_m: 2500.0, jitter: 0.3, extra_edge_prob: 0.75, max_detour: 1.2, pads: 3 }
    }
}

/// Sparse street-like network: a jittered grid thinned to a random
/// spanning tree plus a random share of the remaining grid edges.
pub fn road_network(params: &RoadNetworkParams, seed: u64) -> SkywayNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (rows, cols) = (params.rows, params.cols);
    let mut nodes = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let jx = rng.gen_range(-params.jitter..=params.jitter) * params.spacing_m;
            let jy = rng.gen_range(-params.jitter..=params.jitter) * params.spacing_m;
            nodes.push(NodeRecord::new(
                NodeId((r * cols + c) as u64),
                c as f64 * params.spacing_m + jx,
                r as f64 * params.spacing_m + jy,
                params.pads,
            ));
        }
    }
    let mut grid_edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let i = r * cols + c;
            if c + 1 < cols {
                grid_edges.push((i, i + 1));
            }
            if r + 1 < rows {
                grid_edges.push((i, i + cols));
            }
        }
    }
    grid_edges.shuffle(&mut rng);

    let mut sets = DisjointSets::new(nodes.len());
    let mut edges = Vec::new();
    for (a, b) in grid_edges {
        let tree = sets.union(a, b);
        let extra = rng.gen_bool(params.extra_edge_prob);
        let detour = rng.gen_range(1.0..=params.max_detour);
        if tree || extra {
            edges.push((a, b, distance(&nodes[a], &nodes[b]) * detour));
        }
    }
    build(nodes, edges)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RandomGraphParams {
    pub min_nodes: usize,
    pub max_nodes: usize,
    /// Side of the square the stations are scattered over.
    pub side_m: f64,
    /// Each station may also link to this many nearest neighbours...
    pub near_links: usize,
    /// ...each with this probability.
    pub link_prob: f64,
    pub pads: u32,
}

impl Default for RandomGraphParams {
    fn default() -> Self {
        Self { min_nodes: 8, max_nodes: 12, side_m: 25_000.0, near_links: 3, link_prob: 0.5, pads: 3 }
    }
}

/// Small connected geometric graph: Euclidean minimum spanning tree plus
/// random links to nearby stations.
pub fn random_connected_graph(params: &RandomGraphParams, seed: u64) -> SkywayNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(params.min_nodes..=params.max_nodes);
    let nodes: Vec<NodeRecord> = (0..n)
        .map(|i| {
            let x = rng.gen_range(0.0..params.side_m);
            let y = rng.gen_range(0.0..params.side_m);
            NodeRecord::new(NodeId(i as u64), x, y, params.pads)
        })
        .collect();

    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for a in 0..n {
        for b in a + 1..n {
            pairs.push((distance(&nodes[a], &nodes[b]), a, b));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then((x.1, x.2).cmp(&(y.1, y.2))));

    let mut chosen = vec![false; pairs.len()];
    let mut sets = DisjointSets::new(n);
    for (i, &(_, a, b)) in pairs.iter().enumerate() {
        if sets.union(a, b) {
            chosen[i] = true;
        }
    }
    for a in 0..n {
        let mut near: Vec<usize> = (0..pairs.len()).filter(|&i| pairs[i].1 == a || pairs[i].2 == a).collect();
        near.truncate(params.near_links);
        for i in near {
            if rng.gen_bool(params.link_prob) {
                chosen[i] = true;
            }
        }
    }
    let edges = pairs
        .iter()
        .zip(chosen)
        .filter(|(_, keep)| *keep)
        .map(|(&(d, a, b), _)| (a, b, d))
        .collect();
    build(nodes, edges)
}

/// Drone flying one kilometre per minute when unloaded, with a 60 km range.
pub fn minute_drone() -> DroneSpec {
    DroneSpec::new("minute-60", 2.0, 60.0, 60.0, 60.0, 60.0, 100.0).expect("consistent drone")
}

/// Twelve stations, source 1 and destination 12, with three disjoint
/// corridors and a few cross links. Lengths in km equal service minutes for
/// [`minute_drone`] without payload. The best corridor, 1-2-5-9-12, takes
/// 30 + 25 + 20 + 20 = 95 minutes.
pub fn twelve_station_example() -> SkywayNetwork {
    const EDGES: [(u64, u64, f64); 18] = [
        (1, 2, 30.0),
        (2, 5, 25.0),
        (5, 9, 20.0),
        (9, 12, 20.0),
        (1, 3, 25.0),
        (3, 6, 30.0),
        (6, 10, 25.0),
        (10, 12, 20.0),
        (1, 4, 20.0),
        (4, 7, 25.0),
        (7, 11, 30.0),
        (11, 12, 30.0),
        (2, 3, 20.0),
        (5, 6, 15.0),
        (6, 9, 22.0),
        (9, 10, 15.0),
        (7, 8, 10.0),
        (8, 11, 15.0),
    ];
    let mut nodes: Vec<NodeRecord> = (1..=12).map(|i| NodeRecord::new(NodeId(i), 0.0, 0.0, 3)).collect();
    // lay the corridors out left to right for anyone plotting the fixture
    for (i, n) in nodes.iter_mut().enumerate() {
        n.x = (i / 3) as f64 * 20_000.0;
        n.y = (i % 3) as f64 * 20_000.0;
    }
    let segments = EDGES
        .iter()
        .enumerate()
        .map(|(i, &(a, b, km))| Segment::new(SegmentId(i as u64), NodeId(a), NodeId(b), km * 1000.0))
        .collect();
    SkywayNetwork::new(nodes, segments).expect("fixture is valid")
}

/// Fleet of `n` physically consistent drones with labels `drone-000`, ...
pub fn random_fleet<R: Rng>(n: usize, rng: &mut R) -> Vec<DroneSpec> {
    (0..n)
        .map(|i| {
            let speed = rng.gen_range(40.0..120.0);
            let endurance = rng.gen_range(15.0..60.0);
            let range = speed * endurance / 60.0 * rng.gen_range(0.6..1.0);
            DroneSpec::new(
                format!("drone-{i:03}"),
                rng.gen_range(0.5..10.0),
                endurance,
                range,
                speed,
                rng.gen_range(30.0..180.0),
                rng.gen_range(80.0..800.0),
            )
            .expect("generated drones are consistent")
        })
        .collect()
}

/// Baseline load everywhere, plus a seeded share of hub stations with a
/// morning and evening peak at `hub_rate_per_hour`.
pub fn hub_profiles(
    net: &SkywayNetwork,
    baseline: &StationLoadProfile,
    hub_fraction: f64,
    hub_rate_per_hour: f64,
    saturation_cap: f64,
    seed: u64,
) -> StationProfiles {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut profiles = StationProfiles::new(baseline.clone(), saturation_cap).expect("valid saturation cap");
    let base = baseline.rate_at(0.0);
    for node in net.nodes() {
        if !rng.gen_bool(hub_fraction) {
            continue;
        }
        let schedule = vec![
            RateBreakpoint { start_min: 0.0, rate_per_hour: base },
            RateBreakpoint { start_min: 420.0, rate_per_hour: hub_rate_per_hour },
            RateBreakpoint { start_min: 600.0, rate_per_hour: base },
            RateBreakpoint { start_min: 960.0, rate_per_hour: hub_rate_per_hour },
            RateBreakpoint { start_min: 1140.0, rate_per_hour: base },
        ];
        let profile = StationLoadProfile::new(node.id, schedule, baseline.mean_occupancy, rng.gen())
            .expect("hub schedule is well formed");
        profiles.insert(profile);
    }
    profiles
}
