//! Two-phase top-k composition of drone services.
//!
//! Phase one ranks the `k` loopless source-to-destination paths with the
//! smallest total service time (Yen's algorithm), assuming a pad is always
//! free. Phase two walks every candidate in flight order, asks the congestion
//! model about each intermediate station at the predicted arrival time and
//! adds `pr * (recharge + wait)` per station. Candidates are then re-ranked by
//! that stochastic delivery time.
//!
//! All orderings are total: time first, then fewer legs, then the node
//! sequence compared lexicographically.

use alloc::collections::{BTreeMap, BTreeSet, BinaryHeap};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};

use crate::congestion::{CongestionError, CongestionEstimate, StationProfiles, MINUTES_PER_DAY};
use crate::fleet::{block_nested_loop, DroneSpec, FleetError, QualityDirectionConfig};
use crate::math;
use crate::network::{NetworkError, NodeId, Segment, SkywayNetwork};
use crate::servicemodel::{
    energy_consumption, partial_recharge_time, service_time, DroneState, EnergyModelParams, ServiceError,
};

/// A delivery request: carry `weight` kg from `source` to `destination`,
/// leaving at minute-of-day `start_time`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeliveryQuery {
    pub source: NodeId,
    pub destination: NodeId,
    pub start_time: f64,
    pub weight: f64,
}

impl DeliveryQuery {
    pub fn new(source: NodeId, destination: NodeId, start_time: f64, weight: f64) -> Self {
        Self { source, destination, start_time, weight }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Leg {
    pub from: NodeId,
    pub to: NodeId,
    pub segment: Segment,
    /// minutes
    pub service_time: f64,
    /// battery fraction
    pub energy: f64,
}

/// What the drone met at one intermediate station.
#[derive(Clone, Debug, PartialEq)]
pub struct StationVisit {
    pub node: NodeId,
    /// Minute of day at which the drone lands.
    pub arrival_time: f64,
    pub estimate: CongestionEstimate,
    pub battery_on_arrival: f64,
    pub battery_on_departure: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompositionPlan {
    pub nodes: Vec<NodeId>,
    pub legs: Vec<Leg>,
    pub drone: DroneSpec,
    /// Sum of leg service times, minutes.
    pub base_time: f64,
    /// Stochastic delivery time once congestion has been accounted for.
    pub extended_time: Option<f64>,
    pub distance_km: f64,
    /// One entry per intermediate station, set together with `extended_time`.
    pub stations: Option<Vec<StationVisit>>,
}

impl CompositionPlan {
    pub fn hops(&self) -> usize {
        self.legs.len()
    }

    /// Extended time when available, otherwise the service time.
    pub fn delivery_time(&self) -> f64 {
        self.extended_time.unwrap_or(self.base_time)
    }

    /// Sum of the physical recharge durations along the plan.
    pub fn total_recharge(&self) -> Option<f64> {
        self.stations.as_ref().map(|s| s.iter().map(|v| v.estimate.recharge).sum())
    }

    /// Sum of the conditional waits along the plan.
    pub fn total_wait(&self) -> Option<f64> {
        self.stations.as_ref().map(|s| s.iter().map(|v| v.estimate.wait).sum())
    }

    /// Service time plus every recharge and wait taken at face value.
    pub fn deterministic_delivery_time(&self) -> Option<f64> {
        Some(self.base_time + self.total_recharge()? + self.total_wait()?)
    }

    fn order(&self, other: &Self, mine: f64, theirs: f64) -> Ordering {
        mine.total_cmp(&theirs)
            .then_with(|| self.legs.len().cmp(&other.legs.len()))
            .then_with(|| self.nodes.cmp(&other.nodes))
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum CompositionError {
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Fleet(#[from] FleetError),
    #[error(transparent)]
    Service(#[from] ServiceError),
    #[error(transparent)]
    Congestion(#[from] CongestionError),
    #[error("no feasible path from {0} to {1}")]
    Unreachable(NodeId, NodeId),
    #[error("plan is infeasible on leg {leg}: {reason}")]
    InfeasiblePlan { leg: usize, reason: ServiceError },
    #[error("k must be at least 1")]
    ZeroK,
    #[error("{plans} plans but {times} times")]
    LengthMismatch { plans: usize, times: usize },
    #[error("package weight {0} kg is invalid")]
    BadWeight(f64),
    #[error("start time {0} is not finite")]
    BadStartTime(f64),
}

/// Segment weights for one drone and payload; `None` marks a segment the
/// drone cannot fly without dipping into its reserve.
struct FeasibleGraph<'a> {
    net: &'a SkywayNetwork,
    time: Vec<Option<f64>>,
    energy: Vec<f64>,
}

impl<'a> FeasibleGraph<'a> {
    fn new(net: &'a SkywayNetwork, drone: &DroneSpec, payload: f64, params: &EnergyModelParams) -> Result<Self, ServiceError> {
        let limit = params.max_leg_energy();
        let mut time = Vec::with_capacity(net.segment_count());
        let mut energy = Vec::with_capacity(net.segment_count());
        for seg in net.segments() {
            let e = energy_consumption(seg, drone, payload, params)?;
            let t = service_time(seg, drone, payload, params)?;
            time.push((e <= limit).then_some(t));
            energy.push(e);
        }
        Ok(Self { net, time, energy })
    }

    fn segment_index(&self, u: usize, v: usize) -> usize {
        let adj = self.net.adjacent(u);
        let pos = adj.binary_search_by_key(&v, |a| a.node).expect("consecutive path nodes are adjacent");
        adj[pos].segment
    }

    fn plan(&self, path: &[usize], drone: &DroneSpec) -> CompositionPlan {
        let mut legs = Vec::with_capacity(path.len().saturating_sub(1));
        let mut base_time = 0.0;
        let mut distance_km = 0.0;
        for pair in path.windows(2) {
            let si = self.segment_index(pair[0], pair[1]);
            let segment = self.net.segment_at(si).clone();
            let service_time = self.time[si].expect("plans use feasible segments only");
            base_time += service_time;
            distance_km += segment.length_km();
            legs.push(Leg {
                from: self.net.node_at(pair[0]).id,
                to: self.net.node_at(pair[1]).id,
                segment,
                service_time,
                energy: self.energy[si],
            });
        }
        CompositionPlan {
            nodes: path.iter().map(|&i| self.net.node_at(i).id).collect(),
            legs,
            drone: drone.clone(),
            base_time,
            extended_time: None,
            distance_km,
            stations: None,
        }
    }
}

/// A partial path with its service time accumulated leg by leg from zero.
#[derive(Clone, Debug)]
struct Label {
    cost: f64,
    path: Vec<usize>,
}

impl Ord for Label {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cost
            .total_cmp(&other.cost)
            .then_with(|| self.path.len().cmp(&other.path.len()))
            .then_with(|| self.path.cmp(&other.path))
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Label {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Label {}

/// Label-setting search under the (time, hops, sequence) order, continuing
/// from `root`. The order is preserved by appending an edge, so the first
/// label settled at `target` is the minimum.
fn best_extension(
    graph: &FeasibleGraph<'_>,
    root: Label,
    target: usize,
    banned_nodes: &[bool],
    banned_segments: &BTreeSet<usize>,
) -> Option<Label> {
    let mut settled = vec![false; graph.net.node_count()];
    let mut heap = BinaryHeap::new();
    heap.push(Reverse(root));
    while let Some(Reverse(label)) = heap.pop() {
        let u = *label.path.last().expect("labels are non-empty");
        if settled[u] {
            continue;
        }
        settled[u] = true;
        if u == target {
            return Some(label);
        }
        for adj in graph.net.adjacent(u) {
            if settled[adj.node] || banned_nodes[adj.node] || banned_segments.contains(&adj.segment) {
                continue;
            }
            let Some(w) = graph.time[adj.segment] else { continue };
            let mut path = Vec::with_capacity(label.path.len() + 1);
            path.extend_from_slice(&label.path);
            path.push(adj.node);
            heap.push(Reverse(Label { cost: label.cost + w, path }));
        }
    }
    None
}

fn record(path: &[usize], accepted: &mut BTreeSet<Vec<usize>>, taken: &mut BTreeMap<Vec<usize>, BTreeSet<usize>>) {
    accepted.insert(path.to_vec());
    for s in 0..path.len() - 1 {
        taken.entry(path[..=s].to_vec()).or_default().insert(path[s + 1]);
    }
}

/// Yen's k shortest loopless paths.
fn k_shortest(graph: &FeasibleGraph<'_>, source: usize, target: usize, k: usize) -> Vec<Label> {
    let n = graph.net.node_count();
    let no_nodes = vec![false; n];
    let Some(first) = best_extension(graph, Label { cost: 0.0, path: vec![source] }, target, &no_nodes, &BTreeSet::new())
    else {
        return Vec::new();
    };

    let mut accepted = vec![first];
    let mut accepted_paths: BTreeSet<Vec<usize>> = BTreeSet::new();
    // successor nodes already taken after each accepted prefix
    let mut taken: BTreeMap<Vec<usize>, BTreeSet<usize>> = BTreeMap::new();
    record(&accepted[0].path, &mut accepted_paths, &mut taken);

    let mut candidates: BTreeSet<Label> = BTreeSet::new();
    while accepted.len() < k {
        let prev = accepted.last().expect("at least one accepted path").path.clone();
        let mut banned_nodes = vec![false; n];
        let mut root_cost = 0.0;
        for s in 0..prev.len() - 1 {
            let spur = prev[s];
            let root = &prev[..=s];
            let banned_segments: BTreeSet<usize> = taken
                .get(root)
                .map(|next| next.iter().map(|&v| graph.segment_index(spur, v)).collect())
                .unwrap_or_default();
            let start = Label { cost: root_cost, path: root.to_vec() };
            if let Some(found) = best_extension(graph, start, target, &banned_nodes, &banned_segments) {
                if !accepted_paths.contains(&found.path) {
                    candidates.insert(found);
                }
            }
            banned_nodes[spur] = true;
            root_cost += graph.time[graph.segment_index(spur, prev[s + 1])].expect("accepted paths are feasible");
        }
        let Some(next) = candidates.pop_first() else { break };
        record(&next.path, &mut accepted_paths, &mut taken);
        accepted.push(next);
    }
    accepted
}

fn check_query(net: &SkywayNetwork, query: &DeliveryQuery) -> Result<(usize, usize), CompositionError> {
    if !(query.weight.is_finite() && query.weight >= 0.0) {
        return Err(CompositionError::BadWeight(query.weight));
    }
    if !query.start_time.is_finite() {
        return Err(CompositionError::BadStartTime(query.start_time));
    }
    Ok((net.require(query.source)?, net.require(query.destination)?))
}

/// Phase one: up to `k` feasible loopless paths with the smallest service
/// time, in ascending order.
pub fn base_comps(
    net: &SkywayNetwork,
    query: &DeliveryQuery,
    k: usize,
    drone: &DroneSpec,
    params: &EnergyModelParams,
) -> Result<Vec<CompositionPlan>, CompositionError> {
    if k == 0 {
        return Err(CompositionError::ZeroK);
    }
    let (source, target) = check_query(net, query)?;
    let graph = FeasibleGraph::new(net, drone, query.weight, params)?;
    if source == target {
        return Ok(vec![graph.plan(&[source], drone)]);
    }
    let labels = k_shortest(&graph, source, target, k);
    if labels.is_empty() {
        return Err(CompositionError::Unreachable(query.source, query.destination));
    }
    Ok(labels
        .iter()
        .map(|l| {
            let plan = graph.plan(&l.path, drone);
            debug_assert_eq!(plan.base_time.to_bits(), l.cost.to_bits());
            plan
        })
        .collect())
}

/// Stable ascending sort of `plans` by the matching entry of `times`.
pub fn rank_comps(plans: Vec<CompositionPlan>, times: &[f64]) -> Result<Vec<CompositionPlan>, CompositionError> {
    if plans.len() != times.len() {
        return Err(CompositionError::LengthMismatch { plans: plans.len(), times: times.len() });
    }
    let mut keyed: Vec<(f64, CompositionPlan)> = times.iter().copied().zip(plans).collect();
    keyed.sort_by(|(ta, a), (tb, b)| a.order(b, *ta, *tb));
    Ok(keyed.into_iter().map(|(_, p)| p).collect())
}

/// Phase two for one plan: fills in the stochastic delivery time and the
/// per-station estimates.
///
/// The drone leaves with a full battery. At every intermediate station it
/// charges just enough for the next leg plus reserve; the full charge
/// duration is what the battery sees, while the delivery time only grows by
/// the probability-weighted `pr * (recharge + wait)`.
pub fn extend_with_congestion(
    net: &SkywayNetwork,
    plan: &CompositionPlan,
    query: &DeliveryQuery,
    profiles: &StationProfiles,
    params: &EnergyModelParams,
) -> Result<CompositionPlan, CompositionError> {
    let mut elapsed = 0.0;
    let mut state = DroneState::full(query.weight);
    let mut stations = Vec::with_capacity(plan.legs.len().saturating_sub(1));

    for (j, leg) in plan.legs.iter().enumerate() {
        if leg.energy > state.battery_fraction {
            return Err(CompositionError::InfeasiblePlan {
                leg: j,
                reason: ServiceError::SegmentInfeasible { need: leg.energy, available: state.battery_fraction },
            });
        }
        state.battery_fraction -= leg.energy;
        elapsed += leg.service_time;

        let Some(next) = plan.legs.get(j + 1) else { break };
        let arrival_battery = state.battery_fraction;
        let recharge = partial_recharge_time(&plan.drone, &state, next.energy, params)
            .map_err(|reason| CompositionError::InfeasiblePlan { leg: j + 1, reason })?;
        let pads = net.node(leg.to).ok_or(NetworkError::UnknownNode(leg.to))?.pads;
        let arrival_time = math::wrap(query.start_time + elapsed, MINUTES_PER_DAY);
        let estimate = profiles.estimate(leg.to, pads, arrival_time, recharge.duration)?;
        elapsed += estimate.expected_delay();
        state.battery_fraction = recharge.battery_fraction;
        stations.push(StationVisit {
            node: leg.to,
            arrival_time,
            estimate,
            battery_on_arrival: arrival_battery,
            battery_on_departure: recharge.battery_fraction,
        });
    }

    Ok(CompositionPlan { extended_time: Some(elapsed), stations: Some(stations), ..plan.clone() })
}

/// Selects the drone, computes the `k` service-time-best compositions,
/// extends each with congestion and returns them re-ranked; the head is the
/// recommended plan.
pub fn top_k_composition(
    net: &SkywayNetwork,
    fleet: &[DroneSpec],
    query: &DeliveryQuery,
    k: usize,
    profiles: &StationProfiles,
    cfg: &QualityDirectionConfig,
    params: &EnergyModelParams,
) -> Result<Vec<CompositionPlan>, CompositionError> {
    check_query(net, query)?;
    let drone = block_nested_loop(fleet, query.weight, cfg)?;

    let plans = base_comps(net, query, k, drone, params)?;
    let base_times: Vec<f64> = plans.iter().map(|p| p.base_time).collect();
    let ranked = rank_comps(plans, &base_times)?;

    let extended = ranked
        .iter()
        .map(|p| extend_with_congestion(net, p, query, profiles, params))
        .collect::<Result<Vec<_>, _>>()?;
    let delivery_times: Vec<f64> = extended.iter().map(CompositionPlan::delivery_time).collect();
    rank_comps(extended, &delivery_times)
}

struct Walk<'g, 'a> {
    graph: &'g FeasibleGraph<'a>,
    query: &'g DeliveryQuery,
    drone: &'g DroneSpec,
    profiles: &'g StationProfiles,
    params: &'g EnergyModelParams,
    target: usize,
    max_hops: usize,
    on_path: Vec<bool>,
    path: Vec<usize>,
    best: Option<(f64, Vec<usize>)>,
    count: usize,
}

impl Walk<'_, '_> {
    // `elapsed` and `battery` describe the drone right after landing at the
    // last node of `path`, before any station time there.
    fn descend(&mut self, elapsed: f64, battery: f64, evaluate: bool) -> Result<(), CompositionError> {
        let u = *self.path.last().expect("walk starts at the source");
        if u == self.target {
            self.count += 1;
            let better = match &self.best {
                None => true,
                Some((t, p)) => elapsed.total_cmp(t).then(self.path.len().cmp(&p.len())).is_lt(),
            };
            if evaluate && better {
                self.best = Some((elapsed, self.path.clone()));
            }
            return Ok(());
        }
        if self.path.len() > self.max_hops {
            return Ok(());
        }
        let net = self.graph.net;
        for adj in net.adjacent(u) {
            if self.on_path[adj.node] {
                continue;
            }
            let Some(leg_time) = self.graph.time[adj.segment] else { continue };
            let leg_energy = self.graph.energy[adj.segment];

            let (mut t, mut b) = (elapsed, battery);
            if evaluate && self.path.len() > 1 {
                let state = DroneState { battery_fraction: b, payload: self.query.weight };
                let recharge = partial_recharge_time(self.drone, &state, leg_energy, self.params)?;
                let node = net.node_at(u);
                let arrival = math::wrap(self.query.start_time + t, MINUTES_PER_DAY);
                let estimate = self.profiles.estimate(node.id, node.pads, arrival, recharge.duration)?;
                t += estimate.expected_delay();
                b = recharge.battery_fraction;
            }
            if evaluate && leg_energy > b {
                continue;
            }

            self.on_path[adj.node] = true;
            self.path.push(adj.node);
            self.descend(t + leg_time, b - leg_energy, evaluate)?;
            self.path.pop();
            self.on_path[adj.node] = false;
        }
        Ok(())
    }
}

#[allow(clippy::too_many_arguments)]
fn walk<'g, 'a>(
    graph: &'g FeasibleGraph<'a>,
    query: &'g DeliveryQuery,
    drone: &'g DroneSpec,
    profiles: &'g StationProfiles,
    params: &'g EnergyModelParams,
    source: usize,
    target: usize,
    max_hops: usize,
) -> Walk<'g, 'a> {
    let mut on_path = vec![false; graph.net.node_count()];
    on_path[source] = true;
    Walk {
        graph,
        query,
        drone,
        profiles,
        params,
        target,
        max_hops,
        on_path,
        path: vec![source],
        best: None,
        count: 0,
    }
}

/// Exhaustive baseline: evaluates the stochastic delivery time of every
/// feasible simple path with at most `max_hops` legs (default: node count)
/// and returns the best one.
///
/// Paths are enumerated depth first in ascending neighbour order, i.e. in
/// lexicographic node order, so on exact ties the first path found is also
/// the lexicographically smallest.
pub fn exhaustive_composition(
    net: &SkywayNetwork,
    fleet: &[DroneSpec],
    query: &DeliveryQuery,
    profiles: &StationProfiles,
    cfg: &QualityDirectionConfig,
    params: &EnergyModelParams,
    max_hops: Option<usize>,
) -> Result<CompositionPlan, CompositionError> {
    let (source, target) = check_query(net, query)?;
    let drone = block_nested_loop(fleet, query.weight, cfg)?;
    let graph = FeasibleGraph::new(net, drone, query.weight, params)?;

    let mut w = walk(&graph, query, drone, profiles, params, source, target, max_hops.unwrap_or(net.node_count()));
    w.descend(0.0, 1.0, true)?;
    let (best_time, path) = w.best.ok_or(CompositionError::Unreachable(query.source, query.destination))?;

    let plan = extend_with_congestion(net, &graph.plan(&path, drone), query, profiles, params)?;
    debug_assert_eq!(plan.delivery_time().to_bits(), best_time.to_bits());
    Ok(plan)
}

/// Number of feasible simple paths for `query` flown by `drone`, with at most
/// `max_hops` legs (default: node count).
pub fn count_feasible_paths(
    net: &SkywayNetwork,
    query: &DeliveryQuery,
    drone: &DroneSpec,
    params: &EnergyModelParams,
    max_hops: Option<usize>,
) -> Result<usize, CompositionError> {
    let (source, target) = check_query(net, query)?;
    let graph = FeasibleGraph::new(net, drone, query.weight, params)?;
    let profiles = StationProfiles::idle();
    let mut w = walk(&graph, query, drone, &profiles, params, source, target, max_hops.unwrap_or(net.node_count()));
    w.descend(0.0, 1.0, false)?;
    Ok(w.count)
}
