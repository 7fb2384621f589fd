//! Skyway network: recharging stations joined by flyable segments.
//!
//! Nodes are stored sorted by [`NodeId`], so the internal node index order
//! matches identifier order. Everything that iterates neighbours does so in
//! ascending identifier order, which keeps every downstream algorithm
//! deterministic.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Pads assumed at a station when the input does not say.
pub const DEFAULT_PADS: u32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SegmentId(pub u64);

impl fmt::Display for SegmentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A rooftop station. Every node doubles as a delivery target.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeRecord {
    pub id: NodeId,
    /// Planar position in metres.
    pub x: f64,
    pub y: f64,
    pub pads: u32,
}

impl NodeRecord {
    pub fn new(id: NodeId, x: f64, y: f64, pads: u32) -> Self {
        Self { id, x, y, pads }
    }
}

/// An undirected skyway segment between two stations.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub id: SegmentId,
    pub a: NodeId,
    pub b: NodeId,
    pub length_m: f64,
}

impl Segment {
    pub fn new(id: SegmentId, a: NodeId, b: NodeId, length_m: f64) -> Self {
        Self { id, a, b, length_m }
    }

    pub fn length_km(&self) -> f64 {
        self.length_m / 1000.0
    }

    /// The endpoint opposite `node`, if `node` is an endpoint at all.
    pub fn other(&self, node: NodeId) -> Option<NodeId> {
        if node == self.a {
            Some(self.b)
        } else if node == self.b {
            Some(self.a)
        } else {
            None
        }
    }

    fn key(&self) -> (NodeId, NodeId) {
        if self.a <= self.b {
            (self.a, self.b)
        } else {
            (self.b, self.a)
        }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum NetworkError {
    #[error("duplicate node id {0}")]
    DuplicateNode(NodeId),
    #[error("node {0} has no recharging pads")]
    NoPads(NodeId),
    #[error("node {0} has a non-finite coordinate")]
    BadCoordinate(NodeId),
    #[error("segment {0} is a self-loop on node {1}")]
    SelfLoop(SegmentId, NodeId),
    #[error("segment {segment} references unknown node {node}")]
    DanglingEndpoint { segment: SegmentId, node: NodeId },
    #[error("more than one segment joins nodes {0} and {1}")]
    DuplicateSegment(NodeId, NodeId),
    #[error("segment {0} has invalid length {1} m")]
    BadLength(SegmentId, f64),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("cannot extract {requested} connected nodes: largest component has {largest}")]
    InfeasibleExtraction { requested: usize, largest: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Adjacent {
    pub node: usize,
    pub segment: usize,
}

/// Immutable undirected skyway graph.
#[derive(Clone, Debug)]
pub struct SkywayNetwork {
    nodes: Vec<NodeRecord>,
    index: BTreeMap<NodeId, usize>,
    segments: Vec<Segment>,
    adjacency: Vec<Vec<Adjacent>>,
}

impl PartialEq for SkywayNetwork {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.segments == other.segments
    }
}

impl SkywayNetwork {
    /// Builds and validates a network. Node order in the input does not
    /// matter; segment order is preserved.
    pub fn new(mut nodes: Vec<NodeRecord>, segments: Vec<Segment>) -> Result<Self, NetworkError> {
        nodes.sort_by_key(|n| n.id);
        let mut index = BTreeMap::new();
        for (i, n) in nodes.iter().enumerate() {
            if index.insert(n.id, i).is_some() {
                return Err(NetworkError::DuplicateNode(n.id));
            }
            if n.pads == 0 {
                return Err(NetworkError::NoPads(n.id));
            }
            if !n.x.is_finite() || !n.y.is_finite() {
                return Err(NetworkError::BadCoordinate(n.id));
            }
        }

        let mut adjacency = vec![Vec::new(); nodes.len()];
        let mut pairs = BTreeMap::new();
        for (si, s) in segments.iter().enumerate() {
            if s.a == s.b {
                return Err(NetworkError::SelfLoop(s.id, s.a));
            }
            if !(s.length_m.is_finite() && s.length_m > 0.0) {
                return Err(NetworkError::BadLength(s.id, s.length_m));
            }
            let ia = *index
                .get(&s.a)
                .ok_or(NetworkError::DanglingEndpoint { segment: s.id, node: s.a })?;
            let ib = *index
                .get(&s.b)
                .ok_or(NetworkError::DanglingEndpoint { segment: s.id, node: s.b })?;
            let (lo, hi) = s.key();
            if pairs.insert((lo, hi), si).is_some() {
                return Err(NetworkError::DuplicateSegment(lo, hi));
            }
            adjacency[ia].push(Adjacent { node: ib, segment: si });
            adjacency[ib].push(Adjacent { node: ia, segment: si });
        }
        for list in &mut adjacency {
            list.sort_by_key(|a| a.node);
        }

        Ok(Self { nodes, index, segments, adjacency })
    }

    /// Nodes in ascending id order.
    pub fn nodes(&self) -> &[NodeRecord] {
        &self.nodes
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn segment_count(&self) -> usize {
        self.segments.len()
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.index.contains_key(&id)
    }

    pub fn node(&self, id: NodeId) -> Option<&NodeRecord> {
        self.index.get(&id).map(|&i| &self.nodes[i])
    }

    pub fn degree(&self, id: NodeId) -> Result<usize, NetworkError> {
        Ok(self.adjacency[self.require(id)?].len())
    }

    /// Incident segments of `id`, ordered by neighbour id.
    pub fn neighbors(&self, id: NodeId) -> Result<Vec<(NodeId, &Segment)>, NetworkError> {
        let i = self.require(id)?;
        Ok(self.adjacency[i]
            .iter()
            .map(|adj| (self.nodes[adj.node].id, &self.segments[adj.segment]))
            .collect())
    }

    pub fn segment_between(&self, a: NodeId, b: NodeId) -> Option<&Segment> {
        let ia = *self.index.get(&a)?;
        let ib = *self.index.get(&b)?;
        self.adjacency[ia]
            .binary_search_by_key(&ib, |adj| adj.node)
            .ok()
            .map(|pos| &self.segments[self.adjacency[ia][pos].segment])
    }

    /// Re-checks every structural invariant. A network built through
    /// [`SkywayNetwork::new`] always passes.
    pub fn validate(&self) -> Result<(), NetworkError> {
        let rebuilt = Self::new(self.nodes.clone(), self.segments.clone())?;
        debug_assert_eq!(rebuilt.adjacency, self.adjacency);
        let degree_sum: usize = self.adjacency.iter().map(Vec::len).sum();
        debug_assert_eq!(degree_sum, 2 * self.segments.len());
        Ok(())
    }

    /// Connected components, each listed in ascending id order; components
    /// are ordered by their smallest id.
    pub fn components(&self) -> Vec<Vec<NodeId>> {
        let mut label = vec![usize::MAX; self.nodes.len()];
        let mut out = Vec::new();
        for start in 0..self.nodes.len() {
            if label[start] != usize::MAX {
                continue;
            }
            let c = out.len();
            let mut members = self.bfs_from(start, usize::MAX);
            for &m in &members {
                label[m] = c;
            }
            members.sort_unstable();
            out.push(members.into_iter().map(|i| self.nodes[i].id).collect());
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.nodes.is_empty() || self.bfs_from(0, usize::MAX).len() == self.nodes.len()
    }

    /// Grows a connected induced subnetwork of exactly `n` nodes by
    /// breadth-first expansion from a seeded random start node.
    ///
    /// The start node is drawn uniformly among nodes whose component holds at
    /// least `n` nodes; neighbours are expanded in ascending id order.
    pub fn extract_subnetwork(&self, n: usize, seed: u64) -> Result<Self, NetworkError> {
        let components = self.components();
        let largest = components.iter().map(Vec::len).max().unwrap_or(0);
        if n == 0 || n > largest {
            return Err(NetworkError::InfeasibleExtraction { requested: n, largest });
        }
        let mut candidates: Vec<NodeId> =
            components.into_iter().filter(|c| c.len() >= n).flatten().collect();
        candidates.sort_unstable();

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let start = candidates[rng.gen_range(0..candidates.len())];
        let picked = self.bfs_from(self.index[&start], n);
        Ok(self.induced(&picked))
    }

    /// Returns a copy with every station's pad count replaced.
    pub fn with_pads(&self, pads: u32) -> Result<Self, NetworkError> {
        let nodes = self.nodes.iter().map(|n| NodeRecord { pads, ..n.clone() }).collect();
        Self::new(nodes, self.segments.clone())
    }

    pub(crate) fn require(&self, id: NodeId) -> Result<usize, NetworkError> {
        self.index.get(&id).copied().ok_or(NetworkError::UnknownNode(id))
    }

    pub(crate) fn node_at(&self, idx: usize) -> &NodeRecord {
        &self.nodes[idx]
    }

    pub(crate) fn segment_at(&self, idx: usize) -> &Segment {
        &self.segments[idx]
    }

    pub(crate) fn adjacent(&self, idx: usize) -> &[Adjacent] {
        &self.adjacency[idx]
    }

    fn bfs_from(&self, start: usize, limit: usize) -> Vec<usize> {
        let mut seen = vec![false; self.nodes.len()];
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        seen[start] = true;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            if order.len() == limit {
                break;
            }
            for adj in &self.adjacency[u] {
                if !seen[adj.node] {
                    seen[adj.node] = true;
                    queue.push_back(adj.node);
                }
            }
        }
        order
    }

    fn induced(&self, members: &[usize]) -> Self {
        let mut inside = vec![false; self.nodes.len()];
        for &m in members {
            inside[m] = true;
        }
        let nodes = members.iter().map(|&m| self.nodes[m].clone()).collect();
        let segments = self
            .segments
            .iter()
            .filter(|s| inside[self.index[&s.a]] && inside[self.index[&s.b]])
            .cloned()
            .collect();
        Self::new(nodes, segments).expect("induced subgraph of a valid network is valid")
    }
}
