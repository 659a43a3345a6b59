//! City road map: nodes with roles, undirected edges carrying a fixed
//! distance and a per-slot speed, and per-slot availability for each
//! parking lot.
//!
//! A [`RoadNetwork`] is validated on construction and immutable afterwards,
//! so it can be shared read-only between concurrent slot runs.

mod generate;
mod io;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use generate::{generate_example_network, generate_toy_network, reference_routes};
pub use io::{load_network, network_from_json, network_to_json, save_network};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<usize> for NodeId {
    fn from(v: usize) -> Self {
        NodeId(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeRole {
    Start,
    Intermediate,
    ParkingLot,
}

impl NodeRole {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeRole::Start => "start",
            NodeRole::Intermediate => "intermediate",
            NodeRole::ParkingLot => "lot",
        }
    }
}

impl FromStr for NodeRole {
    type Err = ValidationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "start" => Ok(NodeRole::Start),
            "intermediate" => Ok(NodeRole::Intermediate),
            "lot" => Ok(NodeRole::ParkingLot),
            other => Err(ValidationError::UnknownRole(other.to_string())),
        }
    }
}

/// One of the six four-hour zones of the day, in clock order from midnight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TimeSlot {
    Midnight,
    EarlyMorning,
    Morning,
    Afternoon,
    Evening,
    Night,
}

impl TimeSlot {
    pub const ALL: [TimeSlot; 6] = [
        TimeSlot::Midnight,
        TimeSlot::EarlyMorning,
        TimeSlot::Morning,
        TimeSlot::Afternoon,
        TimeSlot::Evening,
        TimeSlot::Night,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Normative slot name used in every file format.
    pub fn name(self) -> &'static str {
        match self {
            TimeSlot::Midnight => "12-4am",
            TimeSlot::EarlyMorning => "4-8am",
            TimeSlot::Morning => "8am-12pm",
            TimeSlot::Afternoon => "12-4pm",
            TimeSlot::Evening => "4-8pm",
            TimeSlot::Night => "8pm-12am",
        }
    }
}

impl fmt::Display for TimeSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TimeSlot {
    type Err = ValidationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TimeSlot::ALL
            .into_iter()
            .find(|slot| slot.name() == s)
            .ok_or_else(|| ValidationError::UnknownSlot(s.to_string()))
    }
}

/// A value per time slot, indexed by [`TimeSlot::index`].
pub type SlotValues = [f64; 6];

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub a: NodeId,
    pub b: NodeId,
    pub distance_km: f64,
    pub speed_kmh: SlotValues,
}

impl Edge {
    pub fn speed(&self, slot: TimeSlot) -> f64 {
        self.speed_kmh[slot.index()]
    }
}

/// Ordered node sequence from a start node to a parking lot.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Route(pub Vec<NodeId>);

impl Route {
    pub fn nodes(&self) -> &[NodeId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<NodeId> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<NodeId> {
        self.0.last().copied()
    }

    pub fn contains(&self, n: NodeId) -> bool {
        self.0.contains(&n)
    }

    /// Parses the bracketed list form, e.g. `[0, 4, 22, 13, 11, 2, 29]`.
    pub fn parse(s: &str) -> Option<Route> {
        let inner = s.trim().strip_prefix('[')?.strip_suffix(']')?;
        if inner.trim().is_empty() {
            return Some(Route::default());
        }
        inner
            .split(',')
            .map(|tok| tok.trim().parse::<usize>().ok().map(NodeId))
            .collect::<Option<Vec<_>>>()
            .map(Route)
    }
}

impl From<Vec<usize>> for Route {
    fn from(ids: Vec<usize>) -> Self {
        Route(ids.into_iter().map(NodeId).collect())
    }
}

impl From<&[usize]> for Route {
    fn from(ids: &[usize]) -> Self {
        Route(ids.iter().copied().map(NodeId).collect())
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{n}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("node ids must be unique and dense in 0..{count}, found {id}")]
    NonDenseId { id: usize, count: usize },
    #[error("duplicate node id {0}")]
    DuplicateNode(usize),
    #[error("unknown role {0:?}")]
    UnknownRole(String),
    #[error("unknown time slot {0:?}")]
    UnknownSlot(String),
    #[error("{context} is missing slot {slot}")]
    MissingSlot { context: String, slot: &'static str },
    #[error("edge {a}-{b} references a node that does not exist")]
    UnknownEndpoint { a: usize, b: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {a}-{b}")]
    DuplicateEdge { a: usize, b: usize },
    #[error("edge {a}-{b} has negative distance {value}")]
    NegativeDistance { a: usize, b: usize, value: f64 },
    #[error("edge {a}-{b} has negative speed {value} in slot {slot}")]
    NegativeSpeed {
        a: usize,
        b: usize,
        slot: &'static str,
        value: f64,
    },
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("availability for lot {lot} in slot {slot} is {value}, outside [0, 100]")]
    AvailabilityOutOfRange {
        lot: usize,
        slot: &'static str,
        value: f64,
    },
    #[error("parking lot {0} has no availability table")]
    MissingAvailability(usize),
    #[error("availability given for node {0}, which is not a parking lot")]
    AvailabilityForNonLot(String),
    #[error("network has no start node")]
    NoStartNode,
    #[error("network has no parking lot")]
    NoParkingLot,
    #[error("no parking lot is reachable from start node {0}")]
    UnreachableLot(usize),
}

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed network file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid network: {0}")]
    Validation(#[from] ValidationError),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("node {0} is not a parking lot")]
    NotAParkingLot(NodeId),
    #[error("invalid route {0}")]
    InvalidRoute(Route),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoadNetwork {
    roles: Vec<NodeRole>,
    edges: Vec<Edge>,
    // neighbor -> edge index, per node
    adjacency: Vec<BTreeMap<NodeId, usize>>,
    availability: BTreeMap<NodeId, SlotValues>,
}

impl RoadNetwork {
    /// Builds and validates a network. `roles[i]` is the role of node `i`.
    pub fn new(
        roles: Vec<NodeRole>,
        edges: Vec<Edge>,
        availability: BTreeMap<NodeId, SlotValues>,
    ) -> Result<Self, ValidationError> {
        let count = roles.len();
        let mut adjacency = vec![BTreeMap::new(); count];
        for (idx, e) in edges.iter().enumerate() {
            let (a, b) = (e.a.0, e.b.0);
            if a >= count || b >= count {
                return Err(ValidationError::UnknownEndpoint { a, b });
            }
            if a == b {
                return Err(ValidationError::SelfLoop(a));
            }
            if !e.distance_km.is_finite() {
                return Err(ValidationError::NonFinite(format!("distance of edge {a}-{b}")));
            }
            if e.distance_km < 0.0 {
                return Err(ValidationError::NegativeDistance {
                    a,
                    b,
                    value: e.distance_km,
                });
            }
            for slot in TimeSlot::ALL {
                let v = e.speed(slot);
                if !v.is_finite() {
                    return Err(ValidationError::NonFinite(format!(
                        "speed of edge {a}-{b} in slot {slot}"
                    )));
                }
                if v < 0.0 {
                    return Err(ValidationError::NegativeSpeed {
                        a,
                        b,
                        slot: slot.name(),
                        value: v,
                    });
                }
            }
            if adjacency[a].insert(e.b, idx).is_some() {
                return Err(ValidationError::DuplicateEdge { a, b });
            }
            adjacency[b].insert(e.a, idx);
        }

        for (node, table) in &availability {
            if node.0 >= count || roles[node.0] != NodeRole::ParkingLot {
                return Err(ValidationError::AvailabilityForNonLot(node.to_string()));
            }
            for slot in TimeSlot::ALL {
                let v = table[slot.index()];
                if !(0.0..=100.0).contains(&v) {
                    return Err(ValidationError::AvailabilityOutOfRange {
                        lot: node.0,
                        slot: slot.name(),
                        value: v,
                    });
                }
            }
        }

        let mut has_start = false;
        let mut has_lot = false;
        for (i, role) in roles.iter().enumerate() {
            match role {
                NodeRole::Start => has_start = true,
                NodeRole::ParkingLot => {
                    has_lot = true;
                    if !availability.contains_key(&NodeId(i)) {
                        return Err(ValidationError::MissingAvailability(i));
                    }
                }
                NodeRole::Intermediate => {}
            }
        }
        if !has_start {
            return Err(ValidationError::NoStartNode);
        }
        if !has_lot {
            return Err(ValidationError::NoParkingLot);
        }

        let net = RoadNetwork {
            roles,
            edges,
            adjacency,
            availability,
        };
        for start in net.start_nodes() {
            if !net.reaches_lot(start) {
                return Err(ValidationError::UnreachableLot(start.0));
            }
        }
        Ok(net)
    }

    fn reaches_lot(&self, from: NodeId) -> bool {
        let mut seen = vec![false; self.node_count()];
        let mut queue = VecDeque::from([from]);
        seen[from.0] = true;
        while let Some(n) = queue.pop_front() {
            if n != from && self.roles[n.0] == NodeRole::ParkingLot {
                return true;
            }
            for &m in self.adjacency[n.0].keys() {
                if !seen[m.0] {
                    seen[m.0] = true;
                    queue.push_back(m);
                }
            }
        }
        false
    }

    pub fn node_count(&self) -> usize {
        self.roles.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, NodeRole)> + '_ {
        self.roles.iter().enumerate().map(|(i, &r)| (NodeId(i), r))
    }

    pub fn contains(&self, n: NodeId) -> bool {
        n.0 < self.roles.len()
    }

    pub fn role(&self, n: NodeId) -> Option<NodeRole> {
        self.roles.get(n.0).copied()
    }

    pub fn nodes_with_role(&self, role: NodeRole) -> Vec<NodeId> {
        self.nodes()
            .filter(|&(_, r)| r == role)
            .map(|(n, _)| n)
            .collect()
    }

    pub fn start_nodes(&self) -> Vec<NodeId> {
        self.nodes_with_role(NodeRole::Start)
    }

    pub fn parking_lots(&self) -> Vec<NodeId> {
        self.nodes_with_role(NodeRole::ParkingLot)
    }

    pub fn neighbors(&self, n: NodeId) -> Result<BTreeSet<NodeId>, NetworkError> {
        self.adjacency
            .get(n.0)
            .map(|adj| adj.keys().copied().collect())
            .ok_or(NetworkError::UnknownNode(n))
    }

    /// Neighbors in ascending id order. Panics if `n` is out of range.
    pub(crate) fn adjacent(&self, n: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.adjacency[n.0].keys().copied()
    }

    pub fn edge_between(&self, a: NodeId, b: NodeId) -> Option<&Edge> {
        self.adjacency
            .get(a.0)
            .and_then(|adj| adj.get(&b))
            .map(|&idx| &self.edges[idx])
    }

    pub fn is_adjacent(&self, a: NodeId, b: NodeId) -> bool {
        self.edge_between(a, b).is_some()
    }

    pub fn is_valid_route(&self, r: &Route) -> bool {
        let nodes = r.nodes();
        let (Some(&first), Some(&last)) = (nodes.first(), nodes.last()) else {
            return false;
        };
        if self.role(first) != Some(NodeRole::Start) || self.role(last) != Some(NodeRole::ParkingLot) {
            return false;
        }
        let mut seen = vec![false; self.node_count()];
        for &n in nodes {
            if !self.contains(n) || seen[n.0] {
                return false;
            }
            seen[n.0] = true;
        }
        nodes.windows(2).all(|w| self.is_adjacent(w[0], w[1]))
    }

    fn route_edges<'a>(&'a self, r: &'a Route) -> Result<impl Iterator<Item = &'a Edge> + 'a, NetworkError> {
        if !self.is_valid_route(r) {
            return Err(NetworkError::InvalidRoute(r.clone()));
        }
        Ok(r.0.windows(2).map(|w| {
            self.edge_between(w[0], w[1])
                .expect("validated route has every edge")
        }))
    }

    pub fn route_distance(&self, r: &Route) -> Result<f64, NetworkError> {
        Ok(self.route_edges(r)?.map(|e| e.distance_km).sum())
    }

    pub fn route_speed_sum(&self, r: &Route, slot: TimeSlot) -> Result<f64, NetworkError> {
        Ok(self.route_edges(r)?.map(|e| e.speed(slot)).sum())
    }

    pub fn lot_availability(&self, lot: NodeId, slot: TimeSlot) -> Result<f64, NetworkError> {
        match self.role(lot) {
            None => Err(NetworkError::UnknownNode(lot)),
            Some(NodeRole::ParkingLot) => Ok(self.availability[&lot][slot.index()]),
            Some(_) => Err(NetworkError::NotAParkingLot(lot)),
        }
    }

    pub fn availability_table(&self) -> &BTreeMap<NodeId, SlotValues> {
        &self.availability
    }
}
