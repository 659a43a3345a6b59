//! JSON network files.
//!
//! ```json
//! {
//!   "nodes": [{"id": 0, "role": "start"}, ...],
//!   "edges": [{"a": 0, "b": 4, "distance_km": 1.2,
//!              "speed_kmh": {"12-4am": 48.0, "4-8am": 41.5, ...}}, ...],
//!   "availability_pct": {"28": {"12-4am": 95.0, ...}, ...}
//! }
//! ```
//!
//! Unknown keys are rejected at every level. Slot names must be spelled
//! exactly as [`TimeSlot::name`].

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use super::{Edge, NetworkError, NodeId, NodeRole, RoadNetwork, SlotValues, TimeSlot, ValidationError};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNetwork {
    nodes: Vec<RawNode>,
    edges: Vec<RawEdge>,
    availability_pct: BTreeMap<String, BTreeMap<String, f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    id: usize,
    role: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEdge {
    a: usize,
    b: usize,
    distance_km: f64,
    speed_kmh: BTreeMap<String, f64>,
}

fn slot_values(context: &str, raw: &BTreeMap<String, f64>) -> Result<SlotValues, ValidationError> {
    for key in raw.keys() {
        key.parse::<TimeSlot>()?;
    }
    let mut out = [0.0; 6];
    for slot in TimeSlot::ALL {
        out[slot.index()] = *raw.get(slot.name()).ok_or_else(|| ValidationError::MissingSlot {
            context: context.to_string(),
            slot: slot.name(),
        })?;
    }
    Ok(out)
}

fn from_raw(raw: RawNetwork) -> Result<RoadNetwork, ValidationError> {
    let count = raw.nodes.len();
    let mut roles: Vec<Option<NodeRole>> = vec![None; count];
    for node in &raw.nodes {
        if node.id >= count {
            return Err(ValidationError::NonDenseId { id: node.id, count });
        }
        if roles[node.id].is_some() {
            return Err(ValidationError::DuplicateNode(node.id));
        }
        roles[node.id] = Some(node.role.parse()?);
    }
    // every slot filled: ids are in range and pairwise distinct
    let roles: Vec<NodeRole> = roles.into_iter().map(|r| r.expect("dense ids")).collect();

    let edges = raw
        .edges
        .iter()
        .map(|e| {
            Ok(Edge {
                a: NodeId(e.a),
                b: NodeId(e.b),
                distance_km: e.distance_km,
                speed_kmh: slot_values(&format!("edge {}-{}", e.a, e.b), &e.speed_kmh)?,
            })
        })
        .collect::<Result<Vec<_>, ValidationError>>()?;

    let mut availability = BTreeMap::new();
    for (key, table) in &raw.availability_pct {
        let id: usize = key
            .parse()
            .map_err(|_| ValidationError::AvailabilityForNonLot(key.clone()))?;
        availability.insert(NodeId(id), slot_values(&format!("lot {id}"), table)?);
    }
    RoadNetwork::new(roles, edges, availability)
}

pub fn network_from_json(text: &str) -> Result<RoadNetwork, NetworkError> {
    let raw: RawNetwork = serde_json::from_str(text)?;
    Ok(from_raw(raw)?)
}

pub fn load_network(path: impl AsRef<Path>) -> Result<RoadNetwork, NetworkError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| NetworkError::Io {
        path: path.display().to_string(),
        source,
    })?;
    network_from_json(&text)
}

struct SlotMap<'a>(&'a SlotValues);

impl Serialize for SlotMap<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(6))?;
        for slot in TimeSlot::ALL {
            map.serialize_entry(slot.name(), &self.0[slot.index()])?;
        }
        map.end()
    }
}

struct LotMap<'a>(&'a BTreeMap<NodeId, SlotValues>);

impl Serialize for LotMap<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (lot, table) in self.0 {
            map.serialize_entry(&lot.0.to_string(), &SlotMap(table))?;
        }
        map.end()
    }
}

#[derive(Serialize)]
struct OutNode {
    id: usize,
    role: &'static str,
}

#[derive(Serialize)]
struct OutEdge<'a> {
    a: usize,
    b: usize,
    distance_km: f64,
    speed_kmh: SlotMap<'a>,
}

#[derive(Serialize)]
struct OutNetwork<'a> {
    nodes: Vec<OutNode>,
    edges: Vec<OutEdge<'a>>,
    availability_pct: LotMap<'a>,
}

/// Serializes with a stable key order, so equal networks give equal bytes.
pub fn network_to_json(net: &RoadNetwork) -> String {
    let doc = OutNetwork {
        nodes: net
            .nodes()
            .map(|(id, role)| OutNode {
                id: id.0,
                role: role.as_str(),
            })
            .collect(),
        edges: net
            .edges()
            .iter()
            .map(|e| OutEdge {
                a: e.a.0,
                b: e.b.0,
                distance_km: e.distance_km,
                speed_kmh: SlotMap(&e.speed_kmh),
            })
            .collect(),
        availability_pct: LotMap(net.availability_table()),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("network serializes");
    text.push('\n');
    text
}

pub fn save_network(net: &RoadNetwork, path: impl AsRef<Path>) -> Result<(), NetworkError> {
    let path = path.as_ref();
    fs::write(path, network_to_json(net)).map_err(|source| NetworkError::Io {
        path: path.display().to_string(),
        source,
    })
}
