//! Seeded synthetic networks.
//!
//! [`generate_example_network`] builds the 31-node city map: nodes 0 and 1
//! are start locations, 2..=27 are junctions and 28..=30 are parking lots.
//! The topology is fixed and contains every segment used by the reference
//! routes; only the measurements are drawn from the seed.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use super::{Edge, NodeId, NodeRole, RoadNetwork, Route, SlotValues, TimeSlot};
use crate::seeded_rng;

/// Reference best route per time slot on the 31-node map.
const SLOT_ROUTES: [&[usize]; 6] = [
    &[0, 4, 22, 14, 13, 11, 26, 21, 28],
    &[0, 4, 22, 13, 11, 2, 29],
    &[0, 3, 4, 22, 13, 25, 20, 28],
    &[0, 5, 22, 13, 11, 2, 29],
    &[0, 7, 4, 22, 13, 25, 20, 28],
    &[0, 5, 22, 13, 11, 2, 17, 21, 28],
];

/// Hand-worked chromosomes: a sample individual, the six tournament
/// entrants, both crossover children and the mutated child.
const WORKED_CHROMOSOMES: [&[usize]; 9] = [
    &[0, 5, 22, 15, 25, 26, 2, 19, 30],
    &[0, 6, 22, 15, 25, 20, 18, 28],
    &[0, 8, 7, 23, 3, 6, 22, 13, 25, 11, 2, 29],
    &[0, 4, 22, 14, 13, 25, 11, 26, 2, 19, 17, 20, 18, 28],
    &[0, 7, 4, 6, 22, 13, 1, 11, 2, 17, 21, 28],
    &[0, 3, 6, 22, 15, 1, 11, 26, 21, 28],
    &[0, 6, 22, 15, 1, 11, 26, 21, 28],
    &[0, 3, 6, 22, 15, 25, 20, 18, 28],
    &[0, 4, 6, 22, 15, 25, 20, 18, 28],
];

/// Segments that attach junctions absent from the reference routes
/// (9, 10, 12, 16, 24, 27) and give lot 30 a second approach. None of them
/// touches node 0 or node 6.
const CONNECTORS: [(usize, usize); 13] = [
    (8, 9),
    (9, 23),
    (10, 14),
    (10, 12),
    (12, 16),
    (12, 25),
    (16, 24),
    (16, 26),
    (24, 30),
    (24, 27),
    (19, 27),
    (17, 19),
    (13, 23),
];

pub struct ReferenceRoutes {
    pub by_slot: Vec<(TimeSlot, Route)>,
    pub worked: Vec<Route>,
}

pub fn reference_routes() -> ReferenceRoutes {
    ReferenceRoutes {
        by_slot: TimeSlot::ALL
            .into_iter()
            .zip(SLOT_ROUTES)
            .map(|(slot, ids)| (slot, Route::from(ids)))
            .collect(),
        worked: WORKED_CHROMOSOMES.iter().map(|&ids| Route::from(ids)).collect(),
    }
}

fn city_segments() -> BTreeSet<(usize, usize)> {
    let mut set = BTreeSet::new();
    for ids in SLOT_ROUTES.iter().chain(WORKED_CHROMOSOMES.iter()) {
        for w in ids.windows(2) {
            set.insert((w[0].min(w[1]), w[0].max(w[1])));
        }
    }
    for &(a, b) in &CONNECTORS {
        set.insert((a.min(b), a.max(b)));
    }
    set
}

// Free-flow share of each slot's speed: congested mornings and evenings,
// partial recovery mid-day, open roads at night.
const SPEED_FACTOR: SlotValues = [1.0, 0.8, 0.45, 0.65, 0.55, 0.9];
// Typical free space by slot; lots fill through the morning and bottom out
// in the early afternoon.
const AVAILABILITY_BASE: SlotValues = [90.0, 70.0, 40.0, 12.0, 55.0, 85.0];

fn round_to(v: f64, places: i32) -> f64 {
    let scale = 10f64.powi(places);
    (v * scale).round() / scale
}

fn draw_edge<R: Rng>(rng: &mut R, a: usize, b: usize, dist: (f64, f64), base_speed: (f64, f64)) -> Edge {
    let distance_km = round_to(rng.random_range(dist.0..dist.1), 2);
    let base = rng.random_range(base_speed.0..base_speed.1);
    let mut speed_kmh = [0.0; 6];
    for slot in TimeSlot::ALL {
        let noise = rng.random_range(0.85..1.15);
        speed_kmh[slot.index()] = round_to(base * SPEED_FACTOR[slot.index()] * noise, 1);
    }
    Edge {
        a: NodeId(a),
        b: NodeId(b),
        distance_km,
        speed_kmh,
    }
}

fn draw_availability<R: Rng>(rng: &mut R) -> SlotValues {
    let mut table = [0.0; 6];
    for slot in TimeSlot::ALL {
        let v = AVAILABILITY_BASE[slot.index()] + rng.random_range(-15.0..15.0);
        table[slot.index()] = round_to(v.clamp(0.0, 100.0), 1);
    }
    table
}

pub fn generate_example_network(seed: u64) -> RoadNetwork {
    let mut rng = seeded_rng(seed);
    let roles: Vec<NodeRole> = (0..31)
        .map(|i| match i {
            0 | 1 => NodeRole::Start,
            28..=30 => NodeRole::ParkingLot,
            _ => NodeRole::Intermediate,
        })
        .collect();
    let edges = city_segments()
        .into_iter()
        .map(|(a, b)| draw_edge(&mut rng, a, b, (0.4, 2.5), (30.0, 60.0)))
        .collect();
    let availability = (28..=30)
        .map(|lot| (NodeId(lot), draw_availability(&mut rng)))
        .collect();
    RoadNetwork::new(roles, edges, availability).expect("example network is valid by construction")
}

/// Small random instance for exhaustive cross-checks: node 0 is the start,
/// the last two nodes are lots (one lot when `node_count` is 2). The road
/// nodes form a random spanning tree plus extra edges with probability 0.35;
/// each lot hangs off one road node, so no route can pass through a lot.
pub fn generate_toy_network(seed: u64, node_count: usize) -> RoadNetwork {
    assert!(node_count >= 2, "toy network needs a start and a lot");
    let mut rng = seeded_rng(seed);
    let lots = if node_count >= 4 { 2 } else { 1 };
    let road = node_count - lots;
    let roles: Vec<NodeRole> = (0..node_count)
        .map(|i| {
            if i == 0 {
                NodeRole::Start
            } else if i >= road {
                NodeRole::ParkingLot
            } else {
                NodeRole::Intermediate
            }
        })
        .collect();

    let mut pairs = BTreeSet::new();
    for i in 1..road {
        let j = rng.random_range(0..i);
        pairs.insert((j, i));
    }
    for i in 0..road {
        for j in (i + 1)..road {
            if rng.random_bool(0.35) {
                pairs.insert((i, j));
            }
        }
    }
    for lot in road..node_count {
        pairs.insert((rng.random_range(0..road), lot));
    }
    let edges = pairs
        .into_iter()
        .map(|(a, b)| draw_edge(&mut rng, a, b, (0.5, 5.0), (20.0, 70.0)))
        .collect();
    let availability: BTreeMap<NodeId, SlotValues> = (node_count - lots..node_count)
        .map(|lot| (NodeId(lot), draw_availability(&mut rng)))
        .collect();
    RoadNetwork::new(roles, edges, availability).expect("toy network is valid by construction")
}
