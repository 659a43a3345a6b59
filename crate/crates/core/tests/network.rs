use std::path::PathBuf;

use parkroute::objectives::{compute_bounds, raw_objectives};
use parkroute::oracle::{enumerate_routes, EnumerationLimit};
use parkroute::road_network::{
    generate_example_network, generate_toy_network, load_network, network_from_json, network_to_json,
    reference_routes, NetworkError, NodeId, NodeRole, Route, TimeSlot,
};
use serde_json::Value;

fn bundled_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/city31.json")
}

fn raw_file() -> Value {
    serde_json::from_str(&std::fs::read_to_string(bundled_path()).unwrap()).unwrap()
}

/// Looks the edge up directly in the JSON document, either orientation.
fn raw_edge(doc: &Value, a: u64, b: u64) -> &Value {
    doc["edges"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| {
            let (x, y) = (e["a"].as_u64().unwrap(), e["b"].as_u64().unwrap());
            (x, y) == (a, b) || (x, y) == (b, a)
        })
        .unwrap_or_else(|| panic!("no edge {a}-{b} in file"))
}

#[test]
fn bundled_file_matches_generator_seed_42() {
    let text = std::fs::read_to_string(bundled_path()).unwrap();
    assert_eq!(text, network_to_json(&generate_example_network(42)));
}

#[test]
fn bundled_roles() {
    let net = load_network(bundled_path()).unwrap();
    assert_eq!(net.node_count(), 31);
    assert_eq!(net.start_nodes(), vec![NodeId(0), NodeId(1)]);
    assert_eq!(net.nodes_with_role(NodeRole::Intermediate), (2..=27).map(NodeId).collect::<Vec<_>>());
    assert_eq!(net.parking_lots(), vec![NodeId(28), NodeId(29), NodeId(30)]);
}

#[test]
fn node_zero_reaches_listed_neighbors() {
    let net = load_network(bundled_path()).unwrap();
    let n = net.neighbors(NodeId(0)).unwrap();
    for m in 3..=8 {
        assert!(n.contains(&NodeId(m)), "missing {m}");
    }
    for &m in &n {
        assert!(net.neighbors(m).unwrap().contains(&NodeId(0)));
    }
}

#[test]
fn reference_routes_are_valid_on_bundled_file() {
    let net = load_network(bundled_path()).unwrap();
    let refs = reference_routes();
    for (_, r) in &refs.by_slot {
        assert!(net.is_valid_route(r), "{r}");
    }
    for r in &refs.worked {
        assert!(net.is_valid_route(r), "{r}");
    }
    assert!(net.is_valid_route(&Route::from(vec![0, 4, 22, 14, 13, 11, 26, 21, 28])));
}

#[test]
fn distance_and_speed_match_file_resummation() {
    let net = load_network(bundled_path()).unwrap();
    let doc = raw_file();
    let ids = [0u64, 4, 22, 13, 11, 2, 29];
    let route = Route::from(ids.iter().map(|&i| i as usize).collect::<Vec<_>>());
    let mut dist = 0.0;
    let mut speed = 0.0;
    for p in ids.windows(2) {
        let e = raw_edge(&doc, p[0], p[1]);
        dist += e["distance_km"].as_f64().unwrap();
        speed += e["speed_kmh"]["8am-12pm"].as_f64().unwrap();
    }
    assert!((net.route_distance(&route).unwrap() - dist).abs() < 1e-12);
    assert!((net.route_speed_sum(&route, TimeSlot::Morning).unwrap() - speed).abs() < 1e-12);
}

#[test]
fn lot_availability_matches_file() {
    let net = load_network(bundled_path()).unwrap();
    let doc = raw_file();
    for lot in ["28", "29", "30"] {
        for slot in TimeSlot::ALL {
            let want = doc["availability_pct"][lot][slot.name()].as_f64().unwrap();
            let got = net.lot_availability(NodeId(lot.parse().unwrap()), slot).unwrap();
            assert_eq!(got, want);
        }
    }
    assert!(matches!(
        net.lot_availability(NodeId(5), TimeSlot::Midnight),
        Err(NetworkError::NotAParkingLot(_))
    ));
}

#[test]
fn zero_distance_single_edge_file_is_valid() {
    let speeds = r#"{"12-4am": 30, "4-8am": 30, "8am-12pm": 30, "12-4pm": 30, "4-8pm": 30, "8pm-12am": 30}"#;
    let text = format!(
        r#"{{"nodes": [{{"id": 0, "role": "start"}}, {{"id": 1, "role": "lot"}}],
            "edges": [{{"a": 0, "b": 1, "distance_km": 0, "speed_kmh": {speeds}}}],
            "availability_pct": {{"1": {speeds}}}}}"#
    );
    let net = network_from_json(&text).unwrap();
    assert_eq!(net.route_distance(&Route::from(vec![0, 1])).unwrap(), 0.0);
    let negative = text.replace("\"distance_km\": 0", "\"distance_km\": -1");
    assert!(matches!(network_from_json(&negative), Err(NetworkError::Validation(_))));
}

#[test]
fn enumerated_routes_fall_inside_bounds() {
    for seed in 0..10 {
        let net = generate_toy_network(seed, 8);
        let bounds = compute_bounds(&net).unwrap();
        for r in enumerate_routes(&net, EnumerationLimit::for_network(&net)).unwrap() {
            for slot in TimeSlot::ALL {
                let raw = raw_objectives(&net, &r, slot).unwrap();
                assert!(bounds.distance.contains(raw.distance_km));
                assert!(bounds.speed.contains(raw.speed_sum));
                assert!(bounds.availability.contains(raw.availability_pct));
            }
        }
    }
}
