use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::Command;

use parkroute::ga_engine::GaConfig;
use parkroute::objectives::WeightVector;
use parkroute::road_network::{load_network, Edge, NodeId, NodeRole, RoadNetwork, TimeSlot};
use parkroute::scenario::{
    emit_all, parse_route_table, read_fitness_csv, run_day, run_day_with, run_slot, DaySeeding, FITNESS_CSV,
    PLOT_SVG, ROUTE_TABLE,
};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn parkroute(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_parkroute"))
        .args(args)
        .env_remove(parkroute::cli::CONFIG_ENV)
        .output()
        .unwrap()
}

fn pilot_weights() -> WeightVector {
    WeightVector::new(0.29, 0.30, 0.41).unwrap()
}

#[test]
fn thirty_generations_round_trip_through_csv() {
    let net = load_network(data("city31.json")).unwrap();
    let report = run_day(&net, pilot_weights(), &GaConfig::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    emit_all(&report, dir.path()).unwrap();

    let text = std::fs::read_to_string(dir.path().join(FITNESS_CSV)).unwrap();
    assert_eq!(text.lines().count(), 31);
    assert_eq!(text.lines().next(), Some("generation,12-4am,4-8am,8am-12pm,12-4pm,4-8pm,8pm-12am"));

    let rows = read_fitness_csv(dir.path().join(FITNESS_CSV)).unwrap();
    assert_eq!(rows.len(), 30);
    for (col, slot) in report.slots.iter().enumerate() {
        let series: Vec<f64> = rows.iter().map(|r| r[col]).collect();
        assert!(series.windows(2).all(|p| p[1] <= p[0]));
        for (read, kept) in series.iter().zip(slot.trace.best_fitness()) {
            assert!((read - kept).abs() <= 5e-7);
        }
    }

    let table = std::fs::read_to_string(dir.path().join(ROUTE_TABLE)).unwrap();
    let parsed = parse_route_table(&table).unwrap();
    assert_eq!(parsed.len(), 6);
    for ((slot, route), kept) in parsed.iter().zip(&report.slots) {
        assert_eq!(*slot, kept.slot);
        assert_eq!(*route, kept.best_route);
        assert!(net.is_valid_route(route));
    }

    let svg = std::fs::read_to_string(dir.path().join(PLOT_SVG)).unwrap();
    assert_eq!(svg.matches("class=\"series\"").count(), 6);
    for slot in TimeSlot::ALL {
        assert!(svg.contains(slot.name()));
    }
}

#[test]
fn run_slot_is_deterministic() {
    let net = load_network(data("city31.json")).unwrap();
    let cfg = GaConfig {
        rng_seed: 7,
        ..GaConfig::default()
    };
    let a = run_slot(&net, TimeSlot::Afternoon, pilot_weights(), &cfg).unwrap();
    let b = run_slot(&net, TimeSlot::Afternoon, pilot_weights(), &cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(net.role(a.best_route.last().unwrap()), Some(NodeRole::ParkingLot));
    assert_eq!(a.trace.len(), 30);
}

#[test]
fn availability_only_weights_pick_the_freest_afternoon_lot() {
    let net = load_network(data("city31.json")).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(data("city31.json")).unwrap()).unwrap();
    let freest = doc["availability_pct"]
        .as_object()
        .unwrap()
        .iter()
        .map(|(lot, table)| (table["12-4pm"].as_f64().unwrap(), lot.parse::<usize>().unwrap()))
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .unwrap()
        .1;
    let w = WeightVector::new(0.0, 0.0, 1.0).unwrap();
    let report = run_day(&net, w, &GaConfig::default()).unwrap();
    assert_eq!(report.slot(TimeSlot::Afternoon).best_route.last(), Some(NodeId(freest)));
}

fn flat_network() -> RoadNetwork {
    // the same speed in every slot, the same availability in every slot
    let roles = vec![
        NodeRole::Start,
        NodeRole::Intermediate,
        NodeRole::Intermediate,
        NodeRole::Intermediate,
        NodeRole::ParkingLot,
        NodeRole::ParkingLot,
    ];
    let pairs = [(0, 1, 1.2, 40.0), (0, 2, 0.7, 25.0), (1, 2, 0.4, 30.0), (1, 3, 2.0, 50.0), (2, 3, 1.1, 35.0), (3, 4, 0.9, 20.0), (2, 5, 2.5, 45.0), (4, 5, 0.3, 15.0)];
    let edges = pairs
        .iter()
        .map(|&(a, b, d, s)| Edge {
            a: NodeId(a),
            b: NodeId(b),
            distance_km: d,
            speed_kmh: [s; 6],
        })
        .collect();
    let avail = BTreeMap::from([(NodeId(4), [60.0; 6]), (NodeId(5), [35.0; 6])]);
    RoadNetwork::new(roles, edges, avail).unwrap()
}

#[test]
fn flat_tables_with_shared_seed_give_identical_slots() {
    let net = flat_network();
    let cfg = GaConfig {
        population_size: 20,
        generations: 15,
        rng_seed: 3,
        ..GaConfig::default()
    };
    let report = run_day_with(&net, pilot_weights(), &cfg, DaySeeding::Shared).unwrap();
    let first = &report.slots[0];
    for s in &report.slots[1..] {
        assert_eq!(s.trace, first.trace);
        assert_eq!(s.best_route, first.best_route);
    }
}

#[test]
fn cli_unknown_subcommand_exits_one() {
    let out = parkroute(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn cli_weights_estimate_reports_frequentist_column() {
    let out = parkroute(&["weights", "estimate", "--survey", data("survey.json").to_str().unwrap(), "--method", "freq"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for (name, w) in [("distance", "0.3200"), ("speed", "0.2800"), ("availability", "0.4000")] {
        let line = text.lines().find(|l| l.starts_with(name)).unwrap();
        assert!(line.contains(w), "{line}");
    }
}

#[test]
fn cli_simulate_day_writes_three_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = parkroute(&[
        "simulate-day",
        "--network",
        data("city31.json").to_str().unwrap(),
        "--weights",
        data("weights.json").to_str().unwrap(),
        "--seed",
        "1",
        "--generations",
        "10",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for name in [FITNESS_CSV, ROUTE_TABLE, PLOT_SVG] {
        assert!(std::fs::metadata(dir.path().join(name)).unwrap().len() > 0);
    }
    let csv = std::fs::read_to_string(dir.path().join(FITNESS_CSV)).unwrap();
    assert_eq!(csv.lines().count(), 11);
}

#[test]
fn cli_config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ga.json");
    std::fs::write(&cfg, r#"{"population_size": 12, "generations": 4}"#).unwrap();
    let trace = dir.path().join("trace.csv");
    let (network, weights) = (data("city31.json"), data("weights.json"));
    let common = [
        "optimize",
        "--network",
        network.to_str().unwrap(),
        "--slot",
        "4-8pm",
        "--weights",
        weights.to_str().unwrap(),
        "--seed",
        "2",
        "--trace",
        trace.to_str().unwrap(),
    ];
    let out = parkroute(&[&common[..], &["--config", cfg.to_str().unwrap()]].concat());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read_to_string(&trace).unwrap().lines().count(), 5);

    let out = parkroute(&[&common[..], &["--config", cfg.to_str().unwrap(), "--generations", "6"]].concat());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&trace).unwrap().lines().count(), 7);

    let out = Command::new(env!("CARGO_BIN_EXE_parkroute"))
        .args(common)
        .env(parkroute::cli::CONFIG_ENV, &cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&trace).unwrap().lines().count(), 5);
}

#[test]
fn cli_bad_config_is_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ga.json");
    std::fs::write(&cfg, r#"{"population_size": 0}"#).unwrap();
    let out = parkroute(&[
        "optimize",
        "--network",
        data("city31.json").to_str().unwrap(),
        "--slot",
        "12-4am",
        "--weights",
        data("weights.json").to_str().unwrap(),
        "--seed",
        "2",
        "--config",
        cfg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cli_oracle_lists_routes_of_small_network() {
    let dir = tempfile::tempdir().unwrap();
    let net_path = dir.path().join("flat.json");
    std::fs::write(&net_path, parkroute::road_network::network_to_json(&flat_network())).unwrap();
    let out = parkroute(&[
        "oracle",
        "--network",
        net_path.to_str().unwrap(),
        "--slot",
        "8am-12pm",
        "--weights",
        data("weights.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("route,fitness"));
    assert!(text.lines().count() > 2);
}
