//! Exhaustive reference solver: enumerate every simple start-to-lot route
//! and take the fitness minimum. Only meant for small instances.

use std::io::Write;

use thiserror::Error;

use crate::objectives::{fitness, ObjectiveBounds, ObjectiveError, WeightVector};
use crate::road_network::{NodeId, NodeRole, RoadNetwork, Route, TimeSlot};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("enumeration limit exceeded: {0}")]
    LimitExceeded(String),
    #[error("network has no route from a start node to a parking lot")]
    NoRouteFound,
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationLimit {
    pub max_routes: usize,
    /// Longest route, in nodes.
    pub max_path_length: usize,
}

impl EnumerationLimit {
    /// Generous limit for networks of `node_count` nodes; path length never
    /// binds since a simple path cannot exceed the node count.
    pub fn for_network(net: &RoadNetwork) -> Self {
        EnumerationLimit {
            max_routes: 1_000_000,
            max_path_length: net.node_count(),
        }
    }
}

struct Search<'a> {
    net: &'a RoadNetwork,
    limit: EnumerationLimit,
    path: Vec<NodeId>,
    on_path: Vec<bool>,
    routes: Vec<Route>,
}

impl Search<'_> {
    fn visit(&mut self, node: NodeId) -> Result<(), OracleError> {
        self.path.push(node);
        self.on_path[node.index()] = true;
        if self.path.len() > 1 && self.net.role(node) == Some(NodeRole::ParkingLot) {
            if self.routes.len() == self.limit.max_routes {
                return Err(OracleError::LimitExceeded(format!(
                    "more than {} routes",
                    self.limit.max_routes
                )));
            }
            self.routes.push(Route(self.path.clone()));
        }
        let next: Vec<NodeId> = self
            .net
            .adjacent(node)
            .filter(|n| !self.on_path[n.index()])
            .collect();
        if !next.is_empty() && self.path.len() == self.limit.max_path_length {
            return Err(OracleError::LimitExceeded(format!(
                "paths longer than {} nodes",
                self.limit.max_path_length
            )));
        }
        for n in next {
            self.visit(n)?;
        }
        self.on_path[node.index()] = false;
        self.path.pop();
        Ok(())
    }
}

/// All simple paths from any start to any parking lot, depth first with
/// starts and neighbors in ascending id order. Routes may pass through
/// other lots or start nodes; only the endpoints' roles are constrained.
pub fn enumerate_routes(net: &RoadNetwork, limit: EnumerationLimit) -> Result<Vec<Route>, OracleError> {
    let mut search = Search {
        net,
        limit,
        path: Vec::new(),
        on_path: vec![false; net.node_count()],
        routes: Vec::new(),
    };
    for start in net.start_nodes() {
        search.visit(start)?;
    }
    Ok(search.routes)
}

/// The enumerated route of minimal fitness, earliest on ties.
pub fn optimal_route(
    net: &RoadNetwork,
    slot: TimeSlot,
    w: &WeightVector,
    bounds: &ObjectiveBounds,
    limit: EnumerationLimit,
) -> Result<(Route, f64), OracleError> {
    let mut best: Option<(Route, f64)> = None;
    for r in enumerate_routes(net, limit)? {
        let f = fitness(net, &r, slot, w, bounds)?;
        if best.as_ref().is_none_or(|(_, bf)| f < *bf) {
            best = Some((r, f));
        }
    }
    best.ok_or(OracleError::NoRouteFound)
}

/// CSV of every route with its fitness: `route,fitness`.
pub fn write_routes_csv<W: Write>(
    out: W,
    net: &RoadNetwork,
    slot: TimeSlot,
    w: &WeightVector,
    bounds: &ObjectiveBounds,
    limit: EnumerationLimit,
) -> Result<usize, Box<dyn std::error::Error>> {
    let routes = enumerate_routes(net, limit)?;
    let mut csv = csv::Writer::from_writer(out);
    csv.write_record(["route", "fitness"])?;
    for r in &routes {
        let f = fitness(net, r, slot, w, bounds)?;
        csv.write_record([r.to_string(), format!("{f:.6}")])?;
    }
    csv.flush()?;
    Ok(routes.len())
}
