//! The three route objectives, their normalization, and the weighted-sum
//! fitness the genetic search minimizes.
//!
//! Raw objectives, all to be minimized:
//!
//! * distance: total km along the route;
//! * speed: the negated sum of segment speeds in the slot;
//! * availability: the negated free-space percentage at the terminal lot.
//!
//! Each is mapped to [0, 1] with `(x - a) / (b - a)` over static,
//! network-derived bounds, then combined as `w1 f1 + w2 f2 + w3 f3`.

use std::fs;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::road_network::{NetworkError, RoadNetwork, Route, TimeSlot};

#[derive(Debug, Error)]
pub enum ObjectiveError {
    #[error("degenerate bounds [{a}, {b}]: upper must exceed lower")]
    DegenerateBounds { a: f64, b: f64 },
    #[error("network has no edges")]
    EmptyNetwork,
    #[error("weights must be non-negative and sum to 1, got ({0}, {1}, {2})")]
    InvalidWeights(f64, f64, f64),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed weights file: {0}")]
    Parse(#[from] serde_json::Error),
}

/// Weights for distance, speed and availability, summing to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightVector {
    distance: f64,
    speed: f64,
    availability: f64,
}

impl WeightVector {
    pub const SUM_TOLERANCE: f64 = 1e-12;

    pub fn new(distance: f64, speed: f64, availability: f64) -> Result<Self, ObjectiveError> {
        let w = [distance, speed, availability];
        let sum: f64 = w.iter().sum();
        if w.iter().any(|&x| !(x.is_finite() && x >= 0.0)) || (sum - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(ObjectiveError::InvalidWeights(distance, speed, availability));
        }
        Ok(WeightVector {
            distance,
            speed,
            availability,
        })
    }

    /// Accepts a sum within `tolerance` of one and rescales onto the simplex.
    pub fn normalized(distance: f64, speed: f64, availability: f64, tolerance: f64) -> Result<Self, ObjectiveError> {
        let sum = distance + speed + availability;
        let w = [distance, speed, availability];
        if w.iter().any(|&x| !(x.is_finite() && x >= 0.0)) || (sum - 1.0).abs() > tolerance {
            return Err(ObjectiveError::InvalidWeights(distance, speed, availability));
        }
        let (d, s) = (distance / sum, speed / sum);
        // availability absorbs the rounding so the sum is exactly one
        Self::new(d, s, (1.0 - d - s).max(0.0))
    }

    pub fn distance(&self) -> f64 {
        self.distance
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn availability(&self) -> f64 {
        self.availability
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.distance, self.speed, self.availability]
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightsFile {
    distance: f64,
    speed: f64,
    availability: f64,
}

/// Parses `{"distance": .., "speed": .., "availability": ..}`; the values
/// must sum to one within 1e-9.
pub fn weights_from_json(text: &str) -> Result<WeightVector, ObjectiveError> {
    let f: WeightsFile = serde_json::from_str(text)?;
    WeightVector::normalized(f.distance, f.speed, f.availability, 1e-9)
}

pub fn load_weights(path: impl AsRef<Path>) -> Result<WeightVector, ObjectiveError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ObjectiveError::Io {
        path: path.display().to_string(),
        source,
    })?;
    weights_from_json(&text)
}

pub fn weights_to_json(w: &WeightVector) -> String {
    format!(
        "{{\n  \"distance\": {},\n  \"speed\": {},\n  \"availability\": {}\n}}\n",
        w.distance, w.speed, w.availability
    )
}

/// Maps `[a, b]` onto `[0, 1]`; inputs outside the range clamp.
pub fn normalize(x: f64, a: f64, b: f64) -> Result<f64, ObjectiveError> {
    if b.partial_cmp(&a) != Some(std::cmp::Ordering::Greater) {
        return Err(ObjectiveError::DegenerateBounds { a, b });
    }
    Ok(((x - a) / (b - a)).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub lower: f64,
    pub upper: f64,
}

impl Range {
    pub fn new(lower: f64, upper: f64) -> Result<Self, ObjectiveError> {
        if upper.partial_cmp(&lower) != Some(std::cmp::Ordering::Greater) {
            return Err(ObjectiveError::DegenerateBounds { a: lower, b: upper });
        }
        Ok(Range { lower, upper })
    }

    fn scale(&self, x: f64) -> f64 {
        ((x - self.lower) / (self.upper - self.lower)).clamp(0.0, 1.0)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// Ranges of the raw (un-negated) distance, speed sum and availability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveBounds {
    pub distance: Range,
    pub speed: Range,
    pub availability: Range,
}

impl ObjectiveBounds {
    pub fn new(distance: Range, speed: Range) -> Self {
        ObjectiveBounds {
            distance,
            speed,
            availability: Range {
                lower: 0.0,
                upper: 100.0,
            },
        }
    }
}

/// Distance spans `[0, total edge length]`, speed `[0, sum over edges of
/// the fastest slot]`, availability `[0, 100]`. No simple route can leave
/// these, so fitness values are comparable across generations and slots.
pub fn compute_bounds(net: &RoadNetwork) -> Result<ObjectiveBounds, ObjectiveError> {
    if net.edge_count() == 0 {
        return Err(ObjectiveError::EmptyNetwork);
    }
    let total_distance: f64 = net.edges().iter().map(|e| e.distance_km).sum();
    let total_speed: f64 = net
        .edges()
        .iter()
        .map(|e| e.speed_kmh.iter().copied().fold(0.0, f64::max))
        .sum();
    // all-zero measurements would collapse the range; keep it open
    let distance = Range::new(0.0, if total_distance > 0.0 { total_distance } else { 1.0 })?;
    let speed = Range::new(0.0, if total_speed > 0.0 { total_speed } else { 1.0 })?;
    Ok(ObjectiveBounds::new(distance, speed))
}

pub fn objective_distance(net: &RoadNetwork, r: &Route) -> Result<f64, ObjectiveError> {
    Ok(net.route_distance(r)?)
}

pub fn objective_speed(net: &RoadNetwork, r: &Route, slot: TimeSlot) -> Result<f64, ObjectiveError> {
    Ok(-net.route_speed_sum(r, slot)?)
}

pub fn objective_availability(net: &RoadNetwork, r: &Route, slot: TimeSlot) -> Result<f64, ObjectiveError> {
    if !net.is_valid_route(r) {
        return Err(NetworkError::InvalidRoute(r.clone()).into());
    }
    let lot = r.last().expect("valid route is non-empty");
    Ok(-net.lot_availability(lot, slot)?)
}

/// Raw objective values of one route in one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawObjectives {
    pub distance_km: f64,
    pub speed_sum: f64,
    pub availability_pct: f64,
}

pub fn raw_objectives(net: &RoadNetwork, r: &Route, slot: TimeSlot) -> Result<RawObjectives, ObjectiveError> {
    Ok(RawObjectives {
        distance_km: objective_distance(net, r)?,
        speed_sum: -objective_speed(net, r, slot)?,
        availability_pct: -objective_availability(net, r, slot)?,
    })
}

/// Weighted sum of normalized objectives from precomputed raw values.
/// Normalizing a negated objective over its negated range equals one minus
/// the normalized raw value.
pub fn scalarize(raw: &RawObjectives, w: &WeightVector, bounds: &ObjectiveBounds) -> f64 {
    let nd = bounds.distance.scale(raw.distance_km);
    let ns = bounds.speed.scale(raw.speed_sum);
    let na = bounds.availability.scale(raw.availability_pct);
    w.distance * nd + w.speed * (1.0 - ns) + w.availability * (1.0 - na)
}

/// Route fitness in [0, 1]; lower is better.
pub fn fitness(
    net: &RoadNetwork,
    r: &Route,
    slot: TimeSlot,
    w: &WeightVector,
    bounds: &ObjectiveBounds,
) -> Result<f64, ObjectiveError> {
    Ok(scalarize(&raw_objectives(net, r, slot)?, w, bounds))
}

/// Everything needed to score routes for one optimization run.
#[derive(Debug, Clone, Copy)]
pub struct FitnessContext<'a> {
    pub net: &'a RoadNetwork,
    pub slot: TimeSlot,
    pub weights: WeightVector,
    pub bounds: ObjectiveBounds,
}

impl<'a> FitnessContext<'a> {
    pub fn new(net: &'a RoadNetwork, slot: TimeSlot, weights: WeightVector) -> Result<Self, ObjectiveError> {
        Ok(FitnessContext {
            net,
            slot,
            weights,
            bounds: compute_bounds(net)?,
        })
    }

    pub fn fitness(&self, r: &Route) -> Result<f64, ObjectiveError> {
        fitness(self.net, r, self.slot, &self.weights, &self.bounds)
    }
}
