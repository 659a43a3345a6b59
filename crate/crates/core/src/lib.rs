//! Parking-lot route search on a time-varying road network.
//!
//! Routes from a start location to a parking lot are scored on distance,
//! summed segment speed and free space at the lot, combined by a weighted
//! sum whose weights come from a driver preference survey. A genetic
//! algorithm searches the route space for each four-hour slot of the day;
//! an exhaustive enumerator certifies it on small networks.
//!
//! Modules, bottom up:
//!
//! * [`road_network`]: graph model, JSON ingestion, route queries;
//! * [`weight_model`]: frequentist and Dirichlet-multinomial weights;
//! * [`objectives`]: objectives, normalization, weighted-sum fitness;
//! * [`ga_engine`]: population, operators and the run loop;
//! * [`oracle`]: brute-force optimum over all simple routes;
//! * [`scenario`]: the six-slot day run and its output files;
//! * [`cli`]: the `parkroute` command line.

pub mod cli;
pub mod ga_engine;
pub mod objectives;
pub mod oracle;
pub mod road_network;
pub mod scenario;
pub mod weight_model;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The RNG used everywhere randomness is needed; seeded runs are
/// reproducible across platforms.
pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub use ga_engine::{Chromosome, GaConfig, GenerationTrace};
pub use objectives::{ObjectiveBounds, WeightVector};
pub use road_network::{NodeId, NodeRole, RoadNetwork, Route, TimeSlot};
pub use scenario::{DayReport, SlotResult};
pub use weight_model::{SurveyCounts, WeightEstimate};
