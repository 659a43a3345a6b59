//! Genetic search over simple start-to-lot routes.
//!
//! A chromosome is a route; each gene is a node id. One generation keeps the
//! elite individuals, then refills the population by tournament selection,
//! optional single-point crossover (the fitter child survives), and creep
//! mutation of interior genes. Every operator maps valid routes to valid
//! routes, so the population never needs repair.

use std::io::Write;

use rand::seq::index;
use rand::Rng;
use serde::Deserialize;
use thiserror::Error;

use crate::objectives::{FitnessContext, ObjectiveError, WeightVector};
use crate::road_network::{NodeId, NodeRole, RoadNetwork, Route, TimeSlot};
use crate::seeded_rng;

#[derive(Debug, Error)]
pub enum GaError {
    #[error("invalid GA configuration: {0}")]
    InvalidConfig(String),
    #[error("node {0} is not a start node")]
    NotAStart(NodeId),
    #[error("no route to a parking lot found from node {start} after {retries} restarts")]
    NoRouteFound { start: NodeId, retries: usize },
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chromosome {
    pub route: Route,
    pub fitness: Option<f64>,
}

impl Chromosome {
    pub fn new(route: Route) -> Self {
        Chromosome { route, fitness: None }
    }

    pub fn with_fitness(route: Route, fitness: f64) -> Self {
        Chromosome {
            route,
            fitness: Some(fitness),
        }
    }

    /// Unevaluated chromosomes rank last.
    pub fn score(&self) -> f64 {
        self.fitness.unwrap_or(f64::INFINITY)
    }

    fn evaluate(&mut self, ctx: &FitnessContext<'_>) -> Result<f64, GaError> {
        match self.fitness {
            Some(f) => Ok(f),
            None => {
                let f = ctx.fitness(&self.route)?;
                self.fitness = Some(f);
                Ok(f)
            }
        }
    }
}

pub type Population = Vec<Chromosome>;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    pub tournament_size: usize,
    pub elitism_count: usize,
    pub rng_seed: u64,
    pub max_init_retries: usize,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 50,
            generations: 30,
            crossover_rate: 0.2,
            tournament_size: 3,
            elitism_count: 1,
            rng_seed: 0,
            max_init_retries: 1000,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), GaError> {
        let bad = |msg: String| Err(GaError::InvalidConfig(msg));
        if self.population_size == 0 {
            return bad("population_size must be positive".into());
        }
        if self.generations == 0 {
            return bad("generations must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return bad(format!("crossover_rate {} outside [0, 1]", self.crossover_rate));
        }
        if self.tournament_size == 0 || self.tournament_size > self.population_size {
            return bad(format!(
                "tournament_size {} must be in 1..={}",
                self.tournament_size, self.population_size
            ));
        }
        if self.elitism_count >= self.population_size {
            return bad(format!(
                "elitism_count {} must be below population_size {}",
                self.elitism_count, self.population_size
            ));
        }
        if self.max_init_retries == 0 {
            return bad("max_init_retries must be positive".into());
        }
        Ok(())
    }
}

/// Uniform random walk over unvisited neighbors from `start`, stopping at the
/// first parking lot reached. A dead end restarts the walk.
pub fn random_route<R: Rng>(
    net: &RoadNetwork,
    start: NodeId,
    max_retries: usize,
    rng: &mut R,
) -> Result<Route, GaError> {
    if net.role(start) != Some(NodeRole::Start) {
        return Err(GaError::NotAStart(start));
    }
    let mut visited = vec![false; net.node_count()];
    let mut candidates = Vec::new();
    for _ in 0..=max_retries {
        visited.iter_mut().for_each(|v| *v = false);
        visited[start.index()] = true;
        let mut path = vec![start];
        loop {
            let current = *path.last().expect("path starts non-empty");
            if current != start && net.role(current) == Some(NodeRole::ParkingLot) {
                return Ok(Route(path));
            }
            candidates.clear();
            candidates.extend(net.adjacent(current).filter(|n| !visited[n.index()]));
            if candidates.is_empty() {
                break;
            }
            let next = candidates[rng.random_range(0..candidates.len())];
            visited[next.index()] = true;
            path.push(next);
        }
    }
    Err(GaError::NoRouteFound {
        start,
        retries: max_retries,
    })
}

/// `population_size` fresh random routes, each from a uniformly chosen start.
pub fn init_population<R: Rng>(net: &RoadNetwork, cfg: &GaConfig, rng: &mut R) -> Result<Population, GaError> {
    let starts = net.start_nodes();
    (0..cfg.population_size)
        .map(|_| {
            let start = starts[rng.random_range(0..starts.len())];
            random_route(net, start, cfg.max_init_retries, rng).map(Chromosome::new)
        })
        .collect()
}

/// Index of the winner among `size` distinct, uniformly drawn individuals.
/// Lower fitness wins; ties go to the earlier draw.
pub fn tournament_index<R: Rng>(pop: &[Chromosome], size: usize, rng: &mut R) -> usize {
    let size = size.clamp(1, pop.len());
    let mut best: Option<usize> = None;
    for i in index::sample(rng, pop.len(), size) {
        match best {
            Some(b) if pop[b].score() <= pop[i].score() => {}
            _ => best = Some(i),
        }
    }
    best.expect("tournament draws at least one entrant")
}

pub fn tournament_select<'a, R: Rng>(pop: &'a [Chromosome], size: usize, rng: &mut R) -> &'a Chromosome {
    &pop[tournament_index(pop, size, rng)]
}

/// Cut pairs `(i, j)` for `head[..i] ++ tail[j..]`, nearest the midpoints
/// first. Both pieces are non-empty.
fn cut_order(head_len: usize, tail_len: usize) -> Vec<(usize, usize)> {
    let mid_head = head_len.div_ceil(2);
    let mid_tail = tail_len - tail_len / 2;
    let mut cuts: Vec<(usize, usize)> = (1..head_len)
        .flat_map(|i| (1..tail_len).map(move |j| (i, j)))
        .collect();
    cuts.sort_by_key(|&(i, j)| (i.abs_diff(mid_head) + j.abs_diff(mid_tail), i, j));
    cuts
}

fn splice(head: &Route, tail: &Route, net: &RoadNetwork) -> Option<Route> {
    let (h, t) = (head.nodes(), tail.nodes());
    cut_order(h.len(), t.len()).into_iter().find_map(|(i, j)| {
        if !net.is_adjacent(h[i - 1], t[j]) {
            return None;
        }
        let child = Route(h[..i].iter().chain(&t[j..]).copied().collect());
        net.is_valid_route(&child).then_some(child)
    })
}

/// Single-point crossover. At the midpoint cut, child one takes the first
/// `ceil(len1 / 2)` genes of `p1` and the last `floor(len2 / 2)` of `p2`;
/// child two is the mirror image. An invalid child is retried at cuts
/// further from the midpoint and, failing all of them, replaced by a copy
/// of the fitter parent.
pub fn single_point_crossover(p1: &Chromosome, p2: &Chromosome, net: &RoadNetwork) -> (Chromosome, Chromosome) {
    let fitter = if p2.score() < p1.score() { p2 } else { p1 };
    let child = |head: &Chromosome, tail: &Chromosome| match splice(&head.route, &tail.route, net) {
        Some(r) if r == head.route => head.clone(),
        Some(r) if r == tail.route => tail.clone(),
        Some(r) => Chromosome::new(r),
        None => fitter.clone(),
    };
    (child(p1, p2), child(p2, p1))
}

/// Legal replacements for the interior gene at `pos`: nodes adjacent to both
/// of its neighbors in the route and not already on it. Ascending id order.
pub fn mutation_candidates(route: &Route, pos: usize, net: &RoadNetwork) -> Vec<NodeId> {
    let nodes = route.nodes();
    if pos == 0 || pos + 1 >= nodes.len() {
        return Vec::new();
    }
    let (prev, next) = (nodes[pos - 1], nodes[pos + 1]);
    net.adjacent(prev)
        .filter(|&n| net.is_adjacent(n, next) && !route.contains(n))
        .collect()
}

/// Replaces the gene at `pos` with a uniformly drawn legal candidate.
/// Returns false, leaving the route untouched, when none exists.
pub fn mutate_gene<R: Rng>(route: &mut Route, pos: usize, net: &RoadNetwork, rng: &mut R) -> bool {
    let candidates = mutation_candidates(route, pos, net);
    if candidates.is_empty() {
        return false;
    }
    route.0[pos] = candidates[rng.random_range(0..candidates.len())];
    true
}

/// Creep mutation: each interior gene of a length-`n` chromosome mutates
/// with probability `1/n`. Endpoints are never touched.
pub fn creep_mutate<R: Rng>(c: Chromosome, net: &RoadNetwork, rng: &mut R) -> Chromosome {
    let n = c.route.len();
    if n < 3 {
        return c;
    }
    let rate = 1.0 / n as f64;
    let mut out = c;
    for pos in 1..n - 1 {
        if rng.random_bool(rate) && mutate_gene(&mut out.route, pos, net, rng) {
            out.fitness = None;
        }
    }
    out
}

fn evaluate_all(pop: &mut [Chromosome], ctx: &FitnessContext<'_>) -> Result<(), GaError> {
    for c in pop.iter_mut() {
        c.evaluate(ctx)?;
    }
    Ok(())
}

/// Index of the lowest fitness, earliest on ties.
fn best_index(pop: &[Chromosome]) -> usize {
    let mut best = 0;
    for (i, c) in pop.iter().enumerate().skip(1) {
        if c.score() < pop[best].score() {
            best = i;
        }
    }
    best
}

/// One generational step. `pop` must be fully evaluated.
pub fn evolve_generation<R: Rng>(
    pop: &[Chromosome],
    ctx: &FitnessContext<'_>,
    cfg: &GaConfig,
    rng: &mut R,
) -> Result<Population, GaError> {
    let size = cfg.population_size;
    let mut ranked: Vec<usize> = (0..pop.len()).collect();
    ranked.sort_by(|&a, &b| pop[a].score().total_cmp(&pop[b].score()).then(a.cmp(&b)));

    let mut next: Population = Vec::with_capacity(size);
    next.extend(ranked.iter().take(cfg.elitism_count.min(size)).map(|&i| pop[i].clone()));

    while next.len() < size {
        let p1 = &pop[tournament_index(pop, cfg.tournament_size, rng)];
        let p2 = &pop[tournament_index(pop, cfg.tournament_size, rng)];
        let chosen = if rng.random_bool(cfg.crossover_rate) {
            let (mut c1, mut c2) = single_point_crossover(p1, p2, ctx.net);
            let (f1, f2) = (c1.evaluate(ctx)?, c2.evaluate(ctx)?);
            if f2 < f1 {
                c2
            } else {
                c1
            }
        } else if p2.score() < p1.score() {
            p2.clone()
        } else {
            p1.clone()
        };
        let mut child = creep_mutate(chosen, ctx.net, rng);
        child.evaluate(ctx)?;
        next.push(child);
    }
    debug_assert!(next.iter().all(|c| ctx.net.is_valid_route(&c.route)));
    Ok(next)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub best_route: Route,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GenerationTrace {
    pub records: Vec<GenerationRecord>,
}

impl GenerationTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn best_fitness(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.best_fitness).collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["generation", "best_fitness", "mean_fitness", "best_route"])?;
        for r in &self.records {
            w.write_record([
                r.generation.to_string(),
                format!("{:.6}", r.best_fitness),
                format!("{:.6}", r.mean_fitness),
                r.best_route.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    /// Lowest-fitness chromosome seen in any generation, initial included.
    pub best: Chromosome,
    pub trace: GenerationTrace,
}

/// Full run with bounds derived from the network.
pub fn run(net: &RoadNetwork, slot: TimeSlot, w: WeightVector, cfg: &GaConfig) -> Result<RunOutcome, GaError> {
    let ctx = FitnessContext::new(net, slot, w)?;
    run_with_context(&ctx, cfg)
}

/// Initializes a population and evolves it for exactly `cfg.generations`
/// steps, recording one trace entry per step.
pub fn run_with_context(ctx: &FitnessContext<'_>, cfg: &GaConfig) -> Result<RunOutcome, GaError> {
    cfg.validate()?;
    let mut rng = seeded_rng(cfg.rng_seed);
    let mut pop = init_population(ctx.net, cfg, &mut rng)?;
    evaluate_all(&mut pop, ctx)?;
    let mut best = pop[best_index(&pop)].clone();
    let mut trace = GenerationTrace::default();

    for generation in 1..=cfg.generations {
        pop = evolve_generation(&pop, ctx, cfg, &mut rng)?;
        let bi = best_index(&pop);
        let mean = pop.iter().map(Chromosome::score).sum::<f64>() / pop.len() as f64;
        trace.records.push(GenerationRecord {
            generation,
            best_fitness: pop[bi].score(),
            mean_fitness: mean,
            best_route: pop[bi].route.clone(),
        });
        if pop[bi].score() < best.score() {
            best = pop[bi].clone();
        }
    }
    Ok(RunOutcome { best, trace })
}
