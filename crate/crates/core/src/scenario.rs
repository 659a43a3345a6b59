//! Whole-day experiment: one genetic run per time slot, and the three
//! artifacts it produces (per-generation fitness CSV, route table, SVG
//! plot). All emitters are deterministic for a fixed report.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::thread;

use thiserror::Error;

use crate::ga_engine::{self, GaConfig, GaError, GenerationTrace};
use crate::objectives::WeightVector;
use crate::road_network::{RoadNetwork, Route, TimeSlot};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Ga(#[from] GaError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{path}: {message}")]
    Format { path: String, message: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ScenarioError + '_ {
    move |source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlotResult {
    pub slot: TimeSlot,
    pub best_route: Route,
    pub best_fitness: f64,
    pub trace: GenerationTrace,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DayReport {
    pub weights: WeightVector,
    pub config: GaConfig,
    /// One entry per slot, in clock order.
    pub slots: Vec<SlotResult>,
}

impl DayReport {
    pub fn generations(&self) -> usize {
        self.slots.first().map_or(0, |s| s.trace.len())
    }

    pub fn slot(&self, slot: TimeSlot) -> &SlotResult {
        &self.slots[slot.index()]
    }
}

pub fn run_slot(net: &RoadNetwork, slot: TimeSlot, w: WeightVector, cfg: &GaConfig) -> Result<SlotResult, GaError> {
    let out = ga_engine::run(net, slot, w, cfg)?;
    Ok(SlotResult {
        slot,
        best_fitness: out.best.score(),
        best_route: out.best.route,
        trace: out.trace,
    })
}

/// How each slot's run is seeded from the configured master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DaySeeding {
    /// `seed + slot index`.
    #[default]
    PerSlot,
    /// Every slot uses the master seed unchanged.
    Shared,
}

pub fn run_day(net: &RoadNetwork, w: WeightVector, cfg: &GaConfig) -> Result<DayReport, GaError> {
    run_day_with(net, w, cfg, DaySeeding::PerSlot)
}

/// Runs the six slots on separate threads. Each run owns its RNG, so the
/// result does not depend on scheduling.
pub fn run_day_with(net: &RoadNetwork, w: WeightVector, cfg: &GaConfig, seeding: DaySeeding) -> Result<DayReport, GaError> {
    cfg.validate()?;
    let results: Vec<Result<SlotResult, GaError>> = thread::scope(|scope| {
        let handles: Vec<_> = TimeSlot::ALL
            .into_iter()
            .map(|slot| {
                let slot_cfg = GaConfig {
                    rng_seed: match seeding {
                        DaySeeding::PerSlot => cfg.rng_seed.wrapping_add(slot.index() as u64),
                        DaySeeding::Shared => cfg.rng_seed,
                    },
                    ..cfg.clone()
                };
                scope.spawn(move || run_slot(net, slot, w, &slot_cfg))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("slot run panicked"))
            .collect()
    });
    Ok(DayReport {
        weights: w,
        config: cfg.clone(),
        slots: results.into_iter().collect::<Result<_, _>>()?,
    })
}

pub fn fitness_csv(report: &DayReport) -> Result<String, ScenarioError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["generation".to_string()];
    header.extend(report.slots.iter().map(|s| s.slot.name().to_string()));
    w.write_record(&header)?;
    for g in 0..report.generations() {
        let mut row = vec![(g + 1).to_string()];
        row.extend(
            report
                .slots
                .iter()
                .map(|s| format!("{:.6}", s.trace.records[g].best_fitness)),
        );
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is ascii"))
}

/// `generation,12-4am,4-8am,8am-12pm,12-4pm,4-8pm,8pm-12am`, one row per
/// generation, best fitness to six decimals.
pub fn emit_fitness_csv(report: &DayReport, path: impl AsRef<Path>) -> Result<(), ScenarioError> {
    let path = path.as_ref();
    fs::write(path, fitness_csv(report)?).map_err(io_err(path))
}

/// Reads a fitness CSV back as rows of six best-fitness values.
pub fn read_fitness_csv(path: impl AsRef<Path>) -> Result<Vec<Vec<f64>>, ScenarioError> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path)?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let mut expected = vec!["generation".to_string()];
    expected.extend(TimeSlot::ALL.iter().map(|s| s.name().to_string()));
    if header != expected {
        return Err(ScenarioError::Format {
            path: path.display().to_string(),
            message: format!("unexpected header {header:?}"),
        });
    }
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let values = rec
            .iter()
            .skip(1)
            .map(|v| v.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| ScenarioError::Format {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
        rows.push(values);
    }
    Ok(rows)
}

pub fn route_table(report: &DayReport) -> String {
    let width = TimeSlot::ALL.iter().map(|s| s.name().len()).max().unwrap_or(0).max("TIME SLOT".len());
    let mut out = format!("{:<width$}  ROUTES\n", "TIME SLOT");
    for s in &report.slots {
        let _ = writeln!(out, "{:<width$}  {}", s.slot.name(), s.best_route);
    }
    out
}

/// Text table mapping each slot to its best route as a bracketed list.
pub fn emit_route_table(report: &DayReport, path: impl AsRef<Path>) -> Result<(), ScenarioError> {
    let path = path.as_ref();
    fs::write(path, route_table(report)).map_err(io_err(path))
}

pub fn parse_route_table(text: &str) -> Option<Vec<(TimeSlot, Route)>> {
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let (slot, rest) = line.split_once(char::is_whitespace)?;
            Some((slot.parse().ok()?, Route::parse(rest)?))
        })
        .collect()
}

const PALETTE: [&str; 6] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];

/// Line chart of best fitness against generation, one polyline per slot.
pub fn plot_svg(report: &DayReport) -> String {
    let (width, height) = (820.0, 500.0);
    let (left, right, top, bottom) = (70.0, 170.0, 40.0, 60.0);
    let plot_w = width - left - right;
    let plot_h = height - top - bottom;
    let gens = report.generations().max(1);

    let all = report.slots.iter().flat_map(|s| s.trace.records.iter().map(|r| r.best_fitness));
    let (lo, hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let (mut y_min, mut y_max) = if lo.is_finite() {
        ((lo * 10.0).floor() / 10.0, (hi * 10.0).ceil() / 10.0)
    } else {
        (0.0, 1.0)
    };
    if y_max - y_min < 1e-9 {
        y_min -= 0.1;
        y_max += 0.1;
    }
    let x_of = |g: usize| {
        if gens == 1 {
            left + plot_w / 2.0
        } else {
            left + plot_w * (g - 1) as f64 / (gens - 1) as f64
        }
    };
    let y_of = |v: f64| top + plot_h * (y_max - v) / (y_max - y_min);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="15">Fitness vs. generation by time slot</text>"#,
        left + plot_w / 2.0
    );

    // y grid and labels, five intervals
    for i in 0..=5 {
        let v = y_min + (y_max - y_min) * i as f64 / 5.0;
        let y = y_of(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{left:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#dddddd"/>"##,
            left + plot_w
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{v:.2}</text>"#,
            left - 6.0,
            y + 4.0
        );
    }
    // x ticks roughly every fifth generation
    let step = (gens / 6).max(1);
    for g in (1..=gens).filter(|g| (g - 1) % step == 0 || *g == gens) {
        let x = x_of(g);
        let _ = writeln!(
            svg,
            r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{g}</text>"#,
            top + plot_h + 18.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<rect x="{left:.1}" y="{top:.1}" width="{plot_w:.1}" height="{plot_h:.1}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">Generation</text>"#,
        left + plot_w / 2.0,
        height - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">Best fitness</text>"#,
        top + plot_h / 2.0,
        top + plot_h / 2.0
    );

    for (i, s) in report.slots.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = s
            .trace
            .records
            .iter()
            .map(|r| format!("{:.2},{:.2}", x_of(r.generation), y_of(r.best_fitness)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline class="series" data-slot="{}" fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            s.slot.name(),
            points.join(" ")
        );
        let ly = top + 10.0 + 22.0 * i as f64;
        let lx = left + plot_w + 20.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/>"#,
            lx + 24.0
        );
        let _ = writeln!(
            svg,
            r#"<text class="legend" x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 30.0,
            ly + 4.0,
            s.slot.name()
        );
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn emit_plot(report: &DayReport, path: impl AsRef<Path>) -> Result<(), ScenarioError> {
    let path = path.as_ref();
    fs::write(path, plot_svg(report)).map_err(io_err(path))
}

/// File names written by [`emit_all`].
pub const FITNESS_CSV: &str = "fitness.csv";
pub const ROUTE_TABLE: &str = "routes.txt";
pub const PLOT_SVG: &str = "fitness.svg";

/// Writes the fitness CSV, route table and plot into `dir`, creating it.
pub fn emit_all(report: &DayReport, dir: impl AsRef<Path>) -> Result<[PathBuf; 3], ScenarioError> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let paths = [dir.join(FITNESS_CSV), dir.join(ROUTE_TABLE), dir.join(PLOT_SVG)];
    emit_fitness_csv(report, &paths[0])?;
    emit_route_table(report, &paths[1])?;
    emit_plot(report, &paths[2])?;
    Ok(paths)
}
