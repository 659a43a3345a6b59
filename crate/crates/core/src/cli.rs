//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on validation or data
//! errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use crate::ga_engine::{self, GaConfig};
use crate::objectives::{compute_bounds, load_weights, weights_to_json, WeightVector};
use crate::oracle::{self, EnumerationLimit};
use crate::road_network::{generate_example_network, load_network, save_network, TimeSlot};
use crate::scenario;
use crate::weight_model::{self, ReportColumns, SearchConfig};

/// Environment variable naming the default GA config file.
pub const CONFIG_ENV: &str = "PARKROUTE_CONFIG";

type CliResult = Result<(), Box<dyn std::error::Error>>;

#[derive(Parser, Debug)]
#[command(name = "parkroute", version, about = "Parking-lot route search on time-varying road networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Survey-based objective weights
    Weights {
        #[command(subcommand)]
        action: WeightsAction,
    },
    /// Run the genetic search for one time slot
    Optimize(OptimizeArgs),
    /// Run all six time slots and write fitness.csv, routes.txt and fitness.svg
    SimulateDay(SimulateArgs),
    /// Write the seeded 31-node example network
    GenNetwork {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exhaustively score every route (small networks only)
    Oracle {
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        slot: TimeSlot,
        #[arg(long)]
        weights: PathBuf,
        /// Write the CSV here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum WeightsAction {
    /// Estimate weights from survey counts
    Estimate {
        #[arg(long)]
        survey: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
        /// Also write a weights file (Bayesian unless --method freq)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Freq,
    Bayes,
    Both,
}

#[derive(Args, Debug)]
struct GaFlags {
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    generations: Option<usize>,
    #[arg(long)]
    population: Option<usize>,
    /// GA config file (JSON); defaults to $PARKROUTE_CONFIG when set
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OptimizeArgs {
    #[arg(long)]
    network: PathBuf,
    #[arg(long)]
    slot: TimeSlot,
    #[arg(long)]
    weights: PathBuf,
    #[command(flatten)]
    ga: GaFlags,
    /// Write the per-generation trace CSV here
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    network: PathBuf,
    #[arg(long)]
    weights: PathBuf,
    #[command(flatten)]
    ga: GaFlags,
    #[arg(long)]
    out: PathBuf,
}

pub fn load_config(path: &Path) -> Result<GaConfig, Box<dyn std::error::Error>> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?)
}

fn resolve_config(flags: &GaFlags) -> Result<GaConfig, Box<dyn std::error::Error>> {
    let path = flags
        .config
        .clone()
        .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    let mut cfg = match path {
        Some(p) => load_config(&p)?,
        None => GaConfig::default(),
    };
    cfg.rng_seed = flags.seed;
    if let Some(g) = flags.generations {
        cfg.generations = g;
    }
    if let Some(n) = flags.population {
        cfg.population_size = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn weights_estimate(survey: &Path, method: Method, out_path: Option<&Path>, out: &mut dyn Write) -> CliResult {
    let counts = weight_model::load_survey(survey)?;
    let columns = match method {
        Method::Freq => ReportColumns::Frequentist,
        Method::Bayes => ReportColumns::Bayesian,
        Method::Both => ReportColumns::Both,
    };
    let report = weight_model::compare_estimates(&counts, &SearchConfig::default())?;
    write!(out, "{}", report.render(columns))?;
    if let Some(path) = out_path {
        let chosen = match method {
            Method::Freq => &report.frequentist,
            _ => &report.bayesian,
        };
        let [d, s, a] = chosen.weights[..] else {
            return Err(format!("a weights file needs 3 categories, survey has {}", chosen.weights.len()).into());
        };
        let w = WeightVector::normalized(d, s, a, 1e-9)?;
        fs::write(path, weights_to_json(&w)).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(())
}

fn optimize(args: &OptimizeArgs, out: &mut dyn Write) -> CliResult {
    let net = load_network(&args.network)?;
    let w = load_weights(&args.weights)?;
    let cfg = resolve_config(&args.ga)?;
    let outcome = ga_engine::run(&net, args.slot, w, &cfg)?;
    writeln!(out, "slot: {}", args.slot)?;
    writeln!(out, "best route: {}", outcome.best.route)?;
    writeln!(out, "fitness: {:.6}", outcome.best.score())?;
    writeln!(out, "generations: {}", outcome.trace.len())?;
    if let Some(path) = &args.trace {
        let file = fs::File::create(path).map_err(|e| format!("{}: {e}", path.display()))?;
        outcome.trace.write_csv(file)?;
    }
    Ok(())
}

fn simulate_day(args: &SimulateArgs, out: &mut dyn Write) -> CliResult {
    let net = load_network(&args.network)?;
    let w = load_weights(&args.weights)?;
    let cfg = resolve_config(&args.ga)?;
    let report = scenario::run_day(&net, w, &cfg)?;
    let paths = scenario::emit_all(&report, &args.out)?;
    write!(out, "{}", scenario::route_table(&report))?;
    for p in paths {
        writeln!(out, "wrote {}", p.display())?;
    }
    Ok(())
}

fn oracle_cmd(network: &Path, slot: TimeSlot, weights: &Path, out_path: Option<&Path>, out: &mut dyn Write) -> CliResult {
    let net = load_network(network)?;
    let w = load_weights(weights)?;
    let bounds = compute_bounds(&net)?;
    let limit = EnumerationLimit::for_network(&net);
    match out_path {
        Some(path) => {
            let file = fs::File::create(path).map_err(|e| format!("{}: {e}", path.display()))?;
            oracle::write_routes_csv(file, &net, slot, &w, &bounds, limit)?;
            let (best, f) = oracle::optimal_route(&net, slot, &w, &bounds, limit)?;
            writeln!(out, "optimal route: {best}")?;
            writeln!(out, "fitness: {f:.6}")?;
        }
        None => {
            oracle::write_routes_csv(&mut *out, &net, slot, &w, &bounds, limit)?;
        }
    }
    Ok(())
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> CliResult {
    match cli.command {
        Command::Weights {
            action: WeightsAction::Estimate { survey, method, out: path },
        } => weights_estimate(&survey, method, path.as_deref(), out),
        Command::Optimize(args) => optimize(&args, out),
        Command::SimulateDay(args) => simulate_day(&args, out),
        Command::GenNetwork { seed, out: path } => {
            let net = generate_example_network(seed);
            save_network(&net, &path)?;
            writeln!(out, "wrote {}", path.display())?;
            Ok(())
        }
        Command::Oracle {
            network,
            slot,
            weights,
            out: path,
        } => oracle_cmd(&network, slot, &weights, path.as_deref(), out),
    }
}

/// Help text of the subcommand named in `argv`, or of the whole program.
fn usage_for(argv: &[OsString]) -> String {
    let mut cmd = Cli::command();
    let mut names = argv.iter().skip(1).filter_map(|a| a.to_str()).filter(|a| !a.starts_with('-'));
    let Some(first) = names.next() else {
        return cmd.render_help().to_string();
    };
    let Some(sub) = cmd.find_subcommand_mut(first) else {
        return cmd.render_help().to_string();
    };
    if let Some(second) = names.next() {
        if let Some(inner) = sub.find_subcommand_mut(second) {
            return inner.render_help().to_string();
        }
    }
    sub.render_help().to_string()
}

/// Parses `argv` (program name first), runs the command, returns the exit code.
pub fn run_cli<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = writeln!(err, "{}", e.render());
                    let _ = write!(err, "{}", usage_for(&argv));
                    1
                }
            };
        }
    };
    match dispatch(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli(argv, &mut stdout.lock(), &mut stderr.lock())
}
