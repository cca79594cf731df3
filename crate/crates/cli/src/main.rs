use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod output;

use config::RunConfig;
use output::CliError;

#[derive(Parser, Debug)]
#[command(name = "fiberlab", version, about = "Experiments on doubly fibered quartic surfaces")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed of the random surface construction (and of other sampling).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Coefficient bound of the random surface construction.
    #[arg(long, global = true)]
    bound: Option<u32>,
    /// Load the surface from a file written by `build-surface` instead.
    #[arg(long, global = true)]
    surface: Option<PathBuf>,
    /// Output directory (default: $FIBERLAB_OUT, then ./fiberlab-out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads, 0 for all cores.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    precision: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Builds the surface and checks smoothness.
    BuildSurface,
    /// Weierstrass families, discriminants and singular fibers of both pencils.
    FibrationInfo,
    /// Torsion values of one section up to an order, with their heights.
    TorsionValues(commands::TorsionArgs),
    /// Rational Betti values in a region, or the Betti map along a path.
    BettiScan(commands::BettiArgs),
    /// The orbit grid of a point under the two fiber translations.
    Orbit(commands::OrbitArgs),
    /// Finite-orbit search over pairs of torsion values.
    FiniteOrbitSearch(commands::SearchArgs),
    /// Torsion-order bound tables.
    Bounds(commands::BoundsArgs),
    /// Distances of torsion-value conjugates to the bad locus.
    ConjugateControl(commands::ConjugateArgs),
    /// Intersection counts of random fibers with the singular fibers.
    BezoutCheck(commands::BezoutArgs),
}

fn resolve(g: &Global) -> Result<RunConfig, CliError> {
    let mut c = match &g.config {
        Some(p) => RunConfig::load(p).map_err(CliError::Usage)?,
        None => RunConfig::default(),
    };
    if let Some(s) = g.seed {
        c.surface.seed = s;
    }
    if let Some(b) = g.bound {
        c.surface.bound = b;
    }
    if let Some(o) = &g.out {
        c.run.out = Some(o.clone());
    }
    if let Some(w) = g.workers {
        c.run.workers = w;
    }
    if let Some(t) = g.tol {
        c.tolerances.tol = t;
    }
    if let Some(p) = g.precision {
        c.tolerances.precision = p;
    }
    c.validate().map_err(CliError::Usage)?;
    Ok(c)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut config = resolve(&cli.global)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(config.run.workers)
        .build_global()
        .map_err(|e| CliError::Io(e.to_string()))?;
    let out = config.out_dir();
    config.run.out = Some(out.clone());
    let ctx = commands::Context { config, surface_file: cli.global.surface, out };
    match cli.command {
        Command::BuildSurface => commands::build_surface(&ctx),
        Command::FibrationInfo => commands::fibration_info(&ctx),
        Command::TorsionValues(a) => commands::torsion_values(&ctx, &a),
        Command::BettiScan(a) => commands::betti_scan(&ctx, &a),
        Command::Orbit(a) => commands::orbit(&ctx, &a),
        Command::FiniteOrbitSearch(a) => commands::finite_orbit_search(&ctx, &a),
        Command::Bounds(a) => commands::bounds(&ctx, &a),
        Command::ConjugateControl(a) => commands::conjugate_control(&ctx, &a),
        Command::BezoutCheck(a) => commands::bezout_check(&ctx, &a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fiberlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
