//! `fhutch` — iterate contractive affine systems on finite point clouds,
//! verify the inequalities that make them converge, and inspect the results.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod fmt;
mod raster;

#[derive(Parser)]
#[command(name = "fhutch", version, about = "Fractal attractors of contractive map systems on point clouds")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Iterate the union operator from the configured seed to its attractor.
    Iterate {
        /// System configuration: a JSON file path or `preset:NAME`
        /// (sierpinski, cantor, square).
        #[arg(short, long)]
        config: String,
        /// Directory for attractor.csv, trace.csv, and result.json.
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Run verification suites against the configured system.
    Verify {
        /// System configuration: a JSON file path or `preset:NAME`.
        #[arg(short, long)]
        config: String,
        /// Comma-separated suite names, or `all`.
        #[arg(long, value_delimiter = ',', default_value = "all")]
        suites: Vec<String>,
    },
    /// Hausdorff distance between two CSV point sets.
    Distance {
        /// First point set (CSV).
        a: PathBuf,
        /// Second point set (CSV).
        b: PathBuf,
        /// Metric: euclidean, abs-diff, or snowflake:p=N.
        #[arg(long, default_value = "euclidean")]
        metric: String,
        /// Use the grid-indexed evaluator instead of the exhaustive one.
        #[arg(long)]
        accel: bool,
    },
    /// Rasterize a 2-D CSV point set to a binary PGM image.
    Render {
        /// Point set to draw (CSV).
        input: PathBuf,
        /// Output PGM path.
        #[arg(short, long)]
        out: PathBuf,
        /// Image size as WIDTHxHEIGHT.
        #[arg(long, default_value = "512x512")]
        size: String,
        /// World-coordinate window as x0,y0,x1,y1 (defaults to the
        /// bounding box plus a small margin).
        #[arg(long)]
        viewport: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::Iterate { config, out } => match load(&config) {
            Ok(cfg) => commands::cmd_iterate(&cfg, &out),
            Err(code) => code,
        },
        Cmd::Verify { config, suites } => match load(&config) {
            Ok(cfg) => commands::cmd_verify(&cfg, &suites),
            Err(code) => code,
        },
        Cmd::Distance { a, b, metric, accel } => {
            commands::cmd_distance(&a, &b, &metric, accel)
        }
        Cmd::Render { input, out, size, viewport } => {
            commands::cmd_render(&input, &out, &size, viewport.as_deref())
        }
    };
    ExitCode::from(code as u8)
}

/// Resolve and parse a `--config` argument, reporting every problem found.
fn load(arg: &str) -> Result<config::SystemConfig, i32> {
    let text = config::load_config_text(arg).map_err(|e| {
        eprintln!("{e}");
        1
    })?;
    config::parse_config(&text).map_err(|errors| {
        eprintln!("invalid configuration:");
        eprintln!("{errors}");
        1
    })
}
