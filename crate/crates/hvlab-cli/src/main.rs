//! `hvlab`: every experiment in the workspace behind one deterministic
//! binary. Parameters come from flags, which override a TOML config file,
//! which overrides built-in defaults. Results go to stdout (or `--out`) as
//! JSON or CSV; progress notes go to stderr so the payload stays
//! byte-identical across runs with the same seed.
//!
//! Exit codes: 0 on success, 1 on usage or I/O errors, 2 when the run's
//! embedded self-check fails.

mod config;
mod emit;
mod experiments;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use config::{resolve, FileConfig, Overrides};
use experiments::RunOutput;
use hvlab_core::boolean::BellAngles;

#[derive(Clone, Copy, Debug)]
struct Angles4([f64; 4]);

fn parse_angles(s: &str) -> Result<Angles4, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err("expected four comma-separated angles: a,a',b,b'".into());
    }
    let mut out = [0.0; 4];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = part
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("bad angle {part:?}: {e}"))?;
    }
    Ok(Angles4(out))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Parser)]
#[command(
    name = "hvlab",
    version,
    about = "Deterministic runs of Boolean and vector hidden-variable models"
)]
struct Cli {
    /// Base RNG seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// TOML config file with a `[per-experiment]` section per subcommand.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Write the result to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Output format; defaults to csv for tables and json for reports.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Boolean-stream pair runs: analytic S and J plus Monte Carlo checks.
    BellBoolean {
        /// Samples per analyzer setting.
        #[arg(long)]
        n: Option<u64>,
        /// Analyzer angles in radians as "a,a',b,b'".
        #[arg(long, value_parser = parse_angles)]
        angles: Option<Angles4>,
    },
    /// Vector-stream pair runs through threshold detectors.
    BellVector {
        /// Detection intervals per analyzer setting.
        #[arg(long)]
        n: Option<u64>,
        /// Analyzer angles in radians as "a,a',b,b'".
        #[arg(long, value_parser = parse_angles)]
        angles: Option<Angles4>,
    },
    /// Analytic coincidence curves of both models over a difference grid.
    Sweep {
        /// Number of grid steps across [0, pi/2].
        #[arg(long)]
        steps: Option<u64>,
    },
    /// Two-stream bunching trials at a balanced splitter, per pair kind.
    Hom {
        /// Windows per pair kind.
        #[arg(long)]
        n: Option<u64>,
    },
    /// Post-selected entanglement-swap sweep with a sine-squared fit.
    Swap {
        /// Windows per grid point.
        #[arg(long)]
        n: Option<u64>,
        /// Number of grid points across [0, pi/2].
        #[arg(long)]
        steps: Option<u64>,
        /// Post-selection acceptance half-width in radians.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// The 3x3 two-qubit operator square and its line products.
    KsSquare,
    /// The rotation-operator analogue and its squared line products.
    KsRotations,
    /// Exhaustive sign-table searches against the line-product targets.
    KsSearch,
    /// Exact outcome-fraction table for all eight triple configurations.
    GhzTable,
    /// Exhaustive instruction-table search for the triple correlations.
    GhzInstructions,
    /// Pulsed source, routing, and threshold detection feeding the triple
    /// counts.
    GhzPipeline {
        /// Number of source pulses.
        #[arg(long)]
        n: Option<u64>,
        /// Also write a per-pulse event log (CSV) to this file.
        #[arg(long, value_name = "PATH")]
        events_out: Option<PathBuf>,
    },
    /// Exact rotation-order demonstrations.
    Demos {
        #[command(subcommand)]
        demo: Demo,
    },
}

#[derive(Subcommand)]
enum Demo {
    /// Axis images of two quarter turns under both composition conventions.
    Card,
    /// Plane-rotation overlaps for three half/quarter-turn mixtures.
    PlaneRotation,
    /// Direct versus sequential projection through a tilted intermediate
    /// axis.
    FilteringOrder {
        /// Tilt angle in radians, strictly between 0 and pi/2.
        #[arg(long)]
        theta: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0u8,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let started = Instant::now();
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let (output, default_format) = dispatch(&cli, &file)?;

    let rendered = match cli.format.unwrap_or(default_format) {
        Format::Json => output.json.render(),
        Format::Csv => output.table.render(),
    };
    for (path, contents) in &output.extra_files {
        std::fs::write(path, contents).with_context(|| format!("writing {path}"))?;
        eprintln!("# wrote {path}");
    }
    match &cli.out {
        Some(path) => {
            std::fs::write(path, &rendered)
                .with_context(|| format!("writing {}", path.display()))?;
            eprintln!("# wrote {}", path.display());
        }
        None => print!("{rendered}"),
    }
    eprintln!("# runtime_s={:.3}", started.elapsed().as_secs_f64());

    match output.check {
        Ok(()) => Ok(ExitCode::SUCCESS),
        Err(reason) => {
            eprintln!("self-check failed: {reason}");
            Ok(ExitCode::from(2))
        }
    }
}

/// Seed for experiments that consume no randomness: optional, recorded in
/// the output when present, never required.
fn optional_seed(experiment: &str, file: &FileConfig, flag: Option<u64>) -> Option<u64> {
    flag.or(file.section(experiment).seed).or(file.seed)
}

fn bell_angles(a: Option<[f64; 4]>) -> BellAngles<f64> {
    match a {
        Some([a, a_prime, b, b_prime]) => BellAngles {
            a,
            a_prime,
            b,
            b_prime,
        },
        None => BellAngles::standard(),
    }
}

fn dispatch(cli: &Cli, file: &FileConfig) -> anyhow::Result<(RunOutput, Format)> {
    use experiments as ex;
    let over = |n: Option<u64>, angles: Option<Angles4>| Overrides {
        seed: cli.seed,
        n,
        angles: angles.map(|a| a.0),
    };
    Ok(match &cli.command {
        Command::BellBoolean { n, angles } => {
            let r = resolve("bell-boolean", file, over(*n, *angles), Some(1_000_000))?;
            let out = ex::bell_boolean(r.seed, r.n.expect("default set"), bell_angles(r.angles));
            (out, Format::Json)
        }
        Command::BellVector { n, angles } => {
            let r = resolve("bell-vector", file, over(*n, *angles), Some(1_000_000))?;
            let out = ex::bell_vector(r.seed, r.n.expect("default set"), bell_angles(r.angles));
            (out, Format::Json)
        }
        Command::Sweep { steps } => {
            let seed = optional_seed("sweep", file, cli.seed);
            let steps = steps.or(file.section("sweep").steps).unwrap_or(16);
            anyhow::ensure!(steps >= 1, "steps must be at least 1");
            (ex::sweep(seed, steps), Format::Csv)
        }
        Command::Hom { n } => {
            let r = resolve("hom", file, over(*n, None), Some(10_000))?;
            (ex::hom(r.seed, r.n.expect("default set")), Format::Csv)
        }
        Command::Swap { n, steps, tol } => {
            let r = resolve("swap", file, over(*n, None), Some(120_000))?;
            let steps = steps.or(r.section.steps).unwrap_or(9);
            anyhow::ensure!(steps >= 2, "swap needs at least 2 grid points");
            let tol = tol.or(r.section.tol).unwrap_or(0.02);
            anyhow::ensure!(
                tol > 0.0 && tol < 1.0,
                "tol must lie strictly between 0 and 1"
            );
            let out = ex::swap(r.seed, r.n.expect("default set"), steps, tol);
            (out, Format::Csv)
        }
        Command::KsSquare => (
            ex::ks_square(optional_seed("ks-square", file, cli.seed)),
            Format::Json,
        ),
        Command::KsRotations => (
            ex::ks_rotations(optional_seed("ks-rotations", file, cli.seed)),
            Format::Json,
        ),
        Command::KsSearch => (
            ex::ks_search(optional_seed("ks-search", file, cli.seed)),
            Format::Json,
        ),
        Command::GhzTable => (
            ex::ghz_table(optional_seed("ghz-table", file, cli.seed)),
            Format::Csv,
        ),
        Command::GhzInstructions => (
            ex::ghz_instructions(optional_seed("ghz-instructions", file, cli.seed)),
            Format::Json,
        ),
        Command::GhzPipeline { n, events_out } => {
            let r = resolve("ghz-pipeline", file, over(*n, None), Some(100_000))?;
            let events = events_out
                .as_ref()
                .map(|p| p.display().to_string())
                .or_else(|| r.section.events_out.clone());
            let out = ex::ghz_pipeline(r.seed, r.n.expect("default set"), events);
            (out, Format::Csv)
        }
        Command::Demos { demo } => match demo {
            Demo::Card => (
                ex::demo_card(optional_seed("demo-card", file, cli.seed)),
                Format::Json,
            ),
            Demo::PlaneRotation => (
                ex::demo_plane_rotation(optional_seed("demo-plane-rotation", file, cli.seed)),
                Format::Json,
            ),
            Demo::FilteringOrder { theta } => {
                let seed = optional_seed("demo-filtering-order", file, cli.seed);
                let theta = theta
                    .or(file.section("demo-filtering-order").theta)
                    .unwrap_or(0.6);
                (ex::demo_filtering_order(seed, theta)?, Format::Json)
            }
        },
    })
}
