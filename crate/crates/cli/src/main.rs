//! `hardfactor`: encode factoring instances, profile and calibrate them,
//! and train annealing schedules.

mod commands;
mod config;
mod workspace;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use config::RunConfig;

#[derive(Parser)]
#[command(name = "hardfactor", version, about = "Factoring instances as annealing problems")]
struct Cli {
    /// Master seed for every stochastic stage.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// JSON run configuration; flags given on the command line take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
pub struct ClassArgs {
    /// Qubit count of the size class.
    #[arg(long)]
    pub qubits: Option<usize>,
    /// Inclusive range of candidate numbers, e.g. 49..633.
    #[arg(long)]
    pub range: Option<String>,
    /// Block width.
    #[arg(long)]
    pub width: Option<usize>,
    /// Admit `semiprime` or `odd_composite` numbers.
    #[arg(long)]
    pub filter: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Build QUBO/Ising encodings and write the class manifest.
    Encode {
        /// Encode these numbers instead of a range.
        #[arg(long = "n", num_args = 1..)]
        numbers: Vec<u64>,
        #[command(flatten)]
        class: ClassArgs,
    },
    /// Simulated-annealing hardness per instance.
    Profile {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        beta0: Option<f64>,
    },
    /// Smallest total time at which the quadratic schedule reaches the threshold.
    Calibrate {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Split a class into easy and hard instances.
    Classify {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Train a schedule on the hard set with soft actor-critic.
    Train {
        #[command(flatten)]
        class: ClassArgs,
        /// R1 .. R5
        #[arg(long)]
        reward: Option<String>,
        #[arg(long)]
        episodes: Option<usize>,
        /// Continue the run in the output directory from its checkpoint.
        #[arg(long)]
        resume: bool,
    },
    /// Train on a new class starting from another run's checkpoint.
    Transfer {
        #[command(flatten)]
        class: ClassArgs,
        /// Source checkpoint.
        #[arg(long)]
        from: PathBuf,
        /// actor, critic, both or schedule
        #[arg(long, default_value = "both")]
        mode: String,
        #[arg(long)]
        reward: Option<String>,
        #[arg(long)]
        episodes: Option<usize>,
    },
    /// Per-instance success of a schedule over a class.
    Evaluate {
        #[command(flatten)]
        class: ClassArgs,
        /// `linear`, `quadratic`, `zeros`, or a schedule / checkpoint JSON file.
        #[arg(long)]
        schedule: String,
        /// Output subdirectory name; derived from the schedule when absent.
        #[arg(long)]
        label: Option<String>,
        #[arg(long)]
        bins: Option<usize>,
    },
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    config::overlay(&mut cfg.seed, cli.seed);
    config::overlay(&mut cfg.out, cli.out);
    if cli.workers.is_some() {
        cfg.workers = cli.workers;
    }
    if let Some(n) = cfg.workers {
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global()?;
    }
    match cli.command {
        Command::Encode { numbers, class } => commands::encode(cfg, &numbers, &class),
        Command::Profile { class, runs, beta0 } => {
            config::overlay(&mut cfg.profile.runs, runs);
            config::overlay(&mut cfg.profile.beta0, beta0);
            commands::profile(cfg, &class)
        }
        Command::Calibrate { class, threshold } => {
            config::overlay(&mut cfg.calibrate.threshold, threshold);
            commands::calibrate(cfg, &class)
        }
        Command::Classify { class, threshold } => commands::classify(cfg, &class, threshold),
        Command::Train {
            class,
            reward,
            episodes,
            resume,
        } => {
            commands::overlay_train(&mut cfg, reward.as_deref(), episodes)?;
            commands::train(cfg, &class, resume)
        }
        Command::Transfer {
            class,
            from,
            mode,
            reward,
            episodes,
        } => {
            commands::overlay_train(&mut cfg, reward.as_deref(), episodes)?;
            commands::transfer(cfg, &class, &from, mode.parse()?)
        }
        Command::Evaluate {
            class,
            schedule,
            label,
            bins,
        } => {
            config::overlay(&mut cfg.evaluate.bins, bins);
            commands::evaluate(cfg, &class, &schedule, label)
        }
    }
}
