//! `reset` command-line interface.
//!
//! Exit codes: 0 on success, 2 on configuration errors, 3 when a bound
//! check requested with `--assert-bounds` fails.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use reset_harness::config::{self, FileConfig, Overrides};
use reset_harness::report;
use reset_harness::run::run_experiment;
use reset_harness::HarnessError;
use reset_core::segtree::{dyadic_cover, sqrt_length_sum, Constants};

#[derive(Parser)]
#[command(name = "reset", about = "Switching-regret experiment harness", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play seeded runs and report regrets against their envelopes.
    Run(RunArgs),
    /// Print the maximal dyadic block decomposition of a segment.
    Decompose {
        /// Power-of-two horizon.
        #[arg(long = "T")]
        horizon: usize,
        /// First trial of the segment (1-based).
        #[arg(long)]
        from: usize,
        /// Last trial of the segment (inclusive).
        #[arg(long)]
        to: usize,
    },
    /// Print the envelope constants.
    Constants,
}

#[derive(Args)]
struct RunArgs {
    /// TOML config file; flags below override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Horizon (padded internally to a power of two).
    #[arg(long = "T")]
    horizon: Option<usize>,
    /// reset+hedge | reset+ogd | hedge | ogd
    #[arg(long)]
    algo: Option<String>,
    /// experts | quadratic
    #[arg(long)]
    env: Option<String>,
    /// Comma-separated segment lengths, e.g. 128,384,256,256.
    #[arg(long, value_delimiter = ',')]
    segments: Option<Vec<usize>>,
    #[arg(long)]
    seed: Option<u64>,
    /// Inclusive seed range k..m; one run per seed.
    #[arg(long)]
    seeds: Option<String>,
    /// Exit 3 if a measured regret exceeds its envelope.
    #[arg(long)]
    assert_bounds: bool,
    /// Write trace CSVs and report JSONs here.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Run(args) => run_command(args),
        Command::Decompose { horizon, from, to } => decompose_command(horizon, from, to),
        Command::Constants => {
            let k = Constants::new();
            println!("c     = {:.15}", k.c);
            println!("d     = {:.15}", k.d);
            println!("alpha = {:.15}", k.alpha);
            println!("xi    = {:.15}", k.xi);
            Ok(())
        }
    }
}

fn run_command(args: RunArgs) -> Result<(), HarnessError> {
    let file = match &args.config {
        Some(path) => config::load_file(path)?,
        None => FileConfig::default(),
    };
    let overrides = Overrides {
        algorithm: args.algo,
        env_kind: args.env,
        horizon: args.horizon,
        segments: args.segments,
        seed: args.seed,
        seeds: args.seeds,
        assert_bounds: args.assert_bounds,
        out_dir: args.out_dir,
    };
    let resolved = config::resolve(file, overrides)?;

    let mut first_violation: Option<HarnessError> = None;
    for &seed in &resolved.seeds {
        let mut config = resolved.template.clone();
        config.seed = seed;
        let outcome = run_experiment(&config)?;
        if let Some(dir) = &resolved.out_dir {
            report::persist(dir, seed, &outcome.csv, &outcome.report)?;
        }
        let r = &outcome.report;
        println!(
            "seed {seed:4}  {}  T={} switching_regret={:.6} envelope={:.6}{}",
            r.config.algorithm,
            r.config.requested_horizon,
            r.regrets.switching_true,
            r.envelopes.switching,
            match r.regrets.dynamic {
                Some(d) => format!(" dynamic_regret={d:.6}"),
                None => String::new(),
            }
        );
        if let Some(violation) = outcome.violation {
            println!(
                "{}",
                serde_json::to_string(&violation).expect("violation serializes")
            );
            first_violation.get_or_insert(HarnessError::BoundViolation(violation));
        }
    }
    match first_violation {
        Some(err) => Err(err),
        None => Ok(()),
    }
}

fn decompose_command(horizon: usize, from: usize, to: usize) -> Result<(), HarnessError> {
    let blocks = dyadic_cover(from, to, horizon)
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    println!("segment {from}..={to} of horizon {horizon}:");
    for v in &blocks {
        println!("  height {:2}  trials {:>6}..={:<6}  length {}", v.height, v.first, v.last, v.len());
    }
    let lengths: usize = blocks.iter().map(|v| v.len()).sum();
    let lhs = sqrt_length_sum(&blocks);
    let rhs = Constants::new().c * ((to - from + 1) as f64).sqrt();
    println!("blocks {}, total length {}", blocks.len(), lengths);
    println!(
        "sum sqrt(2^h) = {lhs:.12} <= c * sqrt(len) = {rhs:.12}: {}",
        if lhs <= rhs + 1e-12 { "OK" } else { "VIOLATED" }
    );
    Ok(())
}
