use clap::{Args, Parser, Subcommand};
use lpplab::experiments::{self, ExperimentConfig, ExperimentKind, SeedSpec};
use lpplab::WeightDistribution;
use std::path::PathBuf;
use std::process::ExitCode;

/// Seeded last-passage percolation experiments with CSV reports.
#[derive(Parser, Debug)]
#[command(name = "lpplab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Shape function estimates along a direction grid.
    Shape(Flags),
    /// Coalescence of stationary arrow paths in nested windows.
    Coalescence(Flags),
    /// Order violations of coupled stationary chains over an alpha grid.
    Monotone(Flags),
    /// Terminal-difference versus stationary cocycles at growing horizons.
    Uniqueness(Flags),
    /// Quantile-path identities on random trees and measures.
    Quantile(Flags),
    /// Exact identity suite; nonzero exit on any violation.
    Selftest(Flags),
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// Config file with `key = value` lines.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// First seed.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Number of seeds.
    #[arg(long, value_name = "K")]
    seeds: Option<u64>,
    /// Alpha values, comma separated.
    #[arg(long, value_name = "A", value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
    /// Box sides or scales, comma separated.
    #[arg(long, value_name = "N", value_delimiter = ',')]
    n: Option<Vec<u64>>,
    /// Weight distribution: exp, exp:R, geom:P, unif, twopoint:A:B:PA.
    #[arg(long, value_name = "NAME")]
    dist: Option<String>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

impl Command {
    fn split(self) -> (ExperimentKind, Flags) {
        match self {
            Command::Shape(f) => (ExperimentKind::Shape, f),
            Command::Coalescence(f) => (ExperimentKind::Coalescence, f),
            Command::Monotone(f) => (ExperimentKind::Monotone, f),
            Command::Uniqueness(f) => (ExperimentKind::Uniqueness, f),
            Command::Quantile(f) => (ExperimentKind::Quantile, f),
            Command::Selftest(f) => (ExperimentKind::Selftest, f),
        }
    }
}

fn build_config(kind: ExperimentKind, flags: Flags) -> lpplab::Result<ExperimentConfig> {
    let mut cfg = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| lpplab::Error::Config(format!("cannot read {}: {e}", path.display())))?;
            ExperimentConfig::parse(&text, Some(kind))?
        }
        None => ExperimentConfig::defaults(kind),
    };
    match (flags.seed, flags.seeds) {
        (None, None) => {}
        (Some(base), None) => cfg.seeds = SeedSpec::Range { base, count: 1 },
        (base, Some(count)) => {
            let base = base.unwrap_or_else(|| cfg.seeds.seeds().first().copied().unwrap_or(0));
            cfg.seeds = SeedSpec::Range { base, count };
        }
    }
    if let Some(a) = flags.alpha {
        cfg.alphas = a;
    }
    if let Some(n) = flags.n {
        cfg.sizes = n;
    }
    if let Some(d) = flags.dist {
        cfg.dist = WeightDistribution::parse(&d).map_err(|e| lpplab::Error::Config(e.to_string()))?;
    }
    if let Some(out) = flags.out {
        cfg.out_dir = out;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (kind, flags) = cli.command.split();
    let cfg = match build_config(kind, flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match experiments::run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match report.write_outputs(&cfg, &cfg.out_dir) {
        Ok((csv, manifest)) => {
            println!("wrote {} and {}", csv.display(), manifest.display());
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    println!("{}: {} rows, {} violations", report.experiment, report.rows.len(), report.violations);
    if report.violations > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
