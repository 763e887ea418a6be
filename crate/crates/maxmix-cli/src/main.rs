//! `maxmix` — simulate spatial max-mixture processes, fit them by censored
//! pairwise likelihood, and test the mixing coefficient.

mod commands;
mod config;
mod stations;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "maxmix",
    version,
    about = "Spatial max-stable / max-mixture processes: simulation, censored pairwise likelihood fits, and tests on the mixing coefficient"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Flat key=value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed (overrides the config key).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (overrides the config key; default: all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override any config key, e.g. --set k=25.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a model at uniformly sampled sites and write data + sites CSVs.
    Simulate(CommonArgs),
    /// Fit a model to a data/sites pair; emits the fit, Godambe standard errors and CLIC.
    Fit(FitArgs),
    /// Z and LR tests of H0: a = a0 on a data/sites pair.
    Test(TestArgs),
    /// Monte-Carlo power study: simulate, fit and test J replicates; resumable.
    Power(CommonArgs),
    /// Station-data pipeline: GEV margins, diagnostics, model menu, group tests.
    Analyze(AnalyzeArgs),
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Data CSV written by `simulate` (with its .meta sidecar).
    #[arg(long)]
    data: PathBuf,
    /// Sites CSV.
    #[arg(long)]
    sites: PathBuf,
    /// Fit GEV margins per site and transform to unit Fréchet first.
    #[arg(long)]
    gev_transform: bool,
    /// Skip the Godambe/CLIC step (fit only).
    #[arg(long)]
    no_godambe: bool,
}

#[derive(Args)]
struct TestArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    sites: PathBuf,
    /// Null value(s): single number, comma list, or start:end:step.
    #[arg(long)]
    a0: String,
    /// Fit GEV margins per site and transform to unit Fréchet first.
    #[arg(long)]
    gev_transform: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Station table CSV: id,lon,lat[,altitude].
    #[arg(long)]
    stations: PathBuf,
    /// Long-format daily series CSV: date,station,value.
    #[arg(long)]
    series: PathBuf,
    /// File with one group-A station id per line; the rest form group B.
    #[arg(long)]
    group_a: PathBuf,
}

fn init_runtime(common: &CommonArgs, cfg: &config::Config) -> Result<u64> {
    let workers = match common.workers {
        Some(w) => w,
        None => cfg.usize_or("workers", 0)?,
    };
    if workers > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(workers).build_global().ok();
    }
    let seed = match common.seed {
        Some(s) => s,
        None => cfg.u64_or("seed", 1)?,
    };
    Ok(seed)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Simulate(common) => {
            let cfg = config::Config::load(common.config.as_deref(), &common.overrides)?;
            let seed = init_runtime(&common, &cfg)?;
            commands::simulate::run(&cfg, seed, &common.out)
        }
        Command::Fit(args) => {
            let cfg = config::Config::load(args.common.config.as_deref(), &args.common.overrides)?;
            let seed = init_runtime(&args.common, &cfg)?;
            commands::fit::run(
                &cfg,
                seed,
                &args.common.out,
                &args.data,
                &args.sites,
                args.gev_transform,
                args.no_godambe,
            )
        }
        Command::Test(args) => {
            let cfg = config::Config::load(args.common.config.as_deref(), &args.common.overrides)?;
            let seed = init_runtime(&args.common, &cfg)?;
            commands::test::run(
                &cfg,
                seed,
                &args.common.out,
                &args.data,
                &args.sites,
                &args.a0,
                args.gev_transform,
            )
        }
        Command::Power(common) => {
            let cfg = config::Config::load(common.config.as_deref(), &common.overrides)?;
            let seed = init_runtime(&common, &cfg)?;
            commands::power::run(&cfg, seed, &common.out)
        }
        Command::Analyze(args) => {
            let cfg = config::Config::load(args.common.config.as_deref(), &args.common.overrides)?;
            let seed = init_runtime(&args.common, &cfg)?;
            commands::analyze::run(
                &cfg,
                seed,
                &args.common.out,
                &args.stations,
                &args.series,
                &args.group_a,
            )
        }
    }
}
