use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use cmcsplit_cli::campaign;
use cmcsplit_cli::config::{config_error, Campaign, CampaignConfig, ConfigError};
use cmcsplit_cli::fixture::{shrink, Fixture};
use cmcsplit_cli::report::render_human;

/// Output directory override; the only environment variable read.
const OUT_ENV: &str = "CMCSPLIT_OUT";

#[derive(Parser)]
#[command(
    name = "cmcsplit",
    version,
    about = "Exact verification campaigns for support projections and equivariant splittings"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Check u_Σ on convex subcomplexes.
    VerifySupportProjection(RunArgs),
    /// Check α, π, telescoping and π̄ on the level system.
    RunResolution(RunArgs),
    /// Build equivariant sections of random extensions.
    RunSplitting(RunArgs),
    /// Build equivariant retractions of random extensions.
    RunRetraction(RunArgs),
    /// Search random non-convex subcomplexes for failing identities.
    Fuzz(RunArgs),
    /// Minimise a failing fixture.
    Shrink {
        fixture: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the trial count in the config.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    expect_bad_characteristic: bool,
}

fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("cmcsplit-out"))
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn run_campaign(kind: Campaign, args: RunArgs) -> anyhow::Result<u8> {
    let mut cfg = CampaignConfig::load(&args.config)?;
    if cfg.campaign != kind {
        return Err(config_error(format!(
            "{}: campaign = {:?} does not match the verb",
            args.config.display(),
            cfg.campaign
        )));
    }
    if let Some(s) = args.seed {
        cfg.seed = Some(s);
    }
    if let Some(n) = args.trials {
        cfg.trials = n;
    }
    cfg.expect_bad_characteristic |= args.expect_bad_characteristic;
    let out = out_dir(args.out);
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let start = Instant::now();
    let report = campaign::run(&cfg, Some(&out))?;
    let elapsed = start.elapsed();
    let human = render_human(&report);
    write(&out.join("report.json"), &report.to_json())?;
    write(&out.join("report.txt"), &human)?;
    write(
        &out.join("timing.json"),
        &format!("{{\"elapsed_ms\": {}}}\n", elapsed.as_millis()),
    )?;
    print!("{human}");
    println!("elapsed      {:.2}s", elapsed.as_secs_f64());
    println!("written to   {}", out.display());
    Ok(report.exit_code())
}

fn run_shrink(fixture: &Path, out: Option<PathBuf>) -> anyhow::Result<u8> {
    let f = Fixture::load(fixture)?;
    let m = shrink(&f)?;
    let out = out_dir(out);
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let target = out.join("minimized.json");
    m.save(&target)?;
    println!(
        "cells        {} -> {}",
        f.subcomplex.len(),
        m.subcomplex.len()
    );
    println!("subcomplex   {}", m.subcomplex);
    println!(
        "failing      {}",
        if m.failing.is_empty() {
            "none".to_string()
        } else {
            m.failing.join(", ")
        }
    );
    println!("gap cells    {:?}", m.gap_cells());
    println!("written to   {}", target.display());
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.verb {
        Verb::VerifySupportProjection(a) => run_campaign(Campaign::SupportProjection, a),
        Verb::RunResolution(a) => run_campaign(Campaign::Resolution, a),
        Verb::RunSplitting(a) => run_campaign(Campaign::Splitting, a),
        Verb::RunRetraction(a) => run_campaign(Campaign::Retraction, a),
        Verb::Fuzz(a) => run_campaign(Campaign::Fuzz, a),
        Verb::Shrink { fixture, out } => run_shrink(&fixture, out),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) if e.downcast_ref::<ConfigError>().is_some() => {
            eprintln!("{e:#}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
