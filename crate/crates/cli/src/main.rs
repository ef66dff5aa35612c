mod commands;
mod failure;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{FuseArgs, RankArgs, SyntheticArgs, VerifyArgs};

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  1  verify-paper: at least one check failed
  2  input error: unreadable or malformed CSV/manifest (with line and column), mismatched shapes or labels, fewer than 2 experts or sources, unwritable output
  3  numeric degeneracy: constant or all-zero column, zero belief sum at a cell, zero average divergence, ...
  4  config error: unreadable config, unknown key, invalid parameter

Logging: set EVIDENTIAL_MAGDM_LOG (error, warn, info, debug, trace).";

/// Evidential multi-attribute group decision making: weight experts by the
/// divergence of their belief structures, fuse and rank.
#[derive(Parser)]
#[command(name = "evidential-magdm", version, after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON config file; unknown keys are rejected.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Directory for report files.
    #[arg(long, value_name = "DIR", default_value = "magdm-out")]
    out: PathBuf,
    /// Print the machine-readable JSON report on stdout.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Weight the experts and rank the alternatives. One CSV per expert; the
    /// file stem is the expert id, the first row names the attributes and
    /// the first column names the alternatives.
    #[command(after_help = EXIT_CODES)]
    Rank {
        #[arg(required = true, value_name = "CSV")]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        common: Common,
        /// Also write per-stage CSVs (memberships, masses, beliefs, ...).
        #[arg(long)]
        dump_intermediates: bool,
    },
    /// Weight feature sources, fuse them and score a nearest-centroid classifier.
    #[command(after_help = EXIT_CODES)]
    FuseFeatures {
        /// JSON manifest: {"sources": [csv paths], "config": {...}}.
        manifest: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Overrides the seed used for subsampling and the train/test split.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Recompute the bundled recruitment case and compare with the published tables.
    #[command(after_help = EXIT_CODES)]
    VerifyPaper {
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
        /// Also write verify.json and verify.md here.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Write the seeded synthetic three-source benchmark as CSVs and a manifest.
    Synthetic {
        #[arg(long, value_name = "DIR", default_value = "synthetic")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("EVIDENTIAL_MAGDM_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Rank {
            inputs,
            common,
            dump_intermediates,
        } => commands::rank(&RankArgs {
            inputs,
            config: common.config,
            out: common.out,
            json: common.json,
            dump_intermediates,
        }),
        Command::FuseFeatures { manifest, common, seed } => commands::fuse_features(&FuseArgs {
            manifest,
            config: common.config,
            out: common.out,
            json: common.json,
            seed,
        }),
        Command::VerifyPaper { config, out, json } => commands::verify(&VerifyArgs { config, out, json }),
        Command::Synthetic { out, seed } => commands::synthetic(&SyntheticArgs { out, seed }),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
