//! `irisval` command-line front end.
//!
//! Exit codes: 0 success, 1 selftest check failed, 2 usage or input error,
//! 3 empty result, 4 insufficient data.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod selftest;

pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_EMPTY: u8 = 3;
pub const EXIT_INSUFFICIENT: u8 = 4;

/// Iris-code biometrics: preprocessing, encoding, matching campaigns,
/// uniqueness screening and pigmentation analysis.
#[derive(Debug, Parser)]
#[command(name = "irisval", version, about)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Seed for every random choice [default: 0, or the config file value]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses one per core
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Output directory
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Log more (repeat for debug output)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Turn a directory of iris-on-black images into a dataset with
    /// rotations, hole-punched variants and a JSON-lines manifest
    Preprocess(commands::PreprocessArgs),
    /// Segment and encode images into 4058-byte `.icode` files
    Encode(commands::EncodeArgs),
    /// Authentic/imposter distributions and the FAR/FRR threshold sweep
    Validate(commands::ValidateArgs),
    /// Check candidate codes for uniqueness against a reference set
    Screen(commands::ScreenArgs),
    /// Palette composition, ILR, PCA and distance histograms
    Coloranalysis(commands::ColorArgs),
    /// Cross-check the fast algorithms against brute-force oracles
    Selftest(selftest::SelftestArgs),
}

/// A command failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

impl From<irisval::Error> for Failure {
    fn from(e: irisval::Error) -> Self {
        let code = match e {
            irisval::Error::InsufficientData(_) => EXIT_INSUFFICIENT,
            _ => EXIT_USAGE,
        };
        Self::new(code, e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.global.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).parse_default_env().init();
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.global.threads).build_global() {
        log::warn!("thread pool: {e}");
    }
    let g = &cli.global;
    let result = match &cli.command {
        Command::Preprocess(a) => commands::preprocess(g, a),
        Command::Encode(a) => commands::encode(g, a),
        Command::Validate(a) => commands::validate(g, a),
        Command::Screen(a) => commands::screen(g, a),
        Command::Coloranalysis(a) => commands::coloranalysis(g, a),
        Command::Selftest(a) => selftest::run(g, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
