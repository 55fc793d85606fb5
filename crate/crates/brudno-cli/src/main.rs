//! `brudno` — experiment runner for the complexity–entropy experiments in
//! the companion library. One TOML config describes one experiment; a run
//! writes CSV tables, an SVG chart, and a content-hashed `summary.json`, and
//! the exit status is the conjunction of the run's invariant verdicts.
//!
//! Exit codes: 0 every verdict passed, 1 at least one verdict failed,
//! 2 the config was rejected or the run errored.

mod artifacts;
mod config;
mod runner;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "brudno",
    version,
    about = "Finite-size complexity-vs-entropy experiments on symbolic sources and spin chains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a TOML config and write its artifacts.
    Run {
        /// Path to the experiment config.
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides the config's `out_dir` (default `out`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for the embarrassingly parallel stages.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Replace every configured RNG seed with values derived from K.
        #[arg(long, value_name = "K")]
        seed_override: Option<u64>,
    },
    /// Check a config and print diagnostics without running anything.
    Validate {
        /// Path to the experiment config.
        #[arg(long)]
        config: PathBuf,
    },
    /// List the example configs bundled with this binary.
    ListExamples,
}

const EXAMPLES: &[(&str, &str)] = &[
    (
        "classical-bernoulli",
        include_str!("../../../configs/classical-bernoulli.toml"),
    ),
    (
        "classical-markov",
        include_str!("../../../configs/classical-markov.toml"),
    ),
    (
        "quantum-brudno",
        include_str!("../../../configs/quantum-brudno.toml"),
    ),
    (
        "quantum-brudno-loose",
        include_str!("../../../configs/quantum-brudno-loose.toml"),
    ),
    (
        "encoding-selftest",
        include_str!("../../../configs/encoding-selftest.toml"),
    ),
    (
        "semimeasure-audit",
        include_str!("../../../configs/semimeasure-audit.toml"),
    ),
    (
        "semimeasure-audit-markov",
        include_str!("../../../configs/semimeasure-audit-markov.toml"),
    ),
];

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            out,
            jobs,
            seed_override,
        } => run(&config, out, jobs, seed_override),
        Command::Validate { config } => validate(&config),
        Command::ListExamples => {
            list_examples();
            ExitCode::SUCCESS
        }
    }
}

fn run(path: &Path, out: Option<PathBuf>, jobs: usize, seed_override: Option<u64>) -> ExitCode {
    let cfg = match config::load(path) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let diagnostics = config::validate(&cfg);
    if !diagnostics.is_empty() {
        eprintln!("config rejected ({}):", path.display());
        for d in &diagnostics {
            eprintln!("  {}: {}", d.field, d.message);
        }
        return ExitCode::from(2);
    }
    let out_dir = out
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));

    let artifacts = match runner::execute(&cfg, jobs, seed_override) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    for v in &artifacts.verdicts {
        println!(
            "[{}] {} — {}",
            v.name,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    match artifacts.write(&cfg, &out_dir) {
        Ok(summary) => {
            println!("summary: {}", summary.display());
            if artifacts.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn validate(path: &Path) -> ExitCode {
    let diagnostics = config::validate_file(path);
    if diagnostics.is_empty() {
        println!("ok: {} parses and validates", path.display());
        return ExitCode::SUCCESS;
    }
    println!("{} diagnostic(s) for {}:", diagnostics.len(), path.display());
    for d in &diagnostics {
        println!("  {}: {}", d.field, d.message);
    }
    ExitCode::from(1)
}

fn list_examples() {
    println!("bundled example configs (also in the repository's configs/ directory):\n");
    for (name, text) in EXAMPLES {
        match toml::from_str::<config::ExperimentConfig>(text) {
            Ok(cfg) => println!(
                "  {name:<22} {:<20} {}",
                cfg.kind.as_str(),
                cfg.description.as_deref().unwrap_or("")
            ),
            Err(_) => println!("  {name:<22} (unparseable)"),
        }
    }
    println!("\nrun one with: brudno run --config configs/<name>.toml --out <dir>");
}
