use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use slglue::config::{load_config_with, parse_config_with, Overrides, Suite, OUT_ENV};
use slglue::report::table;
use slglue::suites::run_and_emit;

/// Verification suites for the glued branched special Lagrangian construction.
#[derive(Parser)]
#[command(name = "slglue", version)]
struct Cli {
    #[command(subcommand)]
    suite: Command,
    /// key = value configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// output directory for the curves, summary and table files
    #[arg(long, global = true, env = OUT_ENV)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// largest t of the grid is 2^-K
    #[arg(long, global = true, value_name = "K")]
    t_min_exp: Option<u32>,
    /// smallest t of the grid is 2^-K
    #[arg(long, global = true, value_name = "K")]
    t_max_exp: Option<u32>,
    #[arg(long, global = true, value_name = "X")]
    quad_tol: Option<f64>,
    #[arg(long, global = true, value_name = "X")]
    fit_tol: Option<f64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// flat-model identities and the Hamiltonian flow neighbourhood
    FlatIdentities,
    /// cutoff construction
    Gluing,
    /// phase norms on P and Q against the exponent tables
    PhaseNorms,
    /// scaling of the perturbation criteria
    Criteria,
    /// partition function norms and the quasi-isometry estimate
    SobolevPartition,
    /// eigenvalue comparison, Poincare bound and reference problems
    Spectral,
    /// exploratory Sobolev constant probe
    SobolevProbe,
    /// every suite in turn
    All,
}

impl From<Command> for Suite {
    fn from(c: Command) -> Suite {
        match c {
            Command::FlatIdentities => Suite::FlatIdentities,
            Command::Gluing => Suite::Gluing,
            Command::PhaseNorms => Suite::PhaseNorms,
            Command::Criteria => Suite::Criteria,
            Command::SobolevPartition => Suite::SobolevPartition,
            Command::Spectral => Suite::Spectral,
            Command::SobolevProbe => Suite::SobolevProbe,
            Command::All => Suite::All,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let o = Overrides {
        suite: Some(cli.suite.into()),
        out_dir: cli.out,
        seed: cli.seed,
        t_min_exp: cli.t_min_exp,
        t_max_exp: cli.t_max_exp,
        quad_tol: cli.quad_tol,
        fit_tol: cli.fit_tol,
    };
    let cfg = match &cli.config {
        Some(p) => load_config_with(p, &o),
        None => parse_config_with("", &o),
    };
    let cfg = match cfg {
        Ok(c) => c,
        Err(e) => {
            eprintln!("slglue: {e}");
            return ExitCode::from(2);
        }
    };
    let rep = match run_and_emit(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("slglue: {e}");
            return ExitCode::from(2);
        }
    };
    print!("{}", table(&rep));
    eprintln!("reports written to {}", cfg.out_dir.display());
    if rep.failed() {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
