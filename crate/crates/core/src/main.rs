use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gwasym::check::Check;
use gwasym::cli::{self, Suite, TableMode};
use gwasym::config::{ConfigOverrides, RunConfig, ENV_CACHE_DIR, ENV_PRECISION};
use gwasym::invariants::Genus;

#[derive(Parser)]
#[command(name = "gwasym", version, about = "Enumerative invariants of the projective plane and their asymptotics")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// TOML file with run settings; flags and environment take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Working precision in bits.
    #[arg(long, global = true, env = ENV_PRECISION)]
    precision: Option<u32>,
    #[arg(long, global = true, env = ENV_CACHE_DIR)]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Degrees computed exactly.
    #[arg(long, global = true)]
    d_exact: Option<usize>,
    /// Degrees computed in floating point.
    #[arg(long, global = true)]
    d_float: Option<usize>,
    /// Starting point of the flow (must be <= -5).
    #[arg(long, global = true, allow_hyphen_values = true)]
    z_init: Option<f64>,
    #[arg(long, global = true)]
    taylor_order: Option<usize>,
    /// Number of expansion terms.
    #[arg(long, global = true)]
    terms: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute (or load from cache) a table of invariants and print its records.
    Invariants {
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
        genus: u8,
        #[arg(long)]
        dmax: usize,
        /// Exact rational entries (default).
        #[arg(long, conflicts_with = "scaled")]
        exact: bool,
        /// Floating-point entries stored as log plus mantissa.
        #[arg(long)]
        scaled: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Locate the singularity and extract expansion coefficients.
    Singularity {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the asymptotic expansions with the tables.
    Asympt,
    /// Run verification suites and print a JSON summary.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
    },
    /// Run everything and write a combined report.
    Report,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    All,
    Wdvv,
    Bounds,
    Asymptotics,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::All => Suite::All,
            SuiteArg::Wdvv => Suite::Wdvv,
            SuiteArg::Bounds => Suite::Bounds,
            SuiteArg::Asymptotics => Suite::Asymptotics,
        }
    }
}

impl GlobalArgs {
    fn run_config(&self) -> gwasym::Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply(&ConfigOverrides::from_file(path)?);
        }
        cfg.apply(&ConfigOverrides {
            precision_bits: self.precision,
            d_exact: self.d_exact,
            d_float: self.d_float,
            z_init: self.z_init,
            taylor_order: self.taylor_order,
            terms: self.terms,
            cache_dir: self.cache_dir.clone(),
            out_dir: self.out_dir.clone(),
            ..Default::default()
        });
        Ok(cfg)
    }
}

fn print_checks(checks: &[Check]) -> gwasym::Result<bool> {
    println!("{}", serde_json::to_string_pretty(&cli::checks_json(checks))?);
    Ok(checks.iter().all(|c| c.passed))
}

fn run(args: Cli) -> gwasym::Result<bool> {
    let cfg = args.global.run_config()?;
    match args.command {
        Command::Invariants {
            genus,
            dmax,
            scaled,
            out,
            ..
        } => {
            let mode = if scaled { TableMode::Scaled } else { TableMode::Exact };
            let text = cli::cmd_invariants(&cfg, Genus::from_index(genus)?, dmax, mode, out.as_deref())?;
            if out.is_none() {
                print!("{text}");
            }
            Ok(true)
        }
        Command::Singularity { out } => {
            let r = cli::cmd_singularity(&cfg, out.as_deref())?;
            print_checks(&r.checks)
        }
        Command::Asympt => print_checks(&cli::cmd_asympt(&cfg)?.checks),
        Command::Verify { suite } => print_checks(&cli::cmd_verify(&cfg, suite.into())?),
        Command::Report => {
            let passed = cli::cmd_report(&cfg)?;
            println!(
                "{}: report written to {}",
                if passed { "passed" } else { "failed" },
                cfg.out_dir.join("report.json").display()
            );
            Ok(passed)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
