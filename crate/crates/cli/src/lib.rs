//! Command-line front end for `ss3-core`: classification, mass tables, group
//! oracles, the intersection atlas and the verification suites.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

pub mod cache;
pub mod commands;
pub mod report;
pub mod suites;

use cache::Cache;
use report::{Format, Report, Table};
use suites::Env;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Field(#[from] ss3_core::field_tower::FieldError),
    #[error(transparent)]
    Curve(#[from] ss3_core::fermat_curve::CurveError),
    #[error(transparent)]
    Stratum(#[from] ss3_core::strata::StratumError),
    #[error(transparent)]
    Mass(#[from] ss3_core::mass_formulas::MassError),
    #[error(transparent)]
    Group(#[from] ss3_core::group_oracle::GroupError),
    #[error(transparent)]
    Atlas(#[from] ss3_core::intersection_atlas::AtlasError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Parser)]
#[command(name = "ss3", version, about = "Mass strata and automorphism groups of supersingular abelian threefolds")]
pub struct Cli {
    /// Output format. CSV columns: `mass table` uses
    /// label,d,in_d,l_p,mass,index; `atlas` uses degree,points,in_delta,orbits_in_delta;
    /// every other command writes its check ledger as claim,expected,observed,match,flagged.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads (defaults to all cores). Reports do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for randomised samples.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Cache directory for enumerated groups.
    #[arg(long, global = true, env = "SS3_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Add wall-clock timings and cache status to the report.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    #[arg(long)]
    pub p: u64,
    /// Working field is `F_{p^{2m}}`.
    #[arg(long)]
    pub m: u32,
    /// The three coordinates of `t`: JSON elements, `gen^k`, `gen` or integers.
    #[arg(long, num_args = 3, required = true, allow_hyphen_values = true)]
    pub t: Vec<String>,
    /// The two coordinates of `u`.
    #[arg(long, num_args = 2, required = true, allow_hyphen_values = true)]
    pub u: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stratum, invariants and mass of a point `(t, u)`.
    Classify(PointArgs),
    /// Mass formulas.
    Mass {
        #[command(subcommand)]
        cmd: MassCmd,
    },
    /// Run a verification suite.
    Verify {
        #[command(subcommand)]
        suite: Suite,
    },
    /// Brute-force group oracles.
    Oracle {
        #[command(subcommand)]
        cmd: OracleCmd,
    },
    /// Automorphism group of an a-number one point by enumeration through `U(3, O)`.
    Aut(PointArgs),
    /// Census of `C ∩ Δ` by degree.
    Atlas {
        #[arg(long, default_value_t = 2)]
        p: u64,
        /// Highest degree scanned for `p > 2` (partial census).
        #[arg(long, default_value_t = 4)]
        max_degree: u32,
    },
    /// Explicit points of `C ∩ Δ` on conics.
    Witness {
        #[command(subcommand)]
        kind: WitnessKind,
    },
}

#[derive(Debug, Subcommand)]
pub enum MassCmd {
    /// Mass of every legal stratum label at `p`.
    Table {
        #[arg(long)]
        p: u32,
    },
}

#[derive(Debug, Subcommand)]
pub enum Suite {
    /// Point counts against the closed form.
    Counts {
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        max_i: Option<u32>,
    },
    Strata,
    Groups,
    Masses,
    Aut,
    /// Every suite.
    All,
}

#[derive(Debug, Subcommand)]
pub enum OracleCmd {
    /// `G_M` of a point, compared with its closed-form order.
    Group(PointArgs),
}

#[derive(Debug, Subcommand)]
pub enum WitnessKind {
    /// A point of degree `p+1`.
    Ml {
        #[arg(long)]
        p: u64,
    },
    /// A point of degree `2(p+1)`.
    Akio {
        #[arg(long)]
        p: u64,
    },
}

/// What a command produced before it is wrapped into a [`Report`].
#[derive(Debug, Default)]
pub struct Outcome {
    pub inputs: Value,
    pub results: Value,
    pub checks: Vec<report::Check>,
    pub table: Option<Table>,
}

/// Argument echo with the flags that must not influence the report removed.
pub fn canonical_command(args: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let (name, inline) = match a.split_once('=') {
            Some((n, _)) if a.starts_with("--") => (n, true),
            _ => (a.as_str(), false),
        };
        match name {
            "--threads" | "--cache-dir" | "--format" => {
                if !inline {
                    it.next();
                }
            }
            "--timing" => {}
            _ => out.push(a.clone()),
        }
    }
    out
}

pub fn execute(cli: &Cli, env: &Env) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Classify(a) => commands::classify(a),
        Command::Mass { cmd: MassCmd::Table { p } } => commands::mass_table(*p),
        Command::Verify { suite } => commands::verify(suite, env),
        Command::Oracle { cmd: OracleCmd::Group(a) } => commands::oracle_group(a),
        Command::Aut(a) => commands::aut(a, env),
        Command::Atlas { p, max_degree } => commands::atlas(*p, *max_degree),
        Command::Witness { kind } => commands::witness(kind),
    }
}

/// Runs a parsed command line inside a pool of the requested size.
pub fn run(cli: &Cli, argv: &[String]) -> Result<(Report, Option<Table>), CliError> {
    let env = Env::new(cli.seed, Cache::new(cli.cache_dir.clone()));
    let start = Instant::now();
    let outcome = match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(|| execute(cli, &env))?,
        None => execute(cli, &env)?,
    };
    let mut report = Report::new(canonical_command(argv), outcome.inputs, outcome.results, outcome.checks);
    if cli.timing {
        report.timing = Some(json!({
            "elapsed_ms": start.elapsed().as_millis() as u64,
            "cache": env.cache_log(),
        }));
    }
    Ok((report, outcome.table))
}
