//! Command-line front end. `run` parses arguments, executes one subcommand
//! and returns the process exit code: 0 when the analysis completed
//! (whatever the verdict), 2 on usage or input errors.

mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::numeric::ToleranceConfig;
use crate::states::Side;

pub use report::{FileInput, Inputs, ReportDocument};

#[derive(Debug, Parser)]
#[command(name = "mixloci", version, about = "Rank-degeneracy loci and mixing obstructions for bipartite states")]
pub struct Cli {
    /// Emit the JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Master seed for every randomized search.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Relative rank tolerance.
    #[arg(long = "tol-rank", global = true, value_name = "X")]
    pub tol_rank: Option<f64>,
    /// Absolute floor for rank thresholds.
    #[arg(long = "tol-floor", global = true, value_name = "X")]
    pub tol_floor: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact V^0 or sampled V^k of a state.
    Locus(LocusArgs),
    /// Look for a point ruling a component out of the target's mixtures.
    CheckMix(CheckMixArgs),
    /// Schmidt-rank caps from the exact V^0 on both sides.
    Bounds(BoundsArgs),
    /// Spectral majorization conditions.
    Majorize(MajorizeArgs),
    /// Monte-Carlo test of empty loci for random rank-r states.
    Genericity(GenericityArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "B", alias = "b")]
    B,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::A => Side::A,
            SideArg::B => Side::B,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KChoice {
    All,
    Level(usize),
}

impl FromStr for KChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(KChoice::All);
        }
        s.parse()
            .map(KChoice::Level)
            .map_err(|_| format!("expected a non-negative integer or \"all\", got {s:?}"))
    }
}

impl std::fmt::Display for KChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KChoice::All => f.write_str("all"),
            KChoice::Level(k) => write!(f, "{k}"),
        }
    }
}

#[derive(Debug, Args)]
pub struct LocusArgs {
    #[arg(long, value_name = "FILE")]
    pub state: PathBuf,
    #[arg(long, value_enum, default_value = "A")]
    pub side: SideArg,
    #[arg(long)]
    pub k: usize,
    /// Number of random starts for k ≥ 1.
    #[arg(long, default_value_t = 64)]
    pub starts: usize,
}

#[derive(Debug, Args)]
pub struct CheckMixArgs {
    #[arg(long, value_name = "FILE")]
    pub target: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub component: PathBuf,
    #[arg(long, value_enum, default_value = "A")]
    pub side: SideArg,
    /// Rank bound, or "all" to scan upward from 0.
    #[arg(long, default_value = "all")]
    pub k: KChoice,
    #[arg(long, default_value_t = 64)]
    pub starts: usize,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long, value_name = "FILE")]
    pub state: PathBuf,
}

#[derive(Debug, Args)]
pub struct MajorizeArgs {
    /// State whose spectrum is tested.
    #[arg(long, value_name = "FILE")]
    pub target: PathBuf,
    /// Probabilities of a pure-state decomposition, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        value_name = "LIST",
        allow_negative_numbers = true,
        conflicts_with_all = ["components", "weights"],
        required_unless_present = "components"
    )]
    pub p: Option<Vec<f64>>,
    /// Component state files, comma separated.
    #[arg(long, value_delimiter = ',', value_name = "FILES", requires = "weights")]
    pub components: Option<Vec<PathBuf>>,
    /// Mixing weights of the components, comma separated.
    #[arg(long, value_delimiter = ',', value_name = "LIST", allow_negative_numbers = true, requires = "components")]
    pub weights: Option<Vec<f64>>,
    /// Also test the spectra of both reduced states.
    #[arg(long, requires = "components")]
    pub reduced: bool,
}

#[derive(Debug, Args)]
pub struct GenericityArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub t: usize,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 64)]
    pub starts: usize,
}

/// Usage or input problem; reported on the error stream with exit code 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl<E: std::error::Error> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

fn tolerances(cli: &Cli) -> Result<ToleranceConfig, InputError> {
    let mut tol = ToleranceConfig::default();
    for (name, value, slot) in [
        ("--tol-rank", cli.tol_rank, &mut tol.rank_rel_tol),
        ("--tol-floor", cli.tol_floor, &mut tol.abs_floor),
    ] {
        if let Some(v) = value {
            if !(v.is_finite() && v > 0.0) {
                return Err(InputError(format!("{name} must be a positive number, got {v}")));
            }
            *slot = v;
        }
    }
    Ok(tol)
}

/// Runs the tool on an argument list (program name first).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
                return 0;
            }
            let _ = write!(err, "{text}");
            return 2;
        }
    };
    let report = tolerances(&cli).and_then(|tol| commands::execute(&cli, &tol));
    match report {
        Ok(doc) => {
            let text = if cli.json { doc.to_json() } else { doc.to_text() };
            let _ = writeln!(out, "{text}");
            0
        }
        Err(InputError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}
