mod commands;
mod config;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Nilrotation orbits, nice-set censuses and Bohr separation certificates.
#[derive(Parser, Debug)]
#[command(name = "nilsep", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Reduced orbit `g^a * base` over a set of exponents.
    Orbit(OrbitArgs),
    /// Count realized nice sets over a grid of group elements.
    NiceCensus(CensusArgs),
    /// Search for a rotation separating two integer sets.
    Separate(SeparateArgs),
    /// Partition `{r_n} ∪ {r_n + t_n}` into lacunary pieces and verify it.
    I0(I0Args),
    /// Region census of a polynomial arrangement.
    Regions(RegionsArgs),
    /// Lacunarity and sublacunarity of a set prefix.
    Classify(ClassifyArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// `key = value` file mirroring the long flags; flags win.
    #[arg(long)]
    pub config: Option<String>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Debug, Clone)]
pub struct SpecArgs {
    /// Registry name (`heisenberg`, `filiform`, `abelian<d>`) or a spec file.
    #[arg(long)]
    pub spec: String,
    /// Accept structure polynomials of total degree `k`.
    #[arg(long)]
    pub allow_degree_k: bool,
}

#[derive(Args, Debug)]
pub struct OrbitArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Generator, comma-separated rationals.
    #[arg(long, allow_hyphen_values = true)]
    pub g: String,
    /// Base point (default: the identity).
    #[arg(long, allow_hyphen_values = true)]
    pub base: Option<String>,
    /// Exponent set descriptor.
    #[arg(long)]
    pub set: String,
    /// Number of exponents to take from an infinite set.
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct CensusArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long)]
    pub set: String,
    /// `a..b` or a single `N`.
    #[arg(long = "N")]
    pub n: String,
    #[arg(long = "M", default_value = "1")]
    pub big_m: String,
    #[arg(long, default_value = "1/4")]
    pub eps: String,
    #[arg(long, default_value_t = 21)]
    pub res: usize,
    /// Also count at resolution `2 res - 1`.
    #[arg(long)]
    pub refine: bool,
    /// Test every subset against its complement for each `N <= 16`.
    #[arg(long)]
    pub cross_check: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct SeparateArgs {
    #[arg(long = "A")]
    pub a: String,
    /// Second set; not needed with `--F`.
    #[arg(long = "B")]
    pub b: Option<String>,
    /// Finite set `F`: certify `A + i` against `A + j` for `i < j` in `F`.
    #[arg(long = "F")]
    pub f: Option<String>,
    /// Evaluate this rotation instead of searching.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub dmax: usize,
    #[arg(long, default_value_t = 64)]
    pub den: u64,
    /// Seeded random rotations tried beyond `--den`.
    #[arg(long, default_value_t = 256)]
    pub random: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "1/16")]
    pub min_gap: String,
    #[arg(long, default_value_t = 1 << 20)]
    pub truncation: u64,
    /// Nilrotation mode: spec of the group carrying `--g`.
    #[arg(long)]
    pub spec: Option<String>,
    #[arg(long)]
    pub allow_degree_k: bool,
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<String>,
    #[arg(long)]
    pub eps: Option<String>,
    /// Prefix length of each set in nilrotation mode.
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct I0Args {
    #[arg(long, default_value = "pow2")]
    pub r: String,
    #[arg(long, default_value = "2n-1")]
    pub t: String,
    #[arg(long = "N", default_value_t = 20)]
    pub n: usize,
    #[arg(long, default_value = "1/2")]
    pub alpha: String,
    #[arg(long, default_value = "1/2")]
    pub eps: String,
    /// Also report the squared pairs `(r_n^2, (r_n + t_n)^2)`.
    #[arg(long)]
    pub square_lift: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct RegionsArgs {
    /// Polynomial in infix form; repeat for each member.
    #[arg(long, allow_hyphen_values = true)]
    pub poly: Vec<String>,
    /// Variable names (default `x`, `x,y`, `x,y,z`, else `x1..xm`).
    #[arg(long)]
    pub vars: Option<String>,
    /// `lo,hi` for every axis, or one pair for all.
    #[arg(long = "box", default_value = "-3,3", allow_hyphen_values = true)]
    pub bounds: String,
    /// Box dimension when `--box` gives a single pair.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Degree bound `b` (default: the largest degree).
    #[arg(long)]
    pub degree: Option<u32>,
    #[arg(long, default_value_t = 601)]
    pub res: usize,
    #[arg(long, default_value = "1/1000")]
    pub delta: String,
    /// Also count exactly (one variable only) and compare.
    #[arg(long)]
    pub exact: bool,
    /// Separability-equation mode: group spec.
    #[arg(long)]
    pub spec: Option<String>,
    #[arg(long)]
    pub allow_degree_k: bool,
    #[arg(long)]
    pub set: Option<String>,
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long = "M", default_value = "1")]
    pub big_m: String,
    #[arg(long, default_value = "1/4")]
    pub eps: String,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub set: String,
    #[arg(long = "N", default_value_t = 50)]
    pub n: usize,
    #[arg(long, default_value_t = nilsep::nice::SUBLACUNARY_THRESHOLD)]
    pub threshold: f64,
    #[command(flatten)]
    pub common: Common,
}

fn main() -> ExitCode {
    let args = match config::merge(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command) {
        Ok(commands::Status::Ok) => ExitCode::SUCCESS,
        Ok(commands::Status::PropertyFailed(why)) => {
            eprintln!("property check failed: {why}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
