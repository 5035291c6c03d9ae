use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Largest prime bound accepted by `survey` and `report`.
pub const MAX_PRIME_BOUND: u64 = 1_000_000;

#[derive(Debug, Parser)]
#[command(
    name = "aperylike",
    version,
    about = "Exact computations and congruence checks for Apéry-like sequences"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Worker threads for parallel stages.
    #[arg(long, global = true, env = "APERY_WORKERS", value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Terms or residues of one sequence.
    Seq(SeqArgs),
    /// Check one congruence claim over a range of primes.
    Verify(VerifyArgs),
    /// Primes dividing no term, with proportion and running curve.
    Survey(SurveyArgs),
    /// Bounded search for eventual periodicity modulo m.
    Period(PeriodArgs),
    /// Constant terms of powers of a registered Laurent kernel.
    Ct(CtArgs),
    /// Registry summary with periodicity primes and census columns.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Recurrence,
    Sum,
}

#[derive(Debug, Args)]
pub struct SeqArgs {
    /// Sequence id (e.g. gamma, s18) or family (eta(1,1), apery(2,1), powersum(4)).
    #[arg(long)]
    pub id: String,

    /// Largest index.
    #[arg(long = "n", env = "APERY_N_MAX", default_value_t = 10)]
    pub n: u64,

    /// Reduce terms modulo this integer.
    #[arg(long = "mod", value_parser = clap::value_parser!(u64).range(1..))]
    pub modulus: Option<u64>,

    #[arg(long, value_enum, default_value_t = Method::Recurrence)]
    pub method: Method,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Claim {
    Lucas,
    Dwork,
    Dlp,
    Tlp,
    Pattern,
    Palindrome,
    Half,
    Third,
    EtaZero,
    Cooper,
    Gessel,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub claim: Claim,

    /// Sequence id or family (lucas, dwork, gessel).
    #[arg(long)]
    pub id: Option<String>,

    /// Primes to check; repeat or comma-separate.
    #[arg(long = "p", value_delimiter = ',')]
    pub primes: Vec<u64>,

    /// Check every applicable prime up to this bound when --p is absent.
    #[arg(long, default_value_t = 31)]
    pub p_max: u64,

    /// Largest index (defaults depend on the claim).
    #[arg(long, env = "APERY_N_MAX")]
    pub n_max: Option<u64>,

    /// Dwork exponent r.
    #[arg(long, default_value_t = 2)]
    pub r: u32,

    /// Dwork outer index bound.
    #[arg(long, default_value_t = 3)]
    pub m_max: u64,

    /// Index bound for DLP/TLP scans.
    #[arg(long, default_value_t = 100)]
    pub bound: u64,

    /// DLP candidate: binomial, double, trinomial, or product:r0,r1,...; TLP: shift.
    #[arg(long)]
    pub candidate: Option<String>,

    /// Named residue pattern, or "all".
    #[arg(long)]
    pub pattern: Option<String>,

    /// Exponents for eta-zero (default 1,2,3).
    #[arg(long, value_delimiter = ',')]
    pub a: Vec<u32>,
}

#[derive(Debug, Args)]
pub struct SurveyArgs {
    #[arg(long)]
    pub id: String,

    #[arg(long, env = "APERY_PRIME_BOUND", default_value_t = 10_000,
          value_parser = clap::value_parser!(u64).range(2..=MAX_PRIME_BOUND))]
    pub bound: u64,

    /// Also write the running proportion curve as CSV.
    #[arg(long)]
    pub curve: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PeriodArgs {
    #[arg(long)]
    pub id: String,

    #[arg(long = "mod", value_parser = clap::value_parser!(u64).range(2..))]
    pub modulus: u64,

    #[arg(long, env = "APERY_N_MAX", default_value_t = 2000)]
    pub n_max: u64,

    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_period: u64,
}

#[derive(Debug, Args)]
pub struct CtArgs {
    #[arg(long, default_value = "apery3")]
    pub kernel: String,

    /// Largest power.
    #[arg(long = "n", default_value_t = 12)]
    pub n: u64,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Prime bound for the proportion column.
    #[arg(long, env = "APERY_PRIME_BOUND", default_value_t = 10_000,
          value_parser = clap::value_parser!(u64).range(2..=MAX_PRIME_BOUND))]
    pub bound: u64,
}
