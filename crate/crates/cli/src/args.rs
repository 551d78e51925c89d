use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "regseq",
    version,
    about = "Certified pairwise-coprime and even blocks in floor(f(n)) sequences"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every subcommand; each may also come from the config file.
#[derive(Debug, Default, Args)]
pub struct Common {
    /// Function, e.g. "3/4*x^(5/3) - 2*x + 7"
    #[arg(long, global = true)]
    pub spec: Option<String>,
    /// Largest working precision in bits (at most 32768)
    #[arg(long = "precision-cap", global = true)]
    pub precision_cap: Option<u32>,
    #[arg(long, global = true, value_enum)]
    pub mode: Option<Mode>,
    /// Further primes tried after a missed window (at most 100)
    #[arg(long, global = true)]
    pub retries: Option<u32>,
    /// Candidate indices a scan may examine
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub output: Option<OutputFormat>,
    /// Emit one JSON line per proof stage on stderr
    #[arg(long, global = true)]
    pub trace: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Strict,
    Relaxed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
    Human,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Coprime,
    Even,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Floors and fractional parts of f, f' and f'' at n
    Eval {
        #[arg(long)]
        n: Option<String>,
        /// Inclusive range a..b instead of a single n
        #[arg(long)]
        range: Option<String>,
        /// Only this derivative (0, 1 or 2)
        #[arg(long)]
        derivative: Option<usize>,
    },
    /// Hypothesis report and coprimality certificate at (n, H)
    Verify {
        #[arg(long)]
        n: String,
        #[arg(long = "H")]
        h: u64,
    },
    /// Witness for L pairwise-coprime consecutive floors
    Seek {
        #[arg(long = "L")]
        l: u64,
    },
    /// Run of at least H consecutive even floors
    Even {
        #[arg(long = "H")]
        h: u64,
    },
    /// Pairwise-coprime index set built round by round
    Density {
        /// Strictly increasing block sizes, e.g. 2,3,4
        #[arg(long, value_delimiter = ',', required = true)]
        schedule: Vec<u64>,
    },
    /// Every n in a range whose floors at n..=n+H qualify
    Scan {
        #[arg(long = "H")]
        h: usize,
        #[arg(long)]
        range: String,
        #[arg(long, value_enum, default_value = "coprime")]
        kind: Kind,
        #[arg(long)]
        chunk: Option<usize>,
    },
    /// Largest pairwise-coprime subset of a, ..., a + len - 1
    Oracle {
        #[arg(long)]
        a: String,
        #[arg(long)]
        len: usize,
    },
}
