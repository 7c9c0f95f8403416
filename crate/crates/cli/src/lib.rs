//! Command-line front end for `csum-core`.
//!
//! [`run`] parses an argument vector, dispatches to the library and writes
//! the report to the given streams, returning the process exit code:
//! 0 on success, 1 when the brute-force and fast sums disagree, 2 on
//! usage or domain errors.

mod plot;
mod report;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use csum_core::scan::QRange;
use csum_core::{Convention, Error, FractionInput, Rational, SideFilter};

pub use plot::{render_lattice_svg, PLOT_MAX_Q};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "csum",
    version,
    about = "Exact congruence sums S(a/q) and their continued-fraction structure"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Report format; each subcommand accepts a subset.
    #[arg(long, global = true, value_enum)]
    pub output: Option<OutputFormat>,
    /// Write the report to this file instead of stdout.
    #[arg(long = "out", global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Continued-fraction length convention.
    #[arg(long, global = true, value_enum, default_value_t = ConventionArg::Last2)]
    pub convention: ConventionArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Brute,
    Fast,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    /// Last partial quotient at least 2.
    Last2,
    /// Last partial quotient equal to 1.
    Last1,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Last2 => Convention::LastAtLeastTwo,
            ConventionArg::Last1 => Convention::LastEqualsOne,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Below,
    Above,
    Both,
}

impl From<SideArg> for SideFilter {
    fn from(s: SideArg) -> Self {
        match s {
            SideArg::Below => SideFilter::Below,
            SideArg::Above => SideFilter::Above,
            SideArg::Both => SideFilter::Both,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// S(a/q).
    Sum {
        #[arg(allow_hyphen_values = true)]
        fraction: String,
        #[arg(long, value_enum, default_value_t = Method::Fast)]
        method: Method,
    },
    /// Best approximations below a/q with their weights.
    Terms {
        #[arg(allow_hyphen_values = true)]
        fraction: String,
    },
    /// Continued fraction of a/q, or the value of "[b0;b1,...]".
    Cf {
        #[arg(allow_hyphen_values = true)]
        input: String,
    },
    /// Continued fraction of -q/a.
    Neg {
        #[arg(allow_hyphen_values = true)]
        fraction: String,
    },
    /// Convergent and semi-convergent candidates with the solutions of
    /// |a/q - c/d| < 1/d^2 among them.
    Approx {
        #[arg(allow_hyphen_values = true)]
        fraction: String,
        #[arg(long, value_enum, default_value_t = SideArg::Both)]
        side: SideArg,
    },
    /// Reciprocity residuals E+ and E- for 1 <= a < q.
    Reciprocity {
        #[arg(allow_hyphen_values = true)]
        fraction: String,
    },
    /// Coprime two-sided count against the approximation count.
    Ard {
        #[arg(allow_hyphen_values = true)]
        fraction: String,
    },
    /// Per-pair decomposition and residuals over a range of moduli.
    Scan {
        #[arg(long = "q-range", value_name = "LO..HI")]
        q_range: String,
        #[arg(long)]
        primes_only: bool,
        #[arg(long, conflicts_with_all = ["sample", "seed"])]
        all_a: bool,
        /// Residues sampled per modulus, without replacement.
        #[arg(long, requires = "seed")]
        sample: Option<usize>,
        #[arg(long, requires = "sample")]
        seed: Option<u64>,
    },
    /// Mean and maximum of S over reduced residues, per modulus.
    Average {
        #[arg(long = "q-range", value_name = "LO..HI")]
        q_range: String,
        #[arg(long)]
        primes_only: bool,
    },
    /// A fraction near x whose normalized sum S / ln^kappa(2 + q) is near y.
    Density {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long)]
        y: f64,
        #[arg(long)]
        kappa: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        max_m: Option<u64>,
    },
    /// SVG of the points (m, a m mod q) with those under m n = q flagged.
    Plot {
        #[arg(allow_hyphen_values = true)]
        fraction: String,
    },
}

/// Failure modes of a command, mapped onto exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Mismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

pub(crate) type CmdResult = std::result::Result<String, Failure>;

pub(crate) fn parse_fraction(s: &str) -> std::result::Result<(FractionInput, Rational), Failure> {
    let input: FractionInput = s.parse()?;
    let x = input.to_coprime()?;
    Ok((input, x))
}

pub(crate) fn parse_range(s: &str) -> std::result::Result<QRange, Failure> {
    Ok(s.parse()?)
}

/// Runs the command line `args` (including the program name), writing
/// the report to `out` (or `--out`) and diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    match report::dispatch(&cli) {
        Ok(text) => match &cli.common.out {
            Some(path) => match std::fs::write(path, text.as_bytes()) {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
                    EXIT_USAGE
                }
            },
            None => match out.write_all(text.as_bytes()) {
                Ok(()) => EXIT_OK,
                Err(_) => EXIT_USAGE,
            },
        },
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Mismatch(msg)) => {
            let _ = writeln!(err, "internal error: {msg}");
            EXIT_MISMATCH
        }
    }
}

/// [`run`] with both streams captured: `(exit code, stdout, stderr)`.
pub fn run_captured<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(args, &mut out, &mut err);
    (
        code,
        String::from_utf8_lossy(&out).into_owned(),
        String::from_utf8_lossy(&err).into_owned(),
    )
}
