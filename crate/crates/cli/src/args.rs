use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "apdivisor", version, about = "Zero sets of entire functions with almost periodic modulus")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a divisor against a group of conditions and write a JSON report.
    Check {
        #[command(flatten)]
        common: Common,
        /// Condition group: 3 one-sided bound, 4 two-sided bound, 5 and 6 add the almost-periodicity test.
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u8).range(3..=6))]
        theorem: u8,
    },
    /// Evaluate V, the symmetric product and the genus-one product on a grid (CSV).
    Eval {
        #[command(flatten)]
        common: Common,
        /// Exponential factor of the product.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        nu: f64,
        /// Constant term of the product.
        #[arg(long = "log-c", default_value_t = 0.0, allow_negative_numbers = true)]
        log_c: f64,
        /// Average each value over truncations R and R sqrt 2.
        #[arg(long)]
        averaged: bool,
    },
    /// Search for joint epsilon-periods of convolutions with test functions (JSON).
    Ap {
        #[command(flatten)]
        common: Common,
        /// Test functions, e.g. "hat:0.4,bump:0.8".
        #[arg(long)]
        family: Option<String>,
        /// Also write the sampled convolutions as CSV.
        #[arg(long)]
        samples: Option<PathBuf>,
    },
    /// Growth indicators, limit density and shape of the limit function (JSON).
    Azarin {
        #[command(flatten)]
        common: Common,
    },
    /// Index the divisor as d k + psi(k) and check boundedness of S_n (JSON).
    Kl {
        #[command(flatten)]
        common: Common,
        /// Largest |n|.
        #[arg(long, default_value_t = apdivisor::criteria::DEFAULT_SN_WINDOW)]
        window: i64,
        /// Track Re S_n only.
        #[arg(long)]
        real_only: bool,
    },
    /// Check a 1-periodic divisor, given as a period-strip spec or a divisor file (JSON).
    Periodic {
        #[command(flatten)]
        common: Common,
        /// Period-strip spec: {"gammas": [...], "nu": .., "logC": ..}.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Also scan log|F(z+1)| - log|F(z)| over the grid.
        #[arg(long)]
        scan: bool,
    },
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Divisor file (JSON).
    #[arg(long)]
    pub divisor: Option<PathBuf>,
    /// Output file; standard output if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Truncation radius.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Rectangular grid "x0:x1:nx,y0:y1:ny".
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    pub grid: Option<GridSpec>,
    /// Override a tolerance or numeric setting, NAME=VAL; repeatable.
    #[arg(long = "tol", value_parser = parse_tol, allow_hyphen_values = true)]
    pub tol: Vec<(String, f64)>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Suppress the summary line on standard error.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x: (f64, f64, usize),
    pub y: (f64, f64, usize),
}

fn parse_axis(text: &str) -> anyhow::Result<(f64, f64, usize)> {
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        bail!("axis '{text}' is not lo:hi:n");
    };
    let lo: f64 = a.trim().parse().with_context(|| format!("bad number '{a}'"))?;
    let hi: f64 = b.trim().parse().with_context(|| format!("bad number '{b}'"))?;
    let n: usize = n.trim().parse().with_context(|| format!("bad count '{n}'"))?;
    if !lo.is_finite() || !hi.is_finite() || hi < lo {
        bail!("axis '{text}' needs finite lo <= hi");
    }
    if n == 0 || (n == 1 && hi != lo) {
        bail!("axis '{text}' needs n >= 1, and n = 1 only when lo = hi");
    }
    Ok((lo, hi, n))
}

pub fn parse_grid(text: &str) -> Result<GridSpec, String> {
    let (x, y) = text.split_once(',').ok_or_else(|| format!("grid '{text}' is not x0:x1:nx,y0:y1:ny"))?;
    Ok(GridSpec { x: parse_axis(x).map_err(|e| e.to_string())?, y: parse_axis(y).map_err(|e| e.to_string())? })
}

fn parse_tol(text: &str) -> Result<(String, f64), String> {
    let (name, value) = text.split_once('=').ok_or_else(|| format!("'{text}' is not NAME=VAL"))?;
    let value: f64 = value.trim().parse().map_err(|_| format!("'{value}' is not a number"))?;
    if !value.is_finite() {
        return Err(format!("{name} must be finite"));
    }
    Ok((name.trim().to_string(), value))
}

/// `--tol` overrides, consumed by name so that misspelled names are reported.
pub struct Tolerances(BTreeMap<String, f64>);

impl Tolerances {
    pub fn new(pairs: &[(String, f64)]) -> Self {
        Self(pairs.iter().cloned().collect())
    }

    pub fn take(&mut self, name: &str, default: f64) -> f64 {
        self.0.remove(name).unwrap_or(default)
    }

    pub fn take_opt(&mut self, name: &str) -> Option<f64> {
        self.0.remove(name)
    }

    /// Fails on names no setting asked for.
    pub fn finish(self, known: &[&str]) -> anyhow::Result<()> {
        if let Some(name) = self.0.keys().next() {
            bail!("unknown tolerance '{name}' for this command (known: {})", known.join(", "));
        }
        Ok(())
    }
}
