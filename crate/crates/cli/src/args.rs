use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "hatm", version, about = "Series solutions of time-fractional Fokker-Planck equations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the iterates u_0..u_M and their partial sum.
    Solve {
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate the partial sum on a grid.
    Eval {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: Grid,
        /// Evaluate the partial sum stored in a JSON report from `solve`
        /// instead of solving again.
        #[arg(long, value_name = "FILE")]
        series: Option<PathBuf>,
    },
    /// Residual |D^alpha u - N(u) - g| of the partial sum on a grid.
    Residual {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: Grid,
    },
    /// Partial-sum value at a probe point as a function of hbar.
    Hcurve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        probe: ProbeArgs,
        #[arg(long, default_value_t = -1.5, allow_negative_numbers = true)]
        h_min: f64,
        #[arg(long, default_value_t = -0.5, allow_negative_numbers = true)]
        h_max: f64,
        /// Number of evenly spaced samples.
        #[arg(long, default_value_t = 11)]
        n: usize,
    },
    /// Compare the partial sum with the reference solution of a preset.
    Compare {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: Grid,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Reference problem: 4.1, 4.2, 4.3, 4.4 or 4.5.
    #[arg(long)]
    pub preset: Option<String>,
    /// Problem definition file (JSON).
    #[arg(long, value_name = "FILE", conflicts_with = "preset")]
    pub problem: Option<PathBuf>,
    /// Fractional order, 0 < alpha <= 1.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Convergence-control parameter, non-zero.
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    pub hbar: f64,
    /// Number of iterates M.
    #[arg(long, default_value_t = 10)]
    pub order: usize,
    /// Maclaurin terms used for surviving e^(ct) factors.
    #[arg(long, default_value_t = 12)]
    pub taylor_terms: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write output here instead of standard output.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Grid {
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub x_min: f64,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub x_max: f64,
    #[arg(long, default_value_t = 5)]
    pub nx: usize,
    /// y range, used by two-dimensional problems only.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub y_min: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub y_max: f64,
    #[arg(long, default_value_t = 1)]
    pub ny: usize,
    #[arg(long, default_value_t = 0.0)]
    pub t_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 5)]
    pub nt: usize,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub x: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub y: f64,
    #[arg(long, default_value_t = 0.5)]
    pub t: f64,
}

/// `n` evenly spaced samples of `[a, b]`; a single sample sits at `a`.
pub fn samples(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

impl Grid {
    pub fn points(&self, dim: u8) -> Vec<(f64, f64, f64)> {
        let ys = if dim == 2 { samples(self.y_min, self.y_max, self.ny) } else { vec![0.0] };
        let mut out = Vec::new();
        for &x in &samples(self.x_min, self.x_max, self.nx) {
            for &y in &ys {
                for &t in &samples(self.t_min, self.t_max, self.nt) {
                    out.push((x, y, t));
                }
            }
        }
        out
    }
}
