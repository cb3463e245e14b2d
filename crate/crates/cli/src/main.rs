//! `kicktop`: data generation for the quantum and classical kicked top.
//!
//! Exit codes: 0 on success, 1 for usage errors, 2 when a computation or
//! output write fails.

mod commands;
mod config;
mod error;
mod output;
mod values;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::CommonInput;

#[derive(Parser, Debug)]
#[command(name = "kicktop", version, about = "Kicked-top spectra, Lyapunov exponents and multifractality")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct CommonArgs {
    /// Spin quantum number(s): value, comma list or start:stop:step.
    #[arg(long)]
    j: Option<String>,
    /// Kick strength(s): value, comma list or start:stop:step.
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<String>,
    /// Precession angle(s); multiples of pi such as 4pi/7 are accepted.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (defaults to available parallelism).
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML file with default settings; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Do not read or write the eigensystem cache.
    #[arg(long)]
    no_cache: bool,
    /// Diagonalization route: sector or full.
    #[arg(long)]
    method: Option<String>,
}

impl CommonArgs {
    fn split(self) -> (CommonInput, Option<PathBuf>) {
        (
            CommonInput {
                j: self.j,
                kappa: self.kappa,
                alpha: self.alpha,
                seed: self.seed,
                threads: self.threads,
                out: self.out,
                no_cache: self.no_cache,
                method: self.method,
            },
            self.config,
        )
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classical orbits from random initial conditions.
    Portrait(commands::portrait::PortraitArgs),
    /// Largest Lyapunov exponent: field, (kappa, alpha) scan or threshold curve.
    Lyapunov(commands::lyapunov::LyapunovArgs),
    /// Level-spacing histograms, Brody exponents and spacing ratios.
    Spectrum(commands::spectrum::SpectrumArgs),
    /// Fractal dimensions of coherent states: field, averages or size scaling.
    Multifractal(commands::multifractal::MultifractalArgs),
    /// Distribution of rescaled expansion coefficients against chi^2 laws.
    Coeffdist(commands::coeffdist::CoeffdistArgs),
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let result = match cli.command {
        Command::Portrait(a) => commands::portrait::run(a),
        Command::Lyapunov(a) => commands::lyapunov::run(a),
        Command::Spectrum(a) => commands::spectrum::run(a),
        Command::Multifractal(a) => commands::multifractal::run(a),
        Command::Coeffdist(a) => commands::coeffdist::run(a),
    };
    if let Err(e) = result {
        eprintln!("kicktop: {e}");
        std::process::exit(e.exit_code());
    }
}
