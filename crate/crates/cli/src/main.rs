//! `charpoly`: exact routes, convergence studies, normalized ratios and
//! Monte Carlo checks for the characteristic-polynomial correlation of
//! Wigner matrices. Output is CSV.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use charpoly_core::Precision;
use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{parse_precision, parse_tolerance, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "charpoly", version, about)]
struct Cli {
    /// Working precision in bits: 53, 128 or 256.
    #[arg(long, global = true, default_value = "128", value_parser = parse_precision)]
    precision: Precision,

    /// Write the CSV here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for Monte Carlo sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Override a named tolerance (contour-imag, mc-imag). Repeatable.
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE", value_parser = parse_tolerance)]
    tol: Vec<(String, f64)>,

    /// Also write a gnuplot script for the table (converge, ratio; needs --out).
    #[arg(long, global = true, value_name = "PATH")]
    gnuplot: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate f(N; mu, nu) and c(N) = f/N! by one route.
    Exact(ExactArgs),
    /// Rescaled correlation against its sine-kernel limit over a list of N.
    Converge(StudyArgs),
    /// Monte Carlo estimate of f(N; mu, nu) against the exact value.
    Mc(McArgs),
    /// Normalized correlation ratio against the sinc limit over a list of N.
    Ratio(RatioArgs),
    /// Same as `exact --route contour`.
    ContourCheck(PointArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Route {
    Full,
    Condensed,
    Series,
    Contour,
}

#[derive(Args, Debug)]
pub struct PointArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: String,
    #[arg(long, allow_hyphen_values = true)]
    pub nu: String,
    /// Fourth moment of the entry law.
    #[arg(long)]
    pub b: String,
    /// Quadrature nodes for the contour route (default max(64, 8N)).
    #[arg(long)]
    pub nodes: Option<usize>,
}

#[derive(Args, Debug)]
pub struct ExactArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long, value_enum, default_value = "condensed")]
    pub route: Route,
}

#[derive(Args, Debug)]
pub struct StudyArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub xi: String,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    pub mu_off: String,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    pub nu_off: String,
    #[arg(long)]
    pub b: String,
    /// Comma-separated sizes, e.g. 64,256,1024.
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    pub n_list: Vec<usize>,
}

#[derive(Args, Debug)]
pub struct RatioArgs {
    #[command(flatten)]
    pub study: StudyArgs,
    /// Use the centered correlation.
    #[arg(long)]
    pub centered: bool,
}

#[derive(Args, Debug)]
pub struct McArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: String,
    #[arg(long, allow_hyphen_values = true)]
    pub nu: String,
    /// Entry law: gaussian, rademacher or uniform.
    #[arg(long)]
    pub law: String,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = RunConfig {
        precision: cli.precision,
        seed: cli.seed,
        output_path: cli.out,
        gnuplot_path: cli.gnuplot,
        tolerances: cli.tol.into_iter().collect(),
    };
    let result = match &cli.command {
        Command::Exact(args) => commands::exact(&config, &args.point, args.route),
        Command::ContourCheck(point) => commands::exact(&config, point, Route::Contour),
        Command::Converge(args) => commands::converge(&config, args),
        Command::Ratio(args) => commands::ratio(&config, &args.study, args.centered),
        Command::Mc(args) => commands::mc(&config, args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("charpoly: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
