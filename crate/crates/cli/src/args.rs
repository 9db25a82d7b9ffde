use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::parse::{self, GammaSpec, Grid, Sizes, Span, TEnd};

#[derive(Debug, Parser)]
#[command(
    name = "gpsearch",
    version,
    about = "Nonlinear quantum search simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the success probability over time.
    Simulate(SimulateArgs),
    /// Evaluate closed-form results.
    Analytic {
        #[command(subcommand)]
        query: AnalyticQuery,
    },
    /// Runtime, peak width and clock resources over a range of N.
    Sweep(SweepArgs),
    /// Clock-ion and space-time accounting.
    Resources(ResourcesArgs),
    /// Check a critical-γ run against the exact identities.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, Args)]
#[group(multiple = false)]
pub struct CouplingArgs {
    /// Raw interaction strength g.
    #[arg(long = "g", allow_negative_numbers = true)]
    pub g: Option<f64>,
    /// Rescaled coupling G = g / (k (N - k)).
    #[arg(long = "G", allow_negative_numbers = true)]
    pub big_g: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    /// Search space size; accepts `2^a`.
    #[arg(long, value_parser = parse::count)]
    pub n: u64,
    /// Number of marked states.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[command(flatten)]
    pub coupling: CouplingArgs,
    /// Peak-width threshold: the width is taken where x >= 1 - eps.
    #[arg(long, default_value_t = gpsearch_core::DEFAULT_EPSILON)]
    pub eps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Svg,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file, written atomically; stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    /// The N amplitudes.
    Full,
    /// The two-dimensional marked/unmarked subspace.
    Reduced,
    /// The success probability alone (critical γ only).
    Decoupled,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// `critical`, `const:<v>`, `const:1/N` or `file:<path>` with (t, gamma) rows.
    #[arg(long, value_parser = parse::gamma, default_value = "critical")]
    pub gamma: GammaSpec,
    /// End time, or `auto` for 2t* under critical γ and π√N otherwise.
    #[arg(long, value_parser = parse::t_end, default_value = "auto")]
    pub t_end: TEnd,
    #[arg(long, value_enum, default_value_t = Engine::Reduced)]
    pub engine: Engine,
    /// Append the closed-form x and its difference from the numerical x.
    #[arg(long)]
    pub compare_analytic: bool,
    /// Number of uniform output samples including both ends.
    #[arg(long, default_value_t = 2001)]
    pub samples: usize,
    /// Relative integrator tolerance; the absolute tolerance is 1% of it.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Marked indices for the full engine; defaults to 0..k.
    #[arg(long, value_delimiter = ',')]
    pub marked: Option<Vec<usize>>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Subcommand)]
pub enum AnalyticQuery {
    /// Success probability at time t.
    XOfT {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, value_parser = parse::number)]
        t: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// First time the success probability reaches x.
    TOfX {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, value_parser = parse::number)]
        x: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Time of the first peak.
    Runtime {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Width of the peak at 1 - eps, with its Taylor estimate.
    Width {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Eigenvalues, gap and overlaps of the generator over a γ range.
    Spectrum {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Success probability the generator is evaluated at; defaults to k/N.
        #[arg(long, value_parser = parse::number)]
        x: Option<f64>,
        /// `a:b:points`.
        #[arg(long, value_parser = parse::span)]
        gamma_range: Span,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Args)]
#[group(id = "sizes", required = true, multiple = false, args = ["n", "n_range"])]
pub struct SweepArgs {
    /// Explicit sizes, comma separated; each accepts `2^a`.
    #[arg(long, value_parser = parse::count, value_delimiter = ',')]
    pub n: Vec<u64>,
    /// `2^a:2^b` for every power of two in between, or `lo:hi`.
    #[arg(long, value_parser = parse::count_range)]
    pub n_range: Option<Sizes>,
    /// Fixed number of marked states.
    #[arg(long, conflicts_with = "lambda")]
    pub k: Option<usize>,
    /// k = N^lambda.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// G = N^kappa.
    #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["g", "big_g"])]
    pub kappa: Option<f64>,
    #[command(flatten)]
    pub coupling: CouplingArgs,
    #[arg(long, default_value_t = gpsearch_core::DEFAULT_EPSILON)]
    pub eps: f64,
    #[arg(long, default_value_t = gpsearch_core::resources::DEFAULT_CLOCK_CONSTANT)]
    pub clock_constant: f64,
    /// Print log-log exponents of each column against N to stderr.
    #[arg(long)]
    pub fit: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ResourcesArgs {
    #[arg(long, value_parser = parse::count)]
    pub n: u64,
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: Option<f64>,
    #[arg(long, default_value_t = gpsearch_core::DEFAULT_EPSILON)]
    pub eps: f64,
    #[arg(long, default_value_t = gpsearch_core::resources::DEFAULT_CLOCK_CONSTANT)]
    pub clock_constant: f64,
    /// Choose kappa by minimizing the space-time product over --grid.
    #[arg(long, conflicts_with = "kappa")]
    pub optimize: bool,
    /// `start:stop:step`.
    #[arg(long, value_parser = parse::grid, default_value = "-1:0:0.01", allow_hyphen_values = true)]
    pub grid: Grid,
    /// Add the particle-number lower bound at this kappa.
    #[arg(long)]
    pub zalka: bool,
    /// Add the log volume of the regular simplex on N vertices.
    #[arg(long)]
    pub simplex: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Uniform samples over [0, t-end].
    #[arg(long, default_value_t = 2001)]
    pub samples: usize,
    /// Largest acceptable residual.
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
    /// End time, or `auto` for the runtime t*.
    #[arg(long, value_parser = parse::t_end, default_value = "auto")]
    pub t_end: TEnd,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn g_and_big_g_conflict() {
        let r = Cli::try_parse_from([
            "gpsearch", "analytic", "runtime", "--n", "8", "--g", "1", "--G", "1",
        ]);
        assert!(r.is_err());
        let ok = Cli::try_parse_from([
            "gpsearch", "analytic", "runtime", "--n", "2^3", "--g", "-1.5",
        ]);
        assert!(ok.is_ok());
    }
}
