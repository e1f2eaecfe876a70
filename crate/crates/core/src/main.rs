use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use spherecode::cli::{
    bounds_to_csv, cmd_bounds, cmd_generate, cmd_stats, cmd_sweep, emit, exit_code,
    histogram_to_csv, parse_dim_list, parse_scheme_list, sweep_to_csv, GenerateRequest,
    OutputFormat, SweepRequest,
};
use spherecode::sphere_map::DEFAULT_BINS;
use spherecode::{Error, OptimizerConfig, Result, Scheme};

#[derive(Parser)]
#[command(name = "spherecode", version, about = "Separated unit-vector codebooks and their bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
        }
    }
}

#[derive(Args, Clone)]
struct OptimizerArgs {
    #[arg(long, default_value_t = 1000)]
    epochs: usize,
    #[arg(long, default_value_t = 0.1)]
    lr: f64,
    #[arg(long, default_value_t = 0.9)]
    momentum: f64,
    #[arg(long, default_value_t = 1.0)]
    t_start: f64,
    /// Defaults to K.
    #[arg(long)]
    t_end: Option<f64>,
    /// Project gradients onto the sphere's tangent space before each step.
    #[arg(long)]
    tangent_gradient: bool,
}

impl OptimizerArgs {
    fn config(&self, seed: u64) -> OptimizerConfig {
        OptimizerConfig {
            epochs: self.epochs,
            learning_rate: self.lr,
            momentum: self.momentum,
            t_start: self.t_start,
            t_end: self.t_end,
            seed,
            tangent_gradient: self.tangent_gradient,
            ..Default::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a codebook and write it with its header.
    Generate {
        /// onehot, simplex, rm, bch, rs-simplex, random, lse or avg.
        #[arg(long)]
        scheme: String,
        #[arg(short = 'K', long)]
        classes: usize,
        #[arg(short = 'n', long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Assign a random subset of codewords to the classes.
        #[arg(long)]
        assignment_seed: Option<u64>,
        /// Puncture or extend rm/bch codes to reach lengths they do not hit natively.
        #[arg(long)]
        allow_puncture: bool,
        #[command(flatten)]
        optimizer: OptimizerArgs,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Achievable and converse bounds for K classes over a list of dimensions.
    Bounds {
        #[arg(short = 'K', long)]
        classes: usize,
        /// Comma-separated, ranges like 8..=64 or 8..=64:8 allowed.
        #[arg(short = 'n', long)]
        dim: String,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Separation statistics of a codebook file.
    Stats {
        path: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BINS)]
        bins: usize,
        /// json prints the full statistics, csv only the histogram.
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Also write the histogram as CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Max/mean cosine of several schemes across dimensions.
    Sweep {
        /// Comma-separated scheme names; empty for none.
        #[arg(long, default_value = "")]
        schemes: String,
        #[arg(short = 'K', long)]
        classes: usize,
        #[arg(short = 'n', long)]
        dim: String,
        /// First seed for stochastic schemes.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of consecutive seeds per stochastic point.
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        #[arg(long)]
        allow_puncture: bool,
        #[command(flatten)]
        optimizer: OptimizerArgs,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate {
            scheme,
            classes,
            dim,
            seed,
            assignment_seed,
            allow_puncture,
            optimizer,
            format,
            out,
        } => {
            let scheme: Scheme = scheme.parse()?;
            let req = GenerateRequest {
                scheme,
                classes,
                dim,
                seed,
                assignment_seed,
                optimizer: optimizer.config(seed),
                allow_puncture,
            };
            let file = cmd_generate(&req)?;
            emit(&file.to_string_as(format.into())?, out.as_deref())
        }
        Command::Bounds {
            classes,
            dim,
            format,
            out,
        } => {
            let reports = cmd_bounds(classes, &parse_dim_list(&dim)?)?;
            let text = match format {
                Format::Csv => bounds_to_csv(&reports)?,
                Format::Json => serde_json::to_string_pretty(&reports)? + "\n",
            };
            emit(&text, out.as_deref())
        }
        Command::Stats {
            path,
            bins,
            format,
            out,
        } => {
            if bins == 0 {
                return Err(Error::InvalidParameter("--bins must be >= 1".into()));
            }
            let stats = cmd_stats(&path, bins)?;
            let histogram = histogram_to_csv(&stats.histogram)?;
            if let Some(p) = out.as_deref() {
                emit(&histogram, Some(p))?;
            }
            match format {
                Format::Json => emit(&(serde_json::to_string_pretty(&stats)? + "\n"), None),
                Format::Csv => emit(&histogram, None),
            }
        }
        Command::Sweep {
            schemes,
            classes,
            dim,
            seed,
            seeds,
            allow_puncture,
            optimizer,
            format,
            out,
        } => {
            if seeds == 0 {
                return Err(Error::InvalidParameter("--seeds must be >= 1".into()));
            }
            let req = SweepRequest {
                schemes: parse_scheme_list(&schemes)?,
                classes,
                dims: parse_dim_list(&dim)?,
                seeds: (seed..seed + seeds).collect(),
                optimizer: optimizer.config(seed),
                allow_puncture,
            };
            let rows = cmd_sweep(&req)?;
            let text = match format {
                Format::Csv => sweep_to_csv(&rows)?,
                Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
            };
            emit(&text, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
