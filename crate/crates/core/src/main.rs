//! Command-line entry point: run the full analysis on a price CSV and
//! emit the report plus optional plot-data files.
//!
//! Exit codes: 0 on success, 1 for input or configuration errors, 2 for
//! computation errors.

use clap::{Parser, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;
use toporisk::embedding::DimensionCheck;
use toporisk::ingest::CsvConfig;
use toporisk::pipeline::{
    emit_plot_data, emit_report, run_pipeline, PipelineConfig, PipelineError, ReportFormat,
};
use toporisk::risk::RiskConfig;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(
    name = "toporisk",
    about = "Topological risk report for a price series: delay embedding, Rips persistence, and leverage calibration"
)]
struct Cli {
    /// Input CSV with a header row.
    #[arg(long)]
    input: PathBuf,

    /// Header name of the price column.
    #[arg(long, default_value = "price")]
    price_col: String,

    /// Header name of an optional epoch-seconds timestamp column.
    #[arg(long)]
    time_col: Option<String>,

    /// Embedding dimension m.
    #[arg(long, default_value_t = 5)]
    embed_dim: usize,

    /// Embedding lag tau, in samples.
    #[arg(long, default_value_t = 1)]
    lag: usize,

    /// Assumed attractor dimension d; warns when m <= 2d.
    #[arg(long)]
    attractor_dim: Option<usize>,

    /// Largest simplex dimension in the filtration.
    #[arg(long, default_value_t = 2)]
    max_dim: usize,

    /// Filtration scale cutoff; defaults to the cloud diameter.
    #[arg(long)]
    epsilon_max: Option<f64>,

    /// Sampling frequency of the input, in periods per year.
    #[arg(long, default_value_t = 365.0)]
    periods_per_year: f64,

    /// Investment horizon in days.
    #[arg(long, default_value_t = 30.0)]
    horizon_days: f64,

    /// Exchange leverage cap.
    #[arg(long, default_value_t = 150)]
    l_max: u32,

    /// Noise scale; enables the 2*delta significant-cycle count.
    #[arg(long)]
    delta: Option<f64>,

    /// Total-persistence cutoff below which the regime is stochastic.
    #[arg(long, default_value_t = 0.0)]
    lambda_threshold: f64,

    /// Fold finite H0 bars into the report spectrum alongside H1.
    #[arg(long)]
    include_h0: bool,

    /// Edge-snapshot scale for filtration_edges.csv.
    #[arg(long)]
    edge_epsilon: Option<f64>,

    /// Directory for plot-data files and report.json.
    #[arg(long)]
    out_dir: Option<PathBuf>,

    /// Report format printed to stdout.
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are not errors
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };

    let config = PipelineConfig {
        input: cli.input,
        csv: CsvConfig {
            price_column: cli.price_col,
            time_column: cli.time_col,
        },
        embed_dim: cli.embed_dim,
        lag: cli.lag,
        attractor_dim: cli.attractor_dim,
        max_dim: cli.max_dim,
        epsilon_max: cli.epsilon_max,
        risk: RiskConfig {
            periods_per_year: cli.periods_per_year,
            horizon_days: cli.horizon_days,
            l_max: cli.l_max,
            delta: cli.delta,
            lambda_threshold: cli.lambda_threshold,
        },
        include_h0: cli.include_h0,
        edge_epsilon: cli.edge_epsilon,
        out_dir: cli.out_dir,
        format: match cli.format {
            FormatArg::Json => ReportFormat::Json,
            FormatArg::Text => ReportFormat::Text,
        },
    };

    let run = match run_pipeline(&config) {
        Ok(run) => run,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                PipelineError::Input(_) | PipelineError::Parse(_) => 1,
                _ => 2,
            };
            return ExitCode::from(code);
        }
    };

    if let DimensionCheck::Warning(msg) = &run.dimension_check {
        eprintln!("warning: {msg}");
    }

    print!("{}", emit_report(&run.report, config.format));

    if let Some(dir) = &config.out_dir {
        let report_path = dir.join("report.json");
        let write_report = std::fs::create_dir_all(dir)
            .and_then(|_| std::fs::write(&report_path, emit_report(&run.report, ReportFormat::Json)));
        if let Err(e) = write_report {
            eprintln!("error: export stage: {e}");
            return ExitCode::from(2);
        }
        if let Err(e) = emit_plot_data(&run, &config, dir) {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }

    ExitCode::SUCCESS
}
