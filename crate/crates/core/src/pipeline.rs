//! End-to-end orchestration: ingest, embed, filter, reduce, metrics, risk
//! report, plus report serialization and plot-data export.

use crate::diagram::{diagrams_to_json, PersistenceDiagram, Spectrum};
use crate::embedding::{
    check_embedding_dim, delay_embed, DimensionCheck, EmbeddingConfig, EmbeddingError, PointCloud,
};
use crate::homology::{
    build_boundary_matrix, extract_diagrams, reduce, zero_persistence_count, HomologyError,
};
use crate::ingest::{log_returns, parse_price_csv, zscore_normalize, CsvConfig, IngestError, TimeSeries};
use crate::rips::{build_rips_filtration, pairwise_distances, DistanceMatrix, RipsError};
use crate::risk::{build_report, report_spectrum, RiskConfig, RiskError, RiskReport};
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Everything a full run needs: input location, column selection, and the
/// per-stage parameters.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub csv: CsvConfig,
    pub embed_dim: usize,
    pub lag: usize,
    pub attractor_dim: Option<usize>,
    pub max_dim: usize,
    pub epsilon_max: Option<f64>,
    pub risk: RiskConfig,
    pub include_h0: bool,
    /// Edge-snapshot scale for `filtration_edges.csv`; defaults to the
    /// epsilon the filtration was built with.
    pub edge_epsilon: Option<f64>,
    pub out_dir: Option<PathBuf>,
    pub format: ReportFormat,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            input: PathBuf::new(),
            csv: CsvConfig::default(),
            embed_dim: 5,
            lag: 1,
            attractor_dim: None,
            max_dim: 2,
            epsilon_max: None,
            risk: RiskConfig::default(),
            include_h0: false,
            edge_epsilon: None,
            out_dir: None,
            format: ReportFormat::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Text,
}

/// Pipeline failure, wrapped with the stage that produced it.
#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("input stage: {0}")]
    Input(#[source] std::io::Error),
    #[error("parse stage: {0}")]
    Parse(#[source] IngestError),
    #[error("returns stage: {0}")]
    Returns(#[source] IngestError),
    #[error("normalize stage: {0}")]
    Normalize(#[source] IngestError),
    #[error("embedding stage: {0}")]
    Embedding(#[source] EmbeddingError),
    #[error("rips stage: {0}")]
    Rips(#[source] RipsError),
    #[error("homology stage: {0}")]
    Homology(#[source] HomologyError),
    #[error("risk stage: {0}")]
    Risk(#[source] RiskError),
    #[error("export stage: {0}")]
    Export(#[source] std::io::Error),
}

/// A completed run: the report plus the intermediates the plot export
/// needs. The filtration itself is not retained; edge snapshots are
/// re-derived from the distance matrix.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub report: RiskReport,
    pub log_returns: TimeSeries,
    pub normalized: TimeSeries,
    pub cloud: PointCloud,
    pub distances: DistanceMatrix,
    pub diagrams: Vec<PersistenceDiagram>,
    pub spectrum: Spectrum,
    pub dimension_check: DimensionCheck,
    pub epsilon_used: f64,
    pub zero_persistence_dropped: usize,
}

/// Read and analyze the configured input file.
pub fn run_pipeline(config: &PipelineConfig) -> Result<PipelineRun, PipelineError> {
    let raw = std::fs::read(&config.input).map_err(PipelineError::Input)?;
    let prices = parse_price_csv(&raw, &config.csv).map_err(PipelineError::Parse)?;
    analyze_prices(&prices, config)
}

/// Analyze an already-parsed price series.
pub fn analyze_prices(
    prices: &TimeSeries,
    config: &PipelineConfig,
) -> Result<PipelineRun, PipelineError> {
    let returns = log_returns(prices).map_err(PipelineError::Returns)?;
    let normalized = zscore_normalize(&returns).map_err(PipelineError::Normalize)?;

    let mut embed = EmbeddingConfig::new(config.embed_dim, config.lag)
        .map_err(PipelineError::Embedding)?;
    if let Some(d) = config.attractor_dim {
        embed = embed.with_attractor_dim(d);
    }
    let dimension_check = check_embedding_dim(&embed);
    let cloud = delay_embed(&normalized, &embed).map_err(PipelineError::Embedding)?;

    let distances = pairwise_distances(&cloud);
    let epsilon_used = config.epsilon_max.unwrap_or_else(|| distances.diameter());
    let filtration = build_rips_filtration(&distances, config.max_dim, config.epsilon_max)
        .map_err(PipelineError::Rips)?;

    let matrix = build_boundary_matrix(&filtration).map_err(PipelineError::Homology)?;
    let pairing = reduce(&matrix);
    drop(matrix);
    let max_homology_dim = config.max_dim.saturating_sub(1);
    let diagrams = extract_diagrams(&pairing, &filtration, max_homology_dim);
    let zero_persistence_dropped = zero_persistence_count(&pairing, &filtration);
    drop(filtration);

    let spectrum = report_spectrum(&diagrams, config.include_h0);
    let report =
        build_report(&diagrams, &returns, &config.risk, config.include_h0).map_err(PipelineError::Risk)?;

    Ok(PipelineRun {
        report,
        log_returns: returns,
        normalized,
        cloud,
        distances,
        diagrams,
        spectrum,
        dimension_check,
        epsilon_used,
        zero_persistence_dropped,
    })
}

/// Serialize a report. JSON uses a fixed key order and round-trips through
/// `serde_json` bit-exactly; text rounds to six significant digits.
pub fn emit_report(report: &RiskReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s =
                serde_json::to_string_pretty(report).expect("report serialization cannot fail");
            s.push('\n');
            s
        }
        ReportFormat::Text => render_text_report(report),
    }
}

/// Six-significant-digit display rounding; full precision lives in the
/// JSON and CSV outputs.
fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).clamp(0, 17) as usize;
    format!("{x:.decimals$}")
}

fn render_text_report(report: &RiskReport) -> String {
    let mut out = String::new();
    out.push_str("topological risk report\n");
    out.push_str(&format!("  total persistence   {}\n", sig6(report.lambda_total)));
    out.push_str(&format!(
        "  entropy             {}  (Shannon, natural log, lifetimes normalized by total)\n",
        sig6(report.entropy)
    ));
    out.push_str(&format!("  mean lifetime       {}\n", sig6(report.mean_lifetime)));
    out.push_str(&format!("  horizon volatility  {}\n", sig6(report.sigma_adj)));
    out.push_str(&format!("  complexity-risk     {}\n", sig6(report.r_sn)));
    out.push_str(&format!(
        "  regime              {}\n",
        match report.regime {
            crate::risk::Regime::StableAttractor => "stable attractor",
            crate::risk::Regime::Stochastic => "stochastic",
        }
    ));
    out.push_str(&format!(
        "  suggested leverage  {}x (exchange cap {})\n",
        report.l_star, report.l_max
    ));
    if let Some(count) = report.significant_cycles {
        out.push_str(&format!("  significant cycles  {count} (persistence > 2*delta)\n"));
    }
    for summary in &report.diagram_summary {
        let top: Vec<String> = summary.top_lifetimes.iter().map(|&l| sig6(l)).collect();
        out.push_str(&format!(
            "  H{}: {} finite, {} essential; top lifetimes [{}]\n",
            summary.dim,
            summary.finite_points,
            summary.essential_points,
            top.join(", ")
        ));
    }
    out
}

/// Write the plot-data files (Figure-panel CSVs plus a diagram JSON)
/// into `out_dir`. Returns the paths written.
pub fn emit_plot_data(
    run: &PipelineRun,
    config: &PipelineConfig,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, PipelineError> {
    std::fs::create_dir_all(out_dir).map_err(PipelineError::Export)?;
    let mut written = Vec::new();

    let write_file = |name: &str, contents: String| -> Result<PathBuf, PipelineError> {
        let path = out_dir.join(name);
        let mut file = std::fs::File::create(&path).map_err(PipelineError::Export)?;
        file.write_all(contents.as_bytes())
            .map_err(PipelineError::Export)?;
        Ok(path)
    };

    // returns.csv: t is the timestamp when present, else the return index.
    let mut returns_csv = String::from("t,r\n");
    for (i, &r) in run.log_returns.values().iter().enumerate() {
        match run.log_returns.timestamps() {
            Some(ts) => returns_csv.push_str(&format!("{},{:?}\n", ts[i], r)),
            None => returns_csv.push_str(&format!("{i},{r:?}\n")),
        }
    }
    written.push(write_file("returns.csv", returns_csv)?);

    // phase_space.csv: first three embedding coordinates.
    let coords = run.cloud.dim().min(3);
    let header: Vec<String> = (0..coords).map(|j| format!("x{j}")).collect();
    let mut phase_csv = header.join(",");
    phase_csv.push('\n');
    for p in run.cloud.iter_points() {
        let row: Vec<String> = p[..coords].iter().map(|c| format!("{c:?}")).collect();
        phase_csv.push_str(&row.join(","));
        phase_csv.push('\n');
    }
    written.push(write_file("phase_space.csv", phase_csv)?);

    // filtration_edges.csv: edges up to the snapshot scale.
    let snapshot = config.edge_epsilon.unwrap_or(run.epsilon_used);
    let mut edges_csv = String::from("i,j,epsilon\n");
    let n = run.distances.n();
    for i in 0..n {
        for j in (i + 1)..n {
            let d = run.distances.get(i, j);
            if d <= snapshot {
                edges_csv.push_str(&format!("{i},{j},{d:?}\n"));
            }
        }
    }
    written.push(write_file("filtration_edges.csv", edges_csv)?);

    // spectrum.csv: fixed 20-bin lifetime histogram.
    let mut spectrum_csv = String::from("bin_lo,bin_hi,count\n");
    if !run.spectrum.is_empty() {
        let max = run
            .spectrum
            .lifetimes()
            .iter()
            .copied()
            .fold(0.0, f64::max);
        let bins = 20usize;
        for k in 0..bins {
            let lo = max * k as f64 / bins as f64;
            let hi = max * (k + 1) as f64 / bins as f64;
            let count = run
                .spectrum
                .lifetimes()
                .iter()
                .filter(|&&l| l >= lo && (l < hi || (k == bins - 1 && l <= hi)))
                .count();
            spectrum_csv.push_str(&format!("{lo:?},{hi:?},{count}\n"));
        }
    }
    written.push(write_file("spectrum.csv", spectrum_csv)?);

    // diagram.csv: all diagrams, essentials marked "inf".
    let mut diagram_csv = String::from("dim,birth,death\n");
    for d in &run.diagrams {
        for p in d.points() {
            if p.is_essential() {
                diagram_csv.push_str(&format!("{},{:?},inf\n", d.dim(), p.birth));
            } else {
                diagram_csv.push_str(&format!("{},{:?},{:?}\n", d.dim(), p.birth, p.death));
            }
        }
    }
    written.push(write_file("diagram.csv", diagram_csv)?);

    // risk.csv: the scalar triple behind the leverage decision.
    let risk_csv = format!(
        "lambda,sigma_adj,r_sn\n{:?},{:?},{:?}\n",
        run.report.lambda_total, run.report.sigma_adj, run.report.r_sn
    );
    written.push(write_file("risk.csv", risk_csv)?);

    written.push(write_file("diagrams.json", {
        let mut s = diagrams_to_json(&run.diagrams);
        s.push('\n');
        s
    })?);

    Ok(written)
}
