//! Topological risk analysis for price series.
//!
//! The pipeline turns a price series into a risk report: log-returns are
//! Z-score normalized, delay-embedded into a point cloud, filtered through
//! a Vietoris-Rips complex, and reduced to persistence diagrams. Diagram
//! statistics (total persistence, entropy, mean lifetime) are combined
//! with horizon-adjusted volatility into a complexity-risk ratio and a
//! leverage multiplier capped by the exchange limit.
//!
//! Modules follow the stages:
//!
//! * [`ingest`] - CSV parsing, log-returns, normalization
//! * [`embedding`] - delay-coordinate point clouds
//! * [`rips`] - distance matrices and Rips filtrations
//! * [`homology`] - boundary-matrix reduction and persistence pairs
//! * [`diagram`] - diagrams, spectra, bottleneck and Hausdorff distances
//! * [`risk`] - volatility, complexity-risk ratio, leverage, regimes
//! * [`pipeline`] - end-to-end runs, report and plot-data serialization

pub mod diagram;
pub mod embedding;
pub mod homology;
pub mod ingest;
pub mod pipeline;
pub mod rips;
pub mod risk;

pub use diagram::{bottleneck_distance, hausdorff_distance, PersistenceDiagram, PersistencePoint, Spectrum};
pub use embedding::{delay_embed, EmbeddingConfig, PointCloud};
pub use homology::{build_boundary_matrix, extract_diagrams, reduce, Pairing};
pub use ingest::{log_returns, parse_price_csv, zscore_normalize, CsvConfig, TimeSeries};
pub use pipeline::{emit_plot_data, emit_report, run_pipeline, PipelineConfig, PipelineRun, ReportFormat};
pub use rips::{build_rips_filtration, pairwise_distances, DistanceMatrix, Filtration};
pub use risk::{leverage_multiplier, RiskConfig, RiskReport};
