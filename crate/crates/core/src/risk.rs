//! Risk calibration: horizon volatility, complexity-risk ratio, leverage
//! multiplier, regime classification, and significance counting.

use crate::diagram::{PersistenceDiagram, Spectrum};
use crate::ingest::{SeriesKind, TimeSeries};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Calibration inputs: sampling frequency, investment horizon, the
/// exchange leverage cap, an optional noise scale, and the regime cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskConfig {
    pub periods_per_year: f64,
    pub horizon_days: f64,
    pub l_max: u32,
    pub delta: Option<f64>,
    pub lambda_threshold: f64,
}

impl Default for RiskConfig {
    fn default() -> Self {
        Self {
            periods_per_year: 365.0,
            horizon_days: 30.0,
            l_max: 150,
            delta: None,
            lambda_threshold: 0.0,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum RiskError {
    #[error("returns series is constant: volatility is zero")]
    ZeroVariance,
    #[error("volatility must be positive to form the complexity-risk ratio")]
    ZeroVolatility,
    #[error("expected a log-return series, got {0:?}")]
    WrongKind(SeriesKind),
    #[error("series too short: need at least {required} values, got {actual}")]
    TooShort { required: usize, actual: usize },
    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

impl RiskConfig {
    pub fn validate(&self) -> Result<(), RiskError> {
        if self.l_max < 1 {
            return Err(RiskError::InvalidConfig("l_max must be at least 1".into()));
        }
        if !(self.periods_per_year > 0.0) {
            return Err(RiskError::InvalidConfig(
                "periods_per_year must be positive".into(),
            ));
        }
        if !(self.horizon_days > 0.0) {
            return Err(RiskError::InvalidConfig(
                "horizon_days must be positive".into(),
            ));
        }
        if let Some(d) = self.delta {
            if !(d >= 0.0) {
                return Err(RiskError::InvalidConfig(
                    "delta must be non-negative".into(),
                ));
            }
        }
        if !(self.lambda_threshold >= 0.0) {
            return Err(RiskError::InvalidConfig(
                "lambda_threshold must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Market regime inferred from total persistence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    StableAttractor,
    Stochastic,
}

/// Per-dimension diagram digest carried in the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramSummary {
    pub dim: usize,
    pub finite_points: usize,
    pub essential_points: usize,
    pub top_lifetimes: Vec<f64>,
}

/// The assembled risk report. Field order is the JSON key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub lambda_total: f64,
    pub entropy: f64,
    pub mean_lifetime: f64,
    pub sigma_adj: f64,
    pub r_sn: f64,
    pub l_star: u32,
    pub l_max: u32,
    pub regime: Regime,
    pub significant_cycles: Option<usize>,
    pub diagram_summary: Vec<DiagramSummary>,
}

/// Annualized volatility scaled to the investment horizon:
/// `stddev(returns) * sqrt(periods_per_year) * sqrt(horizon_days / 365)`,
/// with the sample (1/(N-1)) standard deviation.
pub fn horizon_volatility(returns: &TimeSeries, config: &RiskConfig) -> Result<f64, RiskError> {
    if returns.kind() != SeriesKind::LogReturn {
        return Err(RiskError::WrongKind(returns.kind()));
    }
    if returns.len() < 2 {
        return Err(RiskError::TooShort {
            required: 2,
            actual: returns.len(),
        });
    }
    let n = returns.len() as f64;
    let mean = returns.values().iter().sum::<f64>() / n;
    let variance = returns
        .values()
        .iter()
        .map(|v| (v - mean) * (v - mean))
        .sum::<f64>()
        / (n - 1.0);
    if variance == 0.0 {
        return Err(RiskError::ZeroVariance);
    }
    Ok(variance.sqrt() * config.periods_per_year.sqrt() * (config.horizon_days / 365.0).sqrt())
}

/// `R_SN = lambda_total / sigma_adj`.
pub fn complexity_risk_ratio(lambda_total: f64, sigma_adj: f64) -> Result<f64, RiskError> {
    if !(sigma_adj > 0.0) {
        return Err(RiskError::ZeroVolatility);
    }
    Ok(lambda_total / sigma_adj)
}

/// Leverage map: `clamp(round(r_sn / l_max), 1, l_max)` with
/// half-away-from-zero rounding.
pub fn leverage_multiplier(r_sn: f64, l_max: u32) -> u32 {
    let rounded = (r_sn / l_max as f64).round();
    rounded.clamp(1.0, l_max as f64) as u32
}

/// Stable attractor when total persistence strictly exceeds the threshold.
pub fn classify_regime(lambda_total: f64, config: &RiskConfig) -> Regime {
    if lambda_total > config.lambda_threshold {
        Regime::StableAttractor
    } else {
        Regime::Stochastic
    }
}

/// Count cycles whose persistence exceeds twice the noise scale.
pub fn significant_cycles(diagram: &PersistenceDiagram, delta: f64) -> usize {
    diagram
        .finite_points()
        .filter(|p| p.lifetime() > 2.0 * delta)
        .count()
}

/// The lifetime spectrum feeding the report: H1 bars, optionally joined by
/// the finite H0 bars.
pub fn report_spectrum(diagrams: &[PersistenceDiagram], include_h0: bool) -> Spectrum {
    let mut lifetimes: Vec<f64> = diagrams
        .iter()
        .find(|d| d.dim() == 1)
        .map(|d| d.lifetimes().lifetimes().to_vec())
        .unwrap_or_default();
    if include_h0 {
        if let Some(h0) = diagrams.iter().find(|d| d.dim() == 0) {
            lifetimes.extend(h0.lifetimes().lifetimes());
        }
    }
    Spectrum::from_lifetimes(lifetimes).expect("diagram lifetimes are positive and finite")
}

/// Assemble the report from per-dimension diagrams and the raw log-return
/// series. `include_h0` folds finite H0 bars into the spectrum feeding
/// total persistence, entropy, and mean lifetime; by default only H1 is
/// used.
pub fn build_report(
    diagrams: &[PersistenceDiagram],
    returns: &TimeSeries,
    config: &RiskConfig,
    include_h0: bool,
) -> Result<RiskReport, RiskError> {
    config.validate()?;

    let h1 = diagrams.iter().find(|d| d.dim() == 1);
    let spectrum = report_spectrum(diagrams, include_h0);

    let lambda_total = spectrum.total_persistence();
    let sigma_adj = horizon_volatility(returns, config)?;
    let r_sn = complexity_risk_ratio(lambda_total, sigma_adj)?;
    let regime = classify_regime(lambda_total, config);
    let l_star = match regime {
        Regime::Stochastic => 1,
        Regime::StableAttractor => leverage_multiplier(r_sn, config.l_max),
    };
    let significant = match (config.delta, h1) {
        (Some(delta), Some(d1)) => Some(significant_cycles(d1, delta)),
        (Some(_), None) => Some(0),
        (None, _) => None,
    };

    let diagram_summary = diagrams
        .iter()
        .map(|d| {
            let mut top: Vec<f64> = d.lifetimes().lifetimes().to_vec();
            top.sort_by(|a, b| b.total_cmp(a));
            top.truncate(5);
            DiagramSummary {
                dim: d.dim(),
                finite_points: d.finite_points().count(),
                essential_points: d.essential_count(),
                top_lifetimes: top,
            }
        })
        .collect();

    Ok(RiskReport {
        lambda_total,
        entropy: spectrum.entropy(),
        mean_lifetime: spectrum.mean_lifetime(),
        sigma_adj,
        r_sn,
        l_star,
        l_max: config.l_max,
        regime,
        significant_cycles: significant,
        diagram_summary,
    })
}
