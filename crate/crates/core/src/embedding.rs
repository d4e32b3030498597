//! Delay-coordinate embedding of a scalar series into a point cloud.

use crate::ingest::TimeSeries;
use thiserror::Error;

/// Embedding dimension `m`, lag `tau`, and an optional assumed attractor
/// dimension used only for the `m > 2d` sufficiency check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmbeddingConfig {
    m: usize,
    tau: usize,
    attractor_dim: Option<usize>,
}

#[derive(Debug, Error, PartialEq)]
pub enum EmbeddingError {
    #[error("embedding dimension and lag must both be at least 1 (got m={m}, tau={tau})")]
    InvalidConfig { m: usize, tau: usize },
    #[error("series too short: embedding needs {required} samples, got {actual}")]
    SeriesTooShort { required: usize, actual: usize },
    #[error("point cloud must be non-empty")]
    EmptyCloud,
    #[error("row {0} has a different dimension than row 0")]
    RaggedRows(usize),
    #[error("point {0} has a non-finite coordinate")]
    NonFinitePoint(usize),
}

impl EmbeddingConfig {
    pub fn new(m: usize, tau: usize) -> Result<Self, EmbeddingError> {
        if m < 1 || tau < 1 {
            return Err(EmbeddingError::InvalidConfig { m, tau });
        }
        Ok(Self {
            m,
            tau,
            attractor_dim: None,
        })
    }

    /// Attach an assumed attractor dimension `d` for [`check_embedding_dim`].
    pub fn with_attractor_dim(mut self, d: usize) -> Self {
        self.attractor_dim = Some(d);
        self
    }

    pub fn dimension(&self) -> usize {
        self.m
    }

    pub fn lag(&self) -> usize {
        self.tau
    }

    pub fn attractor_dim(&self) -> Option<usize> {
        self.attractor_dim
    }

    /// Minimum series length that yields at least one point.
    pub fn required_len(&self) -> usize {
        (self.m - 1) * self.tau + 1
    }
}

/// N points in R^m, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    data: Vec<f64>,
    dim: usize,
}

impl PointCloud {
    /// Build a cloud from explicit rows. All rows must share one dimension
    /// and every coordinate must be finite.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, EmbeddingError> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(EmbeddingError::EmptyCloud);
        }
        let dim = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(EmbeddingError::RaggedRows(i));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(EmbeddingError::NonFinitePoint(i));
            }
            data.extend_from_slice(row);
        }
        Ok(Self { data, dim })
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter_points(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    /// Every coordinate multiplied by `c`. Used for scale-law checks.
    pub fn scaled(&self, c: f64) -> PointCloud {
        PointCloud {
            data: self.data.iter().map(|v| v * c).collect(),
            dim: self.dim,
        }
    }
}

/// Outcome of the `m > 2d` sufficiency check. The condition is sufficient,
/// not necessary, so a violation only warns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DimensionCheck {
    Ok,
    Warning(String),
}

/// Map a series to delay vectors: `point[t][j] = series[t + j * tau]`.
pub fn delay_embed(
    series: &TimeSeries,
    config: &EmbeddingConfig,
) -> Result<PointCloud, EmbeddingError> {
    let required = config.required_len();
    let t_len = series.len();
    if t_len < required {
        return Err(EmbeddingError::SeriesTooShort {
            required,
            actual: t_len,
        });
    }
    let n = t_len - (config.m - 1) * config.tau;
    let values = series.values();
    let mut data = Vec::with_capacity(n * config.m);
    for t in 0..n {
        for j in 0..config.m {
            data.push(values[t + j * config.tau]);
        }
    }
    Ok(PointCloud {
        data,
        dim: config.m,
    })
}

/// Check the embedding-dimension condition `m > 2d` when an attractor
/// dimension was supplied.
pub fn check_embedding_dim(config: &EmbeddingConfig) -> DimensionCheck {
    match config.attractor_dim {
        Some(d) if config.m <= 2 * d => DimensionCheck::Warning(format!(
            "m = {} does not exceed 2d = {}; the delay map may not be an embedding",
            config.m,
            2 * d
        )),
        _ => DimensionCheck::Ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::TimeSeries;
    use proptest::prelude::*;

    fn series(values: Vec<f64>) -> TimeSeries {
        TimeSeries::new_log_returns(values, None).unwrap()
    }

    #[test]
    fn embed_lag_two() {
        let s = series(vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]);
        let cfg = EmbeddingConfig::new(3, 2).unwrap();
        let cloud = delay_embed(&s, &cfg).unwrap();
        assert_eq!(cloud.len(), 3);
        assert_eq!(cloud.point(0), &[1.0, 3.0, 5.0]);
        assert_eq!(cloud.point(1), &[2.0, 4.0, 6.0]);
        assert_eq!(cloud.point(2), &[3.0, 5.0, 7.0]);
    }

    #[test]
    fn embed_exact_length_single_point() {
        let s = series(vec![0.1, 0.2, 0.3, 0.4, 0.5]);
        let cfg = EmbeddingConfig::new(5, 1).unwrap();
        let cloud = delay_embed(&s, &cfg).unwrap();
        assert_eq!(cloud.len(), 1);
        assert_eq!(cloud.point(0), s.values());
    }

    #[test]
    fn embed_too_short_errors() {
        let s = series(vec![0.1, 0.2, 0.3, 0.4]);
        let cfg = EmbeddingConfig::new(5, 1).unwrap();
        assert_eq!(
            delay_embed(&s, &cfg).unwrap_err(),
            EmbeddingError::SeriesTooShort {
                required: 5,
                actual: 4
            }
        );
    }

    #[test]
    fn dimension_check_against_assumed_attractor() {
        let ok = EmbeddingConfig::new(5, 1).unwrap().with_attractor_dim(2);
        assert_eq!(check_embedding_dim(&ok), DimensionCheck::Ok);

        let warn = EmbeddingConfig::new(4, 1).unwrap().with_attractor_dim(2);
        assert!(matches!(
            check_embedding_dim(&warn),
            DimensionCheck::Warning(_)
        ));

        let absent = EmbeddingConfig::new(5, 1).unwrap();
        assert_eq!(check_embedding_dim(&absent), DimensionCheck::Ok);
    }

    #[test]
    fn invalid_config_rejected() {
        assert!(EmbeddingConfig::new(0, 1).is_err());
        assert!(EmbeddingConfig::new(1, 0).is_err());
    }

    proptest! {
        #[test]
        fn count_law(t in 1usize..1000, m in 1usize..8, tau in 1usize..5) {
            let cfg = EmbeddingConfig::new(m, tau).unwrap();
            let values: Vec<f64> = (0..t).map(|i| (i as f64 * 0.37).sin()).collect();
            let s = series(values);
            match delay_embed(&s, &cfg) {
                Ok(cloud) => {
                    prop_assert!(t >= cfg.required_len());
                    prop_assert_eq!(cloud.len(), t - (m - 1) * tau);
                    prop_assert_eq!(cloud.dim(), m);
                }
                Err(EmbeddingError::SeriesTooShort { required, actual }) => {
                    prop_assert!(t < cfg.required_len());
                    prop_assert_eq!(required, cfg.required_len());
                    prop_assert_eq!(actual, t);
                }
                Err(other) => prop_assert!(false, "unexpected error {:?}", other),
            }
        }

        #[test]
        fn column_shift_property(t in 10usize..200, m in 1usize..6, tau in 1usize..4) {
            prop_assume!(t >= (m - 1) * tau + 1);
            let values: Vec<f64> = (0..t).map(|i| (i as f64).cos()).collect();
            let s = series(values.clone());
            let cloud = delay_embed(&s, &EmbeddingConfig::new(m, tau).unwrap()).unwrap();
            for j in 0..m {
                for i in 0..cloud.len() {
                    prop_assert_eq!(cloud.point(i)[j], values[i + j * tau]);
                }
            }
        }

        #[test]
        fn unit_embedding_is_identity(t in 2usize..100) {
            let values: Vec<f64> = (0..t).map(|i| i as f64 * 0.5).collect();
            let s = series(values.clone());
            let cloud = delay_embed(&s, &EmbeddingConfig::new(1, 1).unwrap()).unwrap();
            prop_assert_eq!(cloud.len(), t);
            for i in 0..t {
                prop_assert_eq!(cloud.point(i), &[values[i]][..]);
            }
        }
    }
}
