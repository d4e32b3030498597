//! Price ingestion: CSV parsing, log-returns, and Z-score normalization.

use thiserror::Error;

/// What the values of a [`TimeSeries`] represent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    Price,
    LogReturn,
    Normalized,
}

/// A scalar series with optional epoch-second timestamps.
///
/// Invariants enforced at construction: values are finite, prices are
/// strictly positive, price series have at least two samples, and
/// timestamps (when present) match the value count and strictly increase.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    timestamps: Option<Vec<i64>>,
    kind: SeriesKind,
}

#[derive(Debug, Error, PartialEq)]
pub enum IngestError {
    #[error("input contains no data rows")]
    EmptyInput,
    #[error("input is not valid UTF-8")]
    InvalidUtf8,
    #[error("column {0:?} not found in header")]
    MissingColumn(String),
    #[error("row {0}: malformed value")]
    MalformedRow(usize),
    #[error("row {0}: price must be strictly positive")]
    NonPositivePrice(usize),
    #[error("row {0}: timestamps must be strictly increasing")]
    NonMonotonicTimestamps(usize),
    #[error("value at position {0} is not finite")]
    NonFiniteValue(usize),
    #[error("expected a {expected:?} series, got {actual:?}")]
    WrongKind {
        expected: SeriesKind,
        actual: SeriesKind,
    },
    #[error("series too short: need at least {required} values, got {actual}")]
    TooShort { required: usize, actual: usize },
    #[error("series is constant: variance is zero")]
    ZeroVariance,
    #[error("timestamp count {timestamps} does not match value count {values}")]
    TimestampMismatch { timestamps: usize, values: usize },
}

/// Column selection for [`parse_price_csv`]. The first CSV row is a header;
/// columns are picked by name.
#[derive(Debug, Clone)]
pub struct CsvConfig {
    pub price_column: String,
    pub time_column: Option<String>,
}

impl Default for CsvConfig {
    fn default() -> Self {
        Self {
            price_column: "price".to_string(),
            time_column: None,
        }
    }
}

impl TimeSeries {
    /// A price series. Requires at least two strictly positive, finite values.
    pub fn new_price(values: Vec<f64>, timestamps: Option<Vec<i64>>) -> Result<Self, IngestError> {
        if values.len() < 2 {
            return Err(IngestError::TooShort {
                required: 2,
                actual: values.len(),
            });
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(IngestError::NonFiniteValue(i));
            }
            if v <= 0.0 {
                return Err(IngestError::NonPositivePrice(i + 1));
            }
        }
        Self::check_timestamps(&values, timestamps.as_deref())?;
        Ok(Self {
            values,
            timestamps,
            kind: SeriesKind::Price,
        })
    }

    /// A log-return series, e.g. one produced outside this crate.
    pub fn new_log_returns(
        values: Vec<f64>,
        timestamps: Option<Vec<i64>>,
    ) -> Result<Self, IngestError> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(IngestError::NonFiniteValue(i));
        }
        Self::check_timestamps(&values, timestamps.as_deref())?;
        Ok(Self {
            values,
            timestamps,
            kind: SeriesKind::LogReturn,
        })
    }

    fn check_timestamps(values: &[f64], timestamps: Option<&[i64]>) -> Result<(), IngestError> {
        if let Some(ts) = timestamps {
            if ts.len() != values.len() {
                return Err(IngestError::TimestampMismatch {
                    timestamps: ts.len(),
                    values: values.len(),
                });
            }
            for (i, w) in ts.windows(2).enumerate() {
                if w[1] <= w[0] {
                    return Err(IngestError::NonMonotonicTimestamps(i + 2));
                }
            }
        }
        Ok(())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn timestamps(&self) -> Option<&[i64]> {
        self.timestamps.as_deref()
    }

    pub fn kind(&self) -> SeriesKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Parse a UTF-8 CSV with a header row into a price series.
///
/// Row indices in errors are 1-based over data rows; the header is not
/// counted.
pub fn parse_price_csv(raw: &[u8], config: &CsvConfig) -> Result<TimeSeries, IngestError> {
    let text = std::str::from_utf8(raw).map_err(|_| IngestError::InvalidUtf8)?;
    if text.trim().is_empty() {
        return Err(IngestError::EmptyInput);
    }

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let headers = reader.headers().map_err(|_| IngestError::EmptyInput)?.clone();
    let price_idx = headers
        .iter()
        .position(|h| h == config.price_column)
        .ok_or_else(|| IngestError::MissingColumn(config.price_column.clone()))?;
    let time_idx = match &config.time_column {
        Some(name) => Some(
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| IngestError::MissingColumn(name.clone()))?,
        ),
        None => None,
    };

    let mut values = Vec::new();
    let mut timestamps = time_idx.map(|_| Vec::new());
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|_| IngestError::MalformedRow(row))?;
        let cell = record.get(price_idx).ok_or(IngestError::MalformedRow(row))?;
        let price: f64 = cell.parse().map_err(|_| IngestError::MalformedRow(row))?;
        if !price.is_finite() {
            return Err(IngestError::MalformedRow(row));
        }
        if price <= 0.0 {
            return Err(IngestError::NonPositivePrice(row));
        }
        if let (Some(idx), Some(ts)) = (time_idx, timestamps.as_mut()) {
            let cell = record.get(idx).ok_or(IngestError::MalformedRow(row))?;
            let t: i64 = cell.parse().map_err(|_| IngestError::MalformedRow(row))?;
            if let Some(&prev) = ts.last() {
                if t <= prev {
                    return Err(IngestError::NonMonotonicTimestamps(row));
                }
            }
            ts.push(t);
        }
        values.push(price);
    }

    if values.is_empty() {
        return Err(IngestError::EmptyInput);
    }
    TimeSeries::new_price(values, timestamps)
}

/// Log-returns of a price series: `r[t] = ln(p[t+1] / p[t])`.
///
/// Output has length `T - 1`; timestamps, when present, keep the time at
/// which each return is realized (the second price of the pair).
pub fn log_returns(prices: &TimeSeries) -> Result<TimeSeries, IngestError> {
    if prices.kind != SeriesKind::Price {
        return Err(IngestError::WrongKind {
            expected: SeriesKind::Price,
            actual: prices.kind,
        });
    }
    if prices.len() < 2 {
        return Err(IngestError::TooShort {
            required: 2,
            actual: prices.len(),
        });
    }
    let values = prices
        .values
        .windows(2)
        .map(|w| (w[1] / w[0]).ln())
        .collect();
    let timestamps = prices.timestamps.as_ref().map(|ts| ts[1..].to_vec());
    Ok(TimeSeries {
        values,
        timestamps,
        kind: SeriesKind::LogReturn,
    })
}

/// Z-score normalization with the population (1/N) standard deviation.
pub fn zscore_normalize(series: &TimeSeries) -> Result<TimeSeries, IngestError> {
    if series.kind != SeriesKind::LogReturn {
        return Err(IngestError::WrongKind {
            expected: SeriesKind::LogReturn,
            actual: series.kind,
        });
    }
    if series.len() < 2 {
        return Err(IngestError::TooShort {
            required: 2,
            actual: series.len(),
        });
    }
    let n = series.len() as f64;
    let mean = series.values.iter().sum::<f64>() / n;
    let variance = series
        .values
        .iter()
        .map(|v| (v - mean) * (v - mean))
        .sum::<f64>()
        / n;
    if variance == 0.0 {
        return Err(IngestError::ZeroVariance);
    }
    let std = variance.sqrt();
    let values = series.values.iter().map(|v| (v - mean) / std).collect();
    Ok(TimeSeries {
        values,
        timestamps: series.timestamps.clone(),
        kind: SeriesKind::Normalized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn population_std(values: &[f64]) -> f64 {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt()
    }

    #[test]
    fn parse_two_rows() {
        let ts = parse_price_csv(b"t,price\n1,100\n2,110\n", &CsvConfig::default()).unwrap();
        assert_eq!(ts.values(), &[100.0, 110.0]);
        assert_eq!(ts.kind(), SeriesKind::Price);
        assert!(ts.timestamps().is_none());
    }

    #[test]
    fn parse_with_time_column() {
        let cfg = CsvConfig {
            price_column: "price".into(),
            time_column: Some("t".into()),
        };
        let ts = parse_price_csv(b"t,price\n10,100\n20,110\n", &cfg).unwrap();
        assert_eq!(ts.timestamps(), Some(&[10, 20][..]));
    }

    #[test]
    fn parse_rejects_negative_price() {
        let err = parse_price_csv(b"t,price\n1,100\n2,-5\n", &CsvConfig::default()).unwrap_err();
        assert_eq!(err, IngestError::NonPositivePrice(2));
    }

    #[test]
    fn parse_reports_malformed_row() {
        let err =
            parse_price_csv(b"t,price\n1,100\n2,abc\n3,101\n", &CsvConfig::default()).unwrap_err();
        assert_eq!(err, IngestError::MalformedRow(2));
    }

    #[test]
    fn parse_rejects_empty_and_missing_column() {
        assert_eq!(
            parse_price_csv(b"", &CsvConfig::default()).unwrap_err(),
            IngestError::EmptyInput
        );
        assert_eq!(
            parse_price_csv(b"t,price\n", &CsvConfig::default()).unwrap_err(),
            IngestError::EmptyInput
        );
        assert_eq!(
            parse_price_csv(b"t,close\n1,100\n2,101\n", &CsvConfig::default()).unwrap_err(),
            IngestError::MissingColumn("price".into())
        );
    }

    #[test]
    fn parse_rejects_non_monotonic_timestamps() {
        let cfg = CsvConfig {
            price_column: "price".into(),
            time_column: Some("t".into()),
        };
        let err = parse_price_csv(b"t,price\n10,100\n10,110\n", &cfg).unwrap_err();
        assert_eq!(err, IngestError::NonMonotonicTimestamps(2));
    }

    #[test]
    fn log_returns_flat_pair_is_zero() {
        let prices = TimeSeries::new_price(vec![100.0, 100.0], None).unwrap();
        let r = log_returns(&prices).unwrap();
        assert_eq!(r.values(), &[0.0]);
        assert_eq!(r.kind(), SeriesKind::LogReturn);
    }

    #[test]
    fn log_returns_match_ln_ratios() {
        let prices = TimeSeries::new_price(vec![100.0, 110.0, 99.0], None).unwrap();
        let r = log_returns(&prices).unwrap();
        assert_eq!(r.len(), 2);
        assert!(close(r.values()[0], 0.09531017980432486, 1e-15));
        assert!(close(r.values()[1], -0.10536051565782628, 1e-15));
    }

    #[test]
    fn log_returns_require_price_kind() {
        let r = TimeSeries::new_log_returns(vec![0.1, 0.2], None).unwrap();
        assert!(matches!(
            log_returns(&r).unwrap_err(),
            IngestError::WrongKind { .. }
        ));
    }

    #[test]
    fn zscore_two_point_identity() {
        let r = TimeSeries::new_log_returns(vec![1.0, -1.0], None).unwrap();
        let z = zscore_normalize(&r).unwrap();
        assert_eq!(z.values(), &[1.0, -1.0]);
        assert_eq!(z.kind(), SeriesKind::Normalized);
    }

    #[test]
    fn zscore_rejects_constant() {
        let r = TimeSeries::new_log_returns(vec![5.0, 5.0, 5.0], None).unwrap();
        assert_eq!(zscore_normalize(&r).unwrap_err(), IngestError::ZeroVariance);
    }

    #[test]
    fn zscore_three_point_hand_value() {
        // population stddev of [0,1,2] is sqrt(2/3)
        let r = TimeSeries::new_log_returns(vec![0.0, 1.0, 2.0], None).unwrap();
        let z = zscore_normalize(&r).unwrap();
        let expected = 1.224744871391589;
        assert!(close(z.values()[0], -expected, 1e-12));
        assert!(close(z.values()[1], 0.0, 1e-12));
        assert!(close(z.values()[2], expected, 1e-12));
    }

    proptest! {
        #[test]
        fn returns_roundtrip_to_prices(
            prices in proptest::collection::vec(1.0e-3f64..1.0e6, 2..200)
        ) {
            let ts = TimeSeries::new_price(prices.clone(), None).unwrap();
            let r = log_returns(&ts).unwrap();
            let mut rebuilt = vec![prices[0]];
            for v in r.values() {
                rebuilt.push(rebuilt.last().unwrap() * v.exp());
            }
            for (a, b) in rebuilt.iter().zip(&prices) {
                prop_assert!((a - b).abs() <= 1e-9 * b.abs());
            }
        }

        #[test]
        fn zscore_mean_zero_std_one(
            values in proptest::collection::vec(-1.0f64..1.0, 2..500)
        ) {
            let spread = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - values.iter().cloned().fold(f64::INFINITY, f64::min);
            prop_assume!(spread > 1e-9);
            let r = TimeSeries::new_log_returns(values, None).unwrap();
            let z = zscore_normalize(&r).unwrap();
            let n = z.len() as f64;
            let mean = z.values().iter().sum::<f64>() / n;
            prop_assert!(mean.abs() < 1e-12);
            prop_assert!((population_std(z.values()) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn zscore_idempotent(
            values in proptest::collection::vec(-1.0f64..1.0, 2..200)
        ) {
            let spread = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - values.iter().cloned().fold(f64::INFINITY, f64::min);
            prop_assume!(spread > 1e-9);
            let r = TimeSeries::new_log_returns(values, None).unwrap();
            let z = zscore_normalize(&r).unwrap();
            // renormalizing requires the LogReturn kind; rewrap the values
            let z_again = zscore_normalize(
                &TimeSeries::new_log_returns(z.values().to_vec(), None).unwrap(),
            )
            .unwrap();
            for (a, b) in z_again.values().iter().zip(z.values()) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
