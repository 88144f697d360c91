use serde::Serialize;

use crate::error::StatsError;
use crate::model::MetricSeries;

/// Mean divided by sample standard deviation, or a marker when the series
/// has no dispersion and the ratio is undefined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Regularity {
    Value(f64),
    ConstantSeries,
}

impl Regularity {
    pub fn value(self) -> Option<f64> {
        match self {
            Regularity::Value(v) => Some(v),
            Regularity::ConstantSeries => None,
        }
    }

    pub fn is_constant(self) -> bool {
        matches!(self, Regularity::ConstantSeries)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesSummary {
    pub n: usize,
    pub mean: f64,
    /// Divisor `n - 1`; zero for a single observation.
    pub sd_sample: f64,
    /// Divisor `n`.
    pub sd_population: f64,
    pub regularity: Regularity,
}

pub fn mean(values: &[f64]) -> Result<f64, StatsError> {
    if values.is_empty() {
        return Err(StatsError::Empty);
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// Sum of squared deviations from the mean.
fn sum_sq_dev(values: &[f64], mean: f64) -> f64 {
    values.iter().map(|v| (v - mean) * (v - mean)).sum()
}

/// Sample variance (divisor `n - 1`).
pub fn sample_variance(values: &[f64]) -> Result<f64, StatsError> {
    if values.len() < 2 {
        return Err(StatsError::TooFewSamples {
            needed: 2,
            got: values.len(),
        });
    }
    let m = mean(values)?;
    Ok(sum_sq_dev(values, m) / (values.len() - 1) as f64)
}

pub fn summarize_values(values: &[f64]) -> Result<SeriesSummary, StatsError> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let n = values.len();
    let mean = mean(values)?;
    let ss = sum_sq_dev(values, mean);
    let sd_population = (ss / n as f64).sqrt();
    let sd_sample = if n >= 2 {
        (ss / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let regularity = if sd_sample > 0.0 {
        Regularity::Value(mean / sd_sample)
    } else {
        Regularity::ConstantSeries
    };
    Ok(SeriesSummary {
        n,
        mean,
        sd_sample,
        sd_population,
        regularity,
    })
}

pub fn summarize(series: &MetricSeries) -> Result<SeriesSummary, StatsError> {
    summarize_values(series.values())
}

/// Default relative tolerance for [`comparable_means`].
pub const DEFAULT_COMPARABLE_TOLERANCE: f64 = 0.25;

/// Regularity only ranks players sensibly when their means are close; this is
/// the closeness test: `|a - b| <= tolerance * max(|a|, |b|)`.
pub fn comparable_means(a: &SeriesSummary, b: &SeriesSummary, tolerance: f64) -> bool {
    means_within(a.mean, b.mean, tolerance)
}

pub fn means_within(a: f64, b: f64, tolerance: f64) -> bool {
    (a - b).abs() <= tolerance * a.abs().max(b.abs())
}
