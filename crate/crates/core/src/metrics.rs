//! Per-game performance indices and per-minute normalization.
//!
//! The overall index is the sum of a defensive and an offensive index, each a
//! weighted linear combination of boxscore counts (see [`WeightConfig`]). The
//! league efficiency rating is computed alongside as a comparison baseline.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::MetricsError;
use crate::ingest::Dataset;
use crate::model::{derived_points, BoxscoreLine, MetricSeries, StatKey, WeightConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexValue {
    pub player_id: String,
    pub game_id: String,
    pub id_raw: f64,
    pub io_raw: f64,
    pub rend_raw: f64,
    pub valoracion_raw: f64,
    pub minutes: f64,
}

fn weighted_sum(line: &BoxscoreLine, w: &WeightConfig, keys: &[StatKey]) -> f64 {
    keys.iter()
        .map(|&k| w.get(k) * f64::from(line.count(k)))
        .sum()
}

pub fn defensive_index(line: &BoxscoreLine, w: &WeightConfig) -> f64 {
    weighted_sum(line, w, &StatKey::DEFENSIVE)
}

pub fn offensive_index(line: &BoxscoreLine, w: &WeightConfig) -> f64 {
    weighted_sum(line, w, &StatKey::OFFENSIVE)
}

pub fn rendimiento(line: &BoxscoreLine, w: &WeightConfig) -> IndexValue {
    let id_raw = defensive_index(line, w);
    let io_raw = offensive_index(line, w);
    IndexValue {
        player_id: line.player_id.clone(),
        game_id: line.game_id.clone(),
        id_raw,
        io_raw,
        rend_raw: id_raw + io_raw,
        valoracion_raw: valoracion_acb(line),
        minutes: line.minutes,
    }
}

/// League efficiency rating: positive actions (points, rebounds, assists,
/// steals, blocks, fouls drawn) minus negative ones (missed shots, turnovers,
/// blocks received, fouls committed).
pub fn valoracion_acb(line: &BoxscoreLine) -> f64 {
    let positive = i64::from(derived_points(line))
        + i64::from(line.rd)
        + i64::from(line.ro)
        + i64::from(line.a)
        + i64::from(line.br)
        + i64::from(line.tf)
        + i64::from(line.fpr);
    let negative = i64::from(line.t2f)
        + i64::from(line.t3f)
        + i64::from(line.t1f)
        + i64::from(line.bp)
        + i64::from(line.tr)
        + i64::from(line.fpc);
    (positive - negative) as f64
}

pub fn per_minute(value: f64, minutes: f64) -> Result<f64, MetricsError> {
    if minutes > 0.0 {
        Ok(value / minutes)
    } else {
        Err(MetricsError::ZeroMinutes)
    }
}

/// Per-game quantity that series, rankings and splits are built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Points,
    Id,
    Io,
    Rend,
    Valoracion,
    PlusMinus,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::Points,
        Metric::Id,
        Metric::Io,
        Metric::Rend,
        Metric::Valoracion,
        Metric::PlusMinus,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Points => "points",
            Metric::Id => "id",
            Metric::Io => "io",
            Metric::Rend => "rend",
            Metric::Valoracion => "valoracion",
            Metric::PlusMinus => "plus_minus",
        }
    }

    /// Raw per-game value. `None` only for a missing +/- cell.
    pub fn raw_value(self, line: &BoxscoreLine, w: &WeightConfig) -> Option<f64> {
        match self {
            Metric::Points => Some(f64::from(derived_points(line))),
            Metric::Id => Some(defensive_index(line, w)),
            Metric::Io => Some(offensive_index(line, w)),
            Metric::Rend => Some(rendimiento(line, w).rend_raw),
            Metric::Valoracion => Some(valoracion_acb(line)),
            Metric::PlusMinus => line.plus_minus.map(f64::from),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = MetricsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Metric::ALL
            .iter()
            .copied()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| MetricsError::UnknownMetric(s.to_string()))
    }
}

/// A metric together with whether it is divided by minutes played.
///
/// Parses `rend` and `rend_per_minute` style names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct MetricSpec {
    pub metric: Metric,
    pub per_minute: bool,
}

impl MetricSpec {
    pub fn raw(metric: Metric) -> Self {
        MetricSpec {
            metric,
            per_minute: false,
        }
    }

    pub fn per_minute(metric: Metric) -> Self {
        MetricSpec {
            metric,
            per_minute: true,
        }
    }

    pub fn name(&self) -> String {
        if self.per_minute {
            format!("{}_per_minute", self.metric)
        } else {
            self.metric.to_string()
        }
    }

    /// Value for one line, or `None` if the line yields no observation
    /// (zero minutes under per-minute normalization, or a missing +/-).
    pub fn value(&self, line: &BoxscoreLine, w: &WeightConfig) -> Option<f64> {
        let raw = self.metric.raw_value(line, w)?;
        if self.per_minute {
            per_minute(raw, line.minutes).ok()
        } else {
            Some(raw)
        }
    }
}

impl fmt::Display for MetricSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for MetricSpec {
    type Err = MetricsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.strip_suffix("_per_minute") {
            Some(base) => Ok(MetricSpec::per_minute(
                base.parse().map_err(|_| MetricsError::UnknownMetric(s.into()))?,
            )),
            None => Ok(MetricSpec::raw(s.parse()?)),
        }
    }
}

/// A player's series plus how many lines were left out of it.
#[derive(Debug, Clone)]
pub struct SeriesBuild {
    pub series: Option<MetricSeries>,
    pub excluded_dnp: usize,
    pub excluded_missing: usize,
}

/// Build one player's per-game series for `spec`. Zero-minute lines are
/// excluded under per-minute normalization; lines with no +/- are excluded
/// from +/- series.
pub fn player_series<'a, I>(player_id: &str, lines: I, spec: MetricSpec, w: &WeightConfig) -> SeriesBuild
where
    I: IntoIterator<Item = &'a BoxscoreLine>,
{
    let mut values = Vec::new();
    let mut game_ids = Vec::new();
    let mut excluded_dnp = 0;
    let mut excluded_missing = 0;
    for line in lines {
        if spec.metric == Metric::PlusMinus && line.plus_minus.is_none() {
            excluded_missing += 1;
            continue;
        }
        if spec.per_minute && line.is_dnp() {
            excluded_dnp += 1;
            continue;
        }
        if let Some(v) = spec.value(line, w) {
            values.push(v);
            game_ids.push(line.game_id.clone());
        }
    }
    if excluded_dnp > 0 {
        log::debug!("{player_id}: {excluded_dnp} zero-minute lines excluded from {spec}");
    }
    let series = MetricSeries::new(player_id, spec.name(), values, game_ids).ok();
    SeriesBuild {
        series,
        excluded_dnp,
        excluded_missing,
    }
}

pub fn dataset_series(
    dataset: &Dataset,
    player_id: &str,
    spec: MetricSpec,
    w: &WeightConfig,
) -> SeriesBuild {
    player_series(player_id, dataset.player_lines(player_id), spec, w)
}
