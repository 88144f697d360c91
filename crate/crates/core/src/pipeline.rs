//! Whole-dataset analyses built from the lower-level modules.

use crate::error::{ReportError, SplitError};
use crate::ingest::{filter_min_games, Dataset, PlayerRef};
use crate::metrics::{dataset_series, Metric, MetricSpec};
use crate::model::WeightConfig;
use crate::report::{
    rank_delta, rank_players, regularity_table, CorrelationReport, OutputFormat, PlusMinusTable,
    ReportMeta, SplitReport, SplitRow, Table,
};
use crate::splits::{plus_minus_summary, split_compare, standard_plus_minus_labels, Split, SplitContext};
use crate::stats::{self, correlation_significance, CorrelationKind, DEFAULT_COMPARABLE_TOLERANCE};

/// Fewest players a correlation is computed over.
pub const MIN_CORRELATION_PLAYERS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub weights: WeightConfig,
    pub alpha: f64,
    pub min_games: usize,
    pub close_threshold: u32,
    pub comparable_tolerance: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            weights: WeightConfig::default(),
            alpha: 0.05,
            min_games: 10,
            close_threshold: 5,
            comparable_tolerance: DEFAULT_COMPARABLE_TOLERANCE,
        }
    }
}

impl AnalysisConfig {
    pub fn meta(&self) -> ReportMeta {
        ReportMeta::new(&self.weights, self.alpha, self.min_games, self.close_threshold)
    }

    pub fn split_context(&self) -> SplitContext {
        SplitContext {
            close_threshold: self.close_threshold,
        }
    }
}

/// Mean of `spec` per player, for players with at least one observation.
pub fn player_means(dataset: &Dataset, spec: MetricSpec, w: &WeightConfig) -> Vec<(PlayerRef, f64)> {
    dataset
        .players()
        .into_iter()
        .filter_map(|p| {
            let series = dataset_series(dataset, &p.player_id, spec, w).series?;
            let mean = stats::mean(series.values()).ok()?;
            Some((p, mean))
        })
        .collect()
}

/// Pearson, Kendall and Spearman correlation across players between the
/// per-player means of two metrics.
pub fn correlate(
    dataset: &Dataset,
    x: MetricSpec,
    y: MetricSpec,
    cfg: &AnalysisConfig,
) -> Result<CorrelationReport, ReportError> {
    let filtered = filter_min_games(dataset, cfg.min_games);
    let xs = player_means(&filtered, x, &cfg.weights);
    let ys = player_means(&filtered, y, &cfg.weights);
    let (mut vx, mut vy) = (Vec::new(), Vec::new());
    for (p, mx) in &xs {
        if let Some((_, my)) = ys.iter().find(|(q, _)| q.player_id == p.player_id) {
            vx.push(*mx);
            vy.push(*my);
        }
    }
    if vx.len() < MIN_CORRELATION_PLAYERS {
        return Err(ReportError::TooFewPlayers {
            needed: MIN_CORRELATION_PLAYERS,
            got: vx.len(),
        });
    }
    let tests = CorrelationKind::ALL
        .into_iter()
        .map(|kind| {
            let r = kind.coefficient(&vx, &vy)?;
            correlation_significance(r, vx.len(), kind, cfg.alpha)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CorrelationReport {
        metric_x: x.name(),
        metric_y: y.name(),
        n_players: vx.len(),
        meta: cfg.meta(),
        tests,
    })
}

/// Split comparison for one player, or for every player passing the
/// `min_games` filter when `player` is `None`. Players whose split cannot be
/// computed keep a row with the reason.
pub fn split_report(
    dataset: &Dataset,
    player: Option<&str>,
    spec: MetricSpec,
    split: &Split,
    cfg: &AnalysisConfig,
) -> Result<SplitReport, ReportError> {
    let ctx = cfg.split_context();
    let (source, players) = match player {
        Some(id) => {
            let found = dataset
                .players()
                .into_iter()
                .find(|p| p.player_id == id)
                .ok_or_else(|| SplitError::UnknownPlayer(id.to_string()))?;
            (dataset.clone(), vec![found])
        }
        None => {
            let filtered = filter_min_games(dataset, cfg.min_games);
            let players = filtered.players();
            if players.is_empty() {
                return Err(ReportError::EmptyAfterFilter);
            }
            (filtered, players)
        }
    };
    let mut rows = Vec::with_capacity(players.len());
    for p in players {
        let outcome = match split_compare(&p.player_id, spec, split, &source, &cfg.weights, cfg.alpha, &ctx) {
            Ok(c) => Ok(c),
            Err(e @ SplitError::InsufficientSplit { .. }) => {
                log::warn!("{}: {e}", p.player_id);
                Err(e.to_string())
            }
            Err(e) => return Err(e.into()),
        };
        rows.push(SplitRow {
            player_id: p.player_id,
            player_name: p.player_name,
            outcome,
        });
    }
    Ok(SplitReport {
        metric_name: spec.name(),
        split: split.to_string(),
        meta: cfg.meta(),
        rows,
    })
}

/// Mean +/- overall, in close games, wins and losses for every player
/// passing the `min_games` filter.
pub fn plus_minus_table(dataset: &Dataset, cfg: &AnalysisConfig) -> Result<PlusMinusTable, ReportError> {
    let filtered = filter_min_games(dataset, cfg.min_games);
    let players = filtered.players();
    if players.is_empty() {
        return Err(ReportError::EmptyAfterFilter);
    }
    let labels = standard_plus_minus_labels();
    let ctx = cfg.split_context();
    let rows = players
        .iter()
        .map(|p| plus_minus_summary(&p.player_id, &filtered, &labels, &ctx))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PlusMinusTable {
        meta: cfg.meta(),
        rows,
    })
}

/// Every standard report as `(file stem, table)`.
pub fn report_all(dataset: &Dataset, cfg: &AnalysisConfig) -> Result<Vec<(String, Table)>, ReportError> {
    let meta = cfg.meta();
    let w = &cfg.weights;
    let mut out = Vec::new();

    let valoracion = rank_players(dataset, MetricSpec::raw(Metric::Valoracion), w, cfg.min_games, meta.clone())?;
    let rend = rank_players(dataset, MetricSpec::raw(Metric::Rend), w, cfg.min_games, meta.clone())?;
    out.push(("rank_valoracion".into(), valoracion.to_table()));
    out.push(("rank_rend".into(), rend.to_table()));
    out.push(("delta_valoracion_rend".into(), rank_delta(&valoracion, &rend)?.to_table()));

    let rend_pm = rank_players(dataset, MetricSpec::per_minute(Metric::Rend), w, cfg.min_games, meta.clone())?;
    out.push(("rank_rend_per_minute".into(), rend_pm.to_table()));

    for metric in [Metric::Rend, Metric::Valoracion] {
        let spec = MetricSpec::raw(metric);
        let table = regularity_table(dataset, spec, w, cfg.min_games, cfg.comparable_tolerance, meta.clone())?;
        out.push((format!("regularity_{}", spec.name()), table.to_table()));
    }

    if dataset.lines().iter().any(|l| l.plus_minus.is_some()) {
        out.push(("plus_minus".into(), plus_minus_table(dataset, cfg)?.to_table()));
    }

    for split in ["win-loss", "close-game"] {
        let split: Split = split.parse()?;
        let report = split_report(dataset, None, MetricSpec::per_minute(Metric::Rend), &split, cfg)?;
        out.push((format!("split_{}", split.kind().as_str()), report.to_table()));
    }

    match correlate(dataset, MetricSpec::raw(Metric::Valoracion), MetricSpec::raw(Metric::Rend), cfg) {
        Ok(c) => out.push(("correlation_valoracion_rend".into(), c.to_table())),
        Err(e @ ReportError::TooFewPlayers { .. }) => log::warn!("correlation skipped: {e}"),
        Err(e) => return Err(e),
    }
    Ok(out)
}

/// Render every table of [`report_all`] into `(file name, bytes)`.
pub fn render_all(tables: &[(String, Table)], format: OutputFormat) -> Vec<(String, Vec<u8>)> {
    tables
        .iter()
        .map(|(stem, t)| (format!("{stem}.{}", format.extension()), t.render(format)))
        .collect()
}
