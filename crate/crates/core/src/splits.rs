//! Context splits of a player's games and two-sample comparisons across them.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::SplitError;
use crate::ingest::Dataset;
use crate::metrics::MetricSpec;
use crate::model::{BoxscoreLine, GameMeta, SplitComparison, WeightConfig};
use crate::stats::welch_test;

pub const DEFAULT_CLOSE_THRESHOLD: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitContext {
    /// Final margins up to and including this many points count as close.
    pub close_threshold: u32,
}

impl Default for SplitContext {
    fn default() -> Self {
        SplitContext {
            close_threshold: DEFAULT_CLOSE_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Win,
    Loss,
}

/// Outcome and final margin (own minus opponent) for the line's team.
pub fn game_outcome(line: &BoxscoreLine, game: &GameMeta) -> Result<(Outcome, i64), SplitError> {
    let margin = game
        .margin(&line.team)
        .ok_or_else(|| SplitError::TeamNotInGame {
            team: line.team.clone(),
            game_id: game.game_id.clone(),
        })?;
    match margin {
        0 => Err(SplitError::TiedScore(game.game_id.clone())),
        m if m > 0 => Ok((Outcome::Win, m)),
        m => Ok((Outcome::Loss, m)),
    }
}

pub fn is_close_game(game: &GameMeta, threshold: u32) -> bool {
    game.abs_margin() <= threshold
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitKind {
    WinLoss,
    CloseGame,
    HomeAway,
    StarterBench,
    Competition,
}

impl SplitKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SplitKind::WinLoss => "win_loss",
            SplitKind::CloseGame => "close_game",
            SplitKind::HomeAway => "home_away",
            SplitKind::StarterBench => "starter_bench",
            SplitKind::Competition => "competition",
        }
    }

    fn fixed_sides(self) -> Option<[&'static str; 2]> {
        match self {
            SplitKind::WinLoss => Some(["loss", "win"]),
            SplitKind::CloseGame => Some(["close", "not_close"]),
            SplitKind::HomeAway => Some(["home", "away"]),
            SplitKind::StarterBench => Some(["starter", "bench"]),
            SplitKind::Competition => None,
        }
    }
}

impl fmt::Display for SplitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One side of a split, e.g. `win_loss:win` or `competition:copa`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SplitLabel {
    pub kind: SplitKind,
    pub side: String,
}

impl SplitLabel {
    pub fn new(kind: SplitKind, side: &str) -> Result<Self, SplitError> {
        let valid = match kind.fixed_sides() {
            Some(sides) => sides.contains(&side),
            None => !side.is_empty(),
        };
        if !valid {
            return Err(SplitError::InvalidLabel {
                kind: kind.to_string(),
                side: side.to_string(),
            });
        }
        Ok(SplitLabel {
            kind,
            side: side.to_string(),
        })
    }

    /// Whether the line's game falls on this side.
    pub fn matches(
        &self,
        line: &BoxscoreLine,
        game: &GameMeta,
        ctx: &SplitContext,
    ) -> Result<bool, SplitError> {
        Ok(match self.kind {
            SplitKind::WinLoss => {
                let (outcome, _) = game_outcome(line, game)?;
                (outcome == Outcome::Win) == (self.side == "win")
            }
            SplitKind::CloseGame => {
                is_close_game(game, ctx.close_threshold) == (self.side == "close")
            }
            SplitKind::HomeAway => {
                if !game.involves(&line.team) {
                    return Err(SplitError::TeamNotInGame {
                        team: line.team.clone(),
                        game_id: game.game_id.clone(),
                    });
                }
                (game.home_team == line.team) == (self.side == "home")
            }
            SplitKind::StarterBench => line.starter == (self.side == "starter"),
            SplitKind::Competition => game.competition == self.side,
        })
    }
}

impl fmt::Display for SplitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind, self.side)
    }
}

/// A two-sided partition of a player's games.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum Split {
    WinLoss,
    CloseGame,
    HomeAway,
    StarterBench,
    /// The named competition against all others pooled.
    Competition(String),
}

impl Split {
    pub fn kind(&self) -> SplitKind {
        match self {
            Split::WinLoss => SplitKind::WinLoss,
            Split::CloseGame => SplitKind::CloseGame,
            Split::HomeAway => SplitKind::HomeAway,
            Split::StarterBench => SplitKind::StarterBench,
            Split::Competition(_) => SplitKind::Competition,
        }
    }

    /// Labels of side A and side B, in display order.
    pub fn side_names(&self) -> (String, String) {
        match self {
            Split::Competition(name) => (name.clone(), "other".to_string()),
            other => {
                let [a, b] = other.kind().fixed_sides().expect("fixed kinds");
                (a.to_string(), b.to_string())
            }
        }
    }

    fn side_a(&self) -> SplitLabel {
        let (a, _) = self.side_names();
        SplitLabel {
            kind: self.kind(),
            side: a,
        }
    }

    /// True if the line's game falls on side A.
    pub fn on_side_a(
        &self,
        line: &BoxscoreLine,
        game: &GameMeta,
        ctx: &SplitContext,
    ) -> Result<bool, SplitError> {
        self.side_a().matches(line, game, ctx)
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Split::Competition(name) => write!(f, "competition:{name}"),
            other => f.write_str(other.kind().as_str()),
        }
    }
}

impl FromStr for Split {
    type Err = SplitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let normalized = s.replace('-', "_");
        match normalized.as_str() {
            "win_loss" => Ok(Split::WinLoss),
            "close_game" | "close" => Ok(Split::CloseGame),
            "home_away" => Ok(Split::HomeAway),
            "starter_bench" => Ok(Split::StarterBench),
            _ => match s.split_once(':') {
                Some(("competition", name)) if !name.is_empty() => {
                    Ok(Split::Competition(name.to_string()))
                }
                _ => Err(SplitError::UnknownSplit(s.to_string())),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelMean {
    pub label: SplitLabel,
    pub n: usize,
    pub mean: Option<f64>,
}

/// Mean +/- overall and for each requested label.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlusMinusSummary {
    pub player_id: String,
    pub player_name: String,
    pub n: usize,
    pub overall: Option<f64>,
    pub labels: Vec<LabelMean>,
    /// Zero-minute games that still carried a +/- value and were counted.
    pub dnp_counted: usize,
    /// Games whose +/- cell was empty.
    pub missing: usize,
}

fn mean_of(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

fn game_of<'a>(dataset: &'a Dataset, line: &BoxscoreLine) -> &'a GameMeta {
    dataset
        .game(&line.game_id)
        .expect("dataset invariant: every line references a known game")
}

pub fn plus_minus_summary(
    player_id: &str,
    dataset: &Dataset,
    labels: &[SplitLabel],
    ctx: &SplitContext,
) -> Result<PlusMinusSummary, SplitError> {
    let lines: Vec<&BoxscoreLine> = dataset.player_lines(player_id).collect();
    let Some(first) = lines.first() else {
        return Err(SplitError::UnknownPlayer(player_id.to_string()));
    };
    let observed: Vec<(&BoxscoreLine, f64)> = lines
        .iter()
        .filter_map(|l| l.plus_minus.map(|pm| (*l, f64::from(pm))))
        .collect();
    let all: Vec<f64> = observed.iter().map(|(_, v)| *v).collect();
    let mut per_label = Vec::with_capacity(labels.len());
    for label in labels {
        let mut values = Vec::new();
        for (line, v) in &observed {
            if label.matches(line, game_of(dataset, line), ctx)? {
                values.push(*v);
            }
        }
        per_label.push(LabelMean {
            label: label.clone(),
            n: values.len(),
            mean: mean_of(&values),
        });
    }
    Ok(PlusMinusSummary {
        player_id: player_id.to_string(),
        player_name: first.player_name.clone(),
        n: all.len(),
        overall: mean_of(&all),
        labels: per_label,
        dnp_counted: observed.iter().filter(|(l, _)| l.is_dnp()).count(),
        missing: lines.len() - observed.len(),
    })
}

/// Labels of the standard +/- table: close games, wins, losses.
pub fn standard_plus_minus_labels() -> Vec<SplitLabel> {
    vec![
        SplitLabel {
            kind: SplitKind::CloseGame,
            side: "close".into(),
        },
        SplitLabel {
            kind: SplitKind::WinLoss,
            side: "win".into(),
        },
        SplitLabel {
            kind: SplitKind::WinLoss,
            side: "loss".into(),
        },
    ]
}

/// Per-game values of `spec` for one player, partitioned into (side A, side B).
/// Lines that yield no observation (zero minutes under per-minute
/// normalization, missing +/-) are skipped.
pub fn partition(
    player_id: &str,
    spec: MetricSpec,
    split: &Split,
    dataset: &Dataset,
    w: &WeightConfig,
    ctx: &SplitContext,
) -> Result<(Vec<f64>, Vec<f64>), SplitError> {
    if !dataset.has_player(player_id) {
        return Err(SplitError::UnknownPlayer(player_id.to_string()));
    }
    let mut a = Vec::new();
    let mut b = Vec::new();
    for line in dataset.player_lines(player_id) {
        let Some(value) = spec.value(line, w) else {
            continue;
        };
        if spec.per_minute && line.is_dnp() {
            continue;
        }
        if split.on_side_a(line, game_of(dataset, line), ctx)? {
            a.push(value);
        } else {
            b.push(value);
        }
    }
    Ok((a, b))
}

/// Welch comparison of `spec` between the two sides of `split`.
pub fn split_compare(
    player_id: &str,
    spec: MetricSpec,
    split: &Split,
    dataset: &Dataset,
    w: &WeightConfig,
    alpha: f64,
    ctx: &SplitContext,
) -> Result<SplitComparison, SplitError> {
    let (a, b) = partition(player_id, spec, split, dataset, w, ctx)?;
    let (label_a, label_b) = split.side_names();
    for (label, values) in [(&label_a, &a), (&label_b, &b)] {
        if values.len() < 2 {
            return Err(SplitError::InsufficientSplit {
                side: label.clone(),
                n: values.len(),
            });
        }
    }
    Ok(welch_test(&a, &b, alpha)?.labelled(&spec.name(), &label_a, &label_b))
}
