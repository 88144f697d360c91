use std::fmt;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown statistic key `{0}`")]
    UnknownStatKey(String),
    #[error("weight for `{0}` is not a finite number")]
    NonFiniteWeight(String),
    #[error("invalid weight file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("series has {values} values but {game_ids} game ids")]
    SeriesLength { values: usize, game_ids: usize },
    #[error("series must contain at least one value")]
    EmptySeries,
}

/// Which input table a diagnostic refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Table {
    Games,
    Lines,
}

impl fmt::Display for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Table::Games => f.write_str("games"),
            Table::Lines => f.write_str("lines"),
        }
    }
}

/// Position of a record: the CSV line number, or the JSON array index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Row {
    pub table: Table,
    pub index: u64,
}

impl fmt::Display for Row {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} row {}", self.table, self.index)
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{table}: missing column `{column}`")]
    MissingColumn { table: Table, column: String },
    #[error("{table}: header out of order, expected `{expected}` at position {position} but found `{found}`")]
    HeaderOrder {
        table: Table,
        position: usize,
        expected: String,
        found: String,
    },
    #[error("{table}: unexpected column `{column}`")]
    UnexpectedColumn { table: Table, column: String },
    #[error("{row}: field `{field}` has bad value `{value}`: {reason}")]
    BadValue {
        row: Row,
        field: String,
        value: String,
        reason: String,
    },
    #[error("{row}: game_id `{game_id}` is not in the games table")]
    DanglingGameRef { row: Row, game_id: String },
    #[error("{row}: duplicate line for player `{player_id}` in game `{game_id}`")]
    DuplicateLine {
        row: Row,
        player_id: String,
        game_id: String,
    },
    #[error("{row}: duplicate game_id `{game_id}`")]
    DuplicateGame { row: Row, game_id: String },
    #[error("{row}: points column says {declared} but the shot counts give {derived}")]
    PointsMismatch { row: Row, declared: u32, derived: u32 },
    #[error("{row}: team `{team}` did not play in game `{game_id}`")]
    TeamNotInGame {
        row: Row,
        team: String,
        game_id: String,
    },
    #[error("{row}: game `{game_id}` ended tied")]
    TiedScore { row: Row, game_id: String },
    #[error("{row}: game `{game_id}` has the same home and away team")]
    SameTeams { row: Row, game_id: String },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed JSON document: {0}")]
    Json(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl IngestError {
    /// True for failures of the input bytes themselves rather than their content.
    pub fn is_io(&self) -> bool {
        match self {
            IngestError::Io(_) => true,
            IngestError::Csv(e) => e.is_io_error(),
            _ => false,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("zero minutes played; the line cannot be normalized per minute")]
    ZeroMinutes,
    #[error("unknown metric `{0}`")]
    UnknownMetric(String),
}

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("no values")]
    Empty,
    #[error("inputs have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("input series is constant")]
    ConstantInput,
    #[error("need at least {needed} observations, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("correlation coefficient {0} is outside [-1, 1]")]
    InvalidCoefficient(f64),
    #[error("significance level {0} is outside (0, 1)")]
    InvalidAlpha(f64),
    #[error("non-finite value in input")]
    NonFinite,
}

#[derive(Debug, Error, PartialEq)]
pub enum SplitError {
    #[error("unknown player `{0}`")]
    UnknownPlayer(String),
    #[error("team `{team}` did not play in game `{game_id}`")]
    TeamNotInGame { team: String, game_id: String },
    #[error("game `{0}` ended tied")]
    TiedScore(String),
    #[error("side `{side}` has {n} qualifying games, at least 2 are needed")]
    InsufficientSplit { side: String, n: usize },
    #[error("`{side}` is not a valid side for split `{kind}`")]
    InvalidLabel { kind: String, side: String },
    #[error("unknown split `{0}`")]
    UnknownSplit(String),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("no players left after filtering")]
    EmptyAfterFilter,
    #[error("tables rank different player sets")]
    PlayerSetMismatch,
    #[error("need at least {needed} players, got {got}")]
    TooFewPlayers { needed: usize, got: usize },
    #[error("cannot parse rendered table: {0}")]
    Parse(String),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Split(#[from] SplitError),
}
