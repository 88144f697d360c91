//! Domain types shared by ingestion, metrics, statistics and reporting.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::ConfigError;

/// A boxscore statistic that carries a weight in the defensive or offensive index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum StatKey {
    Rd,
    Tf,
    Fpc,
    Br,
    T2c,
    T1c,
    T3c,
    T2f,
    T1f,
    T3f,
    Ro,
    A,
    Fpr,
    Bp,
}

impl StatKey {
    pub const ALL: [StatKey; 14] = [
        StatKey::Rd,
        StatKey::Tf,
        StatKey::Fpc,
        StatKey::Br,
        StatKey::T2c,
        StatKey::T1c,
        StatKey::T3c,
        StatKey::T2f,
        StatKey::T1f,
        StatKey::T3f,
        StatKey::Ro,
        StatKey::A,
        StatKey::Fpr,
        StatKey::Bp,
    ];

    pub const DEFENSIVE: [StatKey; 4] = [StatKey::Rd, StatKey::Tf, StatKey::Fpc, StatKey::Br];

    pub const OFFENSIVE: [StatKey; 10] = [
        StatKey::T2c,
        StatKey::T1c,
        StatKey::T3c,
        StatKey::T2f,
        StatKey::T1f,
        StatKey::T3f,
        StatKey::Ro,
        StatKey::A,
        StatKey::Fpr,
        StatKey::Bp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StatKey::Rd => "RD",
            StatKey::Tf => "TF",
            StatKey::Fpc => "FPC",
            StatKey::Br => "BR",
            StatKey::T2c => "T2C",
            StatKey::T1c => "T1C",
            StatKey::T3c => "T3C",
            StatKey::T2f => "T2F",
            StatKey::T1f => "T1F",
            StatKey::T3f => "T3F",
            StatKey::Ro => "RO",
            StatKey::A => "A",
            StatKey::Fpr => "FPR",
            StatKey::Bp => "BP",
        }
    }

    pub fn is_defensive(self) -> bool {
        Self::DEFENSIVE.contains(&self)
    }

    fn index(self) -> usize {
        self as usize
    }

    /// Coefficient used when no override is configured.
    pub fn default_weight(self) -> f64 {
        match self {
            StatKey::Rd => 1.0,
            StatKey::Tf => 1.0,
            StatKey::Fpc => -1.0,
            StatKey::Br => 2.0,
            StatKey::T2c => 1.0,
            StatKey::T1c => 1.0,
            StatKey::T3c => 1.5,
            StatKey::T2f => -1.0,
            StatKey::T1f => -2.0,
            StatKey::T3f => -1.0,
            StatKey::Ro => 2.0,
            StatKey::A => 2.0,
            StatKey::Fpr => 1.5,
            StatKey::Bp => -2.0,
        }
    }
}

impl fmt::Display for StatKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StatKey {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StatKey::ALL
            .iter()
            .copied()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| ConfigError::UnknownStatKey(s.to_string()))
    }
}

/// One player's statistical line for one game.
///
/// Points are never stored; see [`BoxscoreLine::points`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxscoreLine {
    pub game_id: String,
    pub player_id: String,
    pub player_name: String,
    pub team: String,
    /// Decimal minutes: `23.01` is twenty-three and one hundredth minutes.
    pub minutes: f64,
    pub t2c: u32,
    pub t2f: u32,
    pub t3c: u32,
    pub t3f: u32,
    pub t1c: u32,
    pub t1f: u32,
    pub rd: u32,
    pub ro: u32,
    pub a: u32,
    pub br: u32,
    pub bp: u32,
    pub tf: u32,
    /// Blocks received. Only the league efficiency rating uses it.
    pub tr: u32,
    pub fpc: u32,
    pub fpr: u32,
    /// `None` when the source left the cell empty (no observation).
    pub plus_minus: Option<i32>,
    pub starter: bool,
}

impl BoxscoreLine {
    /// An all-zero line, handy as a base for fixtures.
    pub fn empty(game_id: &str, player_id: &str, team: &str) -> Self {
        BoxscoreLine {
            game_id: game_id.to_string(),
            player_id: player_id.to_string(),
            player_name: player_id.to_string(),
            team: team.to_string(),
            minutes: 0.0,
            t2c: 0,
            t2f: 0,
            t3c: 0,
            t3f: 0,
            t1c: 0,
            t1f: 0,
            rd: 0,
            ro: 0,
            a: 0,
            br: 0,
            bp: 0,
            tf: 0,
            tr: 0,
            fpc: 0,
            fpr: 0,
            plus_minus: None,
            starter: false,
        }
    }

    pub fn points(&self) -> u32 {
        derived_points(self)
    }

    pub fn count(&self, key: StatKey) -> u32 {
        match key {
            StatKey::Rd => self.rd,
            StatKey::Tf => self.tf,
            StatKey::Fpc => self.fpc,
            StatKey::Br => self.br,
            StatKey::T2c => self.t2c,
            StatKey::T1c => self.t1c,
            StatKey::T3c => self.t3c,
            StatKey::T2f => self.t2f,
            StatKey::T1f => self.t1f,
            StatKey::T3f => self.t3f,
            StatKey::Ro => self.ro,
            StatKey::A => self.a,
            StatKey::Fpr => self.fpr,
            StatKey::Bp => self.bp,
        }
    }

    pub fn count_mut(&mut self, key: StatKey) -> &mut u32 {
        match key {
            StatKey::Rd => &mut self.rd,
            StatKey::Tf => &mut self.tf,
            StatKey::Fpc => &mut self.fpc,
            StatKey::Br => &mut self.br,
            StatKey::T2c => &mut self.t2c,
            StatKey::T1c => &mut self.t1c,
            StatKey::T3c => &mut self.t3c,
            StatKey::T2f => &mut self.t2f,
            StatKey::T1f => &mut self.t1f,
            StatKey::T3f => &mut self.t3f,
            StatKey::Ro => &mut self.ro,
            StatKey::A => &mut self.a,
            StatKey::Fpr => &mut self.fpr,
            StatKey::Bp => &mut self.bp,
        }
    }

    /// Did-not-play entry: zero minutes on the floor.
    pub fn is_dnp(&self) -> bool {
        self.minutes == 0.0
    }
}

/// `2·t2c + 3·t3c + t1c`, in integer arithmetic.
pub fn derived_points(line: &BoxscoreLine) -> u32 {
    2 * line.t2c + 3 * line.t3c + line.t1c
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameMeta {
    pub game_id: String,
    pub date: NaiveDate,
    pub competition: String,
    pub home_team: String,
    pub away_team: String,
    pub home_score: u32,
    pub away_score: u32,
}

impl GameMeta {
    pub fn involves(&self, team: &str) -> bool {
        self.home_team == team || self.away_team == team
    }

    /// Own score minus opponent score, or `None` if `team` did not play.
    pub fn margin(&self, team: &str) -> Option<i64> {
        let diff = i64::from(self.home_score) - i64::from(self.away_score);
        if team == self.home_team {
            Some(diff)
        } else if team == self.away_team {
            Some(-diff)
        } else {
            None
        }
    }

    pub fn abs_margin(&self) -> u32 {
        self.home_score.abs_diff(self.away_score)
    }
}

/// Coefficients of the defensive and offensive indices.
///
/// Serialized as a flat object keyed by statistic name (`"RD"`, `"T3C"`, ...).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightConfig {
    weights: [f64; 14],
}

impl Default for WeightConfig {
    fn default() -> Self {
        let mut weights = [0.0; 14];
        for key in StatKey::ALL {
            weights[key.index()] = key.default_weight();
        }
        WeightConfig { weights }
    }
}

impl WeightConfig {
    pub fn get(&self, key: StatKey) -> f64 {
        self.weights[key.index()]
    }

    pub fn set(&mut self, key: StatKey, value: f64) {
        self.weights[key.index()] = value;
    }

    pub fn with(mut self, key: StatKey, value: f64) -> Self {
        self.set(key, value);
        self
    }

    pub fn zeros() -> Self {
        WeightConfig { weights: [0.0; 14] }
    }

    /// Every coefficient multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = *self;
        for w in out.weights.iter_mut() {
            *w *= factor;
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = (StatKey, f64)> + '_ {
        StatKey::ALL.iter().map(move |&k| (k, self.get(k)))
    }

    /// Parse a flat JSON object. Keys that are omitted keep their default value.
    pub fn from_json_str(text: &str) -> Result<Self, ConfigError> {
        let raw: BTreeMap<String, f64> = serde_json::from_str(text)?;
        let mut config = WeightConfig::default();
        for (name, value) in raw {
            let key: StatKey = name.parse()?;
            if !value.is_finite() {
                return Err(ConfigError::NonFiniteWeight(name));
            }
            config.set(key, value);
        }
        Ok(config)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("weight map always serializes")
    }

    /// Stable short hash of the coefficient map, embedded in report headers.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        for (key, value) in self.iter() {
            hasher.update(key.as_str().as_bytes());
            hasher.update(b"=");
            hasher.update(value.to_bits().to_be_bytes());
            hasher.update(b";");
        }
        hasher.finalize()[..8]
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

impl Serialize for WeightConfig {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(StatKey::ALL.len()))?;
        for (key, value) in self.iter() {
            map.serialize_entry(key.as_str(), &value)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for WeightConfig {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = BTreeMap::<String, f64>::deserialize(deserializer)?;
        let mut config = WeightConfig::default();
        for (name, value) in raw {
            let key: StatKey = name.parse().map_err(serde::de::Error::custom)?;
            config.set(key, value);
        }
        Ok(config)
    }
}

/// A per-game series of one metric for one player.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricSeries {
    player_id: String,
    metric_name: String,
    values: Vec<f64>,
    game_ids: Vec<String>,
}

impl MetricSeries {
    pub fn new(
        player_id: impl Into<String>,
        metric_name: impl Into<String>,
        values: Vec<f64>,
        game_ids: Vec<String>,
    ) -> Result<Self, ConfigError> {
        if values.len() != game_ids.len() {
            return Err(ConfigError::SeriesLength {
                values: values.len(),
                game_ids: game_ids.len(),
            });
        }
        if values.is_empty() {
            return Err(ConfigError::EmptySeries);
        }
        Ok(MetricSeries {
            player_id: player_id.into(),
            metric_name: metric_name.into(),
            values,
            game_ids,
        })
    }

    /// Series with synthetic game ids `g1..gn`; mostly for ad-hoc statistics.
    pub fn from_values(metric_name: &str, values: Vec<f64>) -> Result<Self, ConfigError> {
        let ids = (1..=values.len()).map(|i| format!("g{i}")).collect();
        MetricSeries::new("", metric_name, values, ids)
    }

    pub fn player_id(&self) -> &str {
        &self.player_id
    }

    pub fn metric_name(&self) -> &str {
        &self.metric_name
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn game_ids(&self) -> &[String] {
        &self.game_ids
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Two-group mean comparison with its significance verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitComparison {
    pub metric_name: String,
    pub group_a_label: String,
    pub group_b_label: String,
    pub n_a: usize,
    pub n_b: usize,
    pub mean_a: f64,
    pub mean_b: f64,
    pub t_stat: f64,
    pub df: f64,
    pub p_value: f64,
    pub alpha: f64,
    pub significant: bool,
    /// Set when both groups are constant and unequal; `p_value` is then 0.
    pub degenerate: bool,
}
