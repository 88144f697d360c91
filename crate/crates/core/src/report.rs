//! Rankings, rank deltas, regularity tables, and rendering to CSV, JSON and
//! aligned text.
//!
//! Every domain table converts into a generic [`Table`] of typed cells, and
//! only [`Table`] knows how to render and parse. CSV and JSON keep full `f64`
//! precision; text rounds half away from zero.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::ReportError;
use crate::ingest::{filter_min_games, Dataset};
use crate::metrics::{dataset_series, MetricSpec};
use crate::model::{SplitComparison, WeightConfig};
use crate::splits::PlusMinusSummary;
use crate::stats::{self, CorrelationTest, Regularity};

/// Reproducibility header carried by every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportMeta {
    pub weights_fingerprint: String,
    pub alpha: f64,
    pub min_games: usize,
    pub close_threshold: u32,
}

impl ReportMeta {
    pub fn new(w: &WeightConfig, alpha: f64, min_games: usize, close_threshold: u32) -> Self {
        ReportMeta {
            weights_fingerprint: w.fingerprint(),
            alpha,
            min_games,
            close_threshold,
        }
    }

    fn pairs(&self) -> Vec<(String, String)> {
        vec![
            ("weights".into(), self.weights_fingerprint.clone()),
            ("alpha".into(), self.alpha.to_string()),
            ("min_games".into(), self.min_games.to_string()),
            ("close_threshold".into(), self.close_threshold.to_string()),
        ]
    }
}

// ---------------------------------------------------------------------------
// Generic table model

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    Int,
    /// Float shown with this many decimals in text output.
    Float(usize),
    Text,
    Bool,
}

impl fmt::Display for ColumnKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnKind::Int => f.write_str("int"),
            ColumnKind::Float(d) => write!(f, "float:{d}"),
            ColumnKind::Text => f.write_str("text"),
            ColumnKind::Bool => f.write_str("bool"),
        }
    }
}

impl FromStr for ColumnKind {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "int" => Ok(ColumnKind::Int),
            "text" => Ok(ColumnKind::Text),
            "bool" => Ok(ColumnKind::Bool),
            _ => s
                .strip_prefix("float:")
                .and_then(|d| d.parse().ok())
                .map(ColumnKind::Float)
                .ok_or_else(|| ReportError::Parse(format!("unknown column kind `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
}

impl Column {
    pub fn new(name: &str, kind: ColumnKind) -> Self {
        Column {
            name: name.to_string(),
            kind,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map(Cell::Float).unwrap_or(Cell::Empty)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    Text,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "text" | "txt" => Ok(OutputFormat::Text),
            _ => Err(format!("unknown format `{s}` (expected csv, json or text)")),
        }
    }
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
            OutputFormat::Text => "txt",
        }
    }
}

/// A titled table of typed cells with key/value metadata.
#[derive(Debug, Clone)]
pub struct Table {
    pub title: String,
    pub meta: Vec<(String, String)>,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    /// `(row, column)` cells suffixed with `*` in text output.
    pub marks: BTreeSet<(usize, usize)>,
}

/// Marks are presentation only and do not take part in equality.
impl PartialEq for Table {
    fn eq(&self, other: &Self) -> bool {
        self.title == other.title
            && self.meta == other.meta
            && self.columns == other.columns
            && self.rows == other.rows
    }
}

impl Table {
    pub fn new(title: &str, columns: Vec<Column>) -> Self {
        Table {
            title: title.to_string(),
            meta: Vec::new(),
            columns,
            rows: Vec::new(),
            marks: BTreeSet::new(),
        }
    }

    pub fn with_meta(mut self, meta: Vec<(String, String)>) -> Self {
        self.meta = meta;
        self
    }

    pub fn push_meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn render(&self, format: OutputFormat) -> Vec<u8> {
        match format {
            OutputFormat::Csv => self.to_csv().into_bytes(),
            OutputFormat::Json => self.to_json().into_bytes(),
            OutputFormat::Text => self.to_text().into_bytes(),
        }
    }

    fn schema(&self) -> String {
        self.columns
            .iter()
            .map(|c| c.kind.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// RFC 4180 body preceded by `# key: value` comment lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# title: {}\n", self.title));
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        out.push_str(&format!("# schema: {}\n", self.schema()));
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record(self.columns.iter().map(|c| c.name.as_str()))
            .expect("in-memory write");
        for row in &self.rows {
            writer
                .write_record(row.iter().map(cell_full_precision))
                .expect("in-memory write");
        }
        let body = writer.into_inner().expect("in-memory flush");
        out.push_str(std::str::from_utf8(&body).expect("utf-8"));
        out
    }

    pub fn parse_csv(text: &str) -> Result<Table, ReportError> {
        let mut title = None;
        let mut meta = Vec::new();
        let mut schema = None;
        let mut body_start = 0;
        for line in text.split_inclusive('\n') {
            let Some(comment) = line.strip_prefix("# ") else {
                break;
            };
            body_start += line.len();
            let (k, v) = comment
                .trim_end_matches(['\n', '\r'])
                .split_once(": ")
                .ok_or_else(|| ReportError::Parse(format!("bad preamble line `{line}`")))?;
            match k {
                "title" => title = Some(v.to_string()),
                "schema" => schema = Some(v.to_string()),
                _ => meta.push((k.to_string(), v.to_string())),
            }
        }
        let schema = schema.ok_or_else(|| ReportError::Parse("missing schema line".into()))?;
        let kinds = schema
            .split(',')
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<ColumnKind>, _>>()?;
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(&text.as_bytes()[body_start..]);
        let headers = reader
            .headers()
            .map_err(|e| ReportError::Parse(e.to_string()))?
            .clone();
        if headers.len() != kinds.len() {
            return Err(ReportError::Parse("schema and header disagree".into()));
        }
        let columns: Vec<Column> = headers
            .iter()
            .zip(&kinds)
            .map(|(n, k)| Column::new(n, *k))
            .collect();
        let mut table = Table::new(title.as_deref().unwrap_or_default(), columns);
        table.meta = meta;
        for record in reader.records() {
            let record = record.map_err(|e| ReportError::Parse(e.to_string()))?;
            let row = record
                .iter()
                .zip(&kinds)
                .map(|(raw, kind)| parse_cell(raw, *kind))
                .collect::<Result<Vec<_>, _>>()?;
            table.rows.push(row);
        }
        Ok(table)
    }

    /// `{"meta": {...}, "rows": [...]}` with rows as objects in column order.
    pub fn to_json(&self) -> String {
        let mut meta = Map::new();
        meta.insert("title".into(), Value::String(self.title.clone()));
        for (k, v) in &self.meta {
            meta.insert(k.clone(), Value::String(v.clone()));
        }
        meta.insert(
            "columns".into(),
            Value::Array(
                self.columns
                    .iter()
                    .map(|c| json!({"name": c.name, "kind": c.kind.to_string()}))
                    .collect(),
            ),
        );
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (col, cell) in self.columns.iter().zip(row) {
                    obj.insert(col.name.clone(), cell_json(cell));
                }
                Value::Object(obj)
            })
            .collect();
        let doc = json!({"meta": Value::Object(meta), "rows": rows});
        let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
        s.push('\n');
        s
    }

    pub fn parse_json(text: &str) -> Result<Table, ReportError> {
        let bad = |m: &str| ReportError::Parse(m.to_string());
        let doc: Value = serde_json::from_str(text).map_err(|e| ReportError::Parse(e.to_string()))?;
        let meta = doc
            .get("meta")
            .and_then(Value::as_object)
            .ok_or_else(|| bad("missing meta"))?;
        let mut columns = Vec::new();
        for c in meta
            .get("columns")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing columns"))?
        {
            let name = c.get("name").and_then(Value::as_str).ok_or_else(|| bad("column name"))?;
            let kind = c.get("kind").and_then(Value::as_str).ok_or_else(|| bad("column kind"))?;
            columns.push(Column::new(name, kind.parse()?));
        }
        let title = meta.get("title").and_then(Value::as_str).unwrap_or_default();
        let mut table = Table::new(title, columns);
        for (k, v) in meta {
            if k != "title" && k != "columns" {
                let v = v.as_str().ok_or_else(|| bad("meta values are strings"))?;
                table.meta.push((k.clone(), v.to_string()));
            }
        }
        for row in doc
            .get("rows")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing rows"))?
        {
            let obj = row.as_object().ok_or_else(|| bad("row is not an object"))?;
            let mut cells = Vec::with_capacity(table.columns.len());
            for col in &table.columns {
                let v = obj.get(&col.name).unwrap_or(&Value::Null);
                cells.push(json_cell(v, col.kind)?);
            }
            table.rows.push(cells);
        }
        Ok(table)
    }

    /// Aligned plain text. Numbers are right-aligned, text left-aligned.
    pub fn to_text(&self) -> String {
        let header: Vec<String> = self.columns.iter().map(|c| c.name.clone()).collect();
        let body: Vec<Vec<String>> = self
            .rows
            .iter()
            .enumerate()
            .map(|(r, row)| {
                row.iter()
                    .zip(&self.columns)
                    .enumerate()
                    .map(|(c, (cell, col))| {
                        let mut s = cell_display(cell, col.kind);
                        if self.marks.contains(&(r, c)) {
                            s.push('*');
                        }
                        s
                    })
                    .collect()
            })
            .collect();
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|c| {
                body.iter()
                    .map(|r| r[c].chars().count())
                    .chain([header[c].chars().count()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let right = |c: usize| matches!(self.columns[c].kind, ColumnKind::Int | ColumnKind::Float(_));
        let fmt_row = |cells: &[String]| {
            let parts: Vec<String> = cells
                .iter()
                .enumerate()
                .map(|(c, s)| {
                    let pad = widths[c] - s.chars().count();
                    if right(c) {
                        format!("{}{s}", " ".repeat(pad))
                    } else {
                        format!("{s}{}", " ".repeat(pad))
                    }
                })
                .collect();
            parts.join("  ").trim_end().to_string()
        };

        let mut out = String::new();
        out.push_str(&self.title);
        out.push('\n');
        if !self.meta.is_empty() {
            let meta: Vec<String> = self.meta.iter().map(|(k, v)| format!("{k}={v}")).collect();
            out.push_str(&meta.join("  "));
            out.push('\n');
        }
        out.push('\n');
        out.push_str(&fmt_row(&header));
        out.push('\n');
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        out.push_str(&rule.join("  "));
        out.push('\n');
        for row in &body {
            out.push_str(&fmt_row(row));
            out.push('\n');
        }
        out
    }
}

fn float_text(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        v.to_string()
    }
}

fn cell_full_precision(cell: &Cell) -> String {
    match cell {
        Cell::Int(i) => i.to_string(),
        Cell::Float(f) => float_text(*f),
        Cell::Text(s) => s.clone(),
        Cell::Bool(b) => b.to_string(),
        Cell::Empty => String::new(),
    }
}

fn cell_display(cell: &Cell, kind: ColumnKind) -> String {
    match (cell, kind) {
        (Cell::Float(f), ColumnKind::Float(d)) => round_half_away(*f, d),
        _ => cell_full_precision(cell),
    }
}

fn cell_json(cell: &Cell) -> Value {
    match cell {
        Cell::Int(i) => json!(i),
        Cell::Float(f) if f.is_finite() => json!(f),
        Cell::Float(f) => Value::String(float_text(*f)),
        Cell::Text(s) => Value::String(s.clone()),
        Cell::Bool(b) => Value::Bool(*b),
        Cell::Empty => Value::Null,
    }
}

fn parse_cell(raw: &str, kind: ColumnKind) -> Result<Cell, ReportError> {
    let bad = || ReportError::Parse(format!("`{raw}` is not a valid {kind}"));
    if raw.is_empty() && kind != ColumnKind::Text {
        return Ok(Cell::Empty);
    }
    Ok(match kind {
        ColumnKind::Int => Cell::Int(raw.parse().map_err(|_| bad())?),
        ColumnKind::Float(_) => Cell::Float(raw.parse().map_err(|_| bad())?),
        ColumnKind::Bool => Cell::Bool(raw.parse().map_err(|_| bad())?),
        ColumnKind::Text => Cell::Text(raw.to_string()),
    })
}

fn json_cell(v: &Value, kind: ColumnKind) -> Result<Cell, ReportError> {
    let bad = || ReportError::Parse(format!("`{v}` is not a valid {kind}"));
    Ok(match (v, kind) {
        (Value::Null, _) => Cell::Empty,
        (Value::Number(n), ColumnKind::Int) => Cell::Int(n.as_i64().ok_or_else(bad)?),
        (Value::Number(n), ColumnKind::Float(_)) => Cell::Float(n.as_f64().ok_or_else(bad)?),
        (Value::String(s), ColumnKind::Float(_)) => Cell::Float(s.parse().map_err(|_| bad())?),
        (Value::String(s), ColumnKind::Text) => Cell::Text(s.clone()),
        (Value::Bool(b), ColumnKind::Bool) => Cell::Bool(*b),
        _ => return Err(bad()),
    })
}

/// Round the shortest decimal representation of `value` to `decimals`
/// places, ties away from zero. `0.665` becomes `"0.67"`.
pub fn round_half_away(value: f64, decimals: usize) -> String {
    if !value.is_finite() {
        return float_text(value);
    }
    let repr = value.abs().to_string();
    let (int_part, frac_part) = repr.split_once('.').unwrap_or((&repr, ""));
    let mut digits: Vec<u8> = int_part
        .bytes()
        .chain(frac_part.bytes().chain(std::iter::repeat(b'0')).take(decimals))
        .map(|b| b - b'0')
        .collect();
    let round_up = frac_part.as_bytes().get(decimals).is_some_and(|&d| d >= b'5');
    if round_up {
        let mut i = digits.len();
        loop {
            if i == 0 {
                digits.insert(0, 1);
                break;
            }
            i -= 1;
            if digits[i] == 9 {
                digits[i] = 0;
            } else {
                digits[i] += 1;
                break;
            }
        }
    }
    let split = digits.len() - decimals;
    let int_digits: String = digits[..split].iter().map(|d| char::from(b'0' + d)).collect();
    let frac_digits: String = digits[split..].iter().map(|d| char::from(b'0' + d)).collect();
    let negative = value < 0.0 && digits.iter().any(|&d| d != 0);
    let sign = if negative { "-" } else { "" };
    if decimals == 0 {
        format!("{sign}{int_digits}")
    } else {
        format!("{sign}{int_digits}.{frac_digits}")
    }
}

// ---------------------------------------------------------------------------
// Rankings

/// A player and the value it is ranked by; `None` ranks after every number.
#[derive(Debug, Clone, PartialEq)]
pub struct RankEntry {
    pub player_id: String,
    pub player_name: String,
    pub value: Option<f64>,
    pub aux: Vec<Cell>,
    pub note: Option<String>,
}

impl RankEntry {
    pub fn new(player_id: &str, player_name: &str, value: f64) -> Self {
        RankEntry {
            player_id: player_id.to_string(),
            player_name: player_name.to_string(),
            value: Some(value),
            aux: Vec::new(),
            note: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedRow {
    pub rank: usize,
    pub player_id: String,
    pub player_name: String,
    pub value: Option<f64>,
    /// Shares its value with a neighbour; order comes from the name tie-break.
    pub tied: bool,
    pub aux: Vec<Cell>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedTable {
    pub title: String,
    pub metric_name: String,
    pub meta: ReportMeta,
    pub value_column: String,
    pub aux_columns: Vec<Column>,
    pub decimals: usize,
    pub extra_meta: Vec<(String, String)>,
    pub rows: Vec<RankedRow>,
}

/// Values closer than this, relative to the larger magnitude, rank as tied.
/// Rounding noise from reweighting stays far below it.
pub const TIE_RELATIVE_TOLERANCE: f64 = 1e-9;

fn near_equal(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => x == y || (x - y).abs() <= TIE_RELATIVE_TOLERANCE * x.abs().max(y.abs()),
        (None, None) => true,
        _ => false,
    }
}

fn by_value_desc(a: &RankEntry, b: &RankEntry) -> Ordering {
    match (a.value, b.value) {
        (Some(x), Some(y)) => y.partial_cmp(&x).unwrap_or(Ordering::Equal),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    }
}

fn by_name(a: &RankEntry, b: &RankEntry) -> Ordering {
    a.player_name
        .cmp(&b.player_name)
        .then_with(|| a.player_id.cmp(&b.player_id))
}

/// Rank entries by descending value. Runs of (near-)equal values are tied:
/// ordered by ascending player name and flagged.
pub fn rank_entries(entries: Vec<RankEntry>) -> Vec<RankedRow> {
    let mut entries = entries;
    entries.sort_by(|a, b| by_value_desc(a, b).then_with(|| by_name(a, b)));
    let mut rows = Vec::with_capacity(entries.len());
    let mut rest = entries.as_mut_slice();
    while !rest.is_empty() {
        let mut len = 1;
        while len < rest.len() && near_equal(rest[len - 1].value, rest[len].value) {
            len += 1;
        }
        let (run, tail) = rest.split_at_mut(len);
        run.sort_by(by_name);
        for e in run.iter() {
            rows.push(RankedRow {
                rank: rows.len() + 1,
                player_id: e.player_id.clone(),
                player_name: e.player_name.clone(),
                value: e.value,
                tied: len > 1,
                aux: e.aux.clone(),
                note: e.note.clone(),
            });
        }
        rest = tail;
    }
    rows
}

impl RankedTable {
    /// A plain ranking of precomputed values.
    pub fn from_values(title: &str, metric_name: &str, meta: ReportMeta, entries: Vec<RankEntry>) -> Self {
        RankedTable {
            title: title.to_string(),
            metric_name: metric_name.to_string(),
            meta,
            value_column: metric_name.to_string(),
            aux_columns: Vec::new(),
            decimals: 2,
            extra_meta: Vec::new(),
            rows: rank_entries(entries),
        }
    }

    pub fn rank_of(&self, player_id: &str) -> Option<usize> {
        self.rows
            .iter()
            .find(|r| r.player_id == player_id)
            .map(|r| r.rank)
    }

    pub fn to_table(&self) -> Table {
        let mut columns = vec![
            Column::new("rank", ColumnKind::Int),
            Column::new("player_id", ColumnKind::Text),
            Column::new("player_name", ColumnKind::Text),
            Column::new(&self.value_column, ColumnKind::Float(self.decimals)),
        ];
        columns.extend(self.aux_columns.iter().cloned());
        columns.push(Column::new("tied", ColumnKind::Bool));
        columns.push(Column::new("note", ColumnKind::Text));
        let mut meta = vec![("metric".to_string(), self.metric_name.clone())];
        meta.extend(self.meta.pairs());
        meta.extend(self.extra_meta.iter().cloned());
        let mut table = Table::new(&self.title, columns).with_meta(meta);
        for row in &self.rows {
            let mut cells = vec![
                Cell::Int(row.rank as i64),
                Cell::Text(row.player_id.clone()),
                Cell::Text(row.player_name.clone()),
                row.value.into(),
            ];
            cells.extend(row.aux.iter().cloned());
            cells.push(Cell::Bool(row.tied));
            cells.push(Cell::Text(row.note.clone().unwrap_or_default()));
            table.push_row(cells);
        }
        table
    }

    pub fn render(&self, format: OutputFormat) -> Vec<u8> {
        self.to_table().render(format)
    }
}

/// Rank every player of the dataset with at least `min_games` games by the
/// mean of their per-game `spec` series.
pub fn rank_players(
    dataset: &Dataset,
    spec: MetricSpec,
    w: &WeightConfig,
    min_games: usize,
    meta: ReportMeta,
) -> Result<RankedTable, ReportError> {
    let filtered = filter_min_games(dataset, min_games);
    let mut entries = Vec::new();
    for player in filtered.players() {
        let build = dataset_series(&filtered, &player.player_id, spec, w);
        let Some(series) = build.series else {
            continue;
        };
        let mean = stats::mean(series.values())?;
        let mut entry = RankEntry::new(&player.player_id, &player.player_name, mean);
        entry.aux = vec![
            Cell::Int(series.len() as i64),
            Cell::Int(build.excluded_dnp as i64),
        ];
        entries.push(entry);
    }
    if entries.is_empty() {
        return Err(ReportError::EmptyAfterFilter);
    }
    let mut table = RankedTable::from_values(
        &format!("Ranking by mean {spec}"),
        &spec.name(),
        meta,
        entries,
    );
    table.aux_columns = vec![
        Column::new("games", ColumnKind::Int),
        Column::new("dnp_excluded", ColumnKind::Int),
    ];
    Ok(table)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaRow {
    pub player_id: String,
    pub player_name: String,
    pub rank_a: usize,
    pub value_a: Option<f64>,
    pub rank_b: usize,
    pub value_b: Option<f64>,
    /// `rank_a - rank_b`; positive means the player climbs from a to b.
    pub delta: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaTable {
    pub metric_a: String,
    pub metric_b: String,
    pub meta: ReportMeta,
    pub rows: Vec<DeltaRow>,
}

impl DeltaTable {
    pub fn delta_of(&self, player_id: &str) -> Option<i64> {
        self.rows
            .iter()
            .find(|r| r.player_id == player_id)
            .map(|r| r.delta)
    }

    pub fn to_table(&self) -> Table {
        let a = &self.metric_a;
        let b = &self.metric_b;
        let columns = vec![
            Column::new("player_id", ColumnKind::Text),
            Column::new("player_name", ColumnKind::Text),
            Column::new(&format!("{a}_value"), ColumnKind::Float(2)),
            Column::new(&format!("{a}_rank"), ColumnKind::Int),
            Column::new(&format!("{b}_value"), ColumnKind::Float(2)),
            Column::new(&format!("{b}_rank"), ColumnKind::Int),
            Column::new("delta", ColumnKind::Int),
        ];
        let mut meta = vec![
            ("metric_a".to_string(), a.clone()),
            ("metric_b".to_string(), b.clone()),
        ];
        meta.extend(self.meta.pairs());
        let mut table = Table::new(&format!("Rank change from {a} to {b}"), columns).with_meta(meta);
        for r in &self.rows {
            table.push_row(vec![
                Cell::Text(r.player_id.clone()),
                Cell::Text(r.player_name.clone()),
                r.value_a.into(),
                Cell::Int(r.rank_a as i64),
                r.value_b.into(),
                Cell::Int(r.rank_b as i64),
                Cell::Int(r.delta),
            ]);
        }
        table
    }

    pub fn render(&self, format: OutputFormat) -> Vec<u8> {
        self.to_table().render(format)
    }
}

/// Position change of every player between two rankings, listed in the
/// order of the second ranking.
pub fn rank_delta(a: &RankedTable, b: &RankedTable) -> Result<DeltaTable, ReportError> {
    let in_a: BTreeMap<&str, &RankedRow> = a.rows.iter().map(|r| (r.player_id.as_str(), r)).collect();
    let in_b: BTreeSet<&str> = b.rows.iter().map(|r| r.player_id.as_str()).collect();
    if in_a.len() != in_b.len() || !in_a.keys().all(|p| in_b.contains(p)) {
        return Err(ReportError::PlayerSetMismatch);
    }
    let rows = b
        .rows
        .iter()
        .map(|rb| {
            let ra = in_a[rb.player_id.as_str()];
            DeltaRow {
                player_id: rb.player_id.clone(),
                player_name: rb.player_name.clone(),
                rank_a: ra.rank,
                value_a: ra.value,
                rank_b: rb.rank,
                value_b: rb.value,
                delta: ra.rank as i64 - rb.rank as i64,
            }
        })
        .collect();
    Ok(DeltaTable {
        metric_a: a.metric_name.clone(),
        metric_b: b.metric_name.clone(),
        meta: b.meta.clone(),
        rows,
    })
}

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    })
}

/// Regularity ranking: mean, sample standard deviation, mean rank,
/// regularity and regularity rank per player. Players with fewer than two
/// observations are left out. Rows whose mean is not comparable with the
/// median mean (relative `tolerance`) carry a warning note.
pub fn regularity_table(
    dataset: &Dataset,
    spec: MetricSpec,
    w: &WeightConfig,
    min_games: usize,
    tolerance: f64,
    meta: ReportMeta,
) -> Result<RankedTable, ReportError> {
    let filtered = filter_min_games(dataset, min_games);
    let mut summaries = Vec::new();
    for player in filtered.players() {
        let Some(series) = dataset_series(&filtered, &player.player_id, spec, w).series else {
            continue;
        };
        if series.len() < 2 {
            log::debug!("{}: fewer than two observations, left out of regularity", player.player_id);
            continue;
        }
        summaries.push((player, stats::summarize(&series)?));
    }
    if summaries.is_empty() {
        return Err(ReportError::EmptyAfterFilter);
    }
    regularity_from_summaries(
        &format!("Regularity of {spec}"),
        &spec.name(),
        summaries
            .into_iter()
            .map(|(p, s)| (p.player_id, p.player_name, s))
            .collect(),
        tolerance,
        meta,
    )
}

/// Regularity ranking from precomputed summaries.
pub fn regularity_from_summaries(
    title: &str,
    metric_name: &str,
    summaries: Vec<(String, String, stats::SeriesSummary)>,
    tolerance: f64,
    meta: ReportMeta,
) -> Result<RankedTable, ReportError> {
    if summaries.is_empty() {
        return Err(ReportError::EmptyAfterFilter);
    }
    let mean_ranks: BTreeMap<String, usize> = rank_entries(
        summaries
            .iter()
            .map(|(id, name, s)| RankEntry::new(id, name, s.mean))
            .collect(),
    )
    .into_iter()
    .map(|r| (r.player_id, r.rank))
    .collect();
    let mut means: Vec<f64> = summaries.iter().map(|(_, _, s)| s.mean).collect();
    let median_mean = median(&mut means).expect("nonempty");

    let entries = summaries
        .iter()
        .map(|(id, name, s)| {
            let mut notes = Vec::new();
            if s.regularity.is_constant() {
                notes.push("constant series".to_string());
            }
            if !stats::descriptive::means_within(s.mean, median_mean, tolerance) {
                notes.push(format!("mean not comparable with median {}", round_half_away(median_mean, 3)));
            }
            RankEntry {
                player_id: id.clone(),
                player_name: name.clone(),
                value: match s.regularity {
                    Regularity::Value(v) => Some(v),
                    Regularity::ConstantSeries => None,
                },
                aux: vec![
                    Cell::Float(s.mean),
                    Cell::Float(s.sd_sample),
                    Cell::Int(mean_ranks[id] as i64),
                    Cell::Int(s.n as i64),
                ],
                note: (!notes.is_empty()).then(|| notes.join("; ")),
            }
        })
        .collect();
    let mut table = RankedTable::from_values(title, metric_name, meta, entries);
    table.value_column = "regularity".into();
    table.decimals = 3;
    table.aux_columns = vec![
        Column::new("mean", ColumnKind::Float(3)),
        Column::new("sd", ColumnKind::Float(3)),
        Column::new("mean_rank", ColumnKind::Int),
        Column::new("games", ColumnKind::Int),
    ];
    table.extra_meta = vec![
        ("comparable_tolerance".into(), tolerance.to_string()),
        ("median_mean".into(), median_mean.to_string()),
    ];
    Ok(table)
}

// ---------------------------------------------------------------------------
// Split, +/- and correlation reports

/// One player's comparison, or the reason it could not be made.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitRow {
    pub player_id: String,
    pub player_name: String,
    /// Error message when the comparison could not be made.
    pub outcome: Result<SplitComparison, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitReport {
    pub metric_name: String,
    pub split: String,
    pub meta: ReportMeta,
    pub rows: Vec<SplitRow>,
}

impl SplitReport {
    pub fn to_table(&self) -> Table {
        let columns = vec![
            Column::new("player_id", ColumnKind::Text),
            Column::new("player_name", ColumnKind::Text),
            Column::new("side_a", ColumnKind::Text),
            Column::new("n_a", ColumnKind::Int),
            Column::new("mean_a", ColumnKind::Float(3)),
            Column::new("side_b", ColumnKind::Text),
            Column::new("n_b", ColumnKind::Int),
            Column::new("mean_b", ColumnKind::Float(3)),
            Column::new("t", ColumnKind::Float(3)),
            Column::new("df", ColumnKind::Float(2)),
            Column::new("p_value", ColumnKind::Float(4)),
            Column::new("significant", ColumnKind::Bool),
            Column::new("note", ColumnKind::Text),
        ];
        let mut meta = vec![
            ("metric".to_string(), self.metric_name.clone()),
            ("split".to_string(), self.split.clone()),
        ];
        meta.extend(self.meta.pairs());
        let mut table = Table::new(
            &format!("{} by {} (* significant at alpha={})", self.metric_name, self.split, self.meta.alpha),
            columns,
        )
        .with_meta(meta);
        for (i, row) in self.rows.iter().enumerate() {
            let id = Cell::Text(row.player_id.clone());
            let name = Cell::Text(row.player_name.clone());
            match &row.outcome {
                Ok(c) => {
                    if c.significant {
                        table.marks.insert((i, 4));
                        table.marks.insert((i, 7));
                    }
                    let note = if c.degenerate { "both groups constant" } else { "" };
                    table.push_row(vec![
                        id,
                        name,
                        Cell::Text(c.group_a_label.clone()),
                        Cell::Int(c.n_a as i64),
                        Cell::Float(c.mean_a),
                        Cell::Text(c.group_b_label.clone()),
                        Cell::Int(c.n_b as i64),
                        Cell::Float(c.mean_b),
                        Cell::Float(c.t_stat),
                        Cell::Float(c.df),
                        Cell::Float(c.p_value),
                        Cell::Bool(c.significant),
                        Cell::Text(note.into()),
                    ]);
                }
                Err(e) => {
                    let mut cells = vec![id, name];
                    cells.extend(std::iter::repeat_n(Cell::Empty, 10));
                    cells[2] = Cell::Text(String::new());
                    cells[5] = Cell::Text(String::new());
                    cells.push(Cell::Text(e.clone()));
                    table.push_row(cells);
                }
            }
        }
        table
    }

    pub fn render(&self, format: OutputFormat) -> Vec<u8> {
        self.to_table().render(format)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlusMinusTable {
    pub meta: ReportMeta,
    pub rows: Vec<PlusMinusSummary>,
}

impl PlusMinusTable {
    pub fn to_table(&self) -> Table {
        let mut columns = vec![
            Column::new("player_id", ColumnKind::Text),
            Column::new("player_name", ColumnKind::Text),
            Column::new("games", ColumnKind::Int),
            Column::new("total", ColumnKind::Float(2)),
        ];
        if let Some(first) = self.rows.first() {
            for l in &first.labels {
                columns.push(Column::new(&l.label.side, ColumnKind::Float(2)));
            }
        }
        columns.push(Column::new("dnp_counted", ColumnKind::Int));
        columns.push(Column::new("missing", ColumnKind::Int));
        let mut table = Table::new("Mean +/- overall and by game context", columns)
            .with_meta(self.meta.pairs());
        for s in &self.rows {
            let mut cells = vec![
                Cell::Text(s.player_id.clone()),
                Cell::Text(s.player_name.clone()),
                Cell::Int(s.n as i64),
                s.overall.into(),
            ];
            cells.extend(s.labels.iter().map(|l| Cell::from(l.mean)));
            cells.push(Cell::Int(s.dnp_counted as i64));
            cells.push(Cell::Int(s.missing as i64));
            table.push_row(cells);
        }
        table
    }

    pub fn render(&self, format: OutputFormat) -> Vec<u8> {
        self.to_table().render(format)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub metric_x: String,
    pub metric_y: String,
    pub n_players: usize,
    pub meta: ReportMeta,
    pub tests: Vec<CorrelationTest>,
}

impl CorrelationReport {
    pub fn to_table(&self) -> Table {
        let columns = vec![
            Column::new("kind", ColumnKind::Text),
            Column::new("coefficient", ColumnKind::Float(3)),
            Column::new("n", ColumnKind::Int),
            Column::new("statistic", ColumnKind::Float(3)),
            Column::new("p_value", ColumnKind::Float(4)),
            Column::new("significant", ColumnKind::Bool),
            Column::new("exact", ColumnKind::Bool),
        ];
        let mut meta = vec![
            ("metric_x".to_string(), self.metric_x.clone()),
            ("metric_y".to_string(), self.metric_y.clone()),
        ];
        meta.extend(self.meta.pairs());
        let mut table = Table::new(
            &format!("Correlation of {} with {}", self.metric_x, self.metric_y),
            columns,
        )
        .with_meta(meta);
        for (i, t) in self.tests.iter().enumerate() {
            if t.significant {
                table.marks.insert((i, 1));
            }
            table.push_row(vec![
                Cell::Text(t.kind.to_string()),
                Cell::Float(t.coefficient),
                Cell::Int(t.n as i64),
                Cell::Float(t.statistic),
                Cell::Float(t.p_value),
                Cell::Bool(t.significant),
                Cell::Bool(t.exact),
            ]);
        }
        table
    }

    pub fn render(&self, format: OutputFormat) -> Vec<u8> {
        self.to_table().render(format)
    }
}
