//! Season datasets: a games table plus a table of per-player lines, read from
//! CSV or JSON and validated as a unit.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::Read;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::Serialize;
use serde_json::Value;

use crate::error::{IngestError, Row, Table};
use crate::model::{derived_points, BoxscoreLine, GameMeta};

pub const GAMES_HEADER: [&str; 7] = [
    "game_id",
    "date",
    "competition",
    "home_team",
    "away_team",
    "home_score",
    "away_score",
];

pub const LINES_HEADER: [&str; 22] = [
    "game_id",
    "player_id",
    "player_name",
    "team",
    "minutes",
    "t2c",
    "t2f",
    "t3c",
    "t3f",
    "t1c",
    "t1f",
    "rd",
    "ro",
    "a",
    "br",
    "bp",
    "tf",
    "tr",
    "fpc",
    "fpr",
    "plus_minus",
    "starter",
];

/// Optional trailing column checked against the derived points.
pub const POINTS_COLUMN: &str = "points";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Memory,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub sources: Vec<PathBuf>,
    pub format: Format,
}

impl Provenance {
    pub fn memory() -> Self {
        Provenance {
            sources: Vec::new(),
            format: Format::Memory,
        }
    }
}

/// A validated season: every line references a known game, belongs to one of
/// its two teams, and `(player_id, game_id)` is unique.
#[derive(Debug, Clone)]
pub struct Dataset {
    games: BTreeMap<String, GameMeta>,
    lines: Vec<BoxscoreLine>,
    provenance: Provenance,
}

/// Equality compares content only; where the data came from is ignored.
impl PartialEq for Dataset {
    fn eq(&self, other: &Self) -> bool {
        self.games == other.games && self.lines == other.lines
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PlayerRef {
    pub player_id: String,
    pub player_name: String,
}

impl Dataset {
    /// Validate in-memory records. Rows are numbered from 1 in input order.
    pub fn from_parts(
        games: Vec<GameMeta>,
        lines: Vec<BoxscoreLine>,
    ) -> Result<Self, IngestError> {
        let mut builder = Builder::default();
        for (i, game) in games.into_iter().enumerate() {
            builder.add_game(row(Table::Games, i as u64 + 1), game)?;
        }
        for (i, line) in lines.into_iter().enumerate() {
            builder.add_line(row(Table::Lines, i as u64 + 1), line)?;
        }
        Ok(builder.finish(Provenance::memory()))
    }

    pub fn games(&self) -> &BTreeMap<String, GameMeta> {
        &self.games
    }

    pub fn game(&self, game_id: &str) -> Option<&GameMeta> {
        self.games.get(game_id)
    }

    pub fn lines(&self) -> &[BoxscoreLine] {
        &self.lines
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    /// Lines of one player, in input order.
    pub fn player_lines<'a>(
        &'a self,
        player_id: &'a str,
    ) -> impl Iterator<Item = &'a BoxscoreLine> + 'a {
        self.lines.iter().filter(move |l| l.player_id == player_id)
    }

    pub fn has_player(&self, player_id: &str) -> bool {
        self.lines.iter().any(|l| l.player_id == player_id)
    }

    /// Distinct players sorted by id. The name is taken from the first line seen.
    pub fn players(&self) -> Vec<PlayerRef> {
        let mut seen = BTreeMap::new();
        for line in &self.lines {
            seen.entry(line.player_id.clone())
                .or_insert_with(|| line.player_name.clone());
        }
        seen.into_iter()
            .map(|(player_id, player_name)| PlayerRef {
                player_id,
                player_name,
            })
            .collect()
    }

    /// Number of did-not-play (zero-minute) lines.
    pub fn dnp_count(&self) -> usize {
        self.lines.iter().filter(|l| l.is_dnp()).count()
    }

    pub fn games_played(&self, player_id: &str) -> usize {
        self.player_lines(player_id)
            .map(|l| l.game_id.as_str())
            .collect::<HashSet<_>>()
            .len()
    }

    /// Serialize to the two-file CSV layout `(games, lines)`.
    pub fn to_csv(&self) -> (String, String) {
        let mut games = csv::Writer::from_writer(Vec::new());
        games.write_record(GAMES_HEADER).expect("in-memory write");
        for g in self.games.values() {
            games
                .write_record([
                    g.game_id.clone(),
                    g.date.format("%Y-%m-%d").to_string(),
                    g.competition.clone(),
                    g.home_team.clone(),
                    g.away_team.clone(),
                    g.home_score.to_string(),
                    g.away_score.to_string(),
                ])
                .expect("in-memory write");
        }
        let mut lines = csv::Writer::from_writer(Vec::new());
        lines.write_record(LINES_HEADER).expect("in-memory write");
        for l in &self.lines {
            let counts = [
                l.t2c, l.t2f, l.t3c, l.t3f, l.t1c, l.t1f, l.rd, l.ro, l.a, l.br, l.bp, l.tf, l.tr,
                l.fpc, l.fpr,
            ];
            let mut record = vec![
                l.game_id.clone(),
                l.player_id.clone(),
                l.player_name.clone(),
                l.team.clone(),
                l.minutes.to_string(),
            ];
            record.extend(counts.iter().map(u32::to_string));
            record.push(l.plus_minus.map(|v| v.to_string()).unwrap_or_default());
            record.push(l.starter.to_string());
            lines.write_record(&record).expect("in-memory write");
        }
        (finish_csv(games), finish_csv(lines))
    }

    /// Serialize to the single-document JSON layout.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            games: Vec<&'a GameMeta>,
            lines: &'a [BoxscoreLine],
        }
        serde_json::to_string_pretty(&Doc {
            games: self.games.values().collect(),
            lines: &self.lines,
        })
        .expect("dataset always serializes")
    }
}

fn finish_csv(writer: csv::Writer<Vec<u8>>) -> String {
    let bytes = writer.into_inner().expect("in-memory flush");
    String::from_utf8(bytes).expect("csv writer emits utf-8")
}

fn row(table: Table, index: u64) -> Row {
    Row { table, index }
}

#[derive(Default)]
struct Builder {
    games: BTreeMap<String, GameMeta>,
    lines: Vec<BoxscoreLine>,
    keys: HashSet<(String, String)>,
}

impl Builder {
    fn add_game(&mut self, at: Row, game: GameMeta) -> Result<(), IngestError> {
        if game.home_team == game.away_team {
            return Err(IngestError::SameTeams {
                row: at,
                game_id: game.game_id,
            });
        }
        if game.home_score == game.away_score {
            return Err(IngestError::TiedScore {
                row: at,
                game_id: game.game_id,
            });
        }
        if self.games.contains_key(&game.game_id) {
            return Err(IngestError::DuplicateGame {
                row: at,
                game_id: game.game_id,
            });
        }
        self.games.insert(game.game_id.clone(), game);
        Ok(())
    }

    fn add_line(&mut self, at: Row, line: BoxscoreLine) -> Result<(), IngestError> {
        if !line.minutes.is_finite() || line.minutes < 0.0 {
            return Err(IngestError::BadValue {
                row: at,
                field: "minutes".into(),
                value: line.minutes.to_string(),
                reason: "minutes must be a finite number >= 0".into(),
            });
        }
        let Some(game) = self.games.get(&line.game_id) else {
            return Err(IngestError::DanglingGameRef {
                row: at,
                game_id: line.game_id,
            });
        };
        if !game.involves(&line.team) {
            return Err(IngestError::TeamNotInGame {
                row: at,
                team: line.team,
                game_id: line.game_id,
            });
        }
        let key = (line.player_id.clone(), line.game_id.clone());
        if !self.keys.insert(key) {
            return Err(IngestError::DuplicateLine {
                row: at,
                player_id: line.player_id,
                game_id: line.game_id,
            });
        }
        self.lines.push(line);
        Ok(())
    }

    fn finish(self, provenance: Provenance) -> Dataset {
        Dataset {
            games: self.games,
            lines: self.lines,
            provenance,
        }
    }
}

/// Read access to one record's raw text fields, whatever the source format.
trait Record {
    fn at(&self) -> Row;
    fn get(&self, field: &str) -> Option<&str>;

    fn text(&self, field: &str) -> Result<String, IngestError> {
        self.get(field)
            .map(str::to_string)
            .ok_or_else(|| IngestError::MissingColumn {
                table: self.at().table,
                column: field.to_string(),
            })
    }

    fn bad(&self, field: &str, value: &str, reason: &str) -> IngestError {
        IngestError::BadValue {
            row: self.at(),
            field: field.to_string(),
            value: value.to_string(),
            reason: reason.to_string(),
        }
    }

    fn count(&self, field: &str) -> Result<u32, IngestError> {
        let raw = self.text(field)?;
        if raw.starts_with('-') && raw[1..].parse::<u64>().is_ok() {
            return Err(self.bad(field, &raw, "counts cannot be negative"));
        }
        raw.parse::<u32>()
            .map_err(|_| self.bad(field, &raw, "expected a nonnegative integer"))
    }

    fn minutes(&self) -> Result<f64, IngestError> {
        let raw = self.text("minutes")?;
        let value: f64 = raw
            .parse()
            .map_err(|_| self.bad("minutes", &raw, "expected a decimal number"))?;
        if !value.is_finite() || value < 0.0 {
            return Err(self.bad("minutes", &raw, "minutes must be a finite number >= 0"));
        }
        Ok(value)
    }

    fn nonempty(&self, field: &str) -> Result<String, IngestError> {
        let raw = self.text(field)?;
        if raw.is_empty() {
            return Err(self.bad(field, &raw, "must not be empty"));
        }
        Ok(raw)
    }

    fn game(&self) -> Result<GameMeta, IngestError> {
        let date_raw = self.text("date")?;
        let date = NaiveDate::parse_from_str(&date_raw, "%Y-%m-%d")
            .map_err(|_| self.bad("date", &date_raw, "expected an ISO-8601 date (YYYY-MM-DD)"))?;
        Ok(GameMeta {
            game_id: self.nonempty("game_id")?,
            date,
            competition: self.text("competition")?,
            home_team: self.nonempty("home_team")?,
            away_team: self.nonempty("away_team")?,
            home_score: self.count("home_score")?,
            away_score: self.count("away_score")?,
        })
    }

    fn line(&self) -> Result<BoxscoreLine, IngestError> {
        let plus_minus_raw = self.text("plus_minus")?;
        let plus_minus = if plus_minus_raw.is_empty() {
            None
        } else {
            Some(
                plus_minus_raw
                    .parse::<i32>()
                    .map_err(|_| self.bad("plus_minus", &plus_minus_raw, "expected an integer"))?,
            )
        };
        let starter_raw = self.text("starter")?;
        let starter = match starter_raw.as_str() {
            "true" => true,
            "false" => false,
            _ => return Err(self.bad("starter", &starter_raw, "expected true or false")),
        };
        let line = BoxscoreLine {
            game_id: self.nonempty("game_id")?,
            player_id: self.nonempty("player_id")?,
            player_name: self.text("player_name")?,
            team: self.nonempty("team")?,
            minutes: self.minutes()?,
            t2c: self.count("t2c")?,
            t2f: self.count("t2f")?,
            t3c: self.count("t3c")?,
            t3f: self.count("t3f")?,
            t1c: self.count("t1c")?,
            t1f: self.count("t1f")?,
            rd: self.count("rd")?,
            ro: self.count("ro")?,
            a: self.count("a")?,
            br: self.count("br")?,
            bp: self.count("bp")?,
            tf: self.count("tf")?,
            tr: self.count("tr")?,
            fpc: self.count("fpc")?,
            fpr: self.count("fpr")?,
            plus_minus,
            starter,
        };
        if let Some(raw) = self.get(POINTS_COLUMN) {
            if !raw.is_empty() {
                let declared = self.count(POINTS_COLUMN)?;
                let derived = derived_points(&line);
                if declared != derived {
                    return Err(IngestError::PointsMismatch {
                        row: self.at(),
                        declared,
                        derived,
                    });
                }
            }
        }
        Ok(line)
    }
}

struct CsvRecord<'a> {
    at: Row,
    columns: &'a BTreeMap<&'static str, usize>,
    record: &'a csv::StringRecord,
}

impl Record for CsvRecord<'_> {
    fn at(&self) -> Row {
        self.at
    }

    fn get(&self, field: &str) -> Option<&str> {
        self.columns.get(field).and_then(|&i| self.record.get(i))
    }
}

/// Check an exact, ordered header. Only the optional columns may follow it.
fn check_header(
    table: Table,
    found: &[String],
    expected: &[&'static str],
    optional: &[&'static str],
) -> Result<BTreeMap<&'static str, usize>, IngestError> {
    for column in expected {
        if !found.iter().any(|f| f == column) {
            return Err(IngestError::MissingColumn {
                table,
                column: column.to_string(),
            });
        }
    }
    for (position, column) in expected.iter().enumerate() {
        if found[position] != *column {
            return Err(IngestError::HeaderOrder {
                table,
                position,
                expected: column.to_string(),
                found: found[position].clone(),
            });
        }
    }
    let mut map: BTreeMap<&'static str, usize> =
        expected.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    for (i, column) in found.iter().enumerate().skip(expected.len()) {
        match optional.iter().find(|o| *o == column) {
            Some(o) if !map.contains_key(o) => {
                map.insert(o, i);
            }
            _ => {
                return Err(IngestError::UnexpectedColumn {
                    table,
                    column: column.clone(),
                })
            }
        }
    }
    Ok(map)
}

fn read_csv_table<R: Read>(
    source: R,
    table: Table,
    expected: &[&'static str],
    optional: &[&'static str],
    mut each: impl FnMut(&dyn Record) -> Result<(), IngestError>,
) -> Result<(), IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(source);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let columns = check_header(table, &header, expected, optional)?;
    let mut record = csv::StringRecord::new();
    while reader.read_record(&mut record)? {
        let line = record.position().map(|p| p.line()).unwrap_or_default();
        each(&CsvRecord {
            at: row(table, line),
            columns: &columns,
            record: &record,
        })?;
    }
    Ok(())
}

/// Parse the two-file CSV layout.
pub fn parse_csv<G: Read, L: Read>(games: G, lines: L) -> Result<Dataset, IngestError> {
    let mut builder = Builder::default();
    read_csv_table(games, Table::Games, &GAMES_HEADER, &[], |r| {
        let game = r.game()?;
        builder.add_game(r.at(), game)
    })?;
    read_csv_table(lines, Table::Lines, &LINES_HEADER, &[POINTS_COLUMN], |r| {
        let line = r.line()?;
        builder.add_line(r.at(), line)
    })?;
    Ok(builder.finish(Provenance {
        sources: Vec::new(),
        format: Format::Csv,
    }))
}

pub fn read_csv_files(games: &Path, lines: &Path) -> Result<Dataset, IngestError> {
    let g = std::fs::File::open(games)?;
    let l = std::fs::File::open(lines)?;
    Ok(parse_csv(g, l)?.with_provenance(Provenance {
        sources: vec![games.to_path_buf(), lines.to_path_buf()],
        format: Format::Csv,
    }))
}

struct JsonRecord {
    at: Row,
    fields: BTreeMap<String, String>,
}

impl Record for JsonRecord {
    fn at(&self) -> Row {
        self.at
    }

    fn get(&self, field: &str) -> Option<&str> {
        self.fields.get(field).map(String::as_str)
    }
}

fn json_record(
    at: Row,
    value: &Value,
    allowed: &BTreeSet<&str>,
) -> Result<JsonRecord, IngestError> {
    let Value::Object(map) = value else {
        return Err(IngestError::Json(format!("{at}: expected an object")));
    };
    let mut fields = BTreeMap::new();
    for (key, v) in map {
        if !allowed.contains(key.as_str()) {
            return Err(IngestError::UnexpectedColumn {
                table: at.table,
                column: key.clone(),
            });
        }
        let text = match v {
            Value::Null => String::new(),
            Value::Bool(b) => b.to_string(),
            Value::Number(n) => n.to_string(),
            Value::String(s) => s.clone(),
            other => {
                return Err(IngestError::BadValue {
                    row: at,
                    field: key.clone(),
                    value: other.to_string(),
                    reason: "expected a scalar".into(),
                })
            }
        };
        fields.insert(key.clone(), text);
    }
    Ok(JsonRecord { at, fields })
}

fn json_array<'a>(doc: &'a Value, key: &str) -> Result<&'a Vec<Value>, IngestError> {
    match doc.get(key) {
        Some(Value::Array(items)) => Ok(items),
        Some(_) => Err(IngestError::Json(format!("`{key}` must be an array"))),
        None => Err(IngestError::Json(format!("missing `{key}` array"))),
    }
}

/// Parse a single JSON document `{"games": [...], "lines": [...]}` whose
/// field names mirror the CSV headers.
pub fn parse_json<R: Read>(mut source: R) -> Result<Dataset, IngestError> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| IngestError::Json(e.to_string()))?;
    if !doc.is_object() {
        return Err(IngestError::Json("top level must be an object".into()));
    }
    let game_fields: BTreeSet<&str> = GAMES_HEADER.iter().copied().collect();
    let line_fields: BTreeSet<&str> = LINES_HEADER
        .iter()
        .copied()
        .chain([POINTS_COLUMN])
        .collect();

    let mut builder = Builder::default();
    for (i, item) in json_array(&doc, "games")?.iter().enumerate() {
        let r = json_record(row(Table::Games, i as u64 + 1), item, &game_fields)?;
        let game = r.game()?;
        builder.add_game(r.at(), game)?;
    }
    for (i, item) in json_array(&doc, "lines")?.iter().enumerate() {
        let r = json_record(row(Table::Lines, i as u64 + 1), item, &line_fields)?;
        let line = r.line()?;
        builder.add_line(r.at(), line)?;
    }
    Ok(builder.finish(Provenance {
        sources: Vec::new(),
        format: Format::Json,
    }))
}

pub fn read_json_file(path: &Path) -> Result<Dataset, IngestError> {
    let f = std::fs::File::open(path)?;
    Ok(parse_json(f)?.with_provenance(Provenance {
        sources: vec![path.to_path_buf()],
        format: Format::Json,
    }))
}

/// Keep only players who appear in at least `min_games` distinct games.
/// The games table is left untouched.
pub fn filter_min_games(dataset: &Dataset, min_games: usize) -> Dataset {
    let mut games_per_player: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for line in &dataset.lines {
        games_per_player
            .entry(&line.player_id)
            .or_default()
            .insert(&line.game_id);
    }
    let keep: HashSet<&str> = games_per_player
        .into_iter()
        .filter(|(_, games)| games.len() >= min_games)
        .map(|(p, _)| p)
        .collect();
    Dataset {
        games: dataset.games.clone(),
        lines: dataset
            .lines
            .iter()
            .filter(|l| keep.contains(l.player_id.as_str()))
            .cloned()
            .collect(),
        provenance: dataset.provenance.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GAMES: &str = "\
game_id,date,competition,home_team,away_team,home_score,away_score
G1,2013-10-12,liga,RMA,BAR,80,75
G2,2013-10-19,liga,VAL,RMA,90,70
";

    const LINES: &str = "\
game_id,player_id,player_name,team,minutes,t2c,t2f,t3c,t3f,t1c,t1f,rd,ro,a,br,bp,tf,tr,fpc,fpr,plus_minus,starter
G1,p1,Rodriguez,RMA,23.01,4,3,2,2,3,1,5,2,3,1,2,1,0,2,2,7,true
G2,p1,Rodriguez,RMA,18.5,1,0,0,1,0,0,2,0,6,0,1,0,1,1,0,-12,false
";

    fn header_with_points() -> String {
        let mut lines = LINES.lines();
        let header = format!("{},points", lines.next().unwrap());
        let rows: Vec<String> = lines.map(|l| l.to_string()).collect();
        format!("{header}\n{},17\n{},2\n", rows[0], rows[1])
    }

    #[test]
    fn two_game_fixture() {
        let ds = parse_csv(GAMES.as_bytes(), LINES.as_bytes()).unwrap();
        assert_eq!(ds.lines().len(), 2);
        assert_eq!(ds.games().len(), 2);
        // 2*4 + 3*2 + 3 and 2*1
        assert_eq!(ds.lines()[0].points(), 17);
        assert_eq!(ds.lines()[1].points(), 2);
        assert_eq!(ds.lines()[1].plus_minus, Some(-12));
        assert!(!ds.lines()[1].starter);
        assert_eq!(ds.lines()[0].minutes, 23.01);
    }

    #[test]
    fn empty_lines_file() {
        let header = LINES.lines().next().unwrap();
        let ds = parse_csv(GAMES.as_bytes(), header.as_bytes()).unwrap();
        assert!(ds.is_empty());
        assert_eq!(ds.games().len(), 2);
    }

    #[test]
    fn dangling_game_ref() {
        let bad = LINES.replace("G2,p1", "G999,p1");
        match parse_csv(GAMES.as_bytes(), bad.as_bytes()) {
            Err(IngestError::DanglingGameRef { row, game_id }) => {
                assert_eq!(game_id, "G999");
                assert_eq!(row.index, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_column() {
        let bad = LINES.replace(",starter", "");
        let bad: String = bad
            .lines()
            .map(|l| {
                if l.starts_with("game_id") {
                    l.to_string()
                } else {
                    l.rsplit_once(',').unwrap().0.to_string()
                }
            })
            .collect::<Vec<_>>()
            .join("\n");
        assert!(matches!(
            parse_csv(GAMES.as_bytes(), bad.as_bytes()),
            Err(IngestError::MissingColumn { column, .. }) if column == "starter"
        ));
    }

    #[test]
    fn header_order_is_enforced() {
        let bad = LINES.replacen("t2c,t2f", "t2f,t2c", 1);
        assert!(matches!(
            parse_csv(GAMES.as_bytes(), bad.as_bytes()),
            Err(IngestError::HeaderOrder { .. })
        ));
    }

    #[test]
    fn bad_values() {
        let negative = LINES.replace("23.01,4,3", "23.01,-4,3");
        match parse_csv(GAMES.as_bytes(), negative.as_bytes()) {
            Err(IngestError::BadValue { field, row, .. }) => {
                assert_eq!(field, "t2c");
                assert_eq!(row.index, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
        let text = LINES.replace("23.01,4,3", "23.01,four,3");
        assert!(matches!(
            parse_csv(GAMES.as_bytes(), text.as_bytes()),
            Err(IngestError::BadValue { .. })
        ));
        let minutes = LINES.replace("23.01", "-1");
        assert!(matches!(
            parse_csv(GAMES.as_bytes(), minutes.as_bytes()),
            Err(IngestError::BadValue { field, .. }) if field == "minutes"
        ));
        let comma = LINES.replace("23.01", "\"23,01\"");
        assert!(matches!(
            parse_csv(GAMES.as_bytes(), comma.as_bytes()),
            Err(IngestError::BadValue { field, .. }) if field == "minutes"
        ));
    }

    #[test]
    fn duplicate_line() {
        let dup = format!("{LINES}G1,p1,Rodriguez,RMA,1,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,false\n");
        assert!(matches!(
            parse_csv(GAMES.as_bytes(), dup.as_bytes()),
            Err(IngestError::DuplicateLine { .. })
        ));
    }

    #[test]
    fn team_must_play_in_game() {
        let bad = LINES.replace("G2,p1,Rodriguez,RMA", "G2,p1,Rodriguez,BAR");
        assert!(matches!(
            parse_csv(GAMES.as_bytes(), bad.as_bytes()),
            Err(IngestError::TeamNotInGame { .. })
        ));
    }

    #[test]
    fn tied_games_rejected() {
        let bad = GAMES.replace("80,75", "80,80");
        assert!(matches!(
            parse_csv(bad.as_bytes(), LINES.as_bytes()),
            Err(IngestError::TiedScore { .. })
        ));
    }

    #[test]
    fn points_column_is_validated() {
        let good = header_with_points();
        assert!(parse_csv(GAMES.as_bytes(), good.as_bytes()).is_ok());
        let bad = good.replace(",17\n", ",18\n");
        assert!(matches!(
            parse_csv(GAMES.as_bytes(), bad.as_bytes()),
            Err(IngestError::PointsMismatch {
                declared: 18,
                derived: 17,
                ..
            })
        ));
    }

    #[test]
    fn empty_plus_minus_is_no_observation() {
        let blank = LINES.replace(",-12,false", ",,false");
        let ds = parse_csv(GAMES.as_bytes(), blank.as_bytes()).unwrap();
        assert_eq!(ds.lines()[1].plus_minus, None);
    }

    #[test]
    fn json_matches_csv() {
        let csv = parse_csv(GAMES.as_bytes(), LINES.as_bytes()).unwrap();
        let json = parse_json(csv.to_json().as_bytes()).unwrap();
        assert_eq!(csv, json);
        assert_eq!(json.provenance().format, Format::Json);
    }

    #[test]
    fn empty_json_document() {
        let ds = parse_json(r#"{"games":[],"lines":[]}"#.as_bytes()).unwrap();
        assert!(ds.is_empty());
        assert!(ds.games().is_empty());
    }

    #[test]
    fn json_missing_minutes() {
        let csv = parse_csv(GAMES.as_bytes(), LINES.as_bytes()).unwrap();
        let mut doc: Value = serde_json::from_str(&csv.to_json()).unwrap();
        doc["lines"][0].as_object_mut().unwrap().remove("minutes");
        assert!(matches!(
            parse_json(doc.to_string().as_bytes()),
            Err(IngestError::MissingColumn { column, .. }) if column == "minutes"
        ));
    }

    #[test]
    fn min_games_filter() {
        let ds = parse_csv(GAMES.as_bytes(), LINES.as_bytes()).unwrap();
        assert_eq!(filter_min_games(&ds, 1), ds);
        assert_eq!(filter_min_games(&ds, 2), ds);
        let dropped = filter_min_games(&ds, 3);
        assert!(dropped.is_empty());
        assert_eq!(dropped.games().len(), 2);
    }

    #[test]
    fn dnp_lines_are_accepted() {
        let dnp = LINES.replace("18.5", "0");
        let ds = parse_csv(GAMES.as_bytes(), dnp.as_bytes()).unwrap();
        assert_eq!(ds.dnp_count(), 1);
    }
}
