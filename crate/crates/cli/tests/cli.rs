use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use chrono::NaiveDate;
use courtside_core::report::{Cell, Table};
use courtside_core::{BoxscoreLine, Dataset, GameMeta, StatKey, WeightConfig};
use tempfile::TempDir;

/// Two teams, 20 games, four players each. Team A wins the even games.
/// Player A1 plays far better in wins than in losses.
fn fixture() -> Dataset {
    let margins = [3, 8, 12, 5, 1, 15, 6, 4, 9, 2];
    let mut games = Vec::new();
    let mut lines = Vec::new();
    for i in 0..20u32 {
        let id = format!("G{i:02}");
        let a_wins = i % 2 == 0;
        let margin = margins[i as usize % margins.len()];
        let (home, away) = if i % 4 < 2 { ("A", "B") } else { ("B", "A") };
        let a_score = if a_wins { 80 + margin } else { 80 };
        let b_score = if a_wins { 80 } else { 80 + margin };
        let (home_score, away_score) = if home == "A" { (a_score, b_score) } else { (b_score, a_score) };
        games.push(GameMeta {
            game_id: id.clone(),
            date: NaiveDate::from_ymd_opt(2014, 1, 1).unwrap() + chrono::Days::new(u64::from(i) * 7),
            competition: if i < 16 { "liga".into() } else { "copa".into() },
            home_team: home.into(),
            away_team: away.into(),
            home_score,
            away_score,
        });
        for team in ["A", "B"] {
            for p in 1..=4u32 {
                let pid = format!("{team}{p}");
                let mut line = BoxscoreLine::empty(&id, &pid, team);
                line.player_name = format!("Player {pid}");
                line.minutes = 15.0 + f64::from(p) * 3.0 + f64::from(i % 5);
                line.starter = p <= 2;
                line.plus_minus = Some(i as i32 % 7 - 3 + p as i32);
                line.t2c = (i + p) % 6;
                line.t2f = (i * p) % 5;
                line.t3c = (i + 2 * p) % 3;
                line.t3f = (i + p) % 4;
                line.t1c = p % 3 + i % 2;
                line.t1f = (i + p) % 2;
                line.rd = 2 + (i * 3 + p) % 7;
                line.ro = p % 3;
                line.a = (i + 3 * p) % 5;
                line.br = i % 2;
                line.bp = (i + p) % 3;
                line.fpc = (i + p) % 4;
                line.fpr = (2 * i + p) % 4;
                if pid == "A1" {
                    line.minutes = 20.0;
                    line.rd = if a_wins { 18 + i % 3 } else { 4 + i % 3 };
                }
                lines.push(line);
            }
        }
    }
    Dataset::from_parts(games, lines).unwrap()
}

struct Files {
    dir: TempDir,
    games: PathBuf,
    lines: PathBuf,
    json: PathBuf,
}

fn write_fixture(d: &Dataset) -> Files {
    let dir = tempfile::tempdir().unwrap();
    let (g, l) = d.to_csv();
    let games = dir.path().join("games.csv");
    let lines = dir.path().join("lines.csv");
    let json = dir.path().join("season.json");
    std::fs::write(&games, g).unwrap();
    std::fs::write(&lines, l).unwrap();
    std::fs::write(&json, d.to_json()).unwrap();
    Files { dir, games, lines, json }
}

fn courtside(files: &Files, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_courtside"))
        .arg("--games")
        .arg(&files.games)
        .arg("--lines")
        .arg(&files.lines)
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn csv_table(o: &Output) -> Table {
    assert_eq!(o.status.code(), Some(0), "{}", stderr(o));
    Table::parse_csv(&stdout(o)).unwrap()
}

fn column(t: &Table, name: &str) -> Vec<Cell> {
    let c = t.column_index(name).unwrap();
    t.rows.iter().map(|r| r[c].clone()).collect()
}

fn text_col(t: &Table, name: &str) -> Vec<String> {
    column(t, name)
        .into_iter()
        .map(|c| match c {
            Cell::Text(s) => s,
            other => panic!("{other:?}"),
        })
        .collect()
}

fn meta<'a>(t: &'a Table, key: &str) -> &'a str {
    &t.meta.iter().find(|(k, _)| k == key).unwrap().1
}

#[test]
fn validate_clean_dataset() {
    let f = write_fixture(&fixture());
    let out = courtside(&f, &["validate"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("20 games, 160 lines, 8 players"));

    let out = Command::new(env!("CARGO_BIN_EXE_courtside"))
        .arg("--json")
        .arg(&f.json)
        .arg("validate")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn validate_dangling_game_names_row() {
    let f = write_fixture(&fixture());
    let mut text = std::fs::read_to_string(&f.lines).unwrap();
    text.push_str("G99,A1,Player A1,A,10,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,,false\n");
    std::fs::write(&f.lines, text).unwrap();
    let out = courtside(&f, &["validate"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("row 162"), "{err}");
    assert!(err.contains("G99"), "{err}");
}

#[test]
fn missing_file_is_io_failure() {
    let f = write_fixture(&fixture());
    let out = Command::new(env!("CARGO_BIN_EXE_courtside"))
        .arg("--games")
        .arg(f.dir.path().join("nope.csv"))
        .arg("--lines")
        .arg(&f.lines)
        .arg("validate")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn rank_per_minute_matches_fixture_oracle() {
    let d = fixture();
    let f = write_fixture(&d);
    let t = csv_table(&courtside(&f, &["rank", "rend", "--per-minute", "--format", "csv"]));

    // oracle: written-out index formula, divided per game, then averaged
    let mut expected: Vec<(String, f64)> = d
        .players()
        .into_iter()
        .map(|p| {
            let values: Vec<f64> = d
                .player_lines(&p.player_id)
                .map(|l| {
                    let v = |x: u32| f64::from(x);
                    let id = v(l.rd) + v(l.tf) - v(l.fpc) + 2.0 * v(l.br);
                    let io = v(l.t2c) + v(l.t1c) + 1.5 * v(l.t3c) - v(l.t2f) - 2.0 * v(l.t1f) - v(l.t3f)
                        + 2.0 * v(l.ro)
                        + 2.0 * v(l.a)
                        + 1.5 * v(l.fpr)
                        - 2.0 * v(l.bp);
                    (id + io) / l.minutes
                })
                .collect();
            (p.player_id, values.iter().sum::<f64>() / values.len() as f64)
        })
        .collect();
    expected.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    let ids: Vec<String> = expected.iter().map(|e| e.0.clone()).collect();
    assert_eq!(text_col(&t, "player_id"), ids);
    for (cell, (_, want)) in column(&t, "rend_per_minute").iter().zip(&expected) {
        let Cell::Float(got) = cell else { panic!() };
        assert!((got - want).abs() < 1e-12);
    }
    assert_eq!(meta(&t, "weights"), WeightConfig::default().fingerprint());
    assert_eq!(meta(&t, "alpha"), "0.05");
    assert_eq!(meta(&t, "min_games"), "10");
    assert_eq!(meta(&t, "close_threshold"), "5");
}

#[test]
fn rank_with_unreachable_min_games_fails() {
    let f = write_fixture(&fixture());
    let out = courtside(&f, &["rank", "rend", "--min-games", "999"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("no players"));
}

#[test]
fn regularity_ranking_via_suffix() {
    let f = write_fixture(&fixture());
    let a = csv_table(&courtside(&f, &["rank", "rend:reg", "--format", "csv"]));
    let b = csv_table(&courtside(&f, &["regularity", "rend", "--format", "csv"]));
    assert_eq!(a, b);
    for col in ["regularity", "mean", "sd", "mean_rank"] {
        assert!(a.column_index(col).is_some(), "{col}");
    }
}

#[test]
fn delta_report() {
    let f = write_fixture(&fixture());
    let t = csv_table(&courtside(&f, &["delta", "valoracion", "rend", "--format", "csv"]));
    assert_eq!(t.rows.len(), 8);
    let deltas: i64 = column(&t, "delta")
        .iter()
        .map(|c| match c {
            Cell::Int(v) => *v,
            _ => panic!(),
        })
        .sum();
    assert_eq!(deltas, 0);
}

#[test]
fn split_flags_planted_player() {
    let f = write_fixture(&fixture());
    let out = courtside(
        &f,
        &["splits", "--player", "A1", "--metric", "rend", "--per-minute", "--split", "win-loss"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let row = text.lines().find(|l| l.starts_with("A1")).unwrap();
    assert!(row.contains('*'), "{text}");

    let t = csv_table(&courtside(&f, &["splits", "--player", "A1", "--split", "win-loss", "--format", "csv"]));
    assert_eq!(column(&t, "significant"), vec![Cell::Bool(true)]);
    assert_eq!(text_col(&t, "side_a"), vec!["loss"]);
}

#[test]
fn split_with_thin_side_warns_and_succeeds() {
    let f = write_fixture(&fixture());
    // "copa" holds 4 games, all others pooled; a threshold of 0 leaves no close games
    let t = csv_table(&courtside(
        &f,
        &["splits", "--split", "close-game", "--close-threshold", "0", "--format", "csv"],
    ));
    assert_eq!(t.rows.len(), 8);
    assert!(text_col(&t, "note").iter().all(|n| n.contains("at least 2")));
}

#[test]
fn plus_minus_summary_table() {
    let f = write_fixture(&fixture());
    let t = csv_table(&courtside(&f, &["splits", "--summary", "--format", "csv"]));
    let names: Vec<&str> = t.columns.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(
        names,
        ["player_id", "player_name", "games", "total", "close", "win", "loss", "dnp_counted", "missing"]
    );
    assert_eq!(t.rows.len(), 8);
}

#[test]
fn unknown_player_fails() {
    let f = write_fixture(&fixture());
    let out = courtside(&f, &["splits", "--player", "ZZ"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("ZZ"));
}

#[test]
fn correlate_metric_with_itself() {
    let f = write_fixture(&fixture());
    let t = csv_table(&courtside(&f, &["correlate", "rend", "rend", "--format", "csv"]));
    assert_eq!(text_col(&t, "kind"), ["pearson", "kendall", "spearman"]);
    assert_eq!(column(&t, "coefficient"), vec![Cell::Float(1.0); 3]);

    let t = csv_table(&courtside(&f, &["correlate", "valoracion", "points", "--format", "csv"]));
    for c in column(&t, "coefficient") {
        let Cell::Float(r) = c else { panic!() };
        assert!((-1.0..=1.0).contains(&r));
    }
}

#[test]
fn weight_override_changes_fingerprint() {
    let f = write_fixture(&fixture());
    let path = f.dir.path().join("weights.json");
    std::fs::write(&path, r#"{"BR": 3.0}"#).unwrap();
    let t = csv_table(&courtside(
        &f,
        &["rank", "rend", "--weights", path.to_str().unwrap(), "--format", "csv"],
    ));
    let expected = WeightConfig::default().with(StatKey::Br, 3.0).fingerprint();
    assert_eq!(meta(&t, "weights"), expected);
    assert_ne!(expected, WeightConfig::default().fingerprint());

    std::fs::write(&path, r#"{"XX": 3.0}"#).unwrap();
    let out = courtside(&f, &["rank", "rend", "--weights", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_alpha_rejected() {
    let f = write_fixture(&fixture());
    assert_eq!(courtside(&f, &["rank", "rend", "--alpha", "1.5"]).status.code(), Some(2));
    assert_eq!(courtside(&f, &["rank", "rend", "--min-games", "0"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let f = write_fixture(&fixture());
    for format in ["csv", "json", "text"] {
        let a = courtside(&f, &["rank", "valoracion", "--format", format]);
        let b = courtside(&f, &["rank", "valoracion", "--format", format]);
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn report_all_writes_directory() {
    let f = write_fixture(&fixture());
    let dir = f.dir.path().join("report");
    let out = courtside(
        &f,
        &["report-all", "--min-games", "5", "--format", "json", "--out", dir.to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    for name in [
        "rank_valoracion.json",
        "rank_rend.json",
        "delta_valoracion_rend.json",
        "regularity_rend.json",
        "plus_minus.json",
        "split_win_loss.json",
        "correlation_valoracion_rend.json",
        "weights.json",
    ] {
        assert!(Path::new(&dir.join(name)).exists(), "{name}");
    }
    let text = std::fs::read_to_string(dir.join("rank_rend.json")).unwrap();
    assert!(Table::parse_json(&text).is_ok());
}
