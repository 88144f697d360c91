mod common;

use courtside_core::metrics::{Metric, MetricSpec};
use courtside_core::pipeline::{correlate, plus_minus_table, split_report, AnalysisConfig};
use courtside_core::report::{
    rank_delta, rank_players, regularity_table, Cell, Column, ColumnKind, OutputFormat, RankEntry,
    RankedTable, ReportMeta, Table,
};
use courtside_core::splits::Split;
use courtside_core::{ReportError, WeightConfig};
use proptest::prelude::*;

fn meta() -> ReportMeta {
    ReportMeta::new(&WeightConfig::default(), 0.05, 10, 5)
}

#[test]
fn delta_is_antisymmetric_on_a_season() {
    let d = common::synthetic_season(60, 1);
    let w = WeightConfig::default();
    let a = rank_players(&d, MetricSpec::raw(Metric::Valoracion), &w, 10, meta()).unwrap();
    let b = rank_players(&d, MetricSpec::raw(Metric::Rend), &w, 10, meta()).unwrap();
    let ab = rank_delta(&a, &b).unwrap();
    let ba = rank_delta(&b, &a).unwrap();
    for row in &ab.rows {
        assert_eq!(row.delta, -ba.delta_of(&row.player_id).unwrap());
    }
    assert!(rank_delta(&a, &a).unwrap().rows.iter().all(|r| r.delta == 0));
}

#[test]
fn regularity_table_orders_and_ranks() {
    let d = common::synthetic_season(40, 2);
    let t = regularity_table(&d, MetricSpec::raw(Metric::Rend), &WeightConfig::default(), 10, 0.25, meta()).unwrap();
    let values: Vec<f64> = t.rows.iter().map(|r| r.value.unwrap()).collect();
    assert!(values.windows(2).all(|w| w[0] >= w[1]));
    let mut mean_ranks: Vec<i64> = t
        .rows
        .iter()
        .map(|r| match r.aux[2] {
            Cell::Int(v) => v,
            _ => panic!(),
        })
        .collect();
    mean_ranks.sort();
    assert_eq!(mean_ranks, (1..=40).collect::<Vec<_>>());
    let text = String::from_utf8(t.render(OutputFormat::Text)).unwrap();
    assert!(text.contains("regularity"));
}

#[test]
fn filters_surface_domain_errors() {
    let d = common::synthetic_season(30, 3);
    let w = WeightConfig::default();
    assert!(matches!(
        rank_players(&d, MetricSpec::raw(Metric::Rend), &w, 35, meta()),
        Err(ReportError::EmptyAfterFilter)
    ));
    let few = common::synthetic_season(3, 3);
    let cfg = AnalysisConfig::default();
    assert!(matches!(
        correlate(&few, MetricSpec::raw(Metric::Points), MetricSpec::raw(Metric::Rend), &cfg),
        Err(ReportError::TooFewPlayers { needed: 4, got: 3 })
    ));
}

#[test]
fn split_and_plus_minus_reports() {
    let d = common::synthetic_season(36, 4);
    let cfg = AnalysisConfig::default();
    let r = split_report(&d, None, MetricSpec::per_minute(Metric::Rend), &Split::HomeAway, &cfg).unwrap();
    assert_eq!(r.rows.len(), 36);
    let table = r.to_table();
    assert_eq!(Table::parse_csv(&table.to_csv()).unwrap(), table);

    let competition: Split = "competition:playoff".parse().unwrap();
    let r = split_report(&d, Some("P000"), MetricSpec::raw(Metric::Points), &competition, &cfg).unwrap();
    let c = r.rows[0].outcome.as_ref().unwrap();
    assert_eq!((c.group_a_label.as_str(), c.group_b_label.as_str()), ("playoff", "other"));

    let pm = plus_minus_table(&d, &cfg).unwrap();
    let t = pm.to_table();
    for col in ["total", "close", "win", "loss"] {
        assert!(t.column_index(col).is_some());
    }
}

#[test]
fn correlation_report_has_three_kinds() {
    let d = common::synthetic_season(50, 5);
    let c = correlate(
        &d,
        MetricSpec::raw(Metric::Valoracion),
        MetricSpec::raw(Metric::Points),
        &AnalysisConfig::default(),
    )
    .unwrap();
    assert_eq!(c.n_players, 50);
    assert!(c.tests.iter().all(|t| (-1.0..=1.0).contains(&t.coefficient)));
    // points feed valoración directly
    assert!(c.tests[0].coefficient > 0.5 && c.tests[0].significant);
}

fn cell(kind: ColumnKind) -> BoxedStrategy<Cell> {
    match kind {
        ColumnKind::Int => any::<i64>().prop_map(Cell::Int).boxed(),
        ColumnKind::Float(_) => prop_oneof![
            any::<f64>().prop_filter("finite", |v| v.is_finite()).prop_map(Cell::Float),
            Just(Cell::Float(f64::INFINITY)),
            Just(Cell::Empty),
        ]
        .boxed(),
        ColumnKind::Text => "[a-zA-Z0-9 ,\"'é;\n-]{0,12}".prop_map(Cell::Text).boxed(),
        ColumnKind::Bool => any::<bool>().prop_map(Cell::Bool).boxed(),
    }
}

fn table() -> impl Strategy<Value = Table> {
    let kinds = [ColumnKind::Int, ColumnKind::Float(2), ColumnKind::Text, ColumnKind::Bool, ColumnKind::Float(3)];
    let row = kinds.map(cell).to_vec();
    prop::collection::vec(row, 0..6).prop_map(move |rows| {
        let columns = kinds
            .iter()
            .enumerate()
            .map(|(i, k)| Column::new(&format!("c{i}"), *k))
            .collect();
        let mut t = Table::new("random", columns);
        t.push_meta("alpha", 0.05);
        t.rows = rows;
        t
    })
}

proptest! {
    #[test]
    fn rendered_tables_round_trip(t in table()) {
        prop_assert_eq!(&Table::parse_csv(&t.to_csv()).unwrap(), &t);
        prop_assert_eq!(&Table::parse_json(&t.to_json()).unwrap(), &t);
    }

    #[test]
    fn ranking_ignores_common_positive_scale(values in prop::collection::vec(-1e3..1e3f64, 1..25), k in 1e-3..1e3f64) {
        let entries = |f: f64| values.iter().enumerate()
            .map(|(i, v)| RankEntry::new(&format!("p{i}"), &format!("n{}", i % 5), v * f))
            .collect::<Vec<_>>();
        let order = |t: RankedTable| t.rows.into_iter().map(|r| r.player_id).collect::<Vec<_>>();
        prop_assert_eq!(
            order(RankedTable::from_values("t", "m", meta(), entries(1.0))),
            order(RankedTable::from_values("t", "m", meta(), entries(k)))
        );
    }
}
