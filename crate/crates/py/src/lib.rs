use std::collections::HashMap;

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use courtside_core::ingest::{read_csv_files, read_json_file};
use courtside_core::metrics::{self, MetricSpec};
use courtside_core::pipeline::{self, AnalysisConfig};
use courtside_core::report::{self, OutputFormat, RankEntry, RankedTable, ReportMeta, Table};
use courtside_core::splits::Split;
use courtside_core::stats::{self, CorrelationKind, Regularity};
use courtside_core::{BoxscoreLine, IngestError, SplitComparison, StatKey};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn ingest_err(e: IngestError) -> PyErr {
    if e.is_io() {
        PyOSError::new_err(e.to_string())
    } else {
        value_err(e)
    }
}

/// Coefficients of the defensive and offensive indices.
#[pyclass(name = "WeightConfig", module = "courtside", from_py_object)]
#[derive(Clone)]
struct PyWeightConfig {
    inner: courtside_core::WeightConfig,
}

#[pymethods]
impl PyWeightConfig {
    /// Default weights, with `overrides` (statistic name -> weight) applied.
    #[new]
    #[pyo3(signature = (overrides=None))]
    fn new(overrides: Option<HashMap<String, f64>>) -> PyResult<Self> {
        let mut inner = courtside_core::WeightConfig::default();
        for (name, value) in overrides.unwrap_or_default() {
            let key: StatKey = name.parse().map_err(value_err)?;
            if !value.is_finite() {
                return Err(PyValueError::new_err(format!("weight for {name} is not finite")));
            }
            inner.set(key, value);
        }
        Ok(PyWeightConfig { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = courtside_core::WeightConfig::from_json_str(text).map_err(value_err)?;
        Ok(PyWeightConfig { inner })
    }

    fn get(&self, key: &str) -> PyResult<f64> {
        Ok(self.inner.get(key.parse().map_err(value_err)?))
    }

    fn scaled(&self, factor: f64) -> Self {
        PyWeightConfig {
            inner: self.inner.scaled(factor),
        }
    }

    fn fingerprint(&self) -> String {
        self.inner.fingerprint()
    }

    fn to_json(&self) -> String {
        self.inner.to_json_string()
    }

    fn as_dict(&self) -> HashMap<String, f64> {
        self.inner.iter().map(|(k, v)| (k.as_str().to_string(), v)).collect()
    }

    fn __repr__(&self) -> String {
        format!("WeightConfig(fingerprint='{}')", self.inner.fingerprint())
    }
}

/// A validated season: games plus boxscore lines.
#[pyclass(name = "Dataset", module = "courtside", frozen)]
struct PyDataset {
    inner: courtside_core::Dataset,
}

#[pymethods]
impl PyDataset {
    #[staticmethod]
    fn from_csv(games: &str, lines: &str) -> PyResult<Self> {
        let inner = courtside_core::parse_csv(games.as_bytes(), lines.as_bytes()).map_err(ingest_err)?;
        Ok(PyDataset { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = courtside_core::parse_json(text.as_bytes()).map_err(ingest_err)?;
        Ok(PyDataset { inner })
    }

    #[staticmethod]
    fn read_csv(games: std::path::PathBuf, lines: std::path::PathBuf) -> PyResult<Self> {
        let inner = read_csv_files(&games, &lines).map_err(ingest_err)?;
        Ok(PyDataset { inner })
    }

    #[staticmethod]
    fn read_json(path: std::path::PathBuf) -> PyResult<Self> {
        let inner = read_json_file(&path).map_err(ingest_err)?;
        Ok(PyDataset { inner })
    }

    /// `(player_id, player_name)` pairs sorted by id.
    fn players(&self) -> Vec<(String, String)> {
        self.inner
            .players()
            .into_iter()
            .map(|p| (p.player_id, p.player_name))
            .collect()
    }

    fn games_count(&self) -> usize {
        self.inner.games().len()
    }

    fn games_played(&self, player_id: &str) -> usize {
        self.inner.games_played(player_id)
    }

    fn filter_min_games(&self, min_games: usize) -> Self {
        PyDataset {
            inner: courtside_core::filter_min_games(&self.inner, min_games),
        }
    }

    fn to_csv(&self) -> (String, String) {
        self.inner.to_csv()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    /// Per-game values of `metric` for one player.
    #[pyo3(signature = (player_id, metric, weights=None))]
    fn series(&self, player_id: &str, metric: &str, weights: Option<PyWeightConfig>) -> PyResult<Vec<f64>> {
        let spec: MetricSpec = metric.parse().map_err(value_err)?;
        let w = weights.map(|w| w.inner).unwrap_or_default();
        Ok(metrics::dataset_series(&self.inner, player_id, spec, &w)
            .series
            .map(|s| s.values().to_vec())
            .unwrap_or_default())
    }

    fn __len__(&self) -> usize {
        self.inner.lines().len()
    }

    fn __eq__(&self, other: &PyDataset) -> bool {
        self.inner == other.inner
    }
}

fn line_from_dict(counts: &HashMap<String, f64>) -> PyResult<BoxscoreLine> {
    let mut line = BoxscoreLine::empty("", "", "");
    for (name, &value) in counts {
        match name.to_ascii_lowercase().as_str() {
            "minutes" => line.minutes = value,
            other => {
                if value < 0.0 || value.fract() != 0.0 || value > f64::from(u32::MAX) {
                    return Err(PyValueError::new_err(format!("{name} must be a non-negative integer")));
                }
                let count = value as u32;
                if other == "tr" {
                    line.tr = count;
                } else {
                    *line.count_mut(other.parse().map_err(value_err)?) = count;
                }
            }
        }
    }
    Ok(line)
}

/// Defensive, offensive and overall index plus the league efficiency rating
/// for one boxscore line given as `{"T2C": 5, "RD": 3, "minutes": 24.5, ...}`.
#[pyfunction]
#[pyo3(signature = (line, weights=None))]
fn line_indices(line: HashMap<String, f64>, weights: Option<PyWeightConfig>) -> PyResult<HashMap<String, f64>> {
    let line = line_from_dict(&line)?;
    let w = weights.map(|w| w.inner).unwrap_or_default();
    let v = metrics::rendimiento(&line, &w);
    Ok(HashMap::from([
        ("id".to_string(), v.id_raw),
        ("io".to_string(), v.io_raw),
        ("rend".to_string(), v.rend_raw),
        ("valoracion".to_string(), v.valoracion_raw),
    ]))
}

#[pyfunction]
fn per_minute(value: f64, minutes: f64) -> PyResult<f64> {
    metrics::per_minute(value, minutes).map_err(value_err)
}

/// Mean, sample and population sd, and regularity (`None` for a constant series).
#[pyfunction]
fn summarize<'py>(py: Python<'py>, values: Vec<f64>) -> PyResult<Bound<'py, PyDict>> {
    let s = stats::summarize_values(&values).map_err(value_err)?;
    let d = PyDict::new(py);
    d.set_item("n", s.n)?;
    d.set_item("mean", s.mean)?;
    d.set_item("sd_sample", s.sd_sample)?;
    d.set_item("sd_population", s.sd_population)?;
    d.set_item(
        "regularity",
        match s.regularity {
            Regularity::Value(v) => Some(v),
            Regularity::ConstantSeries => None,
        },
    )?;
    Ok(d)
}

#[pyfunction]
fn pearson(x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    stats::pearson(&x, &y).map_err(value_err)
}

#[pyfunction]
fn spearman(x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    stats::spearman(&x, &y).map_err(value_err)
}

#[pyfunction]
fn kendall_tau(x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    stats::kendall_tau(&x, &y).map_err(value_err)
}

/// Two-sided test of zero correlation for coefficient `r` over `n` pairs.
#[pyfunction]
#[pyo3(signature = (r, n, kind="pearson", alpha=0.05))]
fn correlation_test<'py>(py: Python<'py>, r: f64, n: usize, kind: &str, alpha: f64) -> PyResult<Bound<'py, PyDict>> {
    let kind: CorrelationKind = kind.parse().map_err(value_err)?;
    let t = stats::correlation_significance(r, n, kind, alpha).map_err(value_err)?;
    let d = PyDict::new(py);
    d.set_item("kind", t.kind.as_str())?;
    d.set_item("coefficient", t.coefficient)?;
    d.set_item("n", t.n)?;
    d.set_item("statistic", t.statistic)?;
    d.set_item("p_value", t.p_value)?;
    d.set_item("significant", t.significant)?;
    d.set_item("exact", t.exact)?;
    Ok(d)
}

fn comparison_dict<'py>(py: Python<'py>, c: &SplitComparison) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("metric", &c.metric_name)?;
    d.set_item("group_a", &c.group_a_label)?;
    d.set_item("group_b", &c.group_b_label)?;
    d.set_item("n_a", c.n_a)?;
    d.set_item("n_b", c.n_b)?;
    d.set_item("mean_a", c.mean_a)?;
    d.set_item("mean_b", c.mean_b)?;
    d.set_item("t_stat", c.t_stat)?;
    d.set_item("df", c.df)?;
    d.set_item("p_value", c.p_value)?;
    d.set_item("significant", c.significant)?;
    d.set_item("degenerate", c.degenerate)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (a, b, alpha=0.05))]
fn welch_test<'py>(py: Python<'py>, a: Vec<f64>, b: Vec<f64>, alpha: f64) -> PyResult<Bound<'py, PyDict>> {
    let c = stats::welch_test(&a, &b, alpha).map_err(value_err)?;
    comparison_dict(py, &c)
}

#[pyfunction]
fn round_half_away(value: f64, decimals: usize) -> String {
    report::round_half_away(value, decimals)
}

/// Analysis settings shared by the report functions.
#[pyclass(name = "Analysis", module = "courtside", frozen)]
struct PyAnalysis {
    cfg: AnalysisConfig,
}

fn parse_format(format: &str) -> PyResult<OutputFormat> {
    format.parse().map_err(PyValueError::new_err)
}

fn render(table: &Table, format: &str) -> PyResult<String> {
    Ok(String::from_utf8(table.render(parse_format(format)?)).expect("renders are utf-8"))
}

fn spec(metric: &str) -> PyResult<MetricSpec> {
    metric.parse().map_err(value_err)
}

#[pymethods]
impl PyAnalysis {
    #[new]
    #[pyo3(signature = (weights=None, alpha=0.05, min_games=10, close_threshold=5))]
    fn new(weights: Option<PyWeightConfig>, alpha: f64, min_games: usize, close_threshold: u32) -> PyResult<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(PyValueError::new_err("alpha must lie in (0, 1)"));
        }
        Ok(PyAnalysis {
            cfg: AnalysisConfig {
                weights: weights.map(|w| w.inner).unwrap_or_default(),
                alpha,
                min_games,
                close_threshold,
                ..AnalysisConfig::default()
            },
        })
    }

    /// Ranking by mean metric (`"rend"`, `"valoracion_per_minute"`, ...).
    #[pyo3(signature = (dataset, metric, format="text"))]
    fn rank(&self, dataset: &PyDataset, metric: &str, format: &str) -> PyResult<String> {
        let c = &self.cfg;
        let t = report::rank_players(&dataset.inner, spec(metric)?, &c.weights, c.min_games, c.meta())
            .map_err(value_err)?;
        render(&t.to_table(), format)
    }

    #[pyo3(signature = (dataset, metric, format="text"))]
    fn regularity(&self, dataset: &PyDataset, metric: &str, format: &str) -> PyResult<String> {
        let c = &self.cfg;
        let t = report::regularity_table(
            &dataset.inner,
            spec(metric)?,
            &c.weights,
            c.min_games,
            c.comparable_tolerance,
            c.meta(),
        )
        .map_err(value_err)?;
        render(&t.to_table(), format)
    }

    #[pyo3(signature = (dataset, metric_a, metric_b, format="text"))]
    fn delta(&self, dataset: &PyDataset, metric_a: &str, metric_b: &str, format: &str) -> PyResult<String> {
        let c = &self.cfg;
        let a = report::rank_players(&dataset.inner, spec(metric_a)?, &c.weights, c.min_games, c.meta())
            .map_err(value_err)?;
        let b = report::rank_players(&dataset.inner, spec(metric_b)?, &c.weights, c.min_games, c.meta())
            .map_err(value_err)?;
        render(&report::rank_delta(&a, &b).map_err(value_err)?.to_table(), format)
    }

    #[pyo3(signature = (dataset, metric_x, metric_y, format="text"))]
    fn correlate(&self, dataset: &PyDataset, metric_x: &str, metric_y: &str, format: &str) -> PyResult<String> {
        let r = pipeline::correlate(&dataset.inner, spec(metric_x)?, spec(metric_y)?, &self.cfg).map_err(value_err)?;
        render(&r.to_table(), format)
    }

    /// Welch comparison of one player's metric across a split
    /// (`"win-loss"`, `"close-game"`, `"home-away"`, `"starter-bench"`,
    /// `"competition:NAME"`).
    fn split<'py>(
        &self,
        py: Python<'py>,
        dataset: &PyDataset,
        player_id: &str,
        metric: &str,
        split: &str,
    ) -> PyResult<Bound<'py, PyDict>> {
        let split: Split = split.parse().map_err(value_err)?;
        let c = courtside_core::splits::split_compare(
            player_id,
            spec(metric)?,
            &split,
            &dataset.inner,
            &self.cfg.weights,
            self.cfg.alpha,
            &self.cfg.split_context(),
        )
        .map_err(value_err)?;
        comparison_dict(py, &c)
    }

    #[pyo3(signature = (dataset, format="text"))]
    fn plus_minus(&self, dataset: &PyDataset, format: &str) -> PyResult<String> {
        render(
            &pipeline::plus_minus_table(&dataset.inner, &self.cfg).map_err(value_err)?.to_table(),
            format,
        )
    }

    /// Every standard report as `{file name: rendered text}`.
    #[pyo3(signature = (dataset, format="csv"))]
    fn report_all(&self, dataset: &PyDataset, format: &str) -> PyResult<HashMap<String, String>> {
        let tables = pipeline::report_all(&dataset.inner, &self.cfg).map_err(value_err)?;
        Ok(pipeline::render_all(&tables, parse_format(format)?)
            .into_iter()
            .map(|(name, bytes)| (name, String::from_utf8(bytes).expect("renders are utf-8")))
            .collect())
    }
}

/// Rank precomputed `(player_id, player_name, value)` triples. Returns
/// `(rank, player_id, value, tied)` rows in rank order.
#[pyfunction]
fn rank_values(entries: Vec<(String, String, f64)>) -> Vec<(usize, String, f64, bool)> {
    let entries = entries
        .iter()
        .map(|(id, name, v)| RankEntry::new(id, name, *v))
        .collect();
    let meta = ReportMeta::new(&Default::default(), 0.05, 0, 5);
    RankedTable::from_values("values", "value", meta, entries)
        .rows
        .into_iter()
        .map(|r| (r.rank, r.player_id, r.value.unwrap_or(f64::NAN), r.tied))
        .collect()
}

#[pymodule]
fn courtside(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyWeightConfig>()?;
    m.add_class::<PyDataset>()?;
    m.add_class::<PyAnalysis>()?;
    m.add_function(wrap_pyfunction!(line_indices, m)?)?;
    m.add_function(wrap_pyfunction!(per_minute, m)?)?;
    m.add_function(wrap_pyfunction!(summarize, m)?)?;
    m.add_function(wrap_pyfunction!(pearson, m)?)?;
    m.add_function(wrap_pyfunction!(spearman, m)?)?;
    m.add_function(wrap_pyfunction!(kendall_tau, m)?)?;
    m.add_function(wrap_pyfunction!(correlation_test, m)?)?;
    m.add_function(wrap_pyfunction!(welch_test, m)?)?;
    m.add_function(wrap_pyfunction!(round_half_away, m)?)?;
    m.add_function(wrap_pyfunction!(rank_values, m)?)?;
    Ok(())
}
