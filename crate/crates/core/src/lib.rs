//! Basketball performance analytics from boxscore data.
//!
//! The crate follows a three-step workflow:
//!
//! 1. **Index**: per-game defensive, offensive and overall indices computed as
//!    weighted sums of boxscore counts ([`metrics`]), optionally normalized
//!    per minute played.
//! 2. **Regularity**: the mean of a per-game series divided by its sample
//!    standard deviation ([`stats::summarize`]).
//! 3. **Inference**: context splits (win/loss, close games, home/away,
//!    starter/bench, competition) compared with a Welch test ([`splits`]).
//!
//! [`ingest`] reads season datasets from CSV or JSON and [`report`] turns
//! results into ranked tables rendered as CSV, JSON or aligned text.

pub mod error;
pub mod ingest;
pub mod metrics;
pub mod model;
pub mod pipeline;
pub mod report;
pub mod splits;
pub mod stats;

pub use error::{ConfigError, IngestError, MetricsError, ReportError, SplitError, StatsError};
pub use ingest::{filter_min_games, parse_csv, parse_json, Dataset};
pub use metrics::{
    defensive_index, offensive_index, per_minute, rendimiento, valoracion_acb, IndexValue, Metric,
    MetricSpec,
};
pub use model::{
    derived_points, BoxscoreLine, GameMeta, MetricSeries, SplitComparison, StatKey, WeightConfig,
};
