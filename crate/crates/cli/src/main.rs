use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use courtside_core::ingest::{read_csv_files, read_json_file};
use courtside_core::metrics::MetricSpec;
use courtside_core::pipeline::{self, AnalysisConfig};
use courtside_core::report::{self, OutputFormat, Table};
use courtside_core::splits::Split;
use courtside_core::{ConfigError, Dataset, IngestError, MetricsError, ReportError, SplitError, WeightConfig};

#[derive(Debug, Parser)]
#[command(name = "courtside", version, about = "Boxscore performance indices, regularity and split analysis")]
struct Cli {
    #[command(flatten)]
    run: RunArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Games table (CSV).
    #[arg(long, global = true, requires = "lines", conflicts_with = "json")]
    games: Option<PathBuf>,
    /// Boxscore lines table (CSV).
    #[arg(long, global = true, requires = "games")]
    lines: Option<PathBuf>,
    /// Single JSON document with `games` and `lines`.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Partial weight override (JSON object keyed by statistic).
    #[arg(long, global = true)]
    weights: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, global = true, default_value_t = 10)]
    min_games: usize,
    /// Largest final margin still counted as a close game.
    #[arg(long, global = true, default_value_t = 5)]
    close_threshold: u32,
    /// Divide every per-game value by minutes played before averaging.
    #[arg(long, global = true)]
    per_minute: bool,
    #[arg(long, global = true, default_value = "text")]
    format: OutputFormat,
    /// Output file (a directory for `report-all`). Defaults to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate the dataset.
    Validate,
    /// Rank players by mean metric; `METRIC:reg` ranks by regularity.
    Rank { metric: String },
    /// Rank change of every player between two metrics.
    Delta { metric_a: String, metric_b: String },
    /// Regularity table (mean over sample standard deviation).
    Regularity { metric: String },
    /// Welch comparison of a metric across a game-context split.
    Splits {
        /// One player id; all players passing --min-games when omitted.
        #[arg(long)]
        player: Option<String>,
        #[arg(long, default_value = "rend")]
        metric: String,
        /// win-loss, close-game, home-away, starter-bench or competition:NAME.
        #[arg(long, default_value = "win-loss")]
        split: String,
        /// Mean +/- overall, in close games, wins and losses instead.
        #[arg(long, conflicts_with_all = ["player", "split"])]
        summary: bool,
    },
    /// Pearson, Kendall and Spearman correlation between per-player means.
    Correlate { metric_x: String, metric_y: String },
    /// Write every standard report into the --out directory.
    ReportAll,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Split(#[from] SplitError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 3,
            CliError::Ingest(e) if e.is_io() => 3,
            _ => 2,
        }
    }

    fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

/// Validated run settings shared by every subcommand.
struct RunConfig {
    analysis: AnalysisConfig,
    per_minute: bool,
    format: OutputFormat,
    out: Option<PathBuf>,
}

impl RunConfig {
    fn from_args(args: &RunArgs) -> Result<Self, CliError> {
        if !(args.alpha > 0.0 && args.alpha < 1.0) {
            return Err(CliError::Usage(format!("--alpha must lie in (0, 1), got {}", args.alpha)));
        }
        if args.min_games < 1 {
            return Err(CliError::Usage("--min-games must be at least 1".into()));
        }
        let weights = match &args.weights {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                WeightConfig::from_json_str(&text)?
            }
            None => WeightConfig::default(),
        };
        log::info!("weights fingerprint {}", weights.fingerprint());
        Ok(RunConfig {
            analysis: AnalysisConfig {
                weights,
                alpha: args.alpha,
                min_games: args.min_games,
                close_threshold: args.close_threshold,
                ..AnalysisConfig::default()
            },
            per_minute: args.per_minute,
            format: args.format,
            out: args.out.clone(),
        })
    }

    fn metric(&self, name: &str) -> Result<MetricSpec, CliError> {
        let mut spec: MetricSpec = name.parse()?;
        spec.per_minute |= self.per_minute;
        Ok(spec)
    }

    fn emit(&self, table: &Table) -> Result<(), CliError> {
        let bytes = table.render(self.format);
        match &self.out {
            Some(path) => fs::write(path, bytes).map_err(|e| CliError::io(path, e)),
            None => io::stdout()
                .write_all(&bytes)
                .map_err(|e| CliError::io(Path::new("<stdout>"), e)),
        }
    }
}

fn load(args: &RunArgs) -> Result<Dataset, CliError> {
    let dataset = match (&args.json, &args.games, &args.lines) {
        (Some(json), _, _) => read_json_file(json)?,
        (None, Some(games), Some(lines)) => read_csv_files(games, lines)?,
        _ => return Err(CliError::Usage("give --json FILE or both --games and --lines".into())),
    };
    log::info!(
        "loaded {} games, {} lines ({} zero-minute)",
        dataset.games().len(),
        dataset.lines().len(),
        dataset.dnp_count()
    );
    Ok(dataset)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = RunConfig::from_args(&cli.run)?;
    let dataset = load(&cli.run)?;
    let a = &cfg.analysis;
    let meta = a.meta();
    match &cli.command {
        Command::Validate => {
            println!(
                "ok: {} games, {} lines, {} players",
                dataset.games().len(),
                dataset.lines().len(),
                dataset.players().len()
            );
            Ok(())
        }
        Command::Rank { metric } => {
            let table = match metric.strip_suffix(":reg") {
                Some(base) => report::regularity_table(
                    &dataset,
                    cfg.metric(base)?,
                    &a.weights,
                    a.min_games,
                    a.comparable_tolerance,
                    meta,
                )?,
                None => report::rank_players(&dataset, cfg.metric(metric)?, &a.weights, a.min_games, meta)?,
            };
            cfg.emit(&table.to_table())
        }
        Command::Delta { metric_a, metric_b } => {
            let ra = report::rank_players(&dataset, cfg.metric(metric_a)?, &a.weights, a.min_games, meta.clone())?;
            let rb = report::rank_players(&dataset, cfg.metric(metric_b)?, &a.weights, a.min_games, meta)?;
            cfg.emit(&report::rank_delta(&ra, &rb)?.to_table())
        }
        Command::Regularity { metric } => {
            let table = report::regularity_table(
                &dataset,
                cfg.metric(metric)?,
                &a.weights,
                a.min_games,
                a.comparable_tolerance,
                meta,
            )?;
            cfg.emit(&table.to_table())
        }
        Command::Splits {
            player,
            metric,
            split,
            summary,
        } => {
            if *summary {
                return cfg.emit(&pipeline::plus_minus_table(&dataset, a)?.to_table());
            }
            let split: Split = split.parse()?;
            let report = pipeline::split_report(&dataset, player.as_deref(), cfg.metric(metric)?, &split, a)?;
            cfg.emit(&report.to_table())
        }
        Command::Correlate { metric_x, metric_y } => {
            let report = pipeline::correlate(&dataset, cfg.metric(metric_x)?, cfg.metric(metric_y)?, a)?;
            cfg.emit(&report.to_table())
        }
        Command::ReportAll => {
            let dir = cfg
                .out
                .clone()
                .ok_or_else(|| CliError::Usage("report-all needs --out DIR".into()))?;
            fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
            let tables = pipeline::report_all(&dataset, a)?;
            for (name, bytes) in pipeline::render_all(&tables, cfg.format) {
                let path = dir.join(&name);
                fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
                log::info!("wrote {}", path.display());
            }
            let path = dir.join("weights.json");
            fs::write(&path, a.weights.to_json_string()).map_err(|e| CliError::io(&path, e))?;
            println!("{} reports written to {}", tables.len(), dir.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
