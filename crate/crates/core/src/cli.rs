//! `nhfair` subcommands.
//!
//! Each command turns a validated [`EngineConfig`] plus input paths into a
//! [`CommandOutput`]; nothing is written until the whole output is ready,
//! and then a single writer emits it.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::config::{self, ConfigError, EngineConfig, CONFIG_ENV};
use crate::metrics::{self, MetricError, MetricReport};
use crate::records::{self, RecordError, RecordFormat, RunManifest};
use crate::report::{self, AggregateRow, EvaluatedRun};
use crate::selection::{self, CandidatePoint, DtoSelection, SelectionError, SelectionResult};
use crate::stats::{self, StatsError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    /// 2 for bad input or configuration, 3 for violated internal invariants.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Config(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    fn context(self, what: impl std::fmt::Display) -> Self {
        match self {
            CliError::Input(m) => CliError::Input(format!("{what}: {m}")),
            CliError::Internal(m) => CliError::Internal(format!("{what}: {m}")),
            other => other,
        }
    }
}

impl From<RecordError> for CliError {
    fn from(e: RecordError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<MetricError> for CliError {
    fn from(e: MetricError) -> Self {
        match e {
            MetricError::InvariantViolation(m) => CliError::Internal(m),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<SelectionError> for CliError {
    fn from(e: SelectionError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<StatsError> for CliError {
    fn from(e: StatsError) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "nhfair",
    version,
    about = "Fairness-without-harm evaluation engine"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute Utility/Worst/Gap/EqOdd/DP for prediction logs.
    Evaluate(CommonArgs),
    /// Pick the baseline closest to the utopia point.
    SelectErm(CommonArgs),
    /// Classify candidates into zones against a baseline and select one.
    SelectFwh(CommonArgs),
    /// Friedman test, Nemenyi critical difference and CD plot.
    Compare(CommonArgs),
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct CommonArgs {
    /// Flat `key = value` config file (falls back to $NHFAIR_CONFIG).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// No-harm / zone tolerance in utility units (default 0).
    #[arg(long)]
    pub tolerance: Option<String>,
    /// Equalized-odds variant: diagonal | full.
    #[arg(long)]
    pub eqodd: Option<String>,
    /// Nemenyi significance level: 0.05 | 0.10.
    #[arg(long)]
    pub alpha: Option<String>,
    /// Metric for compare: utility | worst | gap | eqodd | dp.
    #[arg(long)]
    pub metric: Option<String>,
    /// Table units: percent | fraction.
    #[arg(long)]
    pub units: Option<String>,
    /// Output path (stdout when absent).
    #[arg(long)]
    pub out: Option<String>,
    /// Table format for evaluate: csv | json | md.
    #[arg(long)]
    pub format: Option<String>,
    /// SVG path for compare (default: --out with .svg extension).
    #[arg(long)]
    pub svg: Option<String>,
    /// Also write seed-aggregated cells (input for compare).
    #[arg(long)]
    pub cells: Option<String>,
    /// Baseline candidates for select-fwh (file, directory or glob).
    #[arg(long)]
    pub baseline: Option<String>,
    /// Pin the baseline run_id instead of selecting it by distance to utopia.
    #[arg(long = "baseline-id")]
    pub baseline_id: Option<String>,
    /// Worker threads (0 = automatic).
    #[arg(long)]
    pub threads: Option<String>,
    /// Keep only runs or cells from this split.
    #[arg(long)]
    pub split: Option<String>,
    /// Comma-separated methods to leave out of compare.
    #[arg(long)]
    pub exclude: Option<String>,
    pub inputs: Vec<String>,
}

impl CommonArgs {
    fn overrides(&self) -> BTreeMap<String, String> {
        let fields = [
            ("tolerance", &self.tolerance),
            ("eqodd", &self.eqodd),
            ("alpha", &self.alpha),
            ("metric", &self.metric),
            ("units", &self.units),
            ("out", &self.out),
            ("format", &self.format),
            ("svg", &self.svg),
            ("cells", &self.cells),
            ("baseline", &self.baseline),
            ("baseline-id", &self.baseline_id),
            ("threads", &self.threads),
            ("split", &self.split),
            ("exclude", &self.exclude),
        ];
        fields
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect()
    }

    /// Config file (explicit or from the environment) overlaid with flags.
    pub fn resolve(&self, env_config: Option<PathBuf>) -> Result<EngineConfig, ConfigError> {
        let mut pairs = match self.config.clone().or(env_config) {
            Some(path) => config::read_config_file(&path)?,
            None => BTreeMap::new(),
        };
        pairs.extend(self.overrides());
        EngineConfig::from_pairs(&pairs)
    }
}

#[derive(Debug, Default, PartialEq)]
pub struct CommandOutput {
    pub stdout: String,
    pub files: Vec<(PathBuf, String)>,
    pub warnings: Vec<String>,
}

impl CommandOutput {
    /// Sends `body` to `--out` when given, else to stdout.
    fn emit(&mut self, out: Option<&PathBuf>, body: String) {
        match out {
            Some(p) => self.files.push((p.clone(), body)),
            None => self.stdout.push_str(&body),
        }
    }

    pub fn write(&self) -> Result<(), CliError> {
        for (path, body) in &self.files {
            std::fs::write(path, body)
                .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
        }
        if !self.stdout.is_empty() {
            use std::io::Write;
            let mut lock = std::io::stdout().lock();
            lock.write_all(self.stdout.as_bytes())
                .and_then(|_| lock.flush())
                .map_err(|e| CliError::Internal(format!("stdout: {e}")))?;
        }
        Ok(())
    }
}

type CommandFn = fn(&EngineConfig, &[String]) -> Result<CommandOutput, CliError>;

pub fn run(cli: &Cli) -> Result<CommandOutput, CliError> {
    let env_config = std::env::var_os(CONFIG_ENV).map(PathBuf::from);
    let (args, cmd): (&CommonArgs, CommandFn) = match &cli.command {
        Command::Evaluate(a) => (a, evaluate),
        Command::SelectErm(a) => (a, select_erm),
        Command::SelectFwh(a) => (a, select_fwh),
        Command::Compare(a) => (a, compare),
    };
    let cfg = args.resolve(env_config)?;
    cmd(&cfg, &args.inputs)
}

fn is_record_file(path: &Path) -> bool {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
    !name.ends_with(".manifest.json") && RecordFormat::from_path(path).is_some()
}

/// Expands files, directories (non-recursive, sorted) and glob patterns.
/// Directory entries are kept when `keep` accepts them.
pub fn expand_inputs(inputs: &[String], keep: fn(&Path) -> bool) -> Result<Vec<PathBuf>, CliError> {
    let mut out = Vec::new();
    for input in inputs {
        let path = Path::new(input);
        if path.is_dir() {
            let mut entries: Vec<PathBuf> = std::fs::read_dir(path)
                .map_err(|e| CliError::Input(format!("{input}: {e}")))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file() && keep(p))
                .collect();
            entries.sort();
            out.extend(entries);
        } else if path.exists() {
            out.push(path.to_path_buf());
        } else {
            let matches = glob::glob(input)
                .map_err(|e| CliError::Input(format!("bad pattern {input:?}: {e}")))?;
            let mut found: Vec<PathBuf> = matches
                .filter_map(Result::ok)
                .filter(|p| p.is_file())
                .collect();
            found.sort();
            out.extend(found);
        }
    }
    Ok(out)
}

fn record_format(path: &Path) -> Result<RecordFormat, CliError> {
    RecordFormat::from_path(path).ok_or_else(|| {
        CliError::Input(format!(
            "{}: expected a .jsonl or .csv record file",
            path.display()
        ))
    })
}

fn load_and_evaluate(
    path: &Path,
    cfg: &EngineConfig,
) -> Result<(RunManifest, MetricReport), CliError> {
    let run = records::parse_run(path, record_format(path)?)?;
    let report = metrics::metric_report_with(&run, cfg.eqodd_variant)?;
    Ok((run.manifest().clone(), report))
}

fn pool(threads: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Internal(format!("thread pool: {e}")))
}

fn evaluate_all(
    paths: &[PathBuf],
    cfg: &EngineConfig,
) -> Result<Vec<(PathBuf, RunManifest, MetricReport)>, CliError> {
    let results: Vec<_> = pool(cfg.threads)?.install(|| {
        paths
            .par_iter()
            .map(|p| {
                load_and_evaluate(p, cfg)
                    .map(|(m, r)| (p.clone(), m, r))
                    .map_err(|e| e.context(p.display()))
            })
            .collect()
    });
    results.into_iter().collect()
}

pub fn evaluate(cfg: &EngineConfig, inputs: &[String]) -> Result<CommandOutput, CliError> {
    let paths = expand_inputs(inputs, is_record_file)?;
    if paths.is_empty() {
        return Err(CliError::Input("no runs matched".into()));
    }
    let mut evaluated = evaluate_all(&paths, cfg)?;
    if let Some(split) = cfg.split {
        evaluated.retain(|(_, m, _)| m.split == split);
        if evaluated.is_empty() {
            return Err(CliError::Input(format!("no runs on split {split}")));
        }
    }

    let mut output = CommandOutput::default();
    for (path, _, report) in &evaluated {
        for w in &report.warnings {
            output.warnings.push(format!("{}: {w}", path.display()));
        }
    }
    let pairs: Vec<(MetricReport, RunManifest)> = evaluated
        .iter()
        .map(|(_, m, r)| (r.clone(), m.clone()))
        .collect();
    let cells = stats::aggregate(&pairs)?;
    let mut rows: Vec<AggregateRow> = Vec::new();
    for cell in &cells {
        let same = rows.last().is_some_and(|r| {
            r.method == cell.method && r.dataset == cell.dataset && Some(r.split) == cell.split
        });
        if !same {
            let kind = evaluated
                .iter()
                .find(|(_, m, _)| m.method == cell.method && m.dataset == cell.dataset)
                .map(|(_, m, _)| m.utility_kind)
                .expect("cell comes from a run");
            rows.push(AggregateRow {
                method: cell.method.clone(),
                dataset: cell.dataset.clone(),
                split: cell.split.expect("aggregate sets the split"),
                utility_kind: kind,
                cells: Vec::new(),
            });
        }
        rows.last_mut()
            .expect("pushed above")
            .cells
            .push(cell.clone());
    }
    let runs: Vec<EvaluatedRun> = evaluated
        .into_iter()
        .map(|(p, m, r)| EvaluatedRun::new(p.display().to_string(), &m, r))
        .collect();
    let table = report::render_metric_table(&runs, &rows, cfg.format, cfg.output_units);
    output.emit(cfg.out.as_ref(), table);
    if let Some(path) = &cfg.cells {
        let mut buf = Vec::new();
        stats::write_cells(&cells, &mut buf).map_err(|e| CliError::Internal(e.to_string()))?;
        output
            .files
            .push((path.clone(), String::from_utf8(buf).expect("csv is utf-8")));
    }
    Ok(output)
}

fn candidate_file(path: &Path) -> bool {
    is_record_file(path)
}

/// Loads candidates from run files (with manifest sidecars) and summary CSVs.
/// Run files contribute one candidate each, named by their file stem.
pub fn load_candidates(
    paths: &[PathBuf],
    cfg: &EngineConfig,
) -> Result<Vec<CandidatePoint>, CliError> {
    let (runs, summaries): (Vec<PathBuf>, Vec<PathBuf>) = paths
        .iter()
        .cloned()
        .partition(|p| records::manifest_path(p).exists());
    let mut out = Vec::new();
    for (path, manifest, report) in evaluate_all(&runs, cfg)? {
        if cfg.split.is_some_and(|s| s != manifest.split) {
            continue;
        }
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("run")
            .to_string();
        out.push(CandidatePoint::from_report(stem, manifest.method, &report));
    }
    for path in summaries {
        let rows = records::parse_summaries(&path)
            .map_err(|e| CliError::from(e).context(path.display()))?;
        out.extend(rows.iter().map(CandidatePoint::from_summary));
    }
    Ok(out)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializes");
    s.push('\n');
    s
}

pub fn select_erm(cfg: &EngineConfig, inputs: &[String]) -> Result<CommandOutput, CliError> {
    let paths = expand_inputs(inputs, candidate_file)?;
    if paths.is_empty() {
        return Err(CliError::Input("no candidates matched".into()));
    }
    let candidates = load_candidates(&paths, cfg)?;
    let selection = selection::dto_select(&candidates)?;
    let mut output = CommandOutput::default();
    output.emit(cfg.out.as_ref(), to_json(&selection));
    Ok(output)
}

#[derive(Debug, Serialize)]
struct BaselineChoice {
    run_id: String,
    chosen_by: &'static str,
    point: CandidatePoint,
    #[serde(skip_serializing_if = "Option::is_none")]
    dto: Option<DtoSelection>,
}

#[derive(Debug, Serialize)]
struct FwhReport {
    baseline: BaselineChoice,
    tolerance: f64,
    result: SelectionResult,
}

pub fn select_fwh(cfg: &EngineConfig, inputs: &[String]) -> Result<CommandOutput, CliError> {
    let baseline_input = cfg
        .baseline
        .as_ref()
        .ok_or_else(|| CliError::Input("select-fwh needs --baseline".into()))?;
    let baseline_paths = expand_inputs(std::slice::from_ref(baseline_input), candidate_file)?;
    if baseline_paths.is_empty() {
        return Err(CliError::Input(format!(
            "no baseline matched {baseline_input:?}"
        )));
    }
    let pool = load_candidates(&baseline_paths, cfg)?;
    let baseline = match &cfg.baseline_id {
        Some(id) => {
            let point = pool
                .iter()
                .find(|c| &c.run_id == id)
                .cloned()
                .ok_or_else(|| CliError::Input(format!("baseline run_id {id:?} not found")))?;
            BaselineChoice {
                run_id: id.clone(),
                chosen_by: "run_id",
                point,
                dto: None,
            }
        }
        None if pool.len() == 1 => BaselineChoice {
            run_id: pool[0].run_id.clone(),
            chosen_by: "single",
            point: pool[0].clone(),
            dto: None,
        },
        None => {
            let dto = selection::dto_select(&pool)?;
            BaselineChoice {
                run_id: dto.selected.run_id.clone(),
                chosen_by: "dto",
                point: dto.selected.clone(),
                dto: Some(dto),
            }
        }
    };

    let paths = expand_inputs(inputs, candidate_file)?;
    if paths.is_empty() {
        return Err(CliError::Input("no candidates matched".into()));
    }
    let mut output = CommandOutput::default();
    let mut candidates = load_candidates(&paths, cfg)?;
    let before = candidates.len();
    candidates.retain(|c| c.run_id != baseline.run_id);
    if candidates.len() != before {
        output.warnings.push(format!(
            "baseline {} removed from the candidate set",
            baseline.run_id
        ));
    }
    let result = selection::fwh_select(&candidates, &baseline.point, cfg.tolerance)?;
    if result.selected.is_none() {
        output.warnings.push(format!(
            "no candidate selected: tally {} (all Unwanted)",
            result.tally_string
        ));
    }
    let body = to_json(&FwhReport {
        baseline,
        tolerance: cfg.tolerance,
        result,
    });
    output.emit(cfg.out.as_ref(), body);
    Ok(output)
}

pub fn compare(cfg: &EngineConfig, inputs: &[String]) -> Result<CommandOutput, CliError> {
    let paths = expand_inputs(inputs, |p| p.extension().is_some_and(|e| e == "csv"))?;
    if paths.is_empty() {
        return Err(CliError::Input("no aggregate tables matched".into()));
    }
    let mut cells = Vec::new();
    for path in &paths {
        let file = std::fs::File::open(path)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let mut read = stats::read_cells(std::io::BufReader::new(file))
            .map_err(|e| CliError::from(e).context(path.display()))?;
        cells.append(&mut read);
    }
    if let Some(split) = cfg.split {
        cells.retain(|c| c.split == Some(split));
    }
    cells.retain(|c| !cfg.exclude.contains(&c.method));
    let data = stats::compare(&cells, cfg.metric, cfg.alpha)?;

    let mut output = CommandOutput::default();
    let svg_path = cfg
        .svg
        .clone()
        .or_else(|| cfg.out.as_ref().map(|p| p.with_extension("svg")));
    output.emit(cfg.out.as_ref(), to_json(&data));
    if let Some(svg) = svg_path {
        output.files.push((svg, report::render_cd_svg(&data)));
    }
    Ok(output)
}
