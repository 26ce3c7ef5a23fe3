//! Prediction records, run manifests and per-group summaries, plus their
//! file formats.
//!
//! A run is a record file (JSONL or CSV) next to a `.manifest.json`
//! sidecar sharing its basename. Loading validates every record against the
//! manifest's label and group spaces and sorts records by `sample_id`, so
//! everything downstream sees one canonical order.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::GroupUtilityVector;

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("line {line}: unknown label {label:?}")]
    UnknownLabel { line: usize, label: String },
    #[error("line {line}: unknown group {group:?}")]
    UnknownGroup { line: usize, group: String },
    #[error("line {line}: duplicate sample_id {sample_id:?}")]
    DuplicateSampleId { line: usize, sample_id: String },
    #[error("line {line}: sample {sample_id:?} has no score for the positive label (auc run)")]
    MissingScores { line: usize, sample_id: String },
    #[error("group {group:?} has no records")]
    EmptyGroup { group: String },
    #[error("run contains no records")]
    EmptyRun,
    #[error("line {line}: {message}")]
    MalformedLine { line: usize, message: String },
    #[error("row {row}: {message}")]
    MalformedRow { row: usize, message: String },
    #[error("row {row}: column {column:?} value {value} is outside [0, 1]")]
    UtilityOutOfRange {
        row: usize,
        column: String,
        value: f64,
    },
    #[error("invalid manifest: {0}")]
    InvalidManifest(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, RecordError>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RecordError + '_ {
    move |source| RecordError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Ordered, distinct class labels. The positive label (used by binary DP
/// and AUC) defaults to the last label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LabelSpace {
    labels: Vec<String>,
    positive_label: Option<String>,
}

impl LabelSpace {
    pub fn new(labels: Vec<String>, positive_label: Option<String>) -> Result<Self> {
        if labels.len() < 2 {
            return Err(RecordError::InvalidManifest(format!(
                "need at least 2 labels, got {}",
                labels.len()
            )));
        }
        check_distinct(&labels, "label")?;
        if let Some(p) = &positive_label {
            if !labels.contains(p) {
                return Err(RecordError::InvalidManifest(format!(
                    "positive_label {p:?} is not one of the labels"
                )));
            }
        }
        Ok(Self {
            labels,
            positive_label,
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn explicit_positive(&self) -> Option<&str> {
        self.positive_label.as_deref()
    }

    /// Index of the positive label.
    pub fn positive(&self) -> usize {
        self.positive_label
            .as_deref()
            .and_then(|p| self.index_of(p))
            .unwrap_or(self.labels.len() - 1)
    }
}

/// Ordered, distinct sensitive-group identifiers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupSpace {
    groups: Vec<String>,
}

impl GroupSpace {
    pub fn new(groups: Vec<String>) -> Result<Self> {
        if groups.len() < 2 {
            return Err(RecordError::InvalidManifest(format!(
                "need at least 2 groups, got {}",
                groups.len()
            )));
        }
        check_distinct(&groups, "group")?;
        Ok(Self { groups })
    }

    pub fn groups(&self) -> &[String] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn index_of(&self, group: &str) -> Option<usize> {
        self.groups.iter().position(|g| g == group)
    }
}

fn check_distinct(items: &[String], what: &str) -> Result<()> {
    let mut seen = HashSet::new();
    for item in items {
        if !seen.insert(item.as_str()) {
            return Err(RecordError::InvalidManifest(format!(
                "duplicate {what} {item:?}"
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        })
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "validation" => Ok(Split::Validation),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split {other:?} (train|validation|test)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UtilityKind {
    Accuracy,
    Auc,
}

impl UtilityKind {
    /// Short column label used in tables.
    pub fn label(self) -> &'static str {
        match self {
            UtilityKind::Accuracy => "ACC",
            UtilityKind::Auc => "AUC",
        }
    }
}

/// One sample's outcome. Labels and groups are indices into the owning
/// run's [`LabelSpace`] and [`GroupSpace`]; `scores` is indexed the same way.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRecord {
    pub sample_id: String,
    pub true_label: usize,
    pub predicted_label: usize,
    pub scores: Option<BTreeMap<usize, f64>>,
    pub group: usize,
}

impl PredictionRecord {
    pub fn score(&self, label: usize) -> Option<f64> {
        self.scores.as_ref().and_then(|s| s.get(&label).copied())
    }

    pub fn is_correct(&self) -> bool {
        self.true_label == self.predicted_label
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub method: String,
    pub dataset: String,
    pub seed: i64,
    pub split: Split,
    pub utility_kind: UtilityKind,
    pub label_space: LabelSpace,
    pub group_space: GroupSpace,
}

/// Wire form of the manifest sidecar.
#[derive(Debug, Serialize, Deserialize)]
struct ManifestFile {
    method: String,
    dataset: String,
    seed: i64,
    split: Split,
    utility_kind: UtilityKind,
    labels: Vec<String>,
    groups: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    positive_label: Option<String>,
}

impl RunManifest {
    pub fn new(
        method: impl Into<String>,
        dataset: impl Into<String>,
        seed: i64,
        split: Split,
        utility_kind: UtilityKind,
        label_space: LabelSpace,
        group_space: GroupSpace,
    ) -> Result<Self> {
        if utility_kind == UtilityKind::Auc && label_space.len() != 2 {
            return Err(RecordError::InvalidManifest(format!(
                "utility_kind auc requires a binary task, got {} labels",
                label_space.len()
            )));
        }
        Ok(Self {
            method: method.into(),
            dataset: dataset.into(),
            seed,
            split,
            utility_kind,
            label_space,
            group_space,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: ManifestFile =
            serde_json::from_str(text).map_err(|e| RecordError::InvalidManifest(e.to_string()))?;
        Self::new(
            raw.method,
            raw.dataset,
            raw.seed,
            raw.split,
            raw.utility_kind,
            LabelSpace::new(raw.labels, raw.positive_label)?,
            GroupSpace::new(raw.groups)?,
        )
    }

    pub fn to_json(&self) -> String {
        let raw = ManifestFile {
            method: self.method.clone(),
            dataset: self.dataset.clone(),
            seed: self.seed,
            split: self.split,
            utility_kind: self.utility_kind,
            labels: self.label_space.labels.clone(),
            groups: self.group_space.groups.clone(),
            positive_label: self.label_space.positive_label.clone(),
        };
        serde_json::to_string_pretty(&raw).expect("manifest serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        Self::from_json(&text)
    }
}

/// A validated run: every record belongs to the manifest's spaces, sample
/// ids are unique, every group is populated, and records are sorted by
/// `sample_id`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationRun {
    manifest: RunManifest,
    records: Vec<PredictionRecord>,
}

impl EvaluationRun {
    /// Validates in-memory records. Error line numbers are 1-based positions
    /// in `records`.
    pub fn new(manifest: RunManifest, records: Vec<PredictionRecord>) -> Result<Self> {
        let numbered = records
            .into_iter()
            .enumerate()
            .map(|(i, r)| (i + 1, r))
            .collect();
        Self::from_numbered(manifest, numbered)
    }

    fn from_numbered(
        manifest: RunManifest,
        records: Vec<(usize, PredictionRecord)>,
    ) -> Result<Self> {
        if records.is_empty() {
            return Err(RecordError::EmptyRun);
        }
        let n_labels = manifest.label_space.len();
        let n_groups = manifest.group_space.len();
        let positive = manifest.label_space.positive();
        let mut seen = HashSet::with_capacity(records.len());
        let mut per_group = vec![0usize; n_groups];

        for (line, r) in &records {
            let line = *line;
            for label in [r.true_label, r.predicted_label] {
                if label >= n_labels {
                    return Err(RecordError::UnknownLabel {
                        line,
                        label: format!("#{label}"),
                    });
                }
            }
            if r.group >= n_groups {
                return Err(RecordError::UnknownGroup {
                    line,
                    group: format!("#{}", r.group),
                });
            }
            if let Some(scores) = &r.scores {
                for (&label, &value) in scores {
                    if label >= n_labels {
                        return Err(RecordError::UnknownLabel {
                            line,
                            label: format!("#{label}"),
                        });
                    }
                    check_score(line, &manifest.label_space.labels[label], value)?;
                }
            }
            if manifest.utility_kind == UtilityKind::Auc && r.score(positive).is_none() {
                return Err(RecordError::MissingScores {
                    line,
                    sample_id: r.sample_id.clone(),
                });
            }
            if !seen.insert(r.sample_id.as_str()) {
                return Err(RecordError::DuplicateSampleId {
                    line,
                    sample_id: r.sample_id.clone(),
                });
            }
            per_group[r.group] += 1;
        }
        if let Some(g) = per_group.iter().position(|&n| n == 0) {
            return Err(RecordError::EmptyGroup {
                group: manifest.group_space.groups[g].clone(),
            });
        }

        let mut records: Vec<PredictionRecord> = records.into_iter().map(|(_, r)| r).collect();
        records.sort_by(|a, b| a.sample_id.cmp(&b.sample_id));
        Ok(Self { manifest, records })
    }

    pub fn manifest(&self) -> &RunManifest {
        &self.manifest
    }

    pub fn records(&self) -> &[PredictionRecord] {
        &self.records
    }

    pub fn labels(&self) -> &LabelSpace {
        &self.manifest.label_space
    }

    pub fn groups(&self) -> &GroupSpace {
        &self.manifest.group_space
    }

    /// Writes the records as JSONL (one object per line, canonical order).
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for r in &self.records {
            let line = JsonRecord {
                sample_id: r.sample_id.clone(),
                y: self.labels().labels[r.true_label].clone(),
                y_hat: self.labels().labels[r.predicted_label].clone(),
                group: self.groups().groups[r.group].clone(),
                scores: r.scores.as_ref().map(|s| {
                    s.iter()
                        .map(|(&l, &v)| (self.labels().labels[l].clone(), v))
                        .collect()
                }),
            };
            serde_json::to_writer(&mut out, &line)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Writes the records as CSV with one `score:<label>` column per label
    /// when any record carries scores.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let labels = self.labels().labels();
        let with_scores = self.records.iter().any(|r| r.scores.is_some());
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![
            "sample_id".to_string(),
            "y".into(),
            "y_hat".into(),
            "group".into(),
        ];
        if with_scores {
            header.extend(labels.iter().map(|l| format!("score:{l}")));
        }
        w.write_record(&header)?;
        for r in &self.records {
            let mut row = vec![
                r.sample_id.clone(),
                labels[r.true_label].clone(),
                labels[r.predicted_label].clone(),
                self.groups().groups[r.group].clone(),
            ];
            if with_scores {
                for l in 0..labels.len() {
                    row.push(r.score(l).map(|v| v.to_string()).unwrap_or_default());
                }
            }
            w.write_record(&row)?;
        }
        w.flush()
    }

    /// Writes the record file plus its manifest sidecar.
    pub fn save(&self, path: &Path, format: RecordFormat) -> Result<()> {
        let file = File::create(path).map_err(io_err(path))?;
        let mut out = std::io::BufWriter::new(file);
        match format {
            RecordFormat::Jsonl => self.write_jsonl(&mut out),
            RecordFormat::Csv => self.write_csv(&mut out),
        }
        .and_then(|_| out.flush())
        .map_err(io_err(path))?;
        let manifest = manifest_path(path);
        std::fs::write(&manifest, self.manifest.to_json()).map_err(io_err(&manifest))
    }
}

fn check_score(line: usize, label: &str, value: f64) -> Result<()> {
    if !value.is_finite() || !(0.0..=1.0).contains(&value) {
        return Err(RecordError::MalformedLine {
            line,
            message: format!("score for {label:?} is {value}, expected a finite value in [0, 1]"),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordFormat {
    Jsonl,
    Csv,
}

impl RecordFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "jsonl" | "ndjson" => Some(Self::Jsonl),
            "csv" => Some(Self::Csv),
            _ => None,
        }
    }
}

impl FromStr for RecordFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "jsonl" => Ok(Self::Jsonl),
            "csv" => Ok(Self::Csv),
            other => Err(format!("unknown record format {other:?}")),
        }
    }
}

/// `runs/erm_s0.jsonl` -> `runs/erm_s0.manifest.json`.
pub fn manifest_path(record_path: &Path) -> PathBuf {
    record_path.with_extension("manifest.json")
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonRecord {
    sample_id: String,
    y: String,
    y_hat: String,
    group: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scores: Option<BTreeMap<String, f64>>,
}

/// Record fields as read from a file, before resolution against the manifest.
struct RawRecord<'a> {
    sample_id: &'a str,
    y: &'a str,
    y_hat: &'a str,
    group: &'a str,
    scores: Option<Vec<(&'a str, f64)>>,
}

fn resolve(manifest: &RunManifest, line: usize, raw: RawRecord<'_>) -> Result<PredictionRecord> {
    let labels = &manifest.label_space;
    let label = |name: &str| {
        labels
            .index_of(name)
            .ok_or_else(|| RecordError::UnknownLabel {
                line,
                label: name.to_string(),
            })
    };
    let true_label = label(raw.y)?;
    let predicted_label = label(raw.y_hat)?;
    let group =
        manifest
            .group_space
            .index_of(raw.group)
            .ok_or_else(|| RecordError::UnknownGroup {
                line,
                group: raw.group.to_string(),
            })?;
    let scores = match raw.scores {
        None => None,
        Some(pairs) => {
            let mut map = BTreeMap::new();
            for (name, value) in pairs {
                let idx = label(name)?;
                check_score(line, name, value)?;
                map.insert(idx, value);
            }
            Some(map)
        }
    };
    if raw.sample_id.is_empty() {
        return Err(RecordError::MalformedLine {
            line,
            message: "empty sample_id".into(),
        });
    }
    Ok(PredictionRecord {
        sample_id: raw.sample_id.to_string(),
        true_label,
        predicted_label,
        scores,
        group,
    })
}

/// Parses JSONL records against a manifest. Blank lines are skipped but
/// still counted for line numbers.
pub fn read_jsonl<R: BufRead>(manifest: RunManifest, input: R) -> Result<EvaluationRun> {
    let mut records = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| RecordError::MalformedLine {
            line: line_no,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: JsonRecord =
            serde_json::from_str(&line).map_err(|e| RecordError::MalformedLine {
                line: line_no,
                message: e.to_string(),
            })?;
        let raw = RawRecord {
            sample_id: &rec.sample_id,
            y: &rec.y,
            y_hat: &rec.y_hat,
            group: &rec.group,
            scores: rec
                .scores
                .as_ref()
                .map(|s| s.iter().map(|(k, v)| (k.as_str(), *v)).collect()),
        };
        records.push((line_no, resolve(&manifest, line_no, raw)?));
    }
    EvaluationRun::from_numbered(manifest, records)
}

/// Parses CSV records (`sample_id,y,y_hat,group[,score:<label>...]`)
/// against a manifest. A record whose score cells are all empty has no
/// scores.
pub fn read_csv<R: std::io::Read>(manifest: RunManifest, input: R) -> Result<EvaluationRun> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let header = reader
        .headers()
        .map_err(|e| RecordError::MalformedLine {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let cols: Vec<&str> = header.iter().map(str::trim).collect();
    if cols.len() < 4 || cols[..4] != ["sample_id", "y", "y_hat", "group"] {
        return Err(RecordError::MalformedLine {
            line: 1,
            message: "header must start with sample_id,y,y_hat,group".into(),
        });
    }
    let mut score_labels = Vec::new();
    for col in &cols[4..] {
        match col.strip_prefix("score:") {
            Some(label) => score_labels.push(label.to_string()),
            None => {
                return Err(RecordError::MalformedLine {
                    line: 1,
                    message: format!("unexpected column {col:?}"),
                })
            }
        }
    }

    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| RecordError::MalformedLine {
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = row.position().map(|p| p.line() as usize).unwrap_or(0);
        let mut scores = Vec::new();
        for (label, cell) in score_labels.iter().zip(row.iter().skip(4)) {
            let cell = cell.trim();
            if cell.is_empty() {
                continue;
            }
            let value: f64 = cell.parse().map_err(|_| RecordError::MalformedLine {
                line,
                message: format!("score {cell:?} for {label:?} is not a number"),
            })?;
            scores.push((label.as_str(), value));
        }
        let raw = RawRecord {
            sample_id: row[0].trim(),
            y: row[1].trim(),
            y_hat: row[2].trim(),
            group: row[3].trim(),
            scores: (!scores.is_empty()).then_some(scores),
        };
        records.push((line, resolve(&manifest, line, raw)?));
    }
    EvaluationRun::from_numbered(manifest, records)
}

/// Loads a record file and its `.manifest.json` sidecar.
pub fn parse_run(path: &Path, format: RecordFormat) -> Result<EvaluationRun> {
    let manifest = RunManifest::load(&manifest_path(path))?;
    let file = File::open(path).map_err(io_err(path))?;
    match format {
        RecordFormat::Jsonl => read_jsonl(manifest, BufReader::new(file)),
        RecordFormat::Csv => read_csv(manifest, BufReader::new(file)),
    }
}

/// Published (or precomputed) per-group utilities of one trained model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub method: String,
    pub run_id: String,
    pub group_utilities: GroupUtilityVector,
    pub overall_utility: f64,
    pub dp: Option<f64>,
    pub eqodd: Option<f64>,
}

const RESERVED_COLUMNS: [&str; 5] = ["run_id", "method", "overall", "dp", "eqodd"];

struct SummaryColumn {
    name: String,
    percent: bool,
}

fn summary_column(raw: &str) -> SummaryColumn {
    let raw = raw.trim();
    match raw.strip_suffix('%') {
        Some(name) => SummaryColumn {
            name: name.trim().to_string(),
            percent: true,
        },
        None => SummaryColumn {
            name: raw.to_string(),
            percent: false,
        },
    }
}

/// Parses a summary CSV: `run_id,method,<group>[%]...,overall[%]` with
/// optional `dp[%]` and `eqodd[%]` columns. Group columns are every other
/// column, in header order. A `%` suffix on a header (or on a cell) marks
/// percent units.
pub fn read_summaries<R: std::io::Read>(input: R) -> Result<Vec<RunSummary>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let header = reader
        .headers()
        .map_err(|e| RecordError::MalformedRow {
            row: 1,
            message: e.to_string(),
        })?
        .clone();
    let columns: Vec<SummaryColumn> = header.iter().map(summary_column).collect();
    let find = |name: &str| columns.iter().position(|c| c.name == name);
    let header_err = |message: String| RecordError::MalformedRow { row: 1, message };
    let run_id = find("run_id").ok_or_else(|| header_err("missing run_id column".into()))?;
    let method = find("method").ok_or_else(|| header_err("missing method column".into()))?;
    let overall = find("overall").ok_or_else(|| header_err("missing overall column".into()))?;
    let dp = find("dp");
    let eqodd = find("eqodd");
    let group_cols: Vec<usize> = (0..columns.len())
        .filter(|&i| !RESERVED_COLUMNS.contains(&columns[i].name.as_str()))
        .collect();
    let group_names: Vec<String> = group_cols
        .iter()
        .map(|&i| columns[i].name.clone())
        .collect();
    GroupSpace::new(group_names.clone()).map_err(|e| header_err(e.to_string()))?;

    let mut out = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| RecordError::MalformedRow {
            row: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = row.position().map(|p| p.line() as usize).unwrap_or(0);
        if row.len() != columns.len() {
            return Err(RecordError::MalformedRow {
                row: line,
                message: format!("expected {} fields, found {}", columns.len(), row.len()),
            });
        }
        let value = |i: usize| summary_value(line, &columns[i], &row[i]);
        let utilities = group_cols
            .iter()
            .map(|&i| value(i))
            .collect::<Result<Vec<f64>>>()?;
        let optional = |i: Option<usize>| -> Result<Option<f64>> {
            match i {
                Some(i) if !row[i].trim().is_empty() => value(i).map(Some),
                _ => Ok(None),
            }
        };
        out.push(RunSummary {
            method: row[method].trim().to_string(),
            run_id: row[run_id].trim().to_string(),
            group_utilities: GroupUtilityVector::new(
                UtilityKind::Accuracy,
                group_names.iter().cloned().zip(utilities).collect(),
            ),
            overall_utility: value(overall)?,
            dp: optional(dp)?,
            eqodd: optional(eqodd)?,
        });
    }
    Ok(out)
}

fn summary_value(row: usize, column: &SummaryColumn, cell: &str) -> Result<f64> {
    let cell = cell.trim();
    let (number, cell_percent) = match cell.strip_suffix('%') {
        Some(n) => (n.trim(), true),
        None => (cell, false),
    };
    let mut value: f64 = number.parse().map_err(|_| RecordError::MalformedRow {
        row,
        message: format!("column {:?}: {cell:?} is not a number", column.name),
    })?;
    if !value.is_finite() {
        return Err(RecordError::MalformedRow {
            row,
            message: format!("column {:?}: value is not finite", column.name),
        });
    }
    if column.percent || cell_percent {
        value /= 100.0;
    }
    if !(0.0..=1.0).contains(&value) {
        return Err(RecordError::UtilityOutOfRange {
            row,
            column: column.name.clone(),
            value,
        });
    }
    Ok(value)
}

pub fn parse_summaries(path: &Path) -> Result<Vec<RunSummary>> {
    let file = File::open(path).map_err(io_err(path))?;
    read_summaries(BufReader::new(file))
}
