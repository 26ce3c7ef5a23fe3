//! Group utility and fairness metrics.
//!
//! Everything is computed from a [`ConfusionTensor`] (accuracy, DP, EqOdd)
//! or directly from the scored records (AUC). Values are fractions in
//! `[0, 1]`; percent formatting happens in [`crate::report`].
//!
//! With more than two groups, pairwise quantities use the worst pair:
//! `gap` is the max-min spread of group utilities, and DP/EqOdd take the
//! largest pairwise rate difference.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::records::{EvaluationRun, UtilityKind};

/// Groups with fewer records than this get a thin-support warning.
pub const THIN_GROUP_SUPPORT: u64 = 30;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("no group contains both classes; AUC is undefined for every group")]
    AllGroupsDegenerate,
    #[error("no class is observed in every group; equalized odds is undefined")]
    NoEvaluableClass,
    #[error("group spaces differ: {0}")]
    GroupSpaceMismatch(String),
    #[error("AUC requires a binary task, got {0} labels")]
    NotBinary(usize),
    #[error("tolerance must be finite and non-negative, got {0}")]
    InvalidTolerance(f64),
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, MetricError>;

/// Counts indexed by (group, true label, predicted label).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionTensor {
    groups: Vec<String>,
    labels: Vec<String>,
    counts: Vec<u64>,
}

impl ConfusionTensor {
    pub fn n_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn n_labels(&self) -> usize {
        self.labels.len()
    }

    pub fn groups(&self) -> &[String] {
        &self.groups
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    fn idx(&self, group: usize, y: usize, y_hat: usize) -> usize {
        let c = self.labels.len();
        (group * c + y) * c + y_hat
    }

    pub fn count(&self, group: usize, y: usize, y_hat: usize) -> u64 {
        self.counts[self.idx(group, y, y_hat)]
    }

    /// n(g, y): records of group `g` with true label `y`.
    pub fn class_total(&self, group: usize, y: usize) -> u64 {
        (0..self.n_labels()).map(|p| self.count(group, y, p)).sum()
    }

    /// n(g): records of group `g`.
    pub fn group_total(&self, group: usize) -> u64 {
        (0..self.n_labels())
            .map(|y| self.class_total(group, y))
            .sum()
    }

    /// Records of group `g` predicted as `y_hat`.
    pub fn predicted_total(&self, group: usize, y_hat: usize) -> u64 {
        (0..self.n_labels())
            .map(|y| self.count(group, y, y_hat))
            .sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn correct(&self, group: usize) -> u64 {
        (0..self.n_labels()).map(|y| self.count(group, y, y)).sum()
    }
}

pub fn confusion(run: &EvaluationRun) -> ConfusionTensor {
    let groups = run.groups().groups().to_vec();
    let labels = run.labels().labels().to_vec();
    let mut t = ConfusionTensor {
        counts: vec![0; groups.len() * labels.len() * labels.len()],
        groups,
        labels,
    };
    for r in run.records() {
        let i = t.idx(r.group, r.true_label, r.predicted_label);
        t.counts[i] += 1;
    }
    t
}

/// Per-group utility, ordered like the run's group space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupUtilityVector {
    pub kind: UtilityKind,
    groups: Vec<String>,
    values: Vec<f64>,
}

impl GroupUtilityVector {
    pub fn new(kind: UtilityKind, entries: Vec<(String, f64)>) -> Self {
        let (groups, values) = entries.into_iter().unzip();
        Self {
            kind,
            groups,
            values,
        }
    }

    pub fn groups(&self) -> &[String] {
        &self.groups
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, group: &str) -> Option<f64> {
        self.groups
            .iter()
            .position(|g| g == group)
            .map(|i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.groups
            .iter()
            .map(String::as_str)
            .zip(self.values.iter().copied())
    }

    /// Errors unless both vectors list the same groups in the same order.
    pub fn check_same_groups(&self, other: &Self) -> Result<()> {
        if self.groups != other.groups {
            return Err(MetricError::GroupSpaceMismatch(format!(
                "{:?} vs {:?}",
                self.groups, other.groups
            )));
        }
        Ok(())
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub fn group_accuracy(t: &ConfusionTensor) -> GroupUtilityVector {
    let entries = (0..t.n_groups())
        .map(|g| {
            let acc = t.correct(g) as f64 / t.group_total(g) as f64;
            (t.groups[g].clone(), acc)
        })
        .collect();
    GroupUtilityVector::new(UtilityKind::Accuracy, entries)
}

/// Mann-Whitney AUC from (score, is_positive) pairs using mid-ranks for
/// ties. `None` when one class is absent.
fn rank_auc(mut scored: Vec<(f64, bool)>) -> Option<f64> {
    let n_pos = scored.iter().filter(|(_, p)| *p).count();
    let n_neg = scored.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return None;
    }
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut pos_rank_sum = 0.0;
    let mut i = 0;
    while i < scored.len() {
        let mut j = i;
        while j + 1 < scored.len() && scored[j + 1].0 == scored[i].0 {
            j += 1;
        }
        // ranks i+1..=j+1 share their mean
        let mid_rank = (i + j + 2) as f64 / 2.0;
        let positives = scored[i..=j].iter().filter(|(_, p)| *p).count();
        pos_rank_sum += mid_rank * positives as f64;
        i = j + 1;
    }
    let u = pos_rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Some(u / (n_pos as f64 * n_neg as f64))
}

fn positive_scores(run: &EvaluationRun, group: Option<usize>) -> Vec<(f64, bool)> {
    let positive = run.labels().positive();
    run.records()
        .iter()
        .filter(|r| group.is_none_or(|g| r.group == g))
        .map(|r| {
            let score = r
                .score(positive)
                .expect("auc runs are validated to carry scores");
            (score, r.true_label == positive)
        })
        .collect()
}

fn check_auc_run(run: &EvaluationRun) -> Result<()> {
    if run.labels().len() != 2 {
        return Err(MetricError::NotBinary(run.labels().len()));
    }
    if run
        .records()
        .iter()
        .any(|r| r.score(run.labels().positive()).is_none())
    {
        return Err(MetricError::InvariantViolation(
            "AUC requested on records without positive-label scores".into(),
        ));
    }
    Ok(())
}

/// Per-group AUC of the positive-label score. Groups lacking one of the
/// classes get 0.5 and a warning.
pub fn group_auc(run: &EvaluationRun) -> Result<(GroupUtilityVector, Vec<String>)> {
    check_auc_run(run)?;
    let mut warnings = Vec::new();
    let mut entries = Vec::with_capacity(run.groups().len());
    let mut any_defined = false;
    for (g, name) in run.groups().groups().iter().enumerate() {
        let auc = match rank_auc(positive_scores(run, Some(g))) {
            Some(auc) => {
                any_defined = true;
                auc
            }
            None => {
                warnings.push(format!(
                    "group {name:?} contains a single class; AUC set to 0.5"
                ));
                0.5
            }
        };
        entries.push((name.clone(), auc));
    }
    if !any_defined {
        return Err(MetricError::AllGroupsDegenerate);
    }
    Ok((GroupUtilityVector::new(UtilityKind::Auc, entries), warnings))
}

/// AUC over all records regardless of group.
pub fn pooled_auc(run: &EvaluationRun) -> Result<f64> {
    check_auc_run(run)?;
    rank_auc(positive_scores(run, None)).ok_or(MetricError::AllGroupsDegenerate)
}

pub fn pooled_accuracy(t: &ConfusionTensor) -> f64 {
    let correct: u64 = (0..t.n_groups()).map(|g| t.correct(g)).sum();
    correct as f64 / t.total() as f64
}

/// Max-min spread of group utilities.
pub fn gap(v: &GroupUtilityVector) -> f64 {
    v.max() - v.min()
}

pub fn worst(v: &GroupUtilityVector) -> f64 {
    v.min()
}

fn spread(rates: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = rates.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
        (lo.min(r), hi.max(r))
    });
    hi - lo
}

/// 1 minus the largest between-group difference in prediction rate. Binary
/// tasks look only at the positive label; multi-class tasks take the worst
/// label.
pub fn demographic_parity(t: &ConfusionTensor, positive_label: usize) -> f64 {
    let rate = |g: usize, y: usize| t.predicted_total(g, y) as f64 / t.group_total(g) as f64;
    let worst_diff = if t.n_labels() == 2 {
        spread((0..t.n_groups()).map(|g| rate(g, positive_label)))
    } else {
        (0..t.n_labels())
            .map(|y| spread((0..t.n_groups()).map(|g| rate(g, y))))
            .fold(0.0, f64::max)
    };
    1.0 - worst_diff
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EqOddVariant {
    /// Parity of the per-class correct-classification rate.
    #[default]
    Diagonal,
    /// Parity of every conditional prediction rate P(ŷ | y, a), i.e. the
    /// TPR/FPR pair for binary tasks.
    Full,
}

impl std::str::FromStr for EqOddVariant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "diagonal" => Ok(Self::Diagonal),
            "full" => Ok(Self::Full),
            other => Err(format!("unknown eqodd variant {other:?} (diagonal|full)")),
        }
    }
}

/// Equalized odds averaged over the classes observed in every group.
/// Classes missing from some group are skipped with a warning.
pub fn equalized_odds(t: &ConfusionTensor, variant: EqOddVariant) -> Result<(f64, Vec<String>)> {
    let mut warnings = Vec::new();
    let mut scores = Vec::new();
    for y in 0..t.n_labels() {
        if let Some(g) = (0..t.n_groups()).find(|&g| t.class_total(g, y) == 0) {
            warnings.push(format!(
                "class {:?} has no records in group {:?}; skipped in EqOdd",
                t.labels[y], t.groups[g]
            ));
            continue;
        }
        let rate = |g: usize, p: usize| t.count(g, y, p) as f64 / t.class_total(g, y) as f64;
        match variant {
            EqOddVariant::Diagonal => {
                scores.push(1.0 - spread((0..t.n_groups()).map(|g| rate(g, y))));
            }
            EqOddVariant::Full => {
                for p in 0..t.n_labels() {
                    scores.push(1.0 - spread((0..t.n_groups()).map(|g| rate(g, p))));
                }
            }
        }
    }
    if scores.is_empty() {
        return Err(MetricError::NoEvaluableClass);
    }
    let mean = scores.iter().sum::<f64>() / scores.len() as f64;
    Ok((mean, warnings))
}

/// The five reported metrics for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub utility_kind: UtilityKind,
    pub overall: f64,
    pub worst: f64,
    pub gap: f64,
    pub eqodd: f64,
    pub dp: f64,
    pub group_utilities: GroupUtilityVector,
    pub warnings: Vec<String>,
}

impl MetricReport {
    pub fn value(&self, metric: crate::stats::MetricName) -> f64 {
        use crate::stats::MetricName;
        match metric {
            MetricName::Utility => self.overall,
            MetricName::Worst => self.worst,
            MetricName::Gap => self.gap,
            MetricName::EqOdd => self.eqodd,
            MetricName::Dp => self.dp,
        }
    }
}

impl fmt::Display for MetricReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use crate::report::format_percent as p;
        write!(
            f,
            "{} {} | Worst {} | Gap {} | EqOdd {} | DP {}",
            self.utility_kind.label(),
            p(self.overall),
            p(self.worst),
            p(self.gap),
            p(self.eqodd),
            p(self.dp)
        )
    }
}

pub fn metric_report(run: &EvaluationRun) -> Result<MetricReport> {
    metric_report_with(run, EqOddVariant::default())
}

pub fn metric_report_with(run: &EvaluationRun, variant: EqOddVariant) -> Result<MetricReport> {
    let t = confusion(run);
    let mut warnings = Vec::new();
    for g in 0..t.n_groups() {
        let n = t.group_total(g);
        if n < THIN_GROUP_SUPPORT {
            warnings.push(format!(
                "group {:?} has only {n} record(s); estimates are noisy",
                t.groups[g]
            ));
        }
    }

    let kind = run.manifest().utility_kind;
    let (utilities, overall) = match kind {
        UtilityKind::Accuracy => {
            let v = group_accuracy(&t);
            let overall = pooled_accuracy(&t);
            if overall < v.min() || overall > v.max() {
                return Err(MetricError::InvariantViolation(format!(
                    "pooled accuracy {overall} outside group range [{}, {}]",
                    v.min(),
                    v.max()
                )));
            }
            (v, overall)
        }
        UtilityKind::Auc => {
            let (v, w) = group_auc(run)?;
            warnings.extend(w);
            (v, pooled_auc(run)?)
        }
    };
    let (eqodd, w) = equalized_odds(&t, variant)?;
    warnings.extend(w);

    let report = MetricReport {
        utility_kind: kind,
        overall,
        worst: worst(&utilities),
        gap: gap(&utilities),
        eqodd,
        dp: demographic_parity(&t, run.labels().positive()),
        group_utilities: utilities,
        warnings,
    };
    for (name, v) in [
        ("overall", report.overall),
        ("worst", report.worst),
        ("gap", report.gap),
        ("eqodd", report.eqodd),
        ("dp", report.dp),
    ] {
        if !(0.0..=1.0).contains(&v) {
            return Err(MetricError::InvariantViolation(format!(
                "{name} = {v} outside [0, 1]"
            )));
        }
    }
    Ok(report)
}

/// Per-group outcome of the no-harm comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoHarmVerdict {
    pub per_group: Vec<(String, bool)>,
    pub passed: bool,
}

/// A group passes when the candidate's utility is at least the baseline's
/// minus `tolerance`.
pub fn no_harm_check(
    candidate: &GroupUtilityVector,
    baseline: &GroupUtilityVector,
    tolerance: f64,
) -> Result<NoHarmVerdict> {
    check_tolerance(tolerance)?;
    candidate.check_same_groups(baseline)?;
    let per_group: Vec<(String, bool)> = candidate
        .iter()
        .zip(baseline.values())
        .map(|((g, c), &b)| (g.to_string(), c >= b - tolerance))
        .collect();
    let passed = per_group.iter().all(|(_, ok)| *ok);
    Ok(NoHarmVerdict { per_group, passed })
}

pub(crate) fn check_tolerance(tolerance: f64) -> Result<()> {
    if tolerance.is_finite() && tolerance >= 0.0 {
        Ok(())
    } else {
        Err(MetricError::InvalidTolerance(tolerance))
    }
}
