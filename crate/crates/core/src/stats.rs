//! Seed aggregation and cross-dataset method comparison.
//!
//! Methods are ranked within each dataset (block), the Friedman statistic
//! tests whether mean ranks differ, and the Nemenyi critical difference
//! decides which methods are indistinguishable.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::MetricReport;
use crate::records::{RunManifest, Split};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("seed {seed} appears twice for method {method:?} on dataset {dataset:?}")]
    DuplicateSeed {
        method: String,
        dataset: String,
        seed: i64,
    },
    #[error("no {metric} value for method {method:?} on dataset {dataset:?}")]
    MissingCell {
        method: String,
        dataset: String,
        metric: MetricName,
    },
    #[error("degenerate rank matrix: {0}")]
    DegenerateMatrix(String),
    #[error("critical difference table covers 2 <= k <= 20 methods, got {0}")]
    UnsupportedK(usize),
    #[error("alpha must be 0.05 or 0.10, got {0}")]
    UnsupportedAlpha(f64),
    #[error("row {row}: {message}")]
    MalformedRow { row: usize, message: String },
}

pub type Result<T> = std::result::Result<T, StatsError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricName {
    Utility,
    Worst,
    Gap,
    EqOdd,
    Dp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    LowerBetter,
    HigherBetter,
}

impl MetricName {
    /// Column order of the metric tables.
    pub const ALL: [MetricName; 5] = [
        MetricName::Utility,
        MetricName::Worst,
        MetricName::Gap,
        MetricName::EqOdd,
        MetricName::Dp,
    ];

    pub fn direction(self) -> Direction {
        match self {
            MetricName::Gap => Direction::LowerBetter,
            _ => Direction::HigherBetter,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MetricName::Utility => "utility",
            MetricName::Worst => "worst",
            MetricName::Gap => "gap",
            MetricName::EqOdd => "eqodd",
            MetricName::Dp => "dp",
        }
    }
}

impl fmt::Display for MetricName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MetricName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "utility" | "acc" | "auc" => Ok(Self::Utility),
            "worst" => Ok(Self::Worst),
            "gap" => Ok(Self::Gap),
            "eqodd" => Ok(Self::EqOdd),
            "dp" => Ok(Self::Dp),
            other => Err(format!(
                "unknown metric {other:?} (utility|worst|gap|eqodd|dp)"
            )),
        }
    }
}

/// Mean and sample standard deviation (n - 1 denominator; 0 for n = 1).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    assert!(n > 0, "mean_std of an empty slice");
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateCell {
    pub method: String,
    pub dataset: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<Split>,
    pub metric: MetricName,
    pub mean: f64,
    pub std: f64,
    pub n_seeds: usize,
}

/// Seed-averages reports per (method, dataset, split, metric). Output is
/// sorted by method, dataset, split, then metric column order.
type CellKey<'a> = (&'a str, &'a str, Split);

pub fn aggregate(reports: &[(MetricReport, RunManifest)]) -> Result<Vec<AggregateCell>> {
    let mut grouped: BTreeMap<CellKey, Vec<(i64, &MetricReport)>> = BTreeMap::new();
    for (report, manifest) in reports {
        let seeds = grouped
            .entry((
                manifest.method.as_str(),
                manifest.dataset.as_str(),
                manifest.split,
            ))
            .or_default();
        if seeds.iter().any(|(s, _)| *s == manifest.seed) {
            return Err(StatsError::DuplicateSeed {
                method: manifest.method.clone(),
                dataset: manifest.dataset.clone(),
                seed: manifest.seed,
            });
        }
        seeds.push((manifest.seed, report));
    }
    let mut cells = Vec::new();
    for ((method, dataset, split), mut seeds) in grouped {
        seeds.sort_by_key(|(s, _)| *s);
        for metric in MetricName::ALL {
            let values: Vec<f64> = seeds.iter().map(|(_, r)| r.value(metric)).collect();
            let (mean, std) = mean_std(&values);
            cells.push(AggregateCell {
                method: method.to_string(),
                dataset: dataset.to_string(),
                split: Some(split),
                metric,
                mean,
                std,
                n_seeds: values.len(),
            });
        }
    }
    Ok(cells)
}

/// Writes cells as `method,dataset,split,metric,mean,std,n_seeds`.
pub fn write_cells<W: std::io::Write>(cells: &[AggregateCell], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "method", "dataset", "split", "metric", "mean", "std", "n_seeds",
    ])?;
    for c in cells {
        w.write_record([
            c.method.clone(),
            c.dataset.clone(),
            c.split.map(|s| s.to_string()).unwrap_or_default(),
            c.metric.to_string(),
            c.mean.to_string(),
            c.std.to_string(),
            c.n_seeds.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the cell CSV written by [`write_cells`]. `split`, `std` and
/// `n_seeds` are optional columns (defaults none, 0 and 1).
pub fn read_cells<R: std::io::Read>(input: R) -> Result<Vec<AggregateCell>> {
    let mut reader = csv::Reader::from_reader(input);
    let header = reader
        .headers()
        .map_err(|e| StatsError::MalformedRow {
            row: 1,
            message: e.to_string(),
        })?
        .clone();
    let col = |name: &str| header.iter().position(|h| h.trim() == name);
    let need = |name: &str| {
        col(name).ok_or_else(|| StatsError::MalformedRow {
            row: 1,
            message: format!("missing column {name:?}"),
        })
    };
    let (method, dataset, metric, mean) = (
        need("method")?,
        need("dataset")?,
        need("metric")?,
        need("mean")?,
    );
    let (split, std, n_seeds) = (col("split"), col("std"), col("n_seeds"));
    let mut cells = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| StatsError::MalformedRow {
            row: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = row.position().map(|p| p.line() as usize).unwrap_or(0);
        let bad = |message: String| StatsError::MalformedRow { row: line, message };
        let num = |i: usize| -> Result<f64> {
            let cell = row.get(i).unwrap_or("").trim();
            let v: f64 = cell
                .parse()
                .map_err(|_| bad(format!("{cell:?} is not a number")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(bad(format!("{cell:?} is not finite")))
            }
        };
        cells.push(AggregateCell {
            method: row[method].trim().to_string(),
            dataset: row[dataset].trim().to_string(),
            split: match split.map(|i| row[i].trim()) {
                None | Some("") => None,
                Some(text) => Some(text.parse().map_err(bad)?),
            },
            metric: row[metric].trim().parse().map_err(bad)?,
            mean: num(mean)?,
            std: std.map(num).transpose()?.unwrap_or(0.0),
            n_seeds: match n_seeds {
                Some(i) => row[i]
                    .trim()
                    .parse()
                    .map_err(|_| bad(format!("n_seeds {:?} is not an integer", &row[i])))?,
                None => 1,
            },
        });
    }
    Ok(cells)
}

/// Within-block ranks; rows are blocks (datasets), columns are methods.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankMatrix {
    pub methods: Vec<String>,
    pub blocks: Vec<String>,
    pub ranks: Vec<Vec<f64>>,
    pub direction: Direction,
}

/// Ranks `values` so the best gets 1; ties share their average rank.
pub fn average_ranks(values: &[f64], direction: Direction) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| match direction {
        Direction::LowerBetter => values[a].total_cmp(&values[b]),
        Direction::HigherBetter => values[b].total_cmp(&values[a]),
    });
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j + 2) as f64 / 2.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

impl RankMatrix {
    /// `values[block][method]`.
    pub fn from_values(
        methods: Vec<String>,
        blocks: Vec<String>,
        values: &[Vec<f64>],
        direction: Direction,
    ) -> Self {
        let ranks = values
            .iter()
            .map(|row| average_ranks(row, direction))
            .collect();
        Self {
            methods,
            blocks,
            ranks,
            direction,
        }
    }

    pub fn k(&self) -> usize {
        self.methods.len()
    }

    pub fn n(&self) -> usize {
        self.blocks.len()
    }

    pub fn mean_ranks(&self) -> Vec<f64> {
        let n = self.n() as f64;
        (0..self.k())
            .map(|j| self.ranks.iter().map(|row| row[j]).sum::<f64>() / n)
            .collect()
    }
}

/// Ranks method means per dataset for `metric`. Methods and datasets are
/// taken from the cells (sorted); every combination must be present, and
/// all cells must come from the same split.
pub fn rank_matrix(cells: &[AggregateCell], metric: MetricName) -> Result<RankMatrix> {
    let relevant: Vec<&AggregateCell> = cells.iter().filter(|c| c.metric == metric).collect();
    let splits: BTreeSet<Option<Split>> = relevant.iter().map(|c| c.split).collect();
    if splits.len() > 1 {
        return Err(StatsError::DegenerateMatrix(format!(
            "cells mix splits {splits:?}; filter to one split first"
        )));
    }
    let methods: Vec<String> = relevant
        .iter()
        .map(|c| c.method.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let blocks: Vec<String> = relevant
        .iter()
        .map(|c| c.dataset.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let lookup: BTreeMap<(&str, &str), f64> = relevant
        .iter()
        .map(|c| ((c.dataset.as_str(), c.method.as_str()), c.mean))
        .collect();
    let mut values = Vec::with_capacity(blocks.len());
    for b in &blocks {
        let mut row = Vec::with_capacity(methods.len());
        for m in &methods {
            match lookup.get(&(b.as_str(), m.as_str())) {
                Some(&v) => row.push(v),
                None => {
                    return Err(StatsError::MissingCell {
                        method: m.clone(),
                        dataset: b.clone(),
                        metric,
                    })
                }
            }
        }
        values.push(row);
    }
    Ok(RankMatrix::from_values(
        methods,
        blocks,
        &values,
        metric.direction(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FriedmanResult {
    pub statistic: f64,
    pub df: usize,
}

/// Classical Friedman chi-square on mean ranks.
pub fn friedman(m: &RankMatrix) -> Result<FriedmanResult> {
    friedman_with(m, false)
}

/// Friedman chi-square; `tie_correction` divides by the usual
/// `1 - sum(t^3 - t) / (N k (k^2 - 1))` factor.
pub fn friedman_with(m: &RankMatrix, tie_correction: bool) -> Result<FriedmanResult> {
    let (k, n) = (m.k(), m.n());
    if k < 2 || n < 2 {
        return Err(StatsError::DegenerateMatrix(format!(
            "need k >= 2 methods and N >= 2 blocks, got k = {k}, N = {n}"
        )));
    }
    if m.ranks
        .iter()
        .any(|row| row.len() != k || row.iter().any(|r| !r.is_finite()))
    {
        return Err(StatsError::DegenerateMatrix(
            "ragged or non-finite ranks".into(),
        ));
    }
    let (kf, nf) = (k as f64, n as f64);
    // centered form of 12N/(k(k+1)) * sum(r^2) - 3N(k+1); exactly 0 when all mean ranks tie
    let centre = (kf + 1.0) / 2.0;
    let spread: f64 = m
        .mean_ranks()
        .iter()
        .map(|r| (r - centre) * (r - centre))
        .sum();
    let mut statistic = 12.0 * nf / (kf * (kf + 1.0)) * spread;
    if tie_correction {
        let ties: f64 = m.ranks.iter().map(|row| tie_term(row)).sum();
        let factor = 1.0 - ties / (nf * kf * (kf * kf - 1.0));
        statistic = if factor > 0.0 {
            statistic / factor
        } else {
            0.0
        };
    }
    Ok(FriedmanResult {
        statistic,
        df: k - 1,
    })
}

/// sum(t^3 - t) over groups of tied ranks within one row.
fn tie_term(row: &[f64]) -> f64 {
    let mut sorted = row.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut total = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        total += t * t * t - t;
        i = j + 1;
    }
    total
}

/// Two-tailed Nemenyi q values (studentized range at infinite df over √2)
/// for k = 2..=20.
const Q_005: [f64; 19] = [
    1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164, 3.219, 3.268, 3.313, 3.354,
    3.391, 3.426, 3.458, 3.489, 3.517, 3.544,
];
const Q_010: [f64; 19] = [
    1.645, 2.052, 2.291, 2.459, 2.589, 2.693, 2.780, 2.855, 2.920, 2.978, 3.030, 3.077, 3.120,
    3.159, 3.196, 3.230, 3.261, 3.291, 3.319,
];

pub fn nemenyi_q(k: usize, alpha: f64) -> Result<f64> {
    if !(2..=20).contains(&k) {
        return Err(StatsError::UnsupportedK(k));
    }
    let table = if (alpha - 0.05).abs() < 1e-12 {
        &Q_005
    } else if (alpha - 0.10).abs() < 1e-12 {
        &Q_010
    } else {
        return Err(StatsError::UnsupportedAlpha(alpha));
    };
    Ok(table[k - 2])
}

/// Critical difference `q_alpha(k) * sqrt(k (k + 1) / (6 N))`.
pub fn nemenyi_cd(k: usize, n: usize, alpha: f64) -> Result<f64> {
    let q = nemenyi_q(k, alpha)?;
    if n == 0 {
        return Err(StatsError::DegenerateMatrix("N must be at least 1".into()));
    }
    let (kf, nf) = (k as f64, n as f64);
    Ok(q * (kf * (kf + 1.0) / (6.0 * nf)).sqrt())
}

/// Maximal runs of methods (in mean-rank order) whose extreme ranks differ
/// by less than `cd`. Single-method runs are omitted.
pub fn cliques(mean_ranks: &[(String, f64)], cd: f64) -> Vec<Vec<String>> {
    let mut sorted: Vec<&(String, f64)> = mean_ranks.iter().collect();
    sorted.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    let mut out = Vec::new();
    let mut last_end = None;
    for i in 0..sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1].1 - sorted[i].1 < cd {
            j += 1;
        }
        // ends are non-decreasing, so an interval is contained in the previous one iff it
        // ends at the same place
        if j > i && last_end != Some(j) {
            out.push(sorted[i..=j].iter().map(|(m, _)| m.clone()).collect());
            last_end = Some(j);
        }
    }
    out
}

/// Everything a critical-difference plot needs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CdData {
    pub metric: MetricName,
    pub direction: Direction,
    pub methods: Vec<String>,
    pub mean_ranks: BTreeMap<String, f64>,
    pub n_blocks: usize,
    pub statistic: f64,
    pub df: usize,
    pub alpha: f64,
    pub cd: f64,
    pub cliques: Vec<Vec<String>>,
}

impl CdData {
    /// `(method, mean rank)` sorted by rank, then name.
    pub fn ranked(&self) -> Vec<(String, f64)> {
        let mut v: Vec<(String, f64)> = self
            .mean_ranks
            .iter()
            .map(|(m, &r)| (m.clone(), r))
            .collect();
        v.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        v
    }
}

pub fn compare(cells: &[AggregateCell], metric: MetricName, alpha: f64) -> Result<CdData> {
    let m = rank_matrix(cells, metric)?;
    let f = friedman(&m)?;
    let cd = nemenyi_cd(m.k(), m.n(), alpha)?;
    let ranked: Vec<(String, f64)> = m.methods.iter().cloned().zip(m.mean_ranks()).collect();
    Ok(CdData {
        metric,
        direction: m.direction,
        cliques: cliques(&ranked, cd),
        mean_ranks: ranked.into_iter().collect(),
        methods: m.methods,
        n_blocks: m.blocks.len(),
        statistic: f.statistic,
        df: f.df,
        alpha,
        cd,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_matrix() -> RankMatrix {
        RankMatrix {
            methods: vec!["a".into(), "b".into(), "c".into()],
            blocks: (0..4).map(|i| format!("d{i}")).collect(),
            ranks: vec![vec![1.0, 2.0, 3.0]; 4],
            direction: Direction::LowerBetter,
        }
    }

    #[test]
    fn mean_and_std() {
        let (m, s) = mean_std(&[86.5, 86.7, 86.6, 86.4, 86.65]);
        assert!((m - 86.57).abs() < 1e-9);
        assert!((s - 0.1204159).abs() < 1e-6);
        assert_eq!(mean_std(&[0.3]), (0.3, 0.0));
    }

    #[test]
    fn ranks_with_ties() {
        assert_eq!(
            average_ranks(&[3.0, 1.0, 2.0], Direction::LowerBetter),
            vec![3.0, 1.0, 2.0]
        );
        assert_eq!(
            average_ranks(&[0.9, 0.9, 0.5], Direction::HigherBetter),
            vec![1.5, 1.5, 3.0]
        );
        assert_eq!(
            average_ranks(&[1.0; 4], Direction::HigherBetter),
            vec![2.5; 4]
        );
    }

    #[test]
    fn friedman_fixtures() {
        let f = friedman(&constant_matrix()).unwrap();
        assert!((f.statistic - 8.0).abs() < 1e-9);
        assert_eq!(f.df, 2);
        let tied = RankMatrix {
            ranks: vec![vec![2.0; 3]; 4],
            ..constant_matrix()
        };
        assert_eq!(friedman(&tied).unwrap().statistic, 0.0);
        assert_eq!(friedman_with(&tied, true).unwrap().statistic, 0.0);
        // no ties: correction factor is 1
        let c = friedman_with(&constant_matrix(), true).unwrap();
        assert!((c.statistic - 8.0).abs() < 1e-9);
        let one_block = RankMatrix {
            blocks: vec!["d".into()],
            ranks: vec![vec![1.0, 2.0, 3.0]],
            ..constant_matrix()
        };
        assert!(matches!(
            friedman(&one_block),
            Err(StatsError::DegenerateMatrix(_))
        ));
    }

    #[test]
    fn friedman_tie_correction_inflates() {
        let m = RankMatrix::from_values(
            vec!["a".into(), "b".into(), "c".into()],
            vec!["x".into(), "y".into(), "z".into()],
            &[
                vec![1.0, 1.0, 2.0],
                vec![1.0, 2.0, 3.0],
                vec![1.0, 1.0, 3.0],
            ],
            Direction::LowerBetter,
        );
        let plain = friedman(&m).unwrap().statistic;
        let corrected = friedman_with(&m, true).unwrap().statistic;
        assert!(corrected > plain);
    }

    #[test]
    fn cd_values() {
        let cd = nemenyi_cd(3, 4, 0.05).unwrap();
        assert!((cd - 1.657).abs() < 1e-3);
        for n in [1usize, 4, 25] {
            let cd = nemenyi_cd(2, n, 0.05).unwrap();
            assert!((cd - 1.960 / (n as f64).sqrt()).abs() < 1e-12);
        }
        assert_eq!(
            nemenyi_cd(25, 4, 0.05).unwrap_err(),
            StatsError::UnsupportedK(25)
        );
        assert_eq!(
            nemenyi_cd(1, 4, 0.05).unwrap_err(),
            StatsError::UnsupportedK(1)
        );
        assert!(matches!(
            nemenyi_cd(3, 4, 0.01),
            Err(StatsError::UnsupportedAlpha(_))
        ));
        assert!(nemenyi_cd(3, 4, 0.10).unwrap() < cd);
    }

    #[test]
    fn q_tables_increase_with_k() {
        for t in [&Q_005, &Q_010] {
            assert!(t.windows(2).all(|w| w[0] < w[1]));
        }
        assert!(Q_005.iter().zip(&Q_010).all(|(a, b)| a > b));
    }

    #[test]
    fn clique_examples() {
        let r = |v: &[(&str, f64)]| {
            v.iter()
                .map(|(m, x)| (m.to_string(), *x))
                .collect::<Vec<_>>()
        };
        let ranks = r(&[("m1", 1.0), ("m2", 1.5), ("m3", 3.5)]);
        assert_eq!(
            cliques(&ranks, 1.0),
            vec![vec!["m1".to_string(), "m2".into()]]
        );
        assert_eq!(cliques(&ranks, 10.0).len(), 1);
        assert_eq!(cliques(&ranks, 10.0)[0].len(), 3);
        assert!(cliques(&ranks, 0.0).is_empty());
        let ranks = r(&[("a", 1.0), ("b", 1.8), ("c", 2.6), ("d", 3.4)]);
        assert_eq!(
            cliques(&ranks, 1.0),
            vec![
                vec!["a".to_string(), "b".into()],
                vec!["b".into(), "c".into()],
                vec!["c".into(), "d".into()]
            ]
        );
    }

    #[test]
    fn missing_cell_named() {
        let cell = |m: &str, d: &str, v: f64| AggregateCell {
            method: m.into(),
            dataset: d.into(),
            split: None,
            metric: MetricName::Gap,
            mean: v,
            std: 0.0,
            n_seeds: 1,
        };
        let cells = vec![
            cell("ERM", "CelebA", 0.0676),
            cell("OxonFair", "CelebA", 0.0687),
            cell("ERM", "FairFace", 0.0087),
        ];
        match rank_matrix(&cells, MetricName::Gap).unwrap_err() {
            StatsError::MissingCell {
                method, dataset, ..
            } => {
                assert_eq!(
                    (method.as_str(), dataset.as_str()),
                    ("OxonFair", "FairFace")
                );
            }
            other => panic!("{other:?}"),
        }
        let m = rank_matrix(&cells[..2], MetricName::Gap).unwrap();
        assert_eq!(m.ranks, vec![vec![1.0, 2.0]]);
    }

    #[test]
    fn cells_csv_round_trip() {
        let cells = vec![AggregateCell {
            method: "ERM".into(),
            dataset: "CelebA".into(),
            split: Some(Split::Test),
            metric: MetricName::EqOdd,
            mean: 0.8191,
            std: 0.0012,
            n_seeds: 5,
        }];
        let mut buf = Vec::new();
        write_cells(&cells, &mut buf).unwrap();
        assert_eq!(read_cells(buf.as_slice()).unwrap(), cells);
        let minimal = "method,dataset,metric,mean\nERM,CelebA,gap,6.76\n";
        let c = read_cells(minimal.as_bytes()).unwrap();
        assert_eq!((c[0].std, c[0].n_seeds), (0.0, 1));
        let bad = "method,dataset,metric,mean\nERM,CelebA,bogus,6.76\n";
        assert!(matches!(
            read_cells(bad.as_bytes()),
            Err(StatsError::MalformedRow { row: 2, .. })
        ));
    }
}
