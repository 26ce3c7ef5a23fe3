//! Synthetic cohorts with controlled group-conditional behaviour.
//!
//! A [`CohortSpec`] fixes, per group, the sample count, the class prior and
//! the confusion row P(ŷ | y, group). [`generate`] draws a run from it with
//! ChaCha8 seeded by `seed`, so fixtures are identical across platforms.
//!
//! Draw order per record (groups in spec order, records in index order):
//! one uniform for the true label, one for the prediction, then one uniform
//! per label for the score noise. Categorical draws use the inverse CDF over
//! the label order.

pub mod oracle;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::records::{
    EvaluationRun, GroupSpace, LabelSpace, PredictionRecord, RecordError, RunManifest, Split,
    UtilityKind,
};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid cohort spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Record(#[from] RecordError),
}

pub type Result<T> = std::result::Result<T, SynthError>;

fn default_method() -> String {
    "synthetic".into()
}

fn default_dataset() -> String {
    "synthetic".into()
}

fn default_split() -> Split {
    Split::Test
}

fn default_kind() -> UtilityKind {
    UtilityKind::Accuracy
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortSpec {
    pub seed: u64,
    #[serde(default = "default_method")]
    pub method: String,
    #[serde(default = "default_dataset")]
    pub dataset: String,
    #[serde(default = "default_split")]
    pub split: Split,
    #[serde(default = "default_kind")]
    pub utility_kind: UtilityKind,
    pub labels: Vec<String>,
    pub groups: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positive_label: Option<String>,
    pub n_per_group: BTreeMap<String, usize>,
    /// group -> label -> P(y = label | group). Missing labels have probability 0.
    pub class_prior: BTreeMap<String, BTreeMap<String, f64>>,
    /// group -> true label -> predicted label -> probability.
    pub confusion: BTreeMap<String, BTreeMap<String, BTreeMap<String, f64>>>,
    /// Weight of uniform noise added to the one-hot score of the predicted
    /// class before normalising. 0 gives one-hot scores.
    #[serde(default)]
    pub score_noise: f64,
}

/// Resolved, index-based form of a validated spec.
struct Plan {
    manifest: RunManifest,
    /// per group: (n, prior cdf, confusion cdf per true label)
    groups: Vec<(usize, Vec<f64>, Vec<Vec<f64>>)>,
}

fn invalid(msg: impl Into<String>) -> SynthError {
    SynthError::InvalidSpec(msg.into())
}

fn distribution(labels: &[String], probs: &BTreeMap<String, f64>, what: &str) -> Result<Vec<f64>> {
    if let Some(k) = probs.keys().find(|k| !labels.contains(k)) {
        return Err(invalid(format!("{what}: unknown label {k:?}")));
    }
    let mut cdf = Vec::with_capacity(labels.len());
    let mut acc = 0.0;
    for l in labels {
        let p = probs.get(l).copied().unwrap_or(0.0);
        if !p.is_finite() || p < 0.0 {
            return Err(invalid(format!("{what}: probability {p} for {l:?}")));
        }
        acc += p;
        cdf.push(acc);
    }
    if (acc - 1.0).abs() > 1e-9 {
        return Err(invalid(format!(
            "{what}: probabilities sum to {acc}, expected 1"
        )));
    }
    Ok(cdf)
}

impl CohortSpec {
    fn plan(&self) -> Result<Plan> {
        if !self.score_noise.is_finite() || self.score_noise < 0.0 {
            return Err(invalid(format!(
                "score_noise {} must be >= 0",
                self.score_noise
            )));
        }
        let label_space = LabelSpace::new(self.labels.clone(), self.positive_label.clone())
            .map_err(|e| invalid(e.to_string()))?;
        let group_space =
            GroupSpace::new(self.groups.clone()).map_err(|e| invalid(e.to_string()))?;
        let manifest = RunManifest::new(
            self.method.clone(),
            self.dataset.clone(),
            self.seed as i64,
            self.split,
            self.utility_kind,
            label_space,
            group_space,
        )
        .map_err(|e| invalid(e.to_string()))?;

        for map_keys in [
            self.n_per_group.keys().collect::<Vec<_>>(),
            self.class_prior.keys().collect(),
            self.confusion.keys().collect(),
        ] {
            if let Some(g) = map_keys.into_iter().find(|g| !self.groups.contains(g)) {
                return Err(invalid(format!("unknown group {g:?}")));
            }
        }
        let mut groups = Vec::with_capacity(self.groups.len());
        for g in &self.groups {
            let n = *self
                .n_per_group
                .get(g)
                .ok_or_else(|| invalid(format!("n_per_group missing {g:?}")))?;
            if n == 0 {
                return Err(invalid(format!("n_per_group[{g:?}] must be >= 1")));
            }
            let prior = self
                .class_prior
                .get(g)
                .ok_or_else(|| invalid(format!("class_prior missing {g:?}")))?;
            let prior = distribution(&self.labels, prior, &format!("class_prior[{g}]"))?;
            let rows = self
                .confusion
                .get(g)
                .ok_or_else(|| invalid(format!("confusion missing {g:?}")))?;
            if let Some(k) = rows.keys().find(|k| !self.labels.contains(k)) {
                return Err(invalid(format!("confusion[{g}]: unknown label {k:?}")));
            }
            let mut cdfs = Vec::with_capacity(self.labels.len());
            for y in &self.labels {
                let row = rows
                    .get(y)
                    .ok_or_else(|| invalid(format!("confusion[{g}] missing row {y:?}")))?;
                cdfs.push(distribution(
                    &self.labels,
                    row,
                    &format!("confusion[{g}][{y}]"),
                )?);
            }
            groups.push((n, prior, cdfs));
        }
        Ok(Plan { manifest, groups })
    }

    /// Spec with the same behaviour in every group.
    pub fn uniform(
        seed: u64,
        labels: &[&str],
        groups: &[&str],
        n_per_group: usize,
        prior: &[f64],
        confusion: &[Vec<f64>],
    ) -> Self {
        let labels: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
        let to_map = |p: &[f64]| -> BTreeMap<String, f64> {
            labels.iter().cloned().zip(p.iter().copied()).collect()
        };
        let rows: BTreeMap<String, BTreeMap<String, f64>> = labels
            .iter()
            .cloned()
            .zip(confusion.iter().map(|r| to_map(r)))
            .collect();
        Self {
            seed,
            method: default_method(),
            dataset: default_dataset(),
            split: default_split(),
            utility_kind: default_kind(),
            positive_label: None,
            n_per_group: groups
                .iter()
                .map(|g| (g.to_string(), n_per_group))
                .collect(),
            class_prior: groups
                .iter()
                .map(|g| (g.to_string(), to_map(prior)))
                .collect(),
            confusion: groups
                .iter()
                .map(|g| (g.to_string(), rows.clone()))
                .collect(),
            groups: groups.iter().map(|s| s.to_string()).collect(),
            labels,
            score_noise: 0.0,
        }
    }
}

fn draw(cdf: &[f64], u: f64) -> usize {
    // u in [0, 1); the last non-zero entry absorbs rounding at the top
    cdf.iter().position(|&c| u < c).unwrap_or_else(|| {
        let total = *cdf.last().expect("non-empty");
        cdf.iter()
            .position(|&c| c >= total)
            .expect("total is attained")
    })
}

/// Draws a validated run from `spec`; identical specs give identical runs.
pub fn generate(spec: &CohortSpec) -> Result<EvaluationRun> {
    let plan = spec.plan()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n_labels = spec.labels.len();
    let mut records = Vec::new();
    for (g, (n, prior, confusion)) in plan.groups.iter().enumerate() {
        for i in 0..*n {
            let y = draw(prior, rng.gen::<f64>());
            let y_hat = draw(&confusion[y], rng.gen::<f64>());
            let weights: Vec<f64> = (0..n_labels)
                .map(|c| f64::from(u8::from(c == y_hat)) + spec.score_noise * rng.gen::<f64>())
                .collect();
            let total: f64 = weights.iter().sum();
            let scores = weights
                .iter()
                .enumerate()
                .map(|(c, w)| (c, (w / total).clamp(0.0, 1.0)))
                .collect();
            records.push(PredictionRecord {
                sample_id: format!("{}-{i:06}", spec.groups[g]),
                true_label: y,
                predicted_label: y_hat,
                scores: Some(scores),
                group: g,
            });
        }
    }
    Ok(EvaluationRun::new(plan.manifest, records)?)
}

/// Bounds for [`random_spec`].
#[derive(Debug, Clone, Copy)]
pub struct RandomBounds {
    pub max_records: usize,
    pub max_labels: usize,
    pub max_groups: usize,
    pub utility_kind: UtilityKind,
}

impl Default for RandomBounds {
    fn default() -> Self {
        Self {
            max_records: 200,
            max_labels: 4,
            max_groups: 3,
            utility_kind: UtilityKind::Accuracy,
        }
    }
}

fn random_simplex<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    // occasional zeros exercise the degenerate-cell paths
    let raw: Vec<f64> = (0..k)
        .map(|_| {
            if rng.gen_bool(0.15) {
                0.0
            } else {
                rng.gen::<f64>() + 1e-3
            }
        })
        .collect();
    let total: f64 = raw.iter().sum();
    if total == 0.0 {
        let mut v = vec![0.0; k];
        v[rng.gen_range(0..k)] = 1.0;
        return v;
    }
    let mut v: Vec<f64> = raw.iter().map(|x| x / total).collect();
    // pin the sum to exactly 1 on the largest entry
    let rest: f64 = v.iter().sum::<f64>() - 1.0;
    let imax = (0..k)
        .max_by(|&a, &b| v[a].total_cmp(&v[b]))
        .expect("k >= 1");
    v[imax] -= rest;
    v
}

/// A random but valid spec within `bounds`, fully determined by `seed`.
pub fn random_spec(seed: u64, bounds: RandomBounds) -> CohortSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_c0de);
    let n_labels = match bounds.utility_kind {
        UtilityKind::Auc => 2,
        UtilityKind::Accuracy => rng.gen_range(2..=bounds.max_labels.max(2)),
    };
    let n_groups = rng.gen_range(2..=bounds.max_groups.max(2));
    let labels: Vec<String> = (0..n_labels).map(|c| format!("c{c}")).collect();
    let groups: Vec<String> = (0..n_groups).map(|g| format!("g{g}")).collect();
    let per_group_max = (bounds.max_records / n_groups).max(1);
    let to_map = |p: Vec<f64>| -> BTreeMap<String, f64> { labels.iter().cloned().zip(p).collect() };
    let mut n_per_group = BTreeMap::new();
    let mut class_prior = BTreeMap::new();
    let mut confusion = BTreeMap::new();
    for g in &groups {
        n_per_group.insert(g.clone(), rng.gen_range(1..=per_group_max));
        class_prior.insert(g.clone(), to_map(random_simplex(&mut rng, n_labels)));
        let rows = labels
            .iter()
            .map(|y| (y.clone(), to_map(random_simplex(&mut rng, n_labels))))
            .collect();
        confusion.insert(g.clone(), rows);
    }
    let score_noise = if rng.gen_bool(0.3) {
        0.0
    } else {
        rng.gen::<f64>() * 2.0
    };
    CohortSpec {
        seed: rng.gen(),
        method: default_method(),
        dataset: default_dataset(),
        split: default_split(),
        utility_kind: bounds.utility_kind,
        labels,
        groups,
        positive_label: None,
        n_per_group,
        class_prior,
        confusion,
        score_noise,
    }
}
