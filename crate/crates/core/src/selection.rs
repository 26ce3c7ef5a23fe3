//! Two-stage model selection.
//!
//! Stage one picks a baseline among plain-trained candidates by Euclidean
//! distance to the utopia point (the per-group best utility observed).
//! Stage two classifies every mitigation candidate into a zone relative to
//! that baseline and picks one model following the order
//! Optimal, SubOptimal, Degradation. Unwanted candidates are never picked.
//!
//! Comparisons are weak: a group counts as "not harmed" when
//! `candidate >= baseline - tolerance`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{self, GroupUtilityVector, MetricError, MetricReport};
use crate::records::RunSummary;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SelectionError {
    #[error("candidate set is empty")]
    EmptyCandidateSet,
    #[error("group spaces differ: {0}")]
    GroupSpaceMismatch(String),
    #[error("baseline groups are tied at {0}; no unique advantaged group")]
    AdvantageTie(f64),
    #[error("tolerance must be finite and non-negative, got {0}")]
    InvalidTolerance(f64),
}

impl From<MetricError> for SelectionError {
    fn from(e: MetricError) -> Self {
        match e {
            MetricError::InvalidTolerance(t) => SelectionError::InvalidTolerance(t),
            other => SelectionError::GroupSpaceMismatch(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, SelectionError>;

/// One trained model as a point in group-utility space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidatePoint {
    pub run_id: String,
    pub method: String,
    pub group_utilities: GroupUtilityVector,
    pub gap: f64,
    pub overall: f64,
}

impl CandidatePoint {
    /// Builds a point whose gap is derived from the group utilities.
    pub fn new(
        run_id: impl Into<String>,
        method: impl Into<String>,
        group_utilities: GroupUtilityVector,
        overall: f64,
    ) -> Self {
        Self {
            run_id: run_id.into(),
            method: method.into(),
            gap: metrics::gap(&group_utilities),
            group_utilities,
            overall,
        }
    }

    pub fn from_summary(summary: &RunSummary) -> Self {
        Self::new(
            summary.run_id.clone(),
            summary.method.clone(),
            summary.group_utilities.clone(),
            summary.overall_utility,
        )
    }

    pub fn from_report(
        run_id: impl Into<String>,
        method: impl Into<String>,
        report: &MetricReport,
    ) -> Self {
        Self {
            run_id: run_id.into(),
            method: method.into(),
            group_utilities: report.group_utilities.clone(),
            gap: report.gap,
            overall: report.overall,
        }
    }

    pub fn utilities(&self) -> &[f64] {
        self.group_utilities.values()
    }

    pub fn worst(&self) -> f64 {
        self.group_utilities.min()
    }
}

fn check_groups(a: &CandidatePoint, b: &CandidatePoint) -> Result<()> {
    if a.group_utilities.groups() != b.group_utilities.groups() {
        return Err(SelectionError::GroupSpaceMismatch(format!(
            "{} has {:?}, {} has {:?}",
            a.run_id,
            a.group_utilities.groups(),
            b.run_id,
            b.group_utilities.groups()
        )));
    }
    Ok(())
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UtopiaPoint {
    pub groups: Vec<String>,
    pub coordinates: Vec<f64>,
}

pub fn utopia(candidates: &[CandidatePoint]) -> Result<UtopiaPoint> {
    let first = candidates
        .first()
        .ok_or(SelectionError::EmptyCandidateSet)?;
    let mut coordinates = first.utilities().to_vec();
    for c in &candidates[1..] {
        check_groups(first, c)?;
        for (best, &u) in coordinates.iter_mut().zip(c.utilities()) {
            *best = best.max(u);
        }
    }
    Ok(UtopiaPoint {
        groups: first.group_utilities.groups().to_vec(),
        coordinates,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DtoSelection {
    pub selected: CandidatePoint,
    pub distance: f64,
    pub utopia: UtopiaPoint,
    /// `(run_id, distance)` for every candidate, in input order.
    pub distances: Vec<(String, f64)>,
}

/// Picks the candidate closest to the utopia point. Ties go to the higher
/// worst-group utility, then the smallest `run_id`.
pub fn dto_select(candidates: &[CandidatePoint]) -> Result<DtoSelection> {
    let utopia = utopia(candidates)?;
    let distances: Vec<f64> = candidates
        .iter()
        .map(|c| euclidean(c.utilities(), &utopia.coordinates))
        .collect();
    let best = (0..candidates.len())
        .min_by(|&i, &j| {
            distances[i]
                .total_cmp(&distances[j])
                .then_with(|| candidates[j].worst().total_cmp(&candidates[i].worst()))
                .then_with(|| candidates[i].run_id.cmp(&candidates[j].run_id))
        })
        .expect("non-empty");
    Ok(DtoSelection {
        selected: candidates[best].clone(),
        distance: distances[best],
        distances: candidates
            .iter()
            .zip(&distances)
            .map(|(c, &d)| (c.run_id.clone(), d))
            .collect(),
        utopia,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ZoneLabel {
    Optimal,
    SubOptimal,
    Degradation,
    Unwanted,
}

impl ZoneLabel {
    pub const ALL: [ZoneLabel; 4] = [
        ZoneLabel::Optimal,
        ZoneLabel::SubOptimal,
        ZoneLabel::Degradation,
        ZoneLabel::Unwanted,
    ];
}

impl fmt::Display for ZoneLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ZoneLabel::Optimal => "Optimal",
            ZoneLabel::SubOptimal => "Sub-optimal",
            ZoneLabel::Degradation => "Degradation",
            ZoneLabel::Unwanted => "Unwanted",
        })
    }
}

/// Index of the strictly best baseline group for two-group spaces.
pub fn advantaged_group(baseline: &CandidatePoint) -> Result<usize> {
    let u = baseline.utilities();
    if u.len() != 2 {
        return Err(SelectionError::GroupSpaceMismatch(format!(
            "advantaged group needs exactly 2 groups, got {}",
            u.len()
        )));
    }
    match u[0].total_cmp(&u[1]) {
        Ordering::Greater => Ok(0),
        Ordering::Less => Ok(1),
        Ordering::Equal => Err(SelectionError::AdvantageTie(u[0])),
    }
}

/// Zone of `candidate` relative to `baseline`.
///
/// With two groups and a unique advantaged group the zones are the four
/// quadrants around the baseline. Otherwise (more groups, or tied baseline
/// groups) mixed outcomes are SubOptimal when every group at the baseline
/// minimum is not harmed, and Unwanted otherwise.
pub fn classify_zone(
    candidate: &CandidatePoint,
    baseline: &CandidatePoint,
    tolerance: f64,
) -> Result<ZoneLabel> {
    metrics::check_tolerance(tolerance)?;
    check_groups(candidate, baseline)?;
    let base = baseline.utilities();
    let held: Vec<bool> = candidate
        .utilities()
        .iter()
        .zip(base)
        .map(|(&c, &b)| c >= b - tolerance)
        .collect();
    if held.iter().all(|&h| h) {
        return Ok(ZoneLabel::Optimal);
    }
    if held.iter().all(|&h| !h) {
        return Ok(ZoneLabel::Degradation);
    }
    let disadvantaged_held = match advantaged_group(baseline) {
        Ok(adv) => held[1 - adv],
        Err(_) => {
            let floor = baseline.worst();
            base.iter()
                .zip(&held)
                .filter(|(&b, _)| b == floor)
                .all(|(_, &h)| h)
        }
    };
    Ok(if disadvantaged_held {
        ZoneLabel::SubOptimal
    } else {
        ZoneLabel::Unwanted
    })
}

/// Count of candidates per zone, rendered as `a|b|c|d` in the order
/// Optimal, SubOptimal, Degradation, Unwanted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ZoneTally {
    pub optimal: usize,
    pub sub_optimal: usize,
    pub degradation: usize,
    pub unwanted: usize,
}

impl ZoneTally {
    pub fn add(&mut self, zone: ZoneLabel) {
        match zone {
            ZoneLabel::Optimal => self.optimal += 1,
            ZoneLabel::SubOptimal => self.sub_optimal += 1,
            ZoneLabel::Degradation => self.degradation += 1,
            ZoneLabel::Unwanted => self.unwanted += 1,
        }
    }

    pub fn get(&self, zone: ZoneLabel) -> usize {
        match zone {
            ZoneLabel::Optimal => self.optimal,
            ZoneLabel::SubOptimal => self.sub_optimal,
            ZoneLabel::Degradation => self.degradation,
            ZoneLabel::Unwanted => self.unwanted,
        }
    }

    pub fn total(&self) -> usize {
        self.optimal + self.sub_optimal + self.degradation + self.unwanted
    }
}

impl fmt::Display for ZoneTally {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}|{}|{}|{}",
            self.optimal, self.sub_optimal, self.degradation, self.unwanted
        )
    }
}

impl FromIterator<ZoneLabel> for ZoneTally {
    fn from_iter<I: IntoIterator<Item = ZoneLabel>>(iter: I) -> Self {
        let mut t = ZoneTally::default();
        for z in iter {
            t.add(z);
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZoneAssignment {
    pub run_id: String,
    pub method: String,
    pub zone: ZoneLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionResult {
    pub selected: Option<CandidatePoint>,
    pub zone: Option<ZoneLabel>,
    pub tally: ZoneTally,
    /// `tally` rendered as `a|b|c|d`.
    pub tally_string: String,
    pub zones: Vec<ZoneAssignment>,
    pub rationale: String,
}

/// Classifies every candidate and selects one by zone priority: the
/// smallest gap in Optimal, else the smallest gap in SubOptimal, else the
/// Degradation candidate closest to the baseline. Gap ties go to the higher
/// overall utility, distance ties to the higher worst-group utility; both
/// then fall back to the smallest `run_id`.
pub fn fwh_select(
    candidates: &[CandidatePoint],
    baseline: &CandidatePoint,
    tolerance: f64,
) -> Result<SelectionResult> {
    if candidates.is_empty() {
        return Err(SelectionError::EmptyCandidateSet);
    }
    let zones = candidates
        .iter()
        .map(|c| classify_zone(c, baseline, tolerance))
        .collect::<Result<Vec<_>>>()?;
    let tally: ZoneTally = zones.iter().copied().collect();
    let in_zone = |z: ZoneLabel| {
        candidates
            .iter()
            .zip(&zones)
            .filter(move |(_, &cz)| cz == z)
            .map(|(c, _)| c)
    };
    let by_gap = |a: &&CandidatePoint, b: &&CandidatePoint| {
        a.gap
            .total_cmp(&b.gap)
            .then_with(|| b.overall.total_cmp(&a.overall))
            .then_with(|| a.run_id.cmp(&b.run_id))
    };
    let base = baseline.utilities();
    let by_distance = |a: &&CandidatePoint, b: &&CandidatePoint| {
        euclidean(a.utilities(), base)
            .total_cmp(&euclidean(b.utilities(), base))
            .then_with(|| b.worst().total_cmp(&a.worst()))
            .then_with(|| a.run_id.cmp(&b.run_id))
    };

    let mut rationale = String::new();
    if advantaged_group(baseline).is_err() && base.len() == 2 {
        rationale.push_str(&format!(
            "baseline {} has tied group utilities; mixed candidates were classified by the \
             worst-group rule. ",
            baseline.run_id
        ));
    }
    let pick = if let Some(c) = in_zone(ZoneLabel::Optimal).min_by(by_gap) {
        Some((
            c,
            ZoneLabel::Optimal,
            format!("smallest gap ({:.4}) among Optimal", c.gap),
        ))
    } else if let Some(c) = in_zone(ZoneLabel::SubOptimal).min_by(by_gap) {
        Some((
            c,
            ZoneLabel::SubOptimal,
            format!(
                "no Optimal candidate; smallest gap ({:.4}) among Sub-optimal",
                c.gap
            ),
        ))
    } else {
        in_zone(ZoneLabel::Degradation)
            .min_by(by_distance)
            .map(|c| {
                (
                    c,
                    ZoneLabel::Degradation,
                    format!(
                    "no Optimal or Sub-optimal candidate; closest Degradation candidate to the \
                     baseline (distance {:.4})",
                    euclidean(c.utilities(), base)
                ),
                )
            })
    };
    let (selected, zone) = match pick {
        Some((c, z, why)) => {
            rationale.push_str(&format!("selected {}: {why}", c.run_id));
            (Some(c.clone()), Some(z))
        }
        None => {
            rationale.push_str(&format!(
                "all {} candidates are Unwanted; nothing selected",
                candidates.len()
            ));
            (None, None)
        }
    };
    if tolerance > 0.0 {
        let strict = candidates
            .iter()
            .zip(&zones)
            .filter(|(c, &z)| classify_zone(c, baseline, 0.0).is_ok_and(|s| s != z))
            .count();
        if strict > 0 {
            rationale.push_str(&format!(
                "; tolerance {tolerance} changed the zone of {strict} candidate(s) relative to \
                 strict comparison"
            ));
        }
    }

    Ok(SelectionResult {
        selected,
        zone,
        tally_string: tally.to_string(),
        tally,
        zones: candidates
            .iter()
            .zip(zones)
            .map(|(c, zone)| ZoneAssignment {
                run_id: c.run_id.clone(),
                method: c.method.clone(),
                zone,
            })
            .collect(),
        rationale,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TallyRow {
    pub method: String,
    pub tally: ZoneTally,
    pub tally_string: String,
    /// Datasets with no selected model, excluded from the tally.
    pub omitted: Vec<String>,
}

/// Tallies the zone of the selected model per dataset.
pub fn selected_zone_tally(
    per_dataset: &BTreeMap<String, Option<ZoneLabel>>,
) -> (ZoneTally, Vec<String>) {
    let mut tally = ZoneTally::default();
    let mut omitted = Vec::new();
    for (dataset, zone) in per_dataset {
        match zone {
            Some(z) => tally.add(*z),
            None => omitted.push(dataset.clone()),
        }
    }
    (tally, omitted)
}

/// One tally row per method from `method -> dataset -> SelectionResult`.
pub fn zone_tally_table(
    results: &BTreeMap<String, BTreeMap<String, SelectionResult>>,
) -> Vec<TallyRow> {
    results
        .iter()
        .map(|(method, per_dataset)| {
            let zones = per_dataset
                .iter()
                .map(|(d, r)| (d.clone(), r.zone))
                .collect();
            let (tally, omitted) = selected_zone_tally(&zones);
            TallyRow {
                method: method.clone(),
                tally_string: tally.to_string(),
                tally,
                omitted,
            }
        })
        .collect()
}

/// Number of datasets whose selected model lands in the same zone on both
/// splits, out of the datasets present in both maps.
pub fn zone_match(
    validation: &BTreeMap<String, Option<ZoneLabel>>,
    test: &BTreeMap<String, Option<ZoneLabel>>,
) -> (usize, usize) {
    let mut matched = 0;
    let mut total = 0;
    for (dataset, v) in validation {
        if let Some(t) = test.get(dataset) {
            total += 1;
            if v.is_some() && v == t {
                matched += 1;
            }
        }
    }
    (matched, total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::records::UtilityKind;

    fn pt(id: &str, a: f64, b: f64) -> CandidatePoint {
        CandidatePoint::new(
            id,
            "m",
            GroupUtilityVector::new(
                UtilityKind::Accuracy,
                vec![("A".into(), a), ("B".into(), b)],
            ),
            (a + b) / 2.0,
        )
    }

    #[test]
    fn utopia_is_coordinatewise_max() {
        let c = [
            pt("1", 0.90, 0.80),
            pt("2", 0.85, 0.85),
            pt("3", 0.95, 0.70),
        ];
        assert_eq!(utopia(&c).unwrap().coordinates, vec![0.95, 0.85]);
        assert_eq!(utopia(&c[..1]).unwrap().coordinates, vec![0.90, 0.80]);
        assert_eq!(utopia(&[]).unwrap_err(), SelectionError::EmptyCandidateSet);
    }

    #[test]
    fn dto_three_candidates() {
        let c = [
            pt("1", 0.90, 0.80),
            pt("2", 0.85, 0.85),
            pt("3", 0.95, 0.70),
        ];
        let s = dto_select(&c).unwrap();
        assert_eq!(s.selected.run_id, "1");
        assert!((s.distance - 0.0707).abs() < 1e-4);
        let d: Vec<f64> = s.distances.iter().map(|(_, d)| *d).collect();
        assert!((d[1] - 0.100).abs() < 1e-9 && (d[2] - 0.150).abs() < 1e-9);

        let one = dto_select(&c[..1]).unwrap();
        assert_eq!(one.distance, 0.0);
    }

    #[test]
    fn dto_tie_prefers_higher_worst() {
        // utopia (0.9, 0.9); both at distance 0.1
        let c = [pt("a", 0.9, 0.8), pt("b", 0.8, 0.9), pt("c", 0.85, 0.85)];
        // c is closer (0.0707); drop it to force the tie
        let s = dto_select(&c[..2]).unwrap();
        assert_eq!(s.selected.run_id, "a");
        let c = [pt("z", 0.80, 0.90), pt("y", 0.90, 0.85)];
        // utopia (0.9, 0.9): distances 0.1 and 0.05; not a tie
        assert_eq!(dto_select(&c).unwrap().selected.run_id, "y");
        let c = [pt("p", 0.95, 0.80), pt("q", 0.85, 0.90)];
        // utopia (0.95, 0.9): distances 0.1, 0.1; worst 0.80 vs 0.85
        assert_eq!(dto_select(&c).unwrap().selected.run_id, "q");
    }

    #[test]
    fn zones_two_groups() {
        let erm = pt("erm", 0.9052, 0.8376);
        assert_eq!(
            classify_zone(&pt("ra", 0.9069, 0.8389), &erm, 0.0).unwrap(),
            ZoneLabel::Optimal
        );
        assert_eq!(classify_zone(&erm, &erm, 0.0).unwrap(), ZoneLabel::Optimal);
        let b = pt("b", 0.9, 0.8);
        assert_eq!(
            classify_zone(&pt("x", 0.91, 0.79), &b, 0.0).unwrap(),
            ZoneLabel::Unwanted
        );
        assert_eq!(
            classify_zone(&pt("x", 0.89, 0.81), &b, 0.0).unwrap(),
            ZoneLabel::SubOptimal
        );
        assert_eq!(
            classify_zone(&pt("x", 0.89, 0.79), &b, 0.0).unwrap(),
            ZoneLabel::Degradation
        );
        assert_eq!(
            classify_zone(&pt("x", 0.899, 0.79), &b, 0.005).unwrap(),
            ZoneLabel::Unwanted
        );
    }

    #[test]
    fn zones_tied_baseline() {
        let b = pt("b", 0.8, 0.8);
        assert_eq!(
            advantaged_group(&b).unwrap_err(),
            SelectionError::AdvantageTie(0.8)
        );
        assert_eq!(
            classify_zone(&pt("x", 0.85, 0.75), &b, 0.0).unwrap(),
            ZoneLabel::Unwanted
        );
        assert_eq!(
            classify_zone(&pt("x", 0.85, 0.85), &b, 0.0).unwrap(),
            ZoneLabel::Optimal
        );
        let r = fwh_select(&[pt("x", 0.85, 0.75)], &b, 0.0).unwrap();
        assert!(r.rationale.contains("tied"));
    }

    #[test]
    fn zones_three_groups() {
        let v = |id: &str, u: [f64; 3]| {
            CandidatePoint::new(
                id,
                "m",
                GroupUtilityVector::new(
                    UtilityKind::Accuracy,
                    vec![("A".into(), u[0]), ("B".into(), u[1]), ("C".into(), u[2])],
                ),
                0.0,
            )
        };
        let b = v("b", [0.9, 0.7, 0.8]);
        assert_eq!(
            classify_zone(&v("x", [0.9, 0.7, 0.8]), &b, 0.0).unwrap(),
            ZoneLabel::Optimal
        );
        assert_eq!(
            classify_zone(&v("x", [0.8, 0.6, 0.7]), &b, 0.0).unwrap(),
            ZoneLabel::Degradation
        );
        assert_eq!(
            classify_zone(&v("x", [0.8, 0.75, 0.85]), &b, 0.0).unwrap(),
            ZoneLabel::SubOptimal
        );
        assert_eq!(
            classify_zone(&v("x", [0.95, 0.65, 0.85]), &b, 0.0).unwrap(),
            ZoneLabel::Unwanted
        );
    }

    #[test]
    fn fwh_priority_and_tiebreaks() {
        let b = pt("erm", 0.90, 0.80);
        let mut gapreg = pt("gapreg", 0.91, 0.81);
        gapreg.gap = 0.059;
        let mut other = pt("other", 0.95, 0.85);
        other.gap = 0.068;
        let r = fwh_select(&[other, gapreg], &b, 0.0).unwrap();
        assert_eq!(r.zone, Some(ZoneLabel::Optimal));
        assert_eq!(r.selected.unwrap().run_id, "gapreg");

        // both Optimal: min gap wins
        let x = pt("x", 0.92, 0.86);
        let y = pt("y", 0.95, 0.85);
        let r = fwh_select(&[y, x], &b, 0.0).unwrap();
        assert_eq!(r.selected.unwrap().run_id, "x");
        assert_eq!(r.tally_string, "2|0|0|0");

        // SubOptimal beats Degradation even with a larger gap
        let sub = pt("sub", 0.88, 0.86);
        let deg = pt("deg", 0.79, 0.789);
        let r = fwh_select(&[deg, sub], &b, 0.0).unwrap();
        assert_eq!(r.zone, Some(ZoneLabel::SubOptimal));
        assert_eq!(r.selected.unwrap().run_id, "sub");

        // Degradation: closest to the baseline
        let r = fwh_select(&[pt("far", 0.5, 0.5), pt("near", 0.89, 0.79)], &b, 0.0).unwrap();
        assert_eq!(r.selected.unwrap().run_id, "near");

        // gap tie: higher overall, then run_id
        let mut p = pt("p", 0.95, 0.85);
        let mut q = pt("q", 0.95, 0.85);
        p.overall = 0.9;
        q.overall = 0.91;
        let r = fwh_select(&[p.clone(), q], &b, 0.0).unwrap();
        assert_eq!(r.selected.unwrap().run_id, "q");
        let r = fwh_select(&[pt("k", 0.95, 0.85), pt("j", 0.95, 0.85)], &b, 0.0).unwrap();
        assert_eq!(r.selected.unwrap().run_id, "j");
    }

    #[test]
    fn fwh_all_unwanted() {
        let b = pt("erm", 0.90, 0.80);
        let r = fwh_select(&[pt("u1", 0.95, 0.7), pt("u2", 0.91, 0.79)], &b, 0.0).unwrap();
        assert!(r.selected.is_none() && r.zone.is_none());
        assert_eq!(r.tally_string, "0|0|0|2");
        assert!(r.rationale.contains("Unwanted"));
        assert_eq!(
            fwh_select(&[], &b, 0.0).unwrap_err(),
            SelectionError::EmptyCandidateSet
        );
    }

    #[test]
    fn fwh_tolerance_noted() {
        let b = pt("erm", 0.90, 0.80);
        let edge = pt("edge", 0.897, 0.82);
        let strict = fwh_select(std::slice::from_ref(&edge), &b, 0.0).unwrap();
        assert_eq!(strict.zone, Some(ZoneLabel::SubOptimal));
        let loose = fwh_select(&[edge], &b, 0.005).unwrap();
        assert_eq!(loose.zone, Some(ZoneLabel::Optimal));
        assert!(loose.rationale.contains("tolerance"));
    }

    #[test]
    fn tallies() {
        let mut per = BTreeMap::new();
        for (i, z) in [
            ZoneLabel::Optimal,
            ZoneLabel::Optimal,
            ZoneLabel::SubOptimal,
            ZoneLabel::Degradation,
            ZoneLabel::Optimal,
            ZoneLabel::Degradation,
            ZoneLabel::Optimal,
        ]
        .into_iter()
        .enumerate()
        {
            per.insert(format!("d{i}"), Some(z));
        }
        let (t, omitted) = selected_zone_tally(&per);
        assert_eq!(t.to_string(), "4|1|2|0");
        assert!(omitted.is_empty());
        per.insert("d7".into(), None);
        let (t, omitted) = selected_zone_tally(&per);
        assert_eq!(t.total(), 7);
        assert_eq!(omitted, vec!["d7".to_string()]);
        let all: BTreeMap<_, _> = (0..7)
            .map(|i| (format!("d{i}"), Some(ZoneLabel::Optimal)))
            .collect();
        assert_eq!(selected_zone_tally(&all).0.to_string(), "7|0|0|0");
        assert_eq!(zone_match(&all, &per), (4, 7));
    }
}
