//! Brute-force reference implementations.
//!
//! Nothing here calls into `metrics` or `selection` functions; only their
//! result and error types are shared. Metrics are recomputed by scanning the
//! record list once per quantity, AUC by enumerating every positive/negative
//! pair, and zone selection by exhaustive pairwise comparison.

use crate::metrics::{EqOddVariant, GroupUtilityVector, MetricError, MetricReport};
use crate::records::{EvaluationRun, PredictionRecord, UtilityKind};
use crate::selection::{
    CandidatePoint, SelectionError, SelectionResult, ZoneAssignment, ZoneLabel, ZoneTally,
};

fn count(records: &[PredictionRecord], pred: impl Fn(&PredictionRecord) -> bool) -> usize {
    let mut n = 0;
    for r in records {
        if pred(r) {
            n += 1;
        }
    }
    n
}

fn max_pairwise_diff(rates: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..rates.len() {
        for j in 0..rates.len() {
            if i != j {
                let d = (rates[i] - rates[j]).abs();
                if d > worst {
                    worst = d;
                }
            }
        }
    }
    worst
}

/// AUC by explicit pair enumeration: (concordant + ties / 2) / (P * N).
fn pair_auc(records: &[&PredictionRecord], positive: usize) -> Option<f64> {
    let mut concordant = 0.0;
    let mut pairs = 0.0;
    for p in records.iter().filter(|r| r.true_label == positive) {
        for n in records.iter().filter(|r| r.true_label != positive) {
            let sp = p.score(positive)?;
            let sn = n.score(positive)?;
            if sp > sn {
                concordant += 1.0;
            } else if sp == sn {
                concordant += 0.5;
            }
            pairs += 1.0;
        }
    }
    if pairs == 0.0 {
        None
    } else {
        Some(concordant / pairs)
    }
}

pub fn oracle_metrics(
    run: &EvaluationRun,
    variant: EqOddVariant,
) -> Result<MetricReport, MetricError> {
    let records = run.records();
    let group_names = run.groups().groups();
    let n_groups = group_names.len();
    let n_labels = run.labels().len();
    let positive = run.labels().positive();
    let kind = run.manifest().utility_kind;
    let mut warnings = Vec::new();

    let (utilities, overall) = match kind {
        UtilityKind::Accuracy => {
            let mut u = Vec::new();
            for g in 0..n_groups {
                let n = count(records, |r| r.group == g);
                let correct = count(records, |r| {
                    r.group == g && r.true_label == r.predicted_label
                });
                u.push(correct as f64 / n as f64);
            }
            let overall =
                count(records, |r| r.true_label == r.predicted_label) as f64 / records.len() as f64;
            (u, overall)
        }
        UtilityKind::Auc => {
            if n_labels != 2 {
                return Err(MetricError::NotBinary(n_labels));
            }
            let mut u = Vec::new();
            let mut any = false;
            for (g, name) in group_names.iter().enumerate() {
                let members: Vec<&PredictionRecord> =
                    records.iter().filter(|r| r.group == g).collect();
                match pair_auc(&members, positive) {
                    Some(a) => {
                        any = true;
                        u.push(a);
                    }
                    None => {
                        warnings.push(format!("group {name:?}: single class"));
                        u.push(0.5);
                    }
                }
            }
            if !any {
                return Err(MetricError::AllGroupsDegenerate);
            }
            let all: Vec<&PredictionRecord> = records.iter().collect();
            let overall = pair_auc(&all, positive).ok_or(MetricError::AllGroupsDegenerate)?;
            (u, overall)
        }
    };

    // equalized odds
    let mut class_scores = Vec::new();
    for y in 0..n_labels {
        let mut evaluable = true;
        for g in 0..n_groups {
            if count(records, |r| r.group == g && r.true_label == y) == 0 {
                evaluable = false;
            }
        }
        if !evaluable {
            warnings.push(format!("class {y} skipped"));
            continue;
        }
        let predicted: Vec<usize> = match variant {
            EqOddVariant::Diagonal => vec![y],
            EqOddVariant::Full => (0..n_labels).collect(),
        };
        for p in predicted {
            let mut rates = Vec::new();
            for g in 0..n_groups {
                let n = count(records, |r| r.group == g && r.true_label == y);
                let hit = count(records, |r| {
                    r.group == g && r.true_label == y && r.predicted_label == p
                });
                rates.push(hit as f64 / n as f64);
            }
            class_scores.push(1.0 - max_pairwise_diff(&rates));
        }
    }
    if class_scores.is_empty() {
        return Err(MetricError::NoEvaluableClass);
    }
    let mut eqodd = 0.0;
    for s in &class_scores {
        eqodd += s;
    }
    eqodd /= class_scores.len() as f64;

    // demographic parity
    let dp_labels: Vec<usize> = if n_labels == 2 {
        vec![positive]
    } else {
        (0..n_labels).collect()
    };
    let mut worst_dp_diff = 0.0f64;
    for y in dp_labels {
        let mut rates = Vec::new();
        for g in 0..n_groups {
            let n = count(records, |r| r.group == g);
            let hit = count(records, |r| r.group == g && r.predicted_label == y);
            rates.push(hit as f64 / n as f64);
        }
        worst_dp_diff = worst_dp_diff.max(max_pairwise_diff(&rates));
    }

    let mut lo = utilities[0];
    let mut hi = utilities[0];
    for &u in &utilities {
        if u < lo {
            lo = u;
        }
        if u > hi {
            hi = u;
        }
    }
    Ok(MetricReport {
        utility_kind: kind,
        overall,
        worst: lo,
        gap: hi - lo,
        eqodd,
        dp: 1.0 - worst_dp_diff,
        group_utilities: GroupUtilityVector::new(
            kind,
            group_names.iter().cloned().zip(utilities).collect(),
        ),
        warnings,
    })
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    let mut ss = 0.0;
    for i in 0..a.len() {
        ss += (a[i] - b[i]) * (a[i] - b[i]);
    }
    ss.sqrt()
}

fn min_of(v: &[f64]) -> f64 {
    let mut m = v[0];
    for &x in v {
        if x < m {
            m = x;
        }
    }
    m
}

fn zone_of(c: &[f64], b: &[f64], tolerance: f64) -> ZoneLabel {
    let ok: Vec<bool> = (0..b.len()).map(|g| c[g] >= b[g] - tolerance).collect();
    if b.len() == 2 && b[0] != b[1] {
        let (adv, dis) = if b[0] > b[1] { (0, 1) } else { (1, 0) };
        return match (ok[adv], ok[dis]) {
            (true, true) => ZoneLabel::Optimal,
            (false, true) => ZoneLabel::SubOptimal,
            (false, false) => ZoneLabel::Degradation,
            (true, false) => ZoneLabel::Unwanted,
        };
    }
    let held = ok.iter().filter(|&&h| h).count();
    if held == b.len() {
        return ZoneLabel::Optimal;
    }
    if held == 0 {
        return ZoneLabel::Degradation;
    }
    let floor = min_of(b);
    let mut worst_held = true;
    for g in 0..b.len() {
        if b[g] == floor && !ok[g] {
            worst_held = false;
        }
    }
    if worst_held {
        ZoneLabel::SubOptimal
    } else {
        ZoneLabel::Unwanted
    }
}

fn gap_beats(o: &CandidatePoint, m: &CandidatePoint) -> bool {
    if o.gap != m.gap {
        return o.gap < m.gap;
    }
    if o.overall != m.overall {
        return o.overall > m.overall;
    }
    o.run_id < m.run_id
}

/// Index whose candidate no other candidate beats.
fn unbeaten(members: &[usize], beats: impl Fn(usize, usize) -> bool) -> Option<usize> {
    for &m in members {
        let mut best = true;
        for &o in members {
            if o != m && beats(o, m) {
                best = false;
            }
        }
        if best {
            return Some(m);
        }
    }
    None
}

pub fn oracle_select(
    candidates: &[CandidatePoint],
    baseline: &CandidatePoint,
    tolerance: f64,
) -> Result<SelectionResult, SelectionError> {
    if candidates.is_empty() {
        return Err(SelectionError::EmptyCandidateSet);
    }
    if !(tolerance >= 0.0 && tolerance.is_finite()) {
        return Err(SelectionError::InvalidTolerance(tolerance));
    }
    let b = baseline.group_utilities.values();
    for c in candidates {
        if c.group_utilities.groups() != baseline.group_utilities.groups() {
            return Err(SelectionError::GroupSpaceMismatch(c.run_id.clone()));
        }
    }
    let zones: Vec<ZoneLabel> = candidates
        .iter()
        .map(|c| zone_of(c.group_utilities.values(), b, tolerance))
        .collect();
    let mut tally = ZoneTally::default();
    for z in &zones {
        tally.add(*z);
    }
    let members =
        |z: ZoneLabel| -> Vec<usize> { (0..candidates.len()).filter(|&i| zones[i] == z).collect() };

    let mut picked = None;
    for zone in [
        ZoneLabel::Optimal,
        ZoneLabel::SubOptimal,
        ZoneLabel::Degradation,
    ] {
        let m = members(zone);
        if m.is_empty() {
            continue;
        }
        let winner = if zone == ZoneLabel::Degradation {
            unbeaten(&m, |o, w| {
                let (co, cw) = (&candidates[o], &candidates[w]);
                let (dox, dw) = (
                    distance(co.group_utilities.values(), b),
                    distance(cw.group_utilities.values(), b),
                );
                if dox != dw {
                    return dox < dw;
                }
                let (wo, ww) = (
                    min_of(co.group_utilities.values()),
                    min_of(cw.group_utilities.values()),
                );
                if wo != ww {
                    return wo > ww;
                }
                co.run_id < cw.run_id
            })
        } else {
            unbeaten(&m, |o, w| gap_beats(&candidates[o], &candidates[w]))
        };
        picked = winner.map(|i| (i, zone));
        break;
    }

    Ok(SelectionResult {
        selected: picked.map(|(i, _)| candidates[i].clone()),
        zone: picked.map(|(_, z)| z),
        tally_string: format!(
            "{}|{}|{}|{}",
            tally.optimal, tally.sub_optimal, tally.degradation, tally.unwanted
        ),
        tally,
        zones: candidates
            .iter()
            .zip(&zones)
            .map(|(c, &zone)| ZoneAssignment {
                run_id: c.run_id.clone(),
                method: c.method.clone(),
                zone,
            })
            .collect(),
        rationale: match picked {
            Some((i, z)) => format!("oracle picked {} in {z}", candidates[i].run_id),
            None => "oracle: every candidate is Unwanted".into(),
        },
    })
}

/// Brute-force distance-to-utopia selection: `(run_id, distance)`.
pub fn oracle_dto(candidates: &[CandidatePoint]) -> Result<(String, f64), SelectionError> {
    if candidates.is_empty() {
        return Err(SelectionError::EmptyCandidateSet);
    }
    let g = candidates[0].group_utilities.len();
    let mut utopia = vec![f64::NEG_INFINITY; g];
    for c in candidates {
        if c.group_utilities.groups() != candidates[0].group_utilities.groups() {
            return Err(SelectionError::GroupSpaceMismatch(c.run_id.clone()));
        }
        for (k, &u) in c.group_utilities.values().iter().enumerate() {
            if u > utopia[k] {
                utopia[k] = u;
            }
        }
    }
    let d: Vec<f64> = candidates
        .iter()
        .map(|c| distance(c.group_utilities.values(), &utopia))
        .collect();
    let all: Vec<usize> = (0..candidates.len()).collect();
    let best = unbeaten(&all, |o, w| {
        if d[o] != d[w] {
            return d[o] < d[w];
        }
        let (wo, ww) = (
            min_of(candidates[o].group_utilities.values()),
            min_of(candidates[w].group_utilities.values()),
        );
        if wo != ww {
            return wo > ww;
        }
        candidates[o].run_id < candidates[w].run_id
    })
    .expect("a strict total order has a minimum");
    Ok((candidates[best].run_id.clone(), d[best]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::records::{GroupSpace, LabelSpace, RunManifest, Split};
    use std::collections::BTreeMap;

    fn pt(id: &str, a: f64, b: f64) -> CandidatePoint {
        CandidatePoint {
            run_id: id.into(),
            method: "m".into(),
            group_utilities: GroupUtilityVector::new(
                UtilityKind::Accuracy,
                vec![("A".into(), a), ("B".into(), b)],
            ),
            gap: (a - b).abs(),
            overall: (a + b) / 2.0,
        }
    }

    #[test]
    fn dp_fixture() {
        let m = RunManifest::new(
            "m",
            "d",
            0,
            Split::Test,
            UtilityKind::Accuracy,
            LabelSpace::new(vec!["0".into(), "1".into()], None).unwrap(),
            GroupSpace::new(vec!["A".into(), "B".into()]).unwrap(),
        )
        .unwrap();
        let rows = [
            (0, 1),
            (0, 1),
            (0, 0),
            (0, 0),
            (1, 1),
            (1, 0),
            (1, 0),
            (1, 0),
        ];
        let records = rows
            .iter()
            .enumerate()
            .map(|(i, &(g, p))| PredictionRecord {
                sample_id: format!("{i}"),
                true_label: p,
                predicted_label: p,
                scores: None,
                group: g,
            })
            .collect();
        let run = EvaluationRun::new(m, records).unwrap();
        let r = oracle_metrics(&run, EqOddVariant::Diagonal).unwrap();
        assert!((r.dp - 0.75).abs() < 1e-15);
    }

    #[test]
    fn auc_pair_fixture() {
        let m = RunManifest::new(
            "m",
            "d",
            0,
            Split::Test,
            UtilityKind::Auc,
            LabelSpace::new(vec!["0".into(), "1".into()], None).unwrap(),
            GroupSpace::new(vec!["A".into(), "B".into()]).unwrap(),
        )
        .unwrap();
        let rows = [
            (0, 1, 0.9),
            (0, 1, 0.8),
            (0, 0, 0.7),
            (0, 0, 0.8),
            (1, 0, 0.3),
            (1, 1, 0.6),
        ];
        let records = rows
            .iter()
            .enumerate()
            .map(|(i, &(g, y, s))| PredictionRecord {
                sample_id: format!("{i}"),
                true_label: y,
                predicted_label: y,
                scores: Some(BTreeMap::from([(1, s)])),
                group: g,
            })
            .collect();
        let run = EvaluationRun::new(m, records).unwrap();
        let r = oracle_metrics(&run, EqOddVariant::Diagonal).unwrap();
        assert_eq!(r.group_utilities.values(), &[0.875, 1.0]);
    }

    #[test]
    fn select_fixtures() {
        let erm = pt("erm", 0.9052, 0.8376);
        let r = oracle_select(&[pt("randaug", 0.9069, 0.8389)], &erm, 0.0).unwrap();
        assert_eq!(r.zone, Some(ZoneLabel::Optimal));
        let r = oracle_select(&[pt("u", 0.95, 0.80)], &erm, 0.0).unwrap();
        assert_eq!(r.zones[0].zone, ZoneLabel::Unwanted);
        assert!(r.selected.is_none());
        let c = [
            pt("1", 0.90, 0.80),
            pt("2", 0.85, 0.85),
            pt("3", 0.95, 0.70),
        ];
        let (id, d) = oracle_dto(&c).unwrap();
        assert_eq!(id, "1");
        assert!((d - 0.05f64.hypot(0.05)).abs() < 1e-12);
    }
}
