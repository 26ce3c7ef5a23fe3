//! Table and plot rendering.
//!
//! Tables follow the column order Utility, Worst, Gap, EqOdd, DP and print
//! percentages rounded half-to-even at two decimals. The critical-difference
//! SVG is written by hand with fixed-precision coordinates, so identical
//! inputs give identical bytes.

use std::fmt::Write as _;

use serde::Serialize;

use crate::metrics::MetricReport;
use crate::records::{RunManifest, Split, UtilityKind};
use crate::stats::{AggregateCell, CdData, MetricName};

/// `0.86565` -> `"86.57"`; ties at the third decimal go to the even digit.
pub fn format_percent(fraction: f64) -> String {
    format_fixed(fraction * 100.0, 2)
}

/// Rounds half-to-even at `decimals` places and formats without exponent.
pub fn format_fixed(value: f64, decimals: u32) -> String {
    let scale = 10f64.powi(decimals as i32);
    let scaled = (value * scale).round_ties_even();
    if scaled == 0.0 {
        // avoid "-0.00"
        return format!("{:.*}", decimals as usize, 0.0);
    }
    format!("{:.*}", decimals as usize, scaled / scale)
}

/// Inverse of [`format_percent`] at its precision.
pub fn parse_percent(text: &str) -> Option<f64> {
    text.trim()
        .trim_end_matches('%')
        .parse::<f64>()
        .ok()
        .map(|v| v / 100.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputUnits {
    Fraction,
    #[default]
    Percent,
}

impl std::str::FromStr for OutputUnits {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fraction" => Ok(Self::Fraction),
            "percent" => Ok(Self::Percent),
            other => Err(format!("unknown units {other:?} (fraction|percent)")),
        }
    }
}

impl OutputUnits {
    pub fn format(self, fraction: f64) -> String {
        match self {
            OutputUnits::Percent => format_percent(fraction),
            OutputUnits::Fraction => format_fixed(fraction, 4),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    #[default]
    Csv,
    Json,
    Md,
}

impl std::str::FromStr for TableFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            "md" | "markdown" => Ok(Self::Md),
            other => Err(format!("unknown format {other:?} (csv|json|md)")),
        }
    }
}

/// One evaluated run file.
#[derive(Debug, Clone, Serialize)]
pub struct EvaluatedRun {
    pub source: String,
    pub method: String,
    pub dataset: String,
    pub split: Split,
    pub seed: i64,
    pub report: MetricReport,
}

impl EvaluatedRun {
    pub fn new(source: impl Into<String>, manifest: &RunManifest, report: MetricReport) -> Self {
        Self {
            source: source.into(),
            method: manifest.method.clone(),
            dataset: manifest.dataset.clone(),
            split: manifest.split,
            seed: manifest.seed,
            report,
        }
    }
}

/// Seed aggregate for one (method, dataset, split).
#[derive(Debug, Clone, Serialize)]
pub struct AggregateRow {
    pub method: String,
    pub dataset: String,
    pub split: Split,
    pub utility_kind: UtilityKind,
    pub cells: Vec<AggregateCell>,
}

const HEADER: [&str; 10] = [
    "method", "dataset", "split", "seed", "kind", "utility", "worst", "gap", "eqodd", "dp",
];

fn run_row(run: &EvaluatedRun, units: OutputUnits) -> Vec<String> {
    let mut row = vec![
        run.method.clone(),
        run.dataset.clone(),
        run.split.to_string(),
        run.seed.to_string(),
        run.report.utility_kind.label().to_string(),
    ];
    row.extend(
        MetricName::ALL
            .iter()
            .map(|&m| units.format(run.report.value(m))),
    );
    row
}

fn aggregate_row(agg: &AggregateRow, units: OutputUnits) -> Vec<String> {
    let n = agg.cells.first().map(|c| c.n_seeds).unwrap_or(0);
    let mut row = vec![
        agg.method.clone(),
        agg.dataset.clone(),
        agg.split.to_string(),
        format!("mean of {n}"),
        agg.utility_kind.label().to_string(),
    ];
    for metric in MetricName::ALL {
        let cell = agg.cells.iter().find(|c| c.metric == metric);
        row.push(match cell {
            Some(c) => format!("{} ± {}", units.format(c.mean), units.format(c.std)),
            None => String::new(),
        });
    }
    row
}

/// Renders per-run rows followed by `mean ± std` rows for every
/// (method, dataset, split) evaluated on more than one seed.
pub fn render_metric_table(
    runs: &[EvaluatedRun],
    aggregates: &[AggregateRow],
    format: TableFormat,
    units: OutputUnits,
) -> String {
    let multi: Vec<&AggregateRow> = aggregates
        .iter()
        .filter(|a| a.cells.first().is_some_and(|c| c.n_seeds > 1))
        .collect();
    match format {
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(HEADER).expect("in-memory write");
            for r in runs {
                w.write_record(run_row(r, units)).expect("in-memory write");
            }
            for a in &multi {
                w.write_record(aggregate_row(a, units))
                    .expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
        }
        TableFormat::Md => {
            let mut out = String::new();
            let _ = writeln!(out, "| {} |", HEADER.join(" | "));
            let _ = writeln!(out, "|{}", "---|".repeat(HEADER.len()));
            for row in runs
                .iter()
                .map(|r| run_row(r, units))
                .chain(multi.iter().map(|a| aggregate_row(a, units)))
            {
                let _ = writeln!(out, "| {} |", row.join(" | "));
            }
            out
        }
        TableFormat::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                runs: &'a [EvaluatedRun],
                aggregates: &'a [AggregateRow],
            }
            let mut s =
                serde_json::to_string_pretty(&Doc { runs, aggregates }).expect("serializes");
            s.push('\n');
            s
        }
    }
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

pub const SVG_WIDTH: f64 = 800.0;
const AXIS_LEFT: f64 = 200.0;
const AXIS_RIGHT: f64 = 600.0;
const AXIS_Y: f64 = 40.0;

pub fn svg_height(k: usize) -> f64 {
    60.0 + 24.0 * k as f64
}

/// Critical-difference diagram: rank axis 1..k, each method hanging from
/// its mean rank to a label on the left (better half) or right, a CD ruler
/// in the top-left corner, and one thick bar per clique.
pub fn render_cd_svg(data: &CdData) -> String {
    let ranked = data.ranked();
    let k = ranked.len().max(2);
    let height = svg_height(ranked.len());
    let x = |rank: f64| AXIS_LEFT + (rank - 1.0) / (k as f64 - 1.0) * (AXIS_RIGHT - AXIS_LEFT);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{height:.0}" viewBox="0 0 {w:.0} {height:.0}" font-family="monospace" font-size="12">"#,
        w = SVG_WIDTH
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="14" text-anchor="end">{} (N={}, alpha={})</text>"#,
        SVG_WIDTH - 10.0,
        xml_escape(data.metric.as_str()),
        data.n_blocks,
        data.alpha
    );

    // axis and ticks
    let _ = writeln!(
        s,
        r#"<line class="axis" x1="{:.2}" y1="{AXIS_Y:.2}" x2="{:.2}" y2="{AXIS_Y:.2}" stroke="black" stroke-width="1"/>"#,
        AXIS_LEFT, AXIS_RIGHT
    );
    for r in 1..=k {
        let tx = x(r as f64);
        let _ = writeln!(
            s,
            r#"<line x1="{tx:.2}" y1="{:.2}" x2="{tx:.2}" y2="{AXIS_Y:.2}" stroke="black" stroke-width="1"/>"#,
            AXIS_Y - 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{tx:.2}" y="{:.2}" text-anchor="middle">{r}</text>"#,
            AXIS_Y - 8.0
        );
    }

    // CD ruler
    let cd_end = AXIS_LEFT + data.cd / (k as f64 - 1.0) * (AXIS_RIGHT - AXIS_LEFT);
    let _ = writeln!(
        s,
        r#"<line class="cd-ruler" x1="{AXIS_LEFT:.2}" y1="12.00" x2="{cd_end:.2}" y2="12.00" stroke="black" stroke-width="2"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text class="cd-label" x="{:.2}" y="16.00" text-anchor="end">CD = {}</text>"#,
        AXIS_LEFT - 6.0,
        format_fixed(data.cd, 3)
    );

    // method labels
    let half = ranked.len().div_ceil(2);
    for (i, (method, rank)) in ranked.iter().enumerate() {
        let mx = x(*rank);
        let (row, left) = if i < half {
            (i, true)
        } else {
            (ranked.len() - 1 - i, false)
        };
        let y = 72.0 + 24.0 * row as f64;
        let (edge, anchor, tx) = if left {
            (AXIS_LEFT - 20.0, "end", AXIS_LEFT - 24.0)
        } else {
            (AXIS_RIGHT + 20.0, "start", AXIS_RIGHT + 24.0)
        };
        let _ = writeln!(
            s,
            r#"<polyline points="{mx:.2},{AXIS_Y:.2} {mx:.2},{y:.2} {edge:.2},{y:.2}" fill="none" stroke="black" stroke-width="1"/>"#
        );
        let _ = writeln!(
            s,
            r#"<text class="method" x="{tx:.2}" y="{:.2}" text-anchor="{anchor}">{} ({})</text>"#,
            y + 4.0,
            xml_escape(method),
            format_fixed(*rank, 2)
        );
    }

    // cliques
    for (j, clique) in data.cliques.iter().enumerate() {
        let ranks: Vec<f64> = clique
            .iter()
            .filter_map(|m| data.mean_ranks.get(m).copied())
            .collect();
        let lo = ranks.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ranks.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let y = AXIS_Y + 8.0 + 5.0 * j as f64;
        let _ = writeln!(
            s,
            r#"<line class="clique" x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="black" stroke-width="4"/>"#,
            x(lo) - 3.0,
            x(hi) + 3.0
        );
    }
    s.push_str("</svg>\n");
    s
}
