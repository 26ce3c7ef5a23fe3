use std::path::Path;
use std::process::{Command, Output};

use nhfair::records::{RecordFormat, UtilityKind};
use nhfair::synth::{self, CohortSpec};

fn nhfair(args: &[&str], config: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nhfair"));
    cmd.args(args).env_remove("NHFAIR_CONFIG");
    if let Some(path) = config {
        cmd.env("NHFAIR_CONFIG", path);
    }
    cmd.output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

/// Two datasets x three methods, one seed each, split between JSONL and CSV.
fn write_runs(dir: &Path) {
    for (d, dataset) in ["toy-a", "toy-b"].iter().enumerate() {
        for (m, method) in ["erm", "mixup", "gapreg"].iter().enumerate() {
            let hit = 0.7 + 0.08 * m as f64 - 0.05 * d as f64;
            let confusion = [vec![hit, 1.0 - hit], vec![0.25, 0.75]];
            let mut spec = CohortSpec::uniform(
                31 * d as u64 + m as u64,
                &["no", "yes"],
                &["f", "m"],
                80,
                &[0.5, 0.5],
                &confusion,
            );
            spec.method = method.to_string();
            spec.dataset = dataset.to_string();
            spec.utility_kind = UtilityKind::Auc;
            spec.score_noise = 0.6;
            let run = synth::generate(&spec).unwrap();
            let (format, ext) = if m % 2 == 0 {
                (RecordFormat::Jsonl, "jsonl")
            } else {
                (RecordFormat::Csv, "csv")
            };
            run.save(&dir.join(format!("{dataset}-{method}.{ext}")), format)
                .unwrap();
        }
    }
}

#[test]
fn evaluate_prints_a_percent_table() {
    let dir = tempfile::tempdir().unwrap();
    write_runs(dir.path());
    let out = nhfair(&["evaluate", dir.path().to_str().unwrap()], None);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "method,dataset,split,seed,kind,utility,worst,gap,eqodd,dp"
    );
    // one row per run; single-seed cells get no aggregate row
    assert_eq!(text.lines().count(), 7);
    assert!(text.lines().any(|l| l.starts_with("erm,toy-a,test,")));
}

#[test]
fn evaluate_formats_and_units() {
    let dir = tempfile::tempdir().unwrap();
    write_runs(dir.path());
    let pattern = format!("{}/*-erm.jsonl", dir.path().display());
    let md = nhfair(&["evaluate", "--format", "md", &pattern], None);
    assert!(md.status.success(), "{}", stderr(&md));
    assert!(stdout(&md).starts_with("| method |"));

    let json = nhfair(
        &[
            "evaluate", "--format", "json", "--units", "fraction", &pattern,
        ],
        None,
    );
    let value: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(value["runs"].as_array().unwrap().len(), 2);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    write_runs(dir.path());
    let cfg = dir.path().join("engine.conf");
    std::fs::write(&cfg, "# defaults\nformat = json\n").unwrap();
    let input = dir.path().join("toy-a-erm.jsonl");
    let input = input.to_str().unwrap();

    let from_env = nhfair(&["evaluate", input], Some(&cfg));
    assert!(stdout(&from_env).trim_start().starts_with('{'));
    let overridden = nhfair(&["evaluate", "--format", "csv", input], Some(&cfg));
    assert!(stdout(&overridden).starts_with("method,"));
    let explicit = nhfair(
        &["evaluate", "--config", cfg.to_str().unwrap(), input],
        None,
    );
    assert!(stdout(&explicit).trim_start().starts_with('{'));
}

#[test]
fn input_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let no_match = nhfair(
        &["evaluate", &format!("{}/*.jsonl", dir.path().display())],
        None,
    );
    assert_eq!(no_match.status.code(), Some(2));
    assert!(stderr(&no_match).contains("no runs matched"));

    let orphan = dir.path().join("orphan.jsonl");
    std::fs::write(
        &orphan,
        "{\"sample_id\":\"a\",\"y\":\"1\",\"y_hat\":\"1\",\"group\":\"f\"}\n",
    )
    .unwrap();
    let missing = nhfair(&["evaluate", orphan.to_str().unwrap()], None);
    assert_eq!(missing.status.code(), Some(2));
    assert!(stderr(&missing).contains("orphan"), "{}", stderr(&missing));

    let bad_flag = nhfair(
        &["evaluate", "--tolerance", "-0.1", orphan.to_str().unwrap()],
        None,
    );
    assert_eq!(bad_flag.status.code(), Some(2));

    let no_baseline = nhfair(&["select-fwh", orphan.to_str().unwrap()], None);
    assert_eq!(no_baseline.status.code(), Some(2));
}

#[test]
fn select_commands_on_summaries() {
    let dir = tempfile::tempdir().unwrap();
    let erm = dir.path().join("erm.csv");
    std::fs::write(
        &erm,
        "run_id,method,adv%,dis%,overall%\nerm_a,ERM,90.52,83.76,86.57\nerm_b,ERM,91.00,82.10,86.20\n",
    )
    .unwrap();
    let cands = dir.path().join("cands.csv");
    std::fs::write(
        &cands,
        "run_id,method,adv%,dis%,overall%\nrandaug,RandAug,90.69,83.89,86.72\ngapreg,GapReg,89.07,83.17,85.62\n",
    )
    .unwrap();

    let erm_out = nhfair(&["select-erm", erm.to_str().unwrap()], None);
    assert!(erm_out.status.success(), "{}", stderr(&erm_out));
    let v: serde_json::Value = serde_json::from_slice(&erm_out.stdout).unwrap();
    assert_eq!(v["selected"]["run_id"], "erm_a");

    let out_path = dir.path().join("fwh.json");
    let fwh = nhfair(
        &[
            "select-fwh",
            "--baseline",
            erm.to_str().unwrap(),
            "--baseline-id",
            "erm_a",
            "--out",
            out_path.to_str().unwrap(),
            cands.to_str().unwrap(),
        ],
        None,
    );
    assert!(fwh.status.success(), "{}", stderr(&fwh));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["result"]["selected"]["run_id"], "randaug");
    assert_eq!(v["result"]["zone"], "Optimal");
    assert_eq!(v["result"]["tally_string"], "1|0|1|0");
}

#[test]
fn all_unwanted_is_a_warning_not_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("base.csv");
    std::fs::write(
        &base,
        "run_id,method,adv,dis,overall\nerm,ERM,0.9,0.8,0.85\n",
    )
    .unwrap();
    let cands = dir.path().join("cands.csv");
    std::fs::write(
        &cands,
        "run_id,method,adv,dis,overall\nx,X,0.95,0.7,0.83\ny,Y,0.91,0.79,0.85\n",
    )
    .unwrap();
    let out = nhfair(
        &[
            "select-fwh",
            "--baseline",
            base.to_str().unwrap(),
            cands.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("warning"));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["result"]["selected"].is_null());
    assert_eq!(v["result"]["tally_string"], "0|0|0|2");
}

#[test]
fn evaluate_cells_feed_compare() {
    let dir = tempfile::tempdir().unwrap();
    let runs = dir.path().join("runs");
    std::fs::create_dir(&runs).unwrap();
    write_runs(&runs);
    let cells = dir.path().join("cells.csv");
    let eval = nhfair(
        &[
            "evaluate",
            "--cells",
            cells.to_str().unwrap(),
            runs.to_str().unwrap(),
        ],
        None,
    );
    assert!(eval.status.success(), "{}", stderr(&eval));

    let cd = dir.path().join("cd.json");
    let out = nhfair(
        &[
            "compare",
            "--metric",
            "utility",
            "--alpha",
            "0.10",
            "--out",
            cd.to_str().unwrap(),
            cells.to_str().unwrap(),
        ],
        None,
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&cd).unwrap()).unwrap();
    assert_eq!(v["n_blocks"], 2);
    assert_eq!(v["methods"].as_array().unwrap().len(), 3);
    let svg = std::fs::read_to_string(cd.with_extension("svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("height=\"132\""));

    let excluded = nhfair(
        &["compare", "--exclude", "mixup", cells.to_str().unwrap()],
        None,
    );
    let v: serde_json::Value = serde_json::from_slice(&excluded.stdout).unwrap();
    assert_eq!(v["methods"].as_array().unwrap().len(), 2);
}
