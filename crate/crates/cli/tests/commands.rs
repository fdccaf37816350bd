use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modalcores"))
        .args(args)
        .current_dir(cwd)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], cwd: &Path) -> String {
    let out = run(args, cwd);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn gen_fit_assign_eval_dbscan() {
    let dir = tempfile::tempdir().unwrap();
    let cwd = dir.path();
    ok(&["gen", "--preset", "three-gaussians", "--seed", "3", "--n", "900"], cwd);
    ok(&["fit", "data.csv", "--label-column", "2", "--out-dir", "run"], cwd);
    ok(
        &[
            "assign",
            "data.csv",
            "--label-column",
            "2",
            "--estimates",
            "run/estimates.jsonl",
            "--out",
            "assigned.csv",
        ],
        cwd,
    );
    let body = |p: &str| -> String {
        std::fs::read_to_string(cwd.join(p))
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| format!("{l}\n"))
            .collect()
    };
    assert_eq!(body("assigned.csv"), body("run/labels.csv"));

    let report: serde_json::Value = serde_json::from_str(&ok(
        &["eval", "--pred", "run/labels.csv", "--truth", "data.csv", "--label-column", "2"],
        cwd,
    ))
    .unwrap();
    assert!(report["ari"].as_f64().unwrap() > 0.9, "{report}");

    let report: serde_json::Value = serde_json::from_str(&ok(
        &[
            "eval",
            "--estimates",
            "run/estimates.jsonl",
            "--truth-sets",
            "truth.csv",
            "--data",
            "data.csv",
            "--label-column",
            "2",
        ],
        cwd,
    ))
    .unwrap();
    assert_eq!(report["unmatched_truths"].as_array().unwrap().len(), 0);

    ok(
        &["dbscan", "data.csv", "--label-column", "2", "--eps", "0.6", "--out", "db.csv"],
        cwd,
    );
    assert_eq!(body("db.csv").lines().count(), 901);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cwd = dir.path();
    assert_eq!(run(&["fit", "missing.csv"], cwd).status.code(), Some(1));

    std::fs::write(cwd.join("bad.csv"), "1,2\n3\n").unwrap();
    assert_eq!(run(&["fit", "bad.csv"], cwd).status.code(), Some(3));

    std::fs::write(cwd.join("ok.csv"), "0\n1\n2\n3\n4\n").unwrap();
    assert_eq!(run(&["fit", "ok.csv", "--k", "9"], cwd).status.code(), Some(2));
}
