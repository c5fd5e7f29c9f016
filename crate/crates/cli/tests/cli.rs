//! End-to-end checks of the binary: exit statuses, the stats schema, model
//! generation, and run-to-run determinism.

use std::path::Path;
use std::process::{Command, Output};

use tarzan_core::bench::flower_backward_pattern;

fn tarzan(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tarzan"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn gen_flower4(dir: &Path) -> String {
    let out = tarzan(&["gen", "flower", "4", "-o", "."], dir);
    assert!(out.status.success());
    assert!(stdout(&out).contains("query: E<> (Flower.Goal)"));
    "flower4.ta".to_string()
}

#[test]
fn forward_check_reports_a_verdict_with_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let model = gen_flower4(dir.path());
    let out = tarzan(
        &[
            "check",
            "--model",
            &model,
            "--query",
            "E<> (false)",
            "--strategy",
            "dfs",
            "--stats",
            "json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let obj = v.as_object().unwrap();
    for key in [
        "verdict",
        "regions_stored",
        "states_stored",
        "elapsed_ms",
        "strategy",
        "direction",
    ] {
        assert!(obj.contains_key(key), "missing {}", key);
    }
    assert_eq!(obj["verdict"], "unreachable");
    assert_eq!(obj["strategy"], "dfs");
    assert_eq!(obj["direction"], "forward");
}

#[test]
fn reachable_verdict_also_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let model = gen_flower4(dir.path());
    let out = tarzan(
        &["check", "--model", &model, "--query", "E<> (Flower.Goal)"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("verdict: reachable"));
}

#[test]
fn exceeded_limits_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let model = gen_flower4(dir.path());
    let out = tarzan(
        &[
            "check",
            "--model",
            &model,
            "--query",
            "E<> (false)",
            "--max-regions",
            "10",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("limit-exceeded"));
}

#[test]
fn backward_pattern_runs_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let model = gen_flower4(dir.path());
    std::fs::write(dir.path().join("r1.pat"), flower_backward_pattern(4, true)).unwrap();
    let out = tarzan(
        &[
            "check",
            "--model",
            &model,
            "--pattern",
            "r1.pat",
            "--direction",
            "backward",
            "--stats",
            "json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["verdict"], "unreachable");
    assert_eq!(v["direction"], "backward");

    std::fs::write(dir.path().join("r2.pat"), flower_backward_pattern(4, false)).unwrap();
    let out = tarzan(
        &["check", "--model", &model, "--pattern", "r2.pat"],
        dir.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "direction inferred from --pattern"
    );
    assert!(stdout(&out).contains("verdict: reachable"));
}

#[test]
fn conflicting_flags_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let model = gen_flower4(dir.path());
    std::fs::write(dir.path().join("r1.pat"), flower_backward_pattern(4, true)).unwrap();

    let out = tarzan(
        &[
            "check",
            "--model",
            &model,
            "--pattern",
            "r1.pat",
            "--direction",
            "forward",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));

    let out = tarzan(
        &[
            "check",
            "--model",
            &model,
            "--model",
            &model,
            "--pattern",
            "r1.pat",
            "--direction",
            "backward",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));

    let out = tarzan(&["check", "--model", &model], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn parse_and_validation_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.ta"), "automaton A;\nclock x max;\n").unwrap();
    let out = tarzan(
        &["check", "--model", "bad.ta", "--query", "E<> (false)"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr).to_string();
    assert!(err.contains("bad.ta:2:"), "stderr: {}", err);

    std::fs::write(
        dir.path().join("inv.ta"),
        "automaton A;\nclock x max 5;\nlocation q0 initial;\nedge q0 -> q0 { guard x == 6; }\n",
    )
    .unwrap();
    let out = tarzan(
        &["check", "--model", "inv.ta", "--query", "E<> (false)"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn query_can_come_from_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let model = gen_flower4(dir.path());
    std::fs::write(dir.path().join("q.txt"), "E<> (Flower.Goal)\n").unwrap();
    let out = tarzan(
        &["check", "--model", &model, "--query", "@q.txt"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("reachable"));
}

#[test]
fn gen_writes_one_file_per_automaton() {
    let dir = tempfile::tempdir().unwrap();
    let out = tarzan(&["gen", "gates", "5", "-o", "out"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let files: Vec<_> = std::fs::read_dir(dir.path().join("out"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert_eq!(files.len(), 5);
    assert!(stdout(&out).contains("E<> (Unlocker.Goal)"));

    let out = tarzan(&["gen", "ring", "0"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn generated_networks_check_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let out = tarzan(&["gen", "boolean", "3", "-o", "."], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let query_line = stdout(&out)
        .lines()
        .find(|l| l.starts_with("query: "))
        .unwrap()
        .trim_start_matches("query: ")
        .to_string();
    let out = tarzan(
        &[
            "check",
            "--model",
            "boolean3_Boolean1.ta",
            "--model",
            "boolean3_Boolean2.ta",
            "--model",
            "boolean3_Boolean3.ta",
            "--query",
            &query_line,
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("verdict: reachable"));
}

#[test]
fn machine_stats_are_deterministic_modulo_elapsed() {
    let dir = tempfile::tempdir().unwrap();
    let model = gen_flower4(dir.path());
    let run = || {
        let out = tarzan(
            &[
                "check",
                "--model",
                &model,
                "--query",
                "E<> (false)",
                "--stats",
                "json",
            ],
            dir.path(),
        );
        let mut v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
        v.as_object_mut().unwrap().remove("elapsed_ms");
        v
    };
    assert_eq!(run(), run());
}

#[test]
fn math_subcommand_prints_counts() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        stdout(&tarzan(&["math", "fubini", "4"], dir.path())).trim(),
        "75"
    );
    assert_eq!(
        stdout(&tarzan(&["math", "stirling", "4", "2"], dir.path())).trim(),
        "7"
    );
    assert_eq!(
        stdout(&tarzan(&["math", "lemma1", "1", "1"], dir.path())).trim(),
        "4"
    );
}
