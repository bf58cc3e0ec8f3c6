//! Drives the built binary: exit codes, stream discipline, piping.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn dexarb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dexarb"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn dexarb_with_stdin(args: &[&str], stdin: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_dexarb"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child.stdin.take().expect("piped").write_all(stdin).expect("stdin accepts");
    child.wait_with_output().expect("binary finishes")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

#[test]
fn roundtrip_prints_the_aggregate_gain() {
    let out = dexarb(&["roundtrip", "--x", "100", "--x-prime", "101", "--fee-drops", "10"]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    assert_eq!(stdout_of(&out), "gain 0.99998 XRP\n");
}

#[test]
fn unprofitable_roundtrip_is_a_usage_error() {
    let out = dexarb(&["roundtrip", "--x", "100", "--x-prime", "100"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("error:"));
    assert!(out.stdout.is_empty());
}

#[test]
fn missing_fixture_file_exits_two() {
    let out = dexarb(&["replay", "--fixtures", "no-such-file.jsonl"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("no-such-file.jsonl"));
}

#[test]
fn unknown_flag_exits_one_with_usage_on_stderr() {
    let out = dexarb(&["replay", "--fixtures", "x.jsonl", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_of(&out);
    assert!(err.contains("--bogus"), "{err}");
    assert!(err.contains("Usage"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn help_exits_zero() {
    let out = dexarb(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).contains("Usage"));
}

#[test]
fn malformed_fixture_line_exits_two() {
    let out = dexarb_with_stdin(&["replay", "--fixtures", "-"], b"{\"not\": \"an event\"}\n");
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("line 1"));
}

#[test]
fn gen_pipes_into_replay_and_the_planted_loop_completes() {
    let gen = dexarb(&[
        "gen", "--seed", "7", "--currencies", "6", "--offers", "40", "--ledgers", "5",
        "--plant", "1.2", "3", "--out", "-",
    ]);
    assert!(gen.status.success(), "{}", stderr_of(&gen));
    // Fixture lines on stdout, what was planted on stderr.
    assert!(stderr_of(&gen).contains("\"cycle\": \"XRP>P001@GW>P002@GW>XRP\""));

    let replayed = dexarb_with_stdin(&["replay", "--fixtures", "-"], &gen.stdout);
    assert!(replayed.status.success(), "{}", stderr_of(&replayed));
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&replayed)).unwrap();
    assert_eq!(report["totals"]["completed"], 1);
    assert_eq!(report["totals"]["plans"], 1);
    assert_eq!(report["pnl"][0]["status"], "Completed");
}

#[test]
fn reports_are_byte_identical_and_timing_stays_on_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let fixtures = dir.path().join("fx.jsonl");
    let gen = dexarb(&[
        "gen", "--seed", "9", "--currencies", "5", "--offers", "30", "--ledgers", "4",
        "--plant", "11/10", "4", "--out", fixtures.to_str().unwrap(),
    ]);
    assert!(gen.status.success(), "{}", stderr_of(&gen));
    let truth = std::fs::read_to_string(dir.path().join("fx.jsonl.truth.json")).unwrap();
    assert!(truth.contains("\"product\": \"1.1\""));

    let args = ["replay", "--fixtures", fixtures.to_str().unwrap()];
    let plain = dexarb(&args);
    let again = dexarb(&args);
    let timed = dexarb(&["replay", "--fixtures", fixtures.to_str().unwrap(), "--timed"]);
    assert!(plain.status.success());
    assert_eq!(plain.stdout, again.stdout, "two replays must render identical bytes");
    assert_eq!(plain.stdout, timed.stdout, "timing must not leak into the report");
    assert!(stderr_of(&timed).contains("detect time:"));
    assert!(stderr_of(&plain).is_empty());
}

#[test]
fn allowlist_file_keeps_the_bot_out_of_unlisted_loops() {
    let dir = tempfile::tempdir().unwrap();
    let fixtures = dir.path().join("fx.jsonl");
    let gen = dexarb(&[
        "gen", "--seed", "3", "--currencies", "4", "--offers", "20", "--ledgers", "3",
        "--plant", "1.3", "3", "--out", fixtures.to_str().unwrap(),
    ]);
    assert!(gen.status.success(), "{}", stderr_of(&gen));
    let allow = dir.path().join("allow.txt");
    std::fs::write(&allow, "# nothing the plant uses\nZZZ GW\n").unwrap();

    let out = dexarb(&[
        "replay",
        "--fixtures",
        fixtures.to_str().unwrap(),
        "--allowlist",
        allow.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert!(report["totals"]["detections"].as_u64().unwrap() >= 1, "the loop is still seen");
    assert_eq!(report["totals"]["plans"], 0, "but never traded");

    let strict_missing = dexarb(&[
        "replay",
        "--fixtures",
        fixtures.to_str().unwrap(),
        "--allowlist",
        dir.path().join("absent.txt").to_str().unwrap(),
    ]);
    assert_eq!(strict_missing.status.code(), Some(1), "bad allowlist path is a usage error");
}
