use std::path::{Path, PathBuf};
use std::process::Command;

use matchscope_cli::{run, EXIT_DISCREPANCY, EXIT_OK, EXIT_USAGE};
use serde_json::{json, Value};

fn cli(args: &[&str]) -> i32 {
    let mut argv = vec!["matchscope", "-q"];
    argv.extend_from_slice(args);
    run(argv)
}

fn read(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn body(path: &Path) -> String {
    let text = std::fs::read_to_string(path).unwrap();
    text[text.find("\"body\":").unwrap()..].to_string()
}

fn p(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

fn s(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(cli(&["scan", "group", "--group", "z5", "--frobnicate"]), EXIT_USAGE);
    assert_eq!(cli(&["--budget", "0", "scan", "group", "--group", "z5"]), EXIT_USAGE);
    assert_eq!(cli(&["--shard", "3/2", "scan", "group", "--group", "z5"]), EXIT_USAGE);
    assert_eq!(cli(&["scan", "group", "--group", "z"]), EXIT_USAGE);
    assert_eq!(cli(&["match", "find", "--group", "z5", "--set-a", "1,y", "--set-b", "2,3"]), EXIT_USAGE);
    assert_eq!(cli(&["--help"]), EXIT_OK);
}

#[test]
fn unmatchable_certificate_verifies_and_tampering_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = p(dir.path(), "find.json");
    assert_eq!(cli(&["--out", s(&out), "match", "find", "--group", "z4", "--set-a", "0,2", "--set-b", "1,2"]), EXIT_OK);
    let report = read(&out);
    let cert = report["body"]["report"]["certificate"].clone();
    assert_eq!(cert["kind"], "group-unmatchable");
    assert_eq!(cli(&["verify", "--certificate", s(&out)]), EXIT_OK);

    let mut forged = cert.clone();
    forged["hall_neighbourhood"] = json!([]);
    let bad = p(dir.path(), "forged.json");
    std::fs::write(&bad, forged.to_string()).unwrap();
    assert_eq!(cli(&["verify", "--certificate", s(&bad)]), EXIT_USAGE);

    // a pair that has a matching
    let mut wrong = cert.clone();
    wrong["b"] = json!([[1], [3]]);
    std::fs::write(&bad, wrong.to_string()).unwrap();
    assert_eq!(cli(&["verify", "--certificate", s(&bad)]), EXIT_USAGE);

    let d = json!({ "kind": "theorem-discrepancy", "theorem": "test", "claim": "z4 is unmatchable here", "evidence": cert });
    let disc = p(dir.path(), "discrepancy.json");
    std::fs::write(&disc, d.to_string()).unwrap();
    assert_eq!(cli(&["verify", "--certificate", s(&disc)]), EXIT_DISCREPANCY);

    let empty = p(dir.path(), "empty.json");
    std::fs::write(&empty, "{}").unwrap();
    assert_eq!(cli(&["verify", "--certificate", s(&empty)]), EXIT_USAGE);
}

#[test]
fn shards_merge_into_the_full_report() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let scan = ["scan", "group", "--group", "z6", "--max-size", "3"];
    let full = p(d, "full.json");
    let mut args = vec!["--out", s(&full)];
    args.extend(scan);
    assert_eq!(cli(&args), EXIT_OK);

    let mut streams = Vec::new();
    for i in 0..3 {
        let out = p(d, &format!("part{i}.json"));
        let stream = p(d, &format!("part{i}.jsonl"));
        let shard = format!("{i}/3");
        let mut args = vec!["--out", s(&out), "--shard", &shard, "--emit-pairs", s(&stream)];
        args.extend(scan);
        assert_eq!(cli(&args), EXIT_OK);
        assert_eq!(read(&out)["body"]["execution"]["shard"], shard.as_str());
        streams.push(stream);
    }
    let merged = p(d, "merged.json");
    assert_eq!(cli(&["--out", s(&merged), "merge", s(&streams[2]), s(&streams[0]), s(&streams[1])]), EXIT_OK);
    assert_eq!(body(&merged), body(&full));

    // an incomplete set of shards leaves the scan partial
    let partial = p(d, "partial.json");
    assert_eq!(cli(&["--out", s(&partial), "merge", s(&streams[0])]), EXIT_OK);
    assert_eq!(read(&partial)["body"]["report"]["coverage"]["complete"], false);

    let resumed = p(d, "resumed.json");
    let mut args = vec!["--out", s(&resumed), "--resume", s(&streams[1])];
    args.extend(scan);
    assert_eq!(cli(&args), EXIT_OK);
    assert_eq!(body(&resumed), body(&full));

    // resuming under a different manifest
    assert_eq!(cli(&["--resume", s(&streams[1]), "scan", "group", "--group", "z6", "--max-size", "2"]), EXIT_USAGE);
}

#[test]
fn strong_check_flags_the_converse_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = p(dir.path(), "strong.json");
    let base = ["linear", "strong-check", "--tower", "gf(2^4):x^4+x+1"];
    let mut args = vec!["--out", s(&out)];
    args.extend(base);
    args.extend(["--a", "1,x", "--b", "x^2,x^3"]);
    assert_eq!(cli(&args), EXIT_OK);
    assert_eq!(read(&out)["body"]["report"]["agreement"], "agrees");

    let mut args = vec!["--out", s(&out)];
    args.extend(base);
    args.extend(["--a", "x^2,x^3", "--b", "x^3+x,x^3+x^2"]);
    assert_eq!(cli(&args), EXIT_DISCREPANCY);
    let r = read(&out);
    assert_eq!(r["body"]["report"]["agreement"], "disagrees");
    assert_eq!(r["body"]["report"]["strong_matching_exists"], false);
    assert_eq!(cli(&["verify", "--certificate", s(&out)]), EXIT_DISCREPANCY);
}

#[test]
fn matched_check_reports_bases() {
    let dir = tempfile::tempdir().unwrap();
    let out = p(dir.path(), "matched.json");
    let base = ["linear", "matched-check", "--tower", "gf(2^2)"];
    let mut args = vec!["--out", s(&out)];
    args.extend(base);
    args.extend(["--a", "x", "--b", "1", "--basis-a", "x"]);
    assert_eq!(cli(&args), EXIT_OK);
    let r = read(&out);
    assert_eq!(r["body"]["report"]["one_in_b"], true);
    assert_eq!(cli(&["verify", "--certificate", s(&out)]), EXIT_OK);
}

#[test]
fn binary_writes_the_envelope_to_stdout() {
    let out = Command::new(env!("CARGO_BIN_EXE_matchscope"))
        .args(["-q", "scan", "group", "--group", "z6", "--max-size", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["header"]["tool"], "matchscope");
    assert_eq!(v["body"]["report"]["matching_property"]["status"], "fails");
    assert!(v["body"].get("execution").is_none());

    let out = Command::new(env!("CARGO_BIN_EXE_matchscope")).args(["scan", "nothing"]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
}
