use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn growing_stream() -> String {
    let mut s = String::from("# random growth\n");
    s.push_str(&"node\n".repeat(40));
    let mut seen = std::collections::HashSet::new();
    for i in 0..39u32 {
        for (u, v, p) in [(i, i + 1, 0.3), ((i * 7 + 3) % 40, (i * 13 + 5) % 40, 0.1)] {
            if u != v && seen.insert((u, v)) {
                s.push_str(&format!("edge {u} {v} {p}\n"));
            }
        }
        if i % 10 == 9 {
            s.push_str("query\n");
        }
    }
    s
}

#[test]
fn single_edge_example() {
    let dir = tempfile::tempdir().unwrap();
    let stream = write(dir.path(), "s.txt", "node\nnode\nedge 0 1 1.0\nquery\n");
    let out = dim(&["--k", "1", "--stream", &stream, "--mc-trials", "1000"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("{\"type\":\"query\",\"step\":3,\"seeds\":[0]"), "{}", lines[0]);
    assert!(lines[0].contains("\"mc_spread\":2.0"));
    assert!(lines[1].contains("\"updates\":3"));
}

#[test]
fn empty_stream_reports_zero_updates() {
    let dir = tempfile::tempdir().unwrap();
    let stream = write(dir.path(), "s.txt", "# nothing\n\n");
    let report = dir.path().join("r.jsonl");
    let out = dim(&["--stream", &stream, "--report", report.to_str().unwrap()]);
    assert!(out.status.success());
    let text = fs::read_to_string(report).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.contains("\"updates\":0"));
}

#[test]
fn identical_seed_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let stream = write(dir.path(), "s.txt", &growing_stream());
    for model in ["ic", "lt"] {
        let run = |seed: &str| {
            let out = dim(&["--model", model, "--seed", seed, "--k", "3", "--stream", &stream]);
            assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
            out.stdout
        };
        assert_eq!(run("7"), run("7"));
        assert!(!run("7").is_empty());
    }
}

#[test]
fn stdin_is_default_stream() {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = Command::new(env!("CARGO_BIN_EXE_dim"))
        .args(["--k", "1"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"node\nquery\n").unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("\"seeds\":[0]"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.txt", "node\nedge 0\n");
    let out = dim(&["--stream", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let del = write(dir.path(), "del.txt", "node\nnode\nedge 0 1 0.5\ndel 0 1\nquery\n");
    assert_eq!(dim(&["--stream", &del]).status.code(), Some(1));
    assert_eq!(dim(&["--stream", &del, "--mode", "baseline"]).status.code(), Some(0));

    let unknown = write(dir.path(), "u.txt", "node\nedge 0 5 0.5\n");
    assert_eq!(dim(&["--stream", &unknown]).status.code(), Some(1));

    let ok = write(dir.path(), "ok.txt", "node\n");
    assert_eq!(dim(&["--stream", &ok, "--epsilon", "0.5"]).status.code(), Some(2));
    assert_eq!(dim(&["--stream", &ok, "--mode", "other"]).status.code(), Some(2));
    assert_eq!(dim(&["--stream", "/nonexistent/file"]).status.code(), Some(1));
}
