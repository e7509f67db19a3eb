//! End-to-end tests of the `tad` binary: generate → build → query → bench →
//! verify, including the refusal and fault-injection paths.

use std::path::Path;
use std::process::{Command, Output};

fn tad(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tad"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawning tad")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "expected success, got {:?}\nstdout: {}\nstderr: {}",
        out.status,
        stdout(out),
        stderr(out)
    );
}

fn first_line(out: &Output) -> String {
    stdout(out).lines().next().unwrap_or_default().to_string()
}

#[test]
fn motivating_fixture_queries() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    assert_ok(&tad(dir, &["gen", "--fixture", "motivating", "--network", "m.bin"]));

    let query = |extra: &[&str]| {
        let mut args = vec!["query", "--network", "m.bin", "--from", "A", "--to", "C", "--at", "07:50:00"];
        args.extend_from_slice(extra);
        tad(dir, &args)
    };

    for engine in ["tad", "csa", "mr"] {
        let out = query(&["--engine", engine]);
        assert_ok(&out);
        assert_eq!(first_line(&out), "10:30:00", "{engine} answer");
    }

    // The filtered engine refuses buffered networks unless overridden, and
    // then demonstrates why: it loses the journey.
    let refused = query(&["--engine", "td"]);
    assert!(!refused.status.success());
    assert!(stderr(&refused).contains("--allow-unsound"), "stderr: {}", stderr(&refused));
    assert!(stderr(&refused).contains("staying seated"), "stderr: {}", stderr(&refused));
    let unsound = query(&["--engine", "td", "--allow-unsound"]);
    assert_ok(&unsound);
    assert_eq!(first_line(&unsound), "UNREACHABLE");

    // Source equals target: the departure is echoed back.
    let echo = tad(dir, &["query", "--network", "m.bin", "--from", "B", "--to", "B", "--at", "09:15:00"]);
    assert_ok(&echo);
    assert_eq!(first_line(&echo), "09:15:00");

    // mr is pinned to the core hierarchy.
    let bad_mode = query(&["--engine", "mr", "--mode", "plain"]);
    assert!(!bad_mode.status.success());
    assert!(stderr(&bad_mode).contains("core"), "stderr: {}", stderr(&bad_mode));
}

#[test]
fn gtfs_build_pipeline_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    assert_ok(&tad(
        dir,
        &[
            "gen", "--seed", "42", "--stops", "25", "--trips", "40", "--closure",
            "--gtfs-dir", "feed", "--graph", "walk.txt", "--network", "direct.bin",
        ],
    ));
    let built = tad(
        dir,
        &[
            "build", "--gtfs-dir", "feed", "--graph", "walk.txt", "--out", "built.bin",
            "--closed", "--core-ch", "core.bin", "--buckets", "buckets.bin",
        ],
    );
    assert_ok(&built);
    let log = stdout(&built);
    assert!(log.contains("CH construction") || log.contains("Core-CH construction"), "log: {log}");
    assert_eq!(
        std::fs::read(dir.join("direct.bin")).unwrap(),
        std::fs::read(dir.join("built.bin")).unwrap(),
        "text artifacts must rebuild the identical network"
    );

    // Queries can reuse the stored artifacts.
    let out = tad(
        dir,
        &[
            "query", "--network", "built.bin", "--from", "0", "--to", "3", "--at", "08:00:00",
            "--mode", "bucket-ch", "--buckets", "buckets.bin",
        ],
    );
    assert_ok(&out);

    // A corrupt timetable row fails the build and names its location.
    let mut times = std::fs::read_to_string(dir.join("feed/stop_times.txt")).unwrap();
    times.push_str("T0,not-a-clock,08:00:00,S0,99\n");
    std::fs::write(dir.join("feed/stop_times.txt"), times).unwrap();
    let corrupt = tad(dir, &["build", "--gtfs-dir", "feed", "--graph", "walk.txt", "--out", "x.bin"]);
    assert!(!corrupt.status.success());
    let msg = stderr(&corrupt);
    assert!(msg.contains("stop_times.txt") && msg.contains("line"), "stderr: {msg}");
}

#[test]
fn bench_reports_are_deterministic_and_strict_gates() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    assert_ok(&tad(
        dir,
        &["gen", "--seed", "3", "--stops", "20", "--trips", "30", "--closure", "--network", "n.bin"],
    ));

    let bench = |out: &str, extra: &[&str]| {
        let mut args = vec![
            "bench", "--network", "n.bin", "--queries", "80", "--seed", "11", "--out", out,
        ];
        args.extend_from_slice(extra);
        tad(dir, &args)
    };

    let engines = &["--engines", "tad,mr,csa", "--modes", "plain,core-ch"];
    assert_ok(&bench("a.csv", engines));
    assert_ok(&bench("b.csv", engines));
    let stable = |path: &str| -> Vec<String> {
        std::fs::read_to_string(dir.join(path))
            .unwrap()
            .lines()
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                format!("{},{},{}", f[0], f[1], f[5])
            })
            .collect()
    };
    assert_eq!(stable("a.csv"), stable("b.csv"), "same seed must give identical mismatch columns");

    let header_and_rows = std::fs::read_to_string(dir.join("a.csv")).unwrap();
    let mut lines = header_and_rows.lines();
    assert_eq!(lines.next(), Some("engine,mode,mean_us,median_us,p95_us,mismatches"));
    // tad plain+core-ch, mr core-ch, csa plain; every exact engine matches.
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4, "rows: {rows:?}");
    assert!(rows.iter().all(|r| r.ends_with(",0")), "rows: {rows:?}");

    // Strict mode turns td's unsoundness into a nonzero exit. The fixture
    // guarantees mismatching queries; a random network might dodge them.
    assert_ok(&tad(dir, &["gen", "--fixture", "motivating", "--network", "m.bin"]));
    let strict = tad(
        dir,
        &[
            "bench", "--network", "m.bin", "--queries", "80", "--seed", "11", "--out", "c.csv",
            "--engines", "td", "--allow-unsound", "--strict",
        ],
    );
    assert!(!strict.status.success(), "stderr: {}", stderr(&strict));
    assert!(stderr(&strict).contains("mismatch"), "stderr: {}", stderr(&strict));
}

#[test]
fn verify_passes_and_catches_an_injected_fault() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();

    let ok = tad(dir, &["verify", "--networks", "12", "--queries", "6"]);
    assert_ok(&ok);
    assert!(stdout(&ok).contains("PASS"), "stdout: {}", stdout(&ok));

    let faulty = tad(dir, &["verify", "--networks", "12", "--queries", "6", "--inject-fault"]);
    assert!(!faulty.status.success());
    assert!(stderr(&faulty).contains("trace"), "stderr: {}", stderr(&faulty));

    let empty = tad(dir, &["verify", "--networks", "0"]);
    assert_ok(&empty);
    assert!(stderr(&empty).contains("vacuous"), "stderr: {}", stderr(&empty));
}
