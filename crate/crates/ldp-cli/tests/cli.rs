//! End-to-end tests of the `ldp` binary: exit codes, output contracts, and
//! determinism, all through real subprocesses.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn ldp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ldp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

/// Value of a `key value...` line in the output.
fn field(stdout: &str, key: &str) -> String {
    stdout
        .lines()
        .find_map(|l| {
            l.strip_prefix(key)
                .and_then(|rest| rest.strip_prefix(' '))
                .map(str::to_string)
        })
        .unwrap_or_else(|| panic!("no `{key}` line in:\n{stdout}"))
}

#[test]
fn solve_reports_the_case1_minimizer_with_exit_zero() {
    let out = ldp(&["solve", &fixture("case1.ldp")]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_of(&out));
    let stdout = stdout_of(&out);
    assert_eq!(field(&stdout, "status"), "Solved");
    let xs: Vec<f64> = field(&stdout, "x")
        .split_whitespace()
        .map(|t| t.parse().unwrap())
        .collect();
    let r_star = 10123.19482867013 / 74.79768991470337;
    assert!((xs[0] - r_star).abs() / r_star <= 1e-6);
    assert_eq!(xs[1], 0.0);
    // Positive violations would mean an unverified answer got through.
    let max_violation: f64 = field(&stdout, "max_violation").parse().unwrap();
    assert!(max_violation <= 1e-8 * 1.1e4);
}

#[test]
fn solve_reports_infeasible_for_cases_two_and_three() {
    for name in ["case2.ldp", "case3.ldp"] {
        let out = ldp(&["solve", &fixture(name)]);
        assert_eq!(code(&out), 0, "{name} stderr: {}", stderr_of(&out));
        let stdout = stdout_of(&out);
        assert_eq!(field(&stdout, "status"), "Infeasible", "{name}");
    }
}

#[test]
fn solve_rejects_missing_and_malformed_files_with_exit_two() {
    let out = ldp(&["solve", "/nonexistent/nope.ldp"]);
    assert_eq!(code(&out), 2);
    assert!(!stderr_of(&out).is_empty());

    let dir = tempfile::TempDir::new().unwrap();
    let bad = dir.path().join("bad.ldp");
    std::fs::write(&bad, "ldpcase 2\nm 1\nn 1\nG\n1\nh\n1\n").unwrap();
    let out = ldp(&["solve", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(
        stderr_of(&out).contains("line 1"),
        "stderr: {}",
        stderr_of(&out)
    );
}

#[test]
fn verify_rejects_each_recorded_bad_vector_with_exit_one() {
    let cases = [
        ("case1.ldp", "-0.375,0", 2usize),
        ("case2.ldp", "0.607421875,0", 4),
        ("case3.ldp", "0.45703125,0", 1),
    ];
    for (name, x, worst_row) in cases {
        let out = ldp(&["verify", &fixture(name), "--x", x]);
        assert_eq!(code(&out), 1, "{name}");
        let stdout = stdout_of(&out);
        assert!(stdout.lines().last() == Some("FAIL"), "{name}: {stdout}");
        let violation: f64 = field(&stdout, "max_violation").parse().unwrap();
        assert!(violation > 1e3, "{name}: violation {violation}");
        let row: usize = field(&stdout, "worst_row").parse().unwrap();
        assert_eq!(row, worst_row, "{name}");
    }
}

#[test]
fn verify_accepts_a_near_solution_and_reads_candidates_from_files() {
    // The known minimizer passes...
    let out = ldp(&["verify", &fixture("case1.ldp"), "--x", "135.3410090681,0"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_of(&out));
    assert!(stdout_of(&out).lines().last() == Some("PASS"));

    // ...and the same candidate via --x-file behaves identically.
    let dir = tempfile::TempDir::new().unwrap();
    let xfile = dir.path().join("x.txt");
    std::fs::write(&xfile, "135.3410090681 0\n").unwrap();
    let out = ldp(&[
        "verify",
        &fixture("case1.ldp"),
        "--x-file",
        xfile.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout_of(&out).lines().last() == Some("PASS"));
}

#[test]
fn verify_usage_errors_exit_two() {
    // Dimension mismatch.
    let out = ldp(&["verify", &fixture("case1.ldp"), "--x", "1,2,3"]);
    assert_eq!(code(&out), 2);
    assert!(stderr_of(&out).contains("components"));

    // --x and --x-file conflict.
    let out = ldp(&[
        "verify",
        &fixture("case1.ldp"),
        "--x",
        "1,2",
        "--x-file",
        "whatever",
    ]);
    assert_eq!(code(&out), 2);

    // No candidate anywhere: the fixtures carry no witness.
    let out = ldp(&["verify", &fixture("case1.ldp")]);
    assert_eq!(code(&out), 2);
    assert!(stderr_of(&out).contains("no candidate"));
}

#[test]
fn gen_writes_identical_bytes_for_identical_flags() {
    let dir_a = tempfile::TempDir::new().unwrap();
    let dir_b = tempfile::TempDir::new().unwrap();
    let flags = |dir: &Path| {
        vec![
            "gen".to_string(),
            "--m".into(),
            "5".into(),
            "--n".into(),
            "3".into(),
            "--kind".into(),
            "transformed".into(),
            "--l".into(),
            "6".into(),
            "--zero-cols".into(),
            "1".into(),
            "--seed".into(),
            "77".into(),
            "--count".into(),
            "3".into(),
            "--out-dir".into(),
            dir.to_string_lossy().into_owned(),
        ]
    };
    let run = |dir: &Path| {
        let args = flags(dir);
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = ldp(&args);
        assert_eq!(code(&out), 0, "stderr: {}", stderr_of(&out));
    };
    run(dir_a.path());
    run(dir_b.path());

    let mut names: Vec<String> = std::fs::read_dir(dir_a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(names.len(), 3);
    assert!(names[0].starts_with("case-000000000000004d-"));
    for name in &names {
        let a = std::fs::read(dir_a.path().join(name)).unwrap();
        let b = std::fs::read(dir_b.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }

    // Transformed output: l rows, n columns, witness present and verified.
    let text = std::fs::read_to_string(dir_a.path().join(&names[0])).unwrap();
    assert!(text.contains("m 6"));
    assert!(text.contains("n 3"));
    assert!(text.contains("witness"));
    let case_path = dir_a.path().join(&names[0]);
    let out = ldp(&["verify", case_path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "witness must pass: {}", stdout_of(&out));
}

#[test]
fn gen_infeasible_cases_carry_no_witness() {
    let dir = tempfile::TempDir::new().unwrap();
    let out = ldp(&[
        "gen",
        "--m",
        "6",
        "--n",
        "2",
        "--kind",
        "infeasible",
        "--seed",
        "3",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_of(&out));
    let name = "case-0000000000000003-000000.ldp";
    let text = std::fs::read_to_string(dir.path().join(name)).unwrap();
    assert!(!text.contains("witness"));
    // Verifying it without a candidate is a usage error, not a crash.
    let path = dir.path().join(name);
    let out = ldp(&["verify", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn gen_rejects_impossible_shapes_with_exit_two() {
    let dir = tempfile::TempDir::new().unwrap();
    let out = ldp(&[
        "gen",
        "--m",
        "4",
        "--n",
        "2",
        "--zero-cols",
        "2",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(!stderr_of(&out).is_empty());
}

#[test]
fn fuzz_report_is_identical_across_thread_counts() {
    let dir_a = tempfile::TempDir::new().unwrap();
    let dir_b = tempfile::TempDir::new().unwrap();
    let run = |dir: &Path, threads: &str| -> (i32, String) {
        let out = ldp(&[
            "fuzz",
            "--cases",
            "400",
            "--seed",
            "23",
            "--threads",
            threads,
            "--dump-dir",
            dir.to_str().unwrap(),
        ]);
        (code(&out), stdout_of(&out))
    };
    let (code_a, stdout_a) = run(dir_a.path(), "1");
    let (code_b, stdout_b) = run(dir_b.path(), "4");
    assert_eq!(code_a, code_b);

    let machine = |s: &str| -> String {
        s.lines()
            .skip_while(|l| !l.starts_with("campaign 1"))
            .filter(|l| !l.starts_with("wall_ms"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(machine(&stdout_a), machine(&stdout_b));

    let report = |dir: &Path| -> String {
        let text = std::fs::read_to_string(dir.join("report.txt")).unwrap();
        text.lines()
            .filter(|l| !l.starts_with("wall_ms"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(report(dir_a.path()), report(dir_b.path()));
}

#[test]
fn fuzz_dumps_are_replayable_and_reproduce_the_recorded_status() {
    let dir = tempfile::TempDir::new().unwrap();
    // A cap of one iteration cannot finish anything with more than one
    // active column, so the campaign must dump anomalies and exit 1.
    let out = ldp(&[
        "fuzz",
        "--cases",
        "80",
        "--seed",
        "31",
        "--max-iterations",
        "1",
        "--dump-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1, "stdout: {}", stdout_of(&out));

    let display_of = |kebab: &str| match kebab {
        "solved" => "Solved",
        "infeasible" => "Infeasible",
        "verification-failed" => "VerificationFailed",
        "iteration-limit" => "IterationLimit",
        other => panic!("unknown status {other}"),
    };

    let mut replayed = 0;
    for entry in std::fs::read_dir(dir.path()).unwrap() {
        let path = entry.unwrap().path();
        if path.file_name().unwrap() == "report.txt" {
            continue;
        }
        let text = std::fs::read_to_string(&path).unwrap();
        let recorded = text
            .lines()
            .find_map(|l| l.strip_prefix("# status "))
            .unwrap_or_else(|| panic!("{path:?} has no status metadata"))
            .to_string();
        let out = ldp(&["solve", path.to_str().unwrap(), "--max-iterations", "1"]);
        let stdout = stdout_of(&out);
        assert_eq!(
            field(&stdout, "status"),
            display_of(&recorded),
            "replay of {path:?} diverged"
        );
        replayed += 1;
    }
    assert!(replayed > 0, "expected at least one dumped anomaly");
}

#[test]
fn fuzz_clean_campaign_exits_zero() {
    let dir = tempfile::TempDir::new().unwrap();
    let out = ldp(&[
        "fuzz",
        "--cases",
        "200",
        "--seed",
        "7",
        "--mix",
        "100,0,0,0",
        "--dump-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stdout: {}", stdout_of(&out));
    let stdout = stdout_of(&out);
    assert!(stdout.contains("no anomalies"), "{stdout}");
    assert!(stdout.contains("silent_violations 0"), "{stdout}");
    // Only the report lands in the dump dir.
    let entries: Vec<PathBuf> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    assert_eq!(entries.len(), 1);
    assert_eq!(entries[0].file_name().unwrap(), "report.txt");
}

#[test]
fn regress_prints_nine_passes_and_exits_zero() {
    let out = ldp(&["regress"]);
    assert_eq!(code(&out), 0);
    let stdout = stdout_of(&out);
    assert_eq!(stdout.matches("PASS ").count(), 9, "{stdout}");
    assert!(!stdout.contains("FAIL"), "{stdout}");
    assert!(stdout.contains("9 of 9 regression checks passed"));
}

#[test]
fn hex_case_files_solve_exactly() {
    let dir = tempfile::TempDir::new().unwrap();
    let path = dir.path().join("hex.ldp");
    // G = 2, h = 3 in hex: minimizer is exactly 1.5.
    std::fs::write(&path, "ldpcase 1\nm 1\nn 1\nG\n0x1p1\nh\n0x1.8p1\n").unwrap();
    let out = ldp(&["solve", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_of(&out));
    let stdout = stdout_of(&out);
    assert_eq!(field(&stdout, "status"), "Solved");
    let x: f64 = field(&stdout, "x").parse().unwrap();
    assert!((x - 1.5).abs() <= 1e-12, "x = {x}");

    // Inexact hex is refused at parse time with the offending line.
    std::fs::write(
        &path,
        "ldpcase 1\nm 1\nn 1\nG\n0x1.00000000000000001p0\nh\n1\n",
    )
    .unwrap();
    let out = ldp(&["solve", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr_of(&out).contains("line 5"), "{}", stderr_of(&out));
}

#[test]
fn usage_errors_exit_two_and_help_exits_zero() {
    let out = ldp(&["solve"]);
    assert_eq!(code(&out), 2);

    let out = ldp(&["frobnicate"]);
    assert_eq!(code(&out), 2);

    let out = ldp(&["--help"]);
    assert_eq!(code(&out), 0);
    assert!(stdout_of(&out).contains("solve"));

    let out = ldp(&["gen", "--m", "4", "--n", "2", "--kind", "nonsense"]);
    assert_eq!(code(&out), 2);
    assert!(stderr_of(&out).contains("unknown kind"));
}
