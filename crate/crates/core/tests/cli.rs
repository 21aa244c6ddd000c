use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn manifest() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

fn fixture(name: &str) -> String {
    manifest().join("tests/fixtures").join(name).display().to_string()
}

fn tlat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tlat"))
        .args(args)
        .env_remove("TLAT_MAX_SIZE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Compares against `tests/golden/<name>`; set `TLAT_UPDATE_GOLDEN=1` to rewrite.
fn golden(name: &str, actual: &str) {
    let path: PathBuf = manifest().join("tests/golden").join(name);
    if std::env::var_os("TLAT_UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap();
    assert_eq!(actual, expected, "golden mismatch for {name}");
}

#[test]
fn hasse_diagram_golden() {
    let o = tlat(&["--format", "dot", "dot", "-f", &fixture("n5.poset")]);
    assert_eq!(o.status.code(), Some(0));
    golden("n5_hasse.dot", &stdout(&o));
}

#[test]
fn consistency_graph_golden() {
    let f = fixture("square.poset");
    let o = tlat(&["--format", "dot", "dot", "-f", &f, "--consistency", "--saturate"]);
    assert_eq!(o.status.code(), Some(0));
    golden("square_consistency.dot", &stdout(&o));
}

#[test]
fn chain_lattice_json_golden() {
    let o = tlat(&["--format", "json", "chains", "gen", "-n", "1", "-m", "1"]);
    assert_eq!(o.status.code(), Some(0));
    golden("chains11.json", &stdout(&o));
}

#[test]
fn euler_json_golden() {
    let o = tlat(&["--format", "json", "euler", "demo", "--w", "1", "--bound", "5"]);
    assert_eq!(o.status.code(), Some(0));
    golden("euler_w1.json", &stdout(&o));
}

#[test]
fn non_distributive_lattice_reports_witness() {
    let o = tlat(&["lattice", "laws", "-f", &fixture("n5.poset")]);
    assert_eq!(o.status.code(), Some(1));
    golden("n5_laws.txt", &stdout(&o));

    let o = tlat(&["lattice", "laws", "-f", &fixture("m3.poset")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("modular: yes"));
}

#[test]
fn consistency_violation_json_golden() {
    let f = fixture("n5.poset");
    let o = tlat(&["--format", "json", "cons", "check", "-f", &f, "--all-pairs"]);
    assert_eq!(o.status.code(), Some(1));
    golden("n5_cons.json", &stdout(&o));
}

#[test]
fn passing_commands_exit_zero() {
    let chains = fixture("chains22.poset");
    let square = fixture("square.poset");
    let cases: Vec<Vec<&str>> = vec![
        vec!["poset", "check", "-f", &chains],
        vec!["cons", "check", "-f", &square],
        vec!["cons", "saturate", "-f", &square],
        vec!["universal", "build", "-f", &chains],
        vec!["term", "nf", "a*(b+c)"],
        vec!["term", "eq", "a*(b+c)", "a*b+a*c"],
        vec!["chains", "identity", "-n", "2", "-m", "2"],
        vec!["chains", "decomposables", "-n", "2", "-m", "2"],
        vec!["euler", "demo"],
    ];
    for args in cases {
        let o = tlat(&args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn chain_lattice_counts() {
    let o = tlat(&["chains", "gen", "-n", "2", "-m", "2", "--count"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "20");
}

#[test]
fn unequal_terms_exit_one_with_valuation() {
    let o = tlat(&["term", "eq", "a+b*c", "(a+b)*c"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("witness:"));
}

#[test]
fn universal_lattice_matches_grid() {
    let dir = std::env::temp_dir().join(format!("tlat-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let report = dir.join("report.json");
    let o = tlat(&[
        "universal",
        "build",
        "-f",
        &fixture("chains22.poset"),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["schema"], 1);
    assert!(stdout(&o).contains("20"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn input_errors_exit_two() {
    let o = tlat(&["poset", "check", "-f", &fixture("bad.poset")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("2:6"), "{}", stderr(&o));

    let o = tlat(&["poset", "check", "-f", "/nonexistent/input.poset"]);
    assert_eq!(o.status.code(), Some(2));

    let o = tlat(&["chains", "gen"]);
    assert_eq!(o.status.code(), Some(2));

    let o = tlat(&["--format", "dot", "euler", "demo"]);
    assert_eq!(o.status.code(), Some(2));

    let o = tlat(&["lattice", "laws", "-f", &fixture("vee.poset")]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn guards_exit_three() {
    let o = tlat(&["--depth", "2", "universal", "build", "-f", &fixture("antichain3.poset")]);
    assert_eq!(o.status.code(), Some(3));

    let o = tlat(&["--max-size", "10", "chains", "gen", "-n", "3", "-m", "3"]);
    assert_eq!(o.status.code(), Some(3));

    let o = Command::new(env!("CARGO_BIN_EXE_tlat"))
        .args(["chains", "gen", "-n", "3", "-m", "3"])
        .env("TLAT_MAX_SIZE", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn help_exits_zero() {
    let o = tlat(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("universal"));
}
