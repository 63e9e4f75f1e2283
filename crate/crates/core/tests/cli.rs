use std::process::{Command, Output};

fn abc_tree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abc-tree"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8")
}

#[test]
fn optcuts_reports_cut_count_and_size() {
    let out = abc_tree(&["optcuts", "--l", "3", "--r", "3", "--c", "1", "--Z", "6"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().next(), Some("k*=3 size>=6"));
}

#[test]
fn mintree_compares_with_root_cuts() {
    let out = abc_tree(&[
        "mintree",
        "--l",
        "3",
        "--r",
        "7",
        "--c",
        "2",
        "--w",
        "affine:1/2,1",
        "--Z",
        "7",
        "--compare-root-only",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().next(), Some("tau=13/2 root-only=7"));
}

#[test]
fn mintree_exports_dot() {
    let out = abc_tree(&[
        "mintree", "--r", "3", "--c", "1", "--Z", "6", "--format", "dot",
    ]);
    assert!(out.status.success());
    let dot = stdout(&out);
    assert!(dot.starts_with("digraph bctree {"));
    assert_eq!(dot.matches("->").count(), 5);
    assert!(dot.contains("label=\"g=6 z=3\""));
}

#[test]
fn svbwc_lists_candidates() {
    let out = abc_tree(&["svbwc", "--r", "1", "--c", "1", "--Z", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows: Vec<Vec<u64>> = text
        .lines()
        .skip(1)
        .take(3)
        .map(|l| l.split_whitespace().map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows, [[1, 4, 7], [2, 1, 8], [3, 0, 15]]);
    assert!(text.contains("chosen delta=1"));

    let csv = abc_tree(&[
        "svbwc", "--r", "1", "--c", "1", "--Z", "3", "--format", "csv",
    ]);
    assert_eq!(stdout(&csv), "delta,cuts,size\n1,4,7\n2,1,8\n3,0,15\n");
}

#[test]
fn sweep_csv_is_deterministic() {
    let args = [
        "sweep",
        "--l",
        "1,2",
        "--r",
        "2,3",
        "--c",
        "1/2,1",
        "--Z",
        "3",
        "--w",
        "one;affine:1,1",
        "--decay",
        "constant,harmonic",
    ];
    let a = abc_tree(&args);
    let b = abc_tree(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("ell,r,c,decay,Z,w,k_star,case,dp_tau,dp_size,dp_cuts,root_only_tau,ratio")
    );
    let rows: Vec<_> = lines.collect();
    // ell <= r: (1,2), (2,2), (1,3), (2,3); 2 c, 2 decays, 2 w, 6 bounds
    assert_eq!(rows.len(), 4 * 2 * 2 * 2 * 6);
    let closed = rows
        .iter()
        .find(|r| r.starts_with("2,2,1,constant,3,one,"))
        .expect("row present");
    assert_eq!(closed.split(',').nth(6), Some("1"));
}

#[test]
fn example_reports_triangles() {
    let out = abc_tree(&["example", "--m", "5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("k*=5 optimal size=6 pure branching size=63"));
}

#[test]
fn json_output_parses() {
    let out = abc_tree(&[
        "optcuts", "--r", "3", "--c", "1", "--Z", "6", "--format", "json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["k_star"], 3);
    assert_eq!(v["case_taken"], "DeltaStar");
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("abc-tree-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("tree.dot");
    let out = abc_tree(&[
        "optcuts",
        "--r",
        "3",
        "--c",
        "1",
        "--Z",
        "6",
        "--format",
        "dot",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(&path)
        .unwrap()
        .starts_with("digraph"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn parse_errors_print_usage() {
    let out = abc_tree(&["optcuts", "--r", "3", "--c", "1/0", "--Z", "6"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));

    let out = abc_tree(&[
        "mintree",
        "--r",
        "3",
        "--c",
        "1",
        "--Z",
        "6",
        "--w",
        "affine:1,2",
    ]);
    assert!(!out.status.success());
}

#[test]
fn model_errors_exit_nonzero() {
    let out = abc_tree(&["mintree", "--l", "0", "--r", "3", "--c", "0", "--Z", "6"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let out = abc_tree(&["optcuts", "--l", "1", "--r", "3", "--c", "1", "--Z", "6"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_status_tracks_failures() {
    let out = abc_tree(&["verify"]);
    let text = stdout(&out);
    let any_failed = text.lines().any(|l| l.starts_with("FAIL"));
    assert_eq!(out.status.success(), !any_failed);
    assert!(text.contains("suites"));
}
