use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_birkhoff"))
}

fn spec(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../specs")
        .join(format!("{name}.json"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn solve_writes_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("solve.csv");
    let s = spec("smooth_n3");
    let out = run(&[
        "solve",
        "--spec",
        s.to_str().unwrap(),
        "--modulus",
        "20",
        "--grid",
        "16",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,k,nu,z_re,z_im,y_re,y_im"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    // 3 branches x 3 derivative orders per node
    assert_eq!(rows.len() % 9, 0);
    assert!(rows.iter().all(|r| r.len() == 7));
    for r in &rows {
        let z = r[3].parse::<f64>().unwrap();
        assert!((z - 1.0).abs() < 0.05, "z_re = {z}");
    }
}

#[test]
fn output_is_byte_identical_across_runs_and_modes() {
    let s = spec("constant_potential_n2");
    let args = [
        "solve",
        "--spec",
        s.to_str().unwrap(),
        "--rho",
        "10,10",
        "--grid",
        "32",
        "--anchored",
    ];
    let a = run(&args);
    let b = run(&args);
    let mut seq = args.to_vec();
    seq.insert(0, "--sequential");
    let c = run(&seq);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn sweep_reports_partial_slopes() {
    let s = spec("diag_system_2x2");
    let out = run(&[
        "sweep",
        "--spec",
        s.to_str().unwrap(),
        "--claim",
        "remainder",
        "--count",
        "5",
        "--grid",
        "128",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "rho_mod,claim,error,slope_partial");
    assert_eq!(lines.len(), 6);
    assert!(lines[1].ends_with(','));
    let last: f64 = lines[5].rsplit(',').next().unwrap().parse().unwrap();
    assert!((last + 2.0).abs() < 0.1, "partial slope {last}");
}

#[test]
fn roots_and_coeffs_tables() {
    let s = spec("sturm_liouville_param");
    let out = run(&["roots", "--spec", s.to_str().unwrap()]);
    let text = stdout(&out);
    assert!(text.starts_with("table,row,col,re,im\n"));
    assert_eq!(text.lines().filter(|l| l.starts_with("omega,")).count(), 4);

    let s = spec("constant_potential_n2");
    let out = run(&["coeffs", "--spec", s.to_str().unwrap(), "--points", "4"]);
    let text = stdout(&out);
    assert!(text.starts_with("x,s_or_mu,k,nu,re,im\n"));
    // beta_1 = -x/2 for p_0 = 1
    let row = text
        .lines()
        .find(|l| l.starts_with("5.0000000000000000e-1,1,0,0,"))
        .unwrap();
    let re: f64 = row.split(',').nth(4).unwrap().parse().unwrap();
    assert!((re + 0.25).abs() < 1e-14);
}

#[test]
fn reduce_output_loads_as_system() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("reduced.json");
    let s = spec("sturm_liouville_param");
    let out = run(&[
        "reduce",
        "--spec",
        s.to_str().unwrap(),
        "-o",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let loaded = birkhoff::io::load_spec(&path).unwrap();
    assert_eq!(loaded.kind(), "system");
    let out = run(&[
        "solve-system",
        "--spec",
        path.to_str().unwrap(),
        "--modulus",
        "12",
        "--grid",
        "16",
        "--k",
        "2",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out)
        .lines()
        .skip(1)
        .all(|l| l.split(',').nth(1) == Some("2")));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"kind":"nth_order","n":2,"T":1,"N":0,"p":[],"extra":1}"#,
    )
    .unwrap();
    assert_eq!(
        run(&["solve", "--spec", bad.to_str().unwrap(), "--modulus", "5"])
            .status
            .code(),
        Some(2)
    );
    let missing = dir.path().join("missing.json");
    assert_eq!(
        run(&["roots", "--spec", missing.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );

    let s = spec("smooth_n3");
    assert_eq!(
        run(&["solve", "--spec", s.to_str().unwrap(), "--modulus", "0.5"])
            .status
            .code(),
        Some(3)
    );

    let out = run(&["verify", "--criteria", "7"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("[PASS]  7"));
}
