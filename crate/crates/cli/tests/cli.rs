//! End-to-end runs of the `ldpkit` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ldp_core::convex::GridFunction;
use ldp_core::extreal::POS_INF;

fn ldpkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ldpkit")).args(args).output().unwrap()
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn write_grid(path: &Path, xs: impl Iterator<Item = f64>, f: impl Fn(f64) -> f64) {
    let mut s = String::from("x,value\n");
    for x in xs {
        s.push_str(&format!("{x},{}\n", f(x)));
    }
    fs::write(path, s).unwrap();
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

#[test]
fn conjugate_of_abs_is_indicator() {
    let dir = tempfile::tempdir().unwrap();
    let (inp, out) = (dir.path().join("abs.csv"), dir.path().join("star.csv"));
    write_grid(&inp, grid(-3.0, 3.0, 61), f64::abs);
    let o = ldpkit(&[
        "conjugate",
        inp.to_str().unwrap(),
        out.to_str().unwrap(),
        "--dual-grid",
        "-2:2:81",
        "--truncated",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let star = GridFunction::read_csv(&out).unwrap();
    for (x, v) in star.xs().iter().zip(star.values()) {
        if x.abs() <= 1.0 + 1e-12 {
            assert!(v.abs() < 1e-12, "x = {x}");
        } else {
            assert_eq!(*v, POS_INF, "x = {x}");
        }
    }
    assert!(fs::read_to_string(&out).unwrap().contains(",inf"));
}

#[test]
fn conjugate_of_half_square() {
    let dir = tempfile::tempdir().unwrap();
    let (inp, out) = (dir.path().join("sq.csv"), dir.path().join("star.csv"));
    write_grid(&inp, grid(-5.0, 5.0, 1001), |x| x * x / 2.0);
    let o = ldpkit(&[
        "conjugate",
        inp.to_str().unwrap(),
        out.to_str().unwrap(),
        "--dual-grid",
        "-3:3:31",
    ]);
    assert!(o.status.success());
    let star = GridFunction::read_csv(&out).unwrap();
    for (x, v) in star.xs().iter().zip(star.values()) {
        assert!((v - x * x / 2.0).abs() < 1e-4, "x = {x}");
    }
}

#[test]
fn malformed_csv_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let inp = dir.path().join("bad.csv");
    fs::write(&inp, "x,value\n0,1\n1,oops\n").unwrap();
    let o = ldpkit(&["conjugate", inp.to_str().unwrap(), "/dev/null", "--dual-grid", "-1:1:3"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.csv:3:"), "{err}");
}

#[test]
fn bad_dual_grid_is_rejected() {
    let o = ldpkit(&["conjugate", "a.csv", "b.csv", "--dual-grid", "1:0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn empty_check_list_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tables.toml");
    fs::write(&path, "name = \"tables\"\n[net]\nkind = \"coin\"\n[free_energy]\ng = [-1.0, 1.0]\nresolution = 9\n[rate]\ngrid = [-1.0, 1.0, 5]\n").unwrap();
    let out = dir.path().join("out");
    let o = ldpkit(&["--out-dir", out.to_str().unwrap(), "run", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["checks"].as_array().unwrap().len(), 0);
    for key in ["schema_version", "scenario", "tables", "checks", "verdict"] {
        assert!(report.get(key).is_some(), "{key}");
    }
    for csv in ["L", "L_star", "l0", "l1", "J"] {
        GridFunction::read_csv(&out.join(format!("{csv}.csv"))).unwrap();
    }
}

#[test]
fn failing_check_exits_nonzero() {
    let o = ldpkit(&["run", scenario("dem-zei.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let o = ldpkit(&["run", scenario("demzei.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn parse_errors_carry_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(
        &path,
        "name = \"x\"\n[net]\nkind = \"coin\"\n[window]\nt_max = \"soon\"\n",
    )
    .unwrap();
    let o = ldpkit(&["run", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 5"));
}

#[test]
fn unknown_example_lists_names() {
    let o = ldpkit(&["reproduce", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("ge-ex") && err.contains("dem-zei"), "{err}");
}

#[test]
fn tolerance_and_window_overrides_are_echoed() {
    let o = ldpkit(&[
        "--tol",
        "0.01",
        "--window",
        "1e-2:1e-5",
        "free-energy",
        scenario("coin-ellis.toml").to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["scenario"]["tolerance"]["check"], 0.01);
    assert_eq!(report["scenario"]["window"]["t_min"], 1e-5);
}

#[test]
fn emitted_csvs_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let o = ldpkit(&[
        "--out-dir",
        dir.path().to_str().unwrap(),
        "run",
        scenario("coin-ellis.toml").to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    let l = GridFunction::read_csv(&dir.path().join("L.csv")).unwrap();
    let table = &report["tables"]["L"];
    let (xs, vals) = (table["x"].as_array().unwrap(), table["value"].as_array().unwrap());
    assert_eq!(xs.len(), l.len());
    for ((jx, jv), (x, v)) in xs.iter().zip(vals).zip(l.xs().iter().zip(l.values())) {
        let rx = ldp_cli::report::decode(jx).unwrap();
        let rv = ldp_cli::report::decode(jv).unwrap();
        assert!((rx - x).abs() <= 1e-12 && (rv == *v || (rv - v).abs() <= 1e-12));
    }
}
