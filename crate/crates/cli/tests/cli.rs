use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tailforge"))
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

const IDS: [&str; 5] = ["prop-1.1", "prop-1.2", "prop-1.3", "prop-1.4", "thm-1.1"];

#[test]
fn experiments_are_byte_identical_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    for id in IDS {
        let a = tmp.path().join(format!("{id}-a"));
        let b = tmp.path().join(format!("{id}-b"));
        for dir in [&a, &b] {
            let st = bin().args(["experiment", id, "--seed", "7", "--out"]).arg(dir).status().unwrap();
            assert_eq!(st.code(), Some(0), "{id}");
        }
        let (fa, fb) = (files(&a), files(&b));
        assert!(fa.len() >= 2, "{id}");
        assert_eq!(fa, fb, "{id}");
    }
}

#[test]
fn rerun_from_summary_reproduces_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert_eq!(bin().args(["experiment", "thm-1.1", "--out"]).arg(&a).status().unwrap().code(), Some(0));
    let st = bin()
        .args(["experiment", "thm-1.1", "--config"])
        .arg(a.join("summary.json"))
        .arg("--out")
        .arg(&b)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    assert_eq!(files(&a), files(&b));
}

#[test]
fn prop13_writes_its_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("p13");
    let st = bin().args(["experiment", "prop-1.3", "--out"]).arg(&out).status().unwrap();
    assert_eq!(st.code(), Some(0));
    let names: Vec<String> = files(&out).into_iter().map(|f| f.0).collect();
    assert_eq!(names, ["lgamma_scan.csv", "summary.json", "t_ratio.csv"]);
    let s: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(s["pass"], true);
    assert_eq!(s["id"], "prop-1.3");
}

#[test]
fn failed_expectation_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.json");
    // a floor no t_ratio can reach
    std::fs::write(&cfg, r#"{"t_ratio_floor": 1.5}"#).unwrap();
    let o = bin()
        .args(["experiment", "prop-1.3", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path().join("o"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("reaches the floor"));
}

#[test]
fn usage_and_numerical_exit_codes() {
    assert_eq!(bin().args(["experiment", "prop-9.9"]).output().unwrap().status.code(), Some(2));
    let o = bin().args(["dist", "eval", "--dist", "nosuch", "--x", "1"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = bin().args(["dist", "eval", "--dist", "dyadic_pareto"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    // beyond the truncation point of the construction
    let o = bin().args(["dist", "eval", "--dist", "fkz_example", "--x", "1e300"]).output().unwrap();
    assert_eq!(o.status.code(), Some(3));
    let o = bin()
        .args(["simulate", "--dist", "exponential", "--n", "2", "--x", "40", "--K", "1", "--samples", "100"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn conv_and_functional_outputs() {
    let o = bin()
        .args(["conv", "--dist", "exponential", "--n", "2", "--x", "1,2"])
        .output()
        .unwrap();
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,lower,upper,method"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let v: f64 = row[1].parse().unwrap();
    assert!((v - (2f64.ln() - 1.0)).abs() < 1e-9);
    assert_eq!(row[3], "quad");

    let tmp = tempfile::tempdir().unwrap();
    let o = bin()
        .env("TAILFORGE_CACHE_DIR", tmp.path())
        .args(["conv", "--dist", "exponential", "--n", "3", "--x", "2", "--h", "0.001"])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(std::fs::read_dir(tmp.path()).unwrap().count(), 1);
    let again = bin()
        .env("TAILFORGE_CACHE_DIR", tmp.path())
        .args(["conv", "--dist", "exponential", "--n", "3", "--x", "2", "--h", "0.001"])
        .output()
        .unwrap();
    assert_eq!(o.stdout, again.stdout);

    let o = bin()
        .args(["functional", "--dist", "dyadic_pareto", "--kind", "d", "--grid", "pow2:1:4"])
        .output()
        .unwrap();
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("param,value\n"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn transform_spec_and_export_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = tmp.path().join("g.json");
    let st = bin()
        .args(["transform", "--dist", "pareto:alpha=3", "--gamma", "0.5", "--out"])
        .arg(&spec)
        .status()
        .unwrap();
    assert!(st.success());
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&spec).unwrap()).unwrap();
    assert_eq!(v["kind"], "gamma_transform");

    let series = tmp.path().join("s.json");
    let st = bin()
        .args(["functional", "--kind", "ol", "--grid", "geom:2:100:5", "--format", "json", "--dist"])
        .arg(&spec)
        .arg("--out")
        .arg(&series)
        .status()
        .unwrap();
    assert!(st.success());
    let a = bin().args(["export", "--input"]).arg(&series).output().unwrap();
    let b = bin().args(["export", "--input"]).arg(&series).output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stdout).starts_with("param,value\n"));
}
