use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn delone(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_delone"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn generate_then_verify_return_gap() {
    let d = tempfile::tempdir().unwrap();
    let o = delone(d.path(), &["generate", "--model", "fibonacci", "--window", "1000", "--out", "f.json"]);
    assert_eq!(code(&o), 0, "{o:?}");
    let f = json(&d.path().join("f.json"));
    assert_eq!(f["dim"], 1);
    assert_eq!(f["window_radius"], 1000.0);
    let o = delone(d.path(), &["verify", "--input", "f.json", "--check", "return-gap", "--radius", "10"]);
    assert_eq!(code(&o), 0, "{o:?}");
    let r = json(&d.path().join("verify.json"));
    assert_eq!(r["reports"][0]["status"], "passed");
    assert_eq!(r["reports"][0]["check_id"], "return-gap");
}

#[test]
fn periodic_input_fails_return_gap() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(code(&delone(d.path(), &["generate", "--model", "lattice", "--window", "100", "--out", "lattice.json"])), 0);
    let o = delone(d.path(), &["verify", "--input", "lattice.json", "--check", "return-gap", "--radius", "10"]);
    assert_eq!(code(&o), 1);
    let r = json(&d.path().join("verify.json"));
    assert_eq!(r["reports"][0]["status"], "failed");
    assert!(r["reports"][0]["reason"].as_str().unwrap().contains("periodic"));
}

#[test]
fn usage_and_input_errors_exit_two() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(code(&delone(d.path(), &["frobnicate"])), 2);
    assert_eq!(code(&delone(d.path(), &["generate", "--model", "fibonacci"])), 2);
    assert_eq!(code(&delone(d.path(), &["atlas", "--input", "missing.json", "--radius", "2"])), 2);
    std::fs::write(d.path().join("bad.json"), "{\"dim\": 1}").unwrap();
    let o = delone(d.path(), &["atlas", "--input", "bad.json", "--radius", "2"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("malformed"));
}

#[test]
fn artifacts_are_deterministic() {
    let d = tempfile::tempdir().unwrap();
    let run = |out: &str| {
        let o = delone(d.path(), &["generate", "--model", "ammann-beenker", "--window", "8", "--out", out]);
        assert_eq!(code(&o), 0);
        std::fs::read(d.path().join(out)).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
    assert_eq!(run("a.csv"), run("b.csv"));
}

#[test]
fn analysis_subcommands_write_reports() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    assert_eq!(code(&delone(p, &["generate", "--model", "fibonacci", "--window", "400", "--out", "f.json"])), 0);
    assert_eq!(code(&delone(p, &["atlas", "--input", "f.json", "--radius", "5", "--gap"])), 0);
    let a = json(&p.join("atlas.json"));
    assert_eq!(a["atlas"]["classes"].as_array().unwrap().len(), 8);
    assert!(a["min_return_gap"]["gap"].as_f64().unwrap() > 5.0 / (11.0 * 2.31));

    assert_eq!(
        code(&delone(p, &["repetitivity", "--input", "f.json", "--rmax", "10", "--grid-step", "5", "--format", "csv"])),
        0
    );
    let csv = std::fs::read_to_string(p.join("repetitivity.csv")).unwrap();
    assert!(csv.starts_with("R,class_count,M_hat,M_hat_over_R\n"));
    assert_eq!(csv.lines().count(), 3);

    let o = delone(p, &["derive", "--input", "f.json", "--rule", "right-midpoints", "--save-rule", "mid.json", "--out", "m.json"]);
    assert_eq!(code(&o), 0, "{o:?}");
    assert!(json(&p.join("mid.json"))["entries"].as_array().unwrap().len() >= 2);
    let o = delone(p, &["derive", "--input", "f.json", "--rule", "mid.json", "--out", "m2.json"]);
    assert_eq!(code(&o), 0, "{o:?}");
    assert_eq!(json(&p.join("m.json"))["points"], json(&p.join("m2.json"))["points"]);

    let o = delone(p, &["fibers", "--input", "f.json", "--rule", "forget-labels", "--radius", "5", "--l", "2.31"]);
    assert_eq!(code(&o), 0, "{o:?}");
    assert_eq!(json(&p.join("fibers.json"))["passed"], true);

    assert_eq!(code(&delone(p, &["generate", "--model", "lattice", "--window", "30", "--out", "z.json"])), 0);
    assert_eq!(code(&delone(p, &["generate", "--model", "lattice", "--basis", "2", "--window", "30", "--out", "z2.json"])), 0);
    assert_eq!(code(&delone(p, &["metric", "--a", "z.json", "--b", "z2.json"])), 0);
    let m = json(&p.join("metric.json"));
    assert_eq!(m["result"]["cap_hit"], true);
}

#[test]
fn theorem_harness_gate_and_override() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    assert_eq!(code(&delone(p, &["generate", "--model", "fibonacci", "--window", "1500", "--out", "f.json"])), 0);
    let args = ["theorem-harness", "--input", "f.json", "--rules", "identity", "identity", "--n", "2", "--radius", "3", "--l", "2.31"];
    let o = delone(p, &args);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("override"));
    let mut with = args.to_vec();
    with.push("--override-n");
    let o = delone(p, &with);
    assert_eq!(code(&o), 0, "{o:?}");
    let r = json(&p.join("theorem-harness.json"));
    assert_eq!(r["report"]["exploratory"], true);
    assert_eq!(r["report"]["equal_pairs"][0], serde_json::json!([0, 1]));
}

#[test]
fn voronoi_svg_and_patch_cells() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    assert_eq!(code(&delone(p, &["generate", "--model", "ammann-beenker", "--window", "20", "--out", "ab.json"])), 0);
    let o = delone(p, &["voronoi", "--input", "ab.json", "--region", "4", "--svg", "ab.svg"]);
    assert_eq!(code(&o), 0, "{o:?}");
    assert!(std::fs::read_to_string(p.join("ab.svg")).unwrap().contains("<polygon"));
    let cells = json(&p.join("voronoi.json"));
    assert!(cells["cells"].as_array().unwrap().len() > 20);
    assert_eq!(code(&delone(p, &["generate", "--model", "fibonacci", "--window", "600", "--out", "f.json"])), 0);
    let o = delone(p, &["voronoi", "--input", "f.json", "--patch-radius", "3", "--out", "pc.json"]);
    assert_eq!(code(&o), 0, "{o:?}");
    assert!(json(&p.join("pc.json"))["parameters"]["cell_patch_classes"].as_u64().unwrap() >= 1);
}

#[test]
fn verify_all_reports_mutation() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    assert_eq!(code(&delone(p, &["generate", "--model", "fibonacci", "--window", "300", "--out", "f.json"])), 0);
    assert_eq!(code(&delone(p, &["--profile", "smoke", "verify", "--input", "f.json"])), 0);
    let mut f = json(&p.join("f.json"));
    let pts = f["points"].as_array_mut().unwrap();
    let mid = pts.len() / 2 + 7;
    pts.remove(mid);
    f["labels"].as_array_mut().unwrap().remove(mid);
    std::fs::write(p.join("g.json"), serde_json::to_string(&f).unwrap()).unwrap();
    let o = delone(p, &["--profile", "smoke", "verify", "--input", "g.json", "--format", "csv"]);
    assert_eq!(code(&o), 1, "{o:?}");
    let csv = std::fs::read_to_string(p.join("verify.csv")).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("relative-density,failed")));
}
