use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn gccha(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gccha")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = gccha(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn header(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

/// Path graph on five nodes with p = q = 2 and three realizations.
fn synth_into(dir: &Path) {
    let spec = r#"{"nodes":5,"edges":[[0,1,1.0],[1,2,1.0],[2,3,2.0],[3,4,1.0]],"p":2,"q":2,
        "realizations":3,"seed":1,"random_field":{"seed":2}}"#;
    fs::write(dir.join("spec.json"), spec).unwrap();
    ok(&["synth", "--spec", s(&dir.join("spec.json")), "--out", s(&dir.join("data"))]);
}

#[test]
fn synth_and_analyze_write_documented_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth_into(d);
    assert_eq!(header(&d.join("data/x.csv")), "node,realization,x1,x2");
    assert_eq!(header(&d.join("data/graph.csv")), "src,dst,weight");
    let pop: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("data/population.json")).unwrap()).unwrap();
    assert_eq!(pop["coherence"].as_array().unwrap().len(), 2);

    let data = d.join("data");
    ok(&[
        "analyze", "--graph", s(&data.join("graph.csv")), "--x", s(&data.join("x.csv")), "--y",
        s(&data.join("y.csv")), "--out", s(&d.join("out")),
    ]);
    let out = d.join("out");
    assert_eq!(header(&out.join("coherence_curves.csv")), "component,frequency_index,lambda,frequency_key,coherence");
    assert_eq!(header(&out.join("loadings.csv")), "component,channel,frequency_index,lambda,quantity,value");
    assert_eq!(header(&out.join("canonical_signals.csv")), "node,realization,Z1,Z2,W1,W2");
    let rows = fs::read_to_string(out.join("coherence_curves.csv")).unwrap().lines().count();
    assert_eq!(rows, 1 + 2 * 5);
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["rank"], 2);
    assert_eq!(summary["estimator"]["mode"], "realization-average");
    assert!(out.join("field.json").exists());
}

#[test]
fn basis_and_diagnose_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth_into(d);
    let data = d.join("data");
    ok(&["basis", "--graph", s(&data.join("graph.csv")), "--out", s(&d.join("basis"))]);
    assert_eq!(header(&d.join("basis/eigenvalues.csv")), "frequency_index,lambda,frequency_key");
    assert_eq!(fs::read_to_string(d.join("basis/eigenvalues.csv")).unwrap().lines().count(), 6);
    let stdout = ok(&["diagnose", "--graph", s(&data.join("graph.csv")), "--x", s(&data.join("x.csv"))]).stdout;
    assert!(!String::from_utf8(stdout).unwrap().trim().is_empty());
}

#[test]
fn make_images_and_classify() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let images = d.join("images.csv");
    ok(&["make-images", "--classes", "2", "--per-class", "10", "--side", "8", "--out", s(&images)]);
    assert!(header(&images).starts_with("label,p0,p1"));
    let table = String::from_utf8(
        ok(&["classify", "--images", s(&images), "--split-rows", "2", "--rank", "3", "--reps", "2", "--per-class", "10", "--row-width", "8", "--k", "3"])
            .stdout,
    )
    .unwrap();
    assert!(table.lines().count() >= 2, "{table}");
}

#[test]
fn missing_file_exits_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.csv");
    let out = gccha(&["analyze", "--graph", s(&missing), "--x", s(&missing), "--y", s(&missing), "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rank_beyond_channels_exits_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth_into(d);
    let data = d.join("data");
    let out = gccha(&[
        "analyze", "--graph", s(&data.join("graph.csv")), "--x", s(&data.join("x.csv")), "--y",
        s(&data.join("y.csv")), "--rank", "3", "--out", s(&d.join("out")),
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn singular_spectrum_without_ridge_exits_with_numerical_code() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth_into(d);
    let data = d.join("data");
    // Zero the second channel of Y so its auto-spectrum is singular everywhere.
    let y: String = fs::read_to_string(data.join("y.csv"))
        .unwrap()
        .lines()
        .enumerate()
        .map(|(i, line)| {
            if i == 0 {
                format!("{line}\n")
            } else {
                let mut f: Vec<&str> = line.split(',').collect();
                f[3] = "0";
                format!("{}\n", f.join(","))
            }
        })
        .collect();
    fs::write(d.join("y0.csv"), y).unwrap();
    let out = gccha(&[
        "analyze", "--graph", s(&data.join("graph.csv")), "--x", s(&data.join("x.csv")), "--y",
        s(&d.join("y0.csv")), "--ridge", "0", "--out", s(&d.join("out")),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("frequency index"));
}

#[test]
fn bad_image_settings_exit_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    let images = dir.path().join("images.csv");
    ok(&["make-images", "--per-class", "5", "--side", "4", "--out", s(&images)]);
    let out = gccha(&["classify", "--images", s(&images), "--row-width", "4", "--split-rows", "4", "--reps", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = gccha(&["make-images", "--noise=-1", "--out", s(&images)]);
    assert_eq!(out.status.code(), Some(2));
}
