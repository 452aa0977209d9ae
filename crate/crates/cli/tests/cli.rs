use std::process::{Command, Output};

fn stereolab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stereolab"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn catalog_json_lists_every_group() {
    let o = stereolab(&["catalog", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 27);
}

#[test]
fn single_group_verifies() {
    let o = stereolab(&["catalog", "--group", "P4_232"]);
    assert!(o.status.success());
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn unknown_group_exits_with_one() {
    let o = stereolab(&["cell", "--group", "P6/mmm", "--point", "1/2,-1/4,3/8"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bounds_match() {
    let o = stereolab(&["bounds"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn cell_writes_an_off_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = stereolab(&[
        "cell",
        "--group",
        "F2/d-3",
        "--point",
        "5/8,-1/4,3/8",
        "--format",
        "off",
        "--out",
        out,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("boundary"));
    let text = std::fs::read_to_string(dir.path().join("F2_d-3_cell.off")).unwrap();
    assert!(text.starts_with("OFF\n"));
}

#[test]
fn interior_cell_passes_the_lemma_checks() {
    let o = stereolab(&[
        "cell",
        "--group",
        "P4_232",
        "--point",
        "2727/5000,-6351/20000,224/625",
        "--influence",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["report"]["facet_count"], 14);
    assert_eq!(v["checks"]["lemma32"], true);
}

#[test]
fn experiment_csv_has_one_row_per_sample() {
    let o = stereolab(&[
        "experiment",
        "--group",
        "P4_232",
        "--samples",
        "3",
        "--seed",
        "2",
        "--format",
        "csv",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    assert_eq!(
        r.headers().unwrap(),
        vec![
            "sample_id",
            "px",
            "py",
            "pz",
            "facet_count",
            "neighbor_labels"
        ]
    );
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    for row in &rows {
        let n: usize = row[4].parse().unwrap();
        assert_eq!(row[5].split(';').count(), n);
        assert!((14..=17).contains(&n));
    }
}

#[test]
fn experiment_off_files_per_sample() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = stereolab(&[
        "experiment",
        "--group",
        "F23",
        "--samples",
        "2",
        "--format",
        "off",
        "--out",
        out,
    ]);
    assert!(o.status.success());
    assert!(dir.path().join("F23_0.off").exists() && dir.path().join("F23_1.off").exists());
    let o = stereolab(&[
        "experiment",
        "--group",
        "F23",
        "--samples",
        "2",
        "--format",
        "off",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn experiment_json_is_reproducible() {
    let args = [
        "experiment",
        "--group",
        "P23",
        "--samples",
        "2",
        "--seed",
        "9",
        "--half",
        "upper",
    ];
    let a = stereolab(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, stereolab(&args).stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["samples"].as_array().unwrap().len(), 2);
}

#[test]
fn reflection_groups_are_refused() {
    let o = stereolab(&["experiment", "--group", "Pm-3m", "--samples", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn helix_worked_example() {
    let o = stereolab(&["helix", "--alpha", "1/8", "--beta", "1/4", "--h", "1/8"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("11 facets"));
    let o = stereolab(&["helix", "--alpha", "1/8"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn special_orbit_split() {
    let o = stereolab(&[
        "special-orbit",
        "--group",
        "F4_132",
        "--t",
        "1/8",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["stabilizer_order"], 2);
    assert!(v[0]["facet_count"].as_u64().unwrap() <= 12);
}

#[test]
fn usage_errors_exit_with_one() {
    let o = stereolab(&["cell", "--group", "P23", "--point", "1/2,x,0"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stereolab(&["--help"]).status.code(), Some(0));
}
