use std::process::{Command, Output};

use twistss_cli::analyze::AnalysisReport;
use twistss_cli::massey_cmd::MasseyReport;
use twistss_cli::Status;

fn twistss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twistss"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn analyze_json(args: &[&str]) -> (i32, String) {
    let mut full = vec!["analyze"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--format", "json"]);
    let o = twistss(&full);
    (o.status.code().unwrap(), stdout(&o))
}

#[test]
fn torus_with_volume_twist() {
    let (code, json) = analyze_json(&["examples/torus3.json", "--twist", "e1^e2^e3"]);
    assert_eq!(code, 0);
    let r = AnalysisReport::from_json(&json).unwrap();
    assert_eq!((r.twisted_dims.even, r.twisted_dims.odd), (3, 3));
    assert_eq!((r.e_infinity.totals.even, r.e_infinity.totals.odd), (3, 3));
    assert_eq!(r.pages[2].differential_ranks, vec![1, 0, 0, 0]);
    assert!(r.verdicts.iter().all(|v| v.status != Status::Fail));
}

#[test]
fn json_report_round_trips_byte_for_byte() {
    let (_, json) = analyze_json(&["mixed", "--twist", "a + b"]);
    let r = AnalysisReport::from_json(&json).unwrap();
    assert_eq!(r.to_json(), json);
    let (_, again) = analyze_json(&["mixed", "--twist", "a + b"]);
    assert_eq!(again, json);
}

#[test]
fn formal_model_collapses_at_e4() {
    let (code, json) = analyze_json(&["su3", "--twist", "x3"]);
    assert_eq!(code, 0);
    let r = AnalysisReport::from_json(&json).unwrap();
    assert_eq!((r.twisted_dims.even, r.twisted_dims.odd), (0, 0));
    assert!(r.pages[3].dims.iter().all(|&d| d == 0));
    assert_eq!(r.pages[3].dims, r.e_infinity.dims);
}

#[test]
fn untwisted_heisenberg_e2_matches_de_rham() {
    let (code, json) = analyze_json(&["heisenberg", "--twist", ""]);
    assert_eq!(code, 0);
    let r = AnalysisReport::from_json(&json).unwrap();
    assert_eq!(r.de_rham_dims, vec![1, 2, 2, 1]);
    let even: usize = r.de_rham_dims.iter().step_by(2).sum();
    let odd: usize = r.de_rham_dims.iter().skip(1).step_by(2).sum();
    assert_eq!((r.pages[1].totals.even, r.pages[1].totals.odd), (even, odd));
}

#[test]
fn max_page_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = twistss(&[
        "analyze",
        "massey_s2",
        "--twist",
        "a",
        "--max-page",
        "9",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let r = AnalysisReport::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r.pages.len(), 9);
    let remark = r.verdicts.iter().find(|v| v.check.contains("d_9")).unwrap();
    assert_eq!(remark.status, Status::Pass);
}

#[test]
fn input_errors_exit_2() {
    assert_eq!(twistss(&["analyze", "no_such_model"]).status.code(), Some(2));
    assert_eq!(
        twistss(&["analyze", "torus3", "--twist", "e1^e2"]).status.code(),
        Some(2)
    );
    assert_eq!(twistss(&["analyze", "torus3", "--twist", "e9"]).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_twistss"))
        .args(["analyze", "torus3"])
        .env("TWISTSS_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn thread_cap_is_honoured() {
    let o = Command::new(env!("CARGO_BIN_EXE_twistss"))
        .args(["analyze", "torus5", "--twist", "e1^e2^e3"])
        .env("TWISTSS_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}

fn massey_json(args: &[&str]) -> (i32, Option<MasseyReport>) {
    let mut full = vec!["massey"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--format", "json"]);
    let o = twistss(&full);
    let report = serde_json::from_slice(&o.stdout).ok();
    (o.status.code().unwrap(), report)
}

#[test]
fn heisenberg_triple_product() {
    let (code, r) = massey_json(&["heisenberg", "--triple", "a", "b", "b"]);
    assert_eq!(code, 0);
    let r = r.unwrap();
    assert_eq!(r.cocycle.as_deref(), Some("-b^c"));
    assert_eq!(r.specific_element.as_deref(), Some("-b^c"));
    assert!(r.verdict.detail.starts_with("nonzero"));
}

#[test]
fn band_system_on_the_torus() {
    let (code, r) = massey_json(&["torus3", "--twist", "e1^e2^e3", "--thm41", "--class", "e1", "--t", "1"]);
    assert_eq!(code, 0);
    let r = r.unwrap();
    assert_eq!(r.cocycle.as_deref(), Some("0"));
    let system = r.system.unwrap();
    assert_eq!(system[1][2], "0");
    assert_eq!(system[0][2], "*");
}

#[test]
fn single_component_system() {
    let (code, r) = massey_json(&[
        "massey_s2",
        "--twist",
        "a",
        "--thm42",
        "--class",
        "x",
        "--t",
        "3",
        "--s",
        "2",
    ]);
    assert_eq!(code, 0);
    let r = r.unwrap();
    assert_eq!(r.verdict.status, Status::Pass);
    assert_eq!(r.system.unwrap()[1][2], "-v");
    assert_eq!(r.specific_element, r.zigzag_differential);
}

#[test]
fn single_component_outside_the_case() {
    let (code, r) = massey_json(&[
        "massey_s2",
        "--twist",
        "a",
        "--thm42",
        "--class",
        "x",
        "--t",
        "2",
        "--s",
        "2",
    ]);
    assert_eq!(code, 0);
    assert_eq!(r.unwrap().verdict.status, Status::NotApplicable);
}

#[test]
fn class_absent_from_page() {
    let (code, _) = massey_json(&["massey_s2", "--twist", "a", "--thm41", "--class", "1", "--t", "3"]);
    assert_eq!(code, 2);
    let (code, _) = massey_json(&["heisenberg", "--triple", "a", "c", "b"]);
    assert_eq!(code, 2);
}

#[test]
fn selftest_passes_deterministically() {
    let a = twistss(&["selftest", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    let b = twistss(&["selftest", "--seed", "7"]);
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(stdout(&a).lines().filter(|l| l.starts_with("[PASS]")).count(), 12);
}

#[test]
fn selftest_with_extra_models() {
    let dir = tempfile::tempdir().unwrap();
    let doc = twistss_core::library::bundled_document("heisenberg")
        .unwrap()
        .replace("heisenberg", "copy");
    std::fs::write(dir.path().join("copy.json"), doc).unwrap();
    let o = twistss(&["selftest", "--models", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));

    std::fs::write(
        dir.path().join("broken.json"),
        "{ \"name\": \"broken\", \"top_degree\": ",
    )
    .unwrap();
    let o = twistss(&["selftest", "--models", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("broken.json"), "{err}");
}

#[test]
fn low_dimensional_model_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("circle.json");
    std::fs::write(
        &path,
        r#"{ "name": "circle", "top_degree": 1, "generators": [{ "name": "e", "degree": 1 }] }"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let (code, json) = analyze_json(&[p]);
    assert_eq!(code, 0);
    let r = AnalysisReport::from_json(&json).unwrap();
    assert_eq!((r.twisted_dims.even, r.twisted_dims.odd), (1, 1));
    assert_eq!(
        twistss(&["massey", p, "--triple", "1", "1", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        twistss(&["massey", p, "--thm41", "--class", "e", "--t", "1"])
            .status
            .code(),
        Some(2)
    );
}
