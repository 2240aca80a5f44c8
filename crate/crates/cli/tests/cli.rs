use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const SINGLE_SHELL: &str = r#"{
    "id": "c1-shell", "prime": 2, "dim": 1, "target": "C1",
    "kernel": [{"coeff": 1.0, "lo": 0, "hi": 0}],
    "families": [{"scalar_radial": {"slope": 1, "offset": 0}}],
    "params": {"q_i": [2], "alpha_i": [0]},
    "inputs": [[{"coeff": 1.0, "hi": 0}]],
    "options": {"check": "ratio"}
}"#;

const SPREAD: &str = r#"{
    "id": "c1-spread", "prime": 3, "dim": 1, "target": "C1",
    "kernel": [{"coeff": 1.0, "lo": -1, "hi": 1}],
    "families": [{"scalar_radial": {"slope": 1, "offset": 0}}],
    "params": {"q_i": [2], "alpha_i": [0.5]},
    "options": {"check": "ratio", "rs": [1]}
}"#;

const MORREY: &str = r#"{
    "id": "c3", "prime": 3, "dim": 1, "target": "C3",
    "kernel": [{"coeff": 1.0, "lo": -1, "hi": 1}],
    "families": [{"scalar_radial": {"slope": 1, "offset": 0}}, {"scalar_radial": {"slope": 2, "offset": -1}}],
    "params": {"q_i": [3, 4], "alpha_i": [0.5, -0.25], "lambda_i": [-0.1, -0.2]}
}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_padic-hausdorff"))
        .args(args)
        .env_remove("PADIC_SUITE_DIR")
        .output()
        .expect("run cli")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(csv.as_bytes());
    r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
}

fn number(field: &str) -> f64 {
    if field == "inf" {
        f64::INFINITY
    } else {
        assert!(!field.contains(['e', 'E']), "exponent in {field}");
        field.parse().unwrap()
    }
}

#[test]
fn constant_of_a_single_shell_kernel() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "c1.json", SINGLE_SHELL);
    let o = run(&["constant", &f]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "C1 0.5 (converged)");
}

#[test]
fn missing_prime_is_a_schema_error() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "bad.json", &SINGLE_SHELL.replace(r#""prime": 2,"#, ""));
    let o = run(&["constant", &f]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("prime") && err.contains("bad.json"), "{err}");
}

#[test]
fn hypothesis_violation_names_the_condition() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "c3.json", &MORREY.replace("-0.1, -0.2", "-0.5, -0.2"));
    let o = run(&["verify", &f]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("lambda_i in (-1/q_i, 0)"));
}

#[test]
fn divergent_kernel_reports_infinity() {
    let dir = TempDir::new().unwrap();
    let text =
        MORREY.replace(r#"[{"coeff": 1.0, "lo": -1, "hi": 1}]"#, r#"[{"coeff": 1.0, "exponent": 1.0, "lo": 0}]"#);
    let f = write(dir.path(), "div.json", &text);
    let o = run(&["constant", &f]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).trim(), "C3 +inf (divergent)");
}

#[test]
fn thm33_suite_is_tight() {
    let o = run(&["verify", "--suite", "thm33"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("scenario_id,constant_id,target,ratio_at_max_r,slack,verdict\n"));
    let rows = rows(&out);
    assert!(!rows.is_empty());
    for r in rows {
        assert!((number(&r[4]) - 1.0).abs() <= 1e-10, "{r:?}");
        assert_eq!(r[5], "pass");
    }
}

#[test]
fn power_weight_suite_matches_the_membership_criterion() {
    let o = run(&["verify", "--suite", "prop-power-weights"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = rows(&stdout(&o));
    let mut a1 = 0;
    for r in &rows {
        assert_eq!(r[5], "pass", "{r:?}");
        if r[1] != "A1" {
            continue;
        }
        a1 += 1;
        // ids look like a1-p2-n1-alpha+0.10
        let n: f64 = r[0].split("-n").nth(1).unwrap().split('-').next().unwrap().parse().unwrap();
        let alpha: f64 = r[0].rsplit("alpha").next().unwrap().parse().unwrap();
        let member = -n < alpha && alpha <= 0.0;
        assert_eq!(number(&r[2]).is_finite() && number(&r[3]).is_finite(), member, "{r:?}");
    }
    assert!(a1 >= 8);
}

#[test]
fn unconverged_ratio_fails_with_exit_one() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "spread.json", SPREAD);
    let o = run(&["verify", &f]);
    assert_eq!(o.status.code(), Some(1));
    let rows = rows(&stdout(&o));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][5], "fail");
    assert!(number(&rows[0][3]) < number(&rows[0][2]));
}

#[test]
fn empty_directory_gives_an_empty_report() {
    let dir = TempDir::new().unwrap();
    let o = run(&["verify", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "scenario_id,constant_id,target,ratio_at_max_r,slack,verdict\n");
    let o = run(&["verify", dir.path().to_str().unwrap(), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 0);
}

#[test]
fn report_files_agree_and_are_sorted() {
    let dir = TempDir::new().unwrap();
    let suite = dir.path().join("mine");
    fs::create_dir(&suite).unwrap();
    write(&suite, "b.json", MORREY);
    write(&suite, "a.json", SINGLE_SHELL);
    let out = dir.path().join("out");
    let o = Command::new(env!("CARGO_BIN_EXE_padic-hausdorff"))
        .args(["verify", "--suite", "mine", "--out", out.to_str().unwrap()])
        .env("PADIC_SUITE_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("report.csv")).unwrap();
    assert_eq!(csv, stdout(&o));
    let rows = rows(&csv);
    let ids: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(ids, ["c1-shell", "c3"]);

    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let jrows = json["rows"].as_array().unwrap();
    for (r, j) in rows.iter().zip(jrows) {
        assert_eq!(j["scenario_id"], r[0].as_str());
        assert_eq!(j["verdict"], r[5].as_str());
        assert_eq!(j["hypotheses"], "ok");
        let slack = j["slack"]["value"].as_f64().unwrap();
        assert!((slack - number(&r[4])).abs() <= 1e-14 * slack.abs().max(1.0));
        assert!(j["runtime_s"].as_f64().unwrap() >= 0.0);
    }
    assert_eq!(jrows[0]["ratios"].as_array().unwrap().len(), 8);
    assert!(jrows[1]["lhs"]["value"].as_f64().is_some());
}

#[test]
fn ratio_plot_approaches_the_constant() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "spread.json", &SPREAD.replace(r#""rs": [1]"#, r#""rs": [1, 2, 3, 4, 5, 6, 7, 8]"#));
    let o = run(&["plotdata", &f]);
    assert_eq!(o.status.code(), Some(0));
    let rows = rows(&stdout(&o));
    assert_eq!(rows.len(), 8);
    let last = &rows[7];
    let (ratio, target) = (number(&last[1]), number(&last[2]));
    assert!((ratio / target - 1.0).abs() <= 0.05, "{last:?}");
}

#[test]
fn maximal_of_the_unit_ball_indicator() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "c1.json", SINGLE_SHELL);
    let o = run(&["plotdata", &f, "--radial", "maximal", "--window", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = rows(&stdout(&o));
    assert_eq!(rows.len(), 21);
    for r in rows {
        let g: i32 = r[0].parse().unwrap();
        let want = 2f64.powi(-g).min(1.0);
        assert!((number(&r[1]) - want).abs() <= 1e-14, "{r:?}");
    }
}

#[test]
fn plotdata_is_byte_stable() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "c3.json", MORREY);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (out, dump) in [(&a, "operator"), (&b, "operator")] {
        let o = run(&["plotdata", &f, "--radial", dump, "--seed", "7", "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let (x, y) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert!(!x.is_empty());
    assert_eq!(x, y);
}

#[test]
fn weights_report_critical_index() {
    let o = run(&["weights", "--prime", "2", "--dim", "1", "--alpha", "-0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = rows(&stdout(&o));
    let get = |k: &str| rows.iter().find(|r| r[0] == k).unwrap()[1].clone();
    assert!((number(&get("critical_rh_index")) - 2.0).abs() < 1e-4);
    assert_eq!(get("expected_a1"), "true");
    assert!(number(&get("a1")).is_finite());
    assert_eq!(get("rh_r"), "inf");
}

#[test]
fn unknown_suite_is_rejected() {
    let o = run(&["verify", "--suite", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}
