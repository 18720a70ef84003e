use std::f64::consts::TAU;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;
use trajrot_core::io::{read_curve_file, write_curve_file};
use trajrot_core::scenarios::{hopf_partner, twist_start, unit_circle_xy};
use trajrot_core::*;

fn trajrot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trajrot")).args(args).output().expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = trajrot(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn fails_with(args: &[&str], code: i32, needle: &str) {
    let out = trajrot(args);
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(out.status.code(), Some(code), "{args:?}: {err}");
    assert!(err.contains(needle), "{args:?}: expected '{needle}' in '{err}'");
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn integrate_spiral() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("s.csv");
    let args = ["integrate", "--field", "spiral2d", "--x0", "0.5,0", "--t0", "0", "--t1", "10", "--out", p(&out)];
    assert!(trajrot(&args).status.success());
    let rows = csv_rows(&out);
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0]));
    let last = rows.last().unwrap();
    assert_eq!(last[0], 10.0);
    let r = last[1].hypot(last[2]);
    assert!(r > 0.0 && r < 0.5, "{r}");
}

#[test]
fn integrate_constant_field_to_stdout() {
    let out = trajrot(&["integrate", "--field", "constant:1,0,0", "--x0", "0,0,0", "--t1", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("t,x1,x2,x3\n"));
    let last: Vec<f64> = text.lines().last().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    for (a, b) in last.iter().zip([1.0, 1.0, 0.0, 0.0]) {
        assert!((a - b).abs() < 1e-12, "{last:?}");
    }
}

#[test]
fn integrate_rejects_bad_input() {
    fails_with(
        &["integrate", "--field", "spiral2d", "--x0", "0.5,0", "--t1", "0", "--t0", "1"],
        2,
        "t1 must exceed t0",
    );
    fails_with(&["integrate", "--field", "vortex", "--x0", "0.5,0", "--t1", "1"], 2, "Parse");
    fails_with(&["integrate", "--field", "spiral2d", "--x0", "0.5,0,0", "--t1", "1"], 2, "DimensionMismatch");
    fails_with(
        &["integrate", "--field", "spiral2d", "--x0", "0.5,0", "--t1", "1", "--rel-tol", "2"],
        2,
        "InvalidInput",
    );
    fails_with(&["integrate", "--field", "spiral2d", "--x0", "0.5,0"], 2, "missing --t1");
}

#[test]
fn integrate_reports_numerical_failure() {
    let args = ["integrate", "--field", "linear:1", "--x0", "1", "--t1", "5", "--max-samples", "10"];
    fails_with(&args, 3, "SampleBudgetExceeded");
}

#[test]
fn rotate_unit_circle() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("circle.csv");
    let c = Curve::from_fn(0.0, TAU, 2001, true, |t| vec![t.cos(), t.sin()]).unwrap();
    write_curve_file(&c, &path).unwrap();
    let r = ok_json(&["rotate", "--curve", p(&path), "--point", "0,0", "--mode", "signed"]);
    assert!((r["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(r["convention"], "signed_turns");
    let r = ok_json(&["rotate", "--curve", p(&path), "--point", "0,0"]);
    assert!((r["value"].as_f64().unwrap() - TAU).abs() < 1e-9);
    fails_with(&["rotate", "--curve", p(&path), "--point", "1,0"], 2, "DistanceTooSmall");
    fails_with(&["rotate", "--curve", p(&path), "--point", "0,0", "--line", "0,0,1,0"], 2, "exactly one");
    fails_with(&["rotate", "--curve", p(&path), "--point", "0,0", "--mode", "sideways"], 2, "unknown mode");
}

#[test]
fn twist_curve_around_its_axis() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("twist.csv");
    let x0 = twist_start(0.05).iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(",");
    let args = [
        "integrate",
        "--field",
        "twist3d",
        "--x0",
        &x0,
        "--t1",
        "0.15",
        "--polar-axis",
        "0,0,0,1,0,0",
        "--out",
        p(&path),
    ];
    let out = trajrot(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = ok_json(&["rotate", "--curve", p(&path), "--line", "0,0,0,1,0,0", "--mode", "abs"]);
    let v = r["value"].as_f64().unwrap();
    assert!((v - 15.0).abs() < 0.15, "{v}");
}

#[test]
fn rotate_matches_the_library() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("sink.csv");
    let args = [
        "integrate",
        "--field",
        "linear:-1,0,0,0,-1,2,0,-2,-1",
        "--x0",
        "1,1,0.5",
        "--t1",
        "3",
        "--observe-point",
        "0,0,0",
        "--out",
        p(&path),
    ];
    assert!(trajrot(&args).status.success());
    let r = ok_json(&["rotate", "--curve", p(&path), "--point", "0,0,0"]);
    let f = FieldSpec::parse("linear:-1,0,0,0,-1,2,0,-2,-1").unwrap();
    let obs = [Observer::Point(vec![0.0; 3])];
    let direct = integrate_observed(&f, &[1.0, 1.0, 0.5], 0.0, 3.0, &IntegratorConfig::default(), &obs).unwrap();
    assert_eq!(read_curve_file(&path, false).unwrap(), direct);
    let lib = absolute_rotation_point(&direct, &[0.0; 3]).unwrap();
    assert_eq!(r["value"].as_f64().unwrap(), lib.value);
    assert_eq!(r["error_estimate"].as_f64().unwrap(), lib.error_estimate);
}

#[test]
fn link_pairs() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let far = dir.path().join("far.csv");
    let same = dir.path().join("same.csv");
    write_curve_file(&unit_circle_xy(400), &a).unwrap();
    write_curve_file(&hopf_partner(400), &b).unwrap();
    write_curve_file(&unit_circle_xy(400).map_points(|q| vec![q[0] + 5.0, q[1], q[2]]).unwrap(), &far).unwrap();
    write_curve_file(&unit_circle_xy(300), &same).unwrap();

    let r = ok_json(&["link", "--curve1", p(&a), "--curve2", p(&b)]);
    assert_eq!(r["linking"]["nearest_integer"].as_i64().unwrap().abs(), 1);
    assert!(r["linking"]["residual"].as_f64().unwrap() < 0.02);
    let r = ok_json(&["link", "--curve1", p(&a), "--curve2", p(&far)]);
    assert_eq!(r["linking"]["nearest_integer"].as_i64().unwrap(), 0);
    fails_with(&["link", "--curve1", p(&a), "--curve2", p(&same)], 2, "CurvesTooClose");
}

#[test]
fn verify_scenarios() {
    let r = ok_json(&["verify", "--scenario", "sink-pair", "--theorem", "thm3_8"]);
    assert_eq!(r[0]["theorem_id"], "thm3_8");
    assert_eq!(r[0]["satisfied"], true);
    for key in ["measured", "bound", "margin", "inputs", "error_estimates"] {
        assert!(r[0].get(key).is_some(), "{key}");
    }
    fails_with(&["verify", "--scenario", "twist-line", "--theorem", "prop3_2"], 2, "NotInvariant");
    fails_with(&["verify", "--scenario", "sink-pair", "--theorem", "thm9_9"], 2, "unknown theorem");
    fails_with(&["verify", "--scenario", "whirlpool", "--theorem", "thm3_4"], 2, "unknown scenario");
    fails_with(&["verify", "--scenario", "sink", "--theorem", "thm3_8"], 2, "pair");
}

#[test]
fn verify_user_field() {
    let r = ok_json(&[
        "verify",
        "--scenario",
        "sink",
        "--field",
        "linear:-0.5,1,0,-1,-0.5,0,0,0,-1",
        "--x0",
        "1,0,0.3",
        "--t1",
        "4",
        "--theorem",
        "prop3_1,thm3_4",
    ]);
    assert_eq!(r.as_array().unwrap().len(), 2);
    assert!(r.as_array().unwrap().iter().all(|x| x["satisfied"] == true));
    assert_eq!(r[1]["inputs"]["K_method"], "analytic");
}

#[test]
fn output_is_deterministic() {
    let args = ["verify", "--scenario", "spiral", "--theorem", "thm3_4", "--seed", "7"];
    let (a, b) = (trajrot(&args), trajrot(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.contains("\"seed\": 7"));
    assert!(text.contains("e0,") || text.contains("e1,"));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# defaults\nfield = constant:1,0\nx0 = 0,0\nt1 = 2\n").unwrap();
    let last_t = |extra: &[&str]| {
        let mut args = vec!["integrate", "--config", p(&cfg)];
        args.extend_from_slice(extra);
        let out = trajrot(&args);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let text = String::from_utf8(out.stdout).unwrap();
        text.lines().last().unwrap().split(',').next().unwrap().parse::<f64>().unwrap()
    };
    assert_eq!(last_t(&[]), 2.0);
    assert_eq!(last_t(&["--t1", "1"]), 1.0);

    let bad = dir.path().join("bad.conf");
    std::fs::write(&bad, "t_one = 2\n").unwrap();
    fails_with(&["integrate", "--config", p(&bad)], 2, "unknown config key");
}

#[test]
fn crofton_and_witness() {
    let r = ok_json(&["crofton", "--constants", "3"]);
    assert!((r["C_n"].as_f64().unwrap() - 8.0 * std::f64::consts::PI).abs() < 1e-12);

    let dir = TempDir::new().unwrap();
    let circle = dir.path().join("great.csv");
    write_curve_file(&unit_circle_xy(721), &circle).unwrap();
    let r = ok_json(&["crofton", "--curve", p(&circle), "--samples", "4000"]);
    let (est, se) = (r["estimate"]["estimate"].as_f64().unwrap(), r["estimate"]["std_error"].as_f64().unwrap());
    // A great circle meets every equator exactly twice, so the spread is zero.
    assert!((est - TAU).abs() <= 4.0 * se + 1e-12, "{est} +- {se}");

    let loops = dir.path().join("loops.csv");
    let c = Curve::from_fn(0.0, 1.0, 2001, true, |t| vec![(5.0 * TAU * t).cos(), (5.0 * TAU * t).sin()]).unwrap();
    write_curve_file(&c, &loops).unwrap();
    let w = ok_json(&["witness", "--curve", p(&loops), "--theta", "4.5"]);
    assert_eq!(w["relation"], "antipodal");
    assert!(w["v_proj_1"].as_f64().unwrap() * w["v_proj_2"].as_f64().unwrap() < 0.0);
    fails_with(&["witness", "--curve", p(&loops), "--theta", "6"], 2, "PreconditionLength");
}

#[test]
fn paper_repro_tables() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("repro");
    let s = ok_json(&["paper-repro", "--out", p(&out)]);
    let turns = s["circle_line"]["turns"]["value"].as_f64().unwrap();
    assert!((turns - 1.0).abs() <= 1e-3, "{turns}");
    let spiral = s["spiral"]["rotation"]["value"].as_f64().unwrap();
    assert!((spiral - 10.0).abs() < 1e-2, "{spiral}");
    let rows = s["twist_table"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let row = rows.iter().find(|r| r["a"].as_f64() == Some(0.05)).unwrap();
    assert!((row["rotation"].as_f64().unwrap() - 15.0).abs() < 0.15);
    assert!(s["twist_pair"]["absolute"]["value"].as_f64().unwrap().abs() < 1e-4);
    assert_eq!(s["sink_log_table"]["rows"].as_array().unwrap().len(), 4);
    for f in ["summary.json", "spiral.csv", "twist_table.json", "sink_log_table.json", "twist_pair_1.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
}
