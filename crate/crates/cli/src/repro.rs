//! `paper-repro`: the reference computations, written as CSV curves and
//! JSON tables into one directory, with a summary on standard output.

use std::path::Path;

use serde_json::{json, Value};
use trajrot_core::bounds::{log_sink_study, reference_sink};
use trajrot_core::io::{to_json, write_curve_file, write_json_file};
use trajrot_core::rotation::rotation_polar;
use trajrot_core::scenarios::{twist_polar, unit_circle_xy, z_axis_segment, LOG_SINK_KS};
use trajrot_core::*;

pub const TWIST_CUTOFFS: [f64; 4] = [0.2, 0.1, 0.05, 0.025];
pub const TWIST_UPPER: f64 = 0.2;
pub const LINE_HALF_LENGTH: f64 = 100.0;

fn circle_line(dir: &Path) -> Result<Value> {
    let circle = unit_circle_xy(2000);
    let line = z_axis_segment(LINE_HALF_LENGTH);
    let r = gauss_rotation_pair(&circle, &line, Mode::Signed)?;
    let row = json!({ "half_length": LINE_HALF_LENGTH, "turns": r, "expected": 1.0 });
    write_curve_file(&circle, &dir.join("circle.csv"))?;
    write_json_file(&row, &dir.join("circle_line.json"))?;
    Ok(row)
}

fn spiral(dir: &Path) -> Result<Value> {
    let s = Scenario::new(ScenarioName::Spiral);
    let c = s.trajectories()?.remove(0);
    let r = absolute_rotation_point(&c, &s.point)?;
    let row = json!({ "T": s.t1 - s.t0, "rotation": r, "expected": s.t1 - s.t0 });
    write_curve_file(&c, &dir.join("spiral.csv"))?;
    write_json_file(&row, &dir.join("spiral.json"))?;
    Ok(row)
}

fn twist_table(dir: &Path) -> Result<Value> {
    let mut rows = Vec::new();
    for a in TWIST_CUTOFFS {
        let expected = 1.0 / a - 1.0 / TWIST_UPPER;
        let (value, err) = if a < TWIST_UPPER {
            let p = twist_polar(a, TWIST_UPPER)?;
            let r = rotation_polar(&p, Mode::Absolute)?;
            write_curve_file(&p.to_curve()?, &dir.join(format!("twist_line_a{a}.csv")))?;
            (r.value, r.error_estimate)
        } else {
            (0.0, 0.0)
        };
        rows.push(json!({
            "a": a,
            "b": TWIST_UPPER,
            "rotation": value,
            "error_estimate": err,
            "expected": expected,
            "elapsed_time": TWIST_UPPER - a,
        }));
    }
    let table = Value::Array(rows);
    write_json_file(&table, &dir.join("twist_table.json"))?;
    Ok(table)
}

fn twist_pair(dir: &Path) -> Result<Value> {
    let s = Scenario::new(ScenarioName::TwistPair);
    let t = s.trajectories()?;
    let row = json!({
        "signed": gauss_rotation_pair(&t[0], &t[1], Mode::Signed)?,
        "absolute": gauss_rotation_pair(&t[0], &t[1], Mode::Absolute)?,
        "expected": 0.0,
    });
    write_curve_file(&t[0], &dir.join("twist_pair_1.csv"))?;
    write_curve_file(&t[1], &dir.join("twist_pair_2.csv"))?;
    write_json_file(&row, &dir.join("twist_pair.json"))?;
    Ok(row)
}

fn sink_table(dir: &Path) -> Result<Value> {
    let (l, pair) = reference_sink();
    let study = log_sink_study(&l, (&pair[0], &pair[1]), 1.0, &LOG_SINK_KS)?;
    write_json_file(&study, &dir.join("sink_log_table.json"))?;
    serde_json::to_value(&study).map_err(|e| Error::Io(e.to_string()))
}

pub fn run(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let summary = json!({
        "circle_line": circle_line(dir)?,
        "spiral": spiral(dir)?,
        "twist_table": twist_table(dir)?,
        "twist_pair": twist_pair(dir)?,
        "sink_log_table": sink_table(dir)?,
    });
    write_json_file(&summary, &dir.join("summary.json"))?;
    print!("{}", to_json(&summary)?);
    Ok(())
}
