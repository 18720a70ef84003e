//! Built-in fields, start points and reference curves shared by the command
//! line tool and the test suites.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde_json::json;

use crate::bounds::{
    check_any_point_bound, check_invariant_subspace_bound, check_log_sink_bound, check_pair_bound,
    check_pair_bound_refined, check_stationary_point_bound, lipschitz_policy, log_sink_study, pair_config,
    reference_sink, BoundReport, LogSinkStudy, TheoremId,
};
use crate::curve::{AffineSubspace, Curve, RotationResult};
use crate::error::{Error, Result};
use crate::fields::{twist_offset, FieldSpec};
use crate::flow::{integrate_observed, integrate_polar, IntegratorConfig, Observer, PolarState, PolarTrajectory};
use crate::rotation::{rotation_polar, Mode};
use crate::vecops::dist;

/// Shell indices used to calibrate the log-sink constant.
pub const LOG_SINK_KS: [u32; 4] = [1, 2, 3, 4];
/// Inner radius exponent of the shell checked by `thm3_10_log` (`r = R e^{-k}`).
pub const LOG_SINK_CHECK_K: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioName {
    Spiral,
    Sink,
    SinkPair,
    TwistLine,
    TwistPair,
    Flyby,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 6] = [
        ScenarioName::Spiral,
        ScenarioName::Sink,
        ScenarioName::SinkPair,
        ScenarioName::TwistLine,
        ScenarioName::TwistPair,
        ScenarioName::Flyby,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioName::Spiral => "spiral",
            ScenarioName::Sink => "sink",
            ScenarioName::SinkPair => "sink-pair",
            ScenarioName::TwistLine => "twist-line",
            ScenarioName::TwistPair => "twist-pair",
            ScenarioName::Flyby => "flyby",
        }
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioName::ALL.into_iter().find(|n| n.as_str() == s).ok_or_else(|| {
            let names: Vec<&str> = ScenarioName::ALL.iter().map(|n| n.as_str()).collect();
            Error::InvalidInput(format!("unknown scenario '{s}' (expected one of {})", names.join(", ")))
        })
    }
}

/// A field, one or two start points, a time window, an observation point
/// and optionally a subspace to measure rotation around.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: ScenarioName,
    pub field: FieldSpec,
    pub starts: Vec<Vec<f64>>,
    pub t0: f64,
    pub t1: f64,
    pub point: Vec<f64>,
    pub subspace: Option<AffineSubspace>,
}

pub fn x1_axis() -> AffineSubspace {
    AffineSubspace::line(vec![0.0; 3], vec![1.0, 0.0, 0.0]).expect("unit direction")
}

/// Point of the twist field's invariant curve above `x1 = a`.
pub fn twist_start(a: f64) -> Vec<f64> {
    let w = twist_offset(a);
    vec![a, w[0], w[1]]
}

impl Scenario {
    pub fn new(name: ScenarioName) -> Scenario {
        let origin3 = vec![0.0; 3];
        match name {
            ScenarioName::Spiral => Scenario {
                name,
                field: FieldSpec::spiral2d(),
                starts: vec![vec![0.5, 0.0]],
                t0: 0.0,
                t1: 10.0,
                point: vec![0.0, 0.0],
                subspace: Some(AffineSubspace::point(vec![0.0, 0.0])),
            },
            ScenarioName::Sink => Scenario {
                name,
                field: FieldSpec::linear_sink(-1.0, -1.0, 2.0),
                starts: vec![vec![1.0, 1.0, 0.5]],
                t0: 0.0,
                t1: 3.0,
                point: origin3,
                subspace: Some(x1_axis()),
            },
            ScenarioName::SinkPair => Scenario {
                name,
                field: FieldSpec::linear_sink(-1.0, -1.0, 2.0),
                starts: vec![vec![1.0, 1.0, 0.0], vec![1.0, -1.0, 0.0]],
                t0: 0.0,
                t1: 3.0,
                point: origin3,
                subspace: Some(x1_axis()),
            },
            ScenarioName::TwistLine => Scenario {
                name,
                field: FieldSpec::twist3d(),
                starts: vec![twist_start(0.05)],
                t0: 0.0,
                t1: 0.2,
                point: origin3,
                subspace: Some(x1_axis()),
            },
            ScenarioName::TwistPair => {
                let (a, b) = (twist_start(0.05), twist_start(0.05));
                Scenario {
                    name,
                    field: FieldSpec::twist3d(),
                    starts: vec![vec![a[0], a[1] + 0.1, a[2]], vec![b[0], b[1] - 0.05, b[2] + 0.1]],
                    t0: 0.0,
                    t1: 0.2,
                    point: origin3,
                    subspace: Some(x1_axis()),
                }
            }
            ScenarioName::Flyby => Scenario {
                name,
                field: FieldSpec::constant(vec![1.0, 0.0, 0.0]).expect("finite"),
                starts: vec![vec![-0.5, 0.0, 0.0], vec![-0.5, 1.0, 0.0]],
                t0: 0.0,
                t1: 1.0,
                point: vec![0.0, 1e-4, 0.0],
                subspace: Some(AffineSubspace::line(vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0]).expect("unit direction")),
            },
        }
    }

    pub fn window(&self) -> (f64, f64) {
        (self.t0, self.t1)
    }

    /// Integrated trajectories. Single trajectories are refined against the
    /// observation point and subspace; the twist trajectory on the invariant
    /// curve is integrated in cylindrical coordinates about `Ox1`.
    pub fn trajectories(&self) -> Result<Vec<Curve>> {
        if self.name == ScenarioName::TwistLine {
            return Ok(vec![twist_polar(self.starts[0][0], self.starts[0][0] + self.t1 - self.t0)?.to_curve()?]);
        }
        if self.starts.len() == 2 {
            let cfg = pair_config();
            return self
                .starts
                .iter()
                .map(|x0| {
                    integrate_observed(&self.field, x0, self.t0, self.t1, &cfg, &[Observer::Point(self.point.clone())])
                })
                .collect();
        }
        let mut observers = vec![Observer::Point(self.point.clone())];
        if let Some(l) = &self.subspace {
            observers.push(Observer::Subspace(l.clone()));
        }
        let c = integrate_observed(
            &self.field,
            &self.starts[0],
            self.t0,
            self.t1,
            &IntegratorConfig::default(),
            &observers,
        )?;
        Ok(vec![c])
    }
}

/// Twist trajectory on the invariant curve from `x1 = a` to `x1 = b`, in
/// cylindrical coordinates about `Ox1`.
pub fn twist_polar(a: f64, b: f64) -> Result<PolarTrajectory> {
    if !(b > a && a > 0.0) {
        return Err(Error::InvalidInput(format!("need 0 < a < b, got a = {a}, b = {b}")));
    }
    let axis = x1_axis();
    // Direction (0, cos(1/a), sin(1/a)) in the axis' own complement frame;
    // the radius e^{-1/a^2} is set in log space since it may underflow.
    let cb = axis.complement_basis();
    let (s, c) = (1.0 / a).sin_cos();
    let phi = (c * cb[1][1] + s * cb[1][2]).atan2(c * cb[0][1] + s * cb[0][2]);
    let start = PolarState { along: vec![a], ln_rho: -1.0 / (a * a), phi };
    integrate_polar(&FieldSpec::twist3d(), &axis, &start, 0.0, b - a, &IntegratorConfig::default())
}

/// Absolute rotation around `Ox1` of the twist trajectory between `x1 = a` and `x1 = b`.
pub fn twist_rotation(a: f64, b: f64) -> Result<RotationResult> {
    rotation_polar(&twist_polar(a, b)?, Mode::Absolute)
}

pub fn unit_circle_xy(n: usize) -> Curve {
    Curve::from_fn(0.0, TAU, n, true, |t| vec![t.cos(), t.sin(), 0.0]).expect("valid circle")
}

/// Segment `[-m, m]` of the `z`-axis.
pub fn z_axis_segment(m: f64) -> Curve {
    Curve::new(vec![0.0, 1.0], vec![vec![0.0, 0.0, -m], vec![0.0, 0.0, m]], false).expect("valid segment")
}

/// Unit circle in the `xz`-plane centered at `(1, 0, 0)`, linked once with
/// [`unit_circle_xy`]. Sampling starts off the `xy`-plane.
pub fn hopf_partner(n: usize) -> Curve {
    Curve::from_fn(0.1, 0.1 + TAU, n, true, |t| vec![1.0 + t.cos(), 0.0, t.sin()]).expect("valid circle")
}

/// Runs the check for `id` on the scenario.
pub fn verify(s: &Scenario, id: TheoremId, seed: u64) -> Result<BoundReport> {
    let pair_only = |trajs: &[Curve]| -> Result<()> {
        if trajs.len() == 2 {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("{id} needs a pair of trajectories; scenario {} has one", s.name)))
        }
    };
    if id == TheoremId::Thm3_10Log {
        return verify_log_sink(s).map(|(r, _)| r);
    }
    let trajs = s.trajectories()?;
    let w = s.window();
    let k = || {
        let (center, _) = trajs[0].bounding_ball();
        let radius = trajs
            .iter()
            .flat_map(|c| c.points().map(|p| dist(p, &center)).collect::<Vec<_>>())
            .chain([dist(&s.point, &center)])
            .fold(0.0, f64::max);
        lipschitz_policy(&s.field, &center, radius, seed)
    };
    let mut report = match id {
        TheoremId::Prop3_1 => check_stationary_point_bound(&s.field, &s.point, &trajs[0], w, seed)?,
        TheoremId::Prop3_2 => {
            let l = s
                .subspace
                .as_ref()
                .ok_or_else(|| Error::InvalidInput(format!("scenario {} has no subspace", s.name)))?;
            check_invariant_subspace_bound(&s.field, l, &trajs[0], w, seed)?
        }
        TheoremId::Thm3_4 => check_any_point_bound(&trajs[0], &s.point, w, k()?)?,
        TheoremId::Thm3_8 => {
            pair_only(&trajs)?;
            check_pair_bound(&trajs[0], &trajs[1], (w, w), k()?)?
        }
        TheoremId::Thm3_9 | TheoremId::Cor3_10 => {
            pair_only(&trajs)?;
            check_pair_bound_refined(&trajs[0], &trajs[1], (w, w), k()?, id)?
        }
        TheoremId::Thm3_10Log => unreachable!(),
    };
    report.inputs.insert("scenario".into(), json!(s.name.as_str()));
    report.inputs.insert("seed".into(), json!(seed));
    Ok(report)
}

/// Calibrates `C` on the reference sink, then checks the scenario's linear
/// field on the shell `1 >= |x| >= e^{-2}`.
pub fn verify_log_sink(s: &Scenario) -> Result<(BoundReport, LogSinkStudy)> {
    let l = s
        .field
        .matrix()
        .ok_or_else(|| Error::InvalidInput(format!("thm3_10_log needs a linear field; scenario {} has none", s.name)))?
        .clone();
    let (ref_l, ref_pair) = reference_sink();
    let study = log_sink_study(&ref_l, (&ref_pair[0], &ref_pair[1]), 1.0, &LOG_SINK_KS)?;
    let pair = if s.starts.len() == 2 { [s.starts[0].clone(), s.starts[1].clone()] } else { ref_pair };
    let r = (-(LOG_SINK_CHECK_K as f64)).exp();
    let mut report = check_log_sink_bound(&l, (&pair[0], &pair[1]), 1.0, r, study.c)?;
    report.inputs.insert("scenario".into(), json!(s.name.as_str()));
    report.inputs.insert("C_spread".into(), json!(study.spread));
    report.inputs.insert("C_stable".into(), json!(study.stable));
    Ok((report, study))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for n in ScenarioName::ALL {
            assert_eq!(n.as_str().parse::<ScenarioName>().unwrap(), n);
        }
        assert!("vortex".parse::<ScenarioName>().is_err());
    }

    #[test]
    fn twist_table_rows() {
        for (a, expected) in [(0.1, 5.0), (0.05, 15.0), (0.025, 35.0)] {
            let r = twist_rotation(a, 0.2).unwrap();
            assert!((r.value - expected).abs() < 1e-6 * expected, "{a}: {}", r.value);
        }
        assert!(twist_rotation(0.2, 0.2).is_err());
    }

    #[test]
    fn cartesian_twist_samples_keep_their_rotation() {
        // Samples sit ~1e-174 from the axis; squared distances underflow.
        let c = twist_polar(0.05, 0.2).unwrap().to_curve().unwrap();
        let r = crate::rotation::rotation_around_subspace(&c, &x1_axis(), Mode::Absolute).unwrap();
        assert!((r.value - 15.0).abs() < 1e-6, "{}", r.value);
    }

    #[test]
    fn twist_line_is_not_invariant() {
        let s = Scenario::new(ScenarioName::TwistLine);
        assert!(matches!(verify(&s, TheoremId::Prop3_2, 42), Err(Error::NotInvariant(_))));
    }

    #[test]
    fn single_trajectory_scenarios_reject_pair_theorems() {
        let s = Scenario::new(ScenarioName::Sink);
        assert!(matches!(verify(&s, TheoremId::Thm3_8, 42), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn flyby_checks() {
        let s = Scenario::new(ScenarioName::Flyby);
        let r = verify(&s, TheoremId::Thm3_4, 42).unwrap();
        assert!(r.satisfied);
        assert!(r.measured < std::f64::consts::PI);
        assert!(matches!(verify(&s, TheoremId::Prop3_1, 42), Err(Error::NotStationary(_))));
        assert!(verify(&s, TheoremId::Prop3_2, 42).unwrap().satisfied);
        assert!(verify(&s, TheoremId::Thm3_9, 42).unwrap().satisfied);
    }
}
