//! Adaptive integration of trajectories `dx/dt = v(x)`.
//!
//! The stepper is the Dormand–Prince 5(4) pair with FSAL, local
//! extrapolation and an RMS error norm. Accepted steps are optionally
//! subdivided with the cubic Hermite interpolant built from the step's end
//! values and slopes, so that the output polyline follows the trajectory
//! closely and subtends small angles from declared observers.

use serde::Serialize;

use crate::curve::{AffineSubspace, Curve};
use crate::error::{Error, Result};
use crate::fields::FieldSpec;
use crate::vecops::{angle_between, sub};

/// Largest angle an output segment may subtend from an observer.
pub const MAX_OBSERVED_ANGLE: f64 = 0.05;

const MIN_STEP_FRACTION: f64 = 1e-14;
const MAX_SUBDIVISION: usize = 1 << 16;

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Difference between the 5th- and 4th-order weights.
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub max_samples: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { rel_tol: 1e-10, abs_tol: 1e-12, max_step: f64::INFINITY, max_samples: 2_000_000 }
    }
}

impl IntegratorConfig {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        IntegratorConfig { rel_tol, abs_tol, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let in_unit = |x: f64| x > 0.0 && x < 1.0;
        if !in_unit(self.rel_tol) || !in_unit(self.abs_tol) {
            return Err(Error::InvalidInput(format!(
                "tolerances must lie in (0, 1), got rel_tol = {}, abs_tol = {}",
                self.rel_tol, self.abs_tol
            )));
        }
        if !(self.max_step > 0.0) {
            return Err(Error::InvalidInput("max_step must be positive".into()));
        }
        if self.max_samples < 2 {
            return Err(Error::InvalidInput("max_samples must be at least 2".into()));
        }
        Ok(())
    }

    fn scale(&self, a: f64, b: f64) -> f64 {
        self.abs_tol + self.rel_tol * a.abs().max(b.abs())
    }
}

/// A center the output must be refined against.
#[derive(Debug, Clone, PartialEq)]
pub enum Observer {
    Point(Vec<f64>),
    /// Angles are measured in the orthogonal complement of the subspace.
    Subspace(AffineSubspace),
}

impl Observer {
    fn angle(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Observer::Point(p) => angle_between(&sub(a, p), &sub(b, p)),
            Observer::Subspace(l) => angle_between(&l.complement_coords(a), &l.complement_coords(b)),
        }
    }
}

/// Integrates `dy/dt = rhs(y)` and returns `(times, flat states)`.
///
/// `segment_ok(a, b)` may reject an output chord; rejected steps are cut
/// into more Hermite pieces until every piece is accepted.
pub fn integrate_system<F, S>(
    y0: &[f64],
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
    rhs: F,
    segment_ok: S,
) -> Result<(Vec<f64>, Vec<f64>)>
where
    F: Fn(&[f64], &mut [f64]),
    S: Fn(&[f64], &[f64]) -> bool,
{
    cfg.validate()?;
    if !(t1 > t0) {
        return Err(Error::InvalidInput("t1 must exceed t0".into()));
    }
    if y0.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("initial point".into()));
    }
    let n = y0.len();
    let span = t1 - t0;
    let min_step = MIN_STEP_FRACTION * span;

    let mut times = vec![t0];
    let mut states = y0.to_vec();

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    rhs(&y, &mut k[0]);
    check_finite(&k[0], t)?;
    let mut h = initial_step(&y, &k[0], span, cfg, &rhs).min(cfg.max_step);
    let mut ytmp = vec![0.0; n];
    let mut ynew = vec![0.0; n];
    let mut last_rejected = false;

    while t < t1 {
        let mut last = false;
        if t + h >= t1 {
            h = t1 - t;
            last = true;
        }
        for s in 1..7 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += A[s][j] * kj[i];
                }
                ytmp[i] = y[i] + h * acc;
            }
            rhs(&ytmp, &mut k[s]);
            if s == 6 {
                ynew.copy_from_slice(&ytmp);
            }
        }
        let mut err2 = 0.0;
        for i in 0..n {
            let mut e = 0.0;
            for (s, ks) in k.iter().enumerate() {
                e += E[s] * ks[i];
            }
            let r = h * e / cfg.scale(y[i], ynew[i]);
            err2 += r * r;
        }
        let err = (err2 / n as f64).sqrt();
        if !err.is_finite() || ynew.iter().any(|x| !x.is_finite()) {
            h *= 0.2;
            last_rejected = true;
            if h < min_step {
                return Err(Error::NonFinite(format!("state became non-finite near t = {t}")));
            }
            continue;
        }
        if err <= 1.0 {
            let t_new = if last { t1 } else { t + h };
            emit_segment(&y, &k[0], &ynew, &k[6], h, t, t_new, cfg, &segment_ok, &mut times, &mut states)?;
            if times.len() > cfg.max_samples {
                return Err(Error::SampleBudgetExceeded(cfg.max_samples));
            }
            t = t_new;
            y.copy_from_slice(&ynew);
            let fsal = k[6].clone();
            k[0] = fsal;
            let mut factor = if err == 0.0 { 5.0 } else { 0.9 * err.powf(-0.2) };
            factor = factor.clamp(0.2, 5.0);
            if last_rejected {
                factor = factor.min(1.0);
            }
            last_rejected = false;
            h = (h * factor).min(cfg.max_step);
        } else {
            let factor = (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
            h *= factor;
            last_rejected = true;
        }
        if t < t1 && h < min_step {
            return Err(Error::StepUnderflow { t, step: h, min_step });
        }
    }
    Ok((times, states))
}

fn check_finite(v: &[f64], t: f64) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(format!("field value at t = {t}")))
    }
}

fn initial_step<F: Fn(&[f64], &mut [f64])>(y: &[f64], f0: &[f64], span: f64, cfg: &IntegratorConfig, rhs: &F) -> f64 {
    let n = y.len() as f64;
    let rms = |v: &[f64]| -> f64 {
        (v.iter().zip(y).map(|(a, yi)| (a / cfg.scale(*yi, *yi)).powi(2)).sum::<f64>() / n).sqrt()
    };
    let d0 = rms(y);
    let d1 = rms(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 * span } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span);
    let y1: Vec<f64> = y.iter().zip(f0).map(|(a, b)| a + h0 * b).collect();
    let mut f1 = vec![0.0; y.len()];
    rhs(&y1, &mut f1);
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = rms(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6 * span) } else { (0.01 / d1.max(d2)).powf(0.2) };
    (100.0 * h0).min(h1).min(span).max(MIN_STEP_FRACTION * span * 10.0)
}

fn hermite(y0: &[f64], f0: &[f64], y1: &[f64], f1: &[f64], h: f64, s: f64, out: &mut [f64]) {
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    for i in 0..y0.len() {
        out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
    }
}

#[allow(clippy::too_many_arguments)]
fn emit_segment<S: Fn(&[f64], &[f64]) -> bool>(
    y0: &[f64],
    f0: &[f64],
    y1: &[f64],
    f1: &[f64],
    h: f64,
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
    segment_ok: &S,
    times: &mut Vec<f64>,
    states: &mut Vec<f64>,
) -> Result<()> {
    // Chord deviation of the Hermite cubic at its midpoint is h/8 |f0 - f1|
    // per component; m pieces reduce it by m^2.
    let mut ratio: f64 = 0.0;
    for i in 0..y0.len() {
        let dev = h / 8.0 * (f0[i] - f1[i]).abs();
        ratio = ratio.max(dev / cfg.scale(y0[i], y1[i]));
    }
    let mut m = if ratio > 1.0 { ratio.sqrt().ceil() as usize } else { 1 };
    m = m.clamp(1, MAX_SUBDIVISION);
    let n = y0.len();
    let mut pts: Vec<f64> = Vec::new();
    loop {
        pts.clear();
        pts.extend_from_slice(y0);
        let mut buf = vec![0.0; n];
        for j in 1..m {
            hermite(y0, f0, y1, f1, h, j as f64 / m as f64, &mut buf);
            pts.extend_from_slice(&buf);
        }
        pts.extend_from_slice(y1);
        let ok = (0..m).all(|j| segment_ok(&pts[j * n..(j + 1) * n], &pts[(j + 1) * n..(j + 2) * n]));
        if ok || m >= MAX_SUBDIVISION {
            break;
        }
        m = (m * 2).min(MAX_SUBDIVISION);
    }
    if times.len() + m > cfg.max_samples {
        return Err(Error::SampleBudgetExceeded(cfg.max_samples));
    }
    for j in 1..=m {
        let tj = if j == m { t1 } else { t0 + (t1 - t0) * j as f64 / m as f64 };
        times.push(tj);
        states.extend_from_slice(&pts[j * n..(j + 1) * n]);
    }
    Ok(())
}

/// Trajectory of `f` from `x0` over `[t0, t1]`.
pub fn integrate_trajectory(f: &FieldSpec, x0: &[f64], t0: f64, t1: f64, cfg: &IntegratorConfig) -> Result<Curve> {
    integrate_observed(f, x0, t0, t1, cfg, &[])
}

/// As [`integrate_trajectory`], with output segments subtending at most
/// [`MAX_OBSERVED_ANGLE`] from each observer.
pub fn integrate_observed(
    f: &FieldSpec,
    x0: &[f64],
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
    observers: &[Observer],
) -> Result<Curve> {
    if x0.len() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), found: x0.len() });
    }
    let (times, states) = integrate_system(
        x0,
        t0,
        t1,
        cfg,
        |y, out| f.eval_into(y, out),
        |a, b| observers.iter().all(|o| !(o.angle(a, b) > MAX_OBSERVED_ANGLE)),
    )?;
    Curve::from_flat(f.dim(), times, states, false)
}

/// Point in cylindrical coordinates about a codimension-2 subspace:
/// `x = base + B along + e^{ln_rho} (cos(phi) u + sin(phi) w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarState {
    pub along: Vec<f64>,
    pub ln_rho: f64,
    pub phi: f64,
}

impl PolarState {
    pub fn from_point(axis: &AffineSubspace, x: &[f64]) -> Result<Self> {
        if axis.codim() != 2 {
            return Err(Error::CodimensionError(axis.codim()));
        }
        let p = axis.complement_coords(x);
        let rho = p[0].hypot(p[1]);
        if rho == 0.0 {
            return Err(Error::DistanceTooSmall { distance: 0.0, guard: 0.0 });
        }
        Ok(PolarState { along: axis.along_coords(x), ln_rho: rho.ln(), phi: p[1].atan2(p[0]) })
    }
}

/// Trajectory sampled in cylindrical coordinates about an axis; the polar
/// angle is continuous (unwrapped).
#[derive(Debug, Clone, PartialEq)]
pub struct PolarTrajectory {
    pub axis: AffineSubspace,
    pub times: Vec<f64>,
    pub states: Vec<PolarState>,
}

impl PolarTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn phis(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.phi).collect()
    }

    /// Cartesian samples. Radii below the smallest positive `f64` collapse
    /// onto the axis.
    pub fn to_curve(&self) -> Result<Curve> {
        let pts = self
            .states
            .iter()
            .map(|s| {
                let r = s.ln_rho.exp();
                self.axis.compose(&s.along, &[r * s.phi.cos(), r * s.phi.sin()])
            })
            .collect();
        Curve::new(self.times.clone(), pts, false)
    }

    /// Samples with even index plus the last one.
    pub fn every_other(&self) -> PolarTrajectory {
        let n = self.len();
        let keep: Vec<usize> = (0..n).filter(|i| i % 2 == 0 || *i == n - 1).collect();
        PolarTrajectory {
            axis: self.axis.clone(),
            times: keep.iter().map(|&i| self.times[i]).collect(),
            states: keep.iter().map(|&i| self.states[i].clone()).collect(),
        }
    }
}

/// Integrates in cylindrical coordinates `(along, ln rho, phi)` about a
/// codimension-2 axis, keeping full relative precision for trajectories
/// whose distance to the axis falls below the `f64` range. Output segments
/// change `phi` by at most [`MAX_OBSERVED_ANGLE`].
pub fn integrate_polar(
    f: &FieldSpec,
    axis: &AffineSubspace,
    start: &PolarState,
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
) -> Result<PolarTrajectory> {
    if axis.codim() != 2 {
        return Err(Error::CodimensionError(axis.codim()));
    }
    if axis.ambient_dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), found: axis.ambient_dim() });
    }
    let k = axis.dim();
    let mut y0 = start.along.clone();
    y0.push(start.ln_rho);
    y0.push(start.phi);
    let (times, states) = integrate_system(
        &y0,
        t0,
        t1,
        cfg,
        |y, out| {
            let (a, dr, dphi) = f.polar_rates(axis, &y[..k], y[k], y[k + 1]);
            out[..k].copy_from_slice(&a);
            out[k] = dr;
            out[k + 1] = dphi;
        },
        |a, b| !((a[k + 1] - b[k + 1]).abs() > MAX_OBSERVED_ANGLE),
    )?;
    let states =
        states.chunks(k + 2).map(|s| PolarState { along: s[..k].to_vec(), ln_rho: s[k], phi: s[k + 1] }).collect();
    Ok(PolarTrajectory { axis: axis.clone(), times, states })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vecops::{dist, norm};
    use nalgebra::DMatrix;

    fn sink() -> FieldSpec {
        FieldSpec::linear_sink(-1.0, -1.0, 2.0)
    }

    fn sink_exact(t: f64) -> [f64; 3] {
        // from (1, 1, 0): x2 = e^{-t} (cos 2t + 0 sin), x3 = e^{-t} (-sin 2t)
        let e = (-t).exp();
        [e, e * (2.0 * t).cos(), -e * (2.0 * t).sin()]
    }

    #[test]
    fn constant_field_moves_in_a_straight_line() {
        let f = FieldSpec::constant(vec![1.0, 0.0, 0.0]).unwrap();
        let c = integrate_trajectory(&f, &[0.0; 3], 0.0, 1.0, &IntegratorConfig::default()).unwrap();
        assert!(dist(c.last(), &[1.0, 0.0, 0.0]) < 1e-12);
        assert_eq!(c.end_time(), 1.0);
    }

    #[test]
    fn sink_matches_closed_form() {
        let c = integrate_trajectory(&sink(), &[1.0, 1.0, 0.0], 0.0, 3.0, &IntegratorConfig::default()).unwrap();
        assert!(dist(c.last(), &sink_exact(3.0)) < 1e-8);
        for (t, p) in c.times().iter().zip(c.points()) {
            assert!(dist(p, &sink_exact(*t)) < 1e-8);
        }
    }

    #[test]
    fn spiral_radius_decreases() {
        let c =
            integrate_trajectory(&FieldSpec::spiral2d(), &[0.5, 0.0], 0.0, 10.0, &IntegratorConfig::default()).unwrap();
        let r: Vec<f64> = c.points().map(norm).collect();
        assert!(r.windows(2).all(|w| w[1] < w[0]));
        assert!(*r.last().unwrap() > 0.0);
        let f = FieldSpec::spiral2d();
        for p in c.points() {
            let v = f.eval(p);
            assert!(2.0 * crate::vecops::dot(p, &v) < 0.0);
        }
    }

    #[test]
    fn halving_tolerances_is_consistent() {
        let coarse = IntegratorConfig::with_tolerances(1e-6, 1e-8);
        let fine = IntegratorConfig::with_tolerances(5e-7, 5e-9);
        let a = integrate_trajectory(&sink(), &[1.0, 1.0, 0.0], 0.0, 3.0, &coarse).unwrap();
        let b = integrate_trajectory(&sink(), &[1.0, 1.0, 0.0], 0.0, 3.0, &fine).unwrap();
        let exact = sink_exact(3.0);
        let coarse_err = dist(a.last(), &exact);
        assert!(dist(a.last(), b.last()) < 10.0 * coarse_err.max(coarse.abs_tol));
    }

    #[test]
    fn time_reversal_returns_home() {
        let f = FieldSpec::spiral2d();
        let cfg = IntegratorConfig::default();
        let x0 = [0.5, 0.2];
        let fwd = integrate_trajectory(&f, &x0, 0.0, 2.0, &cfg).unwrap();
        let (_, states) = integrate_system(
            fwd.last(),
            0.0,
            2.0,
            &cfg,
            |y, out| {
                f.eval_into(y, out);
                out.iter_mut().for_each(|v| *v = -*v);
            },
            |_, _| true,
        )
        .unwrap();
        let back = &states[states.len() - 2..];
        assert!(dist(back, &x0) < 100.0 * cfg.abs_tol);
    }

    #[test]
    fn observers_limit_subtended_angle() {
        let f = FieldSpec::linear(DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0])).unwrap();
        let obs = [Observer::Point(vec![0.0, 0.0])];
        let cfg = IntegratorConfig::with_tolerances(1e-3, 1e-3);
        let c = integrate_observed(&f, &[1.0, 0.0], 0.0, 6.0, &cfg, &obs).unwrap();
        let pts: Vec<&[f64]> = c.points().collect();
        for w in pts.windows(2) {
            assert!(angle_between(w[0], w[1]) <= MAX_OBSERVED_ANGLE + 1e-12);
        }
    }

    #[test]
    fn rejects_reversed_window_and_bad_tolerances() {
        let f = FieldSpec::spiral2d();
        let e = integrate_trajectory(&f, &[0.5, 0.0], 1.0, 0.0, &IntegratorConfig::default()).unwrap_err();
        assert!(e.to_string().contains("t1 must exceed t0"));
        let bad = IntegratorConfig::with_tolerances(2.0, 1e-9);
        assert!(integrate_trajectory(&f, &[0.5, 0.0], 0.0, 1.0, &bad).is_err());
    }

    #[test]
    fn blow_up_reports_underflow() {
        // dx/dt = x^2 from 1 blows up at t = 1.
        let e =
            integrate_system(&[1.0], 0.0, 2.0, &IntegratorConfig::default(), |y, o| o[0] = y[0] * y[0], |_, _| true)
                .unwrap_err();
        assert!(matches!(e, Error::StepUnderflow { .. } | Error::NonFinite(_)), "{e}");
    }

    #[test]
    fn sample_budget_is_enforced() {
        let cfg = IntegratorConfig { max_samples: 10, ..Default::default() };
        let e = integrate_trajectory(&FieldSpec::spiral2d(), &[0.5, 0.0], 0.0, 10.0, &cfg).unwrap_err();
        assert_eq!(e, Error::SampleBudgetExceeded(10));
    }

    #[test]
    fn polar_route_matches_cartesian_on_sink() {
        let axis = AffineSubspace::line(vec![0.0; 3], vec![1.0, 0.0, 0.0]).unwrap();
        let start = PolarState::from_point(&axis, &[1.0, 1.0, 0.0]).unwrap();
        let p = integrate_polar(&sink(), &axis, &start, 0.0, 3.0, &IntegratorConfig::default()).unwrap();
        let c = p.to_curve().unwrap();
        assert!(dist(c.last(), &sink_exact(3.0)) < 1e-8);
        let phis = p.phis();
        assert!(((phis[phis.len() - 1] - phis[0]).abs() - 6.0).abs() < 1e-8);
    }
}
