//! Measured rotation versus the upper bounds for trajectories of Lipschitz
//! fields. Every check returns a [`BoundReport`].

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::curve::{AffineSubspace, Curve};
use crate::error::{Error, Result};
use crate::fields::{estimate_lipschitz, max_eigen_real_part, operator_norm, FieldSpec, LipschitzMethod};
use crate::flow::{integrate_observed, IntegratorConfig, Observer};
use crate::gauss::gauss_rotation_pair;
use crate::rotation::{absolute_rotation_point, rotation_around_subspace, Mode};
use crate::sampling;
use crate::vecops::{dist, norm};

pub const STATIONARY_TOL: f64 = 1e-10;
pub const INVARIANCE_TOL: f64 = 1e-8;
pub const INVARIANCE_SAMPLES: usize = 100;
/// Multiplier applied to sampled Lipschitz estimates.
pub const SAMPLED_SAFETY: f64 = 1.1;
pub const LIPSCHITZ_PAIRS: usize = 20_000;
/// Points of the opposite trajectory at which the refined pair bound
/// evaluates rotation around a point.
pub const REFINED_GRID: usize = 64;
/// Largest allowed ratio of implied log-sink constants across shells.
pub const LOG_SINK_STABILITY: f64 = 3.0;

/// Integrator settings for trajectories fed to the Gauss integral. Output
/// density follows the chord tolerance and the double sum is quadratic in
/// the sample count, so this is looser than the default.
pub fn pair_config() -> IntegratorConfig {
    IntegratorConfig::with_tolerances(1e-6, 1e-6)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum TheoremId {
    #[serde(rename = "prop3_1")]
    Prop3_1,
    #[serde(rename = "prop3_2")]
    Prop3_2,
    #[serde(rename = "thm3_4")]
    Thm3_4,
    #[serde(rename = "thm3_8")]
    Thm3_8,
    #[serde(rename = "thm3_9")]
    Thm3_9,
    #[serde(rename = "cor3_10")]
    Cor3_10,
    #[serde(rename = "thm3_10_log")]
    Thm3_10Log,
}

impl TheoremId {
    pub const ALL: [TheoremId; 7] = [
        TheoremId::Prop3_1,
        TheoremId::Prop3_2,
        TheoremId::Thm3_4,
        TheoremId::Thm3_8,
        TheoremId::Thm3_9,
        TheoremId::Cor3_10,
        TheoremId::Thm3_10Log,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::Prop3_1 => "prop3_1",
            TheoremId::Prop3_2 => "prop3_2",
            TheoremId::Thm3_4 => "thm3_4",
            TheoremId::Thm3_8 => "thm3_8",
            TheoremId::Thm3_9 => "thm3_9",
            TheoremId::Cor3_10 => "cor3_10",
            TheoremId::Thm3_10Log => "thm3_10_log",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown theorem id '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub theorem_id: TheoremId,
    pub measured: f64,
    pub bound: f64,
    pub margin: f64,
    pub satisfied: bool,
    pub inputs: BTreeMap<String, Value>,
    pub error_estimates: BTreeMap<String, f64>,
}

impl BoundReport {
    fn new(
        theorem_id: TheoremId,
        measured: f64,
        bound: f64,
        inputs: BTreeMap<String, Value>,
        error_estimates: BTreeMap<String, f64>,
    ) -> Self {
        let slack: f64 = error_estimates.values().sum();
        BoundReport {
            theorem_id,
            measured,
            bound,
            margin: bound - measured,
            satisfied: measured <= bound + slack,
            inputs,
            error_estimates,
        }
    }

    pub fn combined_error(&self) -> f64 {
        self.error_estimates.values().sum()
    }
}

/// Lipschitz constant used by a check: analytic when the field is affine,
/// otherwise `SAMPLED_SAFETY` times the sampled estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KChoice {
    pub k: f64,
    pub safety: f64,
    pub method: LipschitzMethod,
}

impl KChoice {
    pub fn given(k: f64) -> Result<Self> {
        if !(k >= 0.0 && k.is_finite()) {
            return Err(Error::InvalidInput(format!("Lipschitz constant must be finite and non-negative, got {k}")));
        }
        Ok(KChoice { k, safety: 1.0, method: LipschitzMethod::Analytic })
    }

    fn record(&self, inputs: &mut BTreeMap<String, Value>) {
        inputs.insert("K".into(), json!(self.k));
        inputs.insert("safety_factor".into(), json!(self.safety));
        let method = match self.method {
            LipschitzMethod::Analytic => "analytic",
            LipschitzMethod::Sampled => "sampled",
        };
        inputs.insert("K_method".into(), json!(method));
    }
}

pub fn lipschitz_policy(f: &FieldSpec, center: &[f64], radius: f64, seed: u64) -> Result<KChoice> {
    let est = estimate_lipschitz(f, center, radius.max(1e-12), LIPSCHITZ_PAIRS, seed)?;
    Ok(match est.method {
        LipschitzMethod::Analytic => KChoice { k: est.k, safety: 1.0, method: est.method },
        LipschitzMethod::Sampled => KChoice { k: SAMPLED_SAFETY * est.k, safety: SAMPLED_SAFETY, method: est.method },
    })
}

/// Ball around the curve's bounding-ball center containing the curve and `extra`.
fn covering_ball<'a>(c: &Curve, extra: impl IntoIterator<Item = &'a [f64]>) -> (Vec<f64>, f64) {
    let (center, mut r) = c.bounding_ball();
    for p in extra {
        r = r.max(dist(&center, p));
    }
    (center, r)
}

fn windowed(c: &Curve, window: (f64, f64)) -> Result<Curve> {
    let (ta, tb) = window;
    if !(tb > ta) {
        return Err(Error::InvalidInput("t1 must exceed t0".into()));
    }
    if ta < c.start_time() || tb > c.end_time() {
        return Err(Error::InvalidInput(format!(
            "window [{ta}, {tb}] is not inside the trajectory's time span [{}, {}]",
            c.start_time(),
            c.end_time()
        )));
    }
    if ta == c.start_time() && tb == c.end_time() {
        Ok(c.clone())
    } else {
        c.window(ta, tb)
    }
}

/// Rotation around a stationary point `x0` is at most `K T`.
pub fn check_stationary_point_bound(
    f: &FieldSpec,
    x0: &[f64],
    traj: &Curve,
    window: (f64, f64),
    seed: u64,
) -> Result<BoundReport> {
    if x0.len() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), found: x0.len() });
    }
    let speed = norm(&f.eval(x0));
    if !(speed < STATIONARY_TOL) {
        return Err(Error::NotStationary(speed));
    }
    let c = windowed(traj, window)?;
    let (center, radius) = covering_ball(&c, [x0]);
    let k = lipschitz_policy(f, &center, radius, seed)?;
    let t = window.1 - window.0;
    let measured = if c.points().all(|p| p == c.first()) && c.first() != x0 {
        crate::curve::RotationResult::new(0.0, 0.0, crate::curve::Convention::AbsoluteRadians)
    } else {
        absolute_rotation_point(&c, x0)?
    };
    let mut inputs = BTreeMap::new();
    k.record(&mut inputs);
    inputs.insert("T".into(), json!(t));
    inputs.insert("x0".into(), json!(x0));
    inputs.insert("region_radius".into(), json!(radius));
    let errs = BTreeMap::from([("measured".to_string(), measured.error_estimate)]);
    Ok(BoundReport::new(TheoremId::Prop3_1, measured.value, k.k * t, inputs, errs))
}

/// Points of `l` near the region of interest used to test invariance.
fn invariance_samples(l: &AffineSubspace, center: &[f64], radius: f64, seed: u64) -> Vec<Vec<f64>> {
    let foot = l.nearest_point(center);
    let d = l.dim();
    if d == 0 {
        return vec![foot];
    }
    let along0 = l.along_coords(&foot);
    let zero_perp = vec![0.0; l.codim()];
    if d == 1 {
        return (0..INVARIANCE_SAMPLES)
            .map(|i| {
                let s = -radius + 2.0 * radius * i as f64 / (INVARIANCE_SAMPLES - 1) as f64;
                l.compose(&[along0[0] + s], &zero_perp)
            })
            .collect();
    }
    let mut rng = sampling::rng(seed);
    (0..INVARIANCE_SAMPLES)
        .map(|_| {
            let a = sampling::point_in_ball(&mut rng, &along0, radius);
            l.compose(&a, &zero_perp)
        })
        .collect()
}

/// Rotation around an invariant affine subspace is at most `K T`.
pub fn check_invariant_subspace_bound(
    f: &FieldSpec,
    l: &AffineSubspace,
    traj: &Curve,
    window: (f64, f64),
    seed: u64,
) -> Result<BoundReport> {
    if l.ambient_dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), found: l.ambient_dim() });
    }
    let c = windowed(traj, window)?;
    let feet: Vec<Vec<f64>> = c.points().map(|p| l.nearest_point(p)).collect();
    let (center, radius) = covering_ball(&c, feet.iter().map(|p| p.as_slice()));
    let worst = invariance_samples(l, &center, radius, seed)
        .iter()
        .map(|p| norm(&l.normal_component(&f.eval(p))))
        .fold(0.0, f64::max);
    if !(worst < INVARIANCE_TOL) {
        return Err(Error::NotInvariant(worst));
    }
    let k = lipschitz_policy(f, &center, radius, seed)?;
    let t = window.1 - window.0;
    let measured = rotation_around_subspace(&c, l, Mode::Absolute)?;
    let mut inputs = BTreeMap::new();
    k.record(&mut inputs);
    inputs.insert("T".into(), json!(t));
    inputs.insert("subspace_dim".into(), json!(l.dim()));
    inputs.insert("max_normal_component".into(), json!(worst));
    let errs = BTreeMap::from([("measured".to_string(), measured.error_estimate)]);
    Ok(BoundReport::new(TheoremId::Prop3_2, measured.value, k.k * t, inputs, errs))
}

/// Bound on rotation around an arbitrary point over time `t`.
pub fn any_point_bound(k: f64, t: f64) -> f64 {
    4.0 + k * t
}

/// Rotation around any point is at most `4 + K T`.
pub fn check_any_point_bound(traj: &Curve, x0: &[f64], window: (f64, f64), k: KChoice) -> Result<BoundReport> {
    let c = windowed(traj, window)?;
    let t = window.1 - window.0;
    let measured = absolute_rotation_point(&c, x0)?;
    let mut inputs = BTreeMap::new();
    k.record(&mut inputs);
    inputs.insert("T".into(), json!(t));
    inputs.insert("x0".into(), json!(x0));
    let errs = BTreeMap::from([("measured".to_string(), measured.error_estimate)]);
    Ok(BoundReport::new(TheoremId::Thm3_4, measured.value, any_point_bound(k.k, t), inputs, errs))
}

/// `(K/pi) min(T1, T2) + K^2 T1 T2 / (4 pi)`.
pub fn pair_bound(k: f64, t1: f64, t2: f64) -> f64 {
    k / PI * t1.min(t2) + k * k * t1 * t2 / (4.0 * PI)
}

/// `(K / 4 pi) min(R1 T2, R2 T1)`.
pub fn refined_pair_bound(k: f64, r1: f64, r2: f64, t1: f64, t2: f64) -> f64 {
    k / (4.0 * PI) * (r1 * t2).min(r2 * t1)
}

fn pair_inputs(k: KChoice, t1: f64, t2: f64) -> BTreeMap<String, Value> {
    let mut inputs = BTreeMap::new();
    k.record(&mut inputs);
    inputs.insert("T1".into(), json!(t1));
    inputs.insert("T2".into(), json!(t2));
    inputs
}

/// Mutual absolute rotation (Gauss turns) is at most [`pair_bound`].
pub fn check_pair_bound(
    traj1: &Curve,
    traj2: &Curve,
    windows: ((f64, f64), (f64, f64)),
    k: KChoice,
) -> Result<BoundReport> {
    let (w1, w2) = windows;
    let (c1, c2) = (windowed(traj1, w1)?, windowed(traj2, w2)?);
    let (t1, t2) = (w1.1 - w1.0, w2.1 - w2.0);
    let measured = gauss_rotation_pair(&c1, &c2, Mode::Absolute)?;
    let errs = BTreeMap::from([("measured".to_string(), measured.error_estimate)]);
    Ok(BoundReport::new(TheoremId::Thm3_8, measured.value, pair_bound(k.k, t1, t2), pair_inputs(k, t1, t2), errs))
}

/// Largest absolute rotation of `c` around points of `other`, sampled at
/// [`REFINED_GRID`] evenly spaced times. Points too close to `c` count as
/// `fallback`. Returns `(value, error estimate, fallback count)`.
fn max_rotation_over(c: &Curve, other: &Curve, fallback: f64) -> Result<(f64, f64, usize)> {
    let (ta, tb) = (other.start_time(), other.end_time());
    let grid: Vec<Vec<f64>> =
        (0..REFINED_GRID).map(|i| other.point_at(ta + (tb - ta) * i as f64 / (REFINED_GRID - 1) as f64)).collect();
    let vals: Vec<Result<(f64, f64, bool)>> = grid
        .par_iter()
        .map(|p| match absolute_rotation_point(c, p) {
            Ok(r) => Ok((r.value, r.error_estimate, false)),
            Err(Error::DistanceTooSmall { .. }) => Ok((fallback, 0.0, true)),
            Err(e) => Err(e),
        })
        .collect();
    let mut best = (f64::NEG_INFINITY, 0.0, 0usize);
    for v in vals {
        let (value, err, fell_back) = v?;
        if fell_back {
            best.2 += 1;
        }
        if value > best.0 {
            best.0 = value;
            best.1 = err;
        }
    }
    Ok(best)
}

/// Refined pair bound via `R1`, `R2`; `id` selects the refined theorem or
/// its corollary (same inequality, reported under either name).
pub fn check_pair_bound_refined(
    traj1: &Curve,
    traj2: &Curve,
    windows: ((f64, f64), (f64, f64)),
    k: KChoice,
    id: TheoremId,
) -> Result<BoundReport> {
    if !matches!(id, TheoremId::Thm3_9 | TheoremId::Cor3_10) {
        return Err(Error::InvalidInput(format!("{id} is not a refined pair bound")));
    }
    let (w1, w2) = windows;
    let (c1, c2) = (windowed(traj1, w1)?, windowed(traj2, w2)?);
    let (t1, t2) = (w1.1 - w1.0, w2.1 - w2.0);
    let measured = gauss_rotation_pair(&c1, &c2, Mode::Absolute)?;
    let (r1, r1_err, f1) = max_rotation_over(&c1, &c2, any_point_bound(k.k, t1))?;
    let (r2, r2_err, f2) = max_rotation_over(&c2, &c1, any_point_bound(k.k, t2))?;
    let bound1 = k.k / (4.0 * PI) * r1 * t2;
    let bound2 = k.k / (4.0 * PI) * r2 * t1;
    let bound = refined_pair_bound(k.k, r1, r2, t1, t2);
    let mut inputs = pair_inputs(k, t1, t2);
    inputs.insert("R1".into(), json!(r1));
    inputs.insert("R2".into(), json!(r2));
    inputs.insert("R1_fallbacks".into(), json!(f1));
    inputs.insert("R2_fallbacks".into(), json!(f2));
    inputs.insert("bound_R1".into(), json!(bound1));
    inputs.insert("bound_R2".into(), json!(bound2));
    inputs.insert("coarse_bound".into(), json!(pair_bound(k.k, t1, t2)));
    let bound_err = if bound1 <= bound2 { k.k / (4.0 * PI) * r1_err * t2 } else { k.k / (4.0 * PI) * r2_err * t1 };
    let errs = BTreeMap::from([("measured".to_string(), measured.error_estimate), ("bound".to_string(), bound_err)]);
    Ok(BoundReport::new(id, measured.value, bound, inputs, errs))
}

/// Both trajectories restricted to the shell `r <= |x| <= R`.
#[derive(Debug, Clone)]
pub struct ShellArcs {
    pub arcs: [Curve; 2],
    pub durations: [f64; 2],
}

/// First time the polyline's norm crosses `level` going down, by linear
/// interpolation of the norm; `None` if it never does.
fn first_crossing_below(c: &Curve, level: f64) -> Option<f64> {
    let norms: Vec<f64> = c.points().map(norm).collect();
    if norms[0] <= level {
        return Some(c.start_time());
    }
    let t = c.times();
    norms.windows(2).enumerate().find(|(_, w)| w[1] <= level).map(|(i, w)| {
        let s = (w[0] - level) / (w[0] - w[1]);
        t[i] + s * (t[i + 1] - t[i])
    })
}

/// Integrates `x0` under `x' = L x` until it is inside radius `r`.
fn sink_trajectory(f: &FieldSpec, x0: &[f64], r: f64, ell: f64, cfg: &IntegratorConfig) -> Result<Curve> {
    let origin = vec![0.0; x0.len()];
    let r0 = norm(x0);
    let mut horizon = 2.0 * (r0 / r).ln().max(1.0) / ell.abs() + 1.0;
    for _ in 0..20 {
        let c = integrate_observed(f, x0, 0.0, horizon, cfg, &[Observer::Point(origin.clone())])?;
        if norm(c.last()) < r {
            return Ok(c);
        }
        horizon *= 2.0;
    }
    Err(Error::InvalidInput("trajectory does not enter the inner sphere".into()))
}

pub fn shell_arcs(l: &DMatrix<f64>, x0_pair: (&[f64], &[f64]), big_r: f64, r: f64) -> Result<ShellArcs> {
    if !(big_r > r && r > 0.0) {
        return Err(Error::InvalidInput(format!("need R > r > 0, got R = {big_r}, r = {r}")));
    }
    let ell = max_eigen_real_part(l);
    if !(ell < 0.0) {
        return Err(Error::EigenvalueSignError(ell));
    }
    let f = FieldSpec::linear(l.clone())?;
    let cfg = IntegratorConfig::with_tolerances(1e-6, 1e-6 * r);
    let mut arcs = Vec::with_capacity(2);
    let mut durations = [0.0; 2];
    for (i, x0) in [x0_pair.0, x0_pair.1].into_iter().enumerate() {
        if x0.len() != f.dim() {
            return Err(Error::DimensionMismatch { expected: f.dim(), found: x0.len() });
        }
        let c = sink_trajectory(&f, x0, r, ell, &cfg)?;
        let enter = first_crossing_below(&c, big_r).expect("trajectory reaches the inner sphere");
        let exit = first_crossing_below(&c, r).expect("trajectory reaches the inner sphere");
        if !(exit > enter) {
            return Err(Error::InvalidInput("trajectory starts inside the inner sphere".into()));
        }
        durations[i] = exit - enter;
        arcs.push(c.window(enter, exit)?);
    }
    let arcs: [Curve; 2] = arcs.try_into().expect("two arcs");
    Ok(ShellArcs { arcs, durations })
}

/// Mutual absolute rotation of a sink pair inside the shell, against
/// `C ||L|| log^2(R/r) / |ell|` for a given constant `c`.
pub fn check_log_sink_bound(
    l: &DMatrix<f64>,
    x0_pair: (&[f64], &[f64]),
    big_r: f64,
    r: f64,
    c: f64,
) -> Result<BoundReport> {
    let shell = shell_arcs(l, x0_pair, big_r, r)?;
    let ell = max_eigen_real_part(l);
    let norm_l = operator_norm(l);
    let log2 = (big_r / r).ln().powi(2);
    let measured = gauss_rotation_pair(&shell.arcs[0], &shell.arcs[1], Mode::Absolute)?;
    let scale = norm_l * log2 / ell.abs();
    let mut inputs = BTreeMap::new();
    inputs.insert("R".into(), json!(big_r));
    inputs.insert("r".into(), json!(r));
    inputs.insert("ell".into(), json!(ell));
    inputs.insert("norm_L".into(), json!(norm_l));
    inputs.insert("C".into(), json!(c));
    inputs.insert("implied_C".into(), json!(measured.value / scale));
    inputs.insert("T1".into(), json!(shell.durations[0]));
    inputs.insert("T2".into(), json!(shell.durations[1]));
    let errs = BTreeMap::from([("measured".to_string(), measured.error_estimate)]);
    Ok(BoundReport::new(TheoremId::Thm3_10Log, measured.value, c * scale, inputs, errs))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogSinkRow {
    pub k: u32,
    pub r: f64,
    pub measured: f64,
    pub error_estimate: f64,
    pub implied_c: f64,
}

/// Growth of the shell rotation for `r = R e^{-k}`, with the fit
/// `measured ~ a k^2 + b k` and the spread of the implied constants.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogSinkStudy {
    pub rows: Vec<LogSinkRow>,
    pub fit_a: f64,
    pub fit_b: f64,
    pub fit_residual: f64,
    /// Largest implied constant; use as `C` for later checks.
    pub c: f64,
    /// max / min of the implied constants.
    pub spread: f64,
    pub stable: bool,
}

pub fn log_sink_study(l: &DMatrix<f64>, x0_pair: (&[f64], &[f64]), big_r: f64, ks: &[u32]) -> Result<LogSinkStudy> {
    if ks.len() < 2 || ks.contains(&0) {
        return Err(Error::InvalidInput("need at least two positive shell indices".into()));
    }
    let ell = max_eigen_real_part(l);
    if !(ell < 0.0) {
        return Err(Error::EigenvalueSignError(ell));
    }
    let norm_l = operator_norm(l);
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let r = big_r * (-(k as f64)).exp();
        let shell = shell_arcs(l, x0_pair, big_r, r)?;
        let m = gauss_rotation_pair(&shell.arcs[0], &shell.arcs[1], Mode::Absolute)?;
        let kf = k as f64;
        rows.push(LogSinkRow {
            k,
            r,
            measured: m.value,
            error_estimate: m.error_estimate,
            implied_c: m.value * ell.abs() / (norm_l * kf * kf),
        });
    }
    // Least squares for a k^2 + b k.
    let (mut s4, mut s3, mut s2, mut y2, mut y1) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for row in &rows {
        let k = row.k as f64;
        s4 += k.powi(4);
        s3 += k.powi(3);
        s2 += k * k;
        y2 += row.measured * k * k;
        y1 += row.measured * k;
    }
    let det = s4 * s2 - s3 * s3;
    let fit_a = (y2 * s2 - y1 * s3) / det;
    let fit_b = (s4 * y1 - s3 * y2) / det;
    let fit_residual = rows
        .iter()
        .map(|row| {
            let k = row.k as f64;
            (row.measured - fit_a * k * k - fit_b * k).powi(2)
        })
        .sum::<f64>()
        .sqrt();
    let cs: Vec<f64> = rows.iter().map(|r| r.implied_c).collect();
    let c = cs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = cs.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = if min > 0.0 { c / min } else { f64::INFINITY };
    Ok(LogSinkStudy { rows, fit_a, fit_b, fit_residual, c, spread, stable: spread <= LOG_SINK_STABILITY })
}

/// Reference sink `diag(-1) + rotation(-1 +- 2i)` and its start pair.
pub fn reference_sink() -> (DMatrix<f64>, [Vec<f64>; 2]) {
    let f = FieldSpec::linear_sink(-1.0, -1.0, 2.0);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    (f.matrix().expect("linear").clone(), [vec![s, s, 0.0], vec![s, -s, 0.0]])
}
