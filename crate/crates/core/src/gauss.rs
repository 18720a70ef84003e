//! Mutual rotation of two space curves through the Gauss integral.
//!
//! For polylines the triple product `<A' x B', A - B>` is constant on each
//! pair of segments, so every pair contributes `c * J / 4 pi` with
//! `c = (dA x dB) . (P0 - Q0)` and `J` the integral of `|A(s) - B(u)|^{-3}`
//! over the unit square. `J` is computed by composite midpoint rules with
//! Richardson extrapolation; pairs that are close relative to their length
//! are bisected first. Absolute rotation sums `|c| * J` instead.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::curve::{AffineSubspace, Convention, Curve, RotationResult, GUARD_FACTOR};
use crate::error::{Error, Result};
use crate::rotation::{rotation_around_subspace, Mode};
use crate::vecops::{angle_between, dot};

/// Pairs closer than this multiple of their longer segment are bisected.
pub const REFINE_RATIO: f64 = 4.0;
/// Bisection depth cap.
pub const MAX_DEPTH: u32 = 24;

type V3 = [f64; 3];

#[inline]
fn sub3(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
fn dot3(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
fn cross(a: V3, b: V3) -> V3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

#[inline]
fn lerp3(a: V3, d: V3, s: f64) -> V3 {
    [a[0] + s * d[0], a[1] + s * d[1], a[2] + s * d[2]]
}

fn v3(p: &[f64]) -> V3 {
    [p[0], p[1], p[2]]
}

/// Closest distance between segments `p0 + s d1` and `q0 + u d2`, `s, u` in `[0, 1]`.
fn segment_distance(p0: V3, d1: V3, q0: V3, d2: V3) -> f64 {
    let r = sub3(p0, q0);
    let a = dot3(d1, d1);
    let e = dot3(d2, d2);
    let f = dot3(d2, r);
    let (s, u);
    if a <= f64::MIN_POSITIVE && e <= f64::MIN_POSITIVE {
        return dot3(r, r).sqrt();
    }
    if a <= f64::MIN_POSITIVE {
        s = 0.0;
        u = (f / e).clamp(0.0, 1.0);
    } else {
        let c = dot3(d1, r);
        if e <= f64::MIN_POSITIVE {
            u = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = dot3(d1, d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > 0.0 { ((b * f - c * e) / denom).clamp(0.0, 1.0) } else { 0.0 };
            let mut u0 = (b * s0 + f) / e;
            if u0 < 0.0 {
                u0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if u0 > 1.0 {
                u0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            u = u0;
        }
    }
    let x = sub3(lerp3(p0, d1, s), lerp3(q0, d2, u));
    dot3(x, x).sqrt()
}

/// `J` over the parameter rectangle with an error estimate.
#[derive(Debug, Clone, Copy, Default)]
struct Partial {
    value: f64,
    error: f64,
    min_distance: f64,
    capped: bool,
}

/// Composite `k x k` midpoint rule for `|A(s) - B(u)|^{-3}` on the rectangle.
fn midpoint(p0: V3, d1: V3, q0: V3, d2: V3, k: usize) -> f64 {
    let h = 1.0 / k as f64;
    let mut acc = 0.0;
    for i in 0..k {
        let a = lerp3(p0, d1, (i as f64 + 0.5) * h);
        for j in 0..k {
            let b = lerp3(q0, d2, (j as f64 + 0.5) * h);
            let r = sub3(a, b);
            let r2 = dot3(r, r);
            acc += 1.0 / (r2 * r2.sqrt());
        }
    }
    acc * h * h
}

/// Integral of `|p0 + s d1 - q0 - u d2|^{-3}` over `[0,1]^2`, scaled by
/// `area` (the Jacobian of the sub-rectangle inside the original pair).
fn pair_kernel(p0: V3, d1: V3, q0: V3, d2: V3, area: f64, depth: u32, guard: f64) -> Result<Partial> {
    let d = segment_distance(p0, d1, q0, d2);
    if !(d > guard) {
        return Err(Error::CurvesTooClose { distance: d, guard });
    }
    let l1 = dot3(d1, d1).sqrt();
    let l2 = dot3(d2, d2).sqrt();
    let len = l1.max(l2);
    if d < REFINE_RATIO * len && depth < MAX_DEPTH {
        let (a, b) = if l1 >= l2 {
            let h = [d1[0] / 2.0, d1[1] / 2.0, d1[2] / 2.0];
            (
                pair_kernel(p0, h, q0, d2, area / 2.0, depth + 1, guard)?,
                pair_kernel(lerp3(p0, h, 1.0), h, q0, d2, area / 2.0, depth + 1, guard)?,
            )
        } else {
            let h = [d2[0] / 2.0, d2[1] / 2.0, d2[2] / 2.0];
            (
                pair_kernel(p0, d1, q0, h, area / 2.0, depth + 1, guard)?,
                pair_kernel(p0, d1, lerp3(q0, h, 1.0), h, area / 2.0, depth + 1, guard)?,
            )
        };
        return Ok(Partial {
            value: a.value + b.value,
            error: a.error + b.error,
            min_distance: a.min_distance.min(b.min_distance),
            capped: a.capped || b.capped,
        });
    }
    // Midpoint error is O((len/d)^2); use the finer pair of rules when the
    // pair is not well separated.
    let (coarse, fine) = if len * 32.0 < d { (1, 2) } else { (2, 4) };
    let ic = midpoint(p0, d1, q0, d2, coarse);
    let ifine = midpoint(p0, d1, q0, d2, fine);
    let value = (4.0 * ifine - ic) / 3.0 * area;
    let mut error = (ifine - ic).abs() / 3.0 * area;
    let capped = d < REFINE_RATIO * len;
    if capped {
        error += value.abs();
    }
    Ok(Partial { value, error, min_distance: d, capped })
}

#[derive(Debug, Clone, Copy, Default)]
struct Sums {
    signed: f64,
    absolute: f64,
    signed_err: f64,
    absolute_err: f64,
    min_distance: f64,
    capped: bool,
}

fn segments(c: &Curve) -> Vec<(V3, V3)> {
    let pts: Vec<V3> = c.points().map(v3).collect();
    pts.windows(2).map(|w| (w[0], sub3(w[1], w[0]))).collect()
}

fn double_sum(c1: &Curve, c2: &Curve, guard: f64) -> Result<Sums> {
    let s1 = segments(c1);
    let s2 = segments(c2);
    let rows: Vec<Result<Sums>> = s1
        .par_iter()
        .map(|&(p0, d1)| {
            let mut acc = Sums { min_distance: f64::INFINITY, ..Default::default() };
            for &(q0, d2) in &s2 {
                let c = dot3(cross(d1, d2), sub3(p0, q0));
                let j = pair_kernel(p0, d1, q0, d2, 1.0, 0, guard)?;
                acc.signed += c * j.value;
                acc.absolute += c.abs() * j.value;
                acc.signed_err += c.abs() * j.error;
                acc.absolute_err += c.abs() * j.error;
                acc.min_distance = acc.min_distance.min(j.min_distance);
                acc.capped |= j.capped;
            }
            Ok(acc)
        })
        .collect();
    let mut total = Sums { min_distance: f64::INFINITY, ..Default::default() };
    for r in rows {
        let r = r?;
        total.signed += r.signed;
        total.absolute += r.absolute;
        total.signed_err += r.signed_err;
        total.absolute_err += r.absolute_err;
        total.min_distance = total.min_distance.min(r.min_distance);
        total.capped |= r.capped;
    }
    let k = 1.0 / (4.0 * PI);
    total.signed *= k;
    total.absolute *= k;
    total.signed_err *= k;
    total.absolute_err *= k;
    Ok(total)
}

fn check_dims(c1: &Curve, c2: &Curve) -> Result<()> {
    for c in [c1, c2] {
        if c.dim() != 3 {
            return Err(Error::DimensionMismatch { expected: 3, found: c.dim() });
        }
    }
    Ok(())
}

/// Distance below which two curves are considered to touch.
pub fn pair_guard(c1: &Curve, c2: &Curve) -> f64 {
    GUARD_FACTOR * c1.diameter().max(c2.diameter())
}

/// Signed or absolute Gauss rotation of two space curves, in turns.
///
/// Orientation: the integrand is `<A' x B', A - B> / |A - B|^3`, so a
/// counter-clockwise unit circle in the `xy`-plane and the upward `z`-axis
/// give `+1`. The value is symmetric in its two arguments.
///
/// The error estimate adds the quadrature error to the change observed when
/// both curves are thinned to every other sample.
pub fn gauss_rotation_pair(c1: &Curve, c2: &Curve, mode: Mode) -> Result<RotationResult> {
    check_dims(c1, c2)?;
    let guard = pair_guard(c1, c2);
    let full = double_sum(c1, c2, guard)?;
    let half = double_sum(&c1.every_other(), &c2.every_other(), guard)?;
    let (value, coarse, quad) = match mode {
        Mode::Signed => (full.signed, half.signed, full.signed_err),
        Mode::Absolute => (full.absolute, half.absolute, full.absolute_err),
    };
    Ok(RotationResult::new(value, (value - coarse).abs() + quad, Convention::GaussTurns))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkingResult {
    pub raw: f64,
    pub nearest_integer: i64,
    pub residual: f64,
    pub error_estimate: f64,
}

/// Linking coefficient of two closed space curves.
///
/// Fails with `QuadratureInconclusive` unless the signed Gauss integral is
/// within `max(0.1, 3 * error_estimate)` of an integer.
pub fn linking_coefficient(c1: &Curve, c2: &Curve) -> Result<LinkingResult> {
    check_dims(c1, c2)?;
    for (name, c) in [("first", c1), ("second", c2)] {
        if !c.is_closed() {
            return Err(Error::NotClosed(format!("{name} curve is open")));
        }
    }
    let r = gauss_rotation_pair(c1, c2, Mode::Signed)?;
    let nearest = r.value.round();
    let residual = (r.value - nearest).abs();
    if !(residual < 0.1f64.max(3.0 * r.error_estimate)) {
        return Err(Error::QuadratureInconclusive { raw: r.value, residual, error_estimate: r.error_estimate });
    }
    Ok(LinkingResult { raw: r.value, nearest_integer: nearest as i64, residual, error_estimate: r.error_estimate })
}

/// Linking number of a planar simple closed curve `c1` with a curve `c2`,
/// counted as signed crossings of `c2` through the flat region bounded by
/// `c1`.
///
/// The region is oriented by `c1` (right-hand rule); a crossing along the
/// resulting normal counts `+1`. This matches the sign of
/// [`gauss_rotation_pair`].
pub fn topological_linking_planar(c1: &Curve, c2: &Curve) -> Result<i64> {
    check_dims(c1, c2)?;
    if !c1.is_closed() {
        return Err(Error::NotClosed("spanning curve is open".into()));
    }
    let pts: Vec<V3> = c1.points().map(v3).collect();
    // Newell normal
    let mut nrm = [0.0; 3];
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        nrm[0] += (a[1] - b[1]) * (a[2] + b[2]);
        nrm[1] += (a[2] - b[2]) * (a[0] + b[0]);
        nrm[2] += (a[0] - b[0]) * (a[1] + b[1]);
    }
    let nn = dot3(nrm, nrm).sqrt();
    if nn == 0.0 {
        return Err(Error::NotPlanar(f64::INFINITY));
    }
    let nrm = [nrm[0] / nn, nrm[1] / nn, nrm[2] / nn];
    let m = (pts.len() - 1) as f64;
    let centroid =
        pts[..pts.len() - 1].iter().fold([0.0; 3], |acc, p| [acc[0] + p[0] / m, acc[1] + p[1] / m, acc[2] + p[2] / m]);
    let deviation = pts.iter().map(|p| dot3(sub3(*p, centroid), nrm).abs()).fold(0.0, f64::max);
    if deviation > 1e-9 * c1.diameter().max(1.0) {
        return Err(Error::NotPlanar(deviation));
    }
    // In-plane frame (e1, e2, nrm) right-handed.
    let helper = if nrm[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let e1 = {
        let c = cross(helper, nrm);
        let l = dot3(c, c).sqrt();
        [c[0] / l, c[1] / l, c[2] / l]
    };
    let e2 = cross(nrm, e1);
    let flat: Vec<[f64; 2]> = pts
        .iter()
        .map(|p| {
            let d = sub3(*p, centroid);
            [dot3(d, e1), dot3(d, e2)]
        })
        .collect();

    let mut count = 0i64;
    let q: Vec<V3> = c2.points().map(v3).collect();
    let heights: Vec<f64> = q.iter().map(|p| dot3(sub3(*p, centroid), nrm)).collect();
    if let Some(i) = heights.iter().position(|h| *h == 0.0) {
        return Err(Error::NonTransversal(format!("sample {i} of the second curve lies in the plane")));
    }
    for i in 0..q.len() - 1 {
        let (h0, h1) = (heights[i], heights[i + 1]);
        if (h0 < 0.0) == (h1 < 0.0) {
            continue;
        }
        let s = h0 / (h0 - h1);
        let x = lerp3(q[i], sub3(q[i + 1], q[i]), s);
        let d = sub3(x, centroid);
        let xf = [dot3(d, e1), dot3(d, e2)];
        let mut wind = 0.0;
        for w in flat.windows(2) {
            let (ax, ay) = (w[0][0] - xf[0], w[0][1] - xf[1]);
            let (bx, by) = (w[1][0] - xf[0], w[1][1] - xf[1]);
            wind += (ax * by - ay * bx).atan2(ax * bx + ay * by);
        }
        let wind = (wind / (2.0 * PI)).round() as i64;
        count += if h1 > h0 { wind } else { -wind };
    }
    Ok(count)
}

/// Gauss-integral and projection-based rotation of a curve around a line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineCrosscheck {
    pub gauss: RotationResult,
    pub projection: RotationResult,
    /// Bound (turns) on the contribution of the line beyond the truncation.
    pub tail_bound: f64,
    pub half_length: f64,
}

impl LineCrosscheck {
    pub fn difference(&self) -> f64 {
        (self.gauss.value - self.projection.value).abs()
    }

    /// Combined error budget, in turns.
    pub fn tolerance(&self) -> f64 {
        let proj_err = match self.projection.convention {
            Convention::AbsoluteRadians => self.projection.error_estimate / (2.0 * PI),
            _ => self.projection.error_estimate,
        };
        self.gauss.error_estimate + proj_err + self.tail_bound
    }

    pub fn agrees(&self) -> bool {
        self.difference() <= self.tolerance()
    }
}

/// Compares the Gauss rotation of `c` against the segment of `line` of
/// half-length `half_length` centered at the point of the line nearest to
/// `c`'s bounding-box center, with the rotation of `c` around `line`
/// measured by projection. Absolute projections are converted to turns.
pub fn line_rotation_crosscheck(
    c: &Curve,
    line: &AffineSubspace,
    half_length: f64,
    mode: Mode,
) -> Result<LineCrosscheck> {
    if line.ambient_dim() != 3 || line.dim() != 1 {
        return Err(Error::CodimensionError(line.codim()));
    }
    if c.dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: c.dim() });
    }
    if !(half_length > 0.0) {
        return Err(Error::InvalidInput("half_length must be positive".into()));
    }
    let dir = line.basis()[0].clone();
    let (center, _) = c.bounding_ball();
    let mid = line.nearest_point(&center);
    let a: Vec<f64> = mid.iter().zip(&dir).map(|(m, d)| m - half_length * d).collect();
    let b: Vec<f64> = mid.iter().zip(&dir).map(|(m, d)| m + half_length * d).collect();
    let seg = Curve::new(vec![-half_length, half_length], vec![a, b], false)?;

    let gauss = gauss_rotation_pair(c, &seg, mode)?;
    let mut projection = rotation_around_subspace(c, line, mode)?;
    if mode == Mode::Absolute {
        projection.value /= 2.0 * PI;
        projection.error_estimate /= 2.0 * PI;
        projection.convention = Convention::GaussTurns;
    }

    // Each segment of c sees the full line as dtheta / 2 pi; a truncated
    // line misses the fraction (1 - a/sqrt(a^2 + rho^2)) / 2 per side.
    let mut tail = 0.0;
    let pts: Vec<&[f64]> = c.points().collect();
    for w in pts.windows(2) {
        let dtheta = angle_between(&line.complement_coords(w[0]), &line.complement_coords(w[1]));
        let mut worst: f64 = 0.0;
        for p in [w[0], w[1]] {
            let rho = crate::vecops::norm(&line.complement_coords(p));
            let s = dot(&crate::vecops::sub(p, &mid), &dir);
            let side = |a: f64| {
                if a <= 0.0 {
                    1.0
                } else {
                    0.5 * (1.0 - a / a.hypot(rho))
                }
            };
            worst = worst.max(side(half_length - s) + side(half_length + s));
        }
        tail += dtheta / (2.0 * PI) * worst;
    }
    Ok(LineCrosscheck { gauss, projection, tail_bound: tail, half_length })
}
