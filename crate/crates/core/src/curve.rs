//! Sampled curves, spherical images and affine subspaces.
//!
//! A [`Curve`] is a time-stamped polyline: consecutive samples are joined by
//! straight segments and every integral in the crate is evaluated over that
//! polyline. Accuracy is therefore controlled by sampling density.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::vecops::{angle_between, dist, dot, lerp, norm, point_segment_distance, sub};

/// Relative factor for the closest approach a segment may make to a blow-up
/// center, measured against the segment's own distance scale.
pub const GUARD_FACTOR: f64 = 1e-7;
/// Relative factor (of the curve diameter) for closed-curve detection.
pub const CLOSE_FACTOR: f64 = 1e-6;
/// Tolerance on the unit norm of spherical samples.
pub const SPHERE_TOL: f64 = 1e-9;
/// Tolerance on orthonormality of subspace bases.
pub const ORTHO_TOL: f64 = 1e-12;

/// Time-stamped polyline in `dim`-space.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    dim: usize,
    times: Vec<f64>,
    coords: Vec<f64>,
    closed: bool,
}

impl Curve {
    /// Builds a curve from per-sample points.
    pub fn new(times: Vec<f64>, points: Vec<Vec<f64>>, closed: bool) -> Result<Self> {
        let dim = points.first().map(|p| p.len()).unwrap_or(0);
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::InvalidCurve("samples have inconsistent dimensions".into()));
        }
        let coords = points.into_iter().flatten().collect();
        Self::from_flat(dim, times, coords, closed)
    }

    /// Builds a curve from row-major coordinates (`times.len() * dim` values).
    pub fn from_flat(dim: usize, times: Vec<f64>, coords: Vec<f64>, closed: bool) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidCurve("dimension must be at least 1".into()));
        }
        if times.len() < 2 {
            return Err(Error::InvalidCurve(format!("need at least 2 samples, got {}", times.len())));
        }
        if coords.len() != times.len() * dim {
            return Err(Error::InvalidCurve(format!(
                "{} coordinates do not match {} samples of dimension {}",
                coords.len(),
                times.len(),
                dim
            )));
        }
        if times.iter().chain(&coords).any(|v| !v.is_finite()) {
            return Err(Error::InvalidCurve("non-finite sample".into()));
        }
        if let Some(w) = times.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidCurve(format!("times must be strictly increasing ({} then {})", w[0], w[1])));
        }
        let curve = Curve { dim, times, coords, closed };
        if closed {
            let gap = dist(curve.point(0), curve.point(curve.len() - 1));
            let tol = CLOSE_FACTOR * curve.diameter();
            if gap > tol {
                return Err(Error::NotClosed(format!("endpoints differ by {gap:e} (tolerance {tol:e})")));
            }
        }
        Ok(curve)
    }

    /// Samples `f` at `n` uniform times on `[t0, t1]`.
    pub fn from_fn(t0: f64, t1: f64, n: usize, closed: bool, f: impl Fn(f64) -> Vec<f64>) -> Result<Self> {
        if n < 2 || t1 <= t0 {
            return Err(Error::InvalidInput("need n >= 2 and t1 > t0".into()));
        }
        let times: Vec<f64> =
            (0..n).map(|i| if i + 1 == n { t1 } else { t0 + (t1 - t0) * i as f64 / (n - 1) as f64 }).collect();
        let points = times.iter().map(|&t| f(t)).collect();
        Curve::new(times, points, closed)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn start_time(&self) -> f64 {
        self.times[0]
    }

    pub fn end_time(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    pub fn duration(&self) -> f64 {
        self.end_time() - self.start_time()
    }

    pub fn first(&self) -> &[f64] {
        self.point(0)
    }

    pub fn last(&self) -> &[f64] {
        self.point(self.len() - 1)
    }

    /// Diagonal of the axis-aligned bounding box (within a factor `sqrt(dim)`
    /// of the true diameter).
    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        dist(&lo, &hi)
    }

    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in self.points() {
            for k in 0..self.dim {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }

    /// Center and radius of a ball containing every sample (bounding-box center).
    pub fn bounding_ball(&self) -> (Vec<f64>, f64) {
        let (lo, hi) = self.bounding_box();
        let center: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
        let radius = self.points().map(|p| dist(p, &center)).fold(0.0, f64::max);
        (center, radius)
    }

    pub fn segment_lengths(&self) -> Vec<f64> {
        (1..self.len()).map(|i| dist(self.point(i - 1), self.point(i))).collect()
    }

    /// Polyline length, summed segment by segment in sample order.
    pub fn length(&self) -> f64 {
        let mut total = 0.0;
        for i in 1..self.len() {
            total += dist(self.point(i - 1), self.point(i));
        }
        total
    }

    /// Position at time `t` by linear interpolation (clamped to the ends).
    pub fn point_at(&self, t: f64) -> Vec<f64> {
        let n = self.len();
        if t <= self.times[0] {
            return self.point(0).to_vec();
        }
        if t >= self.times[n - 1] {
            return self.point(n - 1).to_vec();
        }
        let j = self.times.partition_point(|&s| s <= t);
        let (ta, tb) = (self.times[j - 1], self.times[j]);
        lerp(self.point(j - 1), self.point(j), (t - ta) / (tb - ta))
    }

    /// Restriction to the time window `[ta, tb]`, with interpolated end samples.
    pub fn window(&self, ta: f64, tb: f64) -> Result<Curve> {
        let ta = ta.max(self.start_time());
        let tb = tb.min(self.end_time());
        if tb <= ta {
            return Err(Error::InvalidInput(format!("empty time window [{ta}, {tb}]")));
        }
        let mut times = vec![ta];
        let mut coords = self.point_at(ta);
        for (i, &t) in self.times.iter().enumerate() {
            if t > ta && t < tb {
                times.push(t);
                coords.extend_from_slice(self.point(i));
            }
        }
        times.push(tb);
        coords.extend(self.point_at(tb));
        Curve::from_flat(self.dim, times, coords, false)
    }

    /// Joins `other` after `self`.
    ///
    /// If `other` starts at this curve's final time and point, the shared
    /// sample is kept once; otherwise `other` must start strictly later and a
    /// connecting segment is added.
    pub fn concat(&self, other: &Curve) -> Result<Curve> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let shared = other.start_time() == self.end_time() && other.first() == self.last();
        if !shared && other.start_time() <= self.end_time() {
            return Err(Error::InvalidInput("concatenated curve must start after the first one ends".into()));
        }
        let skip = usize::from(shared);
        let mut times = self.times.clone();
        times.extend_from_slice(&other.times[skip..]);
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords[skip * self.dim..]);
        Curve::from_flat(self.dim, times, coords, false)
    }

    /// Same geometric curve traversed backwards, with times reflected about
    /// the window midpoint.
    pub fn reversed(&self) -> Curve {
        let (t0, t1) = (self.start_time(), self.end_time());
        let n = self.len();
        let times = (0..n).map(|i| t0 + t1 - self.times[n - 1 - i]).collect();
        let mut coords = Vec::with_capacity(self.coords.len());
        for i in (0..n).rev() {
            coords.extend_from_slice(self.point(i));
        }
        Curve { dim: self.dim, times, coords, closed: self.closed }
    }

    /// Applies `f` to every sample (e.g. a rigid motion); timestamps are kept.
    pub fn map_points(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> Result<Curve> {
        let points: Vec<Vec<f64>> = self.points().map(f).collect();
        let dim = points[0].len();
        let coords = points.into_iter().flatten().collect();
        Curve::from_flat(dim, self.times.clone(), coords, self.closed)
    }

    /// Every other sample, always keeping the last one: the coarse level of
    /// the two-level refinement used for error estimates.
    pub fn every_other(&self) -> Curve {
        self.half_sample(0)
    }

    /// Samples with odd index, plus both endpoints.
    pub fn every_other_odd(&self) -> Curve {
        self.half_sample(1)
    }

    fn half_sample(&self, parity: usize) -> Curve {
        let n = self.len();
        let mut idx: Vec<usize> = Vec::with_capacity(n / 2 + 2);
        idx.push(0);
        idx.extend((1..n - 1).filter(|i| i % 2 == parity));
        idx.push(n - 1);
        let times = idx.iter().map(|&i| self.times[i]).collect();
        let mut coords = Vec::with_capacity(idx.len() * self.dim);
        for &i in &idx {
            coords.extend_from_slice(self.point(i));
        }
        Curve { dim: self.dim, times, coords, closed: self.closed }
    }

    /// Arc-length-uniform resampling to `n` samples by linear interpolation.
    ///
    /// Times are interpolated along with positions, so the result is a
    /// monotone reparametrization of the same polyline (corners between
    /// retained samples are cut).
    pub fn resample(&self, n: usize) -> Result<Curve> {
        if n < 2 {
            return Err(Error::InvalidInput("resample needs n >= 2".into()));
        }
        let seg = self.segment_lengths();
        let total: f64 = seg.iter().sum();
        let mut cum = Vec::with_capacity(self.len());
        cum.push(0.0);
        for s in &seg {
            cum.push(cum.last().unwrap() + s);
        }
        if total == 0.0 {
            // Degenerate: uniform in time.
            let (t0, t1) = (self.start_time(), self.end_time());
            return Curve::from_fn(t0, t1, n, self.closed, |_| self.point(0).to_vec());
        }
        let mut times = Vec::with_capacity(n);
        let mut coords = Vec::with_capacity(n * self.dim);
        let mut j = 1;
        for k in 0..n {
            if k == 0 {
                times.push(self.times[0]);
                coords.extend_from_slice(self.point(0));
                continue;
            }
            if k == n - 1 {
                times.push(self.end_time());
                coords.extend_from_slice(self.last());
                continue;
            }
            let target = total * k as f64 / (n - 1) as f64;
            while j < self.len() - 1 && cum[j] < target {
                j += 1;
            }
            let span = cum[j] - cum[j - 1];
            let s = if span > 0.0 { (target - cum[j - 1]) / span } else { 0.0 };
            let t = self.times[j - 1] + s * (self.times[j] - self.times[j - 1]);
            // Zero-length stretches can produce repeated times; nudge forward.
            let t = if t <= *times.last().unwrap() {
                let prev: f64 = *times.last().unwrap();
                prev + (self.times[j] - prev) * 1e-9
            } else {
                t
            };
            times.push(t);
            coords.extend(lerp(self.point(j - 1), self.point(j), s));
        }
        Curve::from_flat(self.dim, times, coords, self.closed)
    }

    pub(crate) fn closed_unchecked(mut self, closed: bool) -> Curve {
        self.closed = closed;
        self
    }
}

/// Verifies that no polyline segment passes (relatively) too close to `center`.
///
/// For each segment the closest approach is compared with
/// `GUARD_FACTOR * max(|P0 - center|, |P1 - center|)`. The spherical image of
/// a segment is a great-circle arc whose angle is computed exactly from the
/// endpoint directions, so only near-passes through the center (where the
/// arc direction becomes ill-conditioned) are rejected.
pub fn check_clearance(c: &Curve, center: &[f64]) -> Result<()> {
    if center.len() != c.dim() {
        return Err(Error::DimensionMismatch { expected: c.dim(), found: center.len() });
    }
    for i in 0..c.len() {
        let d = dist(c.point(i), center);
        if d == 0.0 {
            return Err(Error::DistanceTooSmall { distance: 0.0, guard: 0.0 });
        }
    }
    for i in 1..c.len() {
        let (a, b) = (c.point(i - 1), c.point(i));
        let scale = dist(a, center).max(dist(b, center));
        // Relative to the center and rescaled, so tiny curves stay resolvable.
        let rel = |p: &[f64]| -> Vec<f64> { p.iter().zip(center).map(|(x, y)| (x - y) / scale).collect() };
        let d = point_segment_distance(&vec![0.0; center.len()], &rel(a), &rel(b));
        if d <= GUARD_FACTOR {
            return Err(Error::DistanceTooSmall { distance: d * scale, guard: GUARD_FACTOR * scale });
        }
    }
    Ok(())
}

/// A curve on the unit sphere `S^{dim-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalCurve {
    curve: Curve,
}

impl SphericalCurve {
    /// Wraps a curve whose samples all have unit norm (within [`SPHERE_TOL`]).
    pub fn new(curve: Curve) -> Result<Self> {
        for (i, p) in curve.points().enumerate() {
            let r = norm(p);
            if (r - 1.0).abs() > SPHERE_TOL {
                return Err(Error::InvalidCurve(format!("sample {i} has norm {r}, not 1")));
            }
        }
        Ok(SphericalCurve { curve })
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn into_curve(self) -> Curve {
        self.curve
    }

    pub fn dim(&self) -> usize {
        self.curve.dim()
    }

    /// Length on the sphere: consecutive samples are joined by great-circle arcs.
    pub fn length(&self) -> f64 {
        let c = &self.curve;
        let mut total = 0.0;
        for i in 1..c.len() {
            total += angle_between(c.point(i - 1), c.point(i));
        }
        total
    }

    pub fn every_other(&self) -> SphericalCurve {
        SphericalCurve { curve: self.curve.every_other() }
    }
}

/// Spherical image `t -> (c(t) - center) / |c(t) - center|`.
pub fn spherical_blowup(c: &Curve, center: &[f64]) -> Result<SphericalCurve> {
    check_clearance(c, center)?;
    let coords: Vec<f64> = c
        .points()
        .flat_map(|p| {
            let d = sub(p, center);
            let r = norm(&d);
            d.into_iter().map(move |x| x / r)
        })
        .collect();
    let curve = Curve::from_flat(c.dim(), c.times().to_vec(), coords, false)?;
    let curve = curve.closed_unchecked(c.is_closed());
    Ok(SphericalCurve { curve })
}

/// Affine subspace `base + span(basis)` with an orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineSubspace {
    base: Vec<f64>,
    basis: Vec<Vec<f64>>,
    complement: Vec<Vec<f64>>,
}

impl AffineSubspace {
    /// Orthonormalizes `directions` (Gram-Schmidt) and completes the basis.
    pub fn new(base: Vec<f64>, directions: Vec<Vec<f64>>) -> Result<Self> {
        let n = base.len();
        if n == 0 {
            return Err(Error::InvalidInput("empty base point".into()));
        }
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for d in directions {
            if d.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: d.len() });
            }
            let scale = norm(&d);
            let mut v = d;
            for b in &basis {
                let c = dot(&v, b);
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
            let r = norm(&v);
            if !(r > 1e-10 * scale) || scale == 0.0 {
                return Err(Error::InvalidInput("subspace directions are linearly dependent".into()));
            }
            v.iter_mut().for_each(|x| *x /= r);
            basis.push(v);
        }
        Self::from_orthonormal(base, basis)
    }

    /// Uses `basis` as given; it must already be orthonormal within [`ORTHO_TOL`].
    pub fn from_orthonormal(base: Vec<f64>, basis: Vec<Vec<f64>>) -> Result<Self> {
        let n = base.len();
        for (i, a) in basis.iter().enumerate() {
            if a.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: a.len() });
            }
            for (j, b) in basis.iter().enumerate().skip(i) {
                let target = if i == j { 1.0 } else { 0.0 };
                if (dot(a, b) - target).abs() > ORTHO_TOL {
                    return Err(Error::InvalidInput("basis is not orthonormal".into()));
                }
            }
        }
        if basis.len() > n {
            return Err(Error::InvalidInput("more basis vectors than dimensions".into()));
        }
        let complement = complete_basis(&basis, n);
        Ok(AffineSubspace { base, basis, complement })
    }

    /// The 0-dimensional subspace `{p}`.
    pub fn point(p: Vec<f64>) -> Self {
        let n = p.len();
        let complement = complete_basis(&[], n);
        AffineSubspace { base: p, basis: Vec::new(), complement }
    }

    /// Straight line through `base` with direction `dir` (normalized).
    pub fn line(base: Vec<f64>, dir: Vec<f64>) -> Result<Self> {
        Self::new(base, vec![dir])
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.len()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn codim(&self) -> usize {
        self.base.len() - self.basis.len()
    }

    pub fn base(&self) -> &[f64] {
        &self.base
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// Orthonormal basis of the orthogonal complement, oriented so that
    /// `(basis, complement)` is a positively oriented frame. For a line in
    /// 3-space with direction `d` this gives `u x v = d`.
    pub fn complement_basis(&self) -> &[Vec<f64>] {
        &self.complement
    }

    /// Coordinates of `x - base` in the complement basis.
    pub fn complement_coords(&self, x: &[f64]) -> Vec<f64> {
        let d = sub(x, &self.base);
        self.complement.iter().map(|u| dot(&d, u)).collect()
    }

    /// Coordinates of `x - base` in the subspace basis.
    pub fn along_coords(&self, x: &[f64]) -> Vec<f64> {
        let d = sub(x, &self.base);
        self.basis.iter().map(|u| dot(&d, u)).collect()
    }

    /// Orthogonal projection of `x` onto the subspace.
    pub fn nearest_point(&self, x: &[f64]) -> Vec<f64> {
        let mut p = self.base.clone();
        for (b, c) in self.basis.iter().zip(self.along_coords(x)) {
            p.iter_mut().zip(b).for_each(|(pi, bi)| *pi += c * bi);
        }
        p
    }

    /// Component of a vector orthogonal to the subspace directions.
    pub fn normal_component(&self, v: &[f64]) -> Vec<f64> {
        let mut out = v.to_vec();
        for b in &self.basis {
            let c = dot(v, b);
            out.iter_mut().zip(b).for_each(|(o, bi)| *o -= c * bi);
        }
        out
    }

    /// Point with the given along/complement coordinates.
    pub fn compose(&self, along: &[f64], perp: &[f64]) -> Vec<f64> {
        let mut p = self.base.clone();
        for (b, c) in self.basis.iter().zip(along) {
            p.iter_mut().zip(b).for_each(|(pi, bi)| *pi += c * bi);
        }
        for (u, c) in self.complement.iter().zip(perp) {
            p.iter_mut().zip(u).for_each(|(pi, ui)| *pi += c * ui);
        }
        p
    }
}

fn complete_basis(basis: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    let mut frame: Vec<Vec<f64>> = basis.to_vec();
    let mut complement = Vec::new();
    while frame.len() < n {
        // Pick the standard axis with the largest residual for stability.
        let mut best: Option<(f64, Vec<f64>)> = None;
        for k in 0..n {
            let mut v = vec![0.0; n];
            v[k] = 1.0;
            for b in &frame {
                let c = dot(&v, b);
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
            // second pass for orthogonality
            for b in &frame {
                let c = dot(&v, b);
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
            let r = norm(&v);
            if best.as_ref().is_none_or(|(rb, _)| r > *rb + 1e-12) {
                best = Some((r, v));
            }
        }
        let (r, mut v) = best.expect("n > 0");
        v.iter_mut().for_each(|x| *x /= r);
        frame.push(v.clone());
        complement.push(v);
    }
    if !complement.is_empty() {
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| frame[j][i]);
        if m.determinant() < 0.0 {
            let last = complement.last_mut().unwrap();
            last.iter_mut().for_each(|x| *x = -*x);
        }
    }
    complement
}

/// Projection of `c` onto the orthogonal complement of `l`, in complement
/// coordinates (so `l` itself maps to the origin). Timestamps are kept.
pub fn project_to_complement(c: &Curve, l: &AffineSubspace) -> Result<Curve> {
    if c.dim() != l.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: l.ambient_dim(), found: c.dim() });
    }
    let k = l.codim();
    if k == 0 {
        return Err(Error::CodimensionError(0));
    }
    let coords: Vec<f64> = c.points().flat_map(|p| l.complement_coords(p)).collect();
    Curve::from_flat(k, c.times().to_vec(), coords, false).map(|p| p.closed_unchecked(c.is_closed()))
}

/// Units attached to a [`RotationResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// Length of a spherical image, in radians.
    AbsoluteRadians,
    /// Net planar angle divided by `2 pi`.
    SignedTurns,
    /// Gauss double integral normalized by `4 pi`.
    GaussTurns,
}

/// A rotation value with its quadrature/discretization error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RotationResult {
    pub value: f64,
    pub error_estimate: f64,
    pub convention: Convention,
}

impl RotationResult {
    pub fn new(value: f64, error_estimate: f64, convention: Convention) -> Self {
        RotationResult { value, error_estimate: error_estimate.abs(), convention }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn unit_circle(n: usize) -> Curve {
        Curve::from_fn(0.0, TAU, n, true, |t| vec![t.cos(), t.sin()]).unwrap()
    }

    #[test]
    fn rejects_bad_curves() {
        assert!(Curve::new(vec![0.0], vec![vec![1.0, 2.0]], false).is_err());
        assert!(Curve::new(vec![0.0, 0.0], vec![vec![1.0], vec![2.0]], false).is_err());
        let open = Curve::new(vec![0.0, 1.0], vec![vec![0.0, 0.0], vec![1.0, 0.0]], true);
        assert!(matches!(open, Err(Error::NotClosed(_))));
    }

    #[test]
    fn segment_length_is_pythagorean() {
        let c = Curve::new(vec![0.0, 1.0], vec![vec![0.0, 0.0], vec![3.0, 4.0]], false).unwrap();
        assert_eq!(c.length(), 5.0);
    }

    #[test]
    fn circle_length() {
        let c = unit_circle(1000);
        assert!((c.length() - TAU).abs() < 1e-4);
    }

    #[test]
    fn concat_length_is_additive() {
        let c = unit_circle(301);
        let a = c.window(0.0, 2.0).unwrap();
        let b = c.window(2.0, TAU).unwrap();
        let joined = a.concat(&b).unwrap();
        let sum = a.length() + b.length();
        assert!((joined.length() - sum).abs() <= 4.0 * f64::EPSILON * sum);
    }

    #[test]
    fn radial_segment_blows_up_to_a_point() {
        let c = Curve::new(vec![0.0, 1.0], vec![vec![1.0, 0.0], vec![2.0, 0.0]], false).unwrap();
        let s = spherical_blowup(&c, &[0.0, 0.0]).unwrap();
        for p in s.curve().points() {
            assert_eq!(p, &[1.0, 0.0]);
        }
        assert_eq!(s.length(), 0.0);
    }

    #[test]
    fn circle_blowup_is_itself() {
        let c = unit_circle(200);
        let s = spherical_blowup(&c, &[0.0, 0.0]).unwrap();
        for (p, q) in s.curve().points().zip(c.points()) {
            assert!(dist(p, q) < 1e-15);
        }
    }

    #[test]
    fn blowup_guard() {
        let c = Curve::new(vec![0.0, 1.0], vec![vec![-1.0, 0.0], vec![1.0, 0.0]], false).unwrap();
        assert!(matches!(spherical_blowup(&c, &[0.0, 0.0]), Err(Error::DistanceTooSmall { .. })));
        assert!(spherical_blowup(&c, &[0.0, 1e-4]).is_ok());
    }

    #[test]
    fn helix_projects_to_circle() {
        let c = Curve::from_fn(0.0, 4.0 * PI, 400, false, |t| vec![t.cos(), t.sin(), t]).unwrap();
        let l = AffineSubspace::line(vec![0.0; 3], vec![0.0, 0.0, 1.0]).unwrap();
        let p = project_to_complement(&c, &l).unwrap();
        assert_eq!(p.dim(), 2);
        for q in p.points() {
            assert!((norm(q) - 1.0).abs() < 1e-14);
        }
        // u x v = d orientation: the CCW helix stays CCW in the projection.
        let (a, b) = (p.point(0), p.point(1));
        assert!(a[0] * b[1] - a[1] * b[0] > 0.0);
    }

    #[test]
    fn curve_in_subspace_projects_to_origin() {
        let c = Curve::from_fn(0.0, 1.0, 10, false, |t| vec![2.0, 2.0 * t, 1.0]).unwrap();
        let l = AffineSubspace::line(vec![2.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]).unwrap();
        let p = project_to_complement(&c, &l).unwrap();
        for q in p.points() {
            assert!(norm(q) < 1e-15);
        }
    }

    #[test]
    fn projection_is_idempotent() {
        let c =
            Curve::from_fn(0.0, 3.0, 50, false, |t| vec![t.cos(), t.sin() + 0.3 * t, 0.2 * t * t, 1.0 - t]).unwrap();
        let l = AffineSubspace::new(vec![0.1, 0.2, 0.3, 0.4], vec![vec![1.0, 1.0, 0.0, 0.0], vec![0.0, 1.0, 1.0, 1.0]])
            .unwrap();
        let once = project_to_complement(&c, &l).unwrap();
        let origin_in_complement = AffineSubspace::point(vec![0.0; once.dim()]);
        let twice = project_to_complement(&once, &origin_in_complement).unwrap();
        for (a, b) in once.points().zip(twice.points()) {
            assert!(dist(a, b) < 1e-12);
        }
    }

    #[test]
    fn complement_frame_is_orthonormal_and_oriented() {
        let l = AffineSubspace::line(vec![0.0; 3], vec![1.0, 2.0, -0.5]).unwrap();
        let d = &l.basis()[0];
        let cb = l.complement_basis();
        let x = crate::vecops::cross3(&cb[0], &cb[1]);
        assert!(dist(&x, d) < 1e-12);
        assert!(dot(&cb[0], d).abs() < 1e-12 && dot(&cb[1], d).abs() < 1e-12);
    }

    #[test]
    fn resample_segment_is_uniform() {
        let c = Curve::new(vec![0.0, 1.0], vec![vec![0.0, 0.0], vec![4.0, 0.0]], false).unwrap();
        let r = c.resample(5).unwrap();
        for (i, p) in r.points().enumerate() {
            assert!((p[0] - i as f64).abs() < 1e-12 && p[1] == 0.0);
        }
    }

    #[test]
    fn resample_circle_keeps_length() {
        let c = unit_circle(1000);
        let r = c.resample(500).unwrap();
        assert!((r.length() - c.length()).abs() < 1e-3);
        assert!(r.times().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn window_interpolates_ends() {
        let c = Curve::new(vec![0.0, 2.0], vec![vec![0.0], vec![4.0]], false).unwrap();
        let w = c.window(0.5, 1.5).unwrap();
        assert_eq!(w.first(), &[1.0]);
        assert_eq!(w.last(), &[3.0]);
    }
}
