//! Integral-geometric tools: Crofton constants, Monte-Carlo length of
//! spherical curves, and constructive searches for pairs of times at which
//! a long curve passes the same place with opposite velocities.

use std::collections::VecDeque;
use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::curve::{Curve, SphericalCurve};
use crate::error::{Error, Result};
use crate::sampling;
use crate::vecops::{dot, norm, sub};

/// Relative slack allowed when re-checking a witness against its threshold.
const WITNESS_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CroftonConstants {
    pub n: usize,
    pub c_n: f64,
    pub v_n: f64,
    #[serde(rename = "C_n")]
    pub big_c_n: f64,
}

/// `c_n = G((n+1)/2) G(1/2) / G(n/2)`, `V_n = 2 G(1/2)^n / G(n/2)`, `C_n = c_n V_n`.
pub fn crofton_constants(n: usize) -> Result<CroftonConstants> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("dimension must be at least 2, got {n}")));
    }
    let nf = n as f64;
    let g_half = gamma(0.5);
    let c_n = gamma((nf + 1.0) / 2.0) * g_half / gamma(nf / 2.0);
    let v_n = 2.0 * g_half.powi(n as i32) / gamma(nf / 2.0);
    Ok(CroftonConstants { n, c_n, v_n, big_c_n: c_n * v_n })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CroftonEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Length of a curve on the unit sphere from the mean number of crossings
/// with `m` random great subspheres: `length = pi * E[#crossings]`.
///
/// Each subsphere is the zero set of `<g e_n, x>` for a Haar rotation `g`;
/// crossings are sign changes of that functional along the polyline.
pub fn crofton_length_estimate(s: &SphericalCurve, m: usize, seed: u64) -> Result<CroftonEstimate> {
    if m < 100 {
        return Err(Error::InvalidInput(format!("need at least 100 draws, got {m}")));
    }
    let n = s.dim();
    let mut rng = sampling::rng(seed);
    let normals: Vec<Vec<f64>> = (0..m)
        .map(|_| {
            let g = sampling::haar_orthogonal(&mut rng, n);
            g.column(n - 1).iter().copied().collect()
        })
        .collect();
    let c = s.curve();
    let counts: Vec<f64> = normals
        .par_iter()
        .map(|u| {
            let mut prev = dot(c.first(), u) < 0.0;
            let mut k = 0u64;
            for p in c.points().skip(1) {
                let cur = dot(p, u) < 0.0;
                if cur != prev {
                    k += 1;
                }
                prev = cur;
            }
            k as f64
        })
        .collect();
    let mf = m as f64;
    let mean = counts.iter().sum::<f64>() / mf;
    let var = counts.iter().map(|k| (k - mean).powi(2)).sum::<f64>() / (mf - 1.0);
    Ok(CroftonEstimate { estimate: PI * mean, std_error: PI * (var / mf).sqrt(), samples: m })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Coincide,
    Antipodal,
}

/// Two times at which a curve's projection on a circle `lambda` is at the
/// same or antipodal points with opposite velocities along the tangent line.
///
/// `v_proj_1` is the velocity at `tau1` projected on the oriented tangent
/// line at the first point; `v_proj_2` is the velocity at `tau2` projected
/// on that same oriented line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquatorWitness {
    /// Orthonormal basis of the plane of `lambda`.
    pub plane: Vec<Vec<f64>>,
    pub tau1: f64,
    pub tau2: f64,
    pub relation: Relation,
    pub v_proj_1: f64,
    pub v_proj_2: f64,
    pub theta: f64,
    /// Lower bound the projected speeds must meet.
    pub threshold: f64,
    pub length: f64,
    pub t_start: f64,
    pub t_end: f64,
}

impl EquatorWitness {
    /// Re-checks the stored inequalities.
    pub fn is_valid(&self) -> bool {
        witness_ok(self.t_start, self.tau1, self.tau2, self.t_end, self.v_proj_1, self.v_proj_2, self.threshold)
    }
}

/// Line analog: equal orthogonal projections on a line with opposite
/// projected velocities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EuclideanWitness {
    pub direction: Vec<f64>,
    pub tau1: f64,
    pub tau2: f64,
    pub position_1: f64,
    pub position_2: f64,
    pub v_proj_1: f64,
    pub v_proj_2: f64,
    pub theta: f64,
    pub threshold: f64,
    pub length: f64,
    pub radius: f64,
    pub t_start: f64,
    pub t_end: f64,
}

impl EuclideanWitness {
    pub fn is_valid(&self) -> bool {
        witness_ok(self.t_start, self.tau1, self.tau2, self.t_end, self.v_proj_1, self.v_proj_2, self.threshold)
    }
}

fn witness_ok(t1: f64, tau1: f64, tau2: f64, t2: f64, v1: f64, v2: f64, threshold: f64) -> bool {
    let floor = threshold * (1.0 - WITNESS_RTOL);
    t1 < tau1 && tau1 < tau2 && tau2 < t2 && v1 * v2 < 0.0 && v1.abs() >= floor && v2.abs() >= floor
}

/// Centered differences of `x` in time; one-sided at the ends.
fn derivative(x: &[f64], t: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
            (x[b] - x[a]) / (t[b] - t[a])
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
struct Item {
    key: f64,
    q: f64,
    idx: usize,
}

/// Pair of items with keys within `tol` and opposite signs of `q` that
/// maximizes `min(|q_i|, |q_j|)`. Returns `(positive idx, negative idx, score)`.
fn best_opposite_pair(items: &mut [Item], tol: f64) -> Option<(usize, usize, f64)> {
    items.sort_by(|a, b| a.key.total_cmp(&b.key).then(a.idx.cmp(&b.idx)));
    let mut pos: VecDeque<usize> = VecDeque::new();
    let mut neg: VecDeque<usize> = VecDeque::new();
    let mut best: Option<(usize, usize, f64)> = None;
    let mut l = 0;
    for r in 0..items.len() {
        let q = items[r].q;
        if q > 0.0 {
            while pos.back().is_some_and(|&b| items[b].q <= q) {
                pos.pop_back();
            }
            pos.push_back(r);
        } else if q < 0.0 {
            while neg.back().is_some_and(|&b| items[b].q >= q) {
                neg.pop_back();
            }
            neg.push_back(r);
        }
        while items[r].key - items[l].key > tol {
            l += 1;
        }
        while pos.front().is_some_and(|&f| f < l) {
            pos.pop_front();
        }
        while neg.front().is_some_and(|&f| f < l) {
            neg.pop_front();
        }
        if let (Some(&p), Some(&m)) = (pos.front(), neg.front()) {
            let score = items[p].q.min(-items[m].q);
            if best.is_none_or(|b| score > b.2) {
                best = Some((items[p].idx, items[m].idx, score));
            }
        }
    }
    best
}

struct CircleHit {
    i: usize,
    j: usize,
    relation: Relation,
    v1: f64,
    v2: f64,
}

/// Witness search for a curve on a circle given by its unwrapped angle
/// `phi` and tangential speeds `p = (projected radius) * dphi/dt`.
fn circle_search(phi: &[f64], p: &[f64], tol: f64) -> Option<CircleHit> {
    let n = phi.len();
    if n < 4 {
        return None;
    }
    let mut items = Vec::with_capacity(2 * n);
    for i in 1..n - 1 {
        let w = phi[i].rem_euclid(TAU);
        let (key, o) = if w < PI { (w, 1.0) } else { (w - PI, -1.0) };
        // Tangent at phi + pi is minus the tangent at phi.
        items.push(Item { key, q: o * p[i], idx: i });
        if key < tol {
            items.push(Item { key: key + PI, q: -o * p[i], idx: i });
        }
    }
    let (a, b, _) = best_opposite_pair(&mut items, tol)?;
    let (i, j) = (a.min(b), a.max(b));
    let d = (phi[j] - phi[i]).rem_euclid(TAU);
    let relation = if d.min(TAU - d) <= PI / 2.0 { Relation::Coincide } else { Relation::Antipodal };
    let v2 = match relation {
        Relation::Coincide => p[j],
        Relation::Antipodal => -p[j],
    };
    Some(CircleHit { i, j, relation, v1: p[i], v2 })
}

/// Runs the search with tolerance `tol`, relaxing it once by 4x if no pair
/// meets `threshold`.
fn circle_search_relaxed(phi: &[f64], p: &[f64], tol: f64, threshold: f64) -> (Option<CircleHit>, f64) {
    let mut best_score = 0.0;
    for t in [tol, 4.0 * tol] {
        if let Some(hit) = circle_search(phi, p, t.min(PI / 4.0)) {
            let score = hit.v1.abs().min(hit.v2.abs());
            if score >= threshold * (1.0 - WITNESS_RTOL) {
                return (Some(hit), score);
            }
            best_score = f64::max(best_score, score);
        }
    }
    (None, best_score)
}

fn unwrap_angles(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len());
    let mut prev = b[0].atan2(a[0]);
    out.push(prev);
    let mut acc = prev;
    for k in 1..a.len() {
        let cur = b[k].atan2(a[k]);
        let mut d = cur - prev;
        if d > PI {
            d -= TAU;
        } else if d < -PI {
            d += TAU;
        }
        acc += d;
        out.push(acc);
        prev = cur;
    }
    out
}

/// Least-squares circle through points of a plane curve, in the plane's
/// own coordinates. Returns the plane basis, center and radius.
fn fit_circle(c: &Curve) -> Result<(Vec<Vec<f64>>, Vec<f64>, f64)> {
    let n = c.dim();
    let m = c.len() as f64;
    let mean: Vec<f64> = (0..n).map(|k| c.points().map(|p| p[k]).sum::<f64>() / m).collect();
    let mut cov = DMatrix::<f64>::zeros(n, n);
    for p in c.points() {
        let d = sub(p, &mean);
        for a in 0..n {
            for b in 0..n {
                cov[(a, b)] += d[a] * d[b];
            }
        }
    }
    let basis = top_eigenvectors(cov, 2);
    let coords: Vec<[f64; 2]> = c
        .points()
        .map(|p| {
            let d = sub(p, &mean);
            [dot(&d, &basis[0]), dot(&d, &basis[1])]
        })
        .collect();
    // x^2 + y^2 + a x + b y + e = 0
    let mut ata = nalgebra::Matrix3::<f64>::zeros();
    let mut atb = nalgebra::Vector3::<f64>::zeros();
    for [x, y] in &coords {
        let row = nalgebra::Vector3::new(*x, *y, 1.0);
        ata += row * row.transpose();
        atb += row * (-(x * x + y * y));
    }
    let sol = ata.lu().solve(&atb).ok_or_else(|| Error::InvalidCurve("curve does not determine a circle".into()))?;
    let (cx, cy) = (-sol[0] / 2.0, -sol[1] / 2.0);
    let r2 = cx * cx + cy * cy - sol[2];
    if !(r2 > 0.0) {
        return Err(Error::InvalidCurve("curve does not determine a circle".into()));
    }
    let r = r2.sqrt();
    let center: Vec<f64> = (0..n).map(|k| mean[k] + cx * basis[0][k] + cy * basis[1][k]).collect();
    let worst = c
        .points()
        .map(|p| {
            let d = sub(p, &center);
            let inplane = [dot(&d, &basis[0]), dot(&d, &basis[1])];
            let off = (norm(&d).powi(2) - inplane[0].powi(2) - inplane[1].powi(2)).max(0.0).sqrt();
            (inplane[0].hypot(inplane[1]) - r).abs().max(off)
        })
        .fold(0.0, f64::max);
    if worst > 1e-6 * r.max(1.0) {
        return Err(Error::InvalidCurve(format!("samples deviate from a circle by {worst:e}")));
    }
    Ok((basis, center, r))
}

fn top_eigenvectors(m: DMatrix<f64>, k: usize) -> Vec<Vec<f64>> {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    order.iter().take(k).map(|&i| eig.eigenvectors.column(i).iter().copied().collect()).collect()
}

/// Witness for a curve lying on a circle of radius `R`: two times at which
/// it passes the same or antipodal points with opposite velocities of
/// size at least `(theta - 4)/(4 theta) * s/T`, or `s/(4T)` if closed.
pub fn find_circle_witness(c: &Curve, theta: f64) -> Result<EquatorWitness> {
    if !(theta > 4.0) {
        return Err(Error::InvalidInput(format!("theta must exceed 4, got {theta}")));
    }
    let (plane, center, r) = fit_circle(c)?;
    let a: Vec<f64> = c.points().map(|p| dot(&sub(p, &center), &plane[0])).collect();
    let b: Vec<f64> = c.points().map(|p| dot(&sub(p, &center), &plane[1])).collect();
    let phi = unwrap_angles(&a, &b);
    let length = r * phi.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>();
    let required = TAU * r * theta;
    if !(length > required) {
        return Err(Error::PreconditionLength { length, required });
    }
    let (t0, t1) = (c.start_time(), c.end_time());
    let factor = if c.is_closed() { 0.25 } else { (theta - 4.0) / (4.0 * theta) };
    let threshold = factor * length / (t1 - t0);
    let p: Vec<f64> = derivative(&phi, c.times()).into_iter().map(|w| r * w).collect();
    let tol = TAU / (c.len() as f64).sqrt();
    let (hit, best) = circle_search_relaxed(&phi, &p, tol, threshold);
    let hit = hit.ok_or_else(|| {
        Error::WitnessNotFound(format!("best opposite pair reaches {best:.6e}, threshold {threshold:.6e}"))
    })?;
    let w = EquatorWitness {
        plane,
        tau1: c.times()[hit.i],
        tau2: c.times()[hit.j],
        relation: hit.relation,
        v_proj_1: hit.v1,
        v_proj_2: hit.v2,
        theta,
        threshold,
        length,
        t_start: t0,
        t_end: t1,
    };
    if w.is_valid() {
        Ok(w)
    } else {
        Err(Error::WitnessNotFound("candidate failed re-check".into()))
    }
}

/// Dominant 2-plane of the curve's angular momentum `sum x ^ dx`.
fn angular_momentum_plane(c: &Curve) -> Vec<Vec<f64>> {
    let n = c.dim();
    let mut a = DMatrix::<f64>::zeros(n, n);
    let pts: Vec<&[f64]> = c.points().collect();
    for w in pts.windows(2) {
        let d = sub(w[1], w[0]);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] += w[0][i] * d[j] - d[i] * w[0][j];
            }
        }
    }
    let ata = a.transpose() * &a;
    if ata.amax() == 0.0 {
        let mut e = vec![vec![0.0; n]; 2];
        e[0][0] = 1.0;
        e[1][1] = 1.0;
        return e;
    }
    top_eigenvectors(ata, 2)
}

/// Searches candidate planes for an equator witness of a spherical curve of
/// length `s > 2 pi theta`: the principal angular-momentum plane first, then
/// `trials - 1` Haar-random planes. A plane is used when the longitude
/// projection onto its great circle keeps at least 99% of the length.
pub fn find_equator_witness(s: &SphericalCurve, theta: f64, trials: usize, seed: u64) -> Result<EquatorWitness> {
    if !(theta > 4.0) {
        return Err(Error::InvalidInput(format!("theta must exceed 4, got {theta}")));
    }
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be positive".into()));
    }
    let c = s.curve();
    let length = s.length();
    let required = TAU * theta;
    if !(length > required) {
        return Err(Error::PreconditionLength { length, required });
    }
    let (t0, t1) = (c.start_time(), c.end_time());
    let threshold = (theta - 4.0) / (4.0 * theta) * length / (t1 - t0);
    let tol = TAU / (c.len() as f64).sqrt();
    let n = c.dim();
    let mut rng = sampling::rng(seed);
    let mut best = 0.0f64;
    let mut usable = 0usize;
    for trial in 0..trials {
        let plane = if trial == 0 {
            angular_momentum_plane(c)
        } else {
            let g = sampling::haar_orthogonal(&mut rng, n);
            vec![g.column(0).iter().copied().collect(), g.column(1).iter().copied().collect()]
        };
        let a: Vec<f64> = c.points().map(|p| dot(p, &plane[0])).collect();
        let b: Vec<f64> = c.points().map(|p| dot(p, &plane[1])).collect();
        let rho: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x.hypot(*y)).collect();
        if rho.iter().any(|r| *r < 1e-9) {
            continue;
        }
        let phi = unwrap_angles(&a, &b);
        let projected = phi.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>();
        if projected < 0.99 * length {
            continue;
        }
        usable += 1;
        let p: Vec<f64> = derivative(&phi, c.times()).iter().zip(&rho).map(|(w, r)| w * r).collect();
        let (hit, score) = circle_search_relaxed(&phi, &p, tol, threshold);
        best = best.max(score);
        if let Some(hit) = hit {
            let w = EquatorWitness {
                plane,
                tau1: c.times()[hit.i],
                tau2: c.times()[hit.j],
                relation: hit.relation,
                v_proj_1: hit.v1,
                v_proj_2: hit.v2,
                theta,
                threshold,
                length,
                t_start: t0,
                t_end: t1,
            };
            if w.is_valid() {
                return Ok(w);
            }
        }
    }
    Err(Error::WitnessNotFound(format!(
        "{usable} of {trials} planes kept the projected length; best opposite pair {best:.6e}, threshold {threshold:.6e}"
    )))
}

/// Line witness for a curve of length `s > theta C_n R` inside a ball of
/// radius `R`: two times with (nearly) equal projections on a line and
/// opposite projected velocities of size at least `(theta - 8)/(4 theta) * s/T`.
///
/// `R` and the ball center come from [`Curve::bounding_ball`]. Candidate
/// directions: the principal direction of `sum v v^T`, then `trials - 1`
/// Haar-random directions. Positions match within `2R / sqrt(n)`, relaxed
/// once by 4x.
pub fn find_euclidean_witness(c: &Curve, theta: f64, trials: usize, seed: u64) -> Result<EuclideanWitness> {
    if !(theta > 8.0) {
        return Err(Error::InvalidInput(format!("theta must exceed 8, got {theta}")));
    }
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be positive".into()));
    }
    let n = c.dim();
    let consts = crofton_constants(n)?;
    let (center, radius) = c.bounding_ball();
    let length = c.length();
    let required = theta * consts.big_c_n * radius;
    if !(length > required) {
        return Err(Error::PreconditionLength { length, required });
    }
    let (t0, t1) = (c.start_time(), c.end_time());
    let threshold = (theta - 8.0) / (4.0 * theta) * length / (t1 - t0);
    let tol = 2.0 * radius / (c.len() as f64).sqrt();

    let pts: Vec<&[f64]> = c.points().collect();
    let mut cov = DMatrix::<f64>::zeros(n, n);
    for w in pts.windows(2) {
        let d = sub(w[1], w[0]);
        for a in 0..n {
            for b in 0..n {
                cov[(a, b)] += d[a] * d[b];
            }
        }
    }
    let principal = top_eigenvectors(cov, 1).remove(0);
    let mut rng = sampling::rng(seed);
    let mut best = 0.0f64;
    for trial in 0..trials {
        let dir = if trial == 0 {
            principal.clone()
        } else {
            let g = sampling::haar_orthogonal(&mut rng, n);
            g.column(0).iter().copied().collect()
        };
        let x: Vec<f64> = pts.iter().map(|p| dot(&sub(p, &center), &dir)).collect();
        let q = derivative(&x, c.times());
        for t in [tol, 4.0 * tol] {
            let mut items: Vec<Item> = (1..x.len() - 1).map(|i| Item { key: x[i], q: q[i], idx: i }).collect();
            let Some((a, b, score)) = best_opposite_pair(&mut items, t) else { continue };
            best = best.max(score);
            if score < threshold * (1.0 - WITNESS_RTOL) {
                continue;
            }
            let (i, j) = (a.min(b), a.max(b));
            let w = EuclideanWitness {
                direction: dir.clone(),
                tau1: c.times()[i],
                tau2: c.times()[j],
                position_1: x[i],
                position_2: x[j],
                v_proj_1: q[i],
                v_proj_2: q[j],
                theta,
                threshold,
                length,
                radius,
                t_start: t0,
                t_end: t1,
            };
            if w.is_valid() {
                return Ok(w);
            }
        }
    }
    Err(Error::WitnessNotFound(format!(
        "best opposite pair over {trials} directions reaches {best:.6e}, threshold {threshold:.6e}"
    )))
}
