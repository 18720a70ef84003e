//! Vector-field catalog and Lipschitz-constant estimation.
//!
//! The catalog holds the planar spiral with a sink at the origin and a limit
//! cycle on the unit circle, the smooth 3-space "twist" field whose
//! trajectory through the origin winds infinitely often around the
//! `x1`-axis in finite time, and user-supplied constant, linear and affine
//! fields.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::curve::AffineSubspace;
use crate::error::{Error, Result};
use crate::sampling;
use crate::vecops::{dist, dot};

/// Below this `x1` the twist field's correction terms are under `e^{-10^6}`
/// and the field is returned as exactly `(1, 0, 0)`.
pub const TWIST_CUTOFF: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub enum FieldKind {
    /// `((r^2-1)x - y, (r^2-1)y + x)`.
    Spiral2d,
    /// `(1, w1'(x1), w2'(x1))` with `w = e^{-1/x1^2}(cos(1/x1), sin(1/x1))` for `x1 > 0`.
    Twist3d,
    Linear(DMatrix<f64>),
    Constant(Vec<f64>),
    Affine(DMatrix<f64>, Vec<f64>),
}

/// An evaluatable vector field on `R^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSpec {
    dim: usize,
    kind: FieldKind,
}

impl FieldSpec {
    pub fn spiral2d() -> Self {
        FieldSpec { dim: 2, kind: FieldKind::Spiral2d }
    }

    pub fn twist3d() -> Self {
        FieldSpec { dim: 3, kind: FieldKind::Twist3d }
    }

    pub fn constant(v: Vec<f64>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::InvalidInput("constant field needs at least one component".into()));
        }
        Ok(FieldSpec { dim: v.len(), kind: FieldKind::Constant(v) })
    }

    pub fn linear(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::InvalidInput(format!(
                "linear field needs a square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(FieldSpec { dim: m.nrows(), kind: FieldKind::Linear(m) })
    }

    /// Linear field from row-major entries; the dimension is `sqrt(len)`.
    pub fn linear_row_major(entries: &[f64]) -> Result<Self> {
        let n = (entries.len() as f64).sqrt().round() as usize;
        if n * n != entries.len() || n == 0 {
            return Err(Error::InvalidInput(format!("{} entries do not form a square matrix", entries.len())));
        }
        Self::linear(DMatrix::from_row_slice(n, n, entries))
    }

    pub fn affine(m: DMatrix<f64>, b: Vec<f64>) -> Result<Self> {
        if !m.is_square() || m.nrows() != b.len() || b.is_empty() {
            return Err(Error::InvalidInput("affine field needs an n x n matrix and an n-vector".into()));
        }
        Ok(FieldSpec { dim: b.len(), kind: FieldKind::Affine(m, b) })
    }

    /// The sink `diag(l1) (+) [[a, b], [-b, a]]`: eigenvalues `l1` and `a +- ib`.
    /// Solutions are `x1 = C1 e^{l1 t}`, `x2 = C e^{at} sin(bt + p)`, `x3 = C e^{at} cos(bt + p)`.
    pub fn linear_sink(l1: f64, alpha: f64, beta: f64) -> Self {
        let m = DMatrix::from_row_slice(3, 3, &[l1, 0.0, 0.0, 0.0, alpha, beta, 0.0, -beta, alpha]);
        FieldSpec { dim: 3, kind: FieldKind::Linear(m) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &FieldKind {
        &self.kind
    }

    /// The matrix of a linear or affine field.
    pub fn matrix(&self) -> Option<&DMatrix<f64>> {
        match &self.kind {
            FieldKind::Linear(m) | FieldKind::Affine(m, _) => Some(m),
            _ => None,
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(x, &mut out);
        out
    }

    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        match &self.kind {
            FieldKind::Spiral2d => {
                let (a, b) = (x[0], x[1]);
                let s = a * a + b * b - 1.0;
                out[0] = s * a - b;
                out[1] = s * b + a;
            }
            FieldKind::Twist3d => {
                let w = twist_velocity_offset(x[0]);
                out[0] = 1.0;
                out[1] = w[0];
                out[2] = w[1];
            }
            FieldKind::Constant(v) => out.copy_from_slice(v),
            FieldKind::Linear(m) => {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = (0..self.dim).map(|j| m[(i, j)] * x[j]).sum();
                }
            }
            FieldKind::Affine(m, b) => {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = b[i] + (0..self.dim).map(|j| m[(i, j)] * x[j]).sum::<f64>();
                }
            }
        }
    }

    /// Rates of `(along, ln rho, phi)` for a point written in cylindrical
    /// coordinates about a codimension-2 subspace `axis`:
    /// `x = base + B along + rho (cos phi u + sin phi v)`.
    ///
    /// Returns the along-axis velocity, `d ln(rho)/dt` and `d phi/dt`. The
    /// radius enters only through `ln_rho`, so trajectories that approach the
    /// axis faster than `f64` can represent (the twist field near `x1 = 0`)
    /// keep full relative precision.
    pub fn polar_rates(&self, axis: &AffineSubspace, along: &[f64], ln_rho: f64, phi: f64) -> (Vec<f64>, f64, f64) {
        let cb = axis.complement_basis();
        let (c, s) = (phi.cos(), phi.sin());
        let rho = ln_rho.exp();
        let x = axis.compose(along, &[rho * c, rho * s]);
        let radial: Vec<f64> = cb[0].iter().zip(&cb[1]).map(|(u, v)| c * u + s * v).collect();
        let tangential: Vec<f64> = cb[0].iter().zip(&cb[1]).map(|(u, v)| -s * u + c * v).collect();
        match &self.kind {
            FieldKind::Twist3d => {
                // v = e1 + e^{-1/x1^2} (0, g(x1)); the twisted part is divided by rho in log space
                // so it survives when both factors underflow.
                let (ln_scale, g) = twist_factored(x[0]);
                let gv = [0.0, g[0], g[1]];
                let inv_rho = (-ln_rho).exp();
                let over_rho = |e: f64| if e == 0.0 { 0.0 } else { e * inv_rho };
                let factor = if ln_scale == f64::NEG_INFINITY { 0.0 } else { (ln_scale - ln_rho).exp() };
                let scale = if ln_scale == f64::NEG_INFINITY { 0.0 } else { ln_scale.exp() };
                let along_rates = axis.basis().iter().map(|b| b[0] + scale * dot(b, &gv)).collect();
                let dr = over_rho(radial[0]) + factor * dot(&gv, &radial);
                let dphi = over_rho(tangential[0]) + factor * dot(&gv, &tangential);
                (along_rates, dr, dphi)
            }
            _ => {
                let v = self.eval(&x);
                let along_rates = axis.basis().iter().map(|b| dot(&v, b)).collect();
                (along_rates, dot(&v, &radial) / rho, dot(&v, &tangential) / rho)
            }
        }
    }

    /// Parses the field mini-language: `spiral2d`, `twist3d`,
    /// `linear:a11,a12,...`, `constant:v1,...`, `affine:a11,...,ann,b1,...,bn`.
    pub fn parse(spec: &str) -> Result<Self> {
        spec.parse()
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, args) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a)),
            None => (s, None),
        };
        let numbers = |a: Option<&str>| -> Result<Vec<f64>> {
            let a = a.ok_or_else(|| Error::Parse(format!("field `{name}` needs comma-separated numbers")))?;
            parse_numbers(a)
        };
        match name {
            "spiral2d" => Ok(FieldSpec::spiral2d()),
            "twist3d" => Ok(FieldSpec::twist3d()),
            "constant" => FieldSpec::constant(numbers(args)?),
            "linear" => FieldSpec::linear_row_major(&numbers(args)?),
            "affine" => {
                let v = numbers(args)?;
                // n^2 + n entries
                let n = (((1.0 + 4.0 * v.len() as f64).sqrt() - 1.0) / 2.0).round() as usize;
                if n == 0 || n * n + n != v.len() {
                    return Err(Error::Parse(format!("affine field needs n^2 + n entries, got {}", v.len())));
                }
                FieldSpec::affine(DMatrix::from_row_slice(n, n, &v[..n * n]), v[n * n..].to_vec())
            }
            other => Err(Error::Parse(format!("unknown field `{other}`"))),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &mut dyn Iterator<Item = f64>| v.map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match &self.kind {
            FieldKind::Spiral2d => write!(f, "spiral2d"),
            FieldKind::Twist3d => write!(f, "twist3d"),
            FieldKind::Constant(v) => write!(f, "constant:{}", join(&mut v.iter().copied())),
            FieldKind::Linear(m) => write!(f, "linear:{}", join(&mut m.transpose().iter().copied())),
            FieldKind::Affine(m, b) => {
                write!(f, "affine:{},{}", join(&mut m.transpose().iter().copied()), join(&mut b.iter().copied()))
            }
        }
    }
}

/// Parses `"1,2.5,-3"` into numbers.
pub fn parse_numbers(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(|t| t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("`{}`: {e}", t.trim())))).collect()
}

/// `(w1(x1), w2(x1))`: the offset of the twist diffeomorphism, zero for `x1 <= 0`.
pub fn twist_offset(x1: f64) -> [f64; 2] {
    if x1 <= 0.0 {
        return [0.0, 0.0];
    }
    let e = (-1.0 / (x1 * x1)).exp();
    let a = 1.0 / x1;
    [e * a.cos(), e * a.sin()]
}

/// `(w1'(x1), w2'(x1))`.
pub fn twist_velocity_offset(x1: f64) -> [f64; 2] {
    if x1 < TWIST_CUTOFF {
        return [0.0, 0.0];
    }
    let (ln_scale, g) = twist_factored(x1);
    let e = ln_scale.exp();
    [e * g[0], e * g[1]]
}

/// `w'(x1) = e^{ln_scale} g(x1)` with `ln_scale = -1/x1^2`; `ln_scale = -inf` below the cutoff.
pub fn twist_factored(x1: f64) -> (f64, [f64; 2]) {
    if x1 < TWIST_CUTOFF {
        return (f64::NEG_INFINITY, [0.0, 0.0]);
    }
    let a = 1.0 / x1;
    let (s, c) = a.sin_cos();
    let a2 = a * a;
    let a3 = a2 * a;
    (-a2, [2.0 * a3 * c + a2 * s, 2.0 * a3 * s - a2 * c])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LipschitzMethod {
    Analytic,
    Sampled,
}

/// A Lipschitz constant over a ball. Sampled values are lower bounds of the
/// true supremum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LipschitzEstimate {
    pub k: f64,
    pub center: Vec<f64>,
    pub radius: f64,
    pub method: LipschitzMethod,
    pub sample_count: usize,
}

/// Largest singular value.
pub fn operator_norm(m: &DMatrix<f64>) -> f64 {
    m.clone().singular_values().max()
}

/// Largest real part of the eigenvalues of `m`.
pub fn max_eigen_real_part(m: &DMatrix<f64>) -> f64 {
    m.complex_eigenvalues().iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
}

/// Lipschitz constant on `B(center, radius)`.
///
/// Linear and affine fields get the operator norm of their matrix, constant
/// fields get zero; the other kinds use [`sampled_lipschitz`] with `n` pairs.
pub fn estimate_lipschitz(
    f: &FieldSpec,
    center: &[f64],
    radius: f64,
    n: usize,
    seed: u64,
) -> Result<LipschitzEstimate> {
    if n < 2 {
        return Err(Error::InvalidInput("need at least 2 sample pairs".into()));
    }
    if center.len() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), found: center.len() });
    }
    let analytic = match f.kind() {
        FieldKind::Linear(m) | FieldKind::Affine(m, _) => Some(operator_norm(m)),
        FieldKind::Constant(_) => Some(0.0),
        _ => None,
    };
    Ok(match analytic {
        Some(k) => {
            LipschitzEstimate { k, center: center.to_vec(), radius, method: LipschitzMethod::Analytic, sample_count: 0 }
        }
        None => sampled_lipschitz(f, center, radius, n, seed),
    })
}

/// Maximum of `|v(x) - v(y)| / |x - y|` over `n` seeded uniform pairs in the ball.
pub fn sampled_lipschitz(f: &FieldSpec, center: &[f64], radius: f64, n: usize, seed: u64) -> LipschitzEstimate {
    let mut rng = sampling::rng(seed);
    let mut best = 0.0f64;
    let mut vx = vec![0.0; f.dim()];
    let mut vy = vec![0.0; f.dim()];
    for _ in 0..n {
        let x = sampling::point_in_ball(&mut rng, center, radius);
        let y = sampling::point_in_ball(&mut rng, center, radius);
        let d = dist(&x, &y);
        if d == 0.0 {
            continue;
        }
        f.eval_into(&x, &mut vx);
        f.eval_into(&y, &mut vy);
        best = best.max(dist(&vx, &vy) / d);
    }
    LipschitzEstimate { k: best, center: center.to_vec(), radius, method: LipschitzMethod::Sampled, sample_count: n }
}

/// Matrix-vector product helper for callers holding nalgebra matrices.
pub fn mat_vec(m: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    (m * DVector::from_column_slice(x)).iter().copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn spiral_values() {
        let f = FieldSpec::spiral2d();
        assert_eq!(f.eval(&[0.0, 0.0]), vec![0.0, 0.0]);
        assert_eq!(f.eval(&[1.0, 0.0]), vec![0.0, 1.0]);
    }

    #[test]
    fn twist_is_trivial_for_nonpositive_x1() {
        let f = FieldSpec::twist3d();
        assert_eq!(f.eval(&[-1.0, 3.0, 4.0]), vec![1.0, 0.0, 0.0]);
        assert_eq!(f.eval(&[0.0, 0.0, 0.0]), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn twist_is_continuous_at_zero() {
        let f = FieldSpec::twist3d();
        for eps in [1e-2, 1e-3] {
            let v = f.eval(&[eps, 0.0, 0.0]);
            assert!(dist(&v, &[1.0, 0.0, 0.0]) < 1e-30);
        }
    }

    #[test]
    fn twist_derivative_matches_finite_difference() {
        for x in [0.2, 0.35, 0.7, 1.5] {
            let h = 1e-6;
            let (a, b) = (twist_offset(x + h), twist_offset(x - h));
            let fd = [(a[0] - b[0]) / (2.0 * h), (a[1] - b[1]) / (2.0 * h)];
            let d = twist_velocity_offset(x);
            let scale = d[0].abs().max(d[1].abs());
            assert!((fd[0] - d[0]).abs() < 1e-6 * scale.max(1e-12), "x={x}");
            assert!((fd[1] - d[1]).abs() < 1e-6 * scale.max(1e-12), "x={x}");
        }
    }

    #[test]
    fn parse_round_trip() {
        for s in ["spiral2d", "twist3d", "constant:1,0,0", "linear:-1,0,0,-1", "affine:1,2,3,4,5,6"] {
            let f = FieldSpec::parse(s).unwrap();
            assert_eq!(FieldSpec::parse(&f.to_string()).unwrap(), f);
        }
        assert!(FieldSpec::parse("linear:1,2,3").is_err());
        assert!(FieldSpec::parse("affine:1,2,3").is_err());
        assert!(FieldSpec::parse("vortex").is_err());
        let f = FieldSpec::parse("affine:1,2,3,4,5,6").unwrap();
        assert_eq!(f.eval(&[1.0, 1.0]), vec![8.0, 13.0]);
    }

    #[test]
    fn analytic_constants() {
        let c = FieldSpec::constant(vec![1.0, 2.0]).unwrap();
        assert_eq!(estimate_lipschitz(&c, &[0.0, 0.0], 1.0, 10, 1).unwrap().k, 0.0);
        let l = FieldSpec::linear(DMatrix::from_diagonal_element(3, 3, -1.0)).unwrap();
        let e = estimate_lipschitz(&l, &[0.0; 3], 1.0, 10, 1).unwrap();
        assert!((e.k - 1.0).abs() < 1e-12);
        assert_eq!(e.method, LipschitzMethod::Analytic);
        let sink = FieldSpec::linear_sink(-1.0, -1.0, 2.0);
        assert!((operator_norm(sink.matrix().unwrap()) - 5f64.sqrt()).abs() < 1e-12);
        assert!((max_eigen_real_part(sink.matrix().unwrap()) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn spiral_sampled_estimate_matches_dense_oracle() {
        // Max difference quotient over 10^6 uniform pairs in B(0, 1.2),
        // computed offline with an independent NumPy sampler.
        const ORACLE: f64 = 3.3759556704904483;
        let e = estimate_lipschitz(&FieldSpec::spiral2d(), &[0.0, 0.0], 1.2, 200_000, 42).unwrap();
        assert_eq!(e.method, LipschitzMethod::Sampled);
        assert!((e.k - ORACLE).abs() <= 0.05 * ORACLE, "k = {}", e.k);
    }

    #[test]
    fn sampling_is_deterministic() {
        let f = FieldSpec::spiral2d();
        let a = sampled_lipschitz(&f, &[0.0, 0.0], 1.0, 1000, 9);
        let b = sampled_lipschitz(&f, &[0.0, 0.0], 1.0, 1000, 9);
        assert_eq!(a, b);
    }

    fn matrix3() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-3.0f64..3.0, 9)
    }

    proptest! {
        #[test]
        fn sampled_never_exceeds_operator_norm(entries in matrix3(), seed in 0u64..1000) {
            let f = FieldSpec::linear_row_major(&entries).unwrap();
            let analytic = operator_norm(f.matrix().unwrap());
            let sampled = sampled_lipschitz(&f, &[0.5, -0.2, 1.0], 2.0, 200, seed);
            prop_assert!(sampled.k <= analytic + 1e-9);
        }

        #[test]
        fn lipschitz_inequality_holds(entries in matrix3(), seed in 0u64..1000) {
            let f = FieldSpec::linear_row_major(&entries).unwrap();
            let k = operator_norm(f.matrix().unwrap());
            let mut rng = sampling::rng(seed);
            for _ in 0..50 {
                let x = sampling::point_in_ball(&mut rng, &[0.0; 3], 3.0);
                let y = sampling::point_in_ball(&mut rng, &[0.0; 3], 3.0);
                let lhs = dist(&f.eval(&x), &f.eval(&y));
                prop_assert!(lhs <= (k + 1e-12) * dist(&x, &y) + 1e-12);
            }
        }
    }
}
