//! Rotation of a single curve around a point or an affine subspace.
//!
//! Absolute rotation is the length of the spherical image. Each segment
//! contributes the exact great-circle angle between its blown-up endpoints;
//! the error estimate is the larger change when the odd or the even
//! interior samples are dropped,
//! plus a bound on the floating-point summation error.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::curve::{check_clearance, project_to_complement, AffineSubspace, Convention, Curve, RotationResult};
use crate::error::{Error, Result};
use crate::flow::PolarTrajectory;
use crate::vecops::angle_between;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Absolute,
    Signed,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "abs" | "absolute" => Ok(Mode::Absolute),
            "signed" => Ok(Mode::Signed),
            other => Err(Error::Parse(format!("unknown mode `{other}` (expected abs or signed)"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Absolute => "abs",
            Mode::Signed => "signed",
        })
    }
}

/// Bound on the rounding error of an `n`-term sum of nonnegative terms
/// totalling `total`.
pub(crate) fn summation_bound(n: usize, total: f64) -> f64 {
    n as f64 * f64::EPSILON * total
}

fn spherical_length(c: &Curve, x0: &[f64]) -> f64 {
    let mut prev: Vec<f64> = c.first().iter().zip(x0).map(|(a, b)| a - b).collect();
    let mut cur = vec![0.0; x0.len()];
    let mut total = 0.0;
    for p in c.points().skip(1) {
        for (k, (a, b)) in p.iter().zip(x0).enumerate() {
            cur[k] = a - b;
        }
        total += angle_between(&prev, &cur);
        std::mem::swap(&mut prev, &mut cur);
    }
    total
}

fn planar_winding(c: &Curve, x0: &[f64]) -> (f64, f64) {
    let mut signed = 0.0;
    let mut abs = 0.0;
    let pts: Vec<&[f64]> = c.points().collect();
    for w in pts.windows(2) {
        // The angle is invariant under separate positive rescaling of a and
        // b; rescaling keeps the products clear of underflow.
        let (ax, ay) = (w[0][0] - x0[0], w[0][1] - x0[1]);
        let (bx, by) = (w[1][0] - x0[0], w[1][1] - x0[1]);
        let (sa, sb) = (ax.abs().max(ay.abs()), bx.abs().max(by.abs()));
        let (ax, ay, bx, by) = (ax / sa, ay / sa, bx / sb, by / sb);
        let d = (ax * by - ay * bx).atan2(ax * bx + ay * by);
        signed += d;
        abs += d.abs();
    }
    (signed, abs)
}

/// Length (radians) of the spherical image of `c` centered at `x0`.
pub fn absolute_rotation_point(c: &Curve, x0: &[f64]) -> Result<RotationResult> {
    if x0.len() != c.dim() {
        return Err(Error::DimensionMismatch { expected: c.dim(), found: x0.len() });
    }
    check_clearance(c, x0)?;
    let full = spherical_length(c, x0);
    let even = spherical_length(&c.every_other(), x0);
    let odd = spherical_length(&c.every_other_odd(), x0);
    let err = (full - even).abs().max((full - odd).abs()) + summation_bound(c.len(), full);
    Ok(RotationResult::new(full, err, Convention::AbsoluteRadians))
}

/// Signed winding number (turns) of a planar curve around `x0`.
pub fn signed_winding_plane(c: &Curve, x0: &[f64]) -> Result<RotationResult> {
    if c.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: c.dim() });
    }
    if x0.len() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: x0.len() });
    }
    check_clearance(c, x0)?;
    let (full, abs) = planar_winding(c, x0);
    let (even, _) = planar_winding(&c.every_other(), x0);
    let (odd, _) = planar_winding(&c.every_other_odd(), x0);
    let err = ((full - even).abs().max((full - odd).abs()) + summation_bound(c.len(), abs)) / TAU;
    Ok(RotationResult::new(full / TAU, err, Convention::SignedTurns))
}

/// Rotation of `c` around an affine subspace, measured on the projection of
/// `c` to the orthogonal complement.
///
/// Signed rotation needs codimension 2; the sign follows the orientation of
/// the subspace's complement basis.
pub fn rotation_around_subspace(c: &Curve, l: &AffineSubspace, mode: Mode) -> Result<RotationResult> {
    if mode == Mode::Signed && l.codim() != 2 {
        return Err(Error::CodimensionError(l.codim()));
    }
    let projected = project_to_complement(c, l)?;
    let origin = vec![0.0; projected.dim()];
    match mode {
        Mode::Absolute => absolute_rotation_point(&projected, &origin),
        Mode::Signed => signed_winding_plane(&projected, &origin),
    }
}

/// Dispatches on the observer: a point (codimension `n`) or a proper subspace.
pub fn rotation_around(c: &Curve, l: &AffineSubspace, mode: Mode) -> Result<RotationResult> {
    if l.dim() == 0 {
        match mode {
            Mode::Absolute => absolute_rotation_point(c, l.base()),
            Mode::Signed => signed_winding_plane(c, l.base()),
        }
    } else {
        rotation_around_subspace(c, l, mode)
    }
}

fn polar_sums(p: &PolarTrajectory) -> (f64, f64) {
    let phis = p.phis();
    let mut signed = 0.0;
    let mut abs = 0.0;
    for w in phis.windows(2) {
        let d = w[1] - w[0];
        signed += d;
        abs += d.abs();
    }
    (signed, abs)
}

/// Rotation around the axis of a trajectory integrated in cylindrical
/// coordinates. Between samples the projected curve is taken to move
/// monotonically in angle, so each segment contributes `|delta phi|`.
pub fn rotation_polar(p: &PolarTrajectory, mode: Mode) -> Result<RotationResult> {
    if p.len() < 2 {
        return Err(Error::InvalidCurve("need at least 2 samples".into()));
    }
    let (signed, abs) = polar_sums(p);
    let (signed_half, abs_half) = polar_sums(&p.every_other());
    Ok(match mode {
        Mode::Absolute => RotationResult::new(
            abs,
            (abs - abs_half).abs() + summation_bound(p.len(), abs),
            Convention::AbsoluteRadians,
        ),
        Mode::Signed => RotationResult::new(
            signed / TAU,
            ((signed - signed_half).abs() + summation_bound(p.len(), abs)) / TAU,
            Convention::SignedTurns,
        ),
    })
}
