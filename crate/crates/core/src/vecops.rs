//! Small dense-vector helpers on `&[f64]`.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Below this sum of squares, terms may have underflowed.
const SAFE_SQUARES_LOW: f64 = 1e-280;
const SAFE_SQUARES_HIGH: f64 = 1e280;

/// Euclidean norm, rescaled when squaring would under- or overflow.
#[inline]
pub fn norm(a: &[f64]) -> f64 {
    let s = dot(a, a);
    if (SAFE_SQUARES_LOW..SAFE_SQUARES_HIGH).contains(&s) {
        return s.sqrt();
    }
    scaled_norm(a)
}

fn scaled_norm(a: &[f64]) -> f64 {
    let m = max_abs(a);
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    m * a.iter().map(|x| (x / m) * (x / m)).sum::<f64>().sqrt()
}

#[inline]
pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[inline]
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[inline]
pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

#[inline]
pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    let s: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    if (SAFE_SQUARES_LOW..SAFE_SQUARES_HIGH).contains(&s) {
        return s.sqrt();
    }
    scaled_norm(&sub(a, b))
}

/// `a + s * (b - a)`.
#[inline]
pub fn lerp(a: &[f64], b: &[f64], s: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * (y - x)).collect()
}

#[inline]
pub fn cross3(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Angle in `[0, pi]` between two nonzero vectors.
///
/// Uses `2 atan2(|a^ - b^|, |a^ + b^|)`, which stays accurate for nearly
/// parallel and nearly antiparallel pairs.
pub fn angle_between(a: &[f64], b: &[f64]) -> f64 {
    let na = norm(a);
    let nb = norm(b);
    let mut diff = 0.0;
    let mut sum = 0.0;
    for (x, y) in a.iter().zip(b) {
        let (u, v) = (x / na, y / nb);
        diff += (u - v) * (u - v);
        sum += (u + v) * (u + v);
    }
    2.0 * diff.sqrt().atan2(sum.sqrt())
}

/// Distance from `p` to the segment `[a, b]`.
pub fn point_segment_distance(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ab = sub(b, a);
    let ap = sub(p, a);
    let len2 = dot(&ab, &ab);
    if len2 == 0.0 {
        return norm(&ap);
    }
    let s = (dot(&ap, &ab) / len2).clamp(0.0, 1.0);
    let mut d2 = 0.0;
    for i in 0..p.len() {
        let q = a[i] + s * ab[i] - p[i];
        d2 += q * q;
    }
    d2.sqrt()
}

/// Minimum distance between segments `[p0, p1]` and `[q0, q1]` in any dimension.
pub fn segment_segment_distance(p0: &[f64], p1: &[f64], q0: &[f64], q1: &[f64]) -> f64 {
    let d1 = sub(p1, p0);
    let d2 = sub(q1, q0);
    let r = sub(p0, q0);
    let a = dot(&d1, &d1);
    let e = dot(&d2, &d2);
    let f = dot(&d2, &r);
    let (s, t);
    if a <= f64::MIN_POSITIVE && e <= f64::MIN_POSITIVE {
        return norm(&r);
    }
    if a <= f64::MIN_POSITIVE {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = dot(&d1, &r);
        if e <= f64::MIN_POSITIVE {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = dot(&d1, &d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > 0.0 { ((b * f - c * e) / denom).clamp(0.0, 1.0) } else { 0.0 };
            let mut t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            t = t0;
        }
    }
    let mut d2sum = 0.0;
    for i in 0..p0.len() {
        let x = p0[i] + s * d1[i] - q0[i] - t * d2[i];
        d2sum += x * x;
    }
    d2sum.sqrt()
}
