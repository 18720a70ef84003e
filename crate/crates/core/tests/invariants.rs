use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use proptest::prelude::*;
use trajrot_core::bounds::{any_point_bound, check_any_point_bound, pair_bound, refined_pair_bound, KChoice};
use trajrot_core::fields::operator_norm;
use trajrot_core::scenarios::unit_circle_xy;
use trajrot_core::*;

fn min_distance(a: &Curve, b: &Curve) -> f64 {
    let mut best = f64::INFINITY;
    for p in a.points() {
        for q in b.points() {
            let d: f64 = p.iter().zip(q).map(|(x, y)| (x - y) * (x - y)).sum();
            best = best.min(d);
        }
    }
    best.sqrt()
}

fn transform(c: &Curve, q: &DMatrix<f64>, shift: &[f64]) -> Curve {
    c.map_points(|p| (0..3).map(|i| (0..3).map(|j| q[(i, j)] * p[j]).sum::<f64>() + shift[i]).collect()).unwrap()
}

/// Circle of radius `r` around `center`, in a plane drawn from `seed`.
fn tilted_circle(r: f64, center: [f64; 3], seed: u64, n: usize) -> Curve {
    let q = sampling::haar_orthogonal(&mut sampling::rng(seed), 3);
    transform(&unit_circle_xy(n).map_points(|p| p.iter().map(|x| r * x).collect()).unwrap(), &q, &center)
}

/// Open arc of a tilted circle: three quarters of a turn.
fn tilted_arc(r: f64, center: [f64; 3], seed: u64, n: usize) -> Curve {
    let q = sampling::haar_orthogonal(&mut sampling::rng(seed), 3);
    let arc = Curve::from_fn(0.0, 1.5 * PI, n, false, |t| vec![r * t.cos(), r * t.sin(), 0.3 * t]).unwrap();
    transform(&arc, &q, &center)
}

fn within(a: &RotationResult, b: &RotationResult, extra: f64) -> bool {
    (a.value - b.value).abs() <= a.error_estimate + b.error_estimate + extra
}

fn center() -> impl Strategy<Value = [f64; 3]> {
    [-2.5f64..2.5, -2.5f64..2.5, -2.5f64..2.5]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn gauss_is_symmetric(r in 0.3f64..1.5, c in center(), seed in 0u64..1000, closed in any::<bool>()) {
        let a = unit_circle_xy(200);
        let b = if closed { tilted_circle(r, c, seed, 200) } else { tilted_arc(r, c, seed, 200) };
        prop_assume!(min_distance(&a, &b) > 0.2);
        for mode in [Mode::Signed, Mode::Absolute] {
            let ab = gauss_rotation_pair(&a, &b, mode).unwrap();
            let ba = gauss_rotation_pair(&b, &a, mode).unwrap();
            prop_assert!(within(&ab, &ba, 1e-12), "{mode:?}: {} vs {}", ab.value, ba.value);
        }
    }

    #[test]
    fn gauss_signed_is_dominated(r in 0.3f64..1.5, c in center(), seed in 0u64..1000) {
        let a = unit_circle_xy(200);
        let b = tilted_arc(r, c, seed, 200);
        prop_assume!(min_distance(&a, &b) > 0.2);
        let s = gauss_rotation_pair(&a, &b, Mode::Signed).unwrap();
        let t = gauss_rotation_pair(&a, &b, Mode::Absolute).unwrap();
        prop_assert!(t.value >= 0.0);
        prop_assert!(s.value.abs() <= t.value + s.error_estimate + t.error_estimate);
    }

    #[test]
    fn gauss_rigid_motion(r in 0.3f64..1.5, c in center(), seed in 0u64..1000, motion in 0u64..1000) {
        let a = unit_circle_xy(150);
        let b = tilted_arc(r, c, seed, 150);
        prop_assume!(min_distance(&a, &b) > 0.2);
        let mut rng = sampling::rng(motion);
        let q = sampling::haar_orthogonal(&mut rng, 3);
        let shift = sampling::gaussian_vector(&mut rng, 3);
        let det = q.determinant();
        for mode in [Mode::Signed, Mode::Absolute] {
            let before = gauss_rotation_pair(&a, &b, mode).unwrap();
            let after = gauss_rotation_pair(&transform(&a, &q, &shift), &transform(&b, &q, &shift), mode).unwrap();
            let expected = if mode == Mode::Signed { det * before.value } else { before.value };
            prop_assert!((after.value - expected).abs() < 1e-9, "{mode:?}: {} vs {}", after.value, expected);
        }
    }

    #[test]
    fn gauss_is_additive_over_concatenation(r in 0.3f64..1.5, c in center(), seed in 0u64..1000, cut in 20usize..180) {
        let a = unit_circle_xy(200);
        let b = tilted_arc(r, c, seed, 200);
        prop_assume!(min_distance(&a, &b) > 0.2);
        let tm = b.times()[cut];
        let first = b.window(b.start_time(), tm).unwrap();
        let second = b.window(tm, b.end_time()).unwrap();
        for mode in [Mode::Signed, Mode::Absolute] {
            let whole = gauss_rotation_pair(&a, &b, mode).unwrap();
            let p1 = gauss_rotation_pair(&a, &first, mode).unwrap();
            let p2 = gauss_rotation_pair(&a, &second, mode).unwrap();
            let sum = p1.value + p2.value;
            let err = whole.error_estimate + p1.error_estimate + p2.error_estimate + 1e-12;
            prop_assert!((whole.value - sum).abs() <= err, "{mode:?}: {} vs {}", whole.value, sum);
        }
    }

    #[test]
    fn signed_rotation_survives_deformation(amp in prop::array::uniform4(-0.5f64..0.5)) {
        let circle = unit_circle_xy(400);
        let path = |v: [f64; 4]| {
            Curve::from_fn(0.0, 1.0, 400, false, move |s| {
                let (s1, s2) = ((PI * s).sin(), (TAU * s).sin());
                vec![v[0] * s1 + v[2] * s2, v[1] * s1 + v[3] * s2, -2.0 + 4.0 * s]
            })
            .unwrap()
        };
        let deformed = path(amp);
        prop_assume!(min_distance(&circle, &deformed) >= 0.1);
        let base = gauss_rotation_pair(&circle, &path([0.0; 4]), Mode::Signed).unwrap();
        let moved = gauss_rotation_pair(&circle, &deformed, Mode::Signed).unwrap();
        prop_assert!(within(&base, &moved, 0.0), "{} vs {}", base.value, moved.value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    /// Around a stationary point the rotation rate is at most K, so the
    /// margin of `4 + K T` can only grow with the window.
    #[test]
    fn any_point_margin_grows_around_a_stationary_point(seed in 0u64..10_000) {
        let mut rng = sampling::rng(seed);
        let m: Vec<f64> = sampling::gaussian_vector(&mut rng, 9);
        let f = FieldSpec::linear_row_major(&m).unwrap();
        let k = KChoice::given(operator_norm(f.matrix().unwrap())).unwrap();
        let x0 = sampling::unit_vector(&mut rng, 3);
        let origin = [0.0; 3];
        let observers = [Observer::Point(origin.to_vec())];
        let traj = integrate_observed(&f, &x0, 0.0, 2.0, &IntegratorConfig::default(), &observers).unwrap();
        let mut last: Option<bounds::BoundReport> = None;
        for t in [0.25, 0.5, 1.0, 1.5, 2.0] {
            let rep = check_any_point_bound(&traj, &origin, (0.0, t), k).unwrap();
            prop_assert!(rep.satisfied);
            if let Some(prev) = &last {
                let slack = prev.combined_error() + rep.combined_error() + 1e-12;
                prop_assert!(rep.margin >= prev.margin - slack, "T={t}: {} < {}", rep.margin, prev.margin);
            }
            last = Some(rep);
        }
    }

    #[test]
    fn refined_bound_with_fallback_is_the_coarse_bound(k in 0.0f64..20.0, t1 in 0.0f64..50.0, t2 in 0.0f64..50.0) {
        let refined = refined_pair_bound(k, any_point_bound(k, t1), any_point_bound(k, t2), t1, t2);
        let coarse = pair_bound(k, t1, t2);
        prop_assert!((refined - coarse).abs() <= 1e-12 * coarse.abs().max(1.0));
    }

    #[test]
    fn circle_witnesses_revalidate(turns in 5usize..9, wobble in 0.0f64..0.4, phase in 0.0f64..TAU) {
        // Closed loop winding `turns` times with non-uniform speed.
        let n = 400 * turns;
        let c = Curve::from_fn(0.0, 1.0, n, true, |t| {
            let a = turns as f64 * TAU * t + wobble * (TAU * t + phase).sin();
            vec![a.cos(), a.sin()]
        })
        .unwrap();
        let theta = 4.0 + 0.5 * (turns as f64 - 4.0);
        let w = find_circle_witness(&c, theta).unwrap();
        prop_assert!(w.is_valid());
        prop_assert!(w.t_start < w.tau1 && w.tau1 < w.tau2 && w.tau2 < w.t_end);
        prop_assert!(w.v_proj_1.signum() == -w.v_proj_2.signum());
    }

    #[test]
    fn triangle_wave_witnesses_revalidate(sweeps in 2usize..8, extra in 0.5f64..3.0) {
        let total = 5.0 * TAU + extra * TAU;
        let amp = total / sweeps as f64;
        let c = Curve::from_fn(0.0, 1.0, 600 * sweeps, false, |t| {
            let u = t * sweeps as f64;
            let k = u.floor();
            let f = u - k;
            let a = if (k as i64) % 2 == 0 { amp * f } else { amp * (1.0 - f) };
            vec![a.cos(), a.sin()]
        })
        .unwrap();
        let w = find_circle_witness(&c, 5.0).unwrap();
        prop_assert!(w.is_valid());
        prop_assert!(w.tau1 < w.tau2);
    }
}
