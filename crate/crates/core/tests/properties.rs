use proptest::prelude::*;

use sixvertex::affine::{affine_curvature, reparametrize_affine};
use sixvertex::curve::{apply_transform, ClosedCurve, PlaneTransform};
use sixvertex::periodic::{count_sign_changes, PeriodicFunction};
use sixvertex::settings::Settings;
use sixvertex::sturm::{random_band_limited, FundamentalSystem, LinearPeriodicODE};

const N: usize = 256;
const CURVE_GRID: usize = 1024;
const MAX_CURVATURE_RATIO: f64 = 20.0;

fn settings() -> Settings {
    Settings::default()
}

fn band_limited() -> impl Strategy<Value = PeriodicFunction> {
    any::<u64>().prop_map(|seed| random_band_limited(N, seed, &settings()))
}

/// max / min of the Euclidean curvature on the grid.
fn curvature_ratio(c: &ClosedCurve) -> f64 {
    let kappa: Vec<f64> = (0..c.grid_size())
        .map(|j| {
            let x = j as f64 / c.grid_size() as f64;
            let (d1, d2) = (c.derivative(x, 1), c.derivative(x, 2));
            (d1[0] * d2[1] - d1[1] * d2[0]) / d1[0].hypot(d1[1]).powi(3)
        })
        .collect();
    kappa.iter().copied().fold(0.0, f64::max) / kappa.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Circle plus small harmonics 2 and 3, convex and not nearly flat anywhere.
fn convex_curve() -> impl Strategy<Value = ClosedCurve> {
    (0.7..1.4f64, prop::array::uniform8(-0.04..0.04f64)).prop_filter_map("not well conditioned", |(b, h)| {
        let fx = [(0.0, 0.0), (1.0, 0.0), (h[0], h[1]), (h[2], h[3])];
        let fy = [(0.0, 0.0), (0.0, b), (h[4], h[5]), (h[6], h[7])];
        let c = ClosedCurve::from_fourier(&fx, &fy, CURVE_GRID).ok()?;
        (c.convexity().globally_convex && curvature_ratio(&c) <= MAX_CURVATURE_RATIO).then_some(c)
    })
}

fn near_identity() -> impl Strategy<Value = PlaneTransform> {
    prop::array::uniform9(-0.2..0.2f64).prop_filter_map("singular", |e| {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = e[3 * i + j] + if i == j { 1.0 } else { 0.0 };
            }
        }
        PlaneTransform::new(m).ok()
    })
}

fn unimodular() -> impl Strategy<Value = PlaneTransform> {
    (0.0..std::f64::consts::TAU, 0.6..1.6f64, -0.8..0.8f64, -2.0..2.0f64, -2.0..2.0f64).prop_map(|(t, s, k, a, b)| {
        let (c, sn) = (t.cos(), t.sin());
        let m = [[c * s, c * k - sn / s], [sn * s, sn * k + c / s]];
        PlaneTransform::affine(m, [a, b]).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn integrating_a_derivative_recovers_the_function(f in band_limited()) {
        let back = f.differentiate(1).antiderivative_periodic();
        let start = f.values()[0];
        let err = (0..N).map(|j| (back.values()[j] + start - f.values()[j]).abs()).fold(0.0, f64::max);
        prop_assert!(err < 1e-10, "{err:e}");
    }

    #[test]
    fn grid_and_coefficients_agree(f in band_limited()) {
        let back = PeriodicFunction::from_coefficients(f.coefficients(), N).unwrap();
        prop_assert!((&back - &f).max_abs() < 1e-12 * f.max_abs());
    }

    #[test]
    fn sign_changes_ignore_positive_weights(f in band_limited(), w in band_limited()) {
        let s = settings();
        let weight = w.map(|v| (0.5 * v).exp());
        let a = count_sign_changes(&f, &s).unwrap().count;
        let b = count_sign_changes(&(&f * &weight), &s).unwrap().count;
        prop_assert_eq!(a, b);
        prop_assert_eq!(a % 2, 0);
    }

    #[test]
    fn adjoint_is_consistent(f in band_limited(), g in band_limited(), u in band_limited()) {
        let ode = LinearPeriodicODE::new(vec![&u * 2.0, u.shifted(0.3), u.reversed()]).unwrap();
        let lhs = (&ode.apply(&f) * &g).integrate();
        let rhs = (&f * &ode.apply_adjoint(&g)).integrate();
        let scale = ode.term_scale(&f) * g.max_abs();
        prop_assert!((lhs - rhs).abs() < 1e-9 * scale);
        // the normal form describes the same operator up to the sign (-1)^n
        let normal = ode.adjoint().apply(&g);
        prop_assert!((&normal + &ode.apply_adjoint(&g)).max_abs() < 1e-9 * ode.term_scale(&g).max(1.0));
    }

    #[test]
    fn liouville_holds(u in band_limited(), v in band_limited()) {
        let ode = LinearPeriodicODE::new(vec![&u * 4.0, v.clone(), &v * 0.5]).unwrap();
        let fs = FundamentalSystem::new(&ode, &settings()).unwrap();
        prop_assert!(fs.liouville_defect().abs() < 1e-8);
    }

    #[test]
    fn transform_then_inverse_is_identity(c in convex_curve(), t in near_identity()) {
        let image = match apply_transform(&c, &t) {
            Ok(image) => image,
            Err(_) => return Ok(()),
        };
        let back = apply_transform(&image, &t.inverse()).unwrap();
        let err = (0..N)
            .map(|j| {
                let x = j as f64 / N as f64;
                let (p, q) = (c.point(x), back.point(x));
                (p[0] - q[0]).hypot(p[1] - q[1])
            })
            .fold(0.0, f64::max);
        prop_assert!(err < 1e-9, "{err:e}");
    }

    #[test]
    fn affine_curvature_is_equivariant(c in convex_curve(), t in unimodular()) {
        let s = settings();
        let p = reparametrize_affine(&c, &s).unwrap();
        prop_assert!(p.unimodularity_defect() < 1e-8, "{:e}", p.unimodularity_defect());
        let k = affine_curvature(&p, &s).unwrap();
        let image = apply_transform(&c, &t).unwrap();
        let pi = reparametrize_affine(&image, &s).unwrap();
        let ki = affine_curvature(&pi, &s).unwrap();
        prop_assert!((pi.total_length() - p.total_length()).abs() < 1e-7);
        // k carries units of length^(-4/3), so the drift is measured against its size
        let drift = (&ki.k - &k.k).max_abs() / k.k.max_abs().max(1.0);
        prop_assert!(drift < 1e-7, "{drift:e}");
    }
}
