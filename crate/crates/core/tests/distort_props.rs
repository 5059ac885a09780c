use exdist::distort::{eccentric_distortion_ladder, metric_distortion, EccentricOptions, LinearMap, SampledMap};
use exdist::geom::Point;
use proptest::prelude::*;

fn sampled(a: LinearMap) -> SampledMap {
    SampledMap::on_cube(2, 101, -1.0, 1.0, |p| a.apply(p)).unwrap()
}

fn singular_ratio(m: &LinearMap) -> f64 {
    let [[a, b, _], [c, d, _], _] = m.matrix;
    let t = a * a + b * b + c * c + d * d;
    let det = (a * d - b * c).abs();
    let s = (t * t - 4.0 * det * det).max(0.0).sqrt();
    ((t + s) / (t - s)).sqrt()
}

fn linear() -> impl Strategy<Value = LinearMap> {
    (0.5f64..2.0, 0.5f64..2.0, 0.0f64..3.14, 0.5f64..2.0).prop_map(|(sx, sy, ang, k)| {
        let r = LinearMap::rotation_scale(ang, k);
        let d = LinearMap::diag(&[sx, sy]);
        let mut m = LinearMap::diag(&[1.0, 1.0]);
        for i in 0..2 {
            for j in 0..2 {
                m.matrix[i][j] = r.matrix[i][0] * d.matrix[0][j] + r.matrix[i][1] * d.matrix[1][j];
            }
        }
        m
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn metric_distortion_of_linear_maps(m in linear()) {
        let f = sampled(m);
        let h = metric_distortion(&f, &Point::new2(0.05, -0.1), &[0.2, 0.1, 0.05]).unwrap().h;
        let exact = singular_ratio(&m);
        prop_assert!((h / exact - 1.0).abs() < 0.05, "{h} vs {exact}");
    }

    #[test]
    fn scaling_the_range_changes_nothing(m in linear(), k in 0.25f64..4.0) {
        let mut scaled = m;
        for row in scaled.matrix.iter_mut().take(2) {
            for v in row.iter_mut().take(2) {
                *v *= k;
            }
        }
        let x = Point::new2(0.0, 0.1);
        let a = metric_distortion(&sampled(m), &x, &[0.2, 0.1]).unwrap().h;
        let b = metric_distortion(&sampled(scaled), &x, &[0.2, 0.1]).unwrap().h;
        prop_assert!((a / b - 1.0).abs() < 1e-6, "{a} vs {b}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 6, ..ProptestConfig::default() })]

    #[test]
    fn eccentric_ladder_invariants(m in linear()) {
        let f = sampled(m);
        let opts = EccentricOptions::default();
        let ladder = eccentric_distortion_ladder(&f, &Point::new2(0.0, 0.0), &[0.2, 0.15, 0.1], &opts).unwrap();
        prop_assert_eq!(ladder.len(), 3);
        for w in ladder.windows(2) {
            prop_assert!(w[0].r > w[1].r);
            prop_assert!(w[1].value >= w[0].value - 1e-12, "estimate must not drop as r shrinks");
        }
        for e in &ladder {
            prop_assert!(e.value >= 1.0);
            prop_assert!(e.value <= e.ball_best.min(e.pullback_best) + 1e-12);
            // A linear map sends round balls to ellipses of eccentricity at most its distortion.
            prop_assert!(e.value <= singular_ratio(&m) * (1.0 + 2.0 * opts.resolution));
        }
    }
}

#[test]
fn conformal_maps_have_unit_eccentric_distortion() {
    let f = sampled(LinearMap::rotation_scale(0.7, 1.3));
    let opts = EccentricOptions::default();
    let e = eccentric_distortion_ladder(&f, &Point::new2(0.1, 0.0), &[0.15, 0.1], &opts).unwrap();
    assert!(e.iter().all(|v| (v.value - 1.0).abs() <= opts.resolution), "{e:?}");
}
