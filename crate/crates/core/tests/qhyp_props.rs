use exdist::geom::Point;
use exdist::qhyp::{qh_distance, qh_distances, whitney_decompose, PolygonDomain, QhOptions};
use proptest::prelude::*;

fn disk() -> PolygonDomain {
    PolygonDomain::disk(Point::new2(0.0, 0.0), 1.0, 256).unwrap()
}

fn interior() -> impl Strategy<Value = Point> {
    (0.0f64..0.8, 0.0f64..std::f64::consts::TAU).prop_map(|(r, a)| Point::new2(r * a.cos(), r * a.sin()))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn distances_form_a_metric(pts in prop::collection::vec(interior(), 3..6)) {
        let d = qh_distances(&disk(), &pts, &QhOptions { cells: 64 }).unwrap();
        let n = pts.len();
        for i in 0..n {
            prop_assert_eq!(d[i][i], 0.0);
            for j in 0..n {
                prop_assert_eq!(d[i][j], d[j][i]);
                for k in 0..n {
                    prop_assert!(d[i][k] <= d[i][j] + d[j][k] + 1e-9 * (1.0 + d[i][k]));
                }
            }
        }
    }

    #[test]
    fn radial_distance_in_the_disk(r in 0.2f64..0.8) {
        // k(0, x) = log 1/(1 - |x|) in the unit disk.
        let v = qh_distance(&disk(), &Point::new2(0.0, 0.0), &Point::new2(r, 0.0), &QhOptions { cells: 128 }).unwrap().value;
        let exact = (1.0 / (1.0 - r)).ln();
        prop_assert!((v / exact - 1.0).abs() < 0.06, "{v} vs {exact}");
    }

    #[test]
    fn lower_bound_by_distance_ratio(a in interior(), b in interior()) {
        // k(a, b) >= log(1 + |a - b| / min(δ(a), δ(b))).
        let dom = disk();
        let v = qh_distance(&dom, &a, &b, &QhOptions { cells: 64 }).unwrap().value;
        let bound = (1.0 + a.dist(&b) / dom.delta(&a).min(dom.delta(&b))).ln();
        prop_assert!(v >= bound * 0.97, "{v} < {bound}");
    }

    #[test]
    fn geodesics_are_chains(a in interior(), b in interior()) {
        let dom = disk();
        let w = whitney_decompose(&dom, 7).unwrap();
        let path = qh_distance(&dom, &a, &b, &QhOptions { cells: 64 }).unwrap();
        let chain = w.cube_chain(path.geodesic.as_ref().unwrap());
        prop_assert!(!chain.is_empty());
        prop_assert_eq!(w.chain_breaks(&chain), 0);
    }
}

#[test]
fn whitney_invariants_on_several_domains() {
    let doms = [
        disk(),
        PolygonDomain::rectangle(0.0, 0.0, 2.0, 1.0).unwrap(),
        PolygonDomain::comb(4, 0.1, 0.5).unwrap(),
        PolygonDomain::exponential_cusp(500).unwrap(),
    ];
    for dom in &doms {
        let w = whitney_decompose(dom, 6).unwrap();
        assert!(w.check.all(), "{:?}", w.check);
        assert!(!w.cubes.is_empty());
        let (lo, hi) = dom.bbox();
        assert!(w.area() <= (hi.x() - lo.x()) * (hi.y() - lo.y()));
    }
}
