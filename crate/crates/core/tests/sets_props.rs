use exdist::grid::Lattice;
use exdist::modfam::{GridScene, SolverOptions};
use exdist::sets::rat::{qi, qr};
use exdist::sets::{
    make_cantor, make_cantor_set, packing_residual, probe_scene, CantorSpec, PackingSpec, Polygon, Primitives, QPoint,
    RasterRule, SetModel, Q,
};
use num_traits::{One, Pow};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Q> {
    (0i64..=729, 1i64..=729).prop_map(|(n, d)| qr(n.min(d), d))
}

proptest! {
    #[test]
    fn middle_thirds_measure_is_exact(depth in 0u32..9) {
        let c = make_cantor(CantorSpec::middle_thirds(depth)).unwrap();
        prop_assert_eq!(c.measure(), qr(2, 3).pow(depth as i32));
        prop_assert_eq!(c.intervals().len(), 1usize << c.represented_depth());
    }

    #[test]
    fn cantor_depth_is_nested(depth in 0u32..7, x in rational()) {
        let fine = make_cantor_set(CantorSpec::middle_thirds(depth + 1)).unwrap();
        let coarse = make_cantor_set(CantorSpec::middle_thirds(depth)).unwrap();
        let p = QPoint::new(x, Q::from_integer(0.into()));
        if fine.contains(&p) {
            prop_assert!(coarse.contains(&p));
        }
    }

    #[test]
    fn fat_cantor_keeps_positive_measure(depth in 1u32..8) {
        let c = make_cantor(CantorSpec::fat(qi(0), qi(1), depth)).unwrap();
        let next = make_cantor(CantorSpec::fat(qi(0), qi(1), depth + 1)).unwrap();
        prop_assert!(next.measure() < c.measure());
        prop_assert!(c.ideal_measure() > 0.0 && c.ideal_measure() <= num_traits::ToPrimitive::to_f64(&next.measure()).unwrap());
    }

    #[test]
    fn packing_area_is_outer_minus_packed(cells in prop::collection::btree_set((0i64..4, 0i64..4), 0..16)) {
        // Squares of side 1/5 inset in a 4 x 4 grid of unit-quarter cells.
        let packed: Vec<Polygon> = cells
            .iter()
            .map(|&(i, j)| Polygon::rect(qr(5 * i + 1, 20), qr(5 * j + 1, 20), qr(5 * i + 5, 20), qr(5 * j + 5, 20)))
            .collect();
        let k = packed.len() as i64;
        let p = packing_residual(PackingSpec { outer: Polygon::rect(qi(0), qi(0), qi(1), qi(1)), packed }).unwrap();
        prop_assert_eq!(p.area(), Q::one() - qr(k, 25));
    }

    #[test]
    fn rasterization_is_monotone(segs in prop::collection::vec((0.0f64..4.0, 0.0f64..4.0, 0.0f64..4.0, 0.0f64..4.0), 1..6)) {
        let segs: Vec<[QPoint; 2]> = segs
            .iter()
            .map(|&(a, b, c, d)| [QPoint::from_f64(a, b), QPoint::from_f64(c, d)])
            .collect();
        let lat = Lattice::cube(2, 16, 0.0, 0.25).unwrap();
        let part = SetModel::Primitives(Primitives::from_segments(segs[..1].to_vec()));
        let all = SetModel::Primitives(Primitives::from_segments(segs.clone()));
        for rule in [RasterRule::Closure, RasterRule::Diamond] {
            let a = part.rasterize(&lat, rule).unwrap();
            let b = all.rasterize(&lat, rule).unwrap();
            prop_assert!(a.is_subset(&b));
        }
        // Every endpoint lies in a marked closed cell.
        let mask = all.rasterize(&lat, RasterRule::Closure).unwrap();
        for s in &segs {
            let (x, y) = s[0].to_f64();
            let i = lat.index([((x / 0.25) as usize).min(15), ((y / 0.25) as usize).min(15), 0]);
            prop_assert!(mask[i]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn probe_values_are_ordered(cells in prop::collection::vec((0usize..12, 0usize..12), 1..30)) {
        let mut s = GridScene::rectangle(1.0, 1.0, 12).unwrap();
        for (i, j) in cells {
            s.obstacle.insert(s.lattice.index([i + 1, j, 0]));
        }
        let tol = 1e-2;
        let r = probe_scene(&s, &[1, 2, 4], &SolverOptions::with_tol(tol)).unwrap();
        prop_assert!(r.ordering_defect() <= 2.0 * tol, "{}", r.ordering_defect());
        prop_assert!(r.mod_budget.iter().all(|b| b.value <= r.mod_full * (1.0 + 2.0 * tol)));
    }
}

#[test]
fn point_set_meets_only_its_cell() {
    let lat = Lattice::cube(2, 8, 0.0, 0.125).unwrap();
    let e = SetModel::Primitives(Primitives::from_points(vec![QPoint::new(qr(3, 16), qr(5, 16))]));
    let m = e.rasterize(&lat, RasterRule::Closure).unwrap();
    assert_eq!(m.ones().collect::<Vec<_>>(), vec![lat.index([1, 2, 0])]);
    let c = lat.center(lat.index([1, 2, 0]));
    assert!((c.x() - 0.1875).abs() < 1e-12 && (c.y() - 0.3125).abs() < 1e-12);
}
