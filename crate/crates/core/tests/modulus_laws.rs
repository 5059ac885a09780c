//! Modulus laws on small grids, checked against the certified bounds: the
//! true discrete modulus lies in `[lower, value]`, so comparisons between two
//! families use the lower bound of one and the upper of the other.

use exdist::grid::Lattice;
use exdist::geom::Point;
use exdist::modfam::{discrete_modulus, CellRole, CurveConstraint, GridScene, ModulusResult, SolverOptions};
use proptest::prelude::*;

fn solve(s: &GridScene, c: CurveConstraint) -> ModulusResult {
    discrete_modulus(s, c, &SolverOptions::with_tol(1e-3)).unwrap()
}

fn rect(n: usize) -> GridScene {
    GridScene::rectangle(1.0, 1.0, n).unwrap()
}

#[test]
fn rectangle_matches_width_over_length() {
    for (l, w) in [(1.0, 1.0), (2.0, 1.0), (1.0, 2.0)] {
        let v = solve(&GridScene::rectangle(l, w, 32).unwrap(), CurveConstraint::Unconstrained).value;
        let exact = w / l;
        assert!((v / exact - 1.0).abs() < 0.08, "{l}x{w}: {v} vs {exact}");
    }
}

#[test]
fn serial_law() {
    // Curves across a 2x1 rectangle cross both unit halves.
    let whole = solve(&GridScene::rectangle(2.0, 1.0, 32).unwrap(), CurveConstraint::Unconstrained);
    let half = solve(&GridScene::rectangle(1.0, 1.0, 16).unwrap(), CurveConstraint::Unconstrained);
    assert!(1.0 / whole.lower >= (2.0 / half.value) * (1.0 - 1e-9), "{} vs {}", whole.lower, half.value);
}

#[test]
fn subadditive_over_split_target() {
    let n = 16;
    let base = rect(n);
    let lat = base.lattice.clone();
    let split = |upper: bool| {
        GridScene::from_classifier(lat.clone(), |p| {
            if p.x() < 0.0 {
                CellRole::Source
            } else if p.x() > 1.0 {
                if (p.y() >= 0.5) == upper { CellRole::Target } else { CellRole::Wall }
            } else {
                CellRole::Free
            }
        })
    };
    let full = solve(&base, CurveConstraint::Unconstrained);
    let a = solve(&split(false), CurveConstraint::Unconstrained);
    let b = solve(&split(true), CurveConstraint::Unconstrained);
    assert!(full.lower <= a.value + b.value, "{} > {} + {}", full.lower, a.value, b.value);
    assert!(a.lower <= full.value && b.lower <= full.value);
}

#[test]
fn blocked_family_is_empty() {
    let mut s = rect(12);
    let [nx, ny, _] = s.lattice.shape;
    for j in 0..ny {
        s.obstacle.insert(s.lattice.index([nx / 2, j, 0]));
    }
    let r = solve(&s, CurveConstraint::Avoid);
    assert!(r.infeasible && r.value == 0.0);
    assert!(!solve(&s, CurveConstraint::Budget(1)).infeasible);
}

#[test]
fn three_dimensional_slab() {
    // Unit cube crossed between opposite faces: modulus 1 for p = n = 3.
    let n = 10;
    let h = 1.0 / n as f64;
    let lat = Lattice::new(3, [n + 2, n, n], Point::new3(-h, 0.0, 0.0), h).unwrap();
    let s = GridScene::from_classifier(lat, |p| {
        if p.x() < 0.0 {
            CellRole::Source
        } else if p.x() > 1.0 {
            CellRole::Target
        } else {
            CellRole::Free
        }
    });
    let v = solve(&s, CurveConstraint::Unconstrained).value;
    assert!((v - 1.0).abs() < 0.05, "{v}");
}

fn obstacles() -> impl Strategy<Value = Vec<(usize, usize)>> {
    prop::collection::vec((0usize..10, 0usize..10), 0..25)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn constraints_are_ordered(cells in obstacles()) {
        let mut s = rect(10);
        for (i, j) in cells {
            s.obstacle.insert(s.lattice.index([i + 1, j, 0]));
        }
        let full = solve(&s, CurveConstraint::Unconstrained);
        let one = solve(&s, CurveConstraint::Budget(1));
        let avoid = solve(&s, CurveConstraint::Avoid);
        prop_assert!(avoid.lower <= one.value);
        prop_assert!(one.lower <= full.value);
        prop_assert!(avoid.lower <= full.value);
    }

    #[test]
    fn walls_decrease_modulus(cells in obstacles()) {
        let s = rect(10);
        let mut walled = s.clone();
        for (i, j) in cells {
            walled.u.set(walled.lattice.index([i + 1, j, 0]), false);
        }
        let a = solve(&walled, CurveConstraint::Unconstrained);
        let b = solve(&s, CurveConstraint::Unconstrained);
        prop_assert!(a.lower <= b.value);
        prop_assert!(a.gap <= 1e-3 + 1e-12 || a.infeasible);
    }
}
