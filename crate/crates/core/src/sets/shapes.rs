//! Ready-made sets used by the experiments.

use crate::error::{domain, Result};
use crate::geom::Point;
use crate::modfam::GridScene;
use crate::sets::line::IntervalSet;
use crate::sets::model::{packing_set, RasterRule, SetModel};
use crate::sets::planar::{PackingSpec, Polygon, Primitives};
use crate::sets::rat::{qi, qr, QPoint, Q};

/// Unit square minus the open middle squares of the first `generation` carpet levels.
pub fn sierpinski_carpet(generation: u32) -> Result<SetModel> {
    let mut squares = vec![(qi(0), qi(0), qi(1))];
    let mut packed = Vec::new();
    for _ in 0..generation {
        let mut next = Vec::with_capacity(squares.len() * 8);
        for (x, y, s) in squares {
            let t = &s / qi(3);
            for i in 0..3i64 {
                for j in 0..3i64 {
                    let (x0, y0) = (&x + &t * qi(i), &y + &t * qi(j));
                    if i == 1 && j == 1 {
                        packed.push(Polygon::rect(x0.clone(), y0.clone(), &x0 + &t, &y0 + &t));
                    } else {
                        next.push((x0, y0, t.clone()));
                    }
                }
            }
        }
        squares = next;
    }
    packing_set(PackingSpec { outer: Polygon::rect(qi(0), qi(0), qi(1), qi(1)), packed })
}

/// Triangle `(0,0), (1,0), (1/2,1)` minus the open middle triangles of the first
/// `generation` levels; the residual area is `(3/4)^generation` of the triangle.
pub fn gasket(generation: u32) -> Result<SetModel> {
    let outer = [QPoint::new(qi(0), qi(0)), QPoint::new(qi(1), qi(0)), QPoint::new(qr(1, 2), qi(1))];
    let mid = |a: &QPoint, b: &QPoint| a.lerp(b, &qr(1, 2));
    let mut tris = vec![outer.clone()];
    let mut packed = Vec::new();
    for _ in 0..generation {
        let mut next = Vec::with_capacity(tris.len() * 3);
        for [a, b, c] in tris {
            let (ab, bc, ca) = (mid(&a, &b), mid(&b, &c), mid(&c, &a));
            packed.push(Polygon { vertices: vec![ab.clone(), bc.clone(), ca.clone()] });
            next.push([a, ab.clone(), ca.clone()]);
            next.push([ab, b, bc.clone()]);
            next.push([ca, bc, c]);
        }
        tris = next;
    }
    packing_set(PackingSpec { outer: Polygon { vertices: outer.to_vec() }, packed })
}

/// Boundary of a regular `sides`-gon inscribed in the circle (as segments with
/// the exact values of the `f64` vertices).
pub fn circle_curve(cx: f64, cy: f64, r: f64, sides: usize) -> SetModel {
    let v: Vec<QPoint> = (0..sides)
        .map(|i| {
            let a = std::f64::consts::TAU * i as f64 / sides as f64;
            QPoint::from_f64(cx + r * a.cos(), cy + r * a.sin())
        })
        .collect();
    let segments = (0..sides).map(|i| [v[i].clone(), v[(i + 1) % sides].clone()]).collect();
    SetModel::Primitives(Primitives::from_segments(segments))
}

/// Planar annulus scene whose obstacle is a separating circle of radius about
/// `(r + R) / 2` with one free cell on the positive first axis, so every path
/// that avoids the obstacle runs through that cell. The circle passes through
/// cell centres there, which keeps the wall one cell thick around the hole.
pub fn pinhole_annulus(r: f64, big_r: f64, n: usize) -> Result<GridScene> {
    let mut s = GridScene::annulus(2, r, big_r, n)?;
    let h = s.spacing();
    let Some(hole) = s.lattice.locate(&Point::new2(0.5 * (r + big_r), 0.5 * h)) else {
        return domain("pinhole lies outside the lattice");
    };
    let wall = s.lattice.center(hole).x();
    if wall - 2.0 * h <= r || wall + 2.0 * h >= big_r {
        return domain("grid too coarse for a wall between the boundary circles");
    }
    let sides = (8.0 * std::f64::consts::PI * wall / h).ceil().max(64.0) as usize;
    s.obstacle = circle_curve(0.0, 0.0, wall, sides).rasterize(&s.lattice, RasterRule::Closure)?;
    s.obstacle.set(hole, false);
    s.validate()?;
    Ok(s)
}

/// Fat Cantor set on `[a, b]` removing fraction `4^-k` at level k.
pub fn fat_cantor_strip(a: Q, b: Q, y0: Q, y1: Q, depth: u32) -> Result<SetModel> {
    use crate::sets::cantor::CantorSpec;
    use crate::sets::model::{make_cantor_set, product_set};
    let g = make_cantor_set(CantorSpec::fat(a, b, depth))?;
    product_set(g, SetModel::Intervals(IntervalSet::new(vec![(y0, y1)])?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modfam::{discrete_modulus, CurveConstraint, SolverOptions};
    use crate::sets::rat::f;

    #[test]
    fn pinhole_is_the_only_passage() {
        let mut s = pinhole_annulus(1.0, 4.0, 32).unwrap();
        let opts = SolverOptions::default();
        let through = discrete_modulus(&s, CurveConstraint::Avoid, &opts).unwrap();
        assert!(!through.infeasible && through.value > 0.0);
        let full = discrete_modulus(&s, CurveConstraint::Unconstrained, &opts).unwrap();
        assert!(through.value < 0.2 * full.value);
        let hole = s.lattice.locate(&Point::new2(2.5, 0.5 * s.spacing())).unwrap();
        s.obstacle.insert(hole);
        assert!(discrete_modulus(&s, CurveConstraint::Avoid, &opts).unwrap().infeasible);
    }

    #[test]
    fn carpet_generation_three() {
        let SetModel::Packing(p) = sierpinski_carpet(3).unwrap() else { panic!() };
        assert_eq!(p.spec.packed.len(), 1 + 8 + 64);
        assert_eq!(p.area(), qr(512, 729));
        assert!(p.boundary_bound <= 1);
    }

    #[test]
    fn gasket_generation_three() {
        let SetModel::Packing(p) = gasket(3).unwrap() else { panic!() };
        assert_eq!(p.spec.packed.len(), 13);
        assert_eq!(p.area(), p.spec.outer.area() * qr(27, 64));
        assert!(p.boundary_bound > 0);
    }

    #[test]
    fn circle_bbox() {
        let c = circle_curve(0.0, 0.0, 2.0, 64);
        let (lo, hi) = c.bbox().unwrap();
        assert!((f(&lo.x) + 2.0).abs() < 1e-12 && (f(&hi.y) - 2.0).abs() < 1e-3);
    }
}
