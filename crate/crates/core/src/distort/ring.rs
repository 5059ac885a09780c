use serde::{Deserialize, Serialize};

use crate::distort::functional::sphere_points;
use crate::distort::map::{Correspondence, SampledMap};
use crate::error::{domain, Result};
use crate::geom::Point;
use crate::grid::Lattice;
use crate::modfam::{discrete_modulus, ring_modulus_exact, CellRole, CurveConstraint, GridScene, SolverOptions};

/// Spherical ring `r < |x - center| < R`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ring {
    pub center: Point,
    pub r: f64,
    pub big_r: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RingQcOptions {
    /// Cells across the shortest side of the image bounding box.
    pub cells: usize,
    pub solver: SolverOptions,
}

impl Default for RingQcOptions {
    fn default() -> Self {
        RingQcOptions { cells: 96, solver: SolverOptions::default() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RingRow {
    pub ring: Ring,
    /// Exact modulus of the input ring family.
    pub input_modulus: f64,
    pub image_modulus: Option<f64>,
    pub gap: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RingQcReport {
    pub c1: f64,
    /// Largest image modulus over the rings that ran.
    pub c2_observed: f64,
    pub rows: Vec<RingRow>,
}

/// Image scene of a ring: F1 is the image of the closed inner ball, F2 everything
/// outside the image of the open outer ball.
pub fn image_ring_scene(f: &SampledMap, ring: &Ring, cells: usize) -> Result<GridScene> {
    let dim = f.dim();
    let outer: Option<Vec<Point>> = sphere_points(dim, &ring.center, ring.big_r, f.spacing()).iter().map(|p| f.forward(p)).collect();
    let Some(outer) = outer else { return domain("outer sphere leaves the sampled domain") };
    let mut lo = Point([f64::INFINITY; 3]);
    let mut hi = Point([f64::NEG_INFINITY; 3]);
    for p in &outer {
        for k in 0..dim {
            lo.0[k] = lo.0[k].min(p.0[k]);
            hi.0[k] = hi.0[k].max(p.0[k]);
        }
    }
    let short = (0..dim).map(|k| hi.0[k] - lo.0[k]).fold(f64::INFINITY, f64::min);
    let h = short / cells as f64;
    let mut shape = [1usize; 3];
    let mut origin = Point::ORIGIN;
    for k in 0..dim {
        shape[k] = ((hi.0[k] - lo.0[k]) / h).ceil() as usize + 6;
        origin.0[k] = (lo.0[k] + hi.0[k]) / 2.0 - shape[k] as f64 * h / 2.0;
    }
    let lattice = Lattice::new(dim, shape, origin, h)?;
    let s = GridScene::from_classifier(lattice, |y| match f.backward(y) {
        None => CellRole::Target,
        Some(p) => {
            let d = p.dist(&ring.center);
            if d <= ring.r {
                CellRole::Source
            } else if d < ring.big_r {
                CellRole::Free
            } else {
                CellRole::Target
            }
        }
    });
    s.validate()?;
    Ok(s)
}

/// Runs the ring-modulus test: every ring must satisfy `md Γ(A) <= c1`, and the
/// report holds the largest discrete modulus of the image ring families.
pub fn ring_qc_test(f: &SampledMap, rings: &[Ring], c1: f64, opts: &RingQcOptions) -> Result<RingQcReport> {
    if rings.is_empty() {
        return domain("no rings given");
    }
    let n = f.dim();
    let mut rows = Vec::with_capacity(rings.len());
    let mut c2: f64 = 0.0;
    for ring in rings {
        let mut row = RingRow { ring: *ring, input_modulus: f64::NAN, image_modulus: None, gap: None, error: None };
        match ring_modulus_exact(n, ring.r, ring.big_r) {
            Err(e) => row.error = Some(e.to_string()),
            Ok(m) => {
                row.input_modulus = m;
                if m > c1 * (1.0 + 1e-12) {
                    row.error = Some(format!("ring modulus {m:.6} exceeds C1 = {c1:.6}"));
                } else if f.boundary_distance(&ring.center) <= ring.big_r {
                    row.error = Some("ring closure is not inside the sampled domain".into());
                } else {
                    match image_ring_scene(f, ring, opts.cells).and_then(|s| discrete_modulus(&s, CurveConstraint::Unconstrained, &opts.solver)) {
                        Ok(res) => {
                            c2 = c2.max(res.value);
                            row.image_modulus = Some(res.value);
                            row.gap = Some(res.gap);
                        }
                        Err(e) => row.error = Some(e.to_string()),
                    }
                }
            }
        }
        rows.push(row);
    }
    Ok(RingQcReport { c1, c2_observed: c2, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distort::map::LinearMap;
    use std::f64::consts::TAU;

    fn ring(c: (f64, f64), big_r: f64) -> Ring {
        Ring { center: Point::new2(c.0, c.1), r: big_r / std::f64::consts::E, big_r }
    }

    #[test]
    fn identity_reproduces_input() {
        let f = SampledMap::on_cube(2, 101, -1.0, 1.0, |p| *p).unwrap();
        let rep = ring_qc_test(&f, &[ring((0.0, 0.0), 0.6)], TAU, &RingQcOptions { cells: 64, ..Default::default() }).unwrap();
        let v = rep.rows[0].image_modulus.unwrap();
        assert!((v / TAU - 1.0).abs() < 0.05, "{v}");
    }

    #[test]
    fn stretch_within_k_bound() {
        let a = LinearMap::diag(&[2.0, 1.0]);
        let f = SampledMap::on_cube(2, 101, -1.0, 1.0, |p| a.apply(p)).unwrap();
        let rep = ring_qc_test(&f, &[ring((0.1, 0.0), 0.5)], TAU, &RingQcOptions { cells: 48, ..Default::default() }).unwrap();
        assert!(rep.c2_observed <= 2.0 * TAU && rep.c2_observed > TAU / 2.0, "{}", rep.c2_observed);
    }

    #[test]
    fn bad_rings_are_reported_per_row() {
        let f = SampledMap::on_cube(2, 41, -1.0, 1.0, |p| *p).unwrap();
        let rings = [ring((0.0, 0.0), 1.5), Ring { center: Point::ORIGIN, r: 0.3, big_r: 0.31 }];
        let rep = ring_qc_test(&f, &rings, TAU, &RingQcOptions { cells: 32, ..Default::default() }).unwrap();
        assert!(rep.rows.iter().all(|r| r.error.is_some()));
        assert_eq!(rep.c2_observed, 0.0);
    }
}
