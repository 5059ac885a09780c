use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::geom::{hull2, Point};
use crate::qhyp::domain::PolygonDomain;
use crate::qhyp::metric::{qh_field, QhOptions};
use crate::qhyp::whitney::{whitney_decompose, WhitneyDecomposition};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShadowRecord {
    pub cube: u32,
    pub level: u32,
    pub side: f64,
    /// Number of boundary samples in the shadow.
    pub count: usize,
    /// `s(Q) = diam SH(Q)`.
    pub s: f64,
    /// Indices into the boundary samples.
    #[serde(skip)]
    pub members: Vec<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Shadows {
    pub root: u32,
    #[serde(skip)]
    pub samples: Vec<Point>,
    /// Tree parent of every cube; the root and unreachable cubes have none.
    pub parent: Vec<Option<u32>>,
    /// Tree distance from the root.
    pub tree_distance: Vec<f64>,
    pub records: Vec<ShadowRecord>,
    /// Samples whose nearest cube is not connected to the root.
    pub unreached_samples: usize,
    pub boundary_diameter: f64,
}

fn diameter(points: &[Point]) -> f64 {
    let h = hull2(points);
    let mut d: f64 = 0.0;
    for (i, a) in h.iter().enumerate() {
        for b in &h[i + 1..] {
            d = d.max(a.dist(b));
        }
    }
    d
}

/// Quasihyperbolic length of the segment between two cube centres (Simpson's rule).
fn link_weight(dom: &PolygonDomain, a: &Point, b: &Point) -> f64 {
    let m = a.lerp(b, 0.5);
    let inv = |p: &Point| 1.0 / dom.boundary_distance(p);
    a.dist(b) * (inv(a) + 4.0 * inv(&m) + inv(b)) / 6.0
}

/// Shadows of Whitney cubes. The tree is the shortest-path tree from the cube
/// containing `x0` over the adjacency graph with quasihyperbolic link weights;
/// ties keep the first relaxation, which follows the lexicographic cube order.
/// Each boundary sample enters the tree at its nearest cube.
pub fn shadows(dom: &PolygonDomain, w: &WhitneyDecomposition, x0: &Point, sample_step: Option<f64>) -> Result<Shadows> {
    let Some(root) = w.locate(x0) else { return domain("x0 is not in any Whitney cube") };
    let n = w.cubes.len();
    let centers: Vec<Point> = w.cubes.iter().map(|c| c.center()).collect();
    let mut dist = vec![f64::INFINITY; n];
    let mut parent: Vec<Option<u32>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    dist[root] = 0.0;
    heap.push(Reverse((0u64, root as u32)));
    while let Some(Reverse((bits, u))) = heap.pop() {
        let du = f64::from_bits(bits);
        if du > dist[u as usize] {
            continue;
        }
        for &v in w.neighbours(u as usize) {
            let nd = du + link_weight(dom, &centers[u as usize], &centers[v as usize]);
            if nd < dist[v as usize] {
                dist[v as usize] = nd;
                parent[v as usize] = Some(u);
                heap.push(Reverse((nd.to_bits(), v)));
            }
        }
    }
    let step = sample_step.unwrap_or_else(|| w.cubes.iter().map(|c| c.side).fold(f64::INFINITY, f64::min));
    if !(step > 0.0) {
        return domain("boundary sample step must be positive");
    }
    let samples = dom.boundary_samples(step);
    let mut members: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut unreached = 0;
    for (si, z) in samples.iter().enumerate() {
        let mut best = (f64::INFINITY, usize::MAX);
        for (i, c) in w.cubes.iter().enumerate() {
            let d = c.distance_to(z);
            if d < best.0 {
                best = (d, i);
            }
        }
        let mut q = best.1;
        if !dist[q].is_finite() {
            unreached += 1;
            continue;
        }
        loop {
            members[q].push(si as u32);
            match parent[q] {
                Some(p) => q = p as usize,
                None => break,
            }
        }
    }
    let records = members
        .into_iter()
        .enumerate()
        .map(|(i, m)| {
            let pts: Vec<Point> = m.iter().map(|&k| samples[k as usize]).collect();
            ShadowRecord { cube: i as u32, level: w.cubes[i].level, side: w.cubes[i].side, count: m.len(), s: diameter(&pts), members: m }
        })
        .collect();
    let boundary_diameter = diameter(&samples);
    Ok(Shadows { root: root as u32, samples, parent, tree_distance: dist, records, unreached_samples: unreached, boundary_diameter })
}

impl Shadows {
    /// `Σ_Q s(Q)^p`.
    pub fn sum(&self, p: f64) -> f64 {
        self.records.iter().map(|r| r.s.powf(p)).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShadowLevel {
    pub depth: u32,
    pub cells: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShadowSum {
    pub depth: u32,
    pub cells: usize,
    pub cubes: usize,
    pub truncated: usize,
    /// `Σ s(Q)^2`.
    pub lhs: f64,
    /// `∫ k(x, x0)^2 dx` by the midpoint rule on the grid.
    pub rhs: f64,
    pub ratio: f64,
    pub unreached_cells: usize,
}

/// Both sides of the shadow-sum inequality in the plane, one row per refinement level.
pub fn shadow_sum_diagnostic(dom: &PolygonDomain, x0: &Point, levels: &[ShadowLevel]) -> Result<Vec<ShadowSum>> {
    let mut out = Vec::with_capacity(levels.len());
    for lv in levels {
        let w = whitney_decompose(dom, lv.depth)?;
        let sh = shadows(dom, &w, x0, None)?;
        let lhs = sh.sum(2.0);
        let field = qh_field(dom, x0, &QhOptions { cells: lv.cells })?;
        let (rhs, missed) = field.integral(2.0);
        out.push(ShadowSum {
            depth: lv.depth,
            cells: lv.cells,
            cubes: w.cubes.len(),
            truncated: w.truncated,
            lhs,
            rhs,
            ratio: lhs / rhs,
            unreached_cells: missed,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_and_leaf_shadows() {
        let d = PolygonDomain::disk(Point::ORIGIN, 1.0, 256).unwrap();
        let w = whitney_decompose(&d, 6).unwrap();
        let x0 = Point::new2(0.01, 0.02);
        let sh = shadows(&d, &w, &x0, None).unwrap();
        let root = &sh.records[sh.root as usize];
        assert_eq!(root.count, sh.samples.len());
        assert_eq!(root.s, sh.boundary_diameter);
        assert!(sh.records.iter().all(|r| r.s <= sh.boundary_diameter));
        // Shadows of boundary cubes are comparable to their size.
        let finest = w.cubes.iter().map(|c| c.level).max().unwrap();
        let ratios: Vec<f64> = sh.records.iter().filter(|r| r.level == finest && r.count > 0).map(|r| r.s / r.side).collect();
        assert!(!ratios.is_empty() && ratios.iter().all(|&t| t < 20.0), "{ratios:?}");
    }

    #[test]
    fn singleton_shadow_has_zero_diameter() {
        let d = PolygonDomain::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        let w = whitney_decompose(&d, 5).unwrap();
        let sh = shadows(&d, &w, &Point::new2(0.5, 0.5), Some(0.3)).unwrap();
        assert!(sh.records.iter().filter(|r| r.count == 1).all(|r| r.s == 0.0));
        assert!(sh.records.iter().any(|r| r.count == 1));
    }
}
