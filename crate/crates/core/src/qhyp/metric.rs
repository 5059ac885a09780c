use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::geom::{Point, PolyCurve};
use crate::qhyp::domain::PolygonDomain;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct QhOptions {
    /// Grid cells across the longer side of the domain's bounding box.
    pub cells: usize,
}

impl Default for QhOptions {
    fn default() -> Self {
        QhOptions { cells: 256 }
    }
}

const MOVES: [(i64, i64); 8] = [(1, 0), (0, 1), (1, 1), (1, -1), (1, 2), (2, 1), (1, -2), (2, -1)];

/// Grid graph on cell centres inside the domain. An edge `ab` is kept when
/// `δ(a) + δ(b) > |a - b|`, which rules out crossing the boundary, and weighs
/// `|a - b| / δ(midpoint)`. Extra points are attached to the grid nodes within
/// two cells.
pub struct QhGraph {
    pub h: f64,
    pub points: Vec<Point>,
    pub delta: Vec<f64>,
    /// Number of grid nodes; extra points follow.
    pub grid_nodes: usize,
    start: Vec<usize>,
    edges: Vec<(u32, f64)>,
}

fn edge_weight(dom: &PolygonDomain, a: &Point, b: &Point, da: f64, db: f64) -> Option<f64> {
    let len = a.dist(b);
    if da + db <= len {
        return None;
    }
    let dm = dom.boundary_distance(&a.lerp(b, 0.5));
    (dm > 0.0).then(|| len / dm)
}

impl QhGraph {
    pub fn new(dom: &PolygonDomain, opts: &QhOptions, extra: &[Point]) -> Result<Self> {
        if opts.cells < 4 {
            return domain("qh grid needs at least 4 cells");
        }
        let (lo, hi) = dom.bbox();
        let h = (hi.x() - lo.x()).max(hi.y() - lo.y()) / opts.cells as f64;
        let nx = ((hi.x() - lo.x()) / h).ceil() as i64 + 1;
        let ny = ((hi.y() - lo.y()) / h).ceil() as i64 + 1;
        let mut id = vec![u32::MAX; (nx * ny) as usize];
        let mut points = Vec::new();
        let mut delta = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                let p = Point::new2(lo.x() + (i as f64 + 0.5) * h, lo.y() + (j as f64 + 0.5) * h);
                let d = dom.delta(&p);
                if d > 0.0 {
                    id[(j * nx + i) as usize] = points.len() as u32;
                    points.push(p);
                    delta.push(d);
                }
            }
        }
        let grid_nodes = points.len();
        let mut lists: Vec<Vec<(u32, f64)>> = vec![Vec::new(); grid_nodes];
        for j in 0..ny {
            for i in 0..nx {
                let a = id[(j * nx + i) as usize];
                if a == u32::MAX {
                    continue;
                }
                for (dx, dy) in MOVES {
                    let (x, y) = (i + dx, j + dy);
                    if x < 0 || y < 0 || x >= nx || y >= ny {
                        continue;
                    }
                    let b = id[(y * nx + x) as usize];
                    if b == u32::MAX {
                        continue;
                    }
                    let (pa, pb) = (points[a as usize], points[b as usize]);
                    if let Some(w) = edge_weight(dom, &pa, &pb, delta[a as usize], delta[b as usize]) {
                        lists[a as usize].push((b, w));
                        lists[b as usize].push((a, w));
                    }
                }
            }
        }
        for p in extra {
            let d = dom.delta(p);
            if !(d > 0.0) {
                return domain(format!("point ({}, {}) is not interior", p.x(), p.y()));
            }
            let v = points.len() as u32;
            points.push(*p);
            delta.push(d);
            lists.push(Vec::new());
            let ci = ((p.x() - lo.x()) / h - 0.5).round() as i64;
            let cj = ((p.y() - lo.y()) / h - 0.5).round() as i64;
            for j in cj - 2..=cj + 2 {
                for i in ci - 2..=ci + 2 {
                    if i < 0 || j < 0 || i >= nx || j >= ny {
                        continue;
                    }
                    let b = id[(j * nx + i) as usize];
                    if b == u32::MAX {
                        continue;
                    }
                    let pb = points[b as usize];
                    if p.dist(&pb) > 2.0 * h {
                        continue;
                    }
                    if let Some(w) = edge_weight(dom, p, &pb, d, delta[b as usize]) {
                        lists[v as usize].push((b, w));
                        lists[b as usize].push((v, w));
                    }
                }
            }
        }
        let mut start = Vec::with_capacity(lists.len() + 1);
        let mut edges = Vec::new();
        for l in lists {
            start.push(edges.len());
            edges.extend(l);
        }
        start.push(edges.len());
        Ok(QhGraph { h, points, delta, grid_nodes, start, edges })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Single-source shortest paths: distances and predecessors.
    pub fn dijkstra(&self, source: usize) -> (Vec<f64>, Vec<u32>) {
        let n = self.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut pred = vec![u32::MAX; n];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(Reverse((0u64, source as u32)));
        while let Some(Reverse((bits, u))) = heap.pop() {
            let du = f64::from_bits(bits);
            if du > dist[u as usize] {
                continue;
            }
            for &(v, w) in &self.edges[self.start[u as usize]..self.start[u as usize + 1]] {
                let nd = du + w;
                if nd < dist[v as usize] {
                    dist[v as usize] = nd;
                    pred[v as usize] = u;
                    heap.push(Reverse((nd.to_bits(), v)));
                }
            }
        }
        (dist, pred)
    }

    fn trace(&self, pred: &[u32], target: usize) -> Vec<Point> {
        let mut v = vec![self.points[target]];
        let mut t = target;
        while pred[t] != u32::MAX {
            t = pred[t] as usize;
            v.push(self.points[t]);
        }
        v.reverse();
        v
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QhPath {
    pub value: f64,
    /// No grid path joins the points.
    pub infeasible: bool,
    #[serde(skip)]
    pub geodesic: Option<PolyCurve>,
}

fn lex_less(a: &Point, b: &Point) -> bool {
    a.x().total_cmp(&b.x()).then(a.y().total_cmp(&b.y())).is_lt()
}

/// Quasihyperbolic distance `inf ∫_γ ds / δ_Ω` estimated on the grid graph.
/// The search always starts from the lexicographically smaller point, so the
/// value is symmetric bit for bit.
pub fn qh_distance(dom: &PolygonDomain, x1: &Point, x2: &Point, opts: &QhOptions) -> Result<QhPath> {
    if x1 == x2 {
        if !(dom.delta(x1) > 0.0) {
            return domain("point is not interior");
        }
        return Ok(QhPath { value: 0.0, infeasible: false, geodesic: Some(PolyCurve::new(vec![*x1])?) });
    }
    let swap = lex_less(x2, x1);
    let (a, b) = if swap { (x2, x1) } else { (x1, x2) };
    let g = QhGraph::new(dom, opts, &[*a, *b])?;
    let (s, t) = (g.grid_nodes, g.grid_nodes + 1);
    let (dist, pred) = g.dijkstra(s);
    if !dist[t].is_finite() {
        return Ok(QhPath { value: 0.0, infeasible: true, geodesic: None });
    }
    let mut pts = g.trace(&pred, t);
    if swap {
        pts.reverse();
    }
    Ok(QhPath { value: dist[t], infeasible: false, geodesic: Some(PolyCurve::new(pts)?) })
}

/// Pairwise distances among `points` in one graph (a metric up to rounding);
/// unreachable pairs are infinite.
pub fn qh_distances(dom: &PolygonDomain, points: &[Point], opts: &QhOptions) -> Result<Vec<Vec<f64>>> {
    let g = QhGraph::new(dom, opts, points)?;
    let n = points.len();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        let (dist, _) = g.dijkstra(g.grid_nodes + i);
        for j in i + 1..n {
            m[i][j] = dist[g.grid_nodes + j];
            m[j][i] = m[i][j];
        }
    }
    Ok(m)
}

/// `k(·, x0)` on every grid node.
pub struct QhField {
    pub graph: QhGraph,
    pub k: Vec<f64>,
}

pub fn qh_field(dom: &PolygonDomain, x0: &Point, opts: &QhOptions) -> Result<QhField> {
    let graph = QhGraph::new(dom, opts, &[*x0])?;
    let (mut k, _) = graph.dijkstra(graph.grid_nodes);
    k.truncate(graph.grid_nodes);
    Ok(QhField { graph, k })
}

impl QhField {
    /// Midpoint rule for `∫ k^p` over the grid cells; unreached cells are skipped
    /// and counted.
    pub fn integral(&self, p: f64) -> (f64, usize) {
        let area = self.graph.h * self.graph.h;
        let mut sum = 0.0;
        let mut missed = 0;
        for &v in &self.k {
            if v.is_finite() {
                sum += v.powf(p) * area;
            } else {
                missed += 1;
            }
        }
        (sum, missed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk() -> PolygonDomain {
        PolygonDomain::disk(Point::ORIGIN, 1.0, 1024).unwrap()
    }

    #[test]
    fn radial_distance_in_disk() {
        let r = qh_distance(&disk(), &Point::ORIGIN, &Point::new2(0.0, 0.9), &QhOptions { cells: 256 }).unwrap();
        let exact = 10f64.ln();
        assert!((r.value / exact - 1.0).abs() < 0.05, "{}", r.value);
        let g = r.geodesic.unwrap();
        assert_eq!(g.endpoints(), (Point::ORIGIN, Point::new2(0.0, 0.9)));
    }

    #[test]
    fn symmetric_and_zero() {
        let d = disk();
        let o = QhOptions { cells: 64 };
        let (a, b) = (Point::new2(0.2, -0.3), Point::new2(-0.5, 0.4));
        let ab = qh_distance(&d, &a, &b, &o).unwrap().value;
        let ba = qh_distance(&d, &b, &a, &o).unwrap().value;
        assert_eq!(ab.to_bits(), ba.to_bits());
        assert_eq!(qh_distance(&d, &a, &a, &o).unwrap().value, 0.0);
        assert!(qh_distance(&d, &a, &Point::new2(2.0, 0.0), &o).is_err());
    }

    #[test]
    fn separated_components_are_infeasible() {
        let d = PolygonDomain::new(vec![vec![
            Point::new2(0.0, 0.0),
            Point::new2(3.0, 0.0),
            Point::new2(3.0, 1.0),
            Point::new2(2.0, 1.0),
            Point::new2(2.0, 0.001),
            Point::new2(1.0, 0.001),
            Point::new2(1.0, 1.0),
            Point::new2(0.0, 1.0),
        ]])
        .unwrap();
        let r = qh_distance(&d, &Point::new2(0.5, 0.5), &Point::new2(2.5, 0.5), &QhOptions { cells: 60 }).unwrap();
        assert!(r.infeasible);
    }
}
