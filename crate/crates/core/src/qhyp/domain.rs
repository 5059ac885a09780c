use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::geom::Point;

/// Bounded open planar domain given by boundary loops under the even-odd rule.
/// The first loop is the outer boundary (counterclockwise), later loops are
/// holes (clockwise).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "DomainSpec", into = "DomainSpec")]
pub struct PolygonDomain {
    loops: Vec<Vec<Point>>,
    edges: Vec<(Point, Point)>,
    tree: Bvh,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DomainSpec {
    pub outer: Vec<[f64; 2]>,
    #[serde(default)]
    pub holes: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<DomainSpec> for PolygonDomain {
    type Error = crate::error::Error;
    fn try_from(s: DomainSpec) -> Result<Self> {
        let conv = |v: &Vec<[f64; 2]>| v.iter().map(|p| Point::new2(p[0], p[1])).collect::<Vec<_>>();
        let mut loops = vec![conv(&s.outer)];
        loops.extend(s.holes.iter().map(conv));
        PolygonDomain::new(loops)
    }
}

impl From<PolygonDomain> for DomainSpec {
    fn from(d: PolygonDomain) -> Self {
        let conv = |v: &Vec<Point>| v.iter().map(|p| [p.x(), p.y()]).collect::<Vec<_>>();
        DomainSpec { outer: conv(&d.loops[0]), holes: d.loops[1..].iter().map(conv).collect() }
    }
}

fn signed_area(l: &[Point]) -> f64 {
    let n = l.len();
    (0..n).map(|i| l[i].x() * l[(i + 1) % n].y() - l[(i + 1) % n].x() * l[i].y()).sum::<f64>() / 2.0
}

impl PolygonDomain {
    pub fn new(loops: Vec<Vec<Point>>) -> Result<Self> {
        if loops.is_empty() {
            return domain("domain needs an outer boundary");
        }
        for (k, l) in loops.iter().enumerate() {
            if l.len() < 3 {
                return domain(format!("boundary loop {k} has fewer than 3 vertices"));
            }
            if l.iter().any(|p| !p.x().is_finite() || !p.y().is_finite()) {
                return domain("non-finite boundary vertex");
            }
            let a = signed_area(l);
            if (k == 0 && a <= 0.0) || (k > 0 && a >= 0.0) {
                return domain(format!("boundary loop {k} has the wrong orientation"));
            }
        }
        let mut edges = Vec::new();
        for l in &loops {
            for i in 0..l.len() {
                let (a, b) = (l[i], l[(i + 1) % l.len()]);
                if a != b {
                    edges.push((a, b));
                }
            }
        }
        let tree = Bvh::new(&edges);
        Ok(PolygonDomain { loops, edges, tree })
    }

    /// Inscribed regular polygon approximating the disk.
    pub fn disk(c: Point, r: f64, sides: usize) -> Result<Self> {
        if !(r > 0.0) || sides < 3 {
            return domain("disk needs r > 0 and at least 3 sides");
        }
        let l = (0..sides)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / sides as f64;
                c + Point::new2(r * a.cos(), r * a.sin())
            })
            .collect();
        PolygonDomain::new(vec![l])
    }

    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        PolygonDomain::new(vec![vec![Point::new2(x0, y0), Point::new2(x1, y0), Point::new2(x1, y1), Point::new2(x0, y1)]])
    }

    /// Square `[-1, 0] x [-1/2, 1/2]` with an exponentially thin cusp
    /// `|y| < exp(1 - 1/(1 - x)) / 2` for `0 <= x < 1` attached on the right.
    pub fn exponential_cusp(samples: usize) -> Result<Self> {
        let g = |x: f64| 0.5 * (1.0 - 1.0 / (1.0 - x)).exp();
        let mut upper = Vec::new();
        for i in 0..samples {
            // Cluster samples toward the tip, where the width changes fastest.
            let t = i as f64 / samples as f64;
            let x = 1.0 - (1.0 - t).powi(3) * 0.98 - 0.02 * (1.0 - t);
            if g(x) < 1e-9 {
                break;
            }
            upper.push(Point::new2(x, g(x)));
        }
        let mut l = vec![Point::new2(-1.0, -0.5)];
        l.extend(upper.iter().map(|p| Point::new2(p.x(), -p.y())));
        l.push(Point::new2(1.0, 0.0));
        l.extend(upper.iter().rev().copied());
        l.push(Point::new2(-1.0, 0.5));
        PolygonDomain::new(vec![l])
    }

    /// Unit square with `teeth` vertical slots of width `w` cut from the bottom
    /// up to height `depth`.
    pub fn comb(teeth: usize, w: f64, depth: f64) -> Result<Self> {
        if teeth == 0 || !(w > 0.0 && depth > 0.0 && depth < 1.0) || w * teeth as f64 >= 1.0 {
            return domain("comb parameters out of range");
        }
        let mut l = vec![Point::new2(0.0, 0.0)];
        for k in 0..teeth {
            let xc = (k as f64 + 1.0) / (teeth as f64 + 1.0);
            let (a, b) = (xc - w / 2.0, xc + w / 2.0);
            l.extend([Point::new2(a, 0.0), Point::new2(a, depth), Point::new2(b, depth), Point::new2(b, 0.0)]);
        }
        l.extend([Point::new2(1.0, 0.0), Point::new2(1.0, 1.0), Point::new2(0.0, 1.0)]);
        PolygonDomain::new(vec![l])
    }

    pub fn loops(&self) -> &[Vec<Point>] {
        &self.loops
    }

    pub fn edges(&self) -> &[(Point, Point)] {
        &self.edges
    }

    pub fn bbox(&self) -> (Point, Point) {
        (self.tree.nodes[0].lo, self.tree.nodes[0].hi)
    }

    /// Even-odd crossing test; boundary points count as outside only up to rounding.
    pub fn contains(&self, p: &Point) -> bool {
        let mut inside = false;
        for (a, b) in &self.edges {
            if (a.y() > p.y()) != (b.y() > p.y()) {
                let x = a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
                if p.x() < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Distance from a point to the boundary.
    pub fn boundary_distance(&self, p: &Point) -> f64 {
        self.tree.nearest(&self.edges, |lo, hi| box_point_distance(lo, hi, p), |e| point_segment(p, &e.0, &e.1)).0
    }

    /// `δ_Ω(p)`, zero outside the domain.
    pub fn delta(&self, p: &Point) -> f64 {
        if self.contains(p) {
            self.boundary_distance(p)
        } else {
            0.0
        }
    }

    /// Distance from the closed box `[lo, hi]` to the boundary, and the indices
    /// of every edge within `slack` of that distance.
    pub fn box_distance(&self, lo: &Point, hi: &Point, slack: f64) -> (f64, Vec<usize>) {
        let (best, _) = self.tree.nearest(&self.edges, |a, b| box_box_distance(a, b, lo, hi), |e| segment_box_distance(&e.0, &e.1, lo, hi));
        let mut near = Vec::new();
        self.tree.within(&self.edges, best + slack, |a, b| box_box_distance(a, b, lo, hi), |e| segment_box_distance(&e.0, &e.1, lo, hi), &mut near);
        (best, near)
    }

    /// Points on the boundary at spacing at most `step`.
    pub fn boundary_samples(&self, step: f64) -> Vec<Point> {
        let mut out = Vec::new();
        for (a, b) in &self.edges {
            let n = (a.dist(b) / step).ceil().max(1.0) as usize;
            for i in 0..n {
                out.push(a.lerp(b, i as f64 / n as f64));
            }
        }
        out
    }
}

pub(crate) fn point_segment(p: &Point, a: &Point, b: &Point) -> f64 {
    let d = *b - *a;
    let l2 = d.dot(&d);
    let t = if l2 > 0.0 { ((*p - *a).dot(&d) / l2).clamp(0.0, 1.0) } else { 0.0 };
    p.dist(&a.lerp(b, t))
}

pub(crate) fn box_point_distance(lo: &Point, hi: &Point, p: &Point) -> f64 {
    let dx = (lo.x() - p.x()).max(0.0).max(p.x() - hi.x());
    let dy = (lo.y() - p.y()).max(0.0).max(p.y() - hi.y());
    dx.hypot(dy)
}

fn box_box_distance(a_lo: &Point, a_hi: &Point, b_lo: &Point, b_hi: &Point) -> f64 {
    let dx = (a_lo.x() - b_hi.x()).max(0.0).max(b_lo.x() - a_hi.x());
    let dy = (a_lo.y() - b_hi.y()).max(0.0).max(b_lo.y() - a_hi.y());
    dx.hypot(dy)
}

/// Distance between a segment and a closed axis-parallel box.
pub(crate) fn segment_box_distance(a: &Point, b: &Point, lo: &Point, hi: &Point) -> f64 {
    if segment_meets_box(a, b, lo, hi) {
        return 0.0;
    }
    let corners = [*lo, Point::new2(hi.x(), lo.y()), *hi, Point::new2(lo.x(), hi.y())];
    let mut d = box_point_distance(lo, hi, a).min(box_point_distance(lo, hi, b));
    for c in &corners {
        d = d.min(point_segment(c, a, b));
    }
    d
}

fn segment_meets_box(a: &Point, b: &Point, lo: &Point, hi: &Point) -> bool {
    // Liang-Barsky clipping.
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    let d = *b - *a;
    for k in 0..2 {
        let (p, q0, q1) = (d.0[k], lo.0[k] - a.0[k], hi.0[k] - a.0[k]);
        if p == 0.0 {
            if q0 > 0.0 || q1 < 0.0 {
                return false;
            }
        } else {
            let (mut u, mut v) = (q0 / p, q1 / p);
            if u > v {
                std::mem::swap(&mut u, &mut v);
            }
            t0 = t0.max(u);
            t1 = t1.min(v);
            if t0 > t1 {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Debug)]
struct BvhNode {
    lo: Point,
    hi: Point,
    /// Leaf range into `order`, or children.
    kind: NodeKind,
}

#[derive(Clone, Debug)]
enum NodeKind {
    Leaf(usize, usize),
    Inner(usize, usize),
}

/// Bounding-volume hierarchy over boundary edges.
#[derive(Clone, Debug)]
struct Bvh {
    nodes: Vec<BvhNode>,
    order: Vec<usize>,
}

impl Bvh {
    fn new(edges: &[(Point, Point)]) -> Self {
        let mut b = Bvh { nodes: Vec::new(), order: (0..edges.len()).collect() };
        let n = edges.len();
        b.build(edges, 0, n);
        b
    }

    fn build(&mut self, edges: &[(Point, Point)], start: usize, end: usize) -> usize {
        let mut lo = Point([f64::INFINITY, f64::INFINITY, 0.0]);
        let mut hi = Point([f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0]);
        for &i in &self.order[start..end] {
            for p in [edges[i].0, edges[i].1] {
                for k in 0..2 {
                    lo.0[k] = lo.0[k].min(p.0[k]);
                    hi.0[k] = hi.0[k].max(p.0[k]);
                }
            }
        }
        let id = self.nodes.len();
        self.nodes.push(BvhNode { lo, hi, kind: NodeKind::Leaf(start, end) });
        if end - start > 4 {
            let axis = if hi.x() - lo.x() >= hi.y() - lo.y() { 0 } else { 1 };
            let mid_of = |i: usize| edges[i].0 .0[axis] + edges[i].1 .0[axis];
            self.order[start..end].sort_by(|&a, &b| mid_of(a).total_cmp(&mid_of(b)));
            let mid = (start + end) / 2;
            let l = self.build(edges, start, mid);
            let r = self.build(edges, mid, end);
            self.nodes[id].kind = NodeKind::Inner(l, r);
        }
        id
    }

    fn nearest<E>(&self, items: &[E], bound: impl Fn(&Point, &Point) -> f64, exact: impl Fn(&E) -> f64) -> (f64, usize) {
        let mut best = (f64::INFINITY, usize::MAX);
        let mut stack = vec![(bound(&self.nodes[0].lo, &self.nodes[0].hi), 0usize)];
        while let Some((d, id)) = stack.pop() {
            if d >= best.0 {
                continue;
            }
            match self.nodes[id].kind {
                NodeKind::Leaf(s, e) => {
                    for &i in &self.order[s..e] {
                        let v = exact(&items[i]);
                        if v < best.0 {
                            best = (v, i);
                        }
                    }
                }
                NodeKind::Inner(l, r) => {
                    let dl = bound(&self.nodes[l].lo, &self.nodes[l].hi);
                    let dr = bound(&self.nodes[r].lo, &self.nodes[r].hi);
                    // Visit the closer child first.
                    if dl < dr {
                        stack.push((dr, r));
                        stack.push((dl, l));
                    } else {
                        stack.push((dl, l));
                        stack.push((dr, r));
                    }
                }
            }
        }
        best
    }

    fn within<E>(&self, items: &[E], limit: f64, bound: impl Fn(&Point, &Point) -> f64, exact: impl Fn(&E) -> f64, out: &mut Vec<usize>) {
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            if bound(&self.nodes[id].lo, &self.nodes[id].hi) > limit {
                continue;
            }
            match self.nodes[id].kind {
                NodeKind::Leaf(s, e) => out.extend(self.order[s..e].iter().copied().filter(|&i| exact(&items[i]) <= limit)),
                NodeKind::Inner(l, r) => stack.extend([l, r]),
            }
        }
        out.sort_unstable();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_distances() {
        let d = PolygonDomain::disk(Point::ORIGIN, 1.0, 1024).unwrap();
        assert!(d.contains(&Point::new2(0.3, 0.2)) && !d.contains(&Point::new2(1.1, 0.0)));
        assert!((d.delta(&Point::ORIGIN) - 1.0).abs() < 1e-4);
        assert!((d.delta(&Point::new2(0.0, 0.9)) - 0.1).abs() < 1e-4);
        let brute = |p: &Point| d.edges().iter().map(|e| point_segment(p, &e.0, &e.1)).fold(f64::INFINITY, f64::min);
        for i in 0..50 {
            let p = Point::new2((i as f64 * 0.37).sin() * 0.9, (i as f64 * 0.71).cos() * 0.9);
            assert_eq!(d.boundary_distance(&p), brute(&p));
        }
    }

    #[test]
    fn box_distance_brute_force() {
        let d = PolygonDomain::comb(3, 0.05, 0.6).unwrap();
        let (lo, hi) = (Point::new2(0.3, 0.3), Point::new2(0.35, 0.35));
        let brute = d.edges().iter().map(|e| segment_box_distance(&e.0, &e.1, &lo, &hi)).fold(f64::INFINITY, f64::min);
        let (v, near) = d.box_distance(&lo, &hi, 1e-12);
        assert_eq!(v, brute);
        assert!(!near.is_empty());
    }

    #[test]
    fn orientation_and_json() {
        let cw = vec![Point::new2(0.0, 0.0), Point::new2(0.0, 1.0), Point::new2(1.0, 1.0)];
        assert!(PolygonDomain::new(vec![cw]).is_err());
        let c = PolygonDomain::exponential_cusp(400).unwrap();
        assert!(c.contains(&Point::new2(0.5, 0.0)) && !c.contains(&Point::new2(0.5, 0.2)));
        let s = serde_json::to_string(&c).unwrap();
        let back: PolygonDomain = serde_json::from_str(&s).unwrap();
        assert_eq!(back.edges().len(), c.edges().len());
    }
}
