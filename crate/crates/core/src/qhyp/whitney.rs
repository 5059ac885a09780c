use std::collections::{BTreeSet, HashMap};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::geom::{Point, PolyCurve};
use crate::qhyp::domain::PolygonDomain;
use crate::sets::rat::{q, QPoint, Q};

/// Dyadic square `[lo, lo + side]^2` of generation `level`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WhitneyCube {
    pub level: u32,
    pub ix: i64,
    pub iy: i64,
    pub lo: [f64; 2],
    pub side: f64,
    /// `dist(Q, ∂Ω)`.
    pub dist: f64,
}

impl WhitneyCube {
    pub fn center(&self) -> Point {
        Point::new2(self.lo[0] + self.side / 2.0, self.lo[1] + self.side / 2.0)
    }

    pub fn diam(&self) -> f64 {
        self.side * std::f64::consts::SQRT_2
    }

    pub fn corners(&self) -> (Point, Point) {
        (Point::new2(self.lo[0], self.lo[1]), Point::new2(self.lo[0] + self.side, self.lo[1] + self.side))
    }

    pub fn distance_to(&self, p: &Point) -> f64 {
        let (lo, hi) = self.corners();
        crate::qhyp::domain::box_point_distance(&lo, &hi, p)
    }
}

/// Exact verification of the decomposition invariants.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct WhitneyCheck {
    pub cubes: usize,
    /// Cubes with `diam Q <= dist(Q, ∂Ω) <= 4 diam Q`, checked in rational arithmetic.
    pub distance_ok: usize,
    pub adjacent_pairs: usize,
    /// Adjacent pairs with side ratio in `[1/4, 4]`.
    pub ratio_ok: usize,
    /// Largest side ratio over adjacent pairs.
    pub max_ratio: f64,
    /// No emitted cube contains another.
    pub disjoint: bool,
}

impl WhitneyCheck {
    pub fn all(&self) -> bool {
        self.distance_ok == self.cubes && self.ratio_ok == self.adjacent_pairs && self.disjoint
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WhitneyDecomposition {
    pub origin: [f64; 2],
    pub root_side: f64,
    pub max_depth: u32,
    /// Cubes in lexicographic order of (lower corner, side).
    pub cubes: Vec<WhitneyCube>,
    /// Pairs sharing a boundary segment of positive length.
    pub adjacency: Vec<[u32; 2]>,
    /// Cubes meeting the domain that were still too large at `max_depth`.
    pub truncated: usize,
    pub truncated_area: f64,
    pub check: WhitneyCheck,
    #[serde(skip)]
    neighbours: Vec<Vec<u32>>,
    #[serde(skip)]
    lookup: HashMap<(u32, i64, i64), u32>,
}

struct Exact {
    origin: [Q; 2],
    root: Q,
}

impl Exact {
    fn corners(&self, level: u32, ix: i64, iy: i64) -> (QPoint, QPoint, Q) {
        let side = &self.root / Q::from_integer(num_bigint::BigInt::from(1u64) << level);
        let x = &self.origin[0] + &side * Q::from_integer(ix.into());
        let y = &self.origin[1] + &side * Q::from_integer(iy.into());
        let hi = QPoint::new(&x + &side, &y + &side);
        (QPoint::new(x, y), hi, side)
    }
}

fn point_box_d2(p: &QPoint, lo: &QPoint, hi: &QPoint) -> Q {
    let gap = |v: &Q, a: &Q, b: &Q| {
        if v < a {
            a - v
        } else if v > b {
            v - b
        } else {
            Q::zero()
        }
    };
    let dx = gap(&p.x, &lo.x, &hi.x);
    let dy = gap(&p.y, &lo.y, &hi.y);
    &dx * &dx + &dy * &dy
}

fn point_segment_d2(p: &QPoint, a: &QPoint, b: &QPoint) -> Q {
    let d = b.sub(a);
    let l2 = &d.x * &d.x + &d.y * &d.y;
    let w = p.sub(a);
    let mut t = if l2.is_zero() { Q::zero() } else { (&w.x * &d.x + &w.y * &d.y) / &l2 };
    if t.is_negative() {
        t = Q::zero();
    } else if t > Q::from_integer(1.into()) {
        t = Q::from_integer(1.into());
    }
    let c = a.lerp(b, &t);
    let (ex, ey) = (&p.x - &c.x, &p.y - &c.y);
    &ex * &ex + &ey * &ey
}

fn segment_meets_box(a: &QPoint, b: &QPoint, lo: &QPoint, hi: &QPoint) -> bool {
    let one = Q::from_integer(1.into());
    let (mut t0, mut t1) = (Q::zero(), one);
    let d = b.sub(a);
    for (p, l, h, s) in [(&d.x, &lo.x, &hi.x, &a.x), (&d.y, &lo.y, &hi.y, &a.y)] {
        let (q0, q1) = (l - s, h - s);
        if p.is_zero() {
            if q0.is_positive() || q1.is_negative() {
                return false;
            }
        } else {
            let (mut u, mut v) = (&q0 / p, &q1 / p);
            if u > v {
                std::mem::swap(&mut u, &mut v);
            }
            if u > t0 {
                t0 = u;
            }
            if v < t1 {
                t1 = v;
            }
            if t0 > t1 {
                return false;
            }
        }
    }
    true
}

/// Exact squared distance between a closed box and a segment.
fn box_segment_d2(lo: &QPoint, hi: &QPoint, a: &QPoint, b: &QPoint) -> Q {
    if segment_meets_box(a, b, lo, hi) {
        return Q::zero();
    }
    let corners = [lo.clone(), QPoint::new(hi.x.clone(), lo.y.clone()), hi.clone(), QPoint::new(lo.x.clone(), hi.y.clone())];
    let mut best = point_box_d2(a, lo, hi);
    let pb = point_box_d2(b, lo, hi);
    if pb < best {
        best = pb;
    }
    for c in &corners {
        let v = point_segment_d2(c, a, b);
        if v < best {
            best = v;
        }
    }
    best
}

fn exact_d2(dom: &PolygonDomain, ex: &Exact, level: u32, ix: i64, iy: i64, lo: &Point, hi: &Point) -> Q {
    let (_, near) = dom.box_distance(lo, hi, 1e-9 * (1.0 + (hi.x() - lo.x())));
    let (qlo, qhi, _) = ex.corners(level, ix, iy);
    let mut best: Option<Q> = None;
    for i in near {
        let (a, b) = dom.edges()[i];
        let v = box_segment_d2(&qlo, &qhi, &QPoint::from_f64(a.x(), a.y()), &QPoint::from_f64(b.x(), b.y()));
        if best.as_ref().map_or(true, |w| v < *w) {
            best = Some(v);
        }
    }
    best.expect("the nearest edge is always within the slack")
}

/// Dyadic Whitney decomposition: a cube is emitted when it lies in the domain
/// with `diam Q <= dist(Q, ∂Ω)` and its parent does not, which gives
/// `dist(Q, ∂Ω) < 4 diam Q`.
pub fn whitney_decompose(dom: &PolygonDomain, max_depth: u32) -> Result<WhitneyDecomposition> {
    if max_depth > 40 {
        return domain("max_depth above 40");
    }
    let (lo, hi) = dom.bbox();
    let extent = (hi.x() - lo.x()).max(hi.y() - lo.y());
    if !(extent > 0.0) {
        return domain("empty domain");
    }
    let root_side = 2f64.powi(extent.log2().ceil() as i32);
    let origin = [(lo.x() / root_side).floor() * root_side, (lo.y() / root_side).floor() * root_side];
    let ex = Exact { origin: [q(origin[0]), q(origin[1])], root: q(root_side) };
    let tiles = |k: usize| (((if k == 0 { hi.x() } else { hi.y() }) - origin[k]) / root_side).ceil().max(1.0) as i64;
    let mut stack: Vec<(u32, i64, i64)> = Vec::new();
    for ix in 0..tiles(0) {
        for iy in 0..tiles(1) {
            stack.push((0, ix, iy));
        }
    }
    let mut cubes = Vec::new();
    let mut truncated = 0;
    let mut truncated_area = 0.0;
    while let Some((level, ix, iy)) = stack.pop() {
        let side = root_side / 2f64.powi(level as i32);
        let clo = Point::new2(origin[0] + ix as f64 * side, origin[1] + iy as f64 * side);
        let chi = Point::new2(clo.x() + side, clo.y() + side);
        let (d, _) = dom.box_distance(&clo, &chi, 0.0);
        let center = clo.lerp(&chi, 0.5);
        let inside = dom.contains(&center);
        if d > 0.0 && !inside {
            continue;
        }
        let diam = side * std::f64::consts::SQRT_2;
        let accept = if d > 0.0 && ((d - diam).abs() > 1e-9 * diam) {
            d > diam
        } else if d > 0.0 {
            let d2 = exact_d2(dom, &ex, level, ix, iy, &clo, &chi);
            let (_, _, s) = ex.corners(level, ix, iy);
            d2 >= Q::from_integer(2.into()) * &s * &s
        } else {
            false
        };
        if accept {
            cubes.push(WhitneyCube { level, ix, iy, lo: [clo.x(), clo.y()], side, dist: d });
        } else if level < max_depth {
            for (dx, dy) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                stack.push((level + 1, 2 * ix + dx, 2 * iy + dy));
            }
        } else {
            truncated += 1;
            truncated_area += side * side;
        }
    }
    if cubes.is_empty() {
        return domain("no Whitney cube fits the domain at this depth");
    }
    cubes.sort_by(|a, b| a.lo[0].total_cmp(&b.lo[0]).then(a.lo[1].total_cmp(&b.lo[1])).then(a.side.total_cmp(&b.side)));
    let lookup: HashMap<(u32, i64, i64), u32> = cubes.iter().enumerate().map(|(i, c)| ((c.level, c.ix, c.iy), i as u32)).collect();
    let mut w = WhitneyDecomposition {
        origin,
        root_side,
        max_depth,
        cubes,
        adjacency: Vec::new(),
        truncated,
        truncated_area,
        check: WhitneyCheck::default(),
        neighbours: Vec::new(),
        lookup,
    };
    w.build_adjacency();
    w.check = w.verify(dom, &ex);
    Ok(w)
}

impl WhitneyDecomposition {
    fn build_adjacency(&mut self) {
        let mut pairs = BTreeSet::new();
        for (i, c) in self.cubes.iter().enumerate() {
            let k = c.level as i64;
            for (fx, fy) in [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)] {
                // Coarser or equal neighbours contain the adjacent cell of equal size.
                let (ox, oy) = (c.ix + fx, c.iy + fy);
                for m in (k - 4).max(0)..=k {
                    let s = k - m;
                    if let Some(&j) = self.lookup.get(&(m as u32, ox >> s, oy >> s)) {
                        pairs.insert((i.min(j as usize), i.max(j as usize)));
                    }
                }
                // Finer neighbours line the shared face.
                for m in k + 1..=(k + 4).min(self.max_depth as i64) {
                    let s = m - k;
                    let n = 1i64 << s;
                    for t in 0..n {
                        let (x, y) = match (fx, fy) {
                            (1, 0) => ((c.ix + 1) << s, (c.iy << s) + t),
                            (-1, 0) => ((c.ix << s) - 1, (c.iy << s) + t),
                            (0, 1) => ((c.ix << s) + t, (c.iy + 1) << s),
                            _ => ((c.ix << s) + t, (c.iy << s) - 1),
                        };
                        if let Some(&j) = self.lookup.get(&(m as u32, x, y)) {
                            pairs.insert((i.min(j as usize), i.max(j as usize)));
                        }
                    }
                }
            }
        }
        self.adjacency = pairs.into_iter().map(|(a, b)| [a as u32, b as u32]).collect();
        self.neighbours = vec![Vec::new(); self.cubes.len()];
        for &[a, b] in &self.adjacency {
            self.neighbours[a as usize].push(b);
            self.neighbours[b as usize].push(a);
        }
    }

    fn verify(&self, dom: &PolygonDomain, ex: &Exact) -> WhitneyCheck {
        let mut chk = WhitneyCheck { cubes: self.cubes.len(), disjoint: true, ..Default::default() };
        for c in &self.cubes {
            let (lo, hi) = c.corners();
            let d2 = exact_d2(dom, ex, c.level, c.ix, c.iy, &lo, &hi);
            let (_, _, s) = ex.corners(c.level, c.ix, c.iy);
            let s2 = &s * &s;
            let two = Q::from_integer(2.into());
            let ok = d2 >= &two * &s2 && d2 <= Q::from_integer(32.into()) * &s2 && dom.contains(&c.center());
            chk.distance_ok += ok as usize;
            for m in 0..c.level {
                let sh = c.level - m;
                if self.lookup.contains_key(&(m, c.ix >> sh, c.iy >> sh)) {
                    chk.disjoint = false;
                }
            }
        }
        chk.adjacent_pairs = self.adjacency.len();
        for &[a, b] in &self.adjacency {
            let gap = (self.cubes[a as usize].level as i64 - self.cubes[b as usize].level as i64).unsigned_abs();
            chk.ratio_ok += (gap <= 2) as usize;
            chk.max_ratio = chk.max_ratio.max(2f64.powi(gap as i32));
        }
        chk
    }

    pub fn neighbours(&self, i: usize) -> &[u32] {
        &self.neighbours[i]
    }

    pub fn are_adjacent(&self, a: usize, b: usize) -> bool {
        self.neighbours[a].contains(&(b as u32))
    }

    /// Cube containing `p` (half-open on the upper sides).
    pub fn locate(&self, p: &Point) -> Option<usize> {
        for level in 0..=self.max_depth {
            let side = self.root_side / 2f64.powi(level as i32);
            let ix = ((p.x() - self.origin[0]) / side).floor() as i64;
            let iy = ((p.y() - self.origin[1]) / side).floor() as i64;
            if let Some(&i) = self.lookup.get(&(level, ix, iy)) {
                return Some(i as usize);
            }
        }
        None
    }

    /// Distinct cubes met along a polyline in order, sampling at a quarter of
    /// the smallest side. Samples outside every cube are skipped.
    pub fn cube_chain(&self, curve: &PolyCurve) -> Vec<usize> {
        let step = self.cubes.iter().map(|c| c.side).fold(f64::INFINITY, f64::min) / 4.0;
        let mut out: Vec<usize> = Vec::new();
        for (a, b) in curve.segments() {
            let n = (a.dist(&b) / step).ceil().max(1.0) as usize;
            for i in 0..=n {
                if let Some(c) = self.locate(&a.lerp(&b, i as f64 / n as f64)) {
                    if out.last() != Some(&c) {
                        out.push(c);
                    }
                }
            }
        }
        out
    }

    /// Consecutive pairs of a chain that are not adjacent. A pair meeting only at
    /// a corner counts as linked when the two cubes share an adjacent cube.
    pub fn chain_breaks(&self, chain: &[usize]) -> usize {
        chain
            .windows(2)
            .filter(|w| {
                let (a, b) = (w[0], w[1]);
                !(self.are_adjacent(a, b) || self.neighbours[a].iter().any(|&c| self.are_adjacent(c as usize, b)))
            })
            .count()
    }

    /// Total area of the emitted cubes.
    pub fn area(&self) -> f64 {
        self.cubes.iter().map(|c| c.side * c.side).sum()
    }

    /// Number of cubes per generation.
    pub fn level_counts(&self) -> Vec<usize> {
        let mut v = vec![0; self.max_depth as usize + 1];
        for c in &self.cubes {
            v[c.level as usize] += 1;
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_invariants() {
        let d = PolygonDomain::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        let w = whitney_decompose(&d, 7).unwrap();
        assert!(w.check.all(), "{:?}", w.check);
        assert!(w.check.max_ratio <= 4.0);
        let covered = w.area() + w.truncated_area;
        assert!((covered - 1.0).abs() < 1e-12, "{covered}");
        for &[a, b] in &w.adjacency {
            let (ca, cb) = (&w.cubes[a as usize], &w.cubes[b as usize]);
            let (la, ha) = ca.corners();
            let (lb, hb) = cb.corners();
            let ox = ha.x().min(hb.x()) - la.x().max(lb.x());
            let oy = ha.y().min(hb.y()) - la.y().max(lb.y());
            assert!((ox == 0.0 && oy > 0.0) || (oy == 0.0 && ox > 0.0));
        }
    }

    #[test]
    fn disk_counts_grow_near_boundary() {
        let d = PolygonDomain::disk(Point::ORIGIN, 1.0, 1024).unwrap();
        let w = whitney_decompose(&d, 8).unwrap();
        assert!(w.check.all(), "{:?}", w.check);
        let c = w.level_counts();
        // Boundary-adjacent generations roughly double: the boundary is a curve.
        for k in 5..8 {
            let r = c[k + 1] as f64 / c[k] as f64;
            assert!((1.6..2.6).contains(&r), "{c:?}");
        }
        let p = Point::new2(0.31, -0.2);
        let i = w.locate(&p).unwrap();
        assert!(w.cubes[i].distance_to(&p) == 0.0);
    }
}
