use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::geom::{Ball, Point};

/// Bounded open set approximated by samples: `members` lie in the set,
/// `frontier` are nearby samples outside it. Samples stand for cells of side
/// `pitch` (zero for a bare point cloud).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Region {
    pub dim: usize,
    pub members: Vec<Point>,
    pub frontier: Vec<Point>,
    pub pitch: f64,
}

impl Region {
    pub fn from_points(dim: usize, members: Vec<Point>, frontier: Vec<Point>, pitch: f64) -> Result<Self> {
        if members.is_empty() {
            return domain("region has no member samples");
        }
        if !(2..=3).contains(&dim) {
            return domain(format!("unsupported dimension {dim}"));
        }
        Ok(Region { dim, members, frontier, pitch })
    }

    /// Samples `inside` on a grid of the given pitch covering `[lo, hi]` with two
    /// cells of padding. Outside samples adjacent to a member form the frontier.
    pub fn from_predicate(dim: usize, lo: Point, hi: Point, pitch: f64, inside: impl Fn(&Point) -> bool) -> Result<Self> {
        GridSample::new(dim, lo, hi, pitch, inside)?.region()
    }

    pub fn bbox(&self) -> (Point, Point) {
        let mut lo = self.members[0];
        let mut hi = self.members[0];
        for p in &self.members {
            for k in 0..3 {
                lo.0[k] = lo.0[k].min(p.0[k]);
                hi.0[k] = hi.0[k].max(p.0[k]);
            }
        }
        (lo, hi)
    }

    /// Diameter of the member samples.
    pub fn diameter(&self) -> f64 {
        let pts = self.outline();
        let mut d: f64 = 0.0;
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                d = d.max(a.dist(b));
            }
        }
        d
    }

    pub fn scaled(&self, lambda: f64, shift: Point) -> Region {
        let f = |p: &Point| *p * lambda + shift;
        Region {
            dim: self.dim,
            members: self.members.iter().map(f).collect(),
            frontier: self.frontier.iter().map(f).collect(),
            pitch: self.pitch * lambda,
        }
    }

    /// Members that can be farthest from some point: the convex hull in the
    /// plane, members next to the frontier in space.
    fn outline(&self) -> Vec<Point> {
        if self.dim == 2 {
            return hull2(&self.members);
        }
        if self.pitch == 0.0 || self.frontier.is_empty() {
            return self.members.clone();
        }
        let reach = self.pitch * 1.75;
        let grid = Buckets::new(&self.frontier, reach);
        self.members.iter().copied().filter(|p| grid.nearest(p).map_or(true, |d| d <= reach)).collect()
    }
}

/// Regular sample grid with an inside flag per node.
#[derive(Clone, Debug)]
pub struct GridSample {
    pub dim: usize,
    pub n: [usize; 3],
    pub origin: [f64; 3],
    pub pitch: f64,
    pub inside: Vec<bool>,
}

impl GridSample {
    /// Grid of the given pitch covering `[lo, hi]` with two nodes of padding per side.
    pub fn new(dim: usize, lo: Point, hi: Point, pitch: f64, inside: impl Fn(&Point) -> bool) -> Result<Self> {
        if !(pitch > 0.0) {
            return domain("pitch must be positive");
        }
        if !(2..=3).contains(&dim) {
            return domain(format!("unsupported dimension {dim}"));
        }
        let mut n = [1usize; 3];
        let mut origin = [0.0; 3];
        for k in 0..dim {
            let ext = hi.0[k] - lo.0[k];
            if !(ext >= 0.0) {
                return domain("empty bounding box");
            }
            n[k] = (ext / pitch).ceil() as usize + 5;
            origin[k] = (lo.0[k] + hi.0[k]) / 2.0 - (n[k] as f64 - 1.0) * pitch / 2.0;
        }
        let mut g = GridSample { dim, n, origin, pitch, inside: Vec::new() };
        g.inside = (0..g.len()).map(|i| inside(&g.point(i))).collect();
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn coords(&self, i: usize) -> [usize; 3] {
        [i % self.n[0], (i / self.n[0]) % self.n[1], i / (self.n[0] * self.n[1])]
    }

    pub fn point(&self, i: usize) -> Point {
        let c = self.coords(i);
        let mut p = [0.0; 3];
        for k in 0..self.dim {
            p[k] = self.origin[k] + c[k] as f64 * self.pitch;
        }
        Point(p)
    }

    /// Indices of the full neighbourhood (8 or 26 nodes).
    fn neighbours(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let c = self.coords(i);
        let r = move |k: usize| if k < self.dim { -1i64..=1 } else { 0..=0 };
        r(2).flat_map(move |dz| r(1).flat_map(move |dy| r(0).map(move |dx| [dx, dy, dz]))).filter_map(move |d| {
            if d == [0, 0, 0] {
                return None;
            }
            let mut j = 0usize;
            let mut stride = 1usize;
            for k in 0..3 {
                let q = c[k] as i64 + d[k];
                if q < 0 || q >= self.n[k] as i64 {
                    return None;
                }
                j += q as usize * stride;
                stride *= self.n[k];
            }
            Some(j)
        })
    }

    pub fn is_frontier(&self, i: usize) -> bool {
        !self.inside[i] && self.neighbours(i).any(|j| self.inside[j])
    }

    pub fn region(&self) -> Result<Region> {
        let members = (0..self.len()).filter(|&i| self.inside[i]).map(|i| self.point(i)).collect();
        let frontier = (0..self.len()).filter(|&i| self.is_frontier(i)).map(|i| self.point(i)).collect();
        Region::from_points(self.dim, members, frontier, self.pitch)
    }

    /// Image of the sampled region under `f`. The pitch of the image is the
    /// longest image of a grid edge among the used samples. `None` when `f`
    /// is undefined at a used sample.
    pub fn mapped(&self, f: impl Fn(&Point) -> Option<Point>) -> Result<Option<Region>> {
        let used: Vec<bool> = (0..self.len()).map(|i| self.inside[i] || self.is_frontier(i)).collect();
        let mut img = vec![Point::ORIGIN; self.len()];
        for i in 0..self.len() {
            if used[i] {
                match f(&self.point(i)) {
                    Some(q) => img[i] = q,
                    None => return Ok(None),
                }
            }
        }
        let mut pitch: f64 = 0.0;
        for i in 0..self.len() {
            if !used[i] {
                continue;
            }
            let c = self.coords(i);
            let mut stride = 1;
            for k in 0..self.dim {
                if c[k] + 1 < self.n[k] && used[i + stride] {
                    pitch = pitch.max(img[i].dist(&img[i + stride]));
                }
                stride *= self.n[k];
            }
        }
        let members = (0..self.len()).filter(|&i| self.inside[i]).map(|i| img[i]).collect();
        let frontier = (0..self.len()).filter(|&i| used[i] && !self.inside[i]).map(|i| img[i]).collect();
        Region::from_points(self.dim, members, frontier, pitch).map(Some)
    }
}

/// Monotone-chain convex hull of planar points.
pub fn hull2(points: &[Point]) -> Vec<Point> {
    let mut p: Vec<Point> = points.to_vec();
    p.sort_by(|a, b| a.x().total_cmp(&b.x()).then(a.y().total_cmp(&b.y())));
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let cross = |o: &Point, a: &Point, b: &Point| (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
    let mut h: Vec<Point> = Vec::with_capacity(2 * p.len());
    for pass in 0..2 {
        let start = h.len();
        let iter: Box<dyn Iterator<Item = &Point>> = if pass == 0 { Box::new(p.iter()) } else { Box::new(p.iter().rev()) };
        for q in iter {
            while h.len() >= start + 2 && cross(&h[h.len() - 2], &h[h.len() - 1], q) <= 0.0 {
                h.pop();
            }
            h.push(*q);
        }
        h.pop();
    }
    h
}

/// Uniform bucket grid for nearest-sample queries.
struct Buckets {
    cell: f64,
    map: std::collections::HashMap<[i64; 3], Vec<Point>>,
    max_ring: i64,
    flat: bool,
}

impl Buckets {
    fn new(points: &[Point], cell: f64) -> Self {
        let mut map: std::collections::HashMap<[i64; 3], Vec<Point>> = std::collections::HashMap::new();
        let mut lo = [i64::MAX; 3];
        let mut hi = [i64::MIN; 3];
        for p in points {
            let k = Self::key(cell, p);
            for i in 0..3 {
                lo[i] = lo[i].min(k[i]);
                hi[i] = hi[i].max(k[i]);
            }
            map.entry(k).or_default().push(*p);
        }
        let max_ring = (0..3).map(|i| hi[i] - lo[i]).max().unwrap_or(0) + 1;
        let flat = points.iter().all(|p| p.0[2] == 0.0);
        Buckets { cell, map, max_ring, flat }
    }

    fn key(cell: f64, p: &Point) -> [i64; 3] {
        [(p.0[0] / cell).floor() as i64, (p.0[1] / cell).floor() as i64, (p.0[2] / cell).floor() as i64]
    }

    /// Distance to the nearest stored point, `None` if there are none.
    fn nearest(&self, p: &Point) -> Option<f64> {
        if self.map.is_empty() {
            return None;
        }
        let k = Self::key(self.cell, p);
        let flat = self.flat && p.0[2] == 0.0;
        let mut best = f64::INFINITY;
        let mut ring = 0i64;
        loop {
            let zr = if flat { 0 } else { ring };
            for dz in -zr..=zr {
                for dy in -ring..=ring {
                    for dx in -ring..=ring {
                        if dx.abs().max(dy.abs()).max(dz.abs()) != ring {
                            continue;
                        }
                        if let Some(v) = self.map.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) {
                            for q in v {
                                best = best.min(p.dist(q));
                            }
                        }
                    }
                }
            }
            // Everything beyond the current ring is at least `ring * cell` away.
            if best <= ring as f64 * self.cell {
                return Some(best);
            }
            if ring > self.max_ring && ring > self.max_ring + p_offset(self, p) {
                return Some(best);
            }
            ring += 1;
        }
    }
}

fn p_offset(b: &Buckets, p: &Point) -> i64 {
    // Rings needed to reach the occupied block from a far-away query point.
    let k = Buckets::key(b.cell, p);
    b.map.keys().map(|q| (0..3).map(|i| (q[i] - k[i]).abs()).max().unwrap()).min().unwrap_or(0)
}

/// Eccentricity estimate: a ball `B` with `B ⊂ A ⊂ M B`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Eccentricity {
    pub value: f64,
    pub ball: Ball,
}

/// Inner and outer radii about `c` with half-pitch tolerance.
fn radii(c: &Point, outline: &[Point], grid: &Buckets, half: f64) -> (f64, f64) {
    let outer = outline.iter().map(|p| c.dist(p)).fold(0.0, f64::max) + half;
    let inner = grid.nearest(c).map_or(f64::INFINITY, |d| d - half);
    (inner, outer)
}

fn ratio(c: &Point, outline: &[Point], grid: &Buckets, half: f64) -> f64 {
    let (inner, outer) = radii(c, outline, grid, half);
    if inner <= 0.0 {
        f64::INFINITY
    } else {
        (outer / inner).max(1.0)
    }
}

/// Upper estimate of `E(A) = inf { M : B ⊂ A ⊂ M B }` over ball centers found by a
/// grid search of the given pitch (capped at 200 points per axis) followed by a
/// pattern search down to `resolution / 64`. The radius is the largest one with
/// `B ⊂ A` at each center.
pub fn eccentricity(region: &Region, resolution: f64) -> Result<Eccentricity> {
    if region.members.is_empty() {
        return domain("empty region");
    }
    if !(resolution > 0.0) {
        return domain("search resolution must be positive");
    }
    let outline = region.outline();
    let half = region.pitch / 2.0;
    let (lo, hi) = region.bbox();
    let mut step = resolution;
    for k in 0..region.dim {
        step = step.max((hi.0[k] - lo.0[k]) / 200.0);
    }
    if region.frontier.is_empty() {
        // Nothing outside was sampled: any ball around the set works with M -> 1
        // only if the set is a ball; report the circumscribed ratio as unbounded.
        return domain("region has no frontier samples");
    }
    let grid = Buckets::new(&region.frontier, (step * 4.0).max(region.pitch * 2.0).max(1e-12));
    let mut n = [1usize; 3];
    for k in 0..region.dim {
        n[k] = ((hi.0[k] - lo.0[k]) / step).floor() as usize + 1;
    }
    let mut cands: Vec<(f64, Point)> = Vec::new();
    for iz in 0..n[2] {
        for iy in 0..n[1] {
            for ix in 0..n[0] {
                let mut c = lo;
                c.0[0] += ix as f64 * step;
                c.0[1] += iy as f64 * step;
                if region.dim == 3 {
                    c.0[2] += iz as f64 * step;
                }
                let m = ratio(&c, &outline, &grid, half);
                if m.is_finite() {
                    cands.push((m, c));
                }
            }
        }
    }
    if cands.is_empty() {
        // No grid center landed inside: fall back to member samples.
        for p in &region.members {
            let m = ratio(p, &outline, &grid, half);
            if m.is_finite() {
                cands.push((m, *p));
            }
        }
    }
    if cands.is_empty() {
        return domain("no admissible ball center found");
    }
    cands.sort_by(|a, b| a.0.total_cmp(&b.0));
    cands.truncate(8);
    let mut best = cands[0];
    for (m0, c0) in cands {
        let (mut m, mut c) = (m0, c0);
        let mut s = step / 2.0;
        while s >= resolution / 64.0 {
            let mut improved = false;
            for k in 0..region.dim {
                for sign in [-1.0, 1.0] {
                    let mut t = c;
                    t.0[k] += sign * s;
                    let mt = ratio(&t, &outline, &grid, half);
                    if mt < m {
                        m = mt;
                        c = t;
                        improved = true;
                    }
                }
            }
            if !improved {
                s /= 2.0;
            }
        }
        if m < best.0 {
            best = (m, c);
        }
    }
    let (inner, _) = radii(&best.1, &outline, &grid, half);
    Ok(Eccentricity { value: best.0, ball: Ball::new(best.1, inner)? })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk(h: f64) -> Region {
        Region::from_predicate(2, Point::new2(-1.0, -1.0), Point::new2(1.0, 1.0), h, |p| p.norm() < 1.0).unwrap()
    }

    #[test]
    fn disk_is_round() {
        let e = eccentricity(&disk(0.01), 0.01).unwrap();
        assert!(e.value < 1.0 + 0.02, "{}", e.value);
        assert!(e.ball.center.norm() < 0.02);
    }

    #[test]
    fn rectangle_two_by_one() {
        let r = Region::from_predicate(2, Point::new2(-1.0, -0.5), Point::new2(1.0, 0.5), 0.005, |p| {
            p.x().abs() < 1.0 && p.y().abs() < 0.5
        })
        .unwrap();
        let e = eccentricity(&r, 0.005).unwrap();
        assert!((e.value - 5f64.sqrt()).abs() < 0.02, "{}", e.value);
    }

    #[test]
    fn ellipse_two_one() {
        let r = Region::from_predicate(2, Point::new2(-2.0, -1.0), Point::new2(2.0, 1.0), 0.005, |p| {
            (p.x() / 2.0).powi(2) + p.y().powi(2) < 1.0
        })
        .unwrap();
        let e = eccentricity(&r, 0.005).unwrap();
        assert!((e.value - 2.0).abs() < 0.02, "{}", e.value);
    }

    #[test]
    fn scale_invariance() {
        let r = disk(0.02);
        let a = eccentricity(&r, 0.02).unwrap().value;
        let b = eccentricity(&r.scaled(3.0, Point::new2(5.0, -2.0)), 0.06).unwrap().value;
        assert!((a - b).abs() < 0.02);
    }

    #[test]
    fn hull_of_square() {
        let pts: Vec<Point> = (0..9).map(|i| Point::new2((i % 3) as f64, (i / 3) as f64)).collect();
        assert_eq!(hull2(&pts).len(), 4);
    }
}
