//! Exact planar primitives: points, segments, polygons and packings.

use num_traits::{Signed, Zero};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sets::line::{normalize, Comp};
use crate::sets::rat::{cross, orient, qmax, qmin, QPoint, Q};

fn dot(u: &QPoint, v: &QPoint) -> Q {
    &u.x * &v.x + &u.y * &v.y
}

fn zero() -> Q {
    Q::zero()
}

fn one() -> Q {
    Q::from_integer(1.into())
}

/// Simple polygon given by its vertices in either orientation (closing edge implied).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    pub vertices: Vec<QPoint>,
}

impl Polygon {
    pub fn new(vertices: Vec<QPoint>) -> Result<Self> {
        let p = Polygon { vertices };
        p.validate()?;
        Ok(p)
    }

    /// Axis-aligned rectangle `[x0, x1] x [y0, y1]`, counter-clockwise.
    pub fn rect(x0: Q, y0: Q, x1: Q, y1: Q) -> Self {
        Polygon {
            vertices: vec![
                QPoint::new(x0.clone(), y0.clone()),
                QPoint::new(x1.clone(), y0),
                QPoint::new(x1, y1.clone()),
                QPoint::new(x0, y1),
            ],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.vertices.len() < 3 {
            return Err(Error::Construction("polygon needs at least 3 vertices".into()));
        }
        if self.signed_area2().is_zero() {
            return Err(Error::Construction("polygon has zero area".into()));
        }
        Ok(())
    }

    pub fn edges(&self) -> impl Iterator<Item = (&QPoint, &QPoint)> {
        let n = self.vertices.len();
        (0..n).map(move |i| (&self.vertices[i], &self.vertices[(i + 1) % n]))
    }

    fn signed_area2(&self) -> Q {
        self.edges().fold(zero(), |s, (a, b)| s + cross(a, b))
    }

    pub fn area(&self) -> Q {
        self.signed_area2().abs() / Q::from_integer(2.into())
    }

    /// Counter-clockwise copy.
    pub fn ccw(&self) -> Polygon {
        let mut v = self.vertices.clone();
        if self.signed_area2().is_negative() {
            v.reverse();
        }
        Polygon { vertices: v }
    }

    pub fn is_convex(&self) -> bool {
        let p = self.ccw();
        let n = p.vertices.len();
        (0..n).all(|i| !orient(&p.vertices[i], &p.vertices[(i + 1) % n], &p.vertices[(i + 2) % n]).is_negative())
    }

    pub fn on_boundary(&self, p: &QPoint) -> bool {
        self.edges().any(|(a, b)| on_segment(a, b, p))
    }

    /// Closed-polygon membership (even-odd rule, boundary included).
    pub fn contains_closed(&self, p: &QPoint) -> bool {
        if self.on_boundary(p) {
            return true;
        }
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.y > p.y) != (b.y > p.y) {
                // x-coordinate of the edge at height p.y compared with p.x, exactly.
                let lhs = (&p.x - &a.x) * (&b.y - &a.y);
                let rhs = (&b.x - &a.x) * (&p.y - &a.y);
                let crosses = if (&b.y - &a.y).is_positive() { lhs < rhs } else { lhs > rhs };
                if crosses {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn contains_open(&self, p: &QPoint) -> bool {
        !self.on_boundary(p) && self.contains_closed(p)
    }

    pub fn bbox(&self) -> (QPoint, QPoint) {
        bbox_of(&self.vertices).unwrap()
    }

    /// Components of `{t in [0,1] : a + t (b - a) in closed polygon}`.
    pub fn segment_components(&self, a: &QPoint, b: &QPoint) -> Vec<Comp> {
        if a == b {
            return if self.contains_closed(a) { vec![Comp::solid(zero(), zero())] } else { Vec::new() };
        }
        let mut ts = vec![zero(), one()];
        for (c, d) in self.edges() {
            match seg_seg(a, b, c, d) {
                SegHit::None => {}
                SegHit::Point(t) => ts.push(t),
                SegHit::Overlap(t0, t1) => {
                    ts.push(t0);
                    ts.push(t1);
                }
            }
        }
        ts.sort();
        ts.dedup();
        let mut out = Vec::new();
        for t in &ts {
            if self.contains_closed(&a.lerp(b, t)) {
                out.push(Comp::solid(t.clone(), t.clone()));
            }
        }
        for w in ts.windows(2) {
            let mid = (&w[0] + &w[1]) / Q::from_integer(2.into());
            if self.contains_closed(&a.lerp(b, &mid)) {
                out.push(Comp::solid(w[0].clone(), w[1].clone()));
            }
        }
        normalize(out)
    }

    /// Open interval `(lo, hi)` of parameters with `a + t (b - a)` in the interior of
    /// this convex polygon (`None` ends are unbounded), or `None` if empty.
    pub fn open_convex_span(&self, a: &QPoint, b: &QPoint) -> Option<(Option<Q>, Option<Q>)> {
        self.convex_span(a, b, true)
    }

    /// Closed counterpart of [`Polygon::open_convex_span`].
    pub fn closed_convex_span(&self, a: &QPoint, b: &QPoint) -> Option<(Option<Q>, Option<Q>)> {
        self.convex_span(a, b, false)
    }

    fn convex_span(&self, a: &QPoint, b: &QPoint, strict: bool) -> Option<(Option<Q>, Option<Q>)> {
        let p = self.ccw();
        let (mut lo, mut hi): (Option<Q>, Option<Q>) = (None, None);
        for (c, d) in p.edges() {
            let g0 = orient(c, d, a);
            let g1 = orient(c, d, b);
            let slope = &g1 - &g0;
            if slope.is_zero() {
                if g0.is_negative() || (strict && g0.is_zero()) {
                    return None;
                }
                continue;
            }
            let root = -&g0 / &slope;
            if slope.is_positive() {
                lo = Some(match lo {
                    Some(l) => qmax(&l, &root),
                    None => root,
                });
            } else {
                hi = Some(match hi {
                    Some(h) => qmin(&h, &root),
                    None => root,
                });
            }
        }
        if let (Some(l), Some(h)) = (&lo, &hi) {
            if l > h || (strict && l == h) {
                return None;
            }
        }
        Some((lo, hi))
    }

    /// Sutherland–Hodgman clip of this polygon by a convex polygon; returns the
    /// vertices of the intersection (possibly degenerate), empty if disjoint.
    pub fn clip_convex(&self, clip: &Polygon) -> Vec<QPoint> {
        clip_points(self.vertices.clone(), clip)
    }
}

pub(crate) fn clip_points(subject: Vec<QPoint>, clip: &Polygon) -> Vec<QPoint> {
    let clip = clip.ccw();
    let mut out = subject;
    for (c, d) in clip.edges() {
        if out.is_empty() {
            break;
        }
        let input = std::mem::take(&mut out);
        let n = input.len();
        for i in 0..n {
            let cur = &input[i];
            let prev = &input[(i + n - 1) % n];
            let gc = orient(c, d, cur);
            let gp = orient(c, d, prev);
            let cin = !gc.is_negative();
            let pin = !gp.is_negative();
            if cin {
                if !pin {
                    out.push(prev.lerp(cur, &(&gp / (&gp - &gc))));
                }
                out.push(cur.clone());
            } else if pin {
                out.push(prev.lerp(cur, &(&gp / (&gp - &gc))));
            }
        }
    }
    out.dedup();
    out
}

pub(crate) fn bbox_of(pts: &[QPoint]) -> Option<(QPoint, QPoint)> {
    let first = pts.first()?;
    let (mut lo, mut hi) = (first.clone(), first.clone());
    for p in &pts[1..] {
        if p.x < lo.x {
            lo.x = p.x.clone();
        }
        if p.y < lo.y {
            lo.y = p.y.clone();
        }
        if p.x > hi.x {
            hi.x = p.x.clone();
        }
        if p.y > hi.y {
            hi.y = p.y.clone();
        }
    }
    Some((lo, hi))
}

pub fn on_segment(a: &QPoint, b: &QPoint, p: &QPoint) -> bool {
    orient(a, b, p).is_zero()
        && qmin(&a.x, &b.x) <= p.x
        && p.x <= qmax(&a.x, &b.x)
        && qmin(&a.y, &b.y) <= p.y
        && p.y <= qmax(&a.y, &b.y)
}

pub(crate) enum SegHit {
    None,
    /// Parameter on the first segment.
    Point(Q),
    /// Collinear overlap, as a parameter range on the first segment.
    Overlap(Q, Q),
}

/// Intersection of `a -> b` with `c -> d`, parametrized on `a -> b`.
pub(crate) fn seg_seg(a: &QPoint, b: &QPoint, c: &QPoint, d: &QPoint) -> SegHit {
    let r = b.sub(a);
    let s = d.sub(c);
    let ca = c.sub(a);
    let den = cross(&r, &s);
    if !den.is_zero() {
        let t = cross(&ca, &s) / &den;
        let u = cross(&ca, &r) / &den;
        if t >= zero() && t <= one() && u >= zero() && u <= one() {
            return SegHit::Point(t);
        }
        return SegHit::None;
    }
    if !cross(&ca, &r).is_zero() {
        return SegHit::None;
    }
    let rr = dot(&r, &r);
    if rr.is_zero() {
        return SegHit::None;
    }
    let tc = dot(&ca, &r) / &rr;
    let td = dot(&d.sub(a), &r) / &rr;
    let lo = qmax(&qmin(&tc, &td), &zero());
    let hi = qmin(&qmax(&tc, &td), &one());
    if lo > hi {
        SegHit::None
    } else if lo == hi {
        SegHit::Point(lo)
    } else {
        SegHit::Overlap(lo, hi)
    }
}

/// Finite union of points, closed segments and closed filled polygons.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Primitives {
    #[serde(default)]
    points: Vec<QPoint>,
    #[serde(default)]
    segments: Vec<[QPoint; 2]>,
    #[serde(default)]
    polygons: Vec<Polygon>,
    /// Float bounding boxes of the segments and polygons, for cheap rejection.
    #[serde(skip)]
    boxes: OnceLock<(Vec<FBox>, Vec<FBox>)>,
    /// Float endpoints of the segments.
    #[serde(skip)]
    fsegs: OnceLock<Vec<[[f64; 2]; 2]>>,
}

impl PartialEq for Primitives {
    fn eq(&self, o: &Self) -> bool {
        self.points == o.points && self.segments == o.segments && self.polygons == o.polygons
    }
}

/// `[x0, y0, x1, y1]`, widened to absorb conversion rounding.
/// `[x0, y0, x1, y1]`, padded outward.
pub type FBox = [f64; 4];

fn fbox(pts: &[QPoint]) -> FBox {
    let (lo, hi) = bbox_of(pts).expect("nonempty");
    let (x0, y0) = lo.to_f64();
    let (x1, y1) = hi.to_f64();
    let m = 1e-9 * (1.0 + x0.abs().max(y0.abs()).max(x1.abs()).max(y1.abs()));
    [x0 - m, y0 - m, x1 + m, y1 + m]
}

pub(crate) fn fbox_disjoint(a: &FBox, b: &FBox) -> bool {
    a[2] < b[0] || b[2] < a[0] || a[3] < b[1] || b[3] < a[1]
}

impl Primitives {
    pub fn new(points: Vec<QPoint>, segments: Vec<[QPoint; 2]>, polygons: Vec<Polygon>) -> Result<Self> {
        let p = Primitives { points, segments, polygons, ..Default::default() };
        p.validate()?;
        Ok(p)
    }

    pub fn from_points(points: Vec<QPoint>) -> Self {
        Primitives { points, ..Default::default() }
    }

    pub fn from_segments(segments: Vec<[QPoint; 2]>) -> Self {
        Primitives { segments, ..Default::default() }
    }

    pub fn from_polygons(polygons: Vec<Polygon>) -> Result<Self> {
        Primitives::new(Vec::new(), Vec::new(), polygons)
    }

    pub fn points(&self) -> &[QPoint] {
        &self.points
    }

    pub fn segments(&self) -> &[[QPoint; 2]] {
        &self.segments
    }

    pub fn polygons(&self) -> &[Polygon] {
        &self.polygons
    }

    /// Conservative: `false` only when no primitive can meet the box.
    pub fn may_meet_box(&self, b: &FBox) -> bool {
        let (sb, pb) = self.boxes();
        self.points.iter().any(|p| {
            let (x, y) = p.to_f64();
            x >= b[0] - 1e-9 && x <= b[2] + 1e-9 && y >= b[1] - 1e-9 && y <= b[3] + 1e-9
        }) || sb.iter().chain(pb).any(|x| !fbox_disjoint(x, b))
    }

    /// Conservative: `false` only when the segment `ab` certainly misses every
    /// primitive. Orientation tests carry a margin well above f64 rounding.
    pub fn may_meet_segment(&self, a: [f64; 2], b: [f64; 2]) -> bool {
        let bx = [a[0].min(b[0]), a[1].min(b[1]), a[0].max(b[0]), a[1].max(b[1])];
        if !self.may_meet_box(&bx) {
            return false;
        }
        if !self.points.is_empty() || !self.polygons.is_empty() {
            return true;
        }
        let (sb, _) = self.boxes();
        let fsegs = self.fsegs.get_or_init(|| {
            self.segments
                .iter()
                .map(|[c, d]| {
                    let (c, d) = (c.to_f64(), d.to_f64());
                    [[c.0, c.1], [d.0, d.1]]
                })
                .collect()
        });
        let orient = |p: [f64; 2], q: [f64; 2], r: [f64; 2]| (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
        fsegs.iter().zip(sb).any(|(&[c, d], cb)| {
            if fbox_disjoint(cb, &bx) {
                return false;
            }
            let scale = [a, b, c, d].iter().fold(1.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs()));
            let eps = 1e-9 * scale * scale;
            let (o1, o2) = (orient(a, b, c), orient(a, b, d));
            let (o3, o4) = (orient(c, d, a), orient(c, d, b));
            let apart = |x: f64, y: f64| (x > eps && y > eps) || (x < -eps && y < -eps);
            !(apart(o1, o2) || apart(o3, o4))
        })
    }

    fn boxes(&self) -> &(Vec<FBox>, Vec<FBox>) {
        self.boxes.get_or_init(|| {
            (self.segments.iter().map(|s| fbox(s)).collect(), self.polygons.iter().map(|g| fbox(&g.vertices)).collect())
        })
    }

    pub fn validate(&self) -> Result<()> {
        for p in &self.polygons {
            p.validate()?;
        }
        Ok(())
    }

    pub fn contains(&self, p: &QPoint) -> bool {
        self.points.iter().any(|x| x == p)
            || self.segments.iter().any(|[a, b]| on_segment(a, b, p))
            || self.polygons.iter().any(|g| g.contains_closed(p))
    }

    pub fn segment_components(&self, a: &QPoint, b: &QPoint) -> Vec<Comp> {
        let mut out = Vec::new();
        let degenerate = a == b;
        let q = fbox(&[a.clone(), b.clone()]);
        let (sb, pb) = self.boxes();
        for p in &self.points {
            if degenerate {
                if p == a {
                    out.push(Comp::solid(zero(), zero()));
                }
            } else if on_segment(a, b, p) {
                let r = b.sub(a);
                let t = dot(&p.sub(a), &r) / dot(&r, &r);
                out.push(Comp::solid(t.clone(), t));
            }
        }
        for ([c, d], bx) in self.segments.iter().zip(sb) {
            if fbox_disjoint(&q, bx) {
                continue;
            }
            if degenerate {
                if on_segment(c, d, a) {
                    out.push(Comp::solid(zero(), zero()));
                }
                continue;
            }
            if c == d {
                if on_segment(a, b, c) {
                    let r = b.sub(a);
                    let t = dot(&c.sub(a), &r) / dot(&r, &r);
                    out.push(Comp::solid(t.clone(), t));
                }
                continue;
            }
            match seg_seg(a, b, c, d) {
                SegHit::None => {}
                SegHit::Point(t) => out.push(Comp::solid(t.clone(), t)),
                SegHit::Overlap(t0, t1) => out.push(Comp::solid(t0, t1)),
            }
        }
        for (g, bx) in self.polygons.iter().zip(pb) {
            if !fbox_disjoint(&q, bx) {
                out.extend(g.segment_components(a, b));
            }
        }
        normalize(out)
    }

    /// Vertices of the pieces inside a convex window (for bounding boxes).
    pub fn clip_points(&self, window: &Polygon) -> Vec<QPoint> {
        let mut pts = Vec::new();
        for p in &self.points {
            if window.contains_closed(p) {
                pts.push(p.clone());
            }
        }
        let q = fbox(&window.vertices);
        let (sb, pb) = self.boxes();
        for ([c, d], bx) in self.segments.iter().zip(sb) {
            if fbox_disjoint(&q, bx) {
                continue;
            }
            if let Some((lo, hi)) = window.closed_convex_span(c, d) {
                let t0 = qmax(&lo.unwrap_or_else(zero), &zero());
                let t1 = qmin(&hi.unwrap_or_else(one), &one());
                if t0 <= t1 {
                    pts.push(c.lerp(d, &t0));
                    pts.push(c.lerp(d, &t1));
                }
            }
        }
        for (g, bx) in self.polygons.iter().zip(pb) {
            if !fbox_disjoint(&q, bx) {
                pts.extend(g.clip_convex(window));
            }
        }
        pts
    }

    pub fn all_points(&self) -> Vec<QPoint> {
        let mut v = self.points.clone();
        for [a, b] in &self.segments {
            v.push(a.clone());
            v.push(b.clone());
        }
        for g in &self.polygons {
            v.extend(g.vertices.iter().cloned());
        }
        v
    }

    pub fn area(&self) -> Q {
        self.polygons.iter().fold(zero(), |s, g| s + g.area())
    }
}

/// Closed convex outer region minus pairwise-disjoint open convex regions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PackingSpec", into = "PackingSpec")]
pub struct Packing {
    pub spec: PackingSpec,
    /// Largest number of points shared by two packed boundaries.
    pub boundary_bound: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackingSpec {
    pub outer: Polygon,
    pub packed: Vec<Polygon>,
}

impl From<Packing> for PackingSpec {
    fn from(p: Packing) -> Self {
        p.spec
    }
}

impl TryFrom<PackingSpec> for Packing {
    type Error = Error;
    fn try_from(s: PackingSpec) -> Result<Self> {
        packing_residual(s)
    }
}

fn interiors_disjoint(p: &Polygon, q: &Polygon) -> bool {
    for poly in [p, q] {
        for (a, b) in poly.edges() {
            let n = QPoint::new(&a.y - &b.y, &b.x - &a.x);
            let proj = |g: &Polygon| {
                let vals: Vec<Q> = g.vertices.iter().map(|v| dot(v, &n)).collect();
                (vals.iter().min().unwrap().clone(), vals.iter().max().unwrap().clone())
            };
            let (p0, p1) = proj(p);
            let (q0, q1) = proj(q);
            if p1 <= q0 || q1 <= p0 {
                return true;
            }
        }
    }
    false
}

/// Number of common boundary points of two convex polygons with disjoint
/// interiors, or `None` if they share a boundary segment.
fn boundary_contacts(p: &Polygon, q: &Polygon) -> Option<usize> {
    let mut pts: Vec<QPoint> = Vec::new();
    for (a, b) in p.edges() {
        for (c, d) in q.edges() {
            match seg_seg(a, b, c, d) {
                SegHit::None => {}
                SegHit::Point(t) => pts.push(a.lerp(b, &t)),
                SegHit::Overlap(..) => return None,
            }
        }
    }
    pts.sort();
    pts.dedup();
    Some(pts.len())
}

/// Validates a packing: convex pieces, packed regions inside the outer one, with
/// disjoint interiors and finitely many common boundary points.
pub fn packing_residual(spec: PackingSpec) -> Result<Packing> {
    spec.outer.validate()?;
    if !spec.outer.is_convex() {
        return Err(Error::Construction("outer region must be convex".into()));
    }
    for (i, d) in spec.packed.iter().enumerate() {
        d.validate()?;
        if !d.is_convex() {
            return Err(Error::Construction(format!("packed region {i} is not convex")));
        }
        if !d.vertices.iter().all(|v| spec.outer.contains_closed(v)) {
            return Err(Error::Construction(format!("packed region {i} leaves the outer region")));
        }
    }
    let mut bound = 0;
    for i in 0..spec.packed.len() {
        for j in i + 1..spec.packed.len() {
            let (p, q) = (&spec.packed[i], &spec.packed[j]);
            let (pl, ph) = p.bbox();
            let (ql, qh) = q.bbox();
            if ph.x < ql.x || qh.x < pl.x || ph.y < ql.y || qh.y < pl.y {
                continue;
            }
            if !interiors_disjoint(p, q) {
                return Err(Error::Construction(format!("packed regions {i} and {j} overlap")));
            }
            match boundary_contacts(p, q) {
                Some(n) => bound = bound.max(n),
                None => {
                    return Err(Error::Construction(format!(
                        "packed regions {i} and {j} share a boundary segment"
                    )))
                }
            }
        }
    }
    Ok(Packing { spec, boundary_bound: bound })
}

impl Packing {
    pub fn contains(&self, p: &QPoint) -> bool {
        self.spec.outer.contains_closed(p) && !self.spec.packed.iter().any(|d| d.contains_open(p))
    }

    pub fn area(&self) -> Q {
        self.spec.packed.iter().fold(self.spec.outer.area(), |s, d| s - d.area())
    }

    pub fn segment_components(&self, a: &QPoint, b: &QPoint) -> Vec<Comp> {
        if a == b {
            return if self.contains(a) { vec![Comp::solid(zero(), zero())] } else { Vec::new() };
        }
        let Some((lo, hi)) = self.spec.outer.closed_convex_span(a, b) else { return Vec::new() };
        let t0 = qmax(&lo.unwrap_or_else(zero), &zero());
        let t1 = qmin(&hi.unwrap_or_else(one), &one());
        if t0 > t1 {
            return Vec::new();
        }
        let mut pieces = vec![Comp::solid(t0, t1)];
        for d in &self.spec.packed {
            let Some((lo, hi)) = d.open_convex_span(a, b) else { continue };
            let mut next = Vec::with_capacity(pieces.len() + 1);
            for c in pieces {
                let left_end = match &lo {
                    Some(l) => qmin(l, &c.b),
                    None => {
                        // The removed span reaches below the piece.
                        c.a.clone() - one()
                    }
                };
                let right_start = match &hi {
                    Some(h) => qmax(h, &c.a),
                    None => c.b.clone() + one(),
                };
                let removed_overlaps = left_end < c.b && right_start > c.a;
                if !removed_overlaps {
                    next.push(c);
                    continue;
                }
                if lo.is_some() && left_end >= c.a {
                    next.push(Comp::solid(c.a.clone(), left_end));
                }
                if hi.is_some() && right_start <= c.b {
                    next.push(Comp::solid(right_start, c.b.clone()));
                }
            }
            pieces = next;
        }
        normalize(pieces)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::rat::{qi, qr};

    fn sq(x0: i64, y0: i64, x1: i64, y1: i64) -> Polygon {
        Polygon::rect(qi(x0), qi(y0), qi(x1), qi(y1))
    }

    #[test]
    fn polygon_basics() {
        let p = sq(0, 0, 2, 2);
        assert_eq!(p.area(), qi(4));
        assert!(p.contains_closed(&QPoint::new(qi(2), qi(1))));
        assert!(!p.contains_open(&QPoint::new(qi(2), qi(1))));
        assert!(p.contains_open(&QPoint::new(qi(1), qi(1))));
        assert!(!p.contains_closed(&QPoint::new(qi(3), qi(1))));
    }

    #[test]
    fn segment_through_square() {
        let p = sq(0, 0, 2, 2);
        let c = p.segment_components(&QPoint::new(qi(-1), qi(1)), &QPoint::new(qi(3), qi(1)));
        assert_eq!(c, vec![Comp::solid(qr(1, 4), qr(3, 4))]);
        let touch = p.segment_components(&QPoint::new(qi(-1), qi(3)), &QPoint::new(qi(3), qi(-1)));
        assert_eq!(touch, vec![Comp::solid(qr(1, 4), qr(3, 4))]);
        let corner = p.segment_components(&QPoint::new(qi(1), qi(3)), &QPoint::new(qi(3), qi(1)));
        assert_eq!(corner, vec![Comp::solid(qr(1, 2), qr(1, 2))]);
    }

    #[test]
    fn frame_residual() {
        let pk = packing_residual(PackingSpec { outer: sq(0, 0, 3, 3), packed: vec![sq(1, 1, 2, 2)] }).unwrap();
        assert_eq!(pk.area(), qi(8));
        let c = pk.segment_components(&QPoint::new(qi(0), qr(3, 2)), &QPoint::new(qi(3), qr(3, 2)));
        assert_eq!(c, vec![Comp::solid(qi(0), qr(1, 3)), Comp::solid(qr(2, 3), qi(1))]);
        assert!(pk.contains(&QPoint::new(qi(1), qr(3, 2))));
        assert!(!pk.contains(&QPoint::new(qr(3, 2), qr(3, 2))));
    }

    #[test]
    fn overlap_rejected() {
        let r = packing_residual(PackingSpec { outer: sq(0, 0, 4, 4), packed: vec![sq(0, 0, 2, 2), sq(1, 1, 3, 3)] });
        assert!(r.is_err());
        let shared = packing_residual(PackingSpec { outer: sq(0, 0, 4, 4), packed: vec![sq(0, 0, 2, 2), sq(2, 0, 4, 2)] });
        assert!(shared.is_err());
        let corner = packing_residual(PackingSpec { outer: sq(0, 0, 4, 4), packed: vec![sq(0, 0, 2, 2), sq(2, 2, 4, 4)] }).unwrap();
        assert_eq!(corner.boundary_bound, 1);
    }
}
