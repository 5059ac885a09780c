//! The tagged set model and its exact queries.

use fixedbitset::FixedBitSet;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Lattice;
use crate::sets::cantor::{make_cantor, Cantor, CantorSpec};
use crate::sets::line::{Comp, IntervalSet, LineSet};
use crate::sets::planar::{bbox_of, packing_residual, Packing, PackingSpec, Polygon, Primitives};
use crate::sets::rat::{f, q, qmax, qmin, QPoint, Q};

/// Compact set in the line or the plane with exact membership and segment queries.
/// One-dimensional kinds live on the x-axis when used as planar sets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "parameters", rename_all = "snake_case")]
pub enum SetModel {
    Intervals(IntervalSet),
    Cantor(Cantor),
    /// `G x F`: first factor along x, second along y.
    Product(Box<SetModel>, Box<SetModel>),
    Primitives(Primitives),
    Packing(Packing),
}

/// Convex query window.
#[derive(Clone, Debug)]
pub enum Window {
    Box(QPoint, QPoint),
    Convex(Polygon),
}

impl Window {
    fn polygon(&self) -> Polygon {
        match self {
            Window::Box(lo, hi) => Polygon::rect(lo.x.clone(), lo.y.clone(), hi.x.clone(), hi.y.clone()),
            Window::Convex(p) => p.clone(),
        }
    }
}

/// How a grid cell is decided to meet a set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RasterRule {
    /// The closed cell square meets the set.
    Closure,
    /// The diamond `|dx| + |dy| <= h/2` around the cell center meets the set;
    /// thin curves become 8-connected chains one cell wide.
    Diamond,
}

pub fn make_cantor_set(spec: CantorSpec) -> Result<SetModel> {
    Ok(SetModel::Cantor(make_cantor(spec)?))
}

pub fn product_set(g: SetModel, f: SetModel) -> Result<SetModel> {
    if g.line().is_none() || f.line().is_none() {
        return Err(Error::Domain("product factors must be one-dimensional".into()));
    }
    Ok(SetModel::Product(Box::new(g), Box::new(f)))
}

pub fn packing_set(spec: PackingSpec) -> Result<SetModel> {
    Ok(SetModel::Packing(packing_residual(spec)?))
}

impl SetModel {
    pub fn line(&self) -> Option<LineSet<'_>> {
        match self {
            SetModel::Intervals(s) => Some(LineSet::Intervals(s)),
            SetModel::Cantor(c) => Some(LineSet::Cantor(c)),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SetModel::Intervals(s) => s.validate(),
            SetModel::Cantor(_) | SetModel::Packing(_) => Ok(()),
            SetModel::Product(g, f) => {
                if g.line().is_none() || f.line().is_none() {
                    return Err(Error::Domain("product factors must be one-dimensional".into()));
                }
                Ok(())
            }
            SetModel::Primitives(p) => p.validate(),
        }
    }

    /// Membership of a planar point (ideal set where decidable).
    pub fn contains(&self, p: &QPoint) -> bool {
        match self {
            SetModel::Intervals(_) | SetModel::Cantor(_) => p.y.is_zero() && self.line().unwrap().contains_ideal(&p.x),
            SetModel::Product(g, fs) => {
                g.line().unwrap().contains_ideal(&p.x) && fs.line().unwrap().contains_ideal(&p.y)
            }
            SetModel::Primitives(s) => s.contains(p),
            SetModel::Packing(s) => s.contains(p),
        }
    }

    pub fn contains_f64(&self, x: f64, y: f64) -> bool {
        self.contains(&QPoint::from_f64(x, y))
    }

    /// Components of `{t in [0, 1] : a + t (b - a) in E}`.
    pub fn segment_components(&self, a: &QPoint, b: &QPoint) -> Result<Vec<Comp>> {
        let zero = Q::zero();
        let one = Q::from_integer(1.into());
        match self {
            SetModel::Intervals(_) | SetModel::Cantor(_) => {
                let l = self.line().unwrap();
                let dy = &b.y - &a.y;
                if dy.is_zero() {
                    if !a.y.is_zero() {
                        return Ok(Vec::new());
                    }
                    return Ok(l.preimage(&a.x, &(&b.x - &a.x), &zero, &one));
                }
                let t = -&a.y / &dy;
                if t < zero || t > one {
                    return Ok(Vec::new());
                }
                let x = a.lerp(b, &t).x;
                Ok(if l.contains_ideal(&x) { vec![Comp::solid(t.clone(), t)] } else { Vec::new() })
            }
            SetModel::Product(g, fs) => {
                let (g, fs) = (g.line().unwrap(), fs.line().unwrap());
                let dx = &b.x - &a.x;
                let dy = &b.y - &a.y;
                if dx.is_zero() {
                    if !g.contains_ideal(&a.x) {
                        return Ok(Vec::new());
                    }
                    return Ok(fs.preimage(&a.y, &dy, &zero, &one));
                }
                if dy.is_zero() {
                    if !fs.contains_ideal(&a.y) {
                        return Ok(Vec::new());
                    }
                    return Ok(g.preimage(&a.x, &dx, &zero, &one));
                }
                let (solid, other, s0, ds, o0, dox) = if g.is_solid() {
                    (&g, &fs, &a.x, &dx, &a.y, &dy)
                } else if fs.is_solid() {
                    (&fs, &g, &a.y, &dy, &a.x, &dx)
                } else {
                    return Err(Error::Unsupported(
                        "oblique segment against a product of two Cantor-type factors".into(),
                    ));
                };
                let mut out = Vec::new();
                for c in solid.preimage(s0, ds, &zero, &one) {
                    out.extend(other.preimage(o0, dox, &c.a, &c.b));
                }
                Ok(out)
            }
            SetModel::Primitives(s) => Ok(s.segment_components(a, b)),
            SetModel::Packing(s) => Ok(s.segment_components(a, b)),
        }
    }

    /// Conservative f64 test: `false` only when the set misses the segment `ab`.
    pub fn may_meet_segment(&self, a: [f64; 2], b: [f64; 2]) -> bool {
        match self {
            SetModel::Primitives(p) => p.may_meet_segment(a, b),
            _ => true,
        }
    }

    /// Exact bounding box of the set.
    pub fn bbox(&self) -> Option<(QPoint, QPoint)> {
        match self {
            SetModel::Intervals(_) | SetModel::Cantor(_) => {
                let (lo, hi) = self.line().unwrap().hull()?;
                Some((QPoint::new(lo, Q::zero()), QPoint::new(hi, Q::zero())))
            }
            SetModel::Product(g, fs) => {
                let (x0, x1) = g.line().unwrap().hull()?;
                let (y0, y1) = fs.line().unwrap().hull()?;
                Some((QPoint::new(x0, y0), QPoint::new(x1, y1)))
            }
            SetModel::Primitives(s) => bbox_of(&s.all_points()),
            SetModel::Packing(s) => Some(s.spec.outer.bbox()),
        }
    }

    /// Bounding box of `E ∩ window`, or `None` when they are disjoint. Exact except
    /// for packings, where the box of the outer region's clip is returned (an upper
    /// bound) unless the window lies inside one packed region.
    pub fn window_bbox(&self, w: &Window) -> Result<Option<(QPoint, QPoint)>> {
        match self {
            SetModel::Intervals(_) | SetModel::Cantor(_) => {
                let l = self.line().unwrap();
                let Some((lo, hi)) = l.hull() else { return Ok(None) };
                let (a, b) = (QPoint::new(lo, Q::zero()), QPoint::new(hi, Q::zero()));
                let comps = self.clip_x_axis(&w.polygon(), &a, &b);
                Ok(comps.map(|(x0, x1)| (QPoint::new(x0, Q::zero()), QPoint::new(x1, Q::zero()))))
            }
            SetModel::Product(g, fs) => {
                let Window::Box(lo, hi) = w else {
                    return Err(Error::Unsupported("product sets support box windows only".into()));
                };
                let gx = g.line().unwrap().components_in(&lo.x, &hi.x);
                let fy = fs.line().unwrap().components_in(&lo.y, &hi.y);
                if gx.is_empty() || fy.is_empty() {
                    return Ok(None);
                }
                let span = |v: &[Comp]| {
                    let a = v.iter().map(|c| c.a.clone()).min().unwrap();
                    let b = v.iter().map(|c| c.b.clone()).max().unwrap();
                    (a, b)
                };
                let (x0, x1) = span(&gx);
                let (y0, y1) = span(&fy);
                Ok(Some((QPoint::new(x0, y0), QPoint::new(x1, y1))))
            }
            SetModel::Primitives(s) => Ok(bbox_of(&s.clip_points(&w.polygon()))),
            SetModel::Packing(s) => {
                let pts = s.spec.outer.clip_convex(&w.polygon());
                if pts.is_empty() {
                    return Ok(None);
                }
                let swallowed = s.spec.packed.iter().any(|d| pts.iter().all(|p| d.contains_open(p)));
                Ok(if swallowed { None } else { bbox_of(&pts) })
            }
        }
    }

    fn clip_x_axis(&self, window: &Polygon, a: &QPoint, b: &QPoint) -> Option<(Q, Q)> {
        let l = self.line().unwrap();
        let (x0, x1) = if a == b {
            if !window.contains_closed(a) {
                return None;
            }
            (a.x.clone(), a.x.clone())
        } else {
            let (lo, hi) = window.closed_convex_span(a, b)?;
            let zero = Q::zero();
            let one = Q::from_integer(1.into());
            let t0 = qmax(&lo.unwrap_or_else(|| zero.clone()), &zero);
            let t1 = qmin(&hi.unwrap_or_else(|| one.clone()), &one);
            if t0 > t1 {
                return None;
            }
            (a.lerp(b, &t0).x, a.lerp(b, &t1).x)
        };
        let comps = l.components_in(&x0, &x1);
        let first = comps.first()?.a.clone();
        let last = comps.iter().map(|c| c.b.clone()).max().unwrap();
        Some((first, last))
    }

    pub fn meets(&self, w: &Window) -> Result<bool> {
        Ok(self.window_bbox(w)?.is_some())
    }

    /// Lebesgue measure in the set's own dimension: length for line sets, area for
    /// planar ones (ideal set, as `f64`).
    pub fn measure(&self) -> f64 {
        match self {
            SetModel::Intervals(s) => f(&s.length()),
            SetModel::Cantor(c) => c.ideal_measure(),
            SetModel::Product(g, fs) => g.measure() * fs.measure(),
            SetModel::Primitives(s) => f(&s.area()),
            SetModel::Packing(s) => f(&s.area()),
        }
    }

    /// Marks the lattice cells meeting the set (2D lattices only).
    pub fn rasterize(&self, lattice: &Lattice, rule: RasterRule) -> Result<FixedBitSet> {
        if lattice.dim != 2 {
            return Err(Error::Domain("rasterization needs a planar lattice".into()));
        }
        let mut mask = FixedBitSet::with_capacity(lattice.len());
        let [nx, ny, _] = lattice.shape;
        let Some((blo, bhi)) = self.bbox() else { return Ok(mask) };
        let h = lattice.spacing;
        let pad = h;
        let (bx0, by0) = blo.to_f64();
        let (bx1, by1) = bhi.to_f64();
        let ox = lattice.origin.x();
        let oy = lattice.origin.y();
        let range = |lo: f64, hi: f64, o: f64, n: usize| {
            let a = (((lo - pad - o) / h).floor().max(0.0)) as usize;
            let b = ((((hi + pad - o) / h).ceil()).max(0.0) as usize).min(n);
            (a, b)
        };
        let (i0, i1) = range(bx0, bx1, ox, nx);
        let (j0, j1) = range(by0, by1, oy, ny);
        if let (SetModel::Product(g, fs), RasterRule::Closure) = (self, rule) {
            let (g, fs) = (g.line().unwrap(), fs.line().unwrap());
            let cols: Vec<bool> = (0..nx)
                .map(|i| {
                    let (lo, hi) = lattice.bounds(lattice.index([i, 0, 0]));
                    i >= i0 && i < i1 && !g.components_in(&q(lo.x()), &q(hi.x())).is_empty()
                })
                .collect();
            let rows: Vec<bool> = (0..ny)
                .map(|j| {
                    let (lo, hi) = lattice.bounds(lattice.index([0, j, 0]));
                    j >= j0 && j < j1 && !fs.components_in(&q(lo.y()), &q(hi.y())).is_empty()
                })
                .collect();
            for j in 0..ny {
                for i in 0..nx {
                    if cols[i] && rows[j] {
                        mask.insert(lattice.index([i, j, 0]));
                    }
                }
            }
            return Ok(mask);
        }
        for j in j0..j1 {
            for i in i0..i1 {
                let idx = lattice.index([i, j, 0]);
                let w = cell_window(lattice, idx, rule);
                if self.meets(&w)? {
                    mask.insert(idx);
                }
            }
        }
        Ok(mask)
    }
}

/// Query window of a planar cell under a raster rule.
pub fn cell_window(lattice: &Lattice, idx: usize, rule: RasterRule) -> Window {
    let (lo, hi) = lattice.bounds(idx);
    match rule {
        RasterRule::Closure => Window::Box(QPoint::from_f64(lo.x(), lo.y()), QPoint::from_f64(hi.x(), hi.y())),
        RasterRule::Diamond => {
            let c = lattice.center(idx);
            let r = lattice.spacing / 2.0;
            Window::Convex(Polygon {
                vertices: vec![
                    QPoint::from_f64(c.x() + r, c.y()),
                    QPoint::from_f64(c.x(), c.y() + r),
                    QPoint::from_f64(c.x() - r, c.y()),
                    QPoint::from_f64(c.x(), c.y() - r),
                ],
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::line::Tag;
    use crate::sets::rat::{qi, qr};

    fn cantor_strip() -> SetModel {
        let c = make_cantor_set(CantorSpec::middle_thirds(4)).unwrap();
        let i = SetModel::Intervals(IntervalSet::new(vec![(qi(0), qi(1))]).unwrap());
        product_set(c, i).unwrap()
    }

    #[test]
    fn vertical_unit_segment() {
        let g = SetModel::Intervals(IntervalSet::points(vec![qi(0)]));
        let fs = SetModel::Intervals(IntervalSet::new(vec![(qi(0), qi(1))]).unwrap());
        let e = product_set(g, fs).unwrap();
        assert!(e.contains(&QPoint::new(qi(0), qr(1, 2))));
        assert!(!e.contains(&QPoint::new(qr(1, 10), qr(1, 2))));
        let c = e.segment_components(&QPoint::new(qi(-1), qi(-1)), &QPoint::new(qi(1), qi(1))).unwrap();
        assert_eq!(c, vec![Comp::solid(qr(1, 2), qr(1, 2))]);
    }

    #[test]
    fn strip_slices() {
        let e = cantor_strip();
        let h = e.segment_components(&QPoint::new(qi(-1), qr(1, 2)), &QPoint::new(qi(2), qr(1, 2))).unwrap();
        assert!(h.iter().all(|c| c.tag == Tag::Cantor { positive: false }));
        let gap = e.segment_components(&QPoint::new(qr(1, 2), qi(-1)), &QPoint::new(qr(1, 2), qi(2))).unwrap();
        assert!(gap.is_empty());
        let on = e.segment_components(&QPoint::new(qr(1, 3), qi(-1)), &QPoint::new(qr(1, 3), qi(2))).unwrap();
        assert_eq!(on, vec![Comp::solid(qr(1, 3), qr(2, 3))]);
    }

    #[test]
    fn oblique_cantor_square_unsupported() {
        let c = make_cantor_set(CantorSpec::middle_thirds(2)).unwrap();
        let e = product_set(c.clone(), c).unwrap();
        let r = e.segment_components(&QPoint::new(qi(0), qi(0)), &QPoint::new(qi(1), qr(1, 2)));
        assert!(matches!(r, Err(Error::Unsupported(_))));
    }

    #[test]
    fn serde_round_trip() {
        let e = cantor_strip();
        let s = serde_json::to_string(&e).unwrap();
        assert!(s.contains("\"kind\":\"product\""));
        let back: SetModel = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn raster_strip_columns() {
        let lat = Lattice::cube(2, 8, 0.0, 0.125).unwrap();
        let m = cantor_strip().rasterize(&lat, RasterRule::Closure).unwrap();
        // Columns 3 and 4 lie inside the first removed gap.
        let hit = |i: usize| m[lat.index([i, 4, 0])];
        assert!(hit(0) && hit(2) && !hit(3) && !hit(4) && hit(5) && hit(7));
    }
}
