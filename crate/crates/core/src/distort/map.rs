use std::collections::HashMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geom::Point;
use crate::grid::Lattice;

/// A homeomorphism known through forward and inverse evaluation.
pub trait Correspondence: Sync {
    fn dim(&self) -> usize;
    fn forward(&self, p: &Point) -> Option<Point>;
    fn backward(&self, q: &Point) -> Option<Point>;
}

/// The inverse of a correspondence: forward and backward swapped.
#[derive(Clone, Copy)]
pub struct Inverted<'a, C: ?Sized>(pub &'a C);

impl<C: Correspondence + ?Sized> Correspondence for Inverted<'_, C> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn forward(&self, p: &Point) -> Option<Point> {
        self.0.backward(p)
    }
    fn backward(&self, q: &Point) -> Option<Point> {
        self.0.forward(q)
    }
}

/// Linear map given by a row-major matrix (planar maps use the upper 2x2 block).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearMap {
    pub dim: usize,
    pub matrix: [[f64; 3]; 3],
}

impl LinearMap {
    pub fn diag(d: &[f64]) -> Self {
        let mut matrix = [[0.0; 3]; 3];
        matrix[2][2] = 1.0;
        for (k, v) in d.iter().enumerate() {
            matrix[k][k] = *v;
        }
        LinearMap { dim: d.len(), matrix }
    }

    pub fn rotation_scale(angle: f64, scale: f64) -> Self {
        let (s, c) = angle.sin_cos();
        LinearMap { dim: 2, matrix: [[scale * c, -scale * s, 0.0], [scale * s, scale * c, 0.0], [0.0, 0.0, 1.0]] }
    }

    pub fn apply(&self, p: &Point) -> Point {
        let mut out = [0.0; 3];
        for i in 0..self.dim {
            for k in 0..self.dim {
                out[i] += self.matrix[i][k] * p.0[k];
            }
        }
        Point(out)
    }
}

/// Orientation-preserving map sampled at the centres of a lattice and extended
/// by piecewise multilinear interpolation between neighbouring centres.
#[derive(Clone, Debug)]
pub struct SampledMap {
    lattice: Lattice,
    values: Vec<Point>,
    index: QuadIndex,
}

#[derive(Clone, Debug)]
struct QuadIndex {
    cell: f64,
    buckets: HashMap<[i64; 3], Vec<u32>>,
    boxes: Vec<(Point, Point)>,
}

fn corners(dim: usize) -> impl Iterator<Item = [usize; 3]> {
    (0..1usize << dim).map(move |b| [b & 1, (b >> 1) & 1, (b >> 2) & 1])
}

fn solve(dim: usize, j: &[[f64; 3]; 3], r: &[f64; 3]) -> Option<[f64; 3]> {
    if dim == 2 {
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-300 {
            return None;
        }
        return Some([(r[0] * j[1][1] - r[1] * j[0][1]) / det, (j[0][0] * r[1] - j[1][0] * r[0]) / det, 0.0]);
    }
    let det3 = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let det = det3(j);
    if det.abs() < 1e-300 {
        return None;
    }
    let mut x = [0.0; 3];
    for (k, xk) in x.iter_mut().enumerate() {
        let mut m = *j;
        for i in 0..3 {
            m[i][k] = r[i];
        }
        *xk = det3(&m) / det;
    }
    Some(x)
}

fn det(dim: usize, j: &[[f64; 3]; 3]) -> f64 {
    if dim == 2 {
        j[0][0] * j[1][1] - j[0][1] * j[1][0]
    } else {
        j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1]) - j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0])
            + j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0])
    }
}

impl SampledMap {
    /// Checks sample count, injectivity on samples and a consistent positive
    /// orientation of every interpolation cell.
    pub fn from_values(lattice: Lattice, values: Vec<Point>) -> Result<Self> {
        let dim = lattice.dim;
        if values.len() != lattice.len() {
            return domain(format!("expected {} samples, got {}", lattice.len(), values.len()));
        }
        if (0..dim).any(|k| lattice.shape[k] < 2) {
            return domain("sampled map needs at least two samples per axis");
        }
        if values.iter().any(|v| v.0.iter().any(|c| !c.is_finite())) {
            return domain("non-finite sample value");
        }
        let mut seen = HashMap::with_capacity(values.len());
        for (i, v) in values.iter().enumerate() {
            let key = v.0.map(|c| if c == 0.0 { 0 } else { c.to_bits() });
            if let Some(j) = seen.insert(key, i) {
                return Err(Error::Consistency(format!("samples {j} and {i} have the same image")));
            }
        }
        let mut map = SampledMap { lattice, values, index: QuadIndex { cell: 1.0, buckets: HashMap::new(), boxes: Vec::new() } };
        for q in 0..map.quad_count() {
            let c = map.quad_coords(q);
            // Corner Jacobians may vanish at a critical sample (r -> r^2 at 0).
            let mid = [0.5, 0.5, if dim == 3 { 0.5 } else { 0.0 }];
            let bad = det(dim, &map.local_jacobian(c, mid)) <= 0.0
                || corners(dim).any(|corner| det(dim, &map.local_jacobian(c, corner.map(|v| v as f64))) < 0.0);
            if bad {
                return Err(Error::Consistency(format!("interpolation cell {c:?} is not positively oriented")));
            }
        }
        map.build_index();
        Ok(map)
    }

    pub fn from_fn(lattice: Lattice, f: impl Fn(&Point) -> Point) -> Result<Self> {
        let values = (0..lattice.len()).map(|i| f(&lattice.center(i))).collect();
        SampledMap::from_values(lattice, values)
    }

    /// Samples `f` at the centres of an `n^dim` lattice covering `[lo, hi]^dim`
    /// so that the first and last centres sit at `lo` and `hi`.
    pub fn on_cube(dim: usize, n: usize, lo: f64, hi: f64, f: impl Fn(&Point) -> Point) -> Result<Self> {
        if n < 2 || !(hi > lo) {
            return domain("cube sampling needs n >= 2 and lo < hi");
        }
        let h = (hi - lo) / (n - 1) as f64;
        SampledMap::from_fn(Lattice::cube(dim, n, lo - h / 2.0, h)?, f)
    }

    /// Reads CSV rows `x1..xn,f1..fn` (n = 2 or 3) on a complete regular grid.
    pub fn from_csv(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).comment(Some(b'#')).from_reader(reader);
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            let row: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
            let row = row.map_err(|e| Error::Parse(format!("row {}: {e}", line + 1)))?;
            rows.push(row);
        }
        let width = rows.first().map_or(0, Vec::len);
        if width != 4 && width != 6 {
            return Err(Error::Parse(format!("expected 4 or 6 columns, got {width}")));
        }
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::Parse("ragged rows".into()));
        }
        let dim = width / 2;
        let mut axes: Vec<Vec<f64>> = Vec::new();
        for k in 0..dim {
            let mut v: Vec<f64> = rows.iter().map(|r| r[k]).collect();
            v.sort_by(f64::total_cmp);
            v.dedup();
            axes.push(v);
        }
        if axes.iter().any(|a| a.len() < 2) {
            return domain("grid needs at least two distinct coordinates per axis");
        }
        let h = axes[0][1] - axes[0][0];
        for a in &axes {
            for w in a.windows(2) {
                if ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(1.0) {
                    return domain("sample coordinates are not on a regular grid");
                }
            }
        }
        let mut shape = [1usize; 3];
        let mut origin = [0.0; 3];
        for k in 0..dim {
            shape[k] = axes[k].len();
            origin[k] = axes[k][0] - h / 2.0;
        }
        let lattice = Lattice::new(dim, shape, Point(origin), h)?;
        if rows.len() != lattice.len() {
            return domain(format!("grid has {} nodes but {} rows", lattice.len(), rows.len()));
        }
        let mut values = vec![None; lattice.len()];
        for r in &rows {
            let mut c = [0usize; 3];
            for k in 0..dim {
                c[k] = ((r[k] - axes[k][0]) / h).round() as usize;
            }
            values[lattice.index(c)] = Some(Point::from_slice(&r[dim..]));
        }
        let values: Option<Vec<Point>> = values.into_iter().collect();
        let values = values.ok_or_else(|| Error::Parse("duplicate grid coordinates".into()))?;
        SampledMap::from_values(lattice, values)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn values(&self) -> &[Point] {
        &self.values
    }

    pub fn spacing(&self) -> f64 {
        self.lattice.spacing
    }

    /// Box spanned by the sample centres.
    pub fn domain_box(&self) -> (Point, Point) {
        (self.lattice.center(0), self.lattice.center(self.lattice.len() - 1))
    }

    /// Distance from `x` to the boundary of the sampled box (negative outside).
    pub fn boundary_distance(&self, x: &Point) -> f64 {
        let (lo, hi) = self.domain_box();
        (0..self.lattice.dim).map(|k| (x.0[k] - lo.0[k]).min(hi.0[k] - x.0[k])).fold(f64::INFINITY, f64::min)
    }

    fn quad_shape(&self) -> [usize; 3] {
        let s = self.lattice.shape;
        let d = self.lattice.dim;
        [s[0] - 1, s[1] - 1, if d == 3 { s[2] - 1 } else { 1 }]
    }

    fn quad_count(&self) -> usize {
        self.quad_shape().iter().product()
    }

    fn quad_coords(&self, q: usize) -> [usize; 3] {
        let s = self.quad_shape();
        [q % s[0], (q / s[0]) % s[1], q / (s[0] * s[1])]
    }

    fn value_at(&self, c: [usize; 3], corner: [usize; 3]) -> Point {
        self.values[self.lattice.index([c[0] + corner[0], c[1] + corner[1], c[2] + corner[2]])]
    }

    fn interp(&self, c: [usize; 3], t: [f64; 3]) -> Point {
        let mut out = Point::ORIGIN;
        for corner in corners(self.lattice.dim) {
            let mut w = 1.0;
            for k in 0..self.lattice.dim {
                w *= if corner[k] == 1 { t[k] } else { 1.0 - t[k] };
            }
            out = out + self.value_at(c, corner) * w;
        }
        out
    }

    /// Derivative of the cell interpolant with respect to local coordinates.
    fn local_jacobian(&self, c: [usize; 3], t: [f64; 3]) -> [[f64; 3]; 3] {
        let d = self.lattice.dim;
        let mut j = [[0.0; 3]; 3];
        for corner in corners(d) {
            let v = self.value_at(c, corner);
            for k in 0..d {
                let mut w = if corner[k] == 1 { 1.0 } else { -1.0 };
                for m in 0..d {
                    if m != k {
                        w *= if corner[m] == 1 { t[m] } else { 1.0 - t[m] };
                    }
                }
                for i in 0..d {
                    j[i][k] += w * v.0[i];
                }
            }
        }
        j
    }

    fn locate(&self, p: &Point) -> Option<([usize; 3], [f64; 3])> {
        let (lo, _) = self.domain_box();
        let qs = self.quad_shape();
        let mut c = [0usize; 3];
        let mut t = [0.0; 3];
        for k in 0..self.lattice.dim {
            let u = (p.0[k] - lo.0[k]) / self.lattice.spacing;
            let last = qs[k] as f64;
            if !(u >= -1e-9 && u <= last + 1e-9) {
                return None;
            }
            let ck = (u.floor().max(0.0) as usize).min(qs[k] - 1);
            c[k] = ck;
            t[k] = (u - ck as f64).clamp(0.0, 1.0);
        }
        Some((c, t))
    }

    /// Jacobian matrix of the interpolant at `p`.
    pub fn jacobian(&self, p: &Point) -> Option<[[f64; 3]; 3]> {
        let (c, t) = self.locate(p)?;
        let mut j = self.local_jacobian(c, t);
        for row in j.iter_mut() {
            for v in row.iter_mut() {
                *v /= self.lattice.spacing;
            }
        }
        Some(j)
    }

    fn build_index(&mut self) {
        let n = self.quad_count();
        let mut boxes = Vec::with_capacity(n);
        let mut total = 0.0;
        for q in 0..n {
            let c = self.quad_coords(q);
            let mut lo = Point([f64::INFINITY; 3]);
            let mut hi = Point([f64::NEG_INFINITY; 3]);
            for corner in corners(self.lattice.dim) {
                let v = self.value_at(c, corner);
                for k in 0..3 {
                    lo.0[k] = lo.0[k].min(v.0[k]);
                    hi.0[k] = hi.0[k].max(v.0[k]);
                }
            }
            total += (0..self.lattice.dim).map(|k| hi.0[k] - lo.0[k]).fold(0.0, f64::max);
            boxes.push((lo, hi));
        }
        let cell = (total / n as f64).max(1e-12);
        let mut buckets: HashMap<[i64; 3], Vec<u32>> = HashMap::new();
        let key = |x: f64| (x / cell).floor() as i64;
        for (q, (lo, hi)) in boxes.iter().enumerate() {
            let a = lo.0.map(key);
            let b = hi.0.map(key);
            for z in a[2]..=b[2] {
                for y in a[1]..=b[1] {
                    for x in a[0]..=b[0] {
                        buckets.entry([x, y, z]).or_default().push(q as u32);
                    }
                }
            }
        }
        self.index = QuadIndex { cell, buckets, boxes };
    }

    /// Newton iteration for the local coordinates of `y` in one cell.
    fn invert_in(&self, c: [usize; 3], y: &Point) -> Option<[f64; 3]> {
        let d = self.lattice.dim;
        let scale = self.index.cell.max(1e-300);
        let mut t = [0.5, 0.5, if d == 3 { 0.5 } else { 0.0 }];
        for _ in 0..30 {
            let r = *y - self.interp(c, t);
            let err = (0..d).map(|k| r.0[k].abs()).fold(0.0, f64::max);
            if err <= 1e-12 * scale {
                return (0..d).all(|k| (-1e-9..=1.0 + 1e-9).contains(&t[k])).then_some(t);
            }
            let step = solve(d, &self.local_jacobian(c, t), &r.0)?;
            for k in 0..d {
                // Damped so iterates stay near the cell.
                t[k] = (t[k] + step[k]).clamp(-0.5, 1.5);
            }
        }
        None
    }
}

impl Correspondence for SampledMap {
    fn dim(&self) -> usize {
        self.lattice.dim
    }

    fn forward(&self, p: &Point) -> Option<Point> {
        let (c, t) = self.locate(p)?;
        Some(self.interp(c, t))
    }

    /// Inverse by cell lookup in a bucket grid of image boxes and Newton refinement.
    fn backward(&self, y: &Point) -> Option<Point> {
        let d = self.lattice.dim;
        let cell = self.index.cell;
        let key = [(y.0[0] / cell).floor() as i64, (y.0[1] / cell).floor() as i64, (y.0[2] / cell).floor() as i64];
        let cands = self.index.buckets.get(&key)?;
        let (lo, _) = self.domain_box();
        let slack = 1e-9 * cell;
        for &q in cands {
            let (bl, bh) = &self.index.boxes[q as usize];
            if (0..d).any(|k| y.0[k] < bl.0[k] - slack || y.0[k] > bh.0[k] + slack) {
                continue;
            }
            let c = self.quad_coords(q as usize);
            if let Some(t) = self.invert_in(c, y) {
                let mut p = [0.0; 3];
                for k in 0..d {
                    p[k] = lo.0[k] + (c[k] as f64 + t[k].clamp(0.0, 1.0)) * self.lattice.spacing;
                }
                return Some(Point(p));
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn radial() -> SampledMap {
        SampledMap::on_cube(2, 81, -1.0, 1.0, |p| {
            let r = p.norm();
            *p * r
        })
        .unwrap_or_else(|e| panic!("{e}"))
    }

    #[test]
    fn linear_round_trip() {
        let a = LinearMap::diag(&[2.0, 1.0]);
        let f = SampledMap::on_cube(2, 41, -1.0, 1.0, |p| a.apply(p)).unwrap();
        for p in [Point::new2(0.3, -0.7), Point::new2(-0.99, 0.5), Point::new2(0.0, 0.0)] {
            let y = f.forward(&p).unwrap();
            assert!((y - a.apply(&p)).norm() < 1e-12);
            let back = f.backward(&y).unwrap();
            assert!(back.dist(&p) < 1e-9, "{back:?}");
        }
        assert!(f.forward(&Point::new2(1.5, 0.0)).is_none());
        assert!(f.backward(&Point::new2(2.5, 0.0)).is_none());
    }

    #[test]
    fn degenerate_map_rejected() {
        assert!(radial_critical().is_ok());
        let flip = SampledMap::on_cube(2, 5, 0.0, 1.0, |p| Point::new2(-p.x(), p.y()));
        assert!(matches!(flip, Err(Error::Consistency(_))));
        let fold = SampledMap::on_cube(2, 5, -1.0, 1.0, |p| Point::new2(p.x().abs(), p.y()));
        assert!(fold.is_err());
    }

    fn radial_critical() -> Result<SampledMap> {
        SampledMap::on_cube(2, 3, -1.0, 1.0, |p| *p * p.norm())
    }

    #[test]
    fn radial_round_trip_within_half_cell() {
        let f = radial();
        let h = f.spacing();
        for i in 0..200 {
            let a = i as f64 * 0.7;
            let r = 0.05 + 0.9 * (i as f64 / 200.0);
            let p = Point::new2(r * a.cos(), r * a.sin()) * 0.99;
            let y = f.forward(&p).unwrap();
            let back = f.backward(&y).unwrap();
            assert!(back.dist(&p) <= h / 2.0, "{p:?} -> {back:?}");
        }
    }

    #[test]
    fn csv_round_trip() {
        let mut s = String::from("# x,y,fx,fy\n");
        for j in 0..3 {
            for i in 0..4 {
                let (x, y) = (i as f64 * 0.5, j as f64 * 0.5);
                s.push_str(&format!("{x},{y},{},{}\n", 2.0 * x, y + 0.1 * x));
            }
        }
        let f = SampledMap::from_csv(s.as_bytes()).unwrap();
        assert_eq!(f.lattice().shape, [4, 3, 1]);
        let y = f.forward(&Point::new2(0.75, 0.25)).unwrap();
        assert!((y - Point::new2(1.5, 0.325)).norm() < 1e-12);
        assert!(SampledMap::from_csv("0,0,1\n".as_bytes()).is_err());
    }

    #[test]
    fn three_dimensional_inverse() {
        let f = SampledMap::on_cube(3, 9, -1.0, 1.0, |p| Point::new3(p.x() + 0.2 * p.y(), p.y(), 1.5 * p.z())).unwrap();
        let p = Point::new3(0.31, -0.42, 0.17);
        let back = f.backward(&f.forward(&p).unwrap()).unwrap();
        assert!(back.dist(&p) < 1e-9);
    }
}
