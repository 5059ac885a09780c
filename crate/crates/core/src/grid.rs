//! Regular cell lattices, exact segment/cell traversal and neighbour stencils.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::geom::Point;

const SNAP: f64 = 1e-9;

/// Axis-aligned lattice of cubical cells. `origin` is the lower corner of cell 0.
/// Planar lattices have `dim == 2` and `shape[2] == 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub dim: usize,
    pub shape: [usize; 3],
    pub origin: Point,
    pub spacing: f64,
}

impl Lattice {
    pub fn new(dim: usize, shape: [usize; 3], origin: Point, spacing: f64) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return domain(format!("lattice dimension must be 2 or 3, got {dim}"));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return domain("lattice spacing must be positive");
        }
        let mut shape = shape;
        if dim == 2 {
            shape[2] = 1;
        }
        if shape.iter().any(|&s| s == 0) {
            return domain("lattice shape has a zero extent");
        }
        if shape.iter().product::<usize>() > u32::MAX as usize {
            return domain("lattice too large");
        }
        Ok(Lattice { dim, shape, origin, spacing })
    }

    /// Square/cubic lattice with `n` cells per side covering `[lo, lo + n h]^dim`.
    pub fn cube(dim: usize, n: usize, lo: f64, spacing: f64) -> Result<Self> {
        let origin = if dim == 2 { Point::new2(lo, lo) } else { Point::new3(lo, lo, lo) };
        Lattice::new(dim, [n, n, if dim == 2 { 1 } else { n }], origin, spacing)
    }

    pub fn len(&self) -> usize {
        self.shape[0] * self.shape[1] * self.shape[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dim as i32)
    }

    pub fn index(&self, c: [usize; 3]) -> usize {
        c[0] + self.shape[0] * (c[1] + self.shape[1] * c[2])
    }

    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.shape[0];
        let r = idx / self.shape[0];
        [i, r % self.shape[1], r / self.shape[1]]
    }

    /// Index of the signed integer cell coordinate, if inside the lattice.
    pub fn index_signed(&self, c: [i64; 3]) -> Option<usize> {
        for d in 0..3 {
            if c[d] < 0 || c[d] >= self.shape[d] as i64 {
                return None;
            }
        }
        Some(self.index([c[0] as usize, c[1] as usize, c[2] as usize]))
    }

    pub fn center(&self, idx: usize) -> Point {
        let c = self.coords(idx);
        let mut p = [0.0; 3];
        for d in 0..self.dim {
            p[d] = self.origin.0[d] + (c[d] as f64 + 0.5) * self.spacing;
        }
        Point(p)
    }

    /// Lower and upper corners of a cell.
    pub fn bounds(&self, idx: usize) -> (Point, Point) {
        let c = self.coords(idx);
        let mut lo = [0.0; 3];
        let mut hi = [0.0; 3];
        for d in 0..self.dim {
            lo[d] = self.origin.0[d] + c[d] as f64 * self.spacing;
            hi[d] = lo[d] + self.spacing;
        }
        (Point(lo), Point(hi))
    }

    /// Position in cell units: cell `c` occupies `[c, c+1)` on every axis.
    pub fn to_cell_units(&self, p: &Point) -> [f64; 3] {
        let mut u = [0.5; 3];
        for d in 0..self.dim {
            u[d] = (p.0[d] - self.origin.0[d]) / self.spacing;
        }
        u
    }

    pub fn locate(&self, p: &Point) -> Option<usize> {
        let u = self.to_cell_units(p);
        let mut c = [0i64; 3];
        for d in 0..3 {
            c[d] = u[d].floor() as i64;
        }
        self.index_signed(c)
    }

    /// Cell indices of the (2·dim)- or full 3^dim-1 neighbourhood.
    pub fn neighbours(&self, idx: usize, diagonal: bool) -> Vec<usize> {
        let c = self.coords(idx);
        let mut out = Vec::new();
        let zr = if self.dim == 3 { -1..=1 } else { 0..=0 };
        for dz in zr {
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    let nz = (dx != 0) as u8 + (dy != 0) as u8 + (dz != 0) as u8;
                    if nz == 0 || (!diagonal && nz > 1) {
                        continue;
                    }
                    let t = [c[0] as i64 + dx, c[1] as i64 + dy, c[2] as i64 + dz];
                    if let Some(j) = self.index_signed(t) {
                        out.push(j);
                    }
                }
            }
        }
        out
    }
}

/// Cells met by a segment, in cell units.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Traversal {
    /// Cells crossed with positive length, in order, with the length inside each.
    pub cells: Vec<([i64; 3], f64)>,
    /// Cells whose closure meets the segment only in a point or an edge (zero length).
    pub grazed: Vec<[i64; 3]>,
}

fn snap(x: f64) -> Option<i64> {
    let r = x.round();
    if (x - r).abs() < SNAP {
        Some(r as i64)
    } else {
        None
    }
}

fn cells_touching(p: [f64; 3], dim: usize) -> Vec<[i64; 3]> {
    let mut choices: Vec<Vec<i64>> = Vec::with_capacity(3);
    for (d, x) in p.iter().enumerate() {
        if d >= dim {
            choices.push(vec![0]);
        } else if let Some(m) = snap(*x) {
            choices.push(vec![m - 1, m]);
        } else {
            choices.push(vec![x.floor() as i64]);
        }
    }
    let mut out = Vec::new();
    for &a in &choices[0] {
        for &b in &choices[1] {
            for &c in &choices[2] {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// Exact traversal of the segment `a -> b` (cell units) through the unit-cell grid.
pub fn traverse(a: [f64; 3], b: [f64; 3], dim: usize) -> Traversal {
    let mut len2 = 0.0;
    for d in 0..dim {
        len2 += (b[d] - a[d]) * (b[d] - a[d]);
    }
    let len = len2.sqrt();
    let mut ts = vec![0.0, 1.0];
    for d in 0..dim {
        let (lo, hi) = (a[d].min(b[d]), a[d].max(b[d]));
        if hi - lo < SNAP {
            continue;
        }
        let mut m = lo.floor() as i64 + 1;
        while (m as f64) < hi {
            let t = (m as f64 - a[d]) / (b[d] - a[d]);
            if t > 0.0 && t < 1.0 {
                ts.push(t);
            }
            m += 1;
        }
    }
    ts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ts.dedup_by(|x, y| (*x - *y).abs() * len.max(1.0) < SNAP);
    let at = |t: f64| {
        let mut p = [0.0; 3];
        for d in 0..dim {
            p[d] = a[d] + t * (b[d] - a[d]);
        }
        p
    };
    let mut tr = Traversal::default();
    if len < SNAP {
        tr.grazed = cells_touching(a, dim);
        return tr;
    }
    for w in ts.windows(2) {
        let m = at(0.5 * (w[0] + w[1]));
        let mut c = [0i64; 3];
        for d in 0..dim {
            c[d] = m[d].floor() as i64;
        }
        let l = (w[1] - w[0]) * len;
        match tr.cells.last_mut() {
            Some((last, acc)) if *last == c => *acc += l,
            _ => tr.cells.push((c, l)),
        }
    }
    for &t in &ts {
        for c in cells_touching(at(t), dim) {
            if !tr.cells.iter().any(|(x, _)| *x == c) && !tr.grazed.contains(&c) {
                tr.grazed.push(c);
            }
        }
    }
    tr
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// A move between two cell centres, with the cells it crosses.
#[derive(Clone, Debug, PartialEq)]
pub struct StencilEdge {
    pub offset: [i64; 3],
    /// Euclidean length in cell units.
    pub length: f64,
    /// Crossed cells relative to the start cell, with length inside each (cell units).
    pub cells: Vec<([i64; 3], f64)>,
    /// Zero-length contacts relative to the start cell.
    pub grazed: Vec<[i64; 3]>,
}

/// Set of primitive moves with coordinates bounded by `reach`.
#[derive(Clone, Debug, PartialEq)]
pub struct Stencil {
    pub dim: usize,
    pub reach: i64,
    pub edges: Vec<StencilEdge>,
}

impl Stencil {
    /// `reach = 1` gives the 8-neighbour (2D) or 26-neighbour (3D) stencil;
    /// in the plane `reach = 2` adds knight moves (16 directions) and `reach = 3`
    /// gives 32 directions.
    pub fn new(dim: usize, reach: i64) -> Self {
        let zr = if dim == 3 { reach } else { 0 };
        let mut edges = Vec::new();
        for dz in -zr..=zr {
            for dy in -reach..=reach {
                for dx in -reach..=reach {
                    if dx == 0 && dy == 0 && dz == 0 {
                        continue;
                    }
                    if gcd(gcd(dx, dy), dz) != 1 {
                        continue;
                    }
                    let off = [dx, dy, dz];
                    let a = [0.5; 3];
                    let b = [0.5 + dx as f64, 0.5 + dy as f64, 0.5 + dz as f64];
                    let tr = traverse(a, b, dim);
                    edges.push(StencilEdge {
                        offset: off,
                        length: ((dx * dx + dy * dy + dz * dz) as f64).sqrt(),
                        cells: tr.cells,
                        grazed: tr.grazed,
                    });
                }
            }
        }
        Stencil { dim, reach, edges }
    }

    /// 32 directions in the plane, 26 in space.
    pub fn default_for(dim: usize) -> Self {
        Stencil::new(dim, if dim == 2 { 3 } else { 1 })
    }
}

/// Nonnegative per-cell density with its exponent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityField {
    pub lattice: Lattice,
    pub values: Vec<f64>,
    pub exponent: f64,
}

impl DensityField {
    pub fn zeros(lattice: Lattice, exponent: f64) -> Self {
        let n = lattice.len();
        DensityField { lattice, values: vec![0.0; n], exponent }
    }

    pub fn constant(lattice: Lattice, exponent: f64, v: f64) -> Self {
        let n = lattice.len();
        DensityField { lattice, values: vec![v; n], exponent }
    }

    /// Samples a closed-form density at the cell centres.
    pub fn from_fn(lattice: Lattice, exponent: f64, f: impl Fn(&Point) -> f64) -> Self {
        let values = (0..lattice.len()).map(|i| f(&lattice.center(i))).collect();
        DensityField { lattice, values, exponent }
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.len() != self.lattice.len() {
            return domain("density length does not match lattice");
        }
        if self.values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return domain("density values must be finite and nonnegative");
        }
        Ok(())
    }

    /// Σ ρ^p h^n.
    pub fn energy(&self) -> f64 {
        let p = self.exponent;
        self.values.iter().map(|v| v.powf(p)).sum::<f64>() * self.lattice.cell_volume()
    }

    /// Exact integral of the piecewise-constant density along a segment;
    /// the density vanishes outside the lattice.
    pub fn segment_integral(&self, a: &Point, b: &Point) -> f64 {
        let ua = self.lattice.to_cell_units(a);
        let ub = self.lattice.to_cell_units(b);
        let tr = traverse(ua, ub, self.lattice.dim);
        let mut s = 0.0;
        for (c, l) in tr.cells {
            if let Some(i) = self.lattice.index_signed(c) {
                s += self.values[i] * l;
            }
        }
        s * self.lattice.spacing
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn knight_move_splits_into_quarters() {
        let tr = traverse([0.5, 0.5, 0.5], [2.5, 1.5, 0.5], 2);
        assert_eq!(tr.cells.len(), 4);
        let q = 5f64.sqrt() / 4.0;
        for (_, l) in &tr.cells {
            assert!((l - q).abs() < 1e-12);
        }
        assert!(tr.grazed.is_empty());
    }

    #[test]
    fn diagonal_grazes_two_cells() {
        let tr = traverse([0.5, 0.5, 0.5], [1.5, 1.5, 0.5], 2);
        assert_eq!(tr.cells.len(), 2);
        assert_eq!(tr.grazed.len(), 2);
        assert!(tr.grazed.contains(&[1, 0, 0]) && tr.grazed.contains(&[0, 1, 0]));
    }

    #[test]
    fn stencil_sizes() {
        assert_eq!(Stencil::new(2, 1).edges.len(), 8);
        assert_eq!(Stencil::new(2, 2).edges.len(), 16);
        assert_eq!(Stencil::new(2, 3).edges.len(), 32);
        assert_eq!(Stencil::new(3, 1).edges.len(), 26);
        let s = Stencil::new(3, 1);
        let corner = s.edges.iter().find(|e| e.offset == [1, 1, 1]).unwrap();
        assert_eq!(corner.grazed.len(), 6);
    }

    #[test]
    fn traversal_lengths_sum_to_segment_length() {
        let a = [0.3, 1.7, 0.5];
        let b = [5.1, -2.2, 0.5];
        let tr = traverse(a, b, 2);
        let total: f64 = tr.cells.iter().map(|c| c.1).sum();
        let exact = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
        assert!((total - exact).abs() < 1e-12);
    }

    #[test]
    fn lattice_round_trip() {
        let l = Lattice::new(3, [4, 5, 6], Point::new3(-1.0, 0.0, 2.0), 0.5).unwrap();
        for i in 0..l.len() {
            assert_eq!(l.index(l.coords(i)), i);
            assert_eq!(l.locate(&l.center(i)), Some(i));
        }
    }
}
