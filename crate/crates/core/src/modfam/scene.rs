use fixedbitset::FixedBitSet;

use crate::error::{domain, Result};
use crate::geom::Point;
use crate::grid::Lattice;

/// Which curves of Γ(F1, F2; U) are admitted, relative to the scene obstacle E.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "k")]
pub enum CurveConstraint {
    Unconstrained,
    /// Paths may not touch any obstacle cell.
    Avoid,
    /// Paths may touch at most `k` obstacle cells (counted with multiplicity).
    Budget(u32),
}

/// Sampling grid with the open set U, the marked continua F1, F2 and an obstacle mask E.
/// Cells outside U ∪ F1 ∪ F2 are walls.
#[derive(Clone, Debug)]
pub struct GridScene {
    pub lattice: Lattice,
    pub u: FixedBitSet,
    pub f1: FixedBitSet,
    pub f2: FixedBitSet,
    pub obstacle: FixedBitSet,
}

impl GridScene {
    pub fn empty(lattice: Lattice) -> Self {
        let n = lattice.len();
        GridScene {
            lattice,
            u: FixedBitSet::with_capacity(n),
            f1: FixedBitSet::with_capacity(n),
            f2: FixedBitSet::with_capacity(n),
            obstacle: FixedBitSet::with_capacity(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim
    }

    pub fn spacing(&self) -> f64 {
        self.lattice.spacing
    }

    pub fn is_traversable(&self, i: usize) -> bool {
        self.u[i] || self.f1[i] || self.f2[i]
    }

    /// Checks the scene invariants: F1, F2 nonempty, disjoint, disjoint from U,
    /// and each connected under the full neighbour relation.
    pub fn validate(&self) -> Result<()> {
        let n = self.lattice.len();
        for (name, m) in [("u", &self.u), ("f1", &self.f1), ("f2", &self.f2), ("obstacle", &self.obstacle)] {
            if m.len() != n {
                return domain(format!("mask {name} has length {} but the lattice has {n} cells", m.len()));
            }
        }
        if self.f1.count_ones(..) == 0 || self.f2.count_ones(..) == 0 {
            return domain("marked continua must be nonempty");
        }
        if !self.f1.is_disjoint(&self.f2) {
            return domain("F1 and F2 overlap");
        }
        if !self.u.is_disjoint(&self.f1) || !self.u.is_disjoint(&self.f2) {
            return domain("U must be disjoint from the marked continua");
        }
        for (name, m) in [("F1", &self.f1), ("F2", &self.f2)] {
            if !self.is_connected(m) {
                return domain(format!("{name} is not connected in the grid graph"));
            }
        }
        Ok(())
    }

    fn is_connected(&self, m: &FixedBitSet) -> bool {
        let Some(start) = m.ones().next() else { return false };
        let mut seen = FixedBitSet::with_capacity(m.len());
        seen.insert(start);
        let mut stack = vec![start];
        let mut count = 1;
        while let Some(i) = stack.pop() {
            for j in self.lattice.neighbours(i, true) {
                if m[j] && !seen[j] {
                    seen.insert(j);
                    count += 1;
                    stack.push(j);
                }
            }
        }
        count == m.count_ones(..)
    }

    /// Marks cells by a classifier on the cell centre.
    pub fn from_classifier(lattice: Lattice, f: impl Fn(&Point) -> CellRole) -> Self {
        let mut s = GridScene::empty(lattice);
        for i in 0..s.lattice.len() {
            match f(&s.lattice.center(i)) {
                CellRole::Wall => {}
                CellRole::Free => s.u.insert(i),
                CellRole::Source => s.f1.insert(i),
                CellRole::Target => s.f2.insert(i),
            }
        }
        s
    }

    /// Annulus `r < |x - c| < R` on a given lattice: F1 = `|x - c| <= r`, F2 = `|x - c| >= R`.
    pub fn annulus_on(lattice: Lattice, c: Point, r: f64, big_r: f64) -> Result<Self> {
        if !(r > 0.0 && r < big_r) {
            return domain(format!("annulus needs 0 < r < R, got r={r}, R={big_r}"));
        }
        let s = GridScene::from_classifier(lattice, |p| {
            let d = p.dist(&c);
            if d <= r {
                CellRole::Source
            } else if d < big_r {
                CellRole::Free
            } else {
                CellRole::Target
            }
        });
        s.validate()?;
        Ok(s)
    }

    /// Centred annulus on an `n^dim` grid whose box is `[-R-2h, R+2h]^dim`.
    pub fn annulus(dim: usize, r: f64, big_r: f64, n: usize) -> Result<Self> {
        if n < 8 {
            return domain("annulus grid needs at least 8 cells per side");
        }
        let h = 2.0 * big_r / (n as f64 - 4.0);
        let lattice = Lattice::cube(dim, n, -big_r - 2.0 * h, h)?;
        GridScene::annulus_on(lattice, Point::ORIGIN, r, big_r)
    }

    /// Rectangle `[0, L] x [0, W]` with `n` cells along its length; F1 and F2 are
    /// one-cell columns outside the short sides.
    pub fn rectangle(length: f64, width: f64, n: usize) -> Result<Self> {
        if !(length > 0.0 && width > 0.0) || n == 0 {
            return domain("rectangle needs positive sides and cells");
        }
        let h = length / n as f64;
        let rows = (width / h).round().max(1.0) as usize;
        let lattice = Lattice::new(2, [n + 2, rows, 1], Point::new2(-h, 0.0), h)?;
        let s = GridScene::from_classifier(lattice, |p| {
            if p.x() < 0.0 {
                CellRole::Source
            } else if p.x() > length {
                CellRole::Target
            } else {
                CellRole::Free
            }
        });
        s.validate()?;
        Ok(s)
    }

    /// Square ring between the squares of half-side `r` and `R`, with F1 and F2 the
    /// two radial slits along the positive and negative first axis. Every square
    /// boundary in between meets both slits.
    pub fn square_ring_slits(r: f64, big_r: f64, n: usize) -> Result<Self> {
        if !(r > 0.0 && r < big_r) {
            return domain(format!("square ring needs 0 < r < R, got r={r}, R={big_r}"));
        }
        if n % 2 == 1 || n < 8 {
            return domain("square ring grid needs an even side count >= 8");
        }
        let h = 2.0 * big_r / n as f64;
        let lattice = Lattice::cube(2, n, -big_r, h)?;
        let s = GridScene::from_classifier(lattice, |p| {
            let m = p.x().abs().max(p.y().abs());
            if m <= r {
                CellRole::Wall
            } else if p.y().abs() < h && p.y() > 0.0 {
                if p.x() > 0.0 {
                    CellRole::Source
                } else {
                    CellRole::Target
                }
            } else {
                CellRole::Free
            }
        });
        s.validate()?;
        Ok(s)
    }

    /// Square ring `r < |x|_inf < R` with F1 the inner square and F2 the outside.
    pub fn square_ring(r: f64, big_r: f64, n: usize) -> Result<Self> {
        if !(r > 0.0 && r < big_r) {
            return domain(format!("square ring needs 0 < r < R, got r={r}, R={big_r}"));
        }
        let h = 2.0 * big_r / (n as f64 - 4.0);
        let lattice = Lattice::cube(2, n, -big_r - 2.0 * h, h)?;
        let s = GridScene::from_classifier(lattice, |p| {
            let m = p.x().abs().max(p.y().abs());
            if m <= r {
                CellRole::Source
            } else if m < big_r {
                CellRole::Free
            } else {
                CellRole::Target
            }
        });
        s.validate()?;
        Ok(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellRole {
    Wall,
    Free,
    Source,
    Target,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn annulus_partitions_cells() {
        let s = GridScene::annulus(2, 1.0, std::f64::consts::E, 64).unwrap();
        let n = s.lattice.len();
        assert_eq!(s.u.count_ones(..) + s.f1.count_ones(..) + s.f2.count_ones(..), n);
    }

    #[test]
    fn rectangle_shape() {
        let s = GridScene::rectangle(2.0, 1.0, 40).unwrap();
        assert_eq!(s.lattice.shape, [42, 20, 1]);
        assert_eq!(s.f1.count_ones(..), 20);
    }

    #[test]
    fn disconnected_source_rejected() {
        let l = Lattice::cube(2, 8, 0.0, 1.0).unwrap();
        let s = GridScene::from_classifier(l, |p| {
            if p.x() < 1.0 && (p.y() < 1.0 || p.y() > 7.0) {
                CellRole::Source
            } else if p.x() > 7.0 {
                CellRole::Target
            } else {
                CellRole::Free
            }
        });
        assert!(s.validate().is_err());
    }
}
