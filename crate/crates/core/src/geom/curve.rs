use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::geom::Point;

/// Polygonal path with cached cumulative arclength.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyCurve {
    vertices: Vec<Point>,
    cumulative: Vec<f64>,
}

impl PolyCurve {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.is_empty() {
            return domain("a curve needs at least one vertex");
        }
        if vertices.iter().any(|p| p.0.iter().any(|x| !x.is_finite())) {
            return domain("curve vertices must be finite");
        }
        let mut cumulative = Vec::with_capacity(vertices.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for w in vertices.windows(2) {
            acc += w[0].dist(&w[1]);
            cumulative.push(acc);
        }
        Ok(PolyCurve { vertices, cumulative })
    }

    pub fn segment(a: Point, b: Point) -> Self {
        PolyCurve::new(vec![a, b]).expect("two finite points")
    }

    /// Regular polygon approximating the circle of radius `r`, closed.
    pub fn circle(center: Point, r: f64, sides: usize) -> Self {
        let sides = sides.max(3);
        let mut v: Vec<Point> = (0..sides)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / sides as f64;
                center + Point::new2(r * t.cos(), r * t.sin())
            })
            .collect();
        v.push(v[0]);
        PolyCurve::new(v).expect("finite circle")
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn length(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// Cumulative arclength at each vertex.
    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    /// The endpoint pair ∂γ.
    pub fn endpoints(&self) -> (Point, Point) {
        (self.vertices[0], *self.vertices.last().unwrap())
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    /// Point at arclength `s`, clamped to `[0, length]`.
    pub fn point_at(&self, s: f64) -> Point {
        let s = s.clamp(0.0, self.length());
        let k = match self.cumulative.binary_search_by(|c| c.partial_cmp(&s).unwrap()) {
            Ok(k) => return self.vertices[k],
            Err(k) => k,
        };
        let (s0, s1) = (self.cumulative[k - 1], self.cumulative[k]);
        let t = if s1 > s0 { (s - s0) / (s1 - s0) } else { 0.0 };
        self.vertices[k - 1].lerp(&self.vertices[k], t)
    }

    /// Restriction to the arclength window `[s0, s1]`.
    pub fn subpath(&self, s0: f64, s1: f64) -> PolyCurve {
        let (s0, s1) = (s0.clamp(0.0, self.length()), s1.clamp(0.0, self.length()));
        let (s0, s1) = (s0.min(s1), s0.max(s1));
        let mut v = vec![self.point_at(s0)];
        for (k, &c) in self.cumulative.iter().enumerate() {
            if c > s0 && c < s1 {
                v.push(self.vertices[k]);
            }
        }
        v.push(self.point_at(s1));
        PolyCurve::new(v).expect("finite subpath")
    }

    pub fn translate(&self, v: Point) -> PolyCurve {
        PolyCurve {
            vertices: self.vertices.iter().map(|p| *p + v).collect(),
            cumulative: self.cumulative.clone(),
        }
    }

    pub fn reversed(&self) -> PolyCurve {
        let mut v = self.vertices.clone();
        v.reverse();
        PolyCurve::new(v).expect("finite curve")
    }

    /// Concatenation; a repeated junction vertex is dropped.
    pub fn concat(&self, other: &PolyCurve) -> PolyCurve {
        let mut v = self.vertices.clone();
        let skip = usize::from(other.vertices[0] == *v.last().unwrap());
        v.extend_from_slice(&other.vertices[skip..]);
        PolyCurve::new(v).expect("finite curve")
    }

    /// Same trace with every segment split into `k` equal pieces.
    pub fn refined(&self, k: usize) -> PolyCurve {
        let k = k.max(1);
        let mut v = vec![self.vertices[0]];
        for (a, b) in self.segments() {
            for j in 1..=k {
                v.push(a.lerp(&b, j as f64 / k as f64));
            }
        }
        PolyCurve::new(v).expect("finite curve")
    }
}

/// JSON form: vertex rows in the given unit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyCurveRecord {
    pub unit: f64,
    pub vertices: Vec<Vec<f64>>,
}

impl PolyCurveRecord {
    pub fn from_curve(c: &PolyCurve, dim: usize, unit: f64) -> Self {
        PolyCurveRecord {
            unit,
            vertices: c.vertices().iter().map(|p| p.0[..dim].iter().map(|x| x / unit).collect()).collect(),
        }
    }

    pub fn to_curve(&self) -> Result<PolyCurve> {
        if !(self.unit > 0.0) {
            return domain("curve unit must be positive");
        }
        let mut pts = Vec::with_capacity(self.vertices.len());
        for row in &self.vertices {
            if row.len() < 2 || row.len() > 3 {
                return domain("curve vertices need 2 or 3 coordinates");
            }
            let scaled: Vec<f64> = row.iter().map(|x| x * self.unit).collect();
            pts.push(Point::from_slice(&scaled));
        }
        PolyCurve::new(pts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arclength_is_monotone_and_onto() {
        let c = PolyCurve::new(vec![Point::new2(0.0, 0.0), Point::new2(3.0, 0.0), Point::new2(3.0, 4.0)]).unwrap();
        assert_eq!(c.length(), 7.0);
        assert_eq!(c.point_at(0.0), Point::new2(0.0, 0.0));
        assert_eq!(c.point_at(7.0), Point::new2(3.0, 4.0));
        assert_eq!(c.point_at(5.0), Point::new2(3.0, 2.0));
    }

    #[test]
    fn subpath_length() {
        let c = PolyCurve::circle(Point::ORIGIN, 1.0, 64);
        let s = c.subpath(1.0, 2.5);
        assert!((s.length() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn record_round_trip() {
        let c = PolyCurve::new(vec![Point::new2(0.0, 1.0), Point::new2(2.0, 1.0)]).unwrap();
        let r = PolyCurveRecord::from_curve(&c, 2, 0.5);
        assert_eq!(r.vertices[1], vec![4.0, 2.0]);
        assert_eq!(r.to_curve().unwrap(), c);
    }
}
