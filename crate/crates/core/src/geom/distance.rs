use crate::error::{domain, Result};
use crate::geom::{PolyCurve, Point, Region};

/// A compact continuum given by a polygonal curve or by samples.
#[derive(Clone, Copy, Debug)]
pub enum Continuum<'a> {
    Curve(&'a PolyCurve),
    Samples(&'a [Point]),
}

impl<'a> From<&'a PolyCurve> for Continuum<'a> {
    fn from(c: &'a PolyCurve) -> Self {
        Continuum::Curve(c)
    }
}

impl<'a> From<&'a Region> for Continuum<'a> {
    fn from(r: &'a Region) -> Self {
        Continuum::Samples(&r.members)
    }
}

impl Continuum<'_> {
    fn pieces(&self) -> Vec<(Point, Point)> {
        match self {
            Continuum::Curve(c) if c.vertices().len() == 1 => vec![(c.vertices()[0], c.vertices()[0])],
            Continuum::Curve(c) => c.segments().collect(),
            Continuum::Samples(s) => s.iter().map(|p| (*p, *p)).collect(),
        }
    }

    fn vertices(&self) -> &[Point] {
        match self {
            Continuum::Curve(c) => c.vertices(),
            Continuum::Samples(s) => s,
        }
    }

    pub fn diameter(&self) -> f64 {
        let v = self.vertices();
        let mut d: f64 = 0.0;
        for (i, a) in v.iter().enumerate() {
            for b in &v[i + 1..] {
                d = d.max(a.dist(b));
            }
        }
        d
    }
}

/// Distance between segments `[p0, p1]` and `[q0, q1]` in space.
pub fn segment_distance(p0: &Point, p1: &Point, q0: &Point, q1: &Point) -> f64 {
    let d1 = *p1 - *p0;
    let d2 = *q1 - *q0;
    let r = *p0 - *q0;
    let a = d1.dot(&d1);
    let e = d2.dot(&d2);
    let f = d2.dot(&r);
    let (s, t);
    if a <= f64::EPSILON && e <= f64::EPSILON {
        return p0.dist(q0);
    }
    if a <= f64::EPSILON {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(&r);
        if e <= f64::EPSILON {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(&d2);
            let den = a * e - b * b;
            let mut s0 = if den > 0.0 { ((b * f - c * e) / den).clamp(0.0, 1.0) } else { 0.0 };
            let mut t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            t = t0;
        }
    }
    p0.lerp(p1, s).dist(&q0.lerp(q1, t))
}

/// Distance between two continua.
pub fn set_distance(a: Continuum<'_>, b: Continuum<'_>) -> f64 {
    let pb = b.pieces();
    let mut best = f64::INFINITY;
    for (p0, p1) in a.pieces() {
        for (q0, q1) in &pb {
            best = best.min(segment_distance(&p0, &p1, q0, q1));
        }
    }
    best
}

/// `Δ(F1, F2) = dist(F1, F2) / min(diam F1, diam F2)`.
pub fn relative_distance<'a, 'b>(f1: impl Into<Continuum<'a>>, f2: impl Into<Continuum<'b>>) -> Result<f64> {
    let (f1, f2) = (f1.into(), f2.into());
    let d = f1.diameter().min(f2.diameter());
    if !(d > 0.0) {
        return domain("relative distance needs sets of positive diameter");
    }
    Ok(set_distance(f1, f2) / d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concentric_circles() {
        let a = PolyCurve::circle(Point::ORIGIN, 1.0, 256);
        let b = PolyCurve::circle(Point::ORIGIN, 0.5, 256);
        let r = relative_distance(&a, &b).unwrap();
        assert!((r - 0.5).abs() < 1e-3, "{r}");
    }

    #[test]
    fn touching_is_zero() {
        let a = PolyCurve::segment(Point::new2(0.0, 0.0), Point::new2(1.0, 0.0));
        let b = PolyCurve::segment(Point::new2(1.0, 0.0), Point::new2(1.0, 1.0));
        assert_eq!(relative_distance(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn definition_example() {
        let a = PolyCurve::segment(Point::new2(0.0, 0.0), Point::new2(1.0, 0.0));
        let b = PolyCurve::segment(Point::new2(3.0, 0.0), Point::new2(6.0, 0.0));
        assert!((relative_distance(&a, &b).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_rejected() {
        let a = PolyCurve::new(vec![Point::new2(0.0, 0.0)]).unwrap();
        let b = PolyCurve::segment(Point::new2(3.0, 0.0), Point::new2(6.0, 0.0));
        assert!(relative_distance(&a, &b).is_err());
    }

    #[test]
    fn skew_segments() {
        let d = segment_distance(
            &Point::new3(0.0, 0.0, 0.0),
            &Point::new3(1.0, 0.0, 0.0),
            &Point::new3(0.5, -1.0, 2.0),
            &Point::new3(0.5, 1.0, 2.0),
        );
        assert!((d - 2.0).abs() < 1e-12);
    }
}
