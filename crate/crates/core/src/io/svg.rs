use std::fmt::Write;

use crate::geom::Point;

/// Minimal SVG builder in world coordinates (y up).
pub struct Svg {
    lo: Point,
    hi: Point,
    width: f64,
    body: String,
}

/// Viridis-like ramp on `[0, 1]`.
pub fn ramp(t: f64) -> String {
    const STOPS: [(f64, f64, f64); 5] =
        [(68.0, 1.0, 84.0), (59.0, 82.0, 139.0), (33.0, 145.0, 140.0), (94.0, 201.0, 98.0), (253.0, 231.0, 37.0)];
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
    let x = t * (STOPS.len() - 1) as f64;
    let i = (x.floor() as usize).min(STOPS.len() - 2);
    let f = x - i as f64;
    let (a, b) = (STOPS[i], STOPS[i + 1]);
    let c = |u: f64, v: f64| (u + (v - u) * f).round() as u8;
    format!("#{:02x}{:02x}{:02x}", c(a.0, b.0), c(a.1, b.1), c(a.2, b.2))
}

impl Svg {
    pub fn new(lo: Point, hi: Point, width: f64) -> Self {
        Svg { lo, hi, width, body: String::new() }
    }

    fn scale(&self) -> f64 {
        self.width / (self.hi.x() - self.lo.x()).max(1e-300)
    }

    fn map(&self, p: &Point) -> (f64, f64) {
        let s = self.scale();
        ((p.x() - self.lo.x()) * s, (self.hi.y() - p.y()) * s)
    }

    pub fn rect(&mut self, lo: &Point, hi: &Point, fill: &str, stroke: Option<&str>) {
        let (x, y) = self.map(&Point::new2(lo.x(), hi.y()));
        let s = self.scale();
        let st = stroke.map_or(String::new(), |c| format!(" stroke=\"{c}\" stroke-width=\"0.3\""));
        let _ = writeln!(
            self.body,
            "<rect x=\"{x:.3}\" y=\"{y:.3}\" width=\"{:.3}\" height=\"{:.3}\" fill=\"{fill}\"{st}/>",
            (hi.x() - lo.x()) * s,
            (hi.y() - lo.y()) * s
        );
    }

    pub fn circle(&mut self, c: &Point, r: f64, stroke: &str, fill: &str) {
        let (x, y) = self.map(c);
        let _ = writeln!(
            self.body,
            "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"{:.3}\" fill=\"{fill}\" stroke=\"{stroke}\" stroke-width=\"0.8\"/>",
            r * self.scale()
        );
    }

    pub fn polyline(&mut self, pts: &[Point], stroke: &str, closed: bool) {
        let mut d = String::new();
        for p in pts {
            let (x, y) = self.map(p);
            let _ = write!(d, "{x:.3},{y:.3} ");
        }
        let tag = if closed { "polygon" } else { "polyline" };
        let _ = writeln!(self.body, "<{tag} points=\"{}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"1\"/>", d.trim_end());
    }

    pub fn dots(&mut self, pts: &[Point], r: f64, fill: &str) {
        for p in pts {
            let (x, y) = self.map(p);
            let _ = writeln!(self.body, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"{r}\" fill=\"{fill}\"/>");
        }
    }

    pub fn finish(self) -> String {
        let h = (self.hi.y() - self.lo.y()) * self.scale();
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.3} {h:.3}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body,
            w = self.width
        )
    }
}

/// Heatmap of per-cell values on a planar lattice; `None` cells are left blank.
pub fn heatmap(lattice: &crate::grid::Lattice, values: &[Option<f64>], width: f64) -> String {
    let (lo, _) = lattice.bounds(0);
    let (_, hi) = lattice.bounds(lattice.len() - 1);
    let top = values.iter().flatten().copied().fold(0.0, f64::max);
    let mut svg = Svg::new(lo, hi, width);
    for (i, v) in values.iter().enumerate() {
        if let Some(v) = v {
            let (a, b) = lattice.bounds(i);
            svg.rect(&a, &b, &ramp(if top > 0.0 { v / top } else { 0.0 }), None);
        }
    }
    svg.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramp_ends() {
        assert_eq!(ramp(0.0), "#440154");
        assert_eq!(ramp(1.0), "#fde725");
        assert_eq!(ramp(f64::NAN), ramp(0.0));
    }

    #[test]
    fn document_shape() {
        let mut s = Svg::new(Point::new2(0.0, 0.0), Point::new2(2.0, 1.0), 200.0);
        s.rect(&Point::new2(0.0, 0.0), &Point::new2(1.0, 1.0), "#000000", None);
        s.circle(&Point::new2(1.5, 0.5), 0.25, "red", "none");
        let out = s.finish();
        assert!(out.starts_with("<svg") && out.contains("height=\"100\"") && out.contains("<circle"));
        assert!(out.contains("x=\"0.000\" y=\"0.000\" width=\"100.000\" height=\"100.000\""));
    }
}
