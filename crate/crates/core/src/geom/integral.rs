use crate::geom::{PolyCurve, Point};
use crate::grid::DensityField;

/// Nonnegative Borel function that can be integrated along polygonal curves.
pub trait Density {
    fn segment_integral(&self, a: &Point, b: &Point) -> f64;
}

impl Density for DensityField {
    fn segment_integral(&self, a: &Point, b: &Point) -> f64 {
        DensityField::segment_integral(self, a, b)
    }
}

/// Closed-form density integrated by adaptive Gauss–Legendre quadrature.
pub struct FnDensity<F> {
    pub f: F,
    pub rel_tol: f64,
}

impl<F: Fn(&Point) -> f64> FnDensity<F> {
    pub fn new(f: F) -> Self {
        FnDensity { f, rel_tol: 1e-10 }
    }

    fn panel(&self, a: &Point, b: &Point) -> f64 {
        // Five-point Gauss–Legendre on [-1, 1].
        const X: [f64; 5] = [0.0, 0.538_469_310_105_683_1, -0.538_469_310_105_683_1, 0.906_179_845_938_664, -0.906_179_845_938_664];
        const W: [f64; 5] = [
            0.568_888_888_888_888_9,
            0.478_628_670_499_366_5,
            0.478_628_670_499_366_5,
            0.236_926_885_056_189_1,
            0.236_926_885_056_189_1,
        ];
        let len = a.dist(b);
        let s: f64 = X.iter().zip(W).map(|(x, w)| w * (self.f)(&a.lerp(b, (x + 1.0) / 2.0))).sum();
        s * len / 2.0
    }

    fn adapt(&self, a: &Point, b: &Point, whole: f64, depth: u32) -> f64 {
        let m = a.lerp(b, 0.5);
        let l = self.panel(a, &m);
        let r = self.panel(&m, b);
        if depth == 0 || (l + r - whole).abs() <= self.rel_tol * (l + r).abs().max(1e-300) {
            return l + r;
        }
        self.adapt(a, &m, l, depth - 1) + self.adapt(&m, b, r, depth - 1)
    }
}

impl<F: Fn(&Point) -> f64> Density for FnDensity<F> {
    fn segment_integral(&self, a: &Point, b: &Point) -> f64 {
        if a == b {
            return 0.0;
        }
        self.adapt(a, b, self.panel(a, b), 30)
    }
}

/// `∫_γ ρ ds` over a polygonal curve.
pub fn line_integral(rho: &dyn Density, gamma: &PolyCurve) -> f64 {
    gamma.segments().map(|(a, b)| rho.segment_integral(&a, &b)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Lattice;

    #[test]
    fn constant_density_gives_length() {
        let rho = FnDensity::new(|_: &Point| 1.0);
        let g = PolyCurve::segment(Point::new2(0.0, 0.0), Point::new2(3.0, 4.0));
        assert!((line_integral(&rho, &g) - 5.0).abs() < 1e-12);
        let c = PolyCurve::circle(Point::ORIGIN, 2.0, 4096);
        assert!((line_integral(&rho, &c) - 4.0 * std::f64::consts::PI).abs() < 1e-5);
    }

    #[test]
    fn logarithmic_density() {
        let rho = FnDensity::new(|p: &Point| 1.0 / (p.norm() * 2f64.ln()));
        let g = PolyCurve::segment(Point::new2(0.5, 0.0), Point::new2(1.0, 0.0));
        assert!((line_integral(&rho, &g) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cell_density_exact() {
        let lat = Lattice::cube(2, 4, 0.0, 1.0).unwrap();
        let field = DensityField::from_fn(lat, 2.0, |p| if p.x() < 2.0 { 1.0 } else { 3.0 });
        let g = PolyCurve::segment(Point::new2(0.5, 0.5), Point::new2(3.5, 0.5));
        assert!((line_integral(&field, &g) - (1.5 + 4.5)).abs() < 1e-12);
    }
}
