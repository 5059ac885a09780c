//! Closed-form reference values and admissibility checks.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::geom::{line_integral, Density, PolyCurve};

/// Surface measure of the unit sphere `S^{n-1}`.
pub fn sphere_area(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    2.0 * std::f64::consts::PI.powf(h) / libm::tgamma(h)
}

/// Conformal modulus of the ring `r < |x| < R` in dimension `n`:
/// `ω_{n-1} (log(R/r))^{1-n}`.
pub fn ring_modulus_exact(n: usize, r: f64, big_r: f64) -> Result<f64> {
    if !(n == 2 || n == 3) {
        return domain(format!("dimension must be 2 or 3, got {n}"));
    }
    if !(r > 0.0 && r < big_r) {
        return domain(format!("ring radii must satisfy 0 < r < R, got r = {r}, R = {big_r}"));
    }
    Ok(sphere_area(n) * (big_r / r).ln().powf(1.0 - n as f64))
}

/// Modulus of the curves joining the short sides of a `length x width` rectangle.
pub fn rectangle_modulus(length: f64, width: f64) -> Result<f64> {
    if !(length > 0.0 && width > 0.0) {
        return domain("rectangle sides must be positive");
    }
    Ok(width / length)
}

/// Lower bound `(1/4) log(R/r)` for curves in the square ring of half-sides `r < R`
/// meeting every concentric square boundary in between.
pub fn square_ring_lower_bound(r: f64, big_r: f64) -> Result<f64> {
    if !(r > 0.0 && r < big_r) {
        return domain(format!("half-sides must satisfy 0 < r < R, got r = {r}, R = {big_r}"));
    }
    Ok(0.25 * (big_r / r).ln())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Violation {
    pub index: usize,
    pub length: f64,
    pub shortfall: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub checked: usize,
    pub min_length: f64,
    pub violations: Vec<Violation>,
}

impl AdmissibilityReport {
    pub fn worst_shortfall(&self) -> f64 {
        self.violations.iter().map(|v| v.shortfall).fold(0.0, f64::max)
    }
}

/// Lists the curves whose `ρ`-length is below 1.
pub fn admissible_check(rho: &dyn Density, curves: &[PolyCurve]) -> AdmissibilityReport {
    let mut violations = Vec::new();
    let mut min_length = f64::INFINITY;
    for (index, c) in curves.iter().enumerate() {
        let length = line_integral(rho, c);
        min_length = min_length.min(length);
        if length < 1.0 {
            violations.push(Violation { index, length, shortfall: 1.0 - length });
        }
    }
    AdmissibilityReport { checked: curves.len(), min_length, violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{FnDensity, Point};

    #[test]
    fn ring_values() {
        let e = std::f64::consts::E;
        assert!((ring_modulus_exact(2, 1.0, e).unwrap() - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!((ring_modulus_exact(3, 1.0, e).unwrap() - 4.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!(ring_modulus_exact(2, 2.0, 1.0).is_err());
        let mut prev = f64::INFINITY;
        for k in 1..20 {
            let v = ring_modulus_exact(2, 1.0, 2f64.powi(k)).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn square_ring_values() {
        assert!((square_ring_lower_bound(1.0, 4f64.exp()).unwrap() - 1.0).abs() < 1e-12);
        let eps = 1e-6;
        assert!((square_ring_lower_bound(1.0 - eps, 1.0).unwrap() - eps / 4.0).abs() < 1e-9);
    }

    #[test]
    fn zero_density_violates_everything() {
        let curves = vec![PolyCurve::segment(Point::new2(0.0, 0.0), Point::new2(1.0, 0.0)); 3];
        let r = admissible_check(&FnDensity::new(|_: &Point| 0.0), &curves);
        assert_eq!(r.violations.len(), 3);
    }

    #[test]
    fn log_density_exactly_admissible() {
        let a: f64 = 0.5;
        let rho = FnDensity::new(move |p: &Point| {
            let t = p.norm();
            if (a..=1.0).contains(&t) {
                1.0 / (t * (1.0 / a).ln())
            } else {
                0.0
            }
        });
        let curves: Vec<PolyCurve> = (0..16)
            .map(|k| {
                let th = k as f64 * 0.39;
                let d = Point::new2(th.cos(), th.sin());
                PolyCurve::segment(d * a, d)
            })
            .collect();
        let r = admissible_check(&rho, &curves);
        assert!((r.min_length - 1.0).abs() < 1e-9);
        assert!(r.worst_shortfall() < 1e-9);
    }
}
