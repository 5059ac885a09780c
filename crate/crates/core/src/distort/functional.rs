use serde::{Deserialize, Serialize};

use crate::cover::Side;
use crate::distort::map::{Correspondence, SampledMap};
use crate::error::{domain, Result};
use crate::geom::{eccentricity, Ball, GridSample, Point};

/// Points on the sphere `|y - x| = r`, spaced well below the sample pitch `h`.
pub fn sphere_points(dim: usize, x: &Point, r: f64, h: f64) -> Vec<Point> {
    if dim == 2 {
        let n = ((std::f64::consts::TAU * r / (h / 8.0)).ceil() as usize).clamp(256, 1 << 16);
        return (0..n)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / n as f64;
                *x + Point::new2(r * a.cos(), r * a.sin())
            })
            .collect();
    }
    let n = ((4.0 * std::f64::consts::PI * r * r / (h / 4.0).powi(2)).ceil() as usize).clamp(2000, 40_000);
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let s = (1.0 - z * z).sqrt();
            let a = golden * i as f64;
            *x + Point::new3(r * s * a.cos(), r * s * a.sin(), r * z)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RadiusValue {
    pub r: f64,
    /// `L_f(x, r)`: largest image distance from `f(x)` over `|y - x| <= r`.
    pub big_l: f64,
    /// `l_f(x, r)`: smallest image distance from `f(x)` over `|y - x| >= r`.
    pub small_l: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DistortionProbe {
    pub x: Point,
    /// Decreasing radii.
    pub ladder: Vec<RadiusValue>,
    /// Largest ratio over the two finest radii.
    pub h: f64,
}

fn check_ladder(f: &SampledMap, x: &Point, ladder: &[f64], margin: f64) -> Result<Vec<f64>> {
    if ladder.is_empty() {
        return domain("empty radius ladder");
    }
    let mut radii = ladder.to_vec();
    radii.sort_by(|a, b| b.total_cmp(a));
    let d = f.boundary_distance(x);
    if radii[0] * margin >= d {
        return domain(format!("x is too close to the boundary: distance {d:.4}, largest radius {:.4}", radii[0]));
    }
    if radii[radii.len() - 1] < 2.0 * f.spacing() {
        return domain("radii below two sample cells");
    }
    Ok(radii)
}

/// `L_f` and `l_f` at one radius. For an embedding the supremum over the ball
/// and the infimum over its complement are both attained on the sphere.
pub fn distance_extremes(f: &SampledMap, x: &Point, r: f64) -> Result<(f64, f64)> {
    let Some(fx) = f.forward(x) else { return domain("x outside the sampled domain") };
    let mut hi: f64 = 0.0;
    let mut lo = f64::INFINITY;
    for y in sphere_points(f.dim(), x, r, f.spacing()) {
        let Some(fy) = f.forward(&y) else { return domain("sphere leaves the sampled domain") };
        let d = fy.dist(&fx);
        hi = hi.max(d);
        lo = lo.min(d);
    }
    Ok((hi, lo))
}

pub fn metric_distortion(f: &SampledMap, x: &Point, ladder: &[f64]) -> Result<DistortionProbe> {
    let radii = check_ladder(f, x, ladder, 1.0)?;
    let mut rows = Vec::with_capacity(radii.len());
    for r in radii {
        let (big_l, small_l) = distance_extremes(f, x, r)?;
        if !(small_l > 0.0) {
            return domain("l_f vanished; the map is not injective at this scale");
        }
        rows.push(RadiusValue { r, big_l, small_l, ratio: big_l / small_l });
    }
    let k = rows.len();
    let h = rows[k.saturating_sub(2)..].iter().map(|v| v.ratio).fold(0.0, f64::max);
    Ok(DistortionProbe { x: *x, ladder: rows, h })
}

/// Which family a candidate set comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateFamily {
    /// A ball of the domain containing x.
    Ball,
    /// The preimage of a ball of the range containing f(x).
    Pullback,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EccentricOptions {
    /// Grid samples per ball radius.
    pub samples_per_radius: usize,
    /// Eccentricity search resolution as a fraction of the ball radius.
    pub resolution: f64,
}

impl Default for EccentricOptions {
    fn default() -> Self {
        EccentricOptions { samples_per_radius: 48, resolution: 1.0 / 16.0 }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CandidateValue {
    pub family: CandidateFamily,
    pub ball: Ball,
    pub domain_e: f64,
    pub range_e: f64,
    pub value: f64,
}

/// Eccentricities of a ball `ball` on `side` and of its image on the other side.
/// Evaluating a range ball for `f` runs the same code as evaluating a domain
/// ball for the inverse of `f`.
pub fn evaluate_ball(f: &dyn Correspondence, side: Side, ball: &Ball, opts: &EccentricOptions) -> Result<(f64, f64)> {
    let dim = f.dim();
    let rho = ball.radius;
    let pitch = rho / opts.samples_per_radius as f64;
    let c = ball.center;
    let mut lo = c;
    let mut hi = c;
    for k in 0..dim {
        lo.0[k] -= rho;
        hi.0[k] += rho;
    }
    let grid = GridSample::new(dim, lo, hi, pitch, |p| p.dist(&c) < rho)?;
    let here = grid.region()?;
    let there = match side {
        Side::Domain => grid.mapped(|p| f.forward(p))?,
        Side::Range => grid.mapped(|p| f.backward(p))?,
    };
    let Some(there) = there else { return domain("candidate set leaves the sampled map") };
    let res = rho * opts.resolution;
    let e_here = eccentricity(&here, res)?.value;
    let e_there = eccentricity(&there, there.diameter() / 2.0 * opts.resolution)?.value;
    Ok(match side {
        Side::Domain => (e_here, e_there),
        Side::Range => (e_there, e_here),
    })
}

fn offsets(dim: usize) -> Vec<Point> {
    let mut v = vec![Point::ORIGIN];
    for k in 0..dim {
        for s in [-1.0, 1.0] {
            let mut p = Point::ORIGIN;
            p.0[k] = s;
            v.push(p);
        }
    }
    v
}

/// Family (a): balls `B(x + r u / 2, r)` with `u` zero or a coordinate direction.
pub fn ball_candidates(dim: usize, x: &Point, r: f64) -> Vec<Ball> {
    offsets(dim).into_iter().filter_map(|u| Ball::new(*x + u * (r / 2.0), r).ok()).collect()
}

/// Family (b): range balls inside `B(f(x), l)`, where `l = l_f(x, r)` makes
/// every preimage lie in `B(x, r)`.
pub fn pullback_candidates(dim: usize, fx: &Point, l: f64) -> Vec<Ball> {
    let mut out: Vec<Ball> = Ball::new(*fx, l).into_iter().collect();
    for u in offsets(dim).into_iter().skip(1) {
        out.extend(Ball::new(*fx + u * (l / 3.0), 2.0 * l / 3.0));
    }
    out
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EccentricEstimate {
    pub r: f64,
    /// Upper estimate of `E_f(x, r)`.
    pub value: f64,
    pub best: CandidateValue,
    /// Best value within family (a) and family (b) at this radius alone.
    pub ball_best: f64,
    pub pullback_best: f64,
}

fn candidates_at(f: &SampledMap, x: &Point, r: f64, opts: &EccentricOptions) -> Result<Vec<CandidateValue>> {
    let dim = f.dim();
    let Some(fx) = f.forward(x) else { return domain("x outside the sampled domain") };
    let (_, l) = distance_extremes(f, x, r)?;
    let mut work: Vec<(CandidateFamily, Side, Ball)> = Vec::new();
    work.extend(ball_candidates(dim, x, r).into_iter().map(|b| (CandidateFamily::Ball, Side::Domain, b)));
    work.extend(pullback_candidates(dim, &fx, l).into_iter().map(|b| (CandidateFamily::Pullback, Side::Range, b)));
    let mut out = Vec::new();
    for (family, side, ball) in work {
        let (domain_e, range_e) = evaluate_ball(f, side, &ball, opts)?;
        out.push(CandidateValue { family, ball, domain_e, range_e, value: domain_e.max(range_e) });
    }
    Ok(out)
}

/// Estimates along a radius ladder (returned in decreasing radius). A set
/// admissible at a radius is admissible at every larger one, so each value is
/// the minimum over candidates of its own and all finer radii; the estimate is
/// therefore nondecreasing as `r` decreases.
pub fn eccentric_distortion_ladder(f: &SampledMap, x: &Point, ladder: &[f64], opts: &EccentricOptions) -> Result<Vec<EccentricEstimate>> {
    let radii = check_ladder(f, x, ladder, 3.0)?;
    let mut out: Vec<EccentricEstimate> = Vec::with_capacity(radii.len());
    let mut carry: Option<CandidateValue> = None;
    for &r in radii.iter().rev() {
        let cands = candidates_at(f, x, r, opts)?;
        let best_of = |fam: CandidateFamily| cands.iter().filter(|c| c.family == fam).map(|c| c.value).fold(f64::INFINITY, f64::min);
        let mut best = *cands.iter().min_by(|a, b| a.value.total_cmp(&b.value)).expect("candidate families are nonempty");
        if let Some(c) = carry {
            if c.value < best.value {
                best = c;
            }
        }
        carry = Some(best);
        out.push(EccentricEstimate {
            r,
            value: best.value,
            best,
            ball_best: best_of(CandidateFamily::Ball),
            pullback_best: best_of(CandidateFamily::Pullback),
        });
    }
    out.reverse();
    Ok(out)
}

/// Upper estimate of `E_f(x, r)`; requires `r < dist(x, ∂Ω) / 3`.
pub fn eccentric_distortion(f: &SampledMap, x: &Point, r: f64, opts: &EccentricOptions) -> Result<EccentricEstimate> {
    let mut v = eccentric_distortion_ladder(f, x, &[r], opts)?;
    Ok(v.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distort::map::{Inverted, LinearMap};

    fn linear(a: LinearMap) -> SampledMap {
        SampledMap::on_cube(2, 101, -1.0, 1.0, |p| a.apply(p)).unwrap()
    }

    #[test]
    fn identity_and_stretch() {
        let id = linear(LinearMap::diag(&[1.0, 1.0]));
        let p = metric_distortion(&id, &Point::new2(0.1, 0.2), &[0.2, 0.1, 0.05]).unwrap();
        assert!((p.h - 1.0).abs() < 1e-9, "{}", p.h);
        let st = linear(LinearMap::diag(&[2.0, 1.0]));
        let p = metric_distortion(&st, &Point::new2(-0.3, 0.1), &[0.2, 0.1, 0.05]).unwrap();
        assert!((p.h - 2.0).abs() < 1e-3, "{}", p.h);
        for v in &p.ladder {
            assert!(v.big_l >= v.small_l && v.small_l > 0.0);
        }
    }

    #[test]
    fn radial_square_matches_jacobian() {
        let f = SampledMap::on_cube(2, 201, -1.0, 1.0, |p| *p * p.norm()).unwrap();
        let x = Point::new2(0.5, 0.0);
        // d/dr r^2 = 2r radially and r tangentially: singular values 1.0 and 0.5.
        let probe = metric_distortion(&f, &x, &[0.08, 0.04, 0.02]).unwrap();
        assert!((probe.h - 2.0).abs() < 0.2, "{}", probe.h);
    }

    #[test]
    fn boundary_and_ladder_errors() {
        let id = linear(LinearMap::diag(&[1.0, 1.0]));
        assert!(metric_distortion(&id, &Point::new2(0.95, 0.0), &[0.1]).is_err());
        assert!(metric_distortion(&id, &Point::new2(0.0, 0.0), &[0.01]).is_err());
        let o = EccentricOptions::default();
        assert!(eccentric_distortion(&id, &Point::new2(0.0, 0.0), 0.4, &o).is_err());
    }

    #[test]
    fn eccentric_values() {
        let o = EccentricOptions::default();
        let x = Point::new2(0.05, -0.1);
        let id = linear(LinearMap::diag(&[1.0, 1.0]));
        let e = eccentric_distortion(&id, &x, 0.15, &o).unwrap();
        assert!(e.value < 1.06, "{}", e.value);
        let rot = linear(LinearMap::rotation_scale(0.6, 1.5));
        let e = eccentric_distortion(&rot, &x, 0.15, &o).unwrap();
        assert!(e.value < 1.06, "{}", e.value);
        let st = linear(LinearMap::diag(&[2.0, 1.0]));
        let e = eccentric_distortion(&st, &x, 0.15, &o).unwrap();
        assert!((e.value - 2.0).abs() < 0.2 && e.value <= 2.1, "{e:?}");
        let m = metric_distortion(&st, &x, &[0.15]).unwrap();
        assert!(e.value <= m.h * 1.05);
    }

    #[test]
    fn candidate_symmetry_under_inversion() {
        let st = linear(LinearMap::diag(&[2.0, 1.0]));
        let inv = Inverted(&st);
        let o = EccentricOptions::default();
        let b = Ball::new(Point::new2(0.2, 0.1), 0.12).unwrap();
        let (a1, a2) = evaluate_ball(&st, Side::Range, &b, &o).unwrap();
        let (b1, b2) = evaluate_ball(&inv, Side::Domain, &b, &o).unwrap();
        assert_eq!((a1, a2), (b2, b1));
    }

    #[test]
    fn ladder_is_monotone() {
        let f = SampledMap::on_cube(2, 161, -1.0, 1.0, |p| Point::new2(p.x() + 0.3 * p.y() * p.y(), p.y())).unwrap();
        let v = eccentric_distortion_ladder(&f, &Point::new2(0.0, 0.1), &[0.24, 0.12, 0.06], &EccentricOptions::default()).unwrap();
        for w in v.windows(2) {
            assert!(w[0].r > w[1].r && w[0].value <= w[1].value);
        }
    }
}
