//! Monte Carlo averages of line integrals and curve–set intersection surveys.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::geom::{line_integral, Density, Point, PolyCurve};
use crate::sets::rat::f;
use crate::sets::{curve_intersection_class, IntersectionClass, SetModel};

/// Independent sample chunks; results do not depend on the thread count.
const CHUNKS: u64 = 16;

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(chunk + 1);
    r
}

fn uniform_in_ball(rng: &mut impl Rng, dim: usize, r: f64) -> Point {
    loop {
        let mut p = [0.0; 3];
        for v in p.iter_mut().take(dim) {
            *v = rng.gen_range(-r..=r);
        }
        let p = Point(p);
        if p.norm() <= r {
            return p;
        }
    }
}

/// Runs `f(rng, n)` on `CHUNKS` chunks in parallel, `n` samples each (the remainder
/// goes to the first chunks).
fn chunked<T: Send>(samples: usize, seed: u64, f: impl Fn(&mut ChaCha8Rng, usize) -> T + Sync) -> Vec<T> {
    let per = samples / CHUNKS as usize;
    let extra = samples % CHUNKS as usize;
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..CHUNKS)
            .map(|c| {
                let f = &f;
                s.spawn(move || {
                    let n = per + usize::from((c as usize) < extra);
                    f(&mut chunk_rng(seed, c), n)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("survey worker panicked")).collect()
    })
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// Average of `∫_{γ+x} ρ ds` over `x` uniform in `B(0, r)`.
pub fn avg_line_integral(rho: &(dyn Density + Sync), gamma: &PolyCurve, dim: usize, r: f64, samples: usize, seed: u64) -> Result<Estimate> {
    if !(r > 0.0) || samples == 0 {
        return domain("averaging needs r > 0 and at least one sample");
    }
    let parts = chunked(samples, seed, |rng, n| {
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let v = line_integral(rho, &gamma.translate(uniform_in_ball(rng, dim, r)));
            s += v;
            s2 += v * v;
        }
        (s, s2)
    });
    let (s, s2) = parts.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = samples as f64;
    let mean = s / n;
    let var = if samples > 1 { ((s2 - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
    Ok(Estimate { mean, stderr: (var / n).sqrt(), samples })
}

/// Number of intersection points, `usize::MAX` for infinite intersections.
fn count(e: &SetModel, c: &PolyCurve) -> Result<usize> {
    Ok(match curve_intersection_class(e, c)?.class {
        IntersectionClass::Empty => 0,
        IntersectionClass::Finite { count } => count,
        IntersectionClass::InfiniteNulllength | IntersectionClass::PositiveLength => usize::MAX,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SurveyRow {
    pub n: usize,
    /// Estimated measure of the parameters whose curve meets `E` in at least `n` points.
    pub measure: f64,
    /// Half-width of the 95% normal confidence interval.
    pub ci: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TranslationSurvey {
    /// Measure of the sampled translation box.
    pub domain_measure: f64,
    pub rows: Vec<SurveyRow>,
    /// Estimated measure of translations with infinitely many intersections.
    pub infinite: SurveyRow,
    /// Bound for `m(F_1)` with the constants of the covering argument:
    /// `π (5 d)^2` when `diam γ ≤ 4 d`, else `4 π ℓ(γ) d`, where `d = diam E`.
    pub f1_bound: f64,
    pub curve_length: f64,
    pub set_diameter: f64,
}

fn rows(hist: &[u64], n_max: usize, total: usize, scale: f64) -> (Vec<SurveyRow>, SurveyRow) {
    let row = |n: usize, hits: u64| {
        let p = hits as f64 / total as f64;
        SurveyRow { n, measure: scale * p, ci: scale * 1.96 * (p * (1.0 - p) / total as f64).sqrt() }
    };
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let hits: u64 = hist[n..].iter().sum();
        out.push(row(n, hits));
    }
    (out, row(usize::MAX, hist[n_max + 1]))
}

fn tally(hist: &mut [u64], c: usize, n_max: usize) {
    if c == usize::MAX {
        hist[n_max + 1] += 1;
    } else {
        hist[c.min(n_max)] += 1;
    }
}

fn merge(parts: Vec<Result<Vec<u64>>>, len: usize) -> Result<Vec<u64>> {
    let mut hist = vec![0u64; len];
    for p in parts {
        for (h, v) in hist.iter_mut().zip(p?) {
            *h += v;
        }
    }
    Ok(hist)
}

/// Monte Carlo estimate of `m(F_N)`, `F_N = {x : |(γ + x) ∩ E| ≥ N}`, for planar `E`.
/// Translations are drawn from the box of `x` with `bbox(γ) + x` meeting `bbox(E)`.
pub fn translation_survey(e: &SetModel, gamma: &PolyCurve, n_max: usize, samples: usize, seed: u64) -> Result<TranslationSurvey> {
    let ell = gamma.length();
    if !(ell > 0.0) {
        return domain("translation survey needs a non-constant curve");
    }
    if samples == 0 || n_max == 0 {
        return domain("need at least one sample and N_max >= 1");
    }
    let Some((elo, ehi)) = e.bbox() else { return domain("empty set") };
    let (ex0, ey0) = elo.to_f64();
    let (ex1, ey1) = ehi.to_f64();
    let v = gamma.vertices();
    let gx0 = v.iter().map(|p| p.x()).fold(f64::INFINITY, f64::min);
    let gx1 = v.iter().map(|p| p.x()).fold(f64::NEG_INFINITY, f64::max);
    let gy0 = v.iter().map(|p| p.y()).fold(f64::INFINITY, f64::min);
    let gy1 = v.iter().map(|p| p.y()).fold(f64::NEG_INFINITY, f64::max);
    let (tx0, tx1) = (ex0 - gx1, ex1 - gx0);
    let (ty0, ty1) = (ey0 - gy1, ey1 - gy0);
    let area = (tx1 - tx0) * (ty1 - ty0);
    let d = f(&(&ehi.x - &elo.x)).hypot(f(&(&ehi.y - &elo.y)));
    let mut gdiam: f64 = 0.0;
    for (i, a) in v.iter().enumerate() {
        for b in &v[i + 1..] {
            gdiam = gdiam.max(a.dist(b));
        }
    }
    let pi = std::f64::consts::PI;
    let f1_bound = if gdiam <= 4.0 * d { pi * (5.0 * d).powi(2) } else { 4.0 * pi * ell * d };
    let parts = chunked(samples, seed, |rng, n| {
        let mut hist = vec![0u64; n_max + 2];
        for _ in 0..n {
            let x = Point::new2(rng.gen_range(tx0..=tx1), rng.gen_range(ty0..=ty1));
            tally(&mut hist, count(e, &gamma.translate(x))?, n_max);
        }
        Ok(hist)
    });
    let hist = merge(parts, n_max + 2)?;
    let (rows, infinite) = rows(&hist, n_max, samples, area);
    Ok(TranslationSurvey { domain_measure: area, rows, infinite, f1_bound, curve_length: ell, set_diameter: d })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RadialSurvey {
    pub rows: Vec<SurveyRow>,
    pub infinite: SurveyRow,
}

/// Directional measure (on the unit circle, total `2π`) of the `w` for which the
/// radial segment `{x + t w : r ≤ t ≤ R}` meets `E` in at least `N` points.
pub fn radial_survey(e: &SetModel, x: Point, r: f64, big_r: f64, n_max: usize, samples: usize, seed: u64) -> Result<RadialSurvey> {
    if !(r > 0.0 && r < big_r) {
        return domain("radial survey needs 0 < r < R");
    }
    if samples == 0 || n_max == 0 {
        return domain("need at least one sample and N_max >= 1");
    }
    let parts = chunked(samples, seed, |rng, n| {
        let mut hist = vec![0u64; n_max + 2];
        for _ in 0..n {
            let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let w = Point::new2(th.cos(), th.sin());
            let seg = PolyCurve::segment(x + w * r, x + w * big_r);
            tally(&mut hist, count(e, &seg)?, n_max);
        }
        Ok(hist)
    });
    let hist = merge(parts, n_max + 2)?;
    let (rows, infinite) = rows(&hist, n_max, samples, std::f64::consts::TAU);
    Ok(RadialSurvey { rows, infinite })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::FnDensity;
    use crate::sets::rat::QPoint;
    use crate::sets::shapes::circle_curve;
    use crate::sets::Primitives;

    fn seg(a: (f64, f64), b: (f64, f64)) -> PolyCurve {
        PolyCurve::segment(Point::new2(a.0, a.1), Point::new2(b.0, b.1))
    }

    #[test]
    fn constant_density_average_is_length() {
        let g = seg((0.0, 0.0), (2.0, 0.0));
        let e = avg_line_integral(&FnDensity::new(|_: &Point| 1.0), &g, 2, 0.3, 200, 1).unwrap();
        assert!((e.mean - 2.0).abs() < 1e-12 && e.stderr < 1e-12);
    }

    #[test]
    fn linear_density_average() {
        let g = seg((0.0, 0.0), (1.0, 0.0));
        let e = avg_line_integral(&FnDensity::new(|p: &Point| p.x()), &g, 2, 0.2, 20000, 2).unwrap();
        assert!((e.mean - 0.5).abs() < 4.0 * e.stderr + 1e-9, "{e:?}");
    }

    #[test]
    fn single_point_is_never_hit() {
        let e = SetModel::Primitives(Primitives::from_points(vec![QPoint::from_f64(0.3, 0.2)]));
        let s = translation_survey(&e, &seg((0.0, 0.0), (0.0, 1.0)), 3, 2000, 3).unwrap();
        assert_eq!(s.rows[0].measure, 0.0);
        assert_eq!(s.f1_bound, 0.0);
    }

    #[test]
    fn circle_hit_once_radially() {
        let e = circle_curve(0.0, 0.0, 1.5, 512);
        let s = radial_survey(&e, Point::ORIGIN, 1.0, 2.0, 2, 2000, 4).unwrap();
        assert!((s.rows[0].measure - std::f64::consts::TAU).abs() < 1e-12);
        assert!(s.rows[1].measure < 0.02);
    }

    #[test]
    fn parallel_overlap_has_measure_zero() {
        let e = SetModel::Primitives(Primitives::from_segments(vec![[QPoint::from_f64(0.0, 0.0), QPoint::from_f64(1.0, 0.0)]]));
        let s = translation_survey(&e, &seg((0.0, 0.0), (1.0, 0.0)), 2, 3000, 5).unwrap();
        assert_eq!(s.infinite.measure, 0.0);
    }

    #[test]
    fn deterministic_given_seed() {
        let e = circle_curve(0.0, 0.0, 1.0, 64);
        let g = seg((0.0, 0.0), (0.0, 1.0));
        let a = translation_survey(&e, &g, 3, 500, 9).unwrap();
        let b = translation_survey(&e, &g, 3, 500, 9).unwrap();
        assert_eq!(a.rows[1].measure, b.rows[1].measure);
    }
}
