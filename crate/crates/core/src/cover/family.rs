use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{hull2, Ball, Point};

/// Paired sample clouds: domain sample `i` is mapped to range sample `i`.
#[derive(Clone, Debug)]
pub struct Samples {
    pub domain: Vec<Point>,
    pub range: Vec<Point>,
    /// Containment tolerance in the domain (half a sample spacing).
    pub tol_domain: f64,
    /// Containment tolerance in the range.
    pub tol_range: f64,
}

/// Which of the two clouds a region or ball lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Domain,
    Range,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Domain => Side::Range,
            Side::Range => Side::Domain,
        }
    }
}

impl Samples {
    /// Checks the correspondence is injective (no two samples share an image).
    pub fn new(domain: Vec<Point>, range: Vec<Point>, tol_domain: f64, tol_range: f64) -> Result<Self> {
        if domain.len() != range.len() || domain.is_empty() {
            return Err(Error::Consistency("domain and range clouds must be nonempty and paired".into()));
        }
        for (name, cloud) in [("domain", &domain), ("range", &range)] {
            let mut v: Vec<[u64; 3]> = cloud.iter().map(|p| p.0.map(|c| (c + 0.0).to_bits())).collect();
            v.sort_unstable();
            if v.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Consistency(format!("the sampled correspondence is not injective ({name} repeats)")));
            }
        }
        Ok(Samples { domain, range, tol_domain, tol_range })
    }

    /// Square grid on `[0, 1]^2` with `n + 1` samples per side, mapped by `f`.
    pub fn unit_square(n: usize, f: impl Fn(&Point) -> Point) -> Result<Self> {
        let h = 1.0 / n as f64;
        let domain: Vec<Point> =
            (0..=n).flat_map(|j| (0..=n).map(move |i| Point::new2(i as f64 * h, j as f64 * h))).collect();
        let range: Vec<Point> = domain.iter().map(&f).collect();
        // Largest image of a grid step bounds the range sample spacing.
        let mut step: f64 = 0.0;
        for j in 0..=n {
            for i in 0..=n {
                let k = j * (n + 1) + i;
                if i < n {
                    step = step.max(range[k].dist(&range[k + 1]));
                }
                if j < n {
                    step = step.max(range[k].dist(&range[k + n + 1]));
                }
            }
        }
        Samples::new(domain, range, h / 2.0, step / 2.0)
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    pub fn points(&self, side: Side) -> &[Point] {
        match side {
            Side::Domain => &self.domain,
            Side::Range => &self.range,
        }
    }

    pub fn tol(&self, side: Side) -> f64 {
        match side {
            Side::Domain => self.tol_domain,
            Side::Range => self.tol_range,
        }
    }

    /// Samples whose `side` coordinates satisfy `inside`.
    pub fn select(&self, side: Side, inside: impl Fn(&Point) -> bool) -> FixedBitSet {
        let pts = self.points(side);
        let mut s = FixedBitSet::with_capacity(pts.len());
        for (i, p) in pts.iter().enumerate() {
            if inside(p) {
                s.insert(i);
            }
        }
        s
    }

    /// Diameter of a sample subset on one side.
    pub fn diameter(&self, side: Side, members: &FixedBitSet) -> f64 {
        let pts: Vec<Point> = members.ones().map(|i| self.points(side)[i]).collect();
        let cand = if pts.iter().all(|p| p.z() == 0.0) { hull2(&pts) } else { pts };
        let mut d: f64 = 0.0;
        for (i, a) in cand.iter().enumerate() {
            for b in &cand[i + 1..] {
                d = d.max(a.dist(b));
            }
        }
        d
    }
}

/// One pair of the family: `A` in the domain with yolk `B`, and `A'` in the range
/// with yolk `B'`.
#[derive(Clone, Debug)]
pub struct PairSpec {
    pub domain: FixedBitSet,
    pub range: FixedBitSet,
    pub yolk: Ball,
    pub range_yolk: Ball,
}

impl PairSpec {
    pub fn members(&self, side: Side) -> &FixedBitSet {
        match side {
            Side::Domain => &self.domain,
            Side::Range => &self.range,
        }
    }

    pub fn ball(&self, side: Side) -> &Ball {
        match side {
            Side::Domain => &self.yolk,
            Side::Range => &self.range_yolk,
        }
    }

    /// Same pair seen through the inverse map.
    pub fn swapped(&self) -> PairSpec {
        PairSpec { domain: self.range.clone(), range: self.domain.clone(), yolk: self.range_yolk, range_yolk: self.yolk }
    }
}

#[derive(Clone, Debug)]
pub struct PairedFamily {
    pub samples: Samples,
    pub pairs: Vec<PairSpec>,
    /// Egg-yolk constant the input pairs are meant to satisfy.
    pub m: f64,
}

impl PairedFamily {
    /// Checks `f(A_i) = A'_i` on samples (the index sets coincide).
    pub fn check_correspondence(&self) -> Result<()> {
        for (i, p) in self.pairs.iter().enumerate() {
            if p.domain != p.range {
                return Err(Error::Consistency(format!("pair {i}: f(A) differs from A' on the samples")));
            }
            if p.domain.count_ones(..) == 0 {
                return Err(Error::Consistency(format!("pair {i}: empty region")));
            }
        }
        Ok(())
    }

    /// The same family seen through `f^{-1}`.
    pub fn inverted(&self) -> PairedFamily {
        let s = &self.samples;
        PairedFamily {
            samples: Samples {
                domain: s.range.clone(),
                range: s.domain.clone(),
                tol_domain: s.tol_range,
                tol_range: s.tol_domain,
            },
            pairs: self.pairs.iter().map(PairSpec::swapped).collect(),
            m: self.m,
        }
    }
}

/// Linear maps used to build test families.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearKind {
    Identity,
    /// `(x, y) -> (2x, y)`.
    Stretch,
    /// Rotation by 0.6 rad composed with scaling by 1.5.
    RotationScale,
}

impl LinearKind {
    pub fn matrix(self) -> [[f64; 2]; 2] {
        match self {
            LinearKind::Identity => [[1.0, 0.0], [0.0, 1.0]],
            LinearKind::Stretch => [[2.0, 0.0], [0.0, 1.0]],
            LinearKind::RotationScale => {
                let (s, c) = 0.6f64.sin_cos();
                [[1.5 * c, -1.5 * s], [1.5 * s, 1.5 * c]]
            }
        }
    }

    pub fn apply(self, p: &Point) -> Point {
        let a = self.matrix();
        Point::new2(a[0][0] * p.x() + a[0][1] * p.y(), a[1][0] * p.x() + a[1][1] * p.y())
    }

    /// Singular values `(σ_max, σ_min)`.
    pub fn singular_values(self) -> (f64, f64) {
        match self {
            LinearKind::Identity => (1.0, 1.0),
            LinearKind::Stretch => (2.0, 1.0),
            LinearKind::RotationScale => (1.5, 1.5),
        }
    }

    /// Smallest egg-yolk constant a disk and its image can share.
    pub fn min_constant(self) -> f64 {
        let (a, b) = self.singular_values();
        2.0 * a / b
    }
}

/// Random family of `count` disks in the unit square with off-center yolks, mapped
/// by a linear map; both sides are `m`-egg-yolk pairs. Fails if `m` is below what
/// the map allows for disks.
pub fn random_family(kind: LinearKind, m: f64, count: usize, grid: usize, seed: u64) -> Result<PairedFamily> {
    if m < kind.min_constant() {
        return Err(Error::Domain(format!(
            "no disk family is {m}-egg-yolk on both sides under this map (needs M >= {})",
            kind.min_constant()
        )));
    }
    let samples = Samples::unit_square(grid, |p| kind.apply(p))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (s1, s2) = kind.singular_values();
    let mut pairs = Vec::with_capacity(count);
    while pairs.len() < count {
        let r: f64 = rng.gen_range(0.06f64.ln()..0.25f64.ln()).exp();
        let c = Point::new2(rng.gen_range(r..1.0 - r), rng.gen_range(r..1.0 - r));
        // Domain yolk B(c + o, ρ): need |o| + 2ρ <= r and |o| + r <= m ρ.
        let Some((o, rho)) = yolk_in_disk(&mut rng, r, r, m) else { continue };
        // Range: f(disk) is an ellipse between radii s2 r and s1 r around f(c).
        let Some((o2, rho2)) = yolk_in_disk(&mut rng, s2 * r, s1 * r, m) else { continue };
        let domain = samples.select(Side::Domain, |p| p.dist(&c) < r);
        let fc = kind.apply(&c);
        let range = domain.clone();
        pairs.push(PairSpec {
            domain,
            range,
            yolk: Ball::new(c + o, rho)?,
            range_yolk: Ball::new(fc + o2, rho2)?,
        });
    }
    Ok(PairedFamily { samples, pairs, m })
}

/// Yolk `B(o, ρ)` (offset from the center) with `2B` inside the inner radius and the
/// outer radius inside `m B`.
fn yolk_in_disk(rng: &mut impl Rng, inner: f64, outer: f64, m: f64) -> Option<(Point, f64)> {
    let lo = outer / m;
    let hi = inner / 2.0;
    if lo > hi * (1.0 + 1e-12) {
        return None;
    }
    let rho = if hi > lo { rng.gen_range(lo..=hi) } else { hi };
    let room = (inner - 2.0 * rho).min(m * rho - outer).max(0.0);
    let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let d = room * rng.gen_range(0.0..=1.0f64);
    Some((Point::new2(d * t.cos(), d * t.sin()), rho))
}
