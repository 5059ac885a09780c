use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::cover::family::{PairSpec, PairedFamily, Samples, Side};
use crate::cover::five_b::balls_meet;
use crate::error::Result;
use crate::geom::{Ball, Point, Region};

/// Outcome of checking `B ⊂ 2B ⊂ A ⊂ M B` on samples.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EggYolkCertificate {
    pub holds: bool,
    /// Smallest `M'` with `A ⊂ M' B` on the samples (boundary tolerance included).
    pub tight_m: f64,
    /// `2B ⊂ A`: no outside sample closer than `2 r(B)` to the center.
    pub double_inside: bool,
    /// `dist(B, X \ A) >= r(B)`, or `None` when no outside sample exists.
    pub yolk_margin: Option<bool>,
}

fn certify<'a>(members: impl Iterator<Item = &'a Point>, outside: impl Iterator<Item = &'a Point>, yolk: &Ball, m: f64, tol: f64) -> EggYolkCertificate {
    let c = yolk.center;
    let r = yolk.radius;
    let far = members.map(|p| p.dist(&c)).fold(0.0, f64::max);
    let near_out = outside.map(|p| p.dist(&c)).fold(f64::INFINITY, f64::min);
    let tight_m = (far + tol) / r;
    // Outside samples may sit up to `tol` beyond the true boundary of A.
    let double_inside = near_out + tol >= 2.0 * r;
    let yolk_margin = near_out.is_finite().then(|| near_out + tol - r >= r);
    let holds = r > 0.0 && double_inside && far <= m * r + tol;
    EggYolkCertificate { holds, tight_m, double_inside, yolk_margin }
}

/// A region with a yolk ball and its claimed constant.
#[derive(Clone, Debug)]
pub struct EggYolkPair {
    pub region: Region,
    pub yolk: Ball,
    pub m: f64,
}

pub fn validate_egg_yolk(pair: &EggYolkPair) -> EggYolkCertificate {
    let tol = pair.region.pitch / 2.0;
    certify(pair.region.members.iter(), pair.region.frontier.iter(), &pair.yolk, pair.m, tol)
}

/// Same check for a sample subset of a paired cloud.
pub fn validate_on_samples(samples: &Samples, side: Side, members: &FixedBitSet, yolk: &Ball, m: f64) -> EggYolkCertificate {
    let pts = samples.points(side);
    let inside = members.ones().map(|i| &pts[i]);
    let mut comp = members.clone();
    comp.toggle_range(..);
    let outside = comp.ones().map(|i| &pts[i]);
    certify(inside, outside, yolk, m, samples.tol(side))
}

/// Lower bound `diam(A_2) >= diam(A_1) / (M (M + 1))` for pairs with meeting yolks
/// and `cl(A_2) ⊄ A_1`.
pub fn intersecting_yolk_ratio(m: f64) -> f64 {
    1.0 / (m * (m + 1.0))
}

/// Constant of a cluster of `M`-pairs meeting an anchor whose diameter is at least
/// `1/a` times theirs, with the anchor's yolk: `(2a + 1) M`.
pub fn cluster_constant(a: f64, m: f64) -> f64 {
    (2.0 * a + 1.0) * m
}

/// Result of reducing a family to pairwise non-nested regions.
#[derive(Clone, Debug)]
pub struct Normalized {
    pub family: PairedFamily,
    /// Input index of every kept pair.
    pub kept: Vec<usize>,
    /// Largest diameter ratio between kept pairs whose yolks meet (either side).
    pub comparability: f64,
}

/// Keeps the regions not contained in another one (equal regions keep the lowest
/// index). The union is unchanged, and pairs with meeting yolks have comparable
/// diameters since neither region contains the other.
pub fn normalize_comparable(family: &PairedFamily) -> Result<Normalized> {
    family.check_correspondence()?;
    let p = &family.pairs;
    let n = p.len();
    let sizes: Vec<usize> = p.iter().map(|x| x.domain.count_ones(..)).collect();
    let mut kept = Vec::new();
    for i in 0..n {
        let dominated = (0..n).any(|j| {
            j != i
                && sizes[j] >= sizes[i]
                && p[i].domain.is_subset(&p[j].domain)
                && (sizes[j] > sizes[i] || j < i)
        });
        if !dominated {
            kept.push(i);
        }
    }
    let pairs: Vec<PairSpec> = kept.iter().map(|&i| p[i].clone()).collect();
    let out = PairedFamily { samples: family.samples.clone(), pairs, m: family.m };
    let comparability = comparability(&out);
    Ok(Normalized { family: out, kept, comparability })
}

fn comparability(f: &PairedFamily) -> f64 {
    let mut worst: f64 = 1.0;
    for side in [Side::Domain, Side::Range] {
        let d: Vec<f64> = f.pairs.iter().map(|x| f.samples.diameter(side, x.members(side))).collect();
        for i in 0..f.pairs.len() {
            for j in i + 1..f.pairs.len() {
                if balls_meet(f.pairs[i].ball(side), f.pairs[j].ball(side)) && d[i] > 0.0 && d[j] > 0.0 {
                    worst = worst.max(d[i] / d[j]).max(d[j] / d[i]);
                }
            }
        }
    }
    worst
}

/// One clustering pass: the output range yolks are pairwise disjoint and form a
/// subcollection of the input range yolks.
fn one_pass(family: &PairedFamily) -> Vec<PairSpec> {
    let s = &family.samples;
    let p = &family.pairs;
    let n = p.len();
    let diam: Vec<f64> = p.iter().map(|x| s.diameter(Side::Domain, &x.domain)).collect();
    let diam_range: Vec<f64> = p.iter().map(|x| s.diameter(Side::Range, &x.range)).collect();
    let l = diam.iter().copied().fold(0.0, f64::max);
    // Generation m holds diameters in (2^{-m-1} L, 2^{-m} L].
    let generation: Vec<u32> = diam
        .iter()
        .map(|&d| {
            let mut g = 0;
            let mut t = l / 2.0;
            while d <= t && g < 1000 {
                g += 1;
                t /= 2.0;
            }
            g
        })
        .collect();
    let mut covered = vec![false; n];
    let mut out: Vec<PairSpec> = Vec::new();
    let last = generation.iter().copied().max().unwrap_or(0);
    for m in 0..=last {
        let mut cand: Vec<usize> = (0..n).filter(|&i| generation[i] == m && !covered[i]).collect();
        cand.sort_by(|&a, &b| diam_range[b].total_cmp(&diam_range[a]).then(a.cmp(&b)));
        for i1 in cand {
            if covered[i1] {
                continue;
            }
            let mut members = p[i1].domain.clone();
            for j in 0..n {
                if j != i1 && !covered[j] && balls_meet(&p[i1].range_yolk, &p[j].range_yolk) {
                    members.union_with(&p[j].domain);
                }
            }
            for j in 0..n {
                if !covered[j] && p[j].domain.is_subset(&members) {
                    covered[j] = true;
                }
            }
            out.push(PairSpec { range: members.clone(), domain: members, yolk: p[i1].yolk, range_yolk: p[i1].range_yolk });
        }
    }
    out
}

/// Output pair of the egg-yolk covering.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoverPair {
    pub yolk: Ball,
    pub range_yolk: Ball,
    pub samples: usize,
    pub domain_m: f64,
    pub range_m: f64,
    #[serde(skip)]
    pub members: FixedBitSet,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Covering {
    pub pairs: Vec<CoverPair>,
    /// Largest certified constant over both sides.
    pub achieved_m: f64,
    /// Comparability constants reported by the two normalizations.
    pub comparability: [f64; 2],
}

/// Egg-yolk covering of a finite paired family: normalize, cluster by range yolks,
/// then repeat through the inverse map so the yolks are disjoint on both sides.
pub fn egg_yolk_cover(family: &PairedFamily) -> Result<Covering> {
    let first = normalize_comparable(family)?;
    let pass1 = PairedFamily { samples: family.samples.clone(), pairs: one_pass(&first.family), m: family.m };
    let second = normalize_comparable(&pass1.inverted())?;
    let pass2 = one_pass(&second.family);
    let s = &family.samples;
    let mut pairs = Vec::with_capacity(pass2.len());
    let mut achieved: f64 = 1.0;
    for q in pass2.iter().map(PairSpec::swapped) {
        let dm = validate_on_samples(s, Side::Domain, &q.domain, &q.yolk, f64::INFINITY).tight_m;
        let rm = validate_on_samples(s, Side::Range, &q.range, &q.range_yolk, f64::INFINITY).tight_m;
        achieved = achieved.max(dm).max(rm);
        pairs.push(CoverPair {
            yolk: q.yolk,
            range_yolk: q.range_yolk,
            samples: q.domain.count_ones(..),
            domain_m: dm,
            range_m: rm,
            members: q.domain,
        });
    }
    Ok(Covering { pairs, achieved_m: achieved, comparability: [first.comparability, second.comparability] })
}

/// Postconditions of a covering, checked on the samples.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CoverCheck {
    pub union_equal: bool,
    pub image_ok: bool,
    pub domain_disjoint: bool,
    pub range_disjoint: bool,
    /// Every output pair has `2B ⊂ D` and `2B' ⊂ D'`.
    pub yolks_inside: bool,
}

impl CoverCheck {
    pub fn all(&self) -> bool {
        self.union_equal && self.image_ok && self.domain_disjoint && self.range_disjoint && self.yolks_inside
    }
}

pub fn verify_cover(family: &PairedFamily, cover: &Covering) -> CoverCheck {
    let s = &family.samples;
    let mut want = FixedBitSet::with_capacity(s.len());
    for p in &family.pairs {
        want.union_with(&p.domain);
    }
    let mut got = FixedBitSet::with_capacity(s.len());
    for p in &cover.pairs {
        got.union_with(&p.members);
    }
    let disjoint = |f: &dyn Fn(&CoverPair) -> Ball| {
        let b: Vec<Ball> = cover.pairs.iter().map(f).collect();
        (0..b.len()).all(|i| (i + 1..b.len()).all(|j| !balls_meet(&b[i], &b[j])))
    };
    // Regions are index sets shared by both clouds, so f(D) = D' holds when every
    // output region comes from input regions with matching images.
    let image_ok = family.pairs.iter().all(|p| p.domain == p.range);
    let yolks_inside = cover.pairs.iter().all(|p| {
        validate_on_samples(s, Side::Domain, &p.members, &p.yolk, f64::INFINITY).double_inside
            && validate_on_samples(s, Side::Range, &p.members, &p.range_yolk, f64::INFINITY).double_inside
    });
    CoverCheck {
        union_equal: got == want,
        image_ok,
        domain_disjoint: disjoint(&|p| p.yolk),
        range_disjoint: disjoint(&|p| p.range_yolk),
        yolks_inside,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::family::{random_family, LinearKind};

    fn disk_region(r: f64) -> Region {
        Region::from_predicate(2, Point::new2(-r, -r), Point::new2(r, r), 0.02, |p| p.norm() < r).unwrap()
    }

    #[test]
    fn concentric_examples() {
        let a = disk_region(4.0);
        let good = validate_egg_yolk(&EggYolkPair { region: a.clone(), yolk: Ball::new(Point::ORIGIN, 1.0).unwrap(), m: 4.0 });
        assert!(good.holds);
        assert!((good.tight_m - 4.0).abs() < 0.02, "{}", good.tight_m);
        let bad = validate_egg_yolk(&EggYolkPair { region: a, yolk: Ball::new(Point::ORIGIN, 3.0).unwrap(), m: 4.0 });
        assert!(!bad.holds && !bad.double_inside);
    }

    #[test]
    fn nested_chain_collapses() {
        let s = Samples::unit_square(40, |p| *p).unwrap();
        let c = Point::new2(0.5, 0.5);
        let pairs: Vec<PairSpec> = [0.1, 0.2, 0.4]
            .iter()
            .map(|&r| {
                let m = s.select(Side::Domain, |p| p.dist(&c) < r);
                let b = Ball::new(c, r / 2.0).unwrap();
                PairSpec { domain: m.clone(), range: m, yolk: b, range_yolk: b }
            })
            .collect();
        let fam = PairedFamily { samples: s, pairs, m: 2.0 };
        let n = normalize_comparable(&fam).unwrap();
        assert_eq!(n.kept, vec![2]);
        let cov = egg_yolk_cover(&fam).unwrap();
        assert_eq!(cov.pairs.len(), 1);
        assert!(verify_cover(&fam, &cov).all());
    }

    #[test]
    fn correspondence_violation_rejected() {
        let mut fam = random_family(LinearKind::Identity, 4.0, 3, 30, 1).unwrap();
        fam.pairs[0].range.toggle(0);
        assert!(normalize_comparable(&fam).is_err());
    }

    #[test]
    fn random_families_cover() {
        for (k, kind) in [LinearKind::Identity, LinearKind::Stretch, LinearKind::RotationScale].into_iter().enumerate() {
            let fam = random_family(kind, 4.0, 20, 60, 7 + k as u64).unwrap();
            for p in &fam.pairs {
                assert!(validate_on_samples(&fam.samples, Side::Domain, &p.domain, &p.yolk, 4.0).holds);
                assert!(validate_on_samples(&fam.samples, Side::Range, &p.range, &p.range_yolk, 4.0).holds);
            }
            let n = normalize_comparable(&fam).unwrap();
            assert!(n.comparability <= 1.0 / intersecting_yolk_ratio(4.0) + 1e-9);
            let cov = egg_yolk_cover(&fam).unwrap();
            assert!(verify_cover(&fam, &cov).all(), "{kind:?}");
        }
    }

    #[test]
    fn stretch_needs_four() {
        assert!(random_family(LinearKind::Stretch, 2.0, 3, 20, 1).is_err());
    }
}
