//! Cantor constructions with exact endpoints.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sets::line::{Comp, Tag};
use crate::sets::rat::{f, qmax, qmin, qr, Rat, Q};

/// Levels searched past the represented depth when deciding ideal membership.
const EXTRA_LEVELS: u32 = 24;
/// Largest represented depth (2^depth stored intervals).
pub const MAX_DEPTH: u32 = 16;

/// Relative length of the open middle piece removed from every interval at level k ≥ 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum FractionRule {
    /// The same fraction at every level (1/3 gives the middle-thirds set).
    Constant { fraction: Rat },
    /// Fraction `base^-k` at level k; positive limit measure for base > 1.
    PowerOf { base: Rat },
    /// Finitely many levels; no removal afterwards.
    List { fractions: Vec<Rat> },
}

impl FractionRule {
    pub fn at(&self, k: u32) -> Option<Q> {
        debug_assert!(k >= 1);
        match self {
            FractionRule::Constant { fraction } => Some(fraction.0.clone()),
            FractionRule::PowerOf { base } => {
                let mut p = Q::one();
                for _ in 0..k {
                    p /= &base.0;
                }
                Some(p)
            }
            FractionRule::List { fractions } => fractions.get(k as usize - 1).map(|r| r.0.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CantorSpec {
    pub a: Rat,
    pub b: Rat,
    pub fractions: FractionRule,
    pub depth: u32,
}

impl CantorSpec {
    pub fn middle_thirds(depth: u32) -> Self {
        CantorSpec {
            a: Rat(Q::zero()),
            b: Rat(Q::one()),
            fractions: FractionRule::Constant { fraction: Rat(qr(1, 3)) },
            depth,
        }
    }

    /// Fractions `4^-k` on `[a, b]`.
    pub fn fat(a: Q, b: Q, depth: u32) -> Self {
        CantorSpec { a: Rat(a), b: Rat(b), fractions: FractionRule::PowerOf { base: Rat(qr(4, 1)) }, depth }
    }
}

/// The limit set of a [`CantorSpec`], represented exactly through its level-`depth` intervals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CantorSpec", into = "CantorSpec")]
pub struct Cantor {
    pub spec: CantorSpec,
    intervals: Vec<(Q, Q)>,
}

impl From<Cantor> for CantorSpec {
    fn from(c: Cantor) -> Self {
        c.spec
    }
}

impl TryFrom<CantorSpec> for Cantor {
    type Error = Error;
    fn try_from(s: CantorSpec) -> Result<Self> {
        make_cantor(s)
    }
}

fn split(u: &Q, v: &Q, frac: &Q) -> ((Q, Q), (Q, Q)) {
    let keep = (v - u) * (Q::one() - frac) / Q::from_integer(2.into());
    ((u.clone(), u + &keep), (v - &keep, v.clone()))
}

/// Builds the exact level-`depth` representation of a Cantor construction.
pub fn make_cantor(spec: CantorSpec) -> Result<Cantor> {
    if spec.a.0 >= spec.b.0 {
        return Err(Error::Construction("Cantor base interval must have a < b".into()));
    }
    if spec.depth > MAX_DEPTH {
        return Err(Error::Construction(format!("Cantor depth {} exceeds {MAX_DEPTH}", spec.depth)));
    }
    match &spec.fractions {
        FractionRule::Constant { fraction } => check_fraction(&fraction.0)?,
        FractionRule::PowerOf { base } => {
            if base.0 <= Q::one() {
                return Err(Error::Construction("power rule needs base > 1".into()));
            }
        }
        FractionRule::List { fractions } => {
            for r in fractions {
                check_fraction(&r.0)?;
            }
        }
    }
    let mut level = vec![(spec.a.0.clone(), spec.b.0.clone())];
    for k in 1..=spec.depth {
        let Some(fr) = spec.fractions.at(k) else { break };
        let mut next = Vec::with_capacity(level.len() * 2);
        for (u, v) in &level {
            let (l, r) = split(u, v, &fr);
            next.push(l);
            next.push(r);
        }
        level = next;
    }
    Ok(Cantor { spec, intervals: level })
}

fn check_fraction(x: &Q) -> Result<()> {
    if *x <= Q::zero() || *x >= Q::one() {
        return Err(Error::Construction("removed fractions must lie in (0, 1)".into()));
    }
    Ok(())
}

impl Cantor {
    /// Level-`depth` intervals.
    pub fn intervals(&self) -> &[(Q, Q)] {
        &self.intervals
    }

    /// Level actually represented (a list rule may stop early).
    pub fn represented_depth(&self) -> u32 {
        match &self.spec.fractions {
            FractionRule::List { fractions } => self.spec.depth.min(fractions.len() as u32),
            _ => self.spec.depth,
        }
    }

    /// The ideal set is a finite union of intervals (list rules).
    pub fn ideal_is_finite_union(&self) -> bool {
        matches!(self.spec.fractions, FractionRule::List { .. })
    }

    /// The ideal set has positive 1-measure.
    pub fn ideal_positive(&self) -> bool {
        !matches!(self.spec.fractions, FractionRule::Constant { .. })
    }

    fn tag(&self) -> Tag {
        if self.ideal_is_finite_union() {
            Tag::Solid
        } else {
            Tag::Cantor { positive: self.ideal_positive() }
        }
    }

    /// Exact measure of the level-`depth` set: `(b - a) Π (1 - f_k)`.
    pub fn measure(&self) -> Q {
        let mut m = &self.spec.b.0 - &self.spec.a.0;
        for k in 1..=self.represented_depth() {
            m *= Q::one() - self.spec.fractions.at(k).unwrap();
        }
        m
    }

    /// Measure of the ideal (limit) set.
    pub fn ideal_measure(&self) -> f64 {
        let base = f(&(&self.spec.b.0 - &self.spec.a.0));
        match &self.spec.fractions {
            FractionRule::Constant { .. } => 0.0,
            FractionRule::List { .. } => f(&self.measure()),
            FractionRule::PowerOf { base: b } => {
                let b = f(&b.0);
                let mut m = base;
                let mut t = 1.0 / b;
                while t > 1e-18 {
                    m *= 1.0 - t;
                    t /= b;
                }
                m
            }
        }
    }

    /// Membership in the level-`depth` set.
    pub fn contains(&self, x: &Q) -> bool {
        let i = self.intervals.partition_point(|(_, v)| v < x);
        i < self.intervals.len() && self.intervals[i].0 <= *x
    }

    /// Membership in the ideal set: `Some(true)` for endpoints of some level (never
    /// removed), `Some(false)` for points in a removed gap, `None` when the search
    /// cap is reached first.
    pub fn contains_ideal(&self, x: &Q) -> Option<bool> {
        let (mut u, mut v) = (self.spec.a.0.clone(), self.spec.b.0.clone());
        if *x < u || *x > v {
            return Some(false);
        }
        let cap = self.represented_depth() + EXTRA_LEVELS;
        for k in 1..=cap {
            if *x == u || *x == v {
                return Some(true);
            }
            let Some(fr) = self.spec.fractions.at(k) else { return Some(true) };
            let ((l0, l1), (r0, r1)) = split(&u, &v, &fr);
            if *x <= l1 {
                (u, v) = (l0, l1);
            } else if *x >= r0 {
                (u, v) = (r0, r1);
            } else {
                return Some(false);
            }
        }
        if *x == u || *x == v {
            Some(true)
        } else {
            None
        }
    }

    /// Components of the ideal set inside `[lo, hi]`: level intervals fully inside
    /// carry the Cantor tag; intervals cut by `lo` or `hi` are refined further so a
    /// cut through a gap does not produce a spurious piece.
    pub fn components_in(&self, lo: &Q, hi: &Q) -> Vec<Comp> {
        let mut out = Vec::new();
        if lo > hi {
            return out;
        }
        if lo == hi {
            if self.contains_ideal(lo).unwrap_or_else(|| self.contains(lo)) {
                out.push(Comp::solid(lo.clone(), lo.clone()));
            }
            return out;
        }
        let cap = self.represented_depth() + EXTRA_LEVELS;
        self.collect(&self.spec.a.0, &self.spec.b.0, 0, lo, hi, cap, &mut out);
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn collect(&self, u: &Q, v: &Q, k: u32, lo: &Q, hi: &Q, cap: u32, out: &mut Vec<Comp>) {
        if v < lo || u > hi {
            return;
        }
        if u == hi || v == lo {
            out.push(Comp::solid(qmax(u, lo), qmin(v, hi)));
            return;
        }
        let inside = lo <= u && v <= hi;
        let Some(fr) = self.spec.fractions.at(k + 1) else {
            out.push(Comp::solid(qmax(u, lo), qmin(v, hi)));
            return;
        };
        if (inside && k >= self.represented_depth()) || k >= cap {
            out.push(Comp { a: qmax(u, lo), b: qmin(v, hi), tag: self.tag() });
            return;
        }
        let ((l0, l1), (r0, r1)) = split(u, v, &fr);
        self.collect(&l0, &l1, k + 1, lo, hi, cap, out);
        self.collect(&r0, &r1, k + 1, lo, hi, cap, out);
    }

    /// Length of every level-`j` interval.
    pub fn level_length(&self, j: u32) -> Q {
        let mut l = &self.spec.b.0 - &self.spec.a.0;
        for k in 1..=j {
            match self.spec.fractions.at(k) {
                Some(fr) => l = l * (Q::one() - fr) / Q::from_integer(2.into()),
                None => break,
            }
        }
        l
    }
}
