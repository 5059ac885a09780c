//! Sets on the real line and their tagged component lists.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sets::cantor::Cantor;
use crate::sets::rat::{qmax, qmin, Rat, Q};

/// What a component of an intersection stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tag {
    /// The whole closed interval (or single point) belongs to the set.
    Solid,
    /// The interval carries a Cantor-type part of the set: infinite and
    /// uncountable, with positive 1-measure iff `positive`.
    Cantor { positive: bool },
}

/// Closed component `[a, b]` (possibly `a == b`) with its tag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comp {
    pub a: Q,
    pub b: Q,
    pub tag: Tag,
}

impl Comp {
    pub fn solid(a: Q, b: Q) -> Self {
        Comp { a, b, tag: Tag::Solid }
    }

    pub fn is_point(&self) -> bool {
        self.a == self.b
    }

    pub fn len(&self) -> Q {
        &self.b - &self.a
    }
}

/// Sorts and merges overlapping solid components; Cantor components are kept apart.
pub fn normalize(mut v: Vec<Comp>) -> Vec<Comp> {
    v.sort_by(|x, y| x.a.cmp(&y.a).then(x.b.cmp(&y.b)));
    let mut out: Vec<Comp> = Vec::with_capacity(v.len());
    for c in v {
        if let Some(last) = out.last_mut() {
            if last.tag == Tag::Solid && c.tag == Tag::Solid && c.a <= last.b {
                if c.b > last.b {
                    last.b = c.b;
                }
                continue;
            }
            // A point already covered by a solid piece adds nothing.
            if c.is_point() && last.tag == Tag::Solid && c.a <= last.b {
                continue;
            }
            if last.is_point() && c.tag == Tag::Solid && last.a >= c.a && last.a <= c.b {
                *last = c;
                continue;
            }
        }
        out.push(c);
    }
    out
}

/// Finite union of closed intervals (degenerate intervals are points).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalSet {
    pub intervals: Vec<[Rat; 2]>,
}

impl IntervalSet {
    pub fn new(intervals: Vec<(Q, Q)>) -> Result<Self> {
        for (a, b) in &intervals {
            if a > b {
                return Err(Error::Construction(format!("interval [{}, {}] is reversed", Rat(a.clone()), Rat(b.clone()))));
            }
        }
        Ok(IntervalSet { intervals: intervals.into_iter().map(|(a, b)| [Rat(a), Rat(b)]).collect() })
    }

    pub fn points(ps: Vec<Q>) -> Self {
        IntervalSet { intervals: ps.into_iter().map(|p| [Rat(p.clone()), Rat(p)]).collect() }
    }

    pub fn validate(&self) -> Result<()> {
        for [a, b] in &self.intervals {
            if a.0 > b.0 {
                return Err(Error::Construction("reversed interval".into()));
            }
        }
        Ok(())
    }

    pub fn contains(&self, x: &Q) -> bool {
        self.intervals.iter().any(|[a, b]| &a.0 <= x && x <= &b.0)
    }

    pub fn components_in(&self, lo: &Q, hi: &Q) -> Vec<Comp> {
        let mut v = Vec::new();
        for [a, b] in &self.intervals {
            let (ca, cb) = (qmax(&a.0, lo), qmin(&b.0, hi));
            if ca <= cb {
                v.push(Comp::solid(ca, cb));
            }
        }
        normalize(v)
    }

    pub fn length(&self) -> Q {
        let all = self.components_in(&self.min(), &self.max());
        all.iter().map(|c| c.len()).fold(Q::from_integer(0.into()), |s, x| s + x)
    }

    pub fn min(&self) -> Q {
        self.intervals.iter().map(|i| i[0].0.clone()).min().unwrap_or_else(|| Q::from_integer(0.into()))
    }

    pub fn max(&self) -> Q {
        self.intervals.iter().map(|i| i[1].0.clone()).max().unwrap_or_else(|| Q::from_integer(0.into()))
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

/// One-dimensional set: either a primitive union or a Cantor construction.
#[derive(Clone, Debug)]
pub enum LineSet<'a> {
    Intervals(&'a IntervalSet),
    Cantor(&'a Cantor),
}

impl LineSet<'_> {
    pub fn components_in(&self, lo: &Q, hi: &Q) -> Vec<Comp> {
        match self {
            LineSet::Intervals(s) => s.components_in(lo, hi),
            LineSet::Cantor(c) => c.components_in(lo, hi),
        }
    }

    /// Membership of the ideal set, where decidable; a point undecided at the
    /// search cap counts as a member of the represented approximation.
    pub fn contains_ideal(&self, x: &Q) -> bool {
        match self {
            LineSet::Intervals(s) => s.contains(x),
            LineSet::Cantor(c) => c.contains_ideal(x).unwrap_or(true),
        }
    }

    /// True when every component is solid (no Cantor structure).
    pub fn is_solid(&self) -> bool {
        match self {
            LineSet::Intervals(_) => true,
            LineSet::Cantor(c) => c.ideal_is_finite_union(),
        }
    }

    pub fn hull(&self) -> Option<(Q, Q)> {
        match self {
            LineSet::Intervals(s) if s.is_empty() => None,
            LineSet::Intervals(s) => Some((s.min(), s.max())),
            LineSet::Cantor(c) => Some((c.spec.a.0.clone(), c.spec.b.0.clone())),
        }
    }

    /// Components, in the parameter `t`, of `{t in [ta, tb] : x0 + t dx in set}`.
    pub fn preimage(&self, x0: &Q, dx: &Q, ta: &Q, tb: &Q) -> Vec<Comp> {
        use num_traits::{Signed, Zero};
        if dx.is_zero() {
            return if self.contains_ideal(x0) { vec![Comp::solid(ta.clone(), tb.clone())] } else { Vec::new() };
        }
        let xa = x0 + dx * ta;
        let xb = x0 + dx * tb;
        let (lo, hi) = if dx.is_positive() { (xa, xb) } else { (xb, xa) };
        let comps = self.components_in(&lo, &hi);
        let mut out: Vec<Comp> = comps
            .into_iter()
            .map(|c| {
                let t1 = (&c.a - x0) / dx;
                let t2 = (&c.b - x0) / dx;
                Comp { a: qmin(&t1, &t2), b: qmax(&t1, &t2), tag: c.tag }
            })
            .collect();
        out.sort_by(|x, y| x.a.cmp(&y.a));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::rat::{qi, qr};

    #[test]
    fn merge_overlaps() {
        let s = IntervalSet::new(vec![(qi(0), qi(2)), (qi(1), qi(3)), (qi(5), qi(5))]).unwrap();
        let c = s.components_in(&qi(-10), &qi(10));
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].b, qi(3));
        assert!(c[1].is_point());
        assert_eq!(s.length(), qi(3));
    }

    #[test]
    fn preimage_reverses() {
        let s = IntervalSet::new(vec![(qi(1), qi(2))]).unwrap();
        let l = LineSet::Intervals(&s);
        let c = l.preimage(&qi(4), &qi(-4), &qi(0), &qi(1));
        assert_eq!(c, vec![Comp::solid(qr(1, 2), qr(3, 4))]);
    }
}
