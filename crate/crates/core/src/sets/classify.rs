//! Exact classification of curve–set intersections.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geom::{Point, PolyCurve};
use crate::sets::line::{Comp, Tag};
use crate::sets::model::SetModel;
use crate::sets::rat::{f, QPoint};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum IntersectionClass {
    Empty,
    Finite { count: usize },
    /// Infinitely many points but zero 1-measure at the represented depth.
    InfiniteNulllength,
    PositiveLength,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComponentRecord {
    pub t0: f64,
    pub t1: f64,
    pub tag: Tag,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SegmentReport {
    pub index: usize,
    #[serde(flatten)]
    pub class: IntersectionClass,
    pub components: Vec<ComponentRecord>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassReport {
    #[serde(flatten)]
    pub class: IntersectionClass,
    pub segments: Vec<SegmentReport>,
}

enum Kind {
    Points(Vec<QPoint>),
    Null,
    Positive,
}

fn kind_of(comps: &[Comp], a: &QPoint, b: &QPoint) -> Kind {
    let mut positive = false;
    let mut null = false;
    let mut pts = Vec::new();
    for c in comps {
        if c.is_point() {
            pts.push(a.lerp(b, &c.a));
            continue;
        }
        match c.tag {
            Tag::Solid | Tag::Cantor { positive: true } => positive = true,
            Tag::Cantor { positive: false } => null = true,
        }
    }
    if positive {
        Kind::Positive
    } else if null {
        Kind::Null
    } else {
        Kind::Points(pts)
    }
}

fn class_of(k: &Kind) -> IntersectionClass {
    match k {
        Kind::Positive => IntersectionClass::PositiveLength,
        Kind::Null => IntersectionClass::InfiniteNulllength,
        Kind::Points(p) if p.is_empty() => IntersectionClass::Empty,
        Kind::Points(p) => IntersectionClass::Finite { count: p.len() },
    }
}

/// Classifies `|γ| ∩ E` segment by segment and in aggregate. Points shared by
/// consecutive segments are counted once.
pub fn curve_intersection_class(e: &SetModel, gamma: &PolyCurve) -> Result<ClassReport> {
    let fv = gamma.vertices();
    let exact = |p: &Point| QPoint::from_f64(p.x(), p.y());
    let mut segments = Vec::new();
    let mut all_pts: Vec<QPoint> = Vec::new();
    let (mut positive, mut null) = (false, false);
    if fv.len() == 1 {
        let a = exact(&fv[0]);
        let comps = e.segment_components(&a, &a)?;
        let k = kind_of(&comps, &a, &a);
        let class = class_of(&k);
        segments.push(SegmentReport { index: 0, class: class.clone(), components: records(&comps) });
        return Ok(ClassReport { class, segments });
    }
    for (i, w) in fv.windows(2).enumerate() {
        let (a, b) = (&w[0], &w[1]);
        if !e.may_meet_segment([a.x(), a.y()], [b.x(), b.y()]) {
            segments.push(SegmentReport { index: i, class: IntersectionClass::Empty, components: Vec::new() });
            continue;
        }
        let (a, b) = (exact(a), exact(b));
        let comps = e.segment_components(&a, &b)?;
        let k = kind_of(&comps, &a, &b);
        let class = class_of(&k);
        match k {
            Kind::Positive => positive = true,
            Kind::Null => null = true,
            Kind::Points(p) => all_pts.extend(p),
        }
        segments.push(SegmentReport { index: i, class, components: records(&comps) });
    }
    all_pts.sort();
    all_pts.dedup();
    let class = if positive {
        IntersectionClass::PositiveLength
    } else if null {
        IntersectionClass::InfiniteNulllength
    } else if all_pts.is_empty() {
        IntersectionClass::Empty
    } else {
        IntersectionClass::Finite { count: all_pts.len() }
    };
    Ok(ClassReport { class, segments })
}

fn records(comps: &[Comp]) -> Vec<ComponentRecord> {
    comps.iter().map(|c| ComponentRecord { t0: f(&c.a), t1: f(&c.b), tag: c.tag }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;
    use crate::sets::cantor::CantorSpec;
    use crate::sets::line::IntervalSet;
    use crate::sets::model::{make_cantor_set, product_set};
    use crate::sets::planar::{Polygon, Primitives};
    use crate::sets::rat::qi;

    fn strip() -> SetModel {
        let c = make_cantor_set(CantorSpec::middle_thirds(5)).unwrap();
        product_set(c, SetModel::Intervals(IntervalSet::new(vec![(qi(0), qi(1))]).unwrap())).unwrap()
    }

    fn seg(a: [f64; 2], b: [f64; 2]) -> PolyCurve {
        PolyCurve::segment(Point::new2(a[0], a[1]), Point::new2(b[0], b[1]))
    }

    #[test]
    fn cantor_strip_examples() {
        let e = strip();
        let h = curve_intersection_class(&e, &seg([-0.5, 0.5], [1.5, 0.5])).unwrap();
        assert_eq!(h.class, IntersectionClass::InfiniteNulllength);
        let gap = curve_intersection_class(&e, &seg([0.5, -1.0], [0.5, 2.0])).unwrap();
        assert_eq!(gap.class, IntersectionClass::Empty);
        let on = curve_intersection_class(&e, &seg([0.0, -1.0], [0.0, 2.0])).unwrap();
        assert_eq!(on.class, IntersectionClass::PositiveLength);
    }

    #[test]
    fn shared_vertex_counted_once() {
        let e = SetModel::Primitives(Primitives::from_points(vec![QPoint::from_f64(1.0, 0.0)]));
        let g = PolyCurve::new(vec![Point::new2(0.0, 0.0), Point::new2(1.0, 0.0), Point::new2(1.0, 1.0)]).unwrap();
        let r = curve_intersection_class(&e, &g).unwrap();
        assert_eq!(r.class, IntersectionClass::Finite { count: 1 });
        assert_eq!(r.segments.len(), 2);
    }

    #[test]
    fn square_crossing_is_positive() {
        let sq = Polygon::rect(qi(0), qi(0), qi(1), qi(1));
        let e = SetModel::Primitives(Primitives::from_polygons(vec![sq]).unwrap());
        let r = curve_intersection_class(&e, &seg([-1.0, 0.5], [2.0, 0.5])).unwrap();
        assert_eq!(r.class, IntersectionClass::PositiveLength);
        let corner = curve_intersection_class(&e, &seg([0.0, 2.0], [2.0, 0.0])).unwrap();
        assert_eq!(corner.class, IntersectionClass::Finite { count: 1 });
    }
}
