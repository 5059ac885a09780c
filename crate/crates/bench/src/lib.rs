//! Benchmark fixtures shared by the criterion targets.

use exdist::cover::{random_family, LinearKind, PairedFamily};
use exdist::distort::SampledMap;
use exdist::geom::{Point, PolyCurve};
use exdist::qhyp::PolygonDomain;
use exdist::sets::{Primitives, QPoint, SetModel};

pub fn stretch_map() -> SampledMap {
    SampledMap::on_cube(2, 201, -1.0, 1.0, |p| Point::new2(2.0 * p.x(), p.y())).expect("valid sampling")
}

pub fn family(regions: usize) -> PairedFamily {
    random_family(LinearKind::Stretch, 4.0, regions, 48, 11).expect("valid family")
}

pub fn unit_disk() -> PolygonDomain {
    PolygonDomain::disk(Point::new2(0.0, 0.0), 1.0, 1024).expect("valid disk")
}

/// Ten unit segments in a 5 x 2 grid and a circle of radius 1/2.
pub fn survey_pair() -> (SetModel, PolyCurve) {
    let segs = (0..10)
        .map(|i| {
            let t = 0.3 + 0.61 * i as f64;
            let (cx, cy) = (0.625 + 1.25 * (i % 5) as f64, 0.625 + 1.25 * (i / 5) as f64);
            [
                QPoint::from_f64(cx - 0.5 * t.cos(), cy - 0.5 * t.sin()),
                QPoint::from_f64(cx + 0.5 * t.cos(), cy + 0.5 * t.sin()),
            ]
        })
        .collect();
    let circle = (0..=64)
        .map(|i| {
            let a = std::f64::consts::TAU * (i % 64) as f64 / 64.0;
            Point::new2(0.5 * a.cos(), 0.5 * a.sin())
        })
        .collect();
    (SetModel::Primitives(Primitives::from_segments(segs)), PolyCurve::new(circle).expect("valid curve"))
}
