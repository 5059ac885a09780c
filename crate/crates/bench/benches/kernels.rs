use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use exdist::cover::egg_yolk_cover;
use exdist::distort::{eccentric_distortion, EccentricOptions};
use exdist::geom::Point;
use exdist::modfam::{discrete_modulus, translation_survey, CurveConstraint, GridScene, SolverOptions};
use exdist::qhyp::{qh_distance, whitney_decompose, QhOptions};
use exdist_bench::{family, stretch_map, survey_pair, unit_disk};

fn modulus(c: &mut Criterion) {
    let mut g = c.benchmark_group("modulus");
    g.sample_size(10);
    for n in [32, 64] {
        let scene = GridScene::rectangle(2.0, 1.0, n).unwrap();
        g.bench_with_input(BenchmarkId::new("rectangle", n), &scene, |b, s| {
            b.iter(|| discrete_modulus(black_box(s), CurveConstraint::Unconstrained, &SolverOptions::default()).unwrap())
        });
    }
    let ring = GridScene::annulus(2, 1.0, std::f64::consts::E, 64).unwrap();
    g.bench_function("annulus/64", |b| {
        b.iter(|| discrete_modulus(black_box(&ring), CurveConstraint::Unconstrained, &SolverOptions::default()).unwrap())
    });
    g.finish();
}

fn cover(c: &mut Criterion) {
    let mut g = c.benchmark_group("egg_yolk");
    for regions in [8, 32] {
        let fam = family(regions);
        g.bench_with_input(BenchmarkId::from_parameter(regions), &fam, |b, f| b.iter(|| egg_yolk_cover(black_box(f)).unwrap()));
    }
    g.finish();
}

fn qh(c: &mut Criterion) {
    let dom = unit_disk();
    let mut g = c.benchmark_group("quasihyperbolic");
    g.sample_size(10);
    g.bench_function("whitney/depth6", |b| b.iter(|| whitney_decompose(black_box(&dom), 6).unwrap()));
    g.bench_function("distance/128", |b| {
        b.iter(|| qh_distance(&dom, &Point::new2(0.0, 0.0), &Point::new2(0.0, 0.9), &QhOptions { cells: 128 }).unwrap())
    });
    g.finish();
}

fn distortion(c: &mut Criterion) {
    let f = stretch_map();
    let x = Point::new2(0.1, -0.2);
    c.bench_function("eccentric_distortion/r0.1", |b| {
        b.iter(|| eccentric_distortion(&f, black_box(&x), 0.1, &EccentricOptions::default()).unwrap())
    });
}

fn survey(c: &mut Criterion) {
    let (e, gamma) = survey_pair();
    c.bench_function("translation_survey/1000", |b| b.iter(|| translation_survey(&e, &gamma, 16, 1000, 7).unwrap()));
}

criterion_group!(benches, modulus, cover, qh, distortion, survey);
criterion_main!(benches);
