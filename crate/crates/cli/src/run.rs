//! Executes a validated experiment config.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

use exdist::cover::{egg_yolk_cover, random_family, verify_cover, LinearKind};
use exdist::distort::{
    eccentric_distortion_ladder, metric_distortion, ring_qc_test, EccentricOptions, Ring, RingQcOptions, SampledMap,
};
use exdist::geom::{PolyCurve, Point};
use exdist::io::{heatmap, Svg};
use exdist::modfam::{
    admissible_check, rectangle_modulus, ring_modulus_exact, sphere_area, square_ring_lower_bound, translation_survey,
    CurveConstraint, GridScene, ModulusResult, SolverOptions,
};
use exdist::qhyp::{qh_distance, shadow_sum_diagnostic, whitney_decompose, PolygonDomain, QhOptions};
use exdist::sets::rat::q;
use exdist::sets::shapes::{circle_curve, fat_cantor_strip, pinhole_annulus};
use exdist::sets::{cned_probe, make_cantor_set, product_set, CantorSpec, IntervalSet, Primitives, ProbeOptions, QPoint, SetModel};

use crate::config::*;

/// One pass/fail line of a run. Invariant failures are breaches of properties
/// the algorithms guarantee; the other checks compare against oracles and
/// expected trends.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub invariant: bool,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<f64>,
    pub detail: String,
}

impl Check {
    fn oracle(name: &str, pass: bool, observed: f64, limit: f64, detail: impl Into<String>) -> Self {
        Check { name: name.into(), invariant: false, pass, observed: Some(observed), limit: Some(limit), detail: detail.into() }
    }

    fn invariant(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), invariant: true, pass, observed: None, limit: None, detail: detail.into() }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Shortest round-tripping decimal; non-finite values become empty cells.
fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else {
        String::new()
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or(String::new(), num)
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub summary: Value,
    pub checks: Vec<Check>,
    pub table: Table,
    pub figure: Option<String>,
    /// The requested family was empty (e.g. no admissible path exists).
    pub infeasible: bool,
    /// Wall-clock seconds per phase; kept out of the deterministic results.
    pub timings: Vec<(String, f64)>,
}

impl Outcome {
    pub fn invariant_breach(&self) -> bool {
        self.checks.iter().any(|c| c.invariant && !c.pass)
    }

    pub fn status(&self) -> &'static str {
        if self.invariant_breach() {
            "invariant-breach"
        } else if self.infeasible {
            "infeasible"
        } else {
            "ok"
        }
    }
}

struct Timer(Vec<(String, f64)>);

impl Timer {
    fn time<T>(&mut self, label: impl Into<String>, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let v = f();
        self.0.push((label.into(), t.elapsed().as_secs_f64()));
        v
    }
}

/// Runs an experiment. Relative paths inside the config resolve against `base`.
pub fn run_experiment(cfg: &ExperimentConfig, base: &Path) -> Result<Outcome> {
    cfg.validate()?;
    let tol = cfg.tolerance;
    let seed = cfg.seed.unwrap_or(0);
    match &cfg.params {
        Params::Modulus(p) => run_modulus(p, tol, base),
        Params::Covering(p) => run_covering(p, seed),
        Params::Distortion(p) => run_distortion(p, tol, base),
        Params::Quasihyperbolic(p) => run_qh(p),
        Params::SetsProbe(p) => run_probe(p, tol, base),
        Params::Survey(p) => run_survey(p, seed),
    }
}

// ---------------------------------------------------------------------------
// modulus

pub fn build_scene(spec: &SceneSpec, base: &Path) -> Result<GridScene> {
    Ok(match spec {
        SceneSpec::Annulus { dim, r, big_r, cells } => GridScene::annulus(*dim, *r, *big_r, *cells)?,
        SceneSpec::Rectangle { length, width, cells } => GridScene::rectangle(*length, *width, *cells)?,
        SceneSpec::Split { length, width, cells } => {
            let mut s = GridScene::rectangle(*length, *width, *cells)?;
            let col = 1 + cells / 2;
            for j in 0..s.lattice.shape[1] {
                let i = s.lattice.index([col, j, 0]);
                s.u.set(i, false);
            }
            s
        }
        SceneSpec::SquareRing { r, big_r, cells } => GridScene::square_ring_slits(*r, *big_r, *cells)?,
        SceneSpec::Pinhole { r, big_r, cells } => pinhole_annulus(*r, *big_r, *cells)?,
        SceneSpec::File { path } => {
            let p = base.join(path);
            let text = std::fs::read_to_string(&p).with_context(|| format!("reading scene {}", p.display()))?;
            let file: exdist::io::SceneFile = serde_json::from_str(&text).with_context(|| format!("parsing scene {}", p.display()))?;
            file.to_scene()?
        }
    })
}

fn constraint(c: ConstraintSpec) -> CurveConstraint {
    match c {
        ConstraintSpec::Unconstrained => CurveConstraint::Unconstrained,
        ConstraintSpec::Avoid => CurveConstraint::Avoid,
        ConstraintSpec::Budget(k) => CurveConstraint::Budget(k),
    }
}

enum Analytic {
    /// F1 and F2 lie in different components.
    Disconnected,
    Exact(f64),
    LowerBound(f64),
}

fn analytic(spec: &SceneSpec) -> Option<Analytic> {
    match *spec {
        SceneSpec::Annulus { dim, r, big_r, .. } => ring_modulus_exact(dim, r, big_r).ok().map(Analytic::Exact),
        SceneSpec::Rectangle { length, width, .. } => rectangle_modulus(length, width).ok().map(Analytic::Exact),
        SceneSpec::SquareRing { r, big_r, .. } => square_ring_lower_bound(r, big_r).ok().map(Analytic::LowerBound),
        SceneSpec::Split { .. } => Some(Analytic::Disconnected),
        SceneSpec::Pinhole { .. } | SceneSpec::File { .. } => None,
    }
}

/// The returned density must give every witness path length at least 1.
fn soundness(label: &str, res: &ModulusResult, lattice: &exdist::grid::Lattice) -> Check {
    let Some(rho) = &res.density else {
        return Check::invariant(&format!("{label}admissible density"), true, "no density (empty or degenerate family)");
    };
    let curves: Vec<PolyCurve> = res.witnesses.iter().map(|w| w.to_curve(lattice)).collect();
    let rep = admissible_check(rho, &curves);
    let worst = rep.worst_shortfall();
    Check::invariant(
        &format!("{label}admissible density"),
        worst <= 1e-9,
        format!("{} witness paths, shortest rho-length {:.12}", rep.checked, rep.min_length),
    )
}

fn density_figure(scene: &GridScene, res: &ModulusResult) -> Option<String> {
    let rho = res.density.as_ref()?;
    if scene.dim() != 2 {
        return None;
    }
    let vals: Vec<Option<f64>> = (0..scene.lattice.len()).map(|i| scene.u[i].then(|| rho.values[i])).collect();
    Some(heatmap(&scene.lattice, &vals, 640.0))
}

fn solve(scene: &GridScene, c: CurveConstraint, tol: f64) -> Result<ModulusResult> {
    Ok(exdist::modfam::discrete_modulus(scene, c, &SolverOptions::with_tol(tol))?)
}

fn accuracy_check(name: &str, value: f64, a: &Analytic, accuracy: f64, tol: f64) -> Check {
    match *a {
        Analytic::Disconnected => Check::oracle(name, value == 0.0, value, 0.0, "disconnected ends: modulus of the empty family"),
        Analytic::Exact(e) => {
            let err = (value / e - 1.0).abs();
            Check::oracle(name, err <= accuracy, err, accuracy, format!("value {value:.6} vs analytic {e:.6}"))
        }
        Analytic::LowerBound(b) => {
            let floor = b * (1.0 - tol);
            Check::oracle(name, value >= floor, value, floor, format!("lower bound {b:.6}, less the relative solver tolerance"))
        }
    }
}

fn run_modulus(p: &ModulusParams, tol: f64, base: &Path) -> Result<Outcome> {
    let mut timer = Timer(Vec::new());
    match p {
        ModulusParams::Solve { scene: spec, constraint: c, accuracy } => {
            let scene = build_scene(spec, base)?;
            let res = timer.time("solve", || solve(&scene, constraint(*c), tol))?;
            let mut checks = vec![soundness("", &res, &scene.lattice)];
            if let (Some(a), ConstraintSpec::Unconstrained) = (analytic(spec), c) {
                if !res.infeasible || matches!(a, Analytic::Disconnected) {
                    checks.push(accuracy_check("analytic value", res.value, &a, *accuracy, tol));
                }
            }
            let mut table = Table::new(&["cell", "rho"]);
            if let Some(rho) = &res.density {
                for (i, &v) in rho.values.iter().enumerate() {
                    if v > 0.0 {
                        table.push(vec![i.to_string(), num(v)]);
                    }
                }
            }
            Ok(Outcome {
                summary: json!({
                    "value": res.value, "lower": res.lower, "gap": res.gap, "iterations": res.iterations,
                    "infeasible": res.infeasible, "witnesses": res.witnesses.len(), "cells": scene.lattice.len(),
                }),
                checks,
                figure: density_figure(&scene, &res),
                infeasible: res.infeasible,
                table,
                timings: timer.0,
            })
        }
        ModulusParams::Refine { scene: spec, levels, constraint: c, accuracy } => {
            let a = analytic(spec).filter(|_| *c == ConstraintSpec::Unconstrained);
            let mut table = Table::new(&["cells", "spacing", "value", "lower", "gap", "iterations", "analytic", "rel_error"]);
            let mut checks = Vec::new();
            let mut errors = Vec::new();
            let mut rows = Vec::new();
            let mut last = None;
            for &n in levels {
                let scene = build_scene(&spec.with_cells(n), base)?;
                let res = timer.time(format!("solve {n}"), || solve(&scene, constraint(*c), tol))?;
                checks.push(soundness(&format!("{n}: "), &res, &scene.lattice));
                let (exact, err) = match a {
                    Some(Analytic::Exact(e)) => (Some(e), Some(res.value / e - 1.0)),
                    _ => (None, None),
                };
                if let Some(e) = err {
                    errors.push(e);
                }
                table.push(vec![
                    n.to_string(),
                    num(scene.spacing()),
                    num(res.value),
                    num(res.lower),
                    num(res.gap),
                    res.iterations.to_string(),
                    opt(exact),
                    opt(err),
                ]);
                rows.push(json!({"cells": n, "value": res.value, "gap": res.gap, "rel_error": err}));
                last = Some((scene, res));
            }
            let (scene, res) = last.expect("at least two levels");
            if let Some(a) = &a {
                checks.push(accuracy_check("finest level vs analytic", res.value, a, *accuracy, tol));
            }
            if errors.len() == levels.len() {
                let shrinking = errors.windows(2).all(|w| w[1].abs() < w[0].abs());
                let (first, final_) = (errors[0].abs(), errors[errors.len() - 1].abs());
                checks.push(Check::oracle(
                    "error decreases under refinement",
                    shrinking,
                    final_,
                    first,
                    format!("relative errors {:?}", errors.iter().map(|e| format!("{e:+.4}")).collect::<Vec<_>>()),
                ));
            }
            Ok(Outcome {
                summary: json!({ "levels": rows }),
                checks,
                figure: density_figure(&scene, &res),
                infeasible: res.infeasible,
                table,
                timings: timer.0,
            })
        }
        ModulusParams::Reciprocal { radii, cells } => {
            let dim = 2;
            let mut rings: Vec<(f64, f64)> = radii.windows(2).map(|w| (w[0], w[1])).collect();
            rings.push((radii[0], radii[radii.len() - 1]));
            let omega = sphere_area(dim);
            let mut table = Table::new(&["r", "big_r", "value", "gap", "analytic", "reciprocal", "log_ratio"]);
            let mut checks = Vec::new();
            let mut recip = Vec::new();
            for &(r, big_r) in &rings {
                let scene = GridScene::annulus(dim, r, big_r, *cells)?;
                let res = timer.time(format!("ring ({r}, {big_r})"), || solve(&scene, CurveConstraint::Unconstrained, tol))?;
                checks.push(soundness(&format!("({r}, {big_r}): "), &res, &scene.lattice));
                let l = omega / res.value;
                recip.push(l);
                table.push(vec![
                    num(r),
                    num(big_r),
                    num(res.value),
                    num(res.gap),
                    num(ring_modulus_exact(dim, r, big_r)?),
                    num(l),
                    num((big_r / r).ln()),
                ]);
            }
            let whole = recip[recip.len() - 1];
            let parts: f64 = recip[..recip.len() - 1].iter().sum();
            let defect = (whole - parts).abs();
            let limit = 3.0 * tol * whole;
            checks.push(Check::oracle(
                "reciprocal additivity",
                defect <= limit,
                defect,
                limit,
                format!("composite {whole:.6}, parts sum {parts:.6}; limit is 3 tol relative to the composite"),
            ));
            Ok(Outcome {
                summary: json!({ "reciprocal": recip, "composite": whole, "parts": parts, "defect": defect }),
                checks,
                figure: None,
                infeasible: false,
                table,
                timings: timer.0,
            })
        }
        ModulusParams::Decay { scene: spec, levels, constraint: c, min_decrease } => {
            let mut table = Table::new(&["cells", "spacing", "value", "gap", "decrease"]);
            let mut checks = Vec::new();
            let mut values = Vec::new();
            let mut last = None;
            for &n in levels {
                let scene = build_scene(&spec.with_cells(n), base)?;
                let res = timer.time(format!("solve {n}"), || solve(&scene, constraint(*c), tol))?;
                checks.push(soundness(&format!("{n}: "), &res, &scene.lattice));
                let dec = values.last().map(|&v: &f64| 1.0 - res.value / v);
                table.push(vec![n.to_string(), num(scene.spacing()), num(res.value), num(res.gap), opt(dec)]);
                values.push(res.value);
                last = Some((scene, res));
            }
            let decreases: Vec<f64> = values.windows(2).map(|w| 1.0 - w[1] / w[0]).collect();
            let worst = decreases.iter().copied().fold(f64::INFINITY, f64::min);
            checks.push(Check::oracle(
                "decrease per refinement",
                worst >= *min_decrease,
                worst,
                *min_decrease,
                format!("decreases {:?}", decreases.iter().map(|d| format!("{d:.4}")).collect::<Vec<_>>()),
            ));
            let (scene, res) = last.expect("at least two levels");
            Ok(Outcome {
                summary: json!({ "values": values, "decreases": decreases }),
                checks,
                figure: density_figure(&scene, &res),
                infeasible: res.infeasible,
                table,
                timings: timer.0,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// covering

fn kind_name(k: LinearKind) -> &'static str {
    match k {
        LinearKind::Identity => "identity",
        LinearKind::Stretch => "stretch",
        LinearKind::RotationScale => "rotation_scale",
    }
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn run_covering(p: &CoveringParams, seed: u64) -> Result<Outcome> {
    let mut timer = Timer(Vec::new());
    let mut combos = Vec::new();
    let mut skipped = Vec::new();
    for &k in &p.maps {
        for &m in &p.constants {
            if m >= k.min_constant() {
                combos.push((k, m));
            } else {
                skipped.push(json!({"map": kind_name(k), "m": m, "needs": k.min_constant()}));
            }
        }
    }
    let mut table = Table::new(&[
        "family", "map", "m", "seed", "regions", "pairs", "achieved_m", "union", "image", "domain_disjoint", "range_disjoint",
        "yolks_inside",
    ]);
    let mut achieved: BTreeMap<(usize, u64), Vec<f64>> = BTreeMap::new();
    let mut failures = Vec::new();
    // Families passing union, image, domain-disjoint, range-disjoint, yolks-inside.
    let mut held = [0usize; 5];
    let mut figure = None;
    let started = Instant::now();
    for i in 0..p.families {
        let (k, m) = combos[i % combos.len()];
        let s = seed.wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(i as u64 + 1));
        let fam = random_family(k, m, p.regions, p.grid, s)?;
        let cover = egg_yolk_cover(&fam)?;
        let chk = verify_cover(&fam, &cover);
        if !chk.all() {
            failures.push(i);
        }
        for (h, ok) in held.iter_mut().zip([chk.union_equal, chk.image_ok, chk.domain_disjoint, chk.range_disjoint, chk.yolks_inside]) {
            *h += ok as usize;
        }
        let map_index = p.maps.iter().position(|&x| x == k).unwrap();
        achieved.entry((map_index, m.to_bits())).or_default().push(cover.achieved_m);
        table.push(vec![
            i.to_string(),
            kind_name(k).into(),
            num(m),
            s.to_string(),
            fam.pairs.len().to_string(),
            cover.pairs.len().to_string(),
            num(cover.achieved_m),
            chk.union_equal.to_string(),
            chk.image_ok.to_string(),
            chk.domain_disjoint.to_string(),
            chk.range_disjoint.to_string(),
            chk.yolks_inside.to_string(),
        ]);
        if figure.is_none() && !cover.pairs.is_empty() {
            let mut svg = Svg::new(Point::new2(0.0, 0.0), Point::new2(1.0, 1.0), 480.0);
            for pair in &fam.pairs {
                let pts: Vec<Point> = pair.domain.ones().map(|j| fam.samples.domain[j]).collect();
                svg.dots(&pts, 0.8, "#bbbbbb");
            }
            for c in &cover.pairs {
                svg.circle(&c.yolk.center, c.yolk.radius, "#b2182b", "none");
            }
            figure = Some(svg.finish());
        }
    }
    timer.0.push(("covers".into(), started.elapsed().as_secs_f64()));

    let mut medians = Vec::new();
    let mut monotone = true;
    for (mi, &k) in p.maps.iter().enumerate() {
        let mut prev: Option<f64> = None;
        let mut ms: Vec<f64> = p.constants.clone();
        ms.sort_by(f64::total_cmp);
        for m in ms {
            let Some(v) = achieved.get_mut(&(mi, m.to_bits())) else { continue };
            let med = median(v);
            if let Some(pm) = prev {
                monotone &= med >= pm;
            }
            prev = Some(med);
            medians.push(json!({"map": kind_name(k), "m": m, "median_achieved_m": med, "runs": v.len()}));
        }
    }
    let passed = p.families - failures.len();
    let names = ["union equality", "image correspondence", "domain yolks disjoint", "range yolks disjoint", "2B inside D"];
    let mut checks: Vec<Check> = names
        .iter()
        .zip(held)
        .map(|(n, h)| Check::invariant(n, h == p.families, format!("{h}/{} families", p.families)))
        .collect();
    let verified: serde_json::Map<String, Value> = names
        .iter()
        .zip(held)
        .map(|(n, h)| (n.to_string(), json!(if h == p.families { "verified" } else { "violated" })))
        .collect();
    checks.push(
        Check::oracle(
            "medians monotone in M",
            monotone,
            if monotone { 1.0 } else { 0.0 },
            1.0,
            "median achieved constant is nondecreasing in M for every map",
        ),
    );
    Ok(Outcome {
        summary: json!({
            "families": p.families, "passed": passed, "failed": failures, "postconditions": verified, "medians": medians,
            "skipped_combinations": skipped,
        }),
        checks,
        table,
        figure,
        infeasible: false,
        timings: timer.0,
    })
}

// ---------------------------------------------------------------------------
// distortion

fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

pub fn build_map(map: &MapSpec, s: &Sampling, base: &Path) -> Result<SampledMap> {
    Ok(match map {
        MapSpec::Identity => SampledMap::on_cube(2, s.nodes, s.lo, s.hi, |p| *p)?,
        MapSpec::Linear { matrix: a } => {
            let a = *a;
            SampledMap::on_cube(2, s.nodes, s.lo, s.hi, move |p| {
                Point::new2(a[0][0] * p.x() + a[0][1] * p.y(), a[1][0] * p.x() + a[1][1] * p.y())
            })?
        }
        MapSpec::SegmentCusp { alpha, half_length } => {
            let (al, hl) = (*alpha, *half_length);
            SampledMap::on_cube(2, s.nodes, s.lo, s.hi, move |p| {
                let phi = 1.0 - smoothstep((p.x().abs() - hl) / hl);
                let y = p.y();
                Point::new2(p.x(), y + phi * (y.signum() * y.abs().powf(al) - y))
            })?
        }
        MapSpec::Csv { path } => {
            let p = base.join(path);
            let f = std::fs::File::open(&p).with_context(|| format!("opening map samples {}", p.display()))?;
            SampledMap::from_csv(f)?
        }
    })
}

fn run_distortion(p: &DistortionParams, tol: f64, base: &Path) -> Result<Outcome> {
    let mut timer = Timer(Vec::new());
    match p {
        DistortionParams::Probes { map, sampling, probes, probe_box, ladder, eccentric_radii, expect, accuracy } => {
            let f = build_map(map, sampling, base)?;
            let opts = EccentricOptions::default();
            let mut table = Table::new(&["x", "y", "h", "e", "e_radius", "e_family"]);
            let (mut hs, mut es) = (Vec::new(), Vec::new());
            let started = Instant::now();
            for j in 0..*probes {
                for i in 0..*probes {
                    let t = |k: usize| if *probes == 1 { 0.5 } else { k as f64 / (*probes - 1) as f64 };
                    let x = Point::new2(
                        probe_box[0] + t(i) * (probe_box[1] - probe_box[0]),
                        probe_box[0] + t(j) * (probe_box[1] - probe_box[0]),
                    );
                    let h = metric_distortion(&f, &x, ladder)?.h;
                    let ladder_e = eccentric_distortion_ladder(&f, &x, eccentric_radii, &opts)?;
                    let fine = ladder_e.last().expect("nonempty ladder");
                    table.push(vec![
                        num(x.x()),
                        num(x.y()),
                        num(h),
                        num(fine.value),
                        num(fine.r),
                        format!("{:?}", fine.best.family).to_lowercase(),
                    ]);
                    hs.push(h);
                    es.push(fine.value);
                }
            }
            timer.0.push(("probes".into(), started.elapsed().as_secs_f64()));
            let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
            let mut checks = vec![Check::invariant(
                "distortions are at least 1",
                min(&hs) >= 1.0 - 1e-9 && min(&es) >= 1.0 - 1e-9,
                format!("min H {:.6}, min E {:.6}", min(&hs), min(&es)),
            )];
            if let Some(k) = expect {
                let herr = hs.iter().map(|h| (h / k - 1.0).abs()).fold(0.0, f64::max);
                checks.push(Check::oracle(
                    "metric distortion",
                    herr <= *accuracy,
                    herr,
                    *accuracy,
                    format!("H in [{:.5}, {:.5}], expected {k}", min(&hs), max(&hs)),
                ));
                let elimit = k * (1.0 + accuracy);
                checks.push(Check::oracle(
                    "eccentric distortion",
                    max(&es) <= elimit,
                    max(&es),
                    elimit,
                    format!("E in [{:.5}, {:.5}]", min(&es), max(&es)),
                ));
            }
            let spread = max(&hs) - min(&hs);
            Ok(Outcome {
                summary: json!({
                    "probes": hs.len(), "h_min": min(&hs), "h_max": max(&hs), "h_spread": spread,
                    "e_min": min(&es), "e_max": max(&es), "search_resolution": opts.resolution,
                }),
                checks,
                table,
                figure: None,
                infeasible: false,
                timings: timer.0,
            })
        }
        DistortionParams::RingQc { map, sampling, center, big_r, ratio, shrink, rings, cells, c2_factor, expect_growth } => {
            let f = build_map(map, sampling, base)?;
            let c = Point::new2(center[0], center[1]);
            let ladder: Vec<Ring> = (0..*rings)
                .map(|k| {
                    let big = big_r / shrink.powi(k as i32);
                    Ring { center: c, r: big / ratio, big_r: big }
                })
                .collect();
            let c1 = ring_modulus_exact(2, 1.0, *ratio)?;
            let opts = RingQcOptions { cells: *cells, solver: SolverOptions::with_tol(tol) };
            let rep = timer.time("rings", || ring_qc_test(&f, &ladder, c1, &opts))?;
            let mut table = Table::new(&["ring", "r", "big_r", "input_modulus", "image_modulus", "gap", "error"]);
            for (k, row) in rep.rows.iter().enumerate() {
                table.push(vec![
                    k.to_string(),
                    num(row.ring.r),
                    num(row.ring.big_r),
                    num(row.input_modulus),
                    opt(row.image_modulus),
                    opt(row.gap),
                    row.error.clone().unwrap_or_default(),
                ]);
            }
            let ran = rep.rows.iter().filter(|r| r.image_modulus.is_some()).count();
            let mut checks = vec![Check::oracle(
                "every ring solved",
                ran == rep.rows.len(),
                ran as f64,
                rep.rows.len() as f64,
                "rings with a computed image modulus",
            )];
            if let Some(k) = c2_factor {
                let limit = k * c1 + 2.0 * tol * c1;
                checks.push(Check::oracle(
                    "image moduli bounded",
                    rep.c2_observed <= limit,
                    rep.c2_observed,
                    limit,
                    format!("C1 = {c1:.6}; limit = {k} C1 + 2 tol C1"),
                ));
            }
            let image: Vec<f64> = rep.rows.iter().filter_map(|r| r.image_modulus).collect();
            if *expect_growth {
                let grows = image.len() >= 2 && image.windows(2).all(|w| w[1] > w[0]);
                let factor = if image.len() >= 2 { image[image.len() - 1] / image[0] } else { f64::NAN };
                checks.push(Check::oracle(
                    "image moduli grow as rings shrink",
                    grows,
                    factor,
                    1.0,
                    "observed is last/first image modulus",
                ));
            }
            let figure = (image.len() >= 2).then(|| {
                let top = image.iter().copied().fold(c1, f64::max) * 1.1;
                let n = image.len() as f64;
                let mut svg = Svg::new(Point::new2(-0.5, 0.0), Point::new2(n - 0.5, top), 480.0);
                let pts: Vec<Point> = image.iter().enumerate().map(|(i, &v)| Point::new2(i as f64, v)).collect();
                svg.polyline(&pts, "#2166ac", false);
                svg.dots(&pts, 3.0, "#2166ac");
                svg.polyline(&[Point::new2(-0.5, c1), Point::new2(n - 0.5, c1)], "#b2182b", false);
                svg.finish()
            });
            Ok(Outcome {
                summary: json!({ "c1": c1, "c2_observed": rep.c2_observed, "rings": rep.rows.len(), "solved": ran }),
                checks,
                table,
                figure,
                infeasible: false,
                timings: timer.0,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// quasihyperbolic

pub fn build_domain(d: &DomainShape) -> Result<PolygonDomain> {
    let pts = |v: &[[f64; 2]]| v.iter().map(|p| Point::new2(p[0], p[1])).collect::<Vec<_>>();
    Ok(match d {
        DomainShape::Disk { center, r, sides } => PolygonDomain::disk(Point::new2(center[0], center[1]), *r, *sides)?,
        DomainShape::Rectangle { lo, hi } => PolygonDomain::rectangle(lo[0], lo[1], hi[0], hi[1])?,
        DomainShape::ExponentialCusp { samples } => PolygonDomain::exponential_cusp(*samples)?,
        DomainShape::Comb { teeth, width, depth } => PolygonDomain::comb(*teeth, *width, *depth)?,
        DomainShape::Polygon { outer, holes } => {
            let mut loops = vec![pts(outer)];
            loops.extend(holes.iter().map(|h| pts(h)));
            PolygonDomain::new(loops)?
        }
    })
}

fn domain_svg(dom: &PolygonDomain) -> Svg {
    let (lo, hi) = dom.bbox();
    let pad = 0.02 * (hi.x() - lo.x()).max(hi.y() - lo.y());
    let mut svg = Svg::new(Point::new2(lo.x() - pad, lo.y() - pad), Point::new2(hi.x() + pad, hi.y() + pad), 560.0);
    for l in dom.loops() {
        svg.polyline(l, "#000000", true);
    }
    svg
}

fn run_qh(p: &QhParams) -> Result<Outcome> {
    let mut timer = Timer(Vec::new());
    match p {
        QhParams::Distance { domain, from, to, cells, whitney_depth, accuracy } => {
            let dom = build_domain(domain)?;
            let (a, b) = (Point::new2(from[0], from[1]), Point::new2(to[0], to[1]));
            let path = timer.time("distance", || qh_distance(&dom, &a, &b, &QhOptions { cells: *cells }))?;
            let w = timer.time("whitney", || whitney_decompose(&dom, *whitney_depth))?;
            let wc = &w.check;
            let mut checks = vec![
                Check::invariant(
                    "whitney distance bounds",
                    wc.distance_ok == wc.cubes,
                    format!("{}/{} cubes with diam <= dist <= 4 diam", wc.distance_ok, wc.cubes),
                ),
                Check::invariant(
                    "whitney neighbour ratio",
                    wc.ratio_ok == wc.adjacent_pairs,
                    format!("{}/{} adjacent pairs with side ratio in [1/4, 4]; max {}", wc.ratio_ok, wc.adjacent_pairs, wc.max_ratio),
                ),
                Check::invariant("whitney cubes disjoint", wc.disjoint, "interiors pairwise disjoint"),
            ];
            if let DomainShape::Disk { center, r, .. } = domain {
                if a.dist(&Point::new2(center[0], center[1])) == 0.0 && !path.infeasible {
                    let t = b.dist(&a);
                    let exact = (r / (r - t)).ln();
                    let err = (path.value / exact - 1.0).abs();
                    checks.push(Check::oracle(
                        "radial distance",
                        err <= *accuracy,
                        err,
                        *accuracy,
                        format!("value {:.6} vs log(r/(r-|x|)) = {exact:.6}", path.value),
                    ));
                }
            }
            let mut table = Table::new(&["level", "x0", "y0", "side", "dist"]);
            for c in &w.cubes {
                table.push(vec![c.level.to_string(), num(c.lo[0]), num(c.lo[1]), num(c.side), num(c.dist)]);
            }
            let mut svg = domain_svg(&dom);
            for c in &w.cubes {
                let (lo, hi) = c.corners();
                svg.rect(&lo, &hi, "none", Some("#9e9e9e"));
            }
            if let Some(g) = &path.geodesic {
                svg.polyline(g.vertices(), "#b2182b", false);
            }
            Ok(Outcome {
                summary: json!({
                    "value": path.value, "infeasible": path.infeasible, "cubes": w.cubes.len(),
                    "truncated": w.truncated, "level_counts": w.level_counts(), "max_neighbour_ratio": wc.max_ratio,
                }),
                checks,
                table,
                figure: Some(svg.finish()),
                infeasible: path.infeasible,
                timings: timer.0,
            })
        }
        QhParams::ShadowSum { domain, base, levels, expect } => {
            let dom = build_domain(domain)?;
            let x0 = Point::new2(base[0], base[1]);
            let rows = timer.time("levels", || shadow_sum_diagnostic(&dom, &x0, levels))?;
            let mut table = Table::new(&["depth", "cells", "cubes", "truncated", "lhs", "rhs", "ratio", "unreached_cells"]);
            for r in &rows {
                table.push(vec![
                    r.depth.to_string(),
                    r.cells.to_string(),
                    r.cubes.to_string(),
                    r.truncated.to_string(),
                    num(r.lhs),
                    num(r.rhs),
                    num(r.ratio),
                    r.unreached_cells.to_string(),
                ]);
            }
            let finite = rows.iter().all(|r| r.ratio.is_finite() && r.ratio > 0.0);
            let mut checks = vec![Check::invariant("ratios finite and positive", finite, "every level")];
            let (first, last) = (&rows[0], &rows[rows.len() - 1]);
            match *expect {
                ShadowExpectation::Stable { factor } => {
                    let worst = rows
                        .windows(2)
                        .map(|w| (w[1].ratio / w[0].ratio).max(w[0].ratio / w[1].ratio))
                        .fold(1.0, f64::max);
                    checks.push(Check::oracle("ratio stable", worst <= factor, worst, factor, "largest change between levels"));
                }
                ShadowExpectation::RhsOutgrows { factor } => {
                    let g_l = (last.lhs / first.lhs).ln();
                    let g_r = (last.rhs / first.rhs).ln();
                    let rate = g_r / g_l;
                    checks.push(Check::oracle(
                        "rhs outgrows lhs",
                        g_r >= factor * g_l && g_r > 0.0,
                        rate,
                        factor,
                        format!("log growth lhs {g_l:.4}, rhs {g_r:.4}"),
                    ));
                }
                ShadowExpectation::None => {}
            }
            Ok(Outcome {
                summary: serde_json::to_value(&rows)?,
                checks,
                table,
                figure: Some(domain_svg(&dom).finish()),
                infeasible: false,
                timings: timer.0,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// sets

fn qp(p: &[f64; 2]) -> QPoint {
    QPoint::from_f64(p[0], p[1])
}

pub fn build_set(s: &SetSpec) -> Result<SetModel> {
    Ok(match s {
        SetSpec::Circle { center, r, sides } => circle_curve(center[0], center[1], *r, *sides),
        SetSpec::FatCantorStrip { a, b, y0, y1, depth } => fat_cantor_strip(q(*a), q(*b), q(*y0), q(*y1), *depth)?,
        SetSpec::CantorStrip { y0, y1, depth } => {
            let c = make_cantor_set(CantorSpec::middle_thirds(*depth))?;
            let i = SetModel::Intervals(IntervalSet::new(vec![(q(*y0), q(*y1))])?);
            product_set(c, i)?
        }
        SetSpec::Points { points } => SetModel::Primitives(Primitives::from_points(points.iter().map(qp).collect())),
        SetSpec::Segments { segments } => {
            SetModel::Primitives(Primitives::from_segments(segments.iter().map(|[a, b]| [qp(a), qp(b)]).collect()))
        }
    })
}

/// `H^1` of sets with finite length.
fn length_of(s: &SetSpec) -> Option<f64> {
    let d = |a: &[f64; 2], b: &[f64; 2]| (a[0] - b[0]).hypot(a[1] - b[1]);
    match s {
        SetSpec::Segments { segments } => Some(segments.iter().map(|[a, b]| d(a, b)).sum()),
        SetSpec::Points { .. } => Some(0.0),
        SetSpec::Circle { r, sides, .. } => Some(*sides as f64 * 2.0 * r * (std::f64::consts::PI / *sides as f64).sin()),
        SetSpec::FatCantorStrip { .. } | SetSpec::CantorStrip { .. } => None,
    }
}

fn scene_figure(scene: &GridScene) -> String {
    let vals: Vec<Option<f64>> = (0..scene.lattice.len())
        .map(|i| {
            if scene.obstacle[i] {
                Some(0.0)
            } else if scene.f1[i] {
                Some(0.55)
            } else if scene.f2[i] {
                Some(0.8)
            } else if scene.u[i] {
                Some(1.0)
            } else {
                None
            }
        })
        .collect();
    heatmap(&scene.lattice, &vals, 560.0)
}

fn run_probe(p: &ProbeParams, tol: f64, base: &Path) -> Result<Outcome> {
    let mut timer = Timer(Vec::new());
    let e = build_set(&p.set)?;
    let scene = build_scene(&p.scene, base)?;
    let opts = ProbeOptions { rule: p.rule, solver: SolverOptions::with_tol(tol) };
    let rep = timer.time("probe", || cned_probe(&e, &scene, &p.budgets, &opts))?;
    let mut table = Table::new(&["mode", "k", "value", "ratio_to_full"]);
    table.push(vec!["full".into(), String::new(), num(rep.mod_full), "1".into()]);
    table.push(vec!["avoid".into(), String::new(), num(rep.mod_avoid), num(rep.mod_avoid / rep.mod_full)]);
    for b in &rep.mod_budget {
        table.push(vec!["budget".into(), b.k.to_string(), num(b.value), num(b.value / rep.mod_full)]);
    }
    let defect = rep.ordering_defect();
    let mut checks = vec![Check::invariant(
        "avoid <= budget(K) <= full",
        defect <= 2.0 * tol,
        format!("largest relative ordering defect {defect:.2e} (allowed 2 tol)"),
    )];
    let budget = |k: u32| rep.mod_budget.iter().find(|b| b.k == k).map(|b| b.value);
    match p.expect {
        Signature::Separating { k, min_fraction } => {
            checks.push(Check::oracle(
                "avoiding is infeasible",
                rep.avoid_infeasible && rep.mod_avoid == 0.0,
                rep.mod_avoid,
                0.0,
                "no path avoids the set",
            ));
            let frac = budget(k).unwrap_or(f64::NAN) / rep.mod_full;
            checks.push(Check::oracle(
                &format!("budget({k}) near full"),
                frac >= min_fraction,
                frac,
                min_fraction,
                "budget value over full modulus",
            ));
        }
        Signature::NonRemovable { max_k, max_fraction } => {
            let worst = rep
                .mod_budget
                .iter()
                .filter(|b| b.k <= max_k)
                .map(|b| b.value / rep.mod_full)
                .fold(0.0, f64::max);
            checks.push(Check::oracle(
                &format!("budget(K) small for K <= {max_k}"),
                worst <= max_fraction,
                worst,
                max_fraction,
                "largest budget value over full modulus",
            ));
        }
        Signature::Negligible => {
            let frac = rep.mod_avoid / rep.mod_full;
            let floor = 1.0 - 2.0 * tol;
            checks.push(Check::oracle("avoid equals full", frac >= floor, frac, floor, "avoid value over full modulus"));
        }
        Signature::None => {}
    }
    let mut probed = scene.clone();
    probed.obstacle = e.rasterize(&scene.lattice, p.rule)?;
    Ok(Outcome {
        summary: serde_json::to_value(&rep)?,
        checks,
        table,
        figure: (scene.dim() == 2).then(|| scene_figure(&probed)),
        infeasible: false,
        timings: timer.0,
    })
}

// ---------------------------------------------------------------------------
// survey

fn build_curve(c: &CurveSpec) -> Result<PolyCurve> {
    let v: Vec<Point> = match c {
        CurveSpec::Polyline { points } => points.iter().map(|p| Point::new2(p[0], p[1])).collect(),
        CurveSpec::Circle { center, r, sides } => (0..=*sides)
            .map(|i| {
                let a = TAU * (i % sides) as f64 / *sides as f64;
                Point::new2(center[0] + r * a.cos(), center[1] + r * a.sin())
            })
            .collect(),
    };
    Ok(PolyCurve::new(v)?)
}

fn run_survey(p: &SurveyParams, seed: u64) -> Result<Outcome> {
    let mut timer = Timer(Vec::new());
    let e = build_set(&p.set)?;
    let gamma = build_curve(&p.curve)?;
    let sv = timer.time("survey", || translation_survey(&e, &gamma, p.n_max, p.samples, seed))?;
    let mut table = Table::new(&["n", "measure", "ci", "n_times_measure"]);
    let mut worst: f64 = 0.0;
    for r in &sv.rows {
        worst = worst.max(r.n as f64 * r.measure);
        table.push(vec![r.n.to_string(), num(r.measure), num(r.ci), num(r.n as f64 * r.measure)]);
    }
    table.push(vec!["inf".into(), num(sv.infinite.measure), num(sv.infinite.ci), String::new()]);
    let monotone = sv.rows.windows(2).all(|w| w[1].measure <= w[0].measure);
    let mut checks = vec![Check::invariant("m(F_N) nonincreasing in N", monotone, "F_{N+1} is a subset of F_N")];
    match length_of(&p.set) {
        Some(h1) => {
            let limit = p.factor * sv.curve_length * h1;
            checks.push(Check::oracle(
                "N m(F_N) bounded",
                worst <= limit,
                worst,
                limit,
                format!("length(γ) = {:.6}, H1(E) = {h1:.6}, factor {}", sv.curve_length, p.factor),
            ));
        }
        None => {}
    }
    let (lo, hi) = e.bbox().ok_or_else(|| anyhow!("empty set"))?;
    let ((x0, y0), (x1, y1)) = (lo.to_f64(), hi.to_f64());
    let v = gamma.vertices();
    let gx = v.iter().map(|p| p.x()).fold(f64::NEG_INFINITY, f64::max) - v.iter().map(|p| p.x()).fold(f64::INFINITY, f64::min);
    let gy = v.iter().map(|p| p.y()).fold(f64::NEG_INFINITY, f64::max) - v.iter().map(|p| p.y()).fold(f64::INFINITY, f64::min);
    let pad = gx.max(gy).max(0.05);
    let mut svg = Svg::new(Point::new2(x0 - pad, y0 - pad), Point::new2(x1 + pad, y1 + pad), 480.0);
    if let SetSpec::Segments { segments } = &p.set {
        for [a, b] in segments {
            svg.polyline(&[Point::new2(a[0], a[1]), Point::new2(b[0], b[1])], "#000000", false);
        }
    }
    svg.polyline(v, "#b2182b", false);
    Ok(Outcome {
        summary: serde_json::to_value(&sv)?,
        checks,
        table,
        figure: Some(svg.finish()),
        infeasible: false,
        timings: timer.0,
    })
}
