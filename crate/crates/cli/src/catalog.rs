//! Bundled experiment configs.

use exdist::cover::LinearKind;
use exdist::qhyp::ShadowLevel;
use exdist::sets::RasterRule;

use crate::config::*;

fn cfg(name: &str, anchor: &str, description: &str, params: Params, seed: Option<u64>) -> ExperimentConfig {
    ExperimentConfig {
        name: name.into(),
        description: description.into(),
        anchor: anchor.into(),
        params,
        seed,
        output: None,
        tolerance: DEFAULT_TOLERANCE,
    }
}

/// Ten disjoint unit segments at assorted angles, one per cell of a 5 x 2
/// grid of pitch 1.25 (centres more than a unit apart).
pub fn ten_segments() -> Vec<[[f64; 2]; 2]> {
    (0..10)
        .map(|i| {
            let a = 0.3 + 0.61 * i as f64;
            let (c, s) = (a.cos(), a.sin());
            let cx = 0.625 + 1.25 * (i % 5) as f64;
            let cy = 0.625 + 1.25 * (i / 5) as f64;
            [[cx - 0.5 * c, cy - 0.5 * s], [cx + 0.5 * c, cy + 0.5 * s]]
        })
        .collect()
}

pub fn catalog() -> Vec<ExperimentConfig> {
    let e = std::f64::consts::E;
    let stretch = MapSpec::Linear { matrix: [[2.0, 0.0], [0.0, 1.0]] };
    let sampling = Sampling { nodes: 201, lo: -1.0, hi: 1.0 };
    vec![
        cfg(
            "annulus-2d",
            "ring modulus ω_{n-1} (log R/r)^{1-n}",
            "Planar ring 1 < |x| < e at 128 and 256 cells: modulus within 10% of 2π, error shrinking under refinement.",
            Params::Modulus(ModulusParams::Refine {
                scene: SceneSpec::Annulus { dim: 2, r: 1.0, big_r: e, cells: 256 },
                levels: vec![128, 256],
                constraint: ConstraintSpec::Unconstrained,
                accuracy: 0.1,
            }),
            None,
        ),
        cfg(
            "ring-reciprocal",
            "modulus of families supported in disjoint sets; log-additivity of the ring modulus",
            "Rings (1,7), (7,49) and (1,49) at 256 cells: 2π/md of the composite ring equals the sum over the parts.",
            Params::Modulus(ModulusParams::Reciprocal { radii: vec![1.0, 7.0, 49.0], cells: 256 }),
            None,
        ),
        cfg(
            "square-ring",
            "square ring bound md ≥ (1/4) log(R/r)",
            "Square ring between half-sides 1 and 4, slit to slit: modulus at least log(4)/4.",
            Params::Modulus(ModulusParams::Solve {
                scene: SceneSpec::SquareRing { r: 1.0, big_r: 4.0, cells: 128 },
                constraint: ConstraintSpec::Unconstrained,
                accuracy: 0.1,
            }),
            None,
        ),
        cfg(
            "rectangle",
            "extremal length of a rectangle",
            "2 x 1 rectangle joining the short sides: modulus within 10% of 1/2.",
            Params::Modulus(ModulusParams::Solve {
                scene: SceneSpec::Rectangle { length: 2.0, width: 1.0, cells: 128 },
                constraint: ConstraintSpec::Unconstrained,
                accuracy: 0.1,
            }),
            None,
        ),
        cfg(
            "eggyolk-random",
            "egg-yolk covering lemma",
            "200 random disk families under identity, diag(2,1) and rotation-scale maps with M in {2,4,8}: covering postconditions and monotone medians.",
            Params::Covering(CoveringParams {
                maps: vec![LinearKind::Identity, LinearKind::Stretch, LinearKind::RotationScale],
                constants: vec![2.0, 4.0, 8.0],
                families: 200,
                regions: 12,
                grid: 48,
            }),
            Some(20_240_601),
        ),
        cfg(
            "eggyolk-empty",
            "egg-yolk covering lemma",
            "Covering of a family with no regions: the empty covering.",
            Params::Covering(CoveringParams {
                maps: vec![LinearKind::Identity],
                constants: vec![4.0],
                families: 1,
                regions: 0,
                grid: 16,
            }),
            Some(1),
        ),
        cfg(
            "covering-stretch",
            "egg-yolk covering lemma",
            "30 random disk families under diag(2,1) with M = 4: all covering postconditions verified.",
            Params::Covering(CoveringParams {
                maps: vec![LinearKind::Stretch],
                constants: vec![4.0],
                families: 30,
                regions: 12,
                grid: 48,
            }),
            Some(30),
        ),
        cfg(
            "empty-family",
            "modulus of the empty curve family",
            "Rectangle cut by a full wall: no curve joins the ends, modulus 0 and flagged infeasible.",
            Params::Modulus(ModulusParams::Solve {
                scene: SceneSpec::Split { length: 2.0, width: 1.0, cells: 32 },
                constraint: ConstraintSpec::Unconstrained,
                accuracy: 0.1,
            }),
            None,
        ),
        cfg(
            "point-null",
            "curves through a point form a null family",
            "Annulus paths forced through one cell of a separating wall, at 64, 128 and 256 cells: values should drop by 30% per doubling.",
            Params::Modulus(ModulusParams::Decay {
                scene: SceneSpec::Pinhole { r: 1.0, big_r: 4.0, cells: 64 },
                levels: vec![64, 128, 256],
                constraint: ConstraintSpec::Avoid,
                min_decrease: 0.3,
            }),
            None,
        ),
        cfg(
            "distortion-stretch",
            "metric distortion H_f and eccentric distortion E_f",
            "diag(2,1) at 25 probe points: metric distortion 2 within 5%, eccentric distortion at most 2.1.",
            Params::Distortion(DistortionParams::Probes {
                map: stretch.clone(),
                sampling: sampling.clone(),
                probes: 5,
                probe_box: [-0.4, 0.4],
                ladder: vec![0.2, 0.1, 0.05],
                eccentric_radii: vec![0.15, 0.1],
                expect: Some(2.0),
                accuracy: 0.05,
            }),
            None,
        ),
        cfg(
            "distortion-identity",
            "metric distortion H_f and eccentric distortion E_f",
            "Identity at 25 probe points: both distortions equal 1 within the search resolution.",
            Params::Distortion(DistortionParams::Probes {
                map: MapSpec::Identity,
                sampling: sampling.clone(),
                probes: 5,
                probe_box: [-0.4, 0.4],
                ladder: vec![0.2, 0.1, 0.05],
                eccentric_radii: vec![0.15, 0.1],
                expect: Some(1.0),
                accuracy: 1.0 / 16.0,
            }),
            None,
        ),
        cfg(
            "ring-qc",
            "ring criterion md f(Γ(A)) ≤ C2 for rings with md Γ(A) ≤ C1",
            "diag(2,1) on a ladder of 10 rings with R/r = e: image moduli at most 2 C1 + 2 tol C1.",
            Params::Distortion(DistortionParams::RingQc {
                map: stretch,
                sampling: sampling.clone(),
                center: [0.0, 0.0],
                big_r: 0.8,
                ratio: e,
                shrink: 1.25,
                rings: 10,
                cells: 96,
                c2_factor: Some(2.0),
                expect_growth: false,
            }),
            None,
        ),
        cfg(
            "ring-qc-cusp",
            "ring criterion md f(Γ(A)) ≤ C2 for rings with md Γ(A) ≤ C1",
            "Map with a square-root cusp along a segment: image moduli grow as the rings shrink onto the segment.",
            Params::Distortion(DistortionParams::RingQc {
                map: MapSpec::SegmentCusp { alpha: 0.5, half_length: 0.5 },
                sampling: Sampling { nodes: 401, lo: -1.0, hi: 1.0 },
                center: [0.0, 0.0],
                big_r: 0.4,
                ratio: e,
                shrink: 2.0,
                rings: 5,
                cells: 96,
                c2_factor: None,
                expect_growth: true,
            }),
            None,
        ),
        cfg(
            "disk-qh",
            "quasihyperbolic metric; Whitney cube properties",
            "Unit disk, centre to (0, 0.9): quasihyperbolic distance within 5% of log 10; Whitney invariants on every cube.",
            Params::Quasihyperbolic(QhParams::Distance {
                domain: DomainShape::Disk { center: [0.0, 0.0], r: 1.0, sides: 1024 },
                from: [0.0, 0.0],
                to: [0.0, 0.9],
                cells: 256,
                whitney_depth: 8,
                accuracy: 0.05,
            }),
            None,
        ),
        cfg(
            "shadow-sum",
            "shadow sum Σ s(Q)^2 against ∫ k^2",
            "Unit disk: shadow sum over the integral of k^2 stays within a factor 2 across refinement levels.",
            Params::Quasihyperbolic(QhParams::ShadowSum {
                domain: DomainShape::Disk { center: [0.0, 0.0], r: 1.0, sides: 1024 },
                base: [0.01, 0.02],
                levels: vec![ShadowLevel { depth: 6, cells: 64 }, ShadowLevel { depth: 7, cells: 128 }, ShadowLevel { depth: 8, cells: 256 }],
                expect: ShadowExpectation::Stable { factor: 2.0 },
            }),
            None,
        ),
        cfg(
            "shadow-sum-cusp",
            "shadow sum Σ s(Q)^2 against ∫ k^2",
            "Exponential cusp: the integral of k^2 should grow at least twice as fast as the shadow sum.",
            Params::Quasihyperbolic(QhParams::ShadowSum {
                domain: DomainShape::ExponentialCusp { samples: 2000 },
                base: [-0.49, 0.01],
                levels: vec![ShadowLevel { depth: 6, cells: 64 }, ShadowLevel { depth: 7, cells: 128 }, ShadowLevel { depth: 8, cells: 256 }],
                expect: ShadowExpectation::RhsOutgrows { factor: 2.0 },
            }),
            None,
        ),
        cfg(
            "cned-circle",
            "CNED sets through curve families avoiding or crossing the set",
            "Circle separating the boundary components of an annulus: avoiding it is impossible, one crossing recovers 90% of the modulus.",
            Params::SetsProbe(ProbeParams {
                set: SetSpec::Circle { center: [0.0, 0.0], r: 2.0, sides: 512 },
                scene: SceneSpec::Annulus { dim: 2, r: 1.0, big_r: 4.0, cells: 128 },
                budgets: vec![1],
                rule: RasterRule::Diamond,
                expect: Signature::Separating { k: 1, min_fraction: 0.9 },
            }),
            None,
        ),
        cfg(
            "cantor-product-probe",
            "C × [0,1] is not removable",
            "Fat Cantor set times [0,1] across a 2 x 1 rectangle at 256 cells: crossing it within 8 cells keeps at most half the modulus.",
            Params::SetsProbe(ProbeParams {
                set: SetSpec::FatCantorStrip { a: 0.5, b: 1.5, y0: 0.0, y1: 1.0, depth: 8 },
                scene: SceneSpec::Rectangle { length: 2.0, width: 1.0, cells: 256 },
                budgets: vec![1, 2, 4, 8],
                rule: RasterRule::Closure,
                expect: Signature::NonRemovable { max_k: 8, max_fraction: 0.5 },
            }),
            None,
        ),
        cfg(
            "translation-survey",
            "translates meeting E in N points: N m(F_N) ≲ ℓ(γ) H1(E)",
            "Ten unit segments against translates of a circle of radius 1/2: N m(F_N) at most 4 length(γ) H1(E) for N <= 16, 10^5 samples.",
            Params::Survey(SurveyParams {
                set: SetSpec::Segments { segments: ten_segments() },
                curve: CurveSpec::Circle { center: [0.0, 0.0], r: 0.5, sides: 64 },
                n_max: 16,
                samples: 100_000,
                factor: 4.0,
            }),
            Some(7),
        ),
    ]
}

pub fn find(name: &str) -> Option<ExperimentConfig> {
    catalog().into_iter().find(|c| c.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_unique_and_valid() {
        let c = catalog();
        let mut names: Vec<&str> = c.iter().map(|x| x.name.as_str()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), c.len());
        for x in &c {
            x.validate().unwrap_or_else(|e| panic!("{}: {e}", x.name));
            assert_eq!(ExperimentConfig::parse(&x.to_json()).unwrap(), *x);
        }
    }

    #[test]
    fn segments_are_disjoint() {
        let orient = |a: [f64; 2], b: [f64; 2], c: [f64; 2]| (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
        let s = ten_segments();
        for i in 0..s.len() {
            let [a, b] = s[i];
            assert!(((b[0] - a[0]).hypot(b[1] - a[1]) - 1.0).abs() < 1e-12);
            for &[c, d] in &s[i + 1..] {
                let cross = orient(a, b, c) * orient(a, b, d) < 0.0 && orient(c, d, a) * orient(c, d, b) < 0.0;
                assert!(!cross, "segment {i} meets another");
            }
        }
    }
}
