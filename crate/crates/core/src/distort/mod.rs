//! Distortion functionals of sampled homeomorphisms and the ring-modulus test.

mod functional;
mod map;
mod ring;

pub use functional::{
    ball_candidates, distance_extremes, eccentric_distortion, eccentric_distortion_ladder, evaluate_ball,
    metric_distortion, pullback_candidates, sphere_points, CandidateFamily, CandidateValue, DistortionProbe,
    EccentricEstimate, EccentricOptions, RadiusValue,
};
pub use map::{Correspondence, Inverted, LinearMap, SampledMap};
pub use ring::{image_ring_scene, ring_qc_test, Ring, RingQcOptions, RingQcReport, RingRow};
