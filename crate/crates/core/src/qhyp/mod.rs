//! Quasihyperbolic metric: Whitney decompositions, distances and shadows.

mod domain;
mod metric;
mod shadow;
mod whitney;

pub use domain::{DomainSpec, PolygonDomain};
pub use metric::{qh_distance, qh_distances, qh_field, QhField, QhGraph, QhOptions, QhPath};
pub use shadow::{shadow_sum_diagnostic, shadows, ShadowLevel, ShadowRecord, ShadowSum, Shadows};
pub use whitney::{whitney_decompose, WhitneyCheck, WhitneyCube, WhitneyDecomposition};
