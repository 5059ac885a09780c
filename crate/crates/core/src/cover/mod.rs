//! The 5B covering lemma and the egg-yolk covering of paired families.

mod eggyolk;
mod family;
mod five_b;

pub use eggyolk::{
    cluster_constant, egg_yolk_cover, intersecting_yolk_ratio, normalize_comparable, validate_egg_yolk,
    validate_on_samples, verify_cover, CoverCheck, CoverPair, Covering, EggYolkCertificate, EggYolkPair, Normalized,
};
pub use family::{random_family, LinearKind, PairSpec, PairedFamily, Samples, Side};
pub use five_b::{balls_meet, five_b_cover};
