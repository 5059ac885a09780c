//! Curve families and the discrete conformal modulus.

pub mod analytic;
mod graph;
pub mod scene;
pub mod solver;
pub mod survey;

pub use analytic::{
    admissible_check, rectangle_modulus, ring_modulus_exact, sphere_area, square_ring_lower_bound, AdmissibilityReport,
};
pub use scene::{CellRole, CurveConstraint, GridScene};
pub use solver::{discrete_modulus, GridPath, ModulusResult, SolverOptions};
pub use survey::{avg_line_integral, radial_survey, translation_survey, Estimate, RadialSurvey, SurveyRow, TranslationSurvey};
