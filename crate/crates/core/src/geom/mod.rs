mod ball;
mod content;
mod curve;
mod distance;
mod integral;
mod point;
mod region;

pub use ball::Ball;
pub use content::{content_constant, cube_shape_constant, hausdorff_content, ContentEstimate};
pub use curve::{PolyCurve, PolyCurveRecord};
pub use distance::{relative_distance, segment_distance, set_distance, Continuum};
pub use integral::{line_integral, Density, FnDensity};
pub use point::Point;
pub use region::{eccentricity, hull2, Eccentricity, GridSample, Region};
pub use crate::sets::SetModel;
