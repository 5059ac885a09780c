//! Scene files with run-length encoded masks, and SVG figures.

mod scene;
mod svg;

pub use scene::{decode_runs, encode_runs, SceneFile, SceneMasks};
pub use svg::{heatmap, ramp, Svg};
