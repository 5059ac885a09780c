//! Exact set models: intervals, Cantor sets, products, planar primitives and
//! packing residuals, with curve-intersection classification and the
//! negligibility probe.

pub mod cantor;
pub mod classify;
pub mod line;
pub mod model;
pub mod planar;
pub mod probe;
pub mod rat;
pub mod shapes;

pub use cantor::{make_cantor, Cantor, CantorSpec, FractionRule};
pub use classify::{curve_intersection_class, ClassReport, IntersectionClass};
pub use line::{Comp, IntervalSet, Tag};
pub use model::{cell_window, make_cantor_set, packing_set, product_set, RasterRule, SetModel, Window};
pub use planar::{packing_residual, Packing, PackingSpec, Polygon, Primitives};
pub use probe::{cned_probe, probe_scene, ProbeOptions, ProbeReport};
pub use rat::{QPoint, Rat, Q};
