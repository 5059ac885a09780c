use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::geom::Point;

/// Euclidean ball `B(center, radius)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return domain(format!("ball radius must be positive and finite, got {radius}"));
        }
        Ok(Ball { center, radius })
    }

    /// `λB`: same center, radius scaled by `λ`.
    pub fn dilate(&self, lambda: f64) -> Ball {
        Ball { center: self.center, radius: self.radius * lambda }
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.center.dist(p) < self.radius
    }

    pub fn contains_closed(&self, p: &Point) -> bool {
        self.center.dist(p) <= self.radius
    }

    pub fn diameter(&self) -> f64 {
        2.0 * self.radius
    }
}
