use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::geom::Point;
use crate::grid::Lattice;
use crate::modfam::{CurveConstraint, GridScene};

/// Set cells as `[start, length]` runs in lattice index order.
pub fn encode_runs(mask: &FixedBitSet) -> Vec<[usize; 2]> {
    let mut runs: Vec<[usize; 2]> = Vec::new();
    for i in mask.ones() {
        match runs.last_mut() {
            Some(r) if r[0] + r[1] == i => r[1] += 1,
            _ => runs.push([i, 1]),
        }
    }
    runs
}

pub fn decode_runs(runs: &[[usize; 2]], len: usize) -> Result<FixedBitSet> {
    let mut m = FixedBitSet::with_capacity(len);
    for &[s, l] in runs {
        if s.checked_add(l).map_or(true, |e| e > len) {
            return domain(format!("run [{s}, {l}] exceeds the {len} lattice cells"));
        }
        m.insert_range(s..s + l);
    }
    Ok(m)
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SceneMasks {
    pub u: Vec<[usize; 2]>,
    pub f1: Vec<[usize; 2]>,
    pub f2: Vec<[usize; 2]>,
    #[serde(default)]
    pub obstacle: Vec<[usize; 2]>,
}

/// Scene file: lattice geometry, run-length encoded masks and the constraint.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SceneFile {
    pub dimension: usize,
    pub shape: [usize; 3],
    pub origin: [f64; 3],
    pub spacing: f64,
    pub masks: SceneMasks,
    #[serde(default = "unconstrained")]
    pub constraint: CurveConstraint,
}

fn unconstrained() -> CurveConstraint {
    CurveConstraint::Unconstrained
}

impl SceneFile {
    pub fn from_scene(s: &GridScene, constraint: CurveConstraint) -> Self {
        SceneFile {
            dimension: s.lattice.dim,
            shape: s.lattice.shape,
            origin: s.lattice.origin.0,
            spacing: s.lattice.spacing,
            masks: SceneMasks {
                u: encode_runs(&s.u),
                f1: encode_runs(&s.f1),
                f2: encode_runs(&s.f2),
                obstacle: encode_runs(&s.obstacle),
            },
            constraint,
        }
    }

    pub fn to_scene(&self) -> Result<GridScene> {
        let lattice = Lattice::new(self.dimension, self.shape, Point(self.origin), self.spacing)?;
        let n = lattice.len();
        let s = GridScene {
            u: decode_runs(&self.masks.u, n)?,
            f1: decode_runs(&self.masks.f1, n)?,
            f2: decode_runs(&self.masks.f2, n)?,
            obstacle: decode_runs(&self.masks.obstacle, n)?,
            lattice,
        };
        s.validate()?;
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn runs_round_trip() {
        let mut m = FixedBitSet::with_capacity(20);
        for i in [0, 1, 2, 5, 7, 8, 19] {
            m.insert(i);
        }
        let r = encode_runs(&m);
        assert_eq!(r, vec![[0, 3], [5, 1], [7, 2], [19, 1]]);
        assert_eq!(decode_runs(&r, 20).unwrap(), m);
        assert!(decode_runs(&[[18, 3]], 20).is_err());
    }

    #[test]
    fn scene_round_trip() {
        let s = GridScene::annulus(2, 1.0, 2.0, 24).unwrap();
        let f = SceneFile::from_scene(&s, CurveConstraint::Budget(2));
        let json = serde_json::to_string(&f).unwrap();
        let back: SceneFile = serde_json::from_str(&json).unwrap();
        let t = back.to_scene().unwrap();
        assert_eq!((t.u, t.f1, t.f2), (s.u, s.f1, s.f2));
        assert_eq!(back.constraint, CurveConstraint::Budget(2));
    }
}
