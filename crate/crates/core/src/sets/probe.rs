//! Numeric NED/CNED probe: discrete moduli with the obstacle ignored, avoided,
//! or crossed on a budget.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::modfam::{discrete_modulus, CurveConstraint, GridScene, SolverOptions};
use crate::sets::model::{RasterRule, SetModel};

#[derive(Clone, Debug)]
pub struct ProbeOptions {
    pub rule: RasterRule,
    pub solver: SolverOptions,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions { rule: RasterRule::Closure, solver: SolverOptions::default() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BudgetValue {
    pub k: u32,
    pub value: f64,
    pub gap: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbeReport {
    pub mod_full: f64,
    pub mod_avoid: f64,
    pub avoid_infeasible: bool,
    pub mod_budget: Vec<BudgetValue>,
    pub obstacle_cells: usize,
    /// The rasterized set meets F1 or F2.
    pub touches_marked: bool,
}

impl ProbeReport {
    /// Largest relative violation of `avoid <= budget(K) <= budget(K+1) <= full`,
    /// measured against the full modulus.
    pub fn ordering_defect(&self) -> f64 {
        let mut chain = vec![self.mod_avoid];
        let mut b: Vec<&BudgetValue> = self.mod_budget.iter().collect();
        b.sort_by_key(|x| x.k);
        chain.extend(b.iter().map(|x| x.value));
        chain.push(self.mod_full);
        let scale = self.mod_full.abs().max(f64::MIN_POSITIVE);
        chain.windows(2).map(|w| (w[0] - w[1]).max(0.0) / scale).fold(0.0, f64::max)
    }
}

/// Rasterizes `e` onto the scene and runs the solver under the three constraint modes.
pub fn cned_probe(e: &SetModel, scene: &GridScene, budgets: &[u32], opts: &ProbeOptions) -> Result<ProbeReport> {
    let mut scene = scene.clone();
    scene.obstacle = e.rasterize(&scene.lattice, opts.rule)?;
    probe_scene(&scene, budgets, &opts.solver)
}

/// Same as [`cned_probe`] for a scene whose obstacle mask is already set.
pub fn probe_scene(scene: &GridScene, budgets: &[u32], solver: &SolverOptions) -> Result<ProbeReport> {
    let touches_marked = !scene.obstacle.is_disjoint(&scene.f1) || !scene.obstacle.is_disjoint(&scene.f2);
    let full = discrete_modulus(scene, CurveConstraint::Unconstrained, solver)?;
    let avoid = discrete_modulus(scene, CurveConstraint::Avoid, solver)?;
    let mut mod_budget = Vec::new();
    for &k in budgets {
        let r = discrete_modulus(scene, CurveConstraint::Budget(k), solver)?;
        mod_budget.push(BudgetValue { k, value: r.value, gap: r.gap });
    }
    Ok(ProbeReport {
        mod_full: full.value,
        mod_avoid: avoid.value,
        avoid_infeasible: avoid.infeasible,
        mod_budget,
        obstacle_cells: scene.obstacle.count_ones(..),
        touches_marked,
    })
}
