//! Discrete modulus of the grid path family joining F1 to F2.
//!
//! The program `min Σ a ρ^p` over densities with every admitted path of ρ-length
//! at least 1 is solved through its dual over probability measures μ on paths:
//! `Mod = (min_μ S(μ))^(1-p)` with `S = Σ a^(1-q) η^q`, `η_c = Σ_γ μ_γ ℓ_c(γ)`.
//! Each round runs one shortest-path search under `ρ̃ = (η/a)^(q-1)`; the search
//! yields both a Frank–Wolfe vertex and the admissible density `ρ̃ / d`, so every
//! round brackets the modulus between `S^(1-p)` and `S / d^p`.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::geom::{Point, PolyCurve};
use crate::grid::{DensityField, Lattice, Stencil};
use crate::modfam::graph::{CellGraph, Scratch};
use crate::modfam::scene::{CurveConstraint, GridScene};

/// Solver controls.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Relative gap `upper / lower - 1` at which the solver stops.
    pub tol: f64,
    /// Exponent p; `None` means the conformal exponent p = n.
    pub exponent: Option<f64>,
    pub max_iterations: usize,
    /// Stencil reach: 1 gives 8 (plane) or 26 (space) neighbours; 2 and 3 give
    /// 16 and 32 directions in the plane. Defaults to 3 in the plane, 1 in space.
    pub reach: Option<i64>,
    /// Largest number of paths added to the active set per shortest-path search.
    pub batch: usize,
    /// Balancing sweeps over the active set per search.
    pub sweeps: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-2, exponent: None, max_iterations: 20_000, reach: None, batch: 256, sweeps: 4 }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        SolverOptions { tol, ..Default::default() }
    }
}

/// Grid path given by its cell sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPath {
    pub cells: Vec<u32>,
    pub weight: f64,
}

impl GridPath {
    pub fn to_curve(&self, lattice: &Lattice) -> PolyCurve {
        let pts: Vec<Point> = self.cells.iter().map(|&c| lattice.center(c as usize)).collect();
        PolyCurve::new(pts).expect("grid paths have at least one cell")
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModulusResult {
    /// Certified upper estimate: energy of the returned admissible density.
    pub value: f64,
    /// Dual lower bound on the discrete modulus.
    pub lower: f64,
    /// `value / lower - 1`.
    pub gap: f64,
    pub iterations: usize,
    /// No admitted path joins F1 and F2; the family is empty and `value == 0`.
    pub infeasible: bool,
    #[serde(skip)]
    pub density: Option<DensityField>,
    /// Support of the final path measure.
    pub witnesses: Vec<GridPath>,
}

impl ModulusResult {
    fn empty() -> Self {
        ModulusResult {
            value: 0.0,
            lower: 0.0,
            gap: 0.0,
            iterations: 0,
            infeasible: true,
            density: None,
            witnesses: Vec::new(),
        }
    }
}

struct Atom {
    path: Vec<u32>,
    /// Physical length per free cell.
    cells: Vec<(u32, f64)>,
    weight: f64,
}

struct State<'a> {
    scene: &'a GridScene,
    graph: CellGraph,
    a: f64,
    q: f64,
    eta: Vec<f64>,
    rho: Vec<f64>,
    atoms: Vec<Atom>,
    index: HashMap<u64, usize>,
    delta: Vec<f64>,
    touched: Vec<u32>,
}

fn path_key(p: &[u32]) -> u64 {
    let mut h = DefaultHasher::new();
    p.hash(&mut h);
    h.finish()
}

impl<'a> State<'a> {
    fn rho_of(&self, eta: f64) -> f64 {
        if eta <= 0.0 {
            0.0
        } else if self.q == 2.0 {
            eta / self.a
        } else {
            (eta / self.a).powf(self.q - 1.0)
        }
    }

    fn s_term(&self, eta: f64) -> f64 {
        if eta <= 0.0 {
            0.0
        } else if self.q == 2.0 {
            eta * eta / self.a
        } else {
            self.a.powf(1.0 - self.q) * eta.powf(self.q)
        }
    }

    fn objective(&self) -> f64 {
        self.eta.iter().map(|&e| self.s_term(e)).sum()
    }

    fn atom_cells(&self, path: &[u32]) -> Vec<(u32, f64)> {
        let mut acc: HashMap<u32, f64> = HashMap::new();
        for w in path.windows(2) {
            let e = self.graph.move_between(w[0], w[1]).expect("path follows admissible moves");
            for &(o, l) in &self.graph.shapes[e].cells {
                let c = (w[0] as isize + o) as u32;
                if self.scene.u[c as usize] {
                    *acc.entry(c).or_insert(0.0) += l;
                }
            }
        }
        let mut v: Vec<(u32, f64)> = acc.into_iter().collect();
        v.sort_by_key(|x| x.0);
        v
    }

    fn add_atom(&mut self, path: Vec<u32>) -> usize {
        let key = path_key(&path);
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        let cells = self.atom_cells(&path);
        self.atoms.push(Atom { path, cells, weight: 0.0 });
        self.index.insert(key, self.atoms.len() - 1);
        self.atoms.len() - 1
    }

    fn atom_length(&self, i: usize) -> f64 {
        self.atoms[i].cells.iter().map(|&(c, l)| self.rho[c as usize] * l).sum()
    }

    /// Moves mass from atom `from` to atom `to` with an exact line search.
    fn pairwise_step(&mut self, to: usize, from: usize) -> f64 {
        if to == from {
            return 0.0;
        }
        let cap = self.atoms[from].weight;
        if cap <= 0.0 {
            return 0.0;
        }
        self.touched.clear();
        for &(c, l) in &self.atoms[to].cells {
            if self.delta[c as usize] == 0.0 {
                self.touched.push(c);
            }
            self.delta[c as usize] += l;
        }
        for &(c, l) in &self.atoms[from].cells {
            if self.delta[c as usize] == 0.0 {
                self.touched.push(c);
            }
            self.delta[c as usize] -= l;
        }
        let alpha = if self.q == 2.0 {
            let (mut num, mut den) = (0.0, 0.0);
            for &c in &self.touched {
                let d = self.delta[c as usize];
                num += self.eta[c as usize] * d;
                den += d * d;
            }
            if den <= 0.0 {
                0.0
            } else {
                (-num / den).clamp(0.0, cap)
            }
        } else {
            let deriv = |t: f64| -> f64 {
                let mut g = 0.0;
                for &c in &self.touched {
                    let d = self.delta[c as usize];
                    let e = (self.eta[c as usize] + t * d).max(0.0);
                    g += e.powf(self.q - 1.0) * d;
                }
                g
            };
            if deriv(0.0) >= 0.0 {
                0.0
            } else if deriv(cap) <= 0.0 {
                cap
            } else {
                let (mut lo, mut hi) = (0.0, cap);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if deriv(mid) < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        };
        let full = alpha >= cap;
        for i in 0..self.touched.len() {
            let c = self.touched[i] as usize;
            if alpha > 0.0 {
                let mut e = self.eta[c] + alpha * self.delta[c];
                if e < 1e-300 {
                    e = 0.0;
                }
                self.eta[c] = e;
                self.rho[c] = self.rho_of(e);
            }
            self.delta[c] = 0.0;
        }
        if alpha > 0.0 {
            self.atoms[to].weight += alpha;
            if full {
                self.atoms[from].weight = 0.0;
            } else {
                self.atoms[from].weight -= alpha;
            }
        }
        alpha
    }

    /// Pairs the longest loaded paths with the shortest ones and moves mass between
    /// them. Path lengths are computed once; between passes only the lengths of
    /// paths that received or lost mass are refreshed.
    fn balance(&mut self, tol: f64, passes: usize) {
        let mut len: Vec<f64> = (0..self.atoms.len()).map(|i| self.atom_length(i)).collect();
        let mut order: Vec<usize> = (0..self.atoms.len()).collect();
        for _ in 0..passes {
            order.sort_by(|&x, &y| len[x].partial_cmp(&len[y]).unwrap());
            let loaded: Vec<usize> = order.iter().rev().filter(|&&i| self.atoms[i].weight > 0.0).copied().collect();
            let (lo, hi) = (len[order[0]], len[loaded[0]]);
            if hi - lo <= 0.25 * tol * lo {
                return;
            }
            let pairs = (order.len() / 4).max(1).min(loaded.len());
            for k in 0..pairs {
                let (ih, il) = (loaded[k], order[k]);
                if ih == il || len[ih] <= len[il] {
                    break;
                }
                self.pairwise_step(il, ih);
                len[ih] = self.atom_length(ih);
                len[il] = self.atom_length(il);
            }
        }
    }

    fn prune(&mut self) {
        if self.atoms.iter().all(|a| a.weight > 0.0) {
            return;
        }
        self.atoms.retain(|a| a.weight > 0.0);
        self.index = self.atoms.iter().enumerate().map(|(i, a)| (path_key(&a.path), i)).collect();
    }
}

/// Discrete modulus of the admitted paths from F1 to F2 in the scene.
pub fn discrete_modulus(scene: &GridScene, constraint: CurveConstraint, opts: &SolverOptions) -> Result<ModulusResult> {
    scene.validate()?;
    if !(opts.tol > 0.0) {
        return domain("solver tolerance must be positive");
    }
    let dim = scene.dim();
    let p = opts.exponent.unwrap_or(dim as f64);
    if !(p > 1.0) {
        return domain("modulus exponent must exceed 1");
    }
    let stencil = match opts.reach {
        Some(k) => Stencil::new(dim, k),
        None => Stencil::default_for(dim),
    };
    if stencil.edges.len() > 32 {
        return domain("stencil has more than 32 moves");
    }
    let graph = CellGraph::build(scene, &stencil, constraint);
    let n = scene.lattice.len();
    let mut st = State {
        scene,
        graph,
        a: scene.lattice.cell_volume(),
        q: p / (p - 1.0),
        eta: vec![0.0; n],
        rho: vec![0.0; n],
        atoms: Vec::new(),
        index: HashMap::new(),
        delta: vec![0.0; n],
        touched: Vec::new(),
    };
    let mut scratch = Scratch::default();

    let unit: Vec<f64> = (0..n).map(|i| if scene.u[i] { 1.0 } else { 0.0 }).collect();
    let Some((_, first)) = st.graph.shortest_path(&unit, &mut scratch) else {
        return Ok(ModulusResult::empty());
    };
    let i0 = st.add_atom(first);
    st.atoms[i0].weight = 1.0;
    if st.atoms[i0].cells.is_empty() {
        // F1 and F2 touch: a zero-length path admits no density.
        return Ok(ModulusResult {
            value: f64::INFINITY,
            lower: f64::INFINITY,
            gap: 0.0,
            iterations: 0,
            infeasible: false,
            density: None,
            witnesses: vec![GridPath { cells: st.atoms[i0].path.clone(), weight: 1.0 }],
        });
    }
    let cells0 = st.atoms[i0].cells.clone();
    for (c, l) in cells0 {
        st.eta[c as usize] = l;
        st.rho[c as usize] = st.rho_of(l);
    }

    let mut best_upper = f64::INFINITY;
    let mut best_lower = 0.0f64;
    let mut best_rho: Vec<f64> = Vec::new();
    let mut iterations = 0;
    while iterations < opts.max_iterations {
        iterations += 1;
        let s = st.objective();
        let entries = st.graph.search(&st.rho, s, &mut scratch);
        let (d, _) = *entries.first().expect("feasibility does not change between rounds");
        best_lower = best_lower.max(s.powf(1.0 - p));
        if d > 0.0 {
            let upper = s / d.powf(p);
            if upper < best_upper {
                best_upper = upper;
                best_rho = st.rho.iter().map(|r| r / d).collect();
            }
        }
        if best_upper / best_lower - 1.0 <= opts.tol {
            break;
        }
        // The shortest path is the Frank-Wolfe vertex; other entries below the
        // mean path length are descent directions too and join the active set.
        let stride = (entries.len() / opts.batch.max(1)).max(1);
        let fresh = st.add_atom(st.graph.trace(entries[0].1, &scratch));
        for &(_, e) in entries.iter().skip(stride).step_by(stride) {
            let path = st.graph.trace(e, &scratch);
            st.add_atom(path);
        }
        let away = (0..st.atoms.len())
            .filter(|&i| st.atoms[i].weight > 0.0)
            .map(|i| (i, st.atom_length(i)))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
            .unwrap()
            .0;
        st.pairwise_step(fresh, away);
        st.balance(opts.tol, opts.sweeps);
        st.prune();
    }

    let lattice = scene.lattice.clone();
    let witnesses = st
        .atoms
        .iter()
        .filter(|a| a.weight > 0.0)
        .map(|a| GridPath { cells: a.path.clone(), weight: a.weight })
        .collect();
    Ok(ModulusResult {
        value: best_upper,
        lower: best_lower,
        gap: best_upper / best_lower - 1.0,
        iterations,
        infeasible: false,
        density: Some(DensityField { lattice, values: best_rho, exponent: p }),
        witnesses,
    })
}
