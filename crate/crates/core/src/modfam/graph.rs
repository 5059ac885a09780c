//! Cell graph of a scene under a curve constraint, and shortest-path searches on it.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::grid::Stencil;
use crate::modfam::scene::{CurveConstraint, GridScene};

const NONE: u32 = u32::MAX;

pub(crate) struct EdgeShape {
    /// Linear index offset of the target cell.
    pub target: isize,
    /// Crossed cells as (linear offset, physical length).
    pub cells: Vec<(isize, f64)>,
}

/// Precomputed admissible moves of a scene.
pub(crate) struct CellGraph {
    pub n: usize,
    pub shapes: Vec<EdgeShape>,
    /// Bit `e` set when move `e` is admissible from the cell.
    pub moves: Vec<u32>,
    /// Obstacle contacts per (cell, move); only in budget mode.
    pub contacts: Option<Vec<u8>>,
    pub budget: u32,
    pub sources: Vec<u32>,
    pub is_target: Vec<bool>,
    /// Obstacle contacts charged when a path starts in the cell.
    pub start_cost: Vec<u8>,
}

fn lin(shape: [usize; 3], o: [i64; 3]) -> isize {
    o[0] as isize + shape[0] as isize * (o[1] as isize + shape[1] as isize * o[2] as isize)
}

impl CellGraph {
    pub fn build(scene: &GridScene, stencil: &Stencil, constraint: CurveConstraint) -> Self {
        let lat = &scene.lattice;
        let n = lat.len();
        let h = lat.spacing;
        let shape = lat.shape;
        let avoid = constraint == CurveConstraint::Avoid;
        let budget = match constraint {
            CurveConstraint::Budget(k) => Some(k),
            _ => None,
        };
        assert!(stencil.edges.len() <= 32);
        let shapes: Vec<EdgeShape> = stencil
            .edges
            .iter()
            .map(|e| EdgeShape {
                target: lin(shape, e.offset),
                cells: e.cells.iter().map(|(c, l)| (lin(shape, *c), l * h)).collect(),
            })
            .collect();
        let node_ok = |i: usize| scene.is_traversable(i) && !(avoid && scene.obstacle[i]);
        let mut moves = vec![0u32; n];
        let ne = stencil.edges.len();
        let mut contacts = budget.map(|_| vec![0u8; n * ne]);
        for i in 0..n {
            if !node_ok(i) {
                continue;
            }
            let c = lat.coords(i);
            let ci = [c[0] as i64, c[1] as i64, c[2] as i64];
            'edge: for (e, se) in stencil.edges.iter().enumerate() {
                let add = |o: [i64; 3]| [ci[0] + o[0], ci[1] + o[1], ci[2] + o[2]];
                let Some(t) = lat.index_signed(add(se.offset)) else { continue };
                if !node_ok(t) {
                    continue;
                }
                let mut hits = 0u32;
                for (o, _) in &se.cells {
                    let j = lat.index_signed(add(*o)).expect("crossed cells lie in the bounding box");
                    if !node_ok(j) {
                        continue 'edge;
                    }
                    if j != i && scene.obstacle[j] {
                        hits += 1;
                    }
                }
                for o in &se.grazed {
                    if let Some(j) = lat.index_signed(add(*o)) {
                        if scene.obstacle[j] {
                            if avoid {
                                continue 'edge;
                            }
                            hits += 1;
                        }
                    }
                }
                if let Some(k) = budget {
                    if hits > k {
                        continue;
                    }
                    contacts.as_mut().unwrap()[i * ne + e] = hits as u8;
                }
                moves[i] |= 1 << e;
            }
        }
        let sources = (0..n).filter(|&i| scene.f1[i] && node_ok(i)).map(|i| i as u32).collect();
        let is_target = (0..n).map(|i| scene.f2[i] && node_ok(i)).collect();
        let start_cost = (0..n).map(|i| scene.obstacle[i] as u8).collect();
        CellGraph {
            n,
            shapes,
            moves,
            contacts,
            budget: budget.unwrap_or(0),
            sources,
            is_target,
            start_cost,
        }
    }

    /// Length of move `e` from cell `i` under density `rho`.
    #[inline]
    pub fn move_cost(&self, rho: &[f64], i: usize, e: usize) -> f64 {
        let mut s = 0.0;
        for &(o, l) in &self.shapes[e].cells {
            s += rho[(i as isize + o) as usize] * l;
        }
        s
    }

    /// Dijkstra from F1 under `rho`. Returns the states at which paths first enter F2,
    /// in increasing distance, stopping after the first entry once distances exceed
    /// `cutoff`. A state is `layer * n + cell`, the layer counting obstacle contacts.
    pub fn search(&self, rho: &[f64], cutoff: f64, s: &mut Scratch) -> Vec<(f64, u32)> {
        let k = self.budget as usize;
        let layers = if self.contacts.is_some() { k + 1 } else { 1 };
        let ne = self.shapes.len();
        let n = self.n;
        s.reset(n * layers);
        let mut heap = BinaryHeap::new();
        for &src in &self.sources {
            let used = if self.contacts.is_some() { self.start_cost[src as usize] as usize } else { 0 };
            if used > k {
                continue;
            }
            let st = used * n + src as usize;
            s.dist[st] = 0.0;
            heap.push(Reverse((0u64, st as u32)));
        }
        let mut entries = Vec::new();
        while let Some(Reverse((db, st))) = heap.pop() {
            let sti = st as usize;
            let du = f64::from_bits(db);
            if du > s.dist[sti] {
                continue;
            }
            if !entries.is_empty() && du > cutoff {
                break;
            }
            let (used, ui) = if layers == 1 { (0, sti) } else { (sti / n, sti % n) };
            if self.is_target[ui] {
                // Targets absorb: every reached F2 cell is a distinct entry.
                entries.push((du, st));
                continue;
            }
            let mut m = self.moves[ui];
            while m != 0 {
                let e = m.trailing_zeros() as usize;
                m &= m - 1;
                let nu = match &self.contacts {
                    Some(c) => used + c[ui * ne + e] as usize,
                    None => 0,
                };
                if nu > k {
                    continue;
                }
                let v = (ui as isize + self.shapes[e].target) as usize;
                let sv = nu * n + v;
                let nd = du + self.move_cost(rho, ui, e);
                if nd < s.dist[sv] {
                    s.dist[sv] = nd;
                    s.parent[sv] = st;
                    heap.push(Reverse((nd.to_bits(), sv as u32)));
                }
            }
        }
        entries
    }

    /// Cell sequence of the search-tree path ending at `state`.
    pub fn trace(&self, state: u32, s: &Scratch) -> Vec<u32> {
        let n = self.n as u32;
        let mut path = vec![state % n];
        let mut cur = state;
        while s.parent[cur as usize] != NONE {
            cur = s.parent[cur as usize];
            path.push(cur % n);
        }
        path.reverse();
        path
    }

    /// Shortest F1 -> F2 path under `rho`; returns the distance and the cell sequence.
    pub fn shortest_path(&self, rho: &[f64], s: &mut Scratch) -> Option<(f64, Vec<u32>)> {
        let entries = self.search(rho, 0.0, s);
        entries.first().map(|&(d, st)| (d, self.trace(st, s)))
    }

    /// Move index joining two cells, if admissible.
    pub fn move_between(&self, a: u32, b: u32) -> Option<usize> {
        let d = b as isize - a as isize;
        let mut m = self.moves[a as usize];
        while m != 0 {
            let e = m.trailing_zeros() as usize;
            m &= m - 1;
            if self.shapes[e].target == d {
                return Some(e);
            }
        }
        None
    }
}

#[derive(Default)]
pub(crate) struct Scratch {
    dist: Vec<f64>,
    parent: Vec<u32>,
}

impl Scratch {
    fn reset(&mut self, n: usize) {
        self.dist.clear();
        self.dist.resize(n, f64::INFINITY);
        self.parent.clear();
        self.parent.resize(n, NONE);
    }
}
