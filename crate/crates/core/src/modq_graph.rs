//! The sphere `H_d(q)` of residue triples with `x² + y² + z² ≡ d (mod q)`,
//! made into a 6-regular multigraph by the six letter rotations reduced
//! mod `q`.
//!
//! Adjacency stores directed multiplicities: `A[u][v]` is the number of
//! letters `w` with `w·u = v`. Because the alphabet is closed under
//! inverses this is symmetric, rows sum to 6, and a fixed point of `w`
//! together with the fixed point of `w⁻¹` puts 2 on the diagonal.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::graph::Multigraph;
use crate::lattice::gcd;
use crate::quaternion::Letter;
use crate::spectral::{adjacency_spectrum, multiplicity, report_from_eigenvalues};
use crate::walk::TrajectorySegment;

/// A residue triple modulo `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ModQPoint {
    pub residues: [u64; 3],
    pub q: u64,
}

impl ModQPoint {
    pub fn new(c: [i64; 3], q: u64) -> Self {
        let r = |v: i64| v.rem_euclid(q as i64) as u64;
        ModQPoint {
            residues: [r(c[0]), r(c[1]), r(c[2])],
            q,
        }
    }

    pub fn norm(&self) -> u64 {
        let q = self.q as u128;
        (self.residues.iter().map(|&v| v as u128 * v as u128).sum::<u128>() % q) as u64
    }
}

impl fmt::Display for ModQPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y, z] = self.residues;
        write!(f, "[({x},{y},{z})]")
    }
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let k = r0 / r1;
        (r0, r1) = (r1, r0 - k * r1);
        (t0, t1) = (t1, t0 - k * t1);
    }
    (r0 == 1).then(|| t0.rem_euclid(m as i128) as u64)
}

pub fn check_modulus(d: u64, q: u64) -> Result<()> {
    if q < 2 || gcd(q, 30) != 1 || gcd(q, d) != 1 {
        return Err(Error::precondition(format!("modulus q = {q} must be at least 2 and coprime to 30·d (d = {d})")));
    }
    Ok(())
}

/// The rotation of `w` reduced mod `q` (with 1/5 read as 5⁻¹ mod q).
pub fn letter_matrix_mod(w: Letter, q: u64) -> Result<[[u64; 3]; 3]> {
    let inv5 = mod_inverse(5, q).ok_or_else(|| Error::precondition(format!("5 is not invertible mod {q}")))?;
    let m = w.scaled_matrix();
    let qi = q as i128;
    Ok(m.map(|row| row.map(|v| ((v as i128).rem_euclid(qi) * inv5 as i128 % qi) as u64)))
}

fn apply_mod(m: &[[u64; 3]; 3], c: [u64; 3], q: u64) -> [u64; 3] {
    let q = q as u128;
    [0, 1, 2].map(|i| ((0..3).map(|j| m[i][j] as u128 * c[j] as u128).sum::<u128>() % q) as u64)
}

/// `H_d(q)` in lexicographic order.
pub fn enumerate_hdq(d: u64, q: u64) -> Result<Vec<ModQPoint>> {
    enumerate_hdq_with(d, q, &Budget::default())
}

pub fn enumerate_hdq_with(d: u64, q: u64, budget: &Budget) -> Result<Vec<ModQPoint>> {
    check_modulus(d, q)?;
    Budget::check("residue sweep", q as u128 * q as u128, budget.max_pairs)?;
    let qq = q as u128;
    let mut roots: Vec<Vec<u64>> = vec![Vec::new(); q as usize];
    for s in 0..q {
        roots[(s as u128 * s as u128 % qq) as usize].push(s);
    }
    let target = d % q;
    let mut out = Vec::new();
    for x in 0..q {
        let x2 = x as u128 * x as u128 % qq;
        for y in 0..q {
            let y2 = y as u128 * y as u128 % qq;
            let rest = ((target as u128 + 2 * qq - x2 - y2) % qq) as usize;
            for &z in &roots[rest] {
                out.push(ModQPoint { residues: [x, y, z], q });
            }
        }
    }
    Ok(out)
}

/// `H_d(q)` with its letter action and adjacency multigraph.
#[derive(Debug, Clone)]
pub struct SphereModQGraph {
    pub d: u64,
    pub q: u64,
    pub vertices: Vec<ModQPoint>,
    /// `neighbors[v][w.index()]` is the index of `w · vertices[v]`.
    pub neighbors: Vec<[usize; 6]>,
    pub graph: Multigraph,
}

pub fn build_graph(d: u64, q: u64) -> Result<SphereModQGraph> {
    build_graph_with(d, q, &Budget::default())
}

pub fn build_graph_with(d: u64, q: u64, budget: &Budget) -> Result<SphereModQGraph> {
    let vertices = enumerate_hdq_with(d, q, budget)?;
    let mats: Vec<[[u64; 3]; 3]> = Letter::ALL.iter().map(|&w| letter_matrix_mod(w, q)).collect::<Result<_>>()?;
    let neighbors: Vec<[usize; 6]> = vertices
        .par_iter()
        .map(|v| {
            let mut row = [0usize; 6];
            for (i, m) in mats.iter().enumerate() {
                let image = ModQPoint {
                    residues: apply_mod(m, v.residues, q),
                    q,
                };
                row[i] = vertices.binary_search(&image).expect("rotations preserve the norm form");
            }
            row
        })
        .collect();
    let arcs = neighbors.iter().enumerate().flat_map(|(v, row)| row.iter().map(move |&u| (v, u)));
    let graph = Multigraph::from_arcs(vertices.len(), arcs)?;
    Ok(SphereModQGraph {
        d,
        q,
        vertices,
        neighbors,
        graph,
    })
}

/// Adjacency-list export: vertices as `[x, y, z]`, edges as
/// `[i, j, A[i][j]]` with `i ≤ j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphExport {
    pub d: u64,
    pub q: u64,
    pub vertices: Vec<[u64; 3]>,
    pub edges: Vec<(usize, usize, u32)>,
}

impl SphereModQGraph {
    pub fn index_of(&self, p: &ModQPoint) -> Option<usize> {
        self.vertices.binary_search(p).ok()
    }

    /// Vertex indices of the reduction of `seg` mod `q`, checked to be a
    /// non-backtracking path along the segment's letters.
    pub fn reduce_segment(&self, seg: &TrajectorySegment) -> Result<Vec<usize>> {
        let path: Vec<usize> = seg
            .points
            .iter()
            .map(|p| {
                self.index_of(&ModQPoint::new(p.coords(), self.q))
                    .ok_or_else(|| Error::precondition(format!("{p} does not reduce into H_{}({})", self.d, self.q)))
            })
            .collect::<Result<_>>()?;
        if !self.is_marked_path(&path, &seg.letters) {
            return Err(Error::precondition("reduced segment is not a non-backtracking path"));
        }
        Ok(path)
    }

    /// `path[k+1] = letters[k] · path[k]` and no letter is followed by its
    /// inverse.
    pub fn is_marked_path(&self, path: &[usize], letters: &[Letter]) -> bool {
        path.len() == letters.len() + 1
            && letters.iter().enumerate().all(|(k, w)| self.neighbors[path[k]][w.index()] == path[k + 1])
            && letters.windows(2).all(|p| p[1] != p[0].inverse())
    }

    pub fn export(&self) -> GraphExport {
        let mut edges = Vec::new();
        for v in 0..self.vertices.len() {
            for &(u, m) in self.graph.neighbors(v) {
                if v <= u {
                    edges.push((v, u, m));
                }
            }
        }
        GraphExport {
            d: self.d,
            q: self.q,
            vertices: self.vertices.iter().map(|p| p.residues).collect(),
            edges,
        }
    }

    /// If `x ↦ t·x` maps this graph onto `other` respecting every letter,
    /// returns the vertex map.
    pub fn scaling_isomorphism(&self, other: &SphereModQGraph, t: u64) -> Option<Vec<usize>> {
        if self.q != other.q || self.vertices.len() != other.vertices.len() {
            return None;
        }
        let q = self.q as u128;
        let map: Vec<usize> = self
            .vertices
            .iter()
            .map(|v| {
                let image = ModQPoint {
                    residues: v.residues.map(|c| (c as u128 * t as u128 % q) as u64),
                    q: self.q,
                };
                other.index_of(&image)
            })
            .collect::<Option<_>>()?;
        let mut hit = vec![false; map.len()];
        for &m in &map {
            if std::mem::replace(&mut hit[m], true) {
                return None;
            }
        }
        let respects = (0..map.len()).all(|v| (0..6).all(|i| other.neighbors[map[v]][i] == map[self.neighbors[v][i]]));
        respects.then_some(map)
    }
}

/// A unit `t` with `t² · from ≡ to (mod q)`, if one exists.
pub fn square_ratio(from: u64, to: u64, q: u64) -> Option<u64> {
    let qq = q as u128;
    (1..q).find(|&t| gcd(t, q) == 1 && (t as u128 * t as u128 % qq) * (from % q) as u128 % qq == (to % q) as u128)
}

/// One row of a Ramanujan survey.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurveyRow {
    pub d: u64,
    pub q: u64,
    pub vertex_count: usize,
    /// The `d′` whose graph was diagonalized; `x ↦ t·x` was verified to be
    /// a letter-preserving isomorphism from it onto this graph.
    pub spectrum_from: u64,
    pub scale: u64,
    pub top_eigenvalue: f64,
    pub top_multiplicity: usize,
    pub second_largest_abs: f64,
    pub connected: bool,
    pub bipartite: bool,
    pub ramanujan: bool,
}

/// Spectral checks for every `(d, q)` pair.
///
/// The graph only depends on `d mod q`, and scaling by a unit `t` carries
/// `H_d(q)` onto `H_{t²d}(q)` compatibly with every letter, so one dense
/// eigensolve per square class of `d mod q` suffices. Each graph is still
/// built and the isomorphism checked vertex by vertex; connectivity and
/// bipartiteness are computed on the graph itself.
pub fn survey_ramanujan(pairs: &[(u64, u64)], budget: &Budget) -> Result<Vec<SurveyRow>> {
    struct Class {
        graph: SphereModQGraph,
        eigenvalues: Vec<f64>,
    }
    let mut classes: Vec<Class> = Vec::new();
    let mut rows = Vec::with_capacity(pairs.len());
    for &(d, q) in pairs {
        let g = build_graph_with(d, q, budget)?;
        let found = classes
            .iter()
            .enumerate()
            .filter(|(_, c)| c.graph.q == q)
            .find_map(|(i, c)| square_ratio(c.graph.d, d, q).map(|t| (i, t)));
        let (ci, t) = match found {
            Some(x) => x,
            None => {
                let report = adjacency_spectrum(&g.graph, budget)?;
                classes.push(Class {
                    graph: g.clone(),
                    eigenvalues: report.eigenvalues,
                });
                (classes.len() - 1, 1)
            }
        };
        let class = &classes[ci];
        if class.graph.scaling_isomorphism(&g, t).is_none() {
            return Err(Error::precondition(format!(
                "scaling by {t} is not an isomorphism H_{}({q}) → H_{d}({q})",
                class.graph.d
            )));
        }
        let report = report_from_eigenvalues(&g.graph, 6, class.eigenvalues.clone());
        rows.push(SurveyRow {
            d,
            q,
            vertex_count: g.vertices.len(),
            spectrum_from: class.graph.d,
            scale: t,
            top_eigenvalue: report.eigenvalues[0],
            top_multiplicity: multiplicity(&report.eigenvalues, 6.0, 1e-8),
            second_largest_abs: report.second_largest_abs,
            connected: report.connected,
            bipartite: report.bipartite,
            ramanujan: report.ramanujan,
        });
    }
    Ok(rows)
}
