//! Finite undirected multigraphs stored as symmetric sparse adjacency
//! matrices with integer multiplicities.
//!
//! A loop at `v` added through [`Multigraph::from_edges`] contributes 2 to
//! `A[v][v]`, so a loop counts twice towards the degree.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Multigraph {
    /// `adj[v]` lists `(u, A[v][u])` with `A[v][u] > 0`, sorted by `u`.
    adj: Vec<Vec<(usize, u32)>>,
}

impl Multigraph {
    /// From directed arcs; `A[u][v]` counts the arcs `u → v`. The result
    /// must be symmetric.
    pub fn from_arcs(n: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut rows: Vec<BTreeMap<usize, u32>> = vec![BTreeMap::new(); n];
        for (u, v) in arcs {
            if u >= n || v >= n {
                return Err(Error::DimensionMismatch(format!("arc ({u}, {v}) in a graph on {n} vertices")));
            }
            *rows[u].entry(v).or_default() += 1;
        }
        let g = Multigraph {
            adj: rows.into_iter().map(|r| r.into_iter().collect()).collect(),
        };
        if !g.is_symmetric() {
            return Err(Error::precondition("arc multiset is not closed under reversal"));
        }
        Ok(g)
    }

    /// From undirected edges `(u, v, multiplicity)`.
    pub fn from_edges(n: usize, edges: &[(usize, usize, u32)]) -> Result<Self> {
        let mut arcs = Vec::new();
        for &(u, v, m) in edges {
            for _ in 0..m {
                arcs.push((u, v));
                arcs.push((v, u));
            }
        }
        Self::from_arcs(n, arcs)
    }

    /// The complete graph `K_n`.
    pub fn complete(n: usize) -> Self {
        let adj = (0..n).map(|v| (0..n).filter(|&u| u != v).map(|u| (u, 1)).collect()).collect();
        Multigraph { adj }
    }

    /// The cycle `C_n`, `n ≥ 3`.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::precondition("a simple cycle needs at least 3 vertices"));
        }
        let edges: Vec<_> = (0..n).map(|v| (v, (v + 1) % n, 1)).collect();
        Self::from_edges(n, &edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, u32)] {
        &self.adj[v]
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> u32 {
        self.adj[u]
            .binary_search_by_key(&v, |&(w, _)| w)
            .map(|i| self.adj[u][i].1)
            .unwrap_or(0)
    }

    /// Row sum of `A`.
    pub fn degree(&self, v: usize) -> u64 {
        self.adj[v].iter().map(|&(_, m)| m as u64).sum()
    }

    /// The common degree, if every vertex has the same one.
    pub fn regular_degree(&self) -> Option<u64> {
        let k = self.adj.first().map(|_| self.degree(0))?;
        (0..self.vertex_count()).all(|v| self.degree(v) == k).then_some(k)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.vertex_count()).all(|v| self.adj[v].iter().all(|&(u, m)| self.multiplicity(u, v) == m))
    }

    /// Connected components as a label per vertex, labels in order of first
    /// appearance.
    pub fn components(&self) -> (usize, Vec<usize>) {
        let n = self.vertex_count();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &(u, _) in &self.adj[v] {
                    if label[u] == usize::MAX {
                        label[u] = count;
                        queue.push_back(u);
                    }
                }
            }
            count += 1;
        }
        (count, label)
    }

    pub fn is_connected(&self) -> bool {
        self.components().0 <= 1
    }

    /// Two-colourability of the support; a loop makes a graph non-bipartite.
    pub fn is_bipartite(&self) -> bool {
        let n = self.vertex_count();
        let mut colour = vec![u8::MAX; n];
        for s in 0..n {
            if colour[s] != u8::MAX {
                continue;
            }
            colour[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &(u, _) in &self.adj[v] {
                    if colour[u] == u8::MAX {
                        colour[u] = 1 - colour[v];
                        queue.push_back(u);
                    } else if colour[u] == colour[v] {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Dense row-major adjacency matrix.
    pub fn dense(&self) -> Vec<f64> {
        let n = self.vertex_count();
        let mut a = vec![0.0; n * n];
        for v in 0..n {
            for &(u, m) in &self.adj[v] {
                a[v * n + u] = m as f64;
            }
        }
        a
    }

    /// Relabel vertex `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::precondition("not a permutation of the vertex set"));
        }
        let mut adj = vec![Vec::new(); n];
        for v in 0..n {
            let mut row: Vec<_> = self.adj[v].iter().map(|&(u, m)| (perm[u], m)).collect();
            row.sort_unstable();
            adj[perm[v]] = row;
        }
        Ok(Multigraph { adj })
    }

    /// Vertices `(v, 0)` and `(v, 1)` at indices `v` and `v + n`; each arc
    /// `u → v` becomes `(u, s) → (v, 1 − s)`.
    pub fn bipartite_double_cover(&self) -> Self {
        let n = self.vertex_count();
        let mut adj = vec![Vec::new(); 2 * n];
        for v in 0..n {
            adj[v] = self.adj[v].iter().map(|&(u, m)| (u + n, m)).collect();
            adj[v + n] = self.adj[v].clone();
        }
        Multigraph { adj }
    }

    /// Vertices of `other` follow those of `self`.
    pub fn disjoint_union(&self, other: &Multigraph) -> Self {
        let n = self.vertex_count();
        let mut adj = self.adj.clone();
        adj.extend(other.adj.iter().map(|row| row.iter().map(|&(u, m)| (u + n, m)).collect()));
        Multigraph { adj }
    }
}
