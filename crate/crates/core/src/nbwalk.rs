//! Non-backtracking walks: the arc graph, its spectrum in terms of the base
//! graph, path enumeration and sampling, and large-deviation statistics.

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::graph::Multigraph;
use crate::modq_graph::SphereModQGraph;
use crate::quaternion::Letter;

/// Directed edges of a regular symmetric multigraph, with the reversal
/// pairing that defines backtracking.
///
/// Arcs are grouped by source: the arcs leaving `v` are
/// `v·D .. (v+1)·D` where `D` is the base degree.
#[derive(Debug, Clone)]
pub struct ArcGraph {
    vertex_count: usize,
    degree: usize,
    target: Vec<usize>,
    reverse: Vec<usize>,
    letters: Option<Vec<Letter>>,
}

impl ArcGraph {
    /// Arc `v·6 + w` is `(v, w)` with target `w·v`; its reversal is
    /// `(w·v, w⁻¹)`.
    pub fn from_sphere_graph(g: &SphereModQGraph) -> Self {
        let n = g.vertices.len();
        let mut target = Vec::with_capacity(6 * n);
        let mut reverse = Vec::with_capacity(6 * n);
        let mut letters = Vec::with_capacity(6 * n);
        for (v, row) in g.neighbors.iter().enumerate() {
            debug_assert_eq!(target.len(), 6 * v);
            for w in Letter::ALL {
                let u = row[w.index()];
                target.push(u);
                reverse.push(6 * u + w.inverse().index());
                letters.push(w);
            }
        }
        ArcGraph {
            vertex_count: n,
            degree: 6,
            target,
            reverse,
            letters: Some(letters),
        }
    }

    /// Arcs of a regular multigraph. Parallel arcs `u → v` and `v → u` are
    /// paired in order; the `2m` diagonal arcs at a vertex form `m`
    /// mutually reverse loop pairs.
    pub fn from_multigraph(g: &Multigraph) -> Result<Self> {
        let n = g.vertex_count();
        let degree = g
            .regular_degree()
            .ok_or_else(|| Error::precondition("arc graph needs a regular base graph"))? as usize;
        let mut target = Vec::with_capacity(n * degree);
        // (source, target, k) for the k-th parallel arc.
        let mut slot = std::collections::HashMap::new();
        for v in 0..n {
            for &(u, m) in g.neighbors(v) {
                if u == v && m % 2 == 1 {
                    return Err(Error::precondition(format!("odd loop multiplicity at vertex {v}")));
                }
                for k in 0..m as usize {
                    slot.insert((v, u, k), target.len());
                    target.push(u);
                }
            }
        }
        let mut reverse = vec![0; target.len()];
        for v in 0..n {
            for &(u, m) in g.neighbors(v) {
                for k in 0..m as usize {
                    let a = slot[&(v, u, k)];
                    reverse[a] = if u == v { slot[&(v, v, k ^ 1)] } else { slot[&(u, v, k)] };
                }
            }
        }
        Ok(ArcGraph {
            vertex_count: n,
            degree,
            target,
            reverse,
            letters: None,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Degree `D` of the base graph; each arc has `D − 1` successors.
    pub fn base_degree(&self) -> usize {
        self.degree
    }

    pub fn arc_count(&self) -> usize {
        self.target.len()
    }

    pub fn source(&self, a: usize) -> usize {
        a / self.degree
    }

    pub fn target(&self, a: usize) -> usize {
        self.target[a]
    }

    pub fn reverse(&self, a: usize) -> usize {
        self.reverse[a]
    }

    pub fn letter(&self, a: usize) -> Option<Letter> {
        self.letters.as_ref().map(|l| l[a])
    }

    pub fn out_arcs(&self, v: usize) -> std::ops::Range<usize> {
        v * self.degree..(v + 1) * self.degree
    }

    /// Arcs `b` with `b⁻ = a⁺` and `b ≠ ā`.
    pub fn successors(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        let r = self.reverse[a];
        self.out_arcs(self.target[a]).filter(move |&b| b != r)
    }

    /// In- and out-degree of every arc in the arc graph, as `(min, max)`.
    pub fn arc_degrees(&self) -> ((usize, usize), (usize, usize)) {
        let m = self.arc_count();
        let mut indeg = vec![0usize; m];
        let mut outdeg = vec![0usize; m];
        for a in 0..m {
            for b in self.successors(a) {
                outdeg[a] += 1;
                indeg[b] += 1;
            }
        }
        let mm = |v: &[usize]| (*v.iter().min().unwrap_or(&0), *v.iter().max().unwrap_or(&0));
        (mm(&indeg), mm(&outdeg))
    }

    /// `ā⁻ = a⁺`, `ā⁺ = a⁻` and `ā̄ = a` for every arc.
    pub fn reversal_is_involution(&self) -> bool {
        (0..self.arc_count()).all(|a| {
            let r = self.reverse[a];
            self.reverse[r] == a && self.source(r) == self.target[a] && self.target[r] == self.source(a)
        })
    }

    /// Exact `tr((D−1)^k T′^k)` for `k = 1..=max_k`, i.e. the number of
    /// closed non-backtracking arc cycles of each length.
    pub fn closed_walk_counts(&self, max_k: usize, budget: &Budget) -> Result<Vec<u128>> {
        let m = self.arc_count();
        Budget::check("power trace", (m as u128) * (m as u128) * max_k as u128, budget.max_trace_work)?;
        let per_start: Vec<Vec<u128>> = (0..m)
            .into_par_iter()
            .map(|start| {
                let mut counts = vec![0u128; max_k];
                let mut cur = vec![0u128; m];
                let mut next = vec![0u128; m];
                cur[start] = 1;
                for slot in counts.iter_mut() {
                    next.iter_mut().for_each(|x| *x = 0);
                    for a in 0..m {
                        if cur[a] != 0 {
                            for b in self.successors(a) {
                                next[b] += cur[a];
                            }
                        }
                    }
                    std::mem::swap(&mut cur, &mut next);
                    *slot = cur[start];
                }
                counts
            })
            .collect();
        let mut total = vec![0u128; max_k];
        for c in per_start {
            for (t, x) in total.iter_mut().zip(c) {
                *t += x;
            }
        }
        Ok(total)
    }

    /// `tr(T′^k)` for `k = 1..=max_k`.
    pub fn power_traces(&self, max_k: usize, budget: &Budget) -> Result<Vec<f64>> {
        let dm1 = (self.degree - 1) as f64;
        Ok(self
            .closed_walk_counts(max_k, budget)?
            .into_iter()
            .enumerate()
            .map(|(k, c)| c as f64 / dm1.powi(k as i32 + 1))
            .collect())
    }
}

/// The spectrum of `T′` predicted from that of `T`: two roots per base
/// eigenvalue plus `±1/(D−1)` on the new space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictedArcSpectrum {
    pub base_degree: usize,
    /// Roots of `z² − (Dλ/(D−1)) z + 1/(D−1)` for each base eigenvalue `λ`.
    pub old: Vec<Complex64>,
    /// Multiplicity of `+1/(D−1)` on the new space.
    pub new_plus: usize,
    /// Multiplicity of `−1/(D−1)` on the new space.
    pub new_minus: usize,
}

/// The two roots of `z² − (Dλ/(D−1)) z + 1/(D−1)`.
pub fn old_space_roots(lambda: f64, degree: usize) -> [Complex64; 2] {
    let dm1 = (degree - 1) as f64;
    let b = degree as f64 * lambda / dm1;
    let disc = Complex64::new(b * b - 4.0 / dm1, 0.0).sqrt();
    [(Complex64::new(b, 0.0) + disc) / 2.0, (Complex64::new(b, 0.0) - disc) / 2.0]
}

/// Builds the predicted spectrum from the normalized base eigenvalues
/// (those of `T = A/D`).
///
/// The new-space split between `+1/(D−1)` and `−1/(D−1)` is solved from the
/// first two power traces of `T′`; the two counts must be non-negative
/// integers filling exactly `arc_count − 2·vertex_count` dimensions.
pub fn predicted_arc_spectrum(
    base_eigs: &[f64],
    vertex_count: usize,
    arc_count: usize,
    degree: usize,
    trace1: f64,
    trace2: f64,
) -> Result<PredictedArcSpectrum> {
    if base_eigs.len() != vertex_count {
        return Err(Error::DimensionMismatch(format!(
            "{} base eigenvalues for {vertex_count} vertices",
            base_eigs.len()
        )));
    }
    if degree < 2 || arc_count < 2 * vertex_count {
        return Err(Error::DimensionMismatch(format!(
            "{arc_count} arcs cannot host a {}-dimensional old space",
            2 * vertex_count
        )));
    }
    let old: Vec<Complex64> = base_eigs.iter().flat_map(|&l| old_space_roots(l, degree)).collect();
    let dm1 = (degree - 1) as f64;
    let old1: f64 = old.iter().map(|z| z.re).sum();
    let old2: f64 = old.iter().map(|z| (z * z).re).sum();
    let diff = dm1 * (trace1 - old1);
    let sum = dm1 * dm1 * (trace2 - old2);
    let plus = (sum + diff) / 2.0;
    let minus = (sum - diff) / 2.0;
    let new_dim = arc_count - 2 * vertex_count;
    let as_count = |x: f64| -> Option<usize> { (x > -0.5 && (x - x.round()).abs() < 1e-6).then(|| x.round() as usize) };
    match (as_count(plus), as_count(minus)) {
        (Some(p), Some(m)) if p + m == new_dim => Ok(PredictedArcSpectrum {
            base_degree: degree,
            old,
            new_plus: p,
            new_minus: m,
        }),
        _ => Err(Error::precondition(format!(
            "traces do not split the {new_dim}-dimensional new space: solved +{plus} / −{minus}"
        ))),
    }
}

impl PredictedArcSpectrum {
    /// `Σ zᵏ` over the predicted multiset.
    pub fn power_sum(&self, k: usize) -> f64 {
        let nu = 1.0 / (self.base_degree - 1) as f64;
        let old: f64 = self.old.iter().map(|z| z.powu(k as u32).re).sum();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        old + (self.new_plus as f64 + sign * self.new_minus as f64) * nu.powi(k as i32)
    }

    /// Largest modulus among predicted eigenvalues other than the trivial 1.
    pub fn nontrivial_radius(&self) -> f64 {
        let mut moduli: Vec<f64> = self.old.iter().map(|z| z.norm()).collect();
        moduli.sort_by(|a, b| b.total_cmp(a));
        let first = moduli.iter().position(|m| (m - 1.0).abs() < 1e-9);
        let new = if self.new_plus + self.new_minus > 0 {
            1.0 / (self.base_degree - 1) as f64
        } else {
            0.0
        };
        moduli
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != first)
            .map(|(_, m)| *m)
            .fold(new, f64::max)
    }
}

/// Max over `k = 1..=max_k` of `|tr(T′^k) − Σ zᵏ|`.
pub fn power_trace_check(ag: &ArcGraph, predicted: &PredictedArcSpectrum, max_k: usize, budget: &Budget) -> Result<f64> {
    if max_k == 0 {
        return Err(Error::precondition("K must be at least 1"));
    }
    let traces = ag.power_traces(max_k, budget)?;
    Ok(traces
        .iter()
        .enumerate()
        .map(|(i, t)| (t - predicted.power_sum(i + 1)).abs())
        .fold(0.0, f64::max))
}

/// Depth-first enumeration of non-backtracking paths with a fixed number of
/// arcs, in increasing lexicographic order of arc sequences.
pub struct NbPaths<'a> {
    ag: &'a ArcGraph,
    len: usize,
    stack: Vec<usize>,
    started: bool,
}

/// All non-backtracking paths of `len ≥ 1` arcs.
pub fn enumerate_nb_paths<'a>(ag: &'a ArcGraph, len: usize, budget: &Budget) -> Result<NbPaths<'a>> {
    if len == 0 {
        return Err(Error::precondition("paths need at least one arc"));
    }
    let total = nb_path_count(ag, len).ok_or(Error::Overflow("path count"))?;
    Budget::check("non-backtracking path enumeration", total, budget.max_paths)?;
    Ok(NbPaths {
        ag,
        len,
        stack: Vec::with_capacity(len),
        started: false,
    })
}

/// `arcs · (D−1)^{len−1}`.
pub fn nb_path_count(ag: &ArcGraph, len: usize) -> Option<u128> {
    let dm1 = (ag.base_degree() - 1) as u128;
    dm1.checked_pow(len.saturating_sub(1) as u32)?.checked_mul(ag.arc_count() as u128)
}

impl NbPaths<'_> {
    /// Smallest successor of `a` strictly greater than `after`.
    fn next_successor(&self, a: usize, after: Option<usize>) -> Option<usize> {
        self.ag.successors(a).filter(|&b| after.map_or(true, |x| b > x)).min()
    }

    fn descend(&mut self) -> bool {
        while self.stack.len() < self.len {
            let a = *self.stack.last().expect("nonempty");
            match self.next_successor(a, None) {
                Some(b) => self.stack.push(b),
                None => return false,
            }
        }
        true
    }
}

impl Iterator for NbPaths<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if !self.started {
            self.started = true;
            if self.ag.arc_count() == 0 {
                return None;
            }
            self.stack.push(0);
            if self.descend() {
                return Some(self.stack.clone());
            }
        }
        loop {
            let last = self.stack.pop()?;
            let advanced = match self.stack.last() {
                Some(&prev) => self.next_successor(prev, Some(last)),
                None => (last + 1 < self.ag.arc_count()).then_some(last + 1),
            };
            if let Some(b) = advanced {
                self.stack.push(b);
                if self.descend() {
                    return Some(self.stack.clone());
                }
            }
        }
    }
}

/// The reversed path `ā_len, …, ā_1`.
pub fn reverse_path(ag: &ArcGraph, arcs: &[usize]) -> Vec<usize> {
    arcs.iter().rev().map(|&a| ag.reverse(a)).collect()
}

/// Vertices `x₀, …, x_len` visited by an arc path.
pub fn path_vertices(ag: &ArcGraph, arcs: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(arcs.len() + 1);
    if let Some(&a) = arcs.first() {
        out.push(ag.source(a));
    }
    out.extend(arcs.iter().map(|&a| ag.target(a)));
    out
}

/// Number of undirected non-backtracking paths with `2ℓ` arcs, counted by
/// exhaustive enumeration (each path is identified with its reversal).
pub fn count_centered_paths(ag: &ArcGraph, ell: usize, budget: &Budget) -> Result<u128> {
    if ell == 0 {
        return Ok(ag.vertex_count() as u128);
    }
    let mut count = 0u128;
    for p in enumerate_nb_paths(ag, 2 * ell, budget)? {
        if p <= reverse_path(ag, &p) {
            count += 1;
        }
    }
    Ok(count)
}

/// `3 · 5^{2ℓ−1} · n` for the 6-regular sphere graphs; in general
/// `n·D·(D−1)^{2ℓ−1} / 2`.
pub fn centered_path_formula(ag: &ArcGraph, ell: usize) -> Option<u128> {
    if ell == 0 {
        return Some(ag.vertex_count() as u128);
    }
    nb_path_count(ag, 2 * ell).map(|c| c / 2)
}

/// Deterministic generator for walk number `index` under `seed`.
fn walk_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A uniformly random non-backtracking path of `len` arcs: uniform start
/// vertex, uniform first arc, then uniform among the `D − 1` continuations.
/// Reproducible from `(seed, index)` alone.
pub fn sample_nb_walk(ag: &ArcGraph, len: usize, seed: u64, index: u64) -> Vec<usize> {
    let mut rng = walk_rng(seed, index);
    sample_with(ag, len, &mut rng)
}

fn sample_with(ag: &ArcGraph, len: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut arcs = Vec::with_capacity(len);
    if len == 0 {
        return arcs;
    }
    let v = rng.gen_range(0..ag.vertex_count());
    let mut a = ag.out_arcs(v).start + rng.gen_range(0..ag.base_degree());
    arcs.push(a);
    let mut succ = Vec::with_capacity(ag.base_degree());
    while arcs.len() < len {
        succ.clear();
        succ.extend(ag.successors(a));
        a = succ[rng.gen_range(0..succ.len())];
        arcs.push(a);
    }
    arcs
}

/// A uniformly random vertex subset of size `round(μ·n)`.
pub fn random_subset(n: usize, mu: f64, seed: u64) -> Result<Vec<bool>> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::Range(format!("density {mu} outside [0, 1]")));
    }
    let k = (mu * n as f64).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut member = vec![false; n];
    for i in sample(&mut rng, n, k) {
        member[i] = true;
    }
    Ok(member)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DeviationMode {
    Exhaustive,
    Sampled { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LargeDeviationReport {
    pub ell: usize,
    pub vertex_count: usize,
    pub target_size: usize,
    pub mu: f64,
    pub epsilon: f64,
    pub mode: DeviationMode,
    pub violating: u128,
    pub total: u128,
    pub fraction_violating: f64,
    /// 95% binomial half-width in sampled mode, 0 when exhaustive.
    pub half_width: f64,
}

/// Whether `c` visits out of `2ℓ+1` deviate from `μ = |B|/n` by at least `ε`.
fn deviates(c: usize, points: usize, b: usize, n: usize, eps: f64) -> bool {
    let lhs = (c as i128 * n as i128 - b as i128 * points as i128).unsigned_abs() as f64;
    lhs >= eps * (n * points) as f64 - 1e-9
}

/// Fraction of centered non-backtracking paths `x_{−ℓ} … x_ℓ` whose number
/// of visits to `B` deviates from `μ(2ℓ+1)` by at least `ε(2ℓ+1)`.
///
/// Exhaustive mode counts every directed path of `2ℓ` arcs exactly by
/// dynamic programming over (arc, visits so far); reversal preserves the
/// visit count, so directed and undirected fractions coincide.
pub fn large_deviation_stats(ag: &ArcGraph, in_b: &[bool], ell: usize, eps: f64, mode: DeviationMode) -> Result<LargeDeviationReport> {
    let n = ag.vertex_count();
    if in_b.len() != n {
        return Err(Error::DimensionMismatch(format!("{} membership flags for {n} vertices", in_b.len())));
    }
    let b = in_b.iter().filter(|&&x| x).count();
    if b == 0 {
        return Err(Error::precondition("target set is empty"));
    }
    if !(eps > 0.0) {
        return Err(Error::Range(format!("ε = {eps} must be positive")));
    }
    let points = 2 * ell + 1;
    let (violating, total) = match mode {
        DeviationMode::Exhaustive => exhaustive_deviation(ag, in_b, ell, eps, b)?,
        DeviationMode::Sampled { samples, seed } => {
            if samples == 0 {
                return Err(Error::precondition("need at least one sample"));
            }
            let bad: u128 = (0..samples)
                .into_par_iter()
                .map(|i| {
                    let c = if ell == 0 {
                        let mut rng = walk_rng(seed, i);
                        in_b[rng.gen_range(0..n)] as usize
                    } else {
                        let p = sample_nb_walk(ag, 2 * ell, seed, i);
                        path_vertices(ag, &p).iter().filter(|&&v| in_b[v]).count()
                    };
                    deviates(c, points, b, n, eps) as u128
                })
                .sum();
            (bad, samples as u128)
        }
    };
    let fraction = violating as f64 / total as f64;
    let half_width = match mode {
        DeviationMode::Exhaustive => 0.0,
        DeviationMode::Sampled { samples, .. } => 1.96 * (fraction * (1.0 - fraction) / samples as f64).sqrt(),
    };
    Ok(LargeDeviationReport {
        ell,
        vertex_count: n,
        target_size: b,
        mu: b as f64 / n as f64,
        epsilon: eps,
        mode,
        violating,
        total,
        fraction_violating: fraction,
        half_width,
    })
}

fn exhaustive_deviation(ag: &ArcGraph, in_b: &[bool], ell: usize, eps: f64, b: usize) -> Result<(u128, u128)> {
    let n = ag.vertex_count();
    let points = 2 * ell + 1;
    if ell == 0 {
        let bad = (0..n).filter(|&v| deviates(in_b[v] as usize, 1, b, n, eps)).count();
        return Ok((bad as u128, n as u128));
    }
    nb_path_count(ag, 2 * ell).ok_or(Error::Overflow("path count"))?;
    let m = ag.arc_count();
    let width = points + 1;
    // dp[a * width + c]: paths ending with arc a having visited B c times.
    let mut dp = vec![0u128; m * width];
    for a in 0..m {
        let c = in_b[ag.source(a)] as usize + in_b[ag.target(a)] as usize;
        dp[a * width + c] = 1;
    }
    for _ in 1..2 * ell {
        let mut next = vec![0u128; m * width];
        for a in 0..m {
            for b2 in ag.successors(a) {
                let add = in_b[ag.target(b2)] as usize;
                for c in 0..width - add {
                    let x = dp[a * width + c];
                    if x != 0 {
                        next[b2 * width + c + add] += x;
                    }
                }
            }
        }
        dp = next;
    }
    let mut bad = 0u128;
    let mut total = 0u128;
    for a in 0..m {
        for c in 0..width {
            let x = dp[a * width + c];
            total += x;
            if deviates(c, points, b, n, eps) {
                bad += x;
            }
        }
    }
    Ok((bad, total))
}

/// `Π_{i=1}^{ℓ−1} (√(μᵢ μᵢ₊₁) + ‖T‖)`.
pub fn qi_bound(mus: &[f64], op_norm: f64) -> Result<f64> {
    if mus.iter().any(|m| !(0.0..=1.0).contains(m)) {
        return Err(Error::Range("densities must lie in [0, 1]".into()));
    }
    if !(0.0..1.0).contains(&op_norm) {
        return Err(Error::Range(format!("operator norm {op_norm} outside [0, 1)")));
    }
    Ok(mus.windows(2).map(|w| (w[0] * w[1]).sqrt() + op_norm).product())
}

/// Exact probability, as `(numerator, denominator)`, that a simple random
/// walk with uniform start is in `sets[j]` at step `j` for every `j`.
/// Parallel edges are weighted by multiplicity.
pub fn exact_walk_probability(g: &Multigraph, sets: &[Vec<bool>]) -> Result<(u128, u128)> {
    let n = g.vertex_count();
    let degree = g
        .regular_degree()
        .ok_or_else(|| Error::precondition("walk probabilities need a regular graph"))?;
    if sets.is_empty() || sets.iter().any(|s| s.len() != n) {
        return Err(Error::DimensionMismatch("each set must flag every vertex".into()));
    }
    let mut cur: Vec<u128> = (0..n).map(|v| sets[0][v] as u128).collect();
    for set in &sets[1..] {
        let mut next = vec![0u128; n];
        for v in 0..n {
            if cur[v] == 0 {
                continue;
            }
            for &(u, m) in g.neighbors(v) {
                if set[u] {
                    next[u] = next[u]
                        .checked_add(cur[v].checked_mul(m as u128).ok_or(Error::Overflow("walk count"))?)
                        .ok_or(Error::Overflow("walk count"))?;
                }
            }
        }
        cur = next;
    }
    let num = cur.iter().try_fold(0u128, |s, &x| s.checked_add(x)).ok_or(Error::Overflow("walk count"))?;
    let den = (degree as u128)
        .checked_pow(sets.len() as u32 - 1)
        .and_then(|p| p.checked_mul(n as u128))
        .ok_or(Error::Overflow("walk count"))?;
    Ok((num, den))
}
