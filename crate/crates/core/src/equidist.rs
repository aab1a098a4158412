//! Equidistribution statistics: fiber counts of `H_d → H_d(q)`, spherical
//! cap deviations, and the Hecke tree of a sphere point.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::lattice::{enumerate_hd_with, LatticePoint};
use crate::modq_graph::{enumerate_hdq_with, ModQPoint};
use crate::quaternion::Letter;

/// One residue class of `H_d(q)` with its fiber size and deviation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiberCell {
    pub residue: [u64; 3],
    pub count: u64,
    /// `count / (|H_d| / |H_d(q)|) − 1`.
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModQDeviation {
    pub d: u64,
    pub q: u64,
    pub hd: u64,
    pub hdq: u64,
    pub cells: Vec<FiberCell>,
    pub max_abs_deviation: f64,
}

impl ModQDeviation {
    /// Fraction of cells with `|dev| > δ`.
    pub fn fraction_above(&self, delta: f64) -> f64 {
        let bad = self.cells.iter().filter(|c| c.deviation.abs() > delta).count();
        bad as f64 / self.cells.len() as f64
    }

    /// `Σ count = |H_d|`, equivalently the `1/|H_d(q)|`-weighted mean of
    /// `1 + dev` is exactly 1.
    pub fn bookkeeping_exact(&self) -> bool {
        self.cells.iter().map(|c| c.count).sum::<u64>() == self.hd
    }
}

pub fn dev_mod_q(d: u64, q: u64, budget: &Budget) -> Result<ModQDeviation> {
    let residues = enumerate_hdq_with(d, q, budget)?;
    let points = enumerate_hd_with(d, budget)?;
    if points.is_empty() {
        return Err(Error::precondition(format!("H_{d} is empty")));
    }
    let mut counts = vec![0u64; residues.len()];
    for p in &points {
        let r = ModQPoint::new(p.coords(), q);
        let i = residues.binary_search(&r).map_err(|_| Error::precondition(format!("{p} reduces outside H_d(q)")))?;
        counts[i] += 1;
    }
    let hd = points.len() as u64;
    let hdq = residues.len() as u64;
    let cells: Vec<FiberCell> = residues
        .iter()
        .zip(counts)
        .map(|(r, count)| FiberCell {
            residue: r.residues,
            count,
            deviation: (count * hdq) as f64 / hd as f64 - 1.0,
        })
        .collect();
    let max_abs_deviation = cells.iter().map(|c| c.deviation.abs()).fold(0.0, f64::max);
    Ok(ModQDeviation {
        d,
        q,
        hd,
        hdq,
        cells,
        max_abs_deviation,
    })
}

/// Normalized area `(1 − cos ρ)/2` of a cap of angular radius `ρ`.
pub fn cap_area(rho: f64) -> Result<f64> {
    if !(rho > 0.0 && rho <= std::f64::consts::PI) {
        return Err(Error::Range(format!("cap radius {rho} outside (0, π]")));
    }
    Ok((1.0 - rho.cos()) / 2.0)
}

fn unit(v: [f64; 3]) -> Result<[f64; 3]> {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::Range("cap center must be a nonzero finite vector".into()));
    }
    Ok(v.map(|c| c / n))
}

/// `x` lies in the cap when `x · c ≥ |x| cos ρ`, with a relative slack of
/// `1e−12` so that boundary points count as inside.
fn in_cap(x: [f64; 3], norm: f64, center: &[f64; 3], cos_rho: f64) -> bool {
    let dot = x[0] * center[0] + x[1] * center[1] + x[2] * center[2];
    dot >= norm * cos_rho - 1e-12 * norm
}

/// Points of `points` (all of norm `d`) inside the cap.
fn cap_count(points: &[[f64; 3]], d: u64, center: &[f64; 3], rho: f64) -> usize {
    let r = (d as f64).sqrt();
    let c = rho.cos();
    points.iter().filter(|p| in_cap(**p, r, center, c)).count()
}

/// `dev_d(Ω) = |H_d ∩ Ω| / (|H_d| · area(Ω)) − 1` for the cap of radius `ρ`
/// about `center`.
pub fn cap_deviation(d: u64, center: [f64; 3], rho: f64, budget: &Budget) -> Result<f64> {
    let points = enumerate_hd_with(d, budget)?;
    if points.is_empty() {
        return Err(Error::precondition(format!("H_{d} is empty")));
    }
    let pts = as_f64(&points);
    deviation_from(&pts, d, &unit(center)?, rho)
}

fn as_f64(points: &[LatticePoint]) -> Vec<[f64; 3]> {
    points.iter().map(|p| p.coords().map(|c| c as f64)).collect()
}

fn deviation_from(points: &[[f64; 3]], d: u64, center: &[f64; 3], rho: f64) -> Result<f64> {
    let area = cap_area(rho)?;
    let inside = cap_count(points, d, center, rho);
    Ok(inside as f64 / (points.len() as f64 * area) - 1.0)
}

/// Uniform point on `S²` number `index` under `seed`.
pub fn sample_center(seed: u64, index: u64) -> [f64; 3] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    loop {
        let v: [f64; 3] = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
        if let Ok(u) = unit(v) {
            return u;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapSample {
    pub center: [f64; 3],
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapStats {
    pub d: u64,
    pub rho: f64,
    pub eta: f64,
    pub seed: u64,
    pub hd: u64,
    pub samples: Vec<CapSample>,
    /// Fraction of sampled centers with `|dev| ≥ η`.
    pub fraction_bad: f64,
    /// 95% binomial half-width of `fraction_bad`.
    pub half_width: f64,
    pub max_abs_deviation: f64,
}

/// Monte-Carlo estimate of the measure of centers whose cap of radius `ρ`
/// has `|dev| ≥ η`.
pub fn cap_stats(d: u64, rho: f64, n_centers: u64, seed: u64, eta: f64, budget: &Budget) -> Result<CapStats> {
    if n_centers == 0 {
        return Err(Error::precondition("need at least one center"));
    }
    if eta < 0.0 {
        return Err(Error::Range(format!("η = {eta} must be non-negative")));
    }
    cap_area(rho)?;
    let points = enumerate_hd_with(d, budget)?;
    if points.is_empty() {
        return Err(Error::precondition(format!("H_{d} is empty")));
    }
    let pts = as_f64(&points);
    let samples: Vec<CapSample> = (0..n_centers)
        .into_par_iter()
        .map(|i| {
            let center = sample_center(seed, i);
            deviation_from(&pts, d, &center, rho).map(|deviation| CapSample { center, deviation })
        })
        .collect::<Result<_>>()?;
    let bad = samples.iter().filter(|s| s.deviation.abs() >= eta).count();
    let p = bad as f64 / n_centers as f64;
    Ok(CapStats {
        d,
        rho,
        eta,
        seed,
        hd: points.len() as u64,
        max_abs_deviation: samples.iter().map(|s| s.deviation.abs()).fold(0.0, f64::max),
        samples,
        fraction_bad: p,
        half_width: 1.96 * (p * (1.0 - p) / n_centers as f64).sqrt(),
    })
}

/// A vertex of the Hecke tree: `5^ℓ · W · x` for a reduced word `W`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HeckeNode {
    /// Letters in the order applied (first letter acts first).
    pub word: Vec<Letter>,
    pub vector: LatticePoint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HeckeLayer {
    pub root: LatticePoint,
    pub ell: usize,
    /// `|root|² · 25^ℓ`.
    pub norm: u128,
    /// One node per reduced word, in lexicographic word order.
    pub nodes: Vec<HeckeNode>,
    /// Number of distinct vectors among the nodes.
    pub distinct_vectors: usize,
}

fn apply_scaled_checked(w: Letter, v: &LatticePoint) -> Result<LatticePoint> {
    let m = w.scaled_matrix();
    let c = v.coords().map(|x| x as i128);
    let mut out = [0i64; 3];
    for i in 0..3 {
        let s: i128 = (0..3).map(|j| m[i][j] as i128 * c[j]).sum();
        out[i] = i64::try_from(s).map_err(|_| Error::Overflow("Hecke tree coordinates"))?;
    }
    Ok(LatticePoint::from(out))
}

/// All `6·5^{ℓ−1}` nodes at depth `ℓ` (the root alone for `ℓ = 0`).
pub fn hecke_layer(x: &LatticePoint, ell: usize, budget: &Budget) -> Result<HeckeLayer> {
    let words: u128 = if ell == 0 { 1 } else { 6 * 5u128.checked_pow(ell as u32 - 1).ok_or(Error::Overflow("Hecke layer size"))? };
    Budget::check("Hecke layer nodes", words, budget.max_hecke_nodes)?;
    let norm = x
        .norm()
        .checked_mul(25u128.checked_pow(ell as u32).ok_or(Error::Overflow("Hecke norm"))?)
        .ok_or(Error::Overflow("Hecke norm"))?;
    let mut layer = vec![HeckeNode {
        word: Vec::new(),
        vector: *x,
    }];
    for _ in 0..ell {
        let mut next = Vec::with_capacity(layer.len() * 5 + 1);
        for node in &layer {
            for w in Letter::ALL {
                if node.word.last().is_some_and(|&l| l.inverse() == w) {
                    continue;
                }
                let mut word = node.word.clone();
                word.push(w);
                next.push(HeckeNode {
                    word,
                    vector: apply_scaled_checked(w, &node.vector)?,
                });
            }
        }
        layer = next;
    }
    if let Some(bad) = layer.iter().find(|n| n.vector.norm() != norm) {
        return Err(Error::NormMismatch {
            point: bad.vector,
            expected: u64::try_from(norm).unwrap_or(u64::MAX),
            found: bad.vector.norm(),
        });
    }
    let mut vs: Vec<LatticePoint> = layer.iter().map(|n| n.vector).collect();
    vs.sort_unstable();
    vs.dedup();
    Ok(HeckeLayer {
        root: *x,
        ell,
        norm,
        distinct_vectors: vs.len(),
        nodes: layer,
    })
}

/// A spherical cap `{u ∈ S² : u · center ≥ cos ρ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cap {
    pub center: [f64; 3],
    pub rho: f64,
}

/// Fixed caps used for Hecke-tree regressions: six centers, two radii.
pub fn standard_caps() -> Vec<Cap> {
    let centers = [
        [0.0, 0.0, 1.0],
        [1.0, 0.0, 0.0],
        [1.0, 1.0, 1.0],
        [1.0, -2.0, 2.0],
        [-3.0, 1.0, 2.0],
        [2.0, 3.0, -6.0],
    ];
    [0.5, 1.0]
        .iter()
        .flat_map(|&rho| centers.iter().map(move |&center| Cap { center, rho }))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapDiscrepancy {
    pub cap: Cap,
    pub fraction: f64,
    pub area: f64,
    pub discrepancy: f64,
}

/// For each cap, `|fraction of depth-ℓ directions in the cap − area|`,
/// counting nodes by word.
pub fn hecke_equidist_check(x: &LatticePoint, ell: usize, caps: &[Cap], budget: &Budget) -> Result<Vec<CapDiscrepancy>> {
    let layer = hecke_layer(x, ell, budget)?;
    let r = (layer.norm as f64).sqrt();
    let pts: Vec<[f64; 3]> = layer.nodes.iter().map(|n| n.vector.coords().map(|c| c as f64)).collect();
    caps.iter()
        .map(|cap| {
            let area = cap_area(cap.rho)?;
            let center = unit(cap.center)?;
            let c = cap.rho.cos();
            let inside = pts.iter().filter(|p| in_cap(**p, r, &center, c)).count();
            let fraction = inside as f64 / pts.len() as f64;
            Ok(CapDiscrepancy {
                cap: *cap,
                fraction,
                area,
                discrepancy: (fraction - area).abs(),
            })
        })
        .collect()
}
