//! Dense symmetric eigenvalues (Householder tridiagonalization followed by
//! implicit QL) and spectral reports for regular multigraphs.

use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::graph::Multigraph;

/// Eigenvalues of the symmetric `n × n` row-major matrix `a`, descending.
///
/// Only the values are computed; `a` is consumed as workspace.
pub fn symmetric_eigenvalues(mut a: Vec<f64>, n: usize) -> Result<Vec<f64>> {
    if a.len() != n * n {
        return Err(Error::DimensionMismatch(format!("{} entries for a {n}×{n} matrix", a.len())));
    }
    let (mut diag, mut off) = tridiagonalize(&mut a, n);
    tridiagonal_ql(&mut diag, &mut off)?;
    diag.sort_by(|x, y| y.total_cmp(x));
    Ok(diag)
}

/// Reduces `a` to tridiagonal form by Householder reflections applied to the
/// full symmetric matrix. Returns the diagonal and the subdiagonal, the
/// latter stored as `off[i] = T[i][i−1]` with `off[0] = 0`.
fn tridiagonalize(a: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    let mut u = vec![0.0; n];
    let mut p = vec![0.0; n];
    for i in (1..n).rev() {
        let m = i; // the active block is 0..m
        let row = &a[i * n..i * n + m];
        let scale: f64 = row.iter().map(|v| v.abs()).sum();
        if m == 1 || scale == 0.0 {
            off[i] = a[i * n + i - 1];
            diag[i] = a[i * n + i];
            continue;
        }
        let mut h = 0.0;
        for k in 0..m {
            u[k] = row[k] / scale;
            h += u[k] * u[k];
        }
        let f = u[m - 1];
        let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
        off[i] = scale * g;
        h -= f * g;
        u[m - 1] = f - g;
        // p = A u / h on the active block.
        for j in 0..m {
            let r = &a[j * n..j * n + m];
            let mut s = 0.0;
            for k in 0..m {
                s += r[k] * u[k];
            }
            p[j] = s / h;
        }
        let kk: f64 = (0..m).map(|k| u[k] * p[k]).sum::<f64>() / (2.0 * h);
        for j in 0..m {
            p[j] -= kk * u[j];
        }
        // A ← A − u pᵀ − p uᵀ.
        for j in 0..m {
            let (uj, pj) = (u[j], p[j]);
            let r = &mut a[j * n..j * n + m];
            for k in 0..m {
                r[k] -= uj * p[k] + pj * u[k];
            }
        }
        diag[i] = a[i * n + i];
    }
    if n > 0 {
        diag[0] = a[0];
    }
    (diag, off)
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix.
/// On return `diag` holds the eigenvalues in no particular order.
fn tridiagonal_ql(diag: &mut [f64], off: &mut [f64]) -> Result<()> {
    let n = diag.len();
    if n == 0 {
        return Ok(());
    }
    // e[i] = T[i+1][i].
    let mut e: Vec<f64> = off[1..].to_vec();
    e.push(0.0);
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 60 {
                return Err(Error::precondition("QL iteration did not converge"));
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Adjacency spectrum of a regular multigraph with the derived quantities
/// used for expansion checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub vertex_count: usize,
    pub degree: u64,
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// `max_{j ≥ 2} |λ_j|`.
    pub second_largest_abs: f64,
    /// `degree − second_largest_abs`.
    pub gap: f64,
    pub connected: bool,
    pub bipartite: bool,
    /// `2√(degree − 1)`.
    pub ramanujan_bound: f64,
    pub ramanujan: bool,
}

pub const RAMANUJAN_TOLERANCE: f64 = 1e-8;

pub fn adjacency_spectrum(g: &Multigraph, budget: &Budget) -> Result<SpectralReport> {
    let n = g.vertex_count();
    Budget::check("dense eigensolver dimension", n as u128, budget.max_dense_dim as u128)?;
    let degree = g
        .regular_degree()
        .ok_or_else(|| Error::precondition("spectral report needs a regular graph"))?;
    let eigenvalues = symmetric_eigenvalues(g.dense(), n)?;
    Ok(report_from_eigenvalues(g, degree, eigenvalues))
}

/// Builds the report around eigenvalues computed elsewhere (for instance on
/// an isomorphic copy of `g`).
pub fn report_from_eigenvalues(g: &Multigraph, degree: u64, eigenvalues: Vec<f64>) -> SpectralReport {
    let second_largest_abs = eigenvalues.iter().skip(1).map(|v| v.abs()).fold(0.0, f64::max);
    let ramanujan_bound = 2.0 * ((degree as f64) - 1.0).max(0.0).sqrt();
    let mut report = SpectralReport {
        vertex_count: g.vertex_count(),
        degree,
        eigenvalues,
        second_largest_abs,
        gap: degree as f64 - second_largest_abs,
        connected: g.is_connected(),
        bipartite: g.is_bipartite(),
        ramanujan_bound,
        ramanujan: false,
    };
    report.ramanujan = check_ramanujan(&report);
    report
}

/// Connected, not bipartite, and every nontrivial eigenvalue within
/// `2√(k−1)` up to [`RAMANUJAN_TOLERANCE`].
pub fn check_ramanujan(report: &SpectralReport) -> bool {
    report.connected && !report.bipartite && report.second_largest_abs <= report.ramanujan_bound + RAMANUJAN_TOLERANCE
}

/// Number of eigenvalues within `tol` of `value`.
pub fn multiplicity(eigenvalues: &[f64], value: f64, tol: f64) -> usize {
    eigenvalues.iter().filter(|v| (*v - value).abs() <= tol).count()
}
