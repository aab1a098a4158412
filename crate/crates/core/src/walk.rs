//! Non-backtracking trajectories on `H_d` driven by the two-out-of-six
//! rule, the shadowing congruence, and the mod-`q` pair count Σ(d, ℓ, q).
//!
//! Orientation: a trajectory through `x` is only defined up to reversal.
//! We take `w₁` to be the earlier of the two admissible letters in
//! [`Letter::ALL`] order. Every comparison between trajectories tries both
//! alignments, so this choice never hides a match.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::lattice::{count_hd_with, enumerate_hd_with, gcd, orbit_representative, LatticePoint};
use crate::quaternion::Letter;

/// The two letters `w` (in enum order) for which `w · x` is integral, with
/// the images.
pub fn linnik_step(x: &LatticePoint, d: u64) -> Result<[(Letter, LatticePoint); 2]> {
    check_norm(x, d)?;
    let mut found: Vec<(Letter, LatticePoint)> = Vec::with_capacity(2);
    let mut count = 0usize;
    for w in Letter::ALL {
        if let Some(y) = w.apply(x) {
            count += 1;
            if found.len() < 2 {
                found.push((w, y));
            }
        }
    }
    if count != 2 {
        return Err(Error::StepCount { point: *x, d, found: count });
    }
    Ok([found[0], found[1]])
}

/// Letters `w` whose integer matrix `5w` annihilates the residue triple `r`
/// mod 5.
pub fn annihilating_letters_mod5(r: [u64; 3]) -> Vec<Letter> {
    Letter::ALL
        .into_iter()
        .filter(|w| {
            w.scaled_matrix()
                .iter()
                .all(|row| (0..3).map(|j| row[j] * r[j] as i64).sum::<i64>().rem_euclid(5) == 0)
        })
        .collect()
}

/// Residue classes mod 5 of norm `≡ d` paired with the number of letters
/// annihilating each. For `d ≡ ±1 (mod 5)` every count should be 2.
pub fn annihilator_counts_mod5(d: u64) -> Vec<([u64; 3], usize)> {
    let mut out = Vec::new();
    for x in 0..5u64 {
        for y in 0..5u64 {
            for z in 0..5u64 {
                if (x * x + y * y + z * z) % 5 == d % 5 {
                    out.push(([x, y, z], annihilating_letters_mod5([x, y, z]).len()));
                }
            }
        }
    }
    out
}

fn check_norm(x: &LatticePoint, d: u64) -> Result<()> {
    if x.norm() != d as u128 {
        return Err(Error::NormMismatch {
            point: *x,
            expected: d,
            found: x.norm(),
        });
    }
    Ok(())
}

/// The next step of a trajectory that arrived at `x` via `last`.
fn next_step(x: &LatticePoint, d: u64, last: Letter) -> Result<(Letter, LatticePoint)> {
    let [a, b] = linnik_step(x, d)?;
    Ok(if a.0 == last.inverse() { b } else { a })
}

/// A truncated trajectory `x_{−ℓ}, …, x_ℓ` with letters `w_{−ℓ+1}, …, w_ℓ`,
/// where `x_i = w_i · x_{i−1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct TrajectorySegment {
    pub d: u64,
    pub ell: usize,
    /// `points[i + ℓ]` is `x_i`.
    pub points: Vec<LatticePoint>,
    /// `letters[i + ℓ − 1]` is `w_i`.
    pub letters: Vec<Letter>,
}

impl TrajectorySegment {
    pub fn center(&self) -> LatticePoint {
        self.points[self.ell]
    }

    /// `x_i` for `−ℓ ≤ i ≤ ℓ`.
    pub fn point(&self, i: i64) -> LatticePoint {
        self.points[(i + self.ell as i64) as usize]
    }

    /// `w_i` for `−ℓ + 1 ≤ i ≤ ℓ`.
    pub fn letter(&self, i: i64) -> Letter {
        self.letters[(i + self.ell as i64 - 1) as usize]
    }

    /// `x_1, …, x_ℓ`.
    pub fn forward_points(&self) -> &[LatticePoint] {
        &self.points[self.ell + 1..]
    }

    /// `w_1, …, w_ℓ`.
    pub fn forward_word(&self) -> &[Letter] {
        &self.letters[self.ell..]
    }

    /// The same path traversed in the opposite direction: `y_j = x_{−j}`
    /// and `v_j = w_{1−j}⁻¹`.
    pub fn reversed(&self) -> TrajectorySegment {
        TrajectorySegment {
            d: self.d,
            ell: self.ell,
            points: self.points.iter().rev().copied().collect(),
            letters: self.letters.iter().rev().map(|w| w.inverse()).collect(),
        }
    }

    /// Checks norms, exact letter action and reducedness.
    pub fn validate(&self) -> Result<()> {
        let n = self.points.len();
        if n != 2 * self.ell + 1 || self.letters.len() != 2 * self.ell {
            return Err(Error::DimensionMismatch(format!(
                "segment of half-length {} has {} points and {} letters",
                self.ell,
                n,
                self.letters.len()
            )));
        }
        for p in &self.points {
            check_norm(p, self.d)?;
        }
        for (k, w) in self.letters.iter().enumerate() {
            if w.apply(&self.points[k]) != Some(self.points[k + 1]) {
                return Err(Error::precondition(format!(
                    "letter {w} does not map {} to {}",
                    self.points[k],
                    self.points[k + 1]
                )));
            }
        }
        for pair in self.letters.windows(2) {
            if pair[1] == pair[0].inverse() {
                return Err(Error::precondition(format!("word backtracks at {} {}", pair[0], pair[1])));
            }
        }
        Ok(())
    }
}

/// `steps` non-backtracking steps, the first being `first`.
fn walk_from(d: u64, first: (Letter, LatticePoint), steps: usize) -> Result<Vec<(Letter, LatticePoint)>> {
    let mut out = Vec::with_capacity(steps);
    if steps == 0 {
        return Ok(out);
    }
    out.push(first);
    while out.len() < steps {
        let (last, at) = *out.last().expect("nonempty");
        out.push(next_step(&at, d, last)?);
    }
    Ok(out)
}

/// `γ_x^{(ℓ)}` with the default orientation.
pub fn extend_trajectory(x: &LatticePoint, ell: usize, d: u64) -> Result<TrajectorySegment> {
    let [a, _] = linnik_step(x, d)?;
    extend_trajectory_oriented(x, ell, d, a.0)
}

/// `γ_x^{(ℓ)}` oriented so that `w₁ = first`, which must be one of the two
/// admissible letters at `x`.
pub fn extend_trajectory_oriented(x: &LatticePoint, ell: usize, d: u64, first: Letter) -> Result<TrajectorySegment> {
    let [a, b] = linnik_step(x, d)?;
    let (fwd, bwd) = if a.0 == first {
        (a, b)
    } else if b.0 == first {
        (b, a)
    } else {
        return Err(Error::precondition(format!("letter {first} does not map {x} into H_{d}")));
    };
    let forward = walk_from(d, fwd, ell)?;
    let backward = walk_from(d, bwd, ell)?;

    let mut points = Vec::with_capacity(2 * ell + 1);
    let mut letters = Vec::with_capacity(2 * ell);
    // x_{−k} is the k-th point of the backward walk and w_{1−k} = u_k⁻¹.
    for (u, p) in backward.iter().rev() {
        points.push(*p);
        letters.push(u.inverse());
    }
    points.push(*x);
    for (w, p) in &forward {
        points.push(*p);
        letters.push(*w);
    }
    Ok(TrajectorySegment { d, ell, points, letters })
}

/// Smallest `n ≥ 1` with `x_n` in the `SO₃(ℤ)`-orbit of `x` along the
/// forward trajectory.
pub fn orbit_period(x: &LatticePoint, d: u64) -> Result<u64> {
    orbit_period_with(x, d, &Budget::default())
}

pub fn orbit_period_with(x: &LatticePoint, d: u64, budget: &Budget) -> Result<u64> {
    let [first, _] = linnik_step(x, d)?;
    let target = orbit_representative(x);
    let limit = 24 * count_hd_with(d, budget)?;
    let (mut last, mut at) = first;
    for n in 1..=limit {
        if orbit_representative(&at) == target {
            return Ok(n);
        }
        (last, at) = next_step(&at, d, last)?;
    }
    Err(Error::Budget {
        what: "orbit period search",
        required: limit as u128 + 1,
        limit: limit as u128,
    })
}

/// Outcome of comparing two trajectories against the shadowing congruence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Shadowing {
    /// Letters agree on `−ℓ+1 ≤ i ≤ ℓ` in at least one alignment.
    pub words_agree: bool,
    /// `x ≡ ±x′ (mod 5^ℓ)`.
    pub congruent: bool,
}

pub fn shadowing_check(x: &LatticePoint, xp: &LatticePoint, ell: usize, d: u64) -> Result<Shadowing> {
    let gx = extend_trajectory(x, ell, d)?;
    let gy = extend_trajectory(xp, ell, d)?;
    let words_agree = gx.letters == gy.letters || gx.letters == gy.reversed().letters;
    Ok(Shadowing {
        words_agree,
        congruent: congruent_up_to_sign(x, xp, pow5(ell)?),
    })
}

fn pow5(ell: usize) -> Result<u64> {
    5u64.checked_pow(ell as u32).ok_or(Error::Overflow("5^ℓ"))
}

/// `x ≡ ±y (mod m)`.
pub fn congruent_up_to_sign(x: &LatticePoint, y: &LatticePoint, m: u64) -> bool {
    x.reduce_mod(m) == y.reduce_mod(m) || x.reduce_mod(m) == (-*y).reduce_mod(m)
}

type SegmentKey = (Vec<[u64; 3]>, Vec<Letter>);

fn segment_key(g: &TrajectorySegment, q: u64) -> SegmentKey {
    (g.points.iter().map(|p| p.reduce_mod(q)).collect(), g.letters.clone())
}

/// Orientation-independent key: two segments agree mod `q` in some
/// alignment exactly when their canonical keys are equal.
fn canonical_key(g: &TrajectorySegment, q: u64) -> SegmentKey {
    let k = segment_key(g, q);
    let r = segment_key(&g.reversed(), q);
    k.min(r)
}

/// `true` when the two segments agree mod `q` (points and letters) in
/// either alignment.
pub fn segments_agree_mod(g: &TrajectorySegment, h: &TrajectorySegment, q: u64) -> bool {
    let k = segment_key(g, q);
    k == segment_key(h, q) || k == segment_key(&h.reversed(), q)
}

fn check_sigma_args(d: u64, ell: usize, q: u64) -> Result<()> {
    if ell == 0 {
        return Err(Error::precondition("ℓ must be at least 1"));
    }
    if q < 2 || gcd(q, 30) != 1 || gcd(q, d) != 1 {
        return Err(Error::precondition(format!("q = {q} must be coprime to 30·d = {}", 30 * d as u128)));
    }
    Ok(())
}

/// Σ(d, ℓ, q): ordered pairs `(x, x′) ∈ H_d²` whose truncated trajectories
/// agree mod `q`.
pub fn sigma_count(d: u64, ell: usize, q: u64) -> Result<u128> {
    sigma_count_with(d, ell, q, &Budget::default())
}

pub fn sigma_count_with(d: u64, ell: usize, q: u64, budget: &Budget) -> Result<u128> {
    check_sigma_args(d, ell, q)?;
    let n = count_hd_with(d, budget)? as u128;
    Budget::check("sigma pair scan", n * n, budget.max_pairs)?;
    let points = enumerate_hd_with(d, budget)?;
    let keys: Vec<SegmentKey> = points
        .par_iter()
        .map(|x| extend_trajectory(x, ell, d).map(|g| canonical_key(&g, q)))
        .collect::<Result<_>>()?;
    let mut classes: HashMap<SegmentKey, u128> = HashMap::new();
    for k in keys {
        *classes.entry(k).or_default() += 1;
    }
    Ok(classes.values().map(|c| c * c).sum())
}

/// The off-diagonal ordered pairs counted by Σ(d, ℓ, q), sorted.
pub fn sigma_pairs(d: u64, ell: usize, q: u64, budget: &Budget) -> Result<Vec<(LatticePoint, LatticePoint)>> {
    check_sigma_args(d, ell, q)?;
    let points = enumerate_hd_with(d, budget)?;
    let n = points.len() as u128;
    Budget::check("sigma pair scan", n * n, budget.max_pairs)?;
    let keyed: Vec<(SegmentKey, LatticePoint)> = points
        .par_iter()
        .map(|x| extend_trajectory(x, ell, d).map(|g| (canonical_key(&g, q), *x)))
        .collect::<Result<_>>()?;
    let mut classes: HashMap<&SegmentKey, Vec<LatticePoint>> = HashMap::new();
    for (k, x) in &keyed {
        classes.entry(k).or_default().push(*x);
    }
    let mut pairs = Vec::new();
    for members in classes.values() {
        for a in members {
            for b in members {
                if a != b {
                    pairs.push((*a, *b));
                }
            }
        }
    }
    pairs.sort_unstable();
    Ok(pairs)
}
