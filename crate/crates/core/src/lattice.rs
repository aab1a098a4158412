//! Integer points on the sphere `x² + y² + z² = d` and the signed
//! permutation symmetries acting on them.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};

/// A point of `ℤ³`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i64; 3]", into = "[i64; 3]")]
pub struct LatticePoint {
    pub x: i64,
    pub y: i64,
    pub z: i64,
}

impl LatticePoint {
    pub const fn new(x: i64, y: i64, z: i64) -> Self {
        LatticePoint { x, y, z }
    }

    pub fn coords(&self) -> [i64; 3] {
        [self.x, self.y, self.z]
    }

    /// `x² + y² + z²`, exact for every `i64` input.
    pub fn norm(&self) -> u128 {
        let sq = |v: i64| (v as i128 * v as i128) as u128;
        sq(self.x) + sq(self.y) + sq(self.z)
    }

    pub fn dot(&self, other: &LatticePoint) -> i128 {
        self.x as i128 * other.x as i128 + self.y as i128 * other.y as i128 + self.z as i128 * other.z as i128
    }

    /// Coordinates reduced into `[0, m)`.
    pub fn reduce_mod(&self, m: u64) -> [u64; 3] {
        let r = |v: i64| v.rem_euclid(m as i64) as u64;
        [r(self.x), r(self.y), r(self.z)]
    }
}

impl std::ops::Neg for LatticePoint {
    type Output = LatticePoint;
    fn neg(self) -> LatticePoint {
        LatticePoint::new(-self.x, -self.y, -self.z)
    }
}

impl From<[i64; 3]> for LatticePoint {
    fn from(c: [i64; 3]) -> Self {
        LatticePoint::new(c[0], c[1], c[2])
    }
}

impl From<LatticePoint> for [i64; 3] {
    fn from(p: LatticePoint) -> Self {
        p.coords()
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.x, self.y, self.z)
    }
}

impl std::str::FromStr for LatticePoint {
    type Err = Error;

    /// Parses `x,y,z`, optionally wrapped in parentheses or brackets.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_matches(|c| matches!(c, '(' | ')' | '[' | ']'));
        let parts: Vec<_> = inner.split(',').map(|t| t.trim().parse::<i64>()).collect();
        match parts.as_slice() {
            [Ok(x), Ok(y), Ok(z)] => Ok(LatticePoint::new(*x, *y, *z)),
            _ => Err(Error::precondition(format!("cannot parse point {s:?}, expected x,y,z"))),
        }
    }
}

/// Exact integer square root, `⌊√n⌋`.
pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn perfect_square_root(n: u128) -> Option<u128> {
    let r = isqrt(n);
    (r * r == n).then_some(r)
}

/// Whether `d` is a sum of three squares, i.e. not of the form `4^a (8b − 1)`.
pub fn legendre_representable(d: u64) -> bool {
    if d == 0 {
        return true;
    }
    let mut m = d;
    while m % 4 == 0 {
        m /= 4;
    }
    m % 8 != 7
}

pub fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

pub fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `gcd(|x|, |y|, |z|) = 1`.
pub fn is_primitive(p: &LatticePoint) -> bool {
    let g = gcd(gcd(p.x.unsigned_abs(), p.y.unsigned_abs()), p.z.unsigned_abs());
    g == 1
}

fn check_d(d: u64, budget: &Budget) -> Result<()> {
    if d == 0 {
        return Err(Error::precondition("d must be positive"));
    }
    Budget::check("sphere enumeration (d)", d as u128, budget.max_d as u128)
}

/// The nonnegative solutions `0 ≤ x, 0 ≤ y, 0 ≤ z` of `x² + y² + z² = d`.
fn nonnegative_octant(d: u64) -> Vec<[i64; 3]> {
    let d = d as u128;
    let xmax = isqrt(d) as i64;
    let per_x: Vec<Vec<[i64; 3]>> = (0..=xmax)
        .into_par_iter()
        .map(|x| {
            let rx = d - (x as u128 * x as u128);
            let ymax = isqrt(rx) as i64;
            (0..=ymax)
                .filter_map(|y| {
                    let rz = rx - (y as u128 * y as u128);
                    perfect_square_root(rz).map(|z| [x, y, z as i64])
                })
                .collect()
        })
        .collect();
    per_x.into_iter().flatten().collect()
}

fn sign_variants(c: [i64; 3]) -> impl Iterator<Item = LatticePoint> {
    let xs: &[i64] = if c[0] == 0 { &[1] } else { &[1, -1] };
    let ys: &[i64] = if c[1] == 0 { &[1] } else { &[1, -1] };
    let zs: &[i64] = if c[2] == 0 { &[1] } else { &[1, -1] };
    let mut out = Vec::with_capacity(8);
    for sx in xs {
        for sy in ys {
            for sz in zs {
                out.push(LatticePoint::new(sx * c[0], sy * c[1], sz * c[2]));
            }
        }
    }
    out.into_iter()
}

/// All of `H_d` in lexicographic order, under the default budget.
pub fn enumerate_hd(d: u64) -> Result<Vec<LatticePoint>> {
    enumerate_hd_with(d, &Budget::default())
}

/// All of `H_d` in lexicographic order.
pub fn enumerate_hd_with(d: u64, budget: &Budget) -> Result<Vec<LatticePoint>> {
    check_d(d, budget)?;
    let mut points: Vec<LatticePoint> = nonnegative_octant(d).into_iter().flat_map(sign_variants).collect();
    points.sort_unstable();
    Ok(points)
}

/// `|H_d|` without materializing the points.
pub fn count_hd_with(d: u64, budget: &Budget) -> Result<u64> {
    check_d(d, budget)?;
    Ok(nonnegative_octant(d)
        .into_iter()
        .map(|c| 1u64 << c.iter().filter(|&&v| v != 0).count())
        .sum())
}

pub fn count_hd(d: u64) -> Result<u64> {
    count_hd_with(d, &Budget::default())
}

/// A signed permutation matrix of determinant `+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignedRotation {
    /// `perm[i]` is the source coordinate of output coordinate `i`.
    perm: [usize; 3],
    signs: [i8; 3],
}

const PERMUTATIONS: [([usize; 3], i8); 6] = [
    ([0, 1, 2], 1),
    ([1, 2, 0], 1),
    ([2, 0, 1], 1),
    ([0, 2, 1], -1),
    ([2, 1, 0], -1),
    ([1, 0, 2], -1),
];

impl SignedRotation {
    /// The 24 elements of `SO₃(ℤ)`.
    pub fn all() -> Vec<SignedRotation> {
        Self::generate(false)
    }

    /// The 12 elements of `SO₃(ℤ)⁺`, those permuting the coordinate axes evenly.
    pub fn even() -> Vec<SignedRotation> {
        Self::generate(true)
    }

    fn generate(even_only: bool) -> Vec<SignedRotation> {
        let mut out = Vec::new();
        for (perm, parity) in PERMUTATIONS {
            if even_only && parity < 0 {
                continue;
            }
            for bits in 0..8u8 {
                let signs = [0, 1, 2].map(|i| if bits >> i & 1 == 1 { -1i8 } else { 1 });
                if signs.iter().product::<i8>() * parity == 1 {
                    out.push(SignedRotation { perm, signs });
                }
            }
        }
        out
    }

    pub fn matrix(&self) -> [[i64; 3]; 3] {
        let mut m = [[0i64; 3]; 3];
        for i in 0..3 {
            m[i][self.perm[i]] = self.signs[i] as i64;
        }
        m
    }

    pub fn apply(&self, p: &LatticePoint) -> LatticePoint {
        let c = p.coords();
        LatticePoint::new(
            self.signs[0] as i64 * c[self.perm[0]],
            self.signs[1] as i64 * c[self.perm[1]],
            self.signs[2] as i64 * c[self.perm[2]],
        )
    }

    /// Reduction of the action modulo `m`, on residue triples.
    pub fn apply_mod(&self, c: [u64; 3], m: u64) -> [u64; 3] {
        let f = |i: usize| {
            let v = c[self.perm[i]] % m;
            if self.signs[i] < 0 && v != 0 {
                m - v
            } else {
                v
            }
        };
        [f(0), f(1), f(2)]
    }
}

/// One orbit of a finite group acting on a point set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Orbit {
    /// Lexicographic minimum of the orbit.
    pub representative: LatticePoint,
    /// Sorted members.
    pub members: Vec<LatticePoint>,
}

/// Partition `points` into orbits of `SO₃(ℤ)` (or `SO₃(ℤ)⁺` when `even_only`).
///
/// Orbits are returned sorted by representative.
pub fn so3z_orbits(points: &[LatticePoint], even_only: bool) -> Result<Vec<Orbit>> {
    let group = if even_only { SignedRotation::even() } else { SignedRotation::all() };
    let present: HashSet<LatticePoint> = points.iter().copied().collect();
    let mut orbits: BTreeMap<LatticePoint, Vec<LatticePoint>> = BTreeMap::new();
    let mut seen: HashSet<LatticePoint> = HashSet::new();
    for p in points {
        if seen.contains(p) {
            continue;
        }
        let mut members: Vec<LatticePoint> = group.iter().map(|g| g.apply(p)).collect();
        members.sort_unstable();
        members.dedup();
        if let Some(missing) = members.iter().find(|m| !present.contains(m)) {
            return Err(Error::precondition(format!(
                "point set is not closed under the group: {missing} (image of {p}) is missing"
            )));
        }
        seen.extend(members.iter().copied());
        orbits.insert(members[0], members);
    }
    Ok(orbits
        .into_iter()
        .map(|(representative, members)| Orbit {
            representative,
            members,
        })
        .collect())
}

/// Canonical (lexicographically least) element of the `SO₃(ℤ)` orbit of `p`.
pub fn orbit_representative(p: &LatticePoint) -> LatticePoint {
    SignedRotation::all().iter().map(|g| g.apply(p)).min().unwrap_or(*p)
}
