//! Hurwitz quaternions, the six-letter alphabet and the rotations of angle
//! `acos(−4/5)` about the coordinate axes.
//!
//! The letter matrices below are the walk's source of truth. The quaternion
//! side (`rotation_of` applied to the norm-10 quaternions `1 ± 3i, 1 ± 3j,
//! 1 ± 3k`) reproduces the same six rotations as a set; the letter a given
//! quaternion lands on depends on the conjugation convention, so callers
//! should use [`quaternion_for_letter`] rather than assume a pairing.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticePoint;

/// A Hurwitz quaternion `(n0 + n1 i + n2 j + n3 k) / 2` with all `nᵢ` of
/// the same parity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HurwitzQuaternion {
    n: [i64; 4],
}

impl HurwitzQuaternion {
    /// From doubled coordinates; fails unless all four share a parity.
    pub fn from_doubled(n: [i64; 4]) -> Result<Self> {
        let parity = n[0].rem_euclid(2);
        if n.iter().any(|v| v.rem_euclid(2) != parity) {
            return Err(Error::precondition(format!(
                "doubled coordinates {n:?} mix parities; not a Hurwitz quaternion"
            )));
        }
        Ok(HurwitzQuaternion { n })
    }

    /// The Lipschitz quaternion `a + b i + c j + d k`.
    pub fn lipschitz(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let dbl = |v: i64| v.checked_mul(2).ok_or(Error::Overflow("quaternion construction"));
        Ok(HurwitzQuaternion {
            n: [dbl(a)?, dbl(b)?, dbl(c)?, dbl(d)?],
        })
    }

    pub fn one() -> Self {
        HurwitzQuaternion { n: [2, 0, 0, 0] }
    }

    /// The pure quaternion `x i + y j + z k`.
    pub fn pure(p: &LatticePoint) -> Result<Self> {
        Self::lipschitz(0, p.x, p.y, p.z)
    }

    pub fn doubled(&self) -> [i64; 4] {
        self.n
    }

    /// Reduced norm `Nr(q) = q q̄`.
    pub fn norm(&self) -> u128 {
        let s: u128 = self.n.iter().map(|&v| (v as i128 * v as i128) as u128).sum();
        s / 4
    }

    /// Reduced trace `tr(q) = q + q̄`, which equals the doubled real part.
    pub fn trace(&self) -> i64 {
        self.n[0]
    }

    pub fn conjugate(&self) -> Self {
        HurwitzQuaternion {
            n: [self.n[0], -self.n[1], -self.n[2], -self.n[3]],
        }
    }

    pub fn is_pure(&self) -> bool {
        self.n[0] == 0
    }

    /// Exact Hamilton product with overflow detection.
    pub fn checked_mul(&self, other: &HurwitzQuaternion) -> Result<HurwitzQuaternion> {
        let a = self.n.map(|v| v as i128);
        let b = other.n.map(|v| v as i128);
        // Products of i64 fit in i128; the four-term sums can only overflow
        // in pathological cases, which checked_add still catches.
        let sum4 = |t: [i128; 4]| -> Result<i128> {
            t.iter()
                .try_fold(0i128, |acc, &x| acc.checked_add(x))
                .ok_or(Error::Overflow("quaternion product"))
        };
        let r = [
            sum4([a[0] * b[0], -(a[1] * b[1]), -(a[2] * b[2]), -(a[3] * b[3])])?,
            sum4([a[0] * b[1], a[1] * b[0], a[2] * b[3], -(a[3] * b[2])])?,
            sum4([a[0] * b[2], -(a[1] * b[3]), a[2] * b[0], a[3] * b[1]])?,
            sum4([a[0] * b[3], a[1] * b[2], -(a[2] * b[1]), a[3] * b[0]])?,
        ];
        // (P/2)(Q/2) = (PQ/2)/2: the doubled product is PQ/2, always integral
        // for Hurwitz inputs.
        let mut n = [0i64; 4];
        for (dst, v) in n.iter_mut().zip(r) {
            debug_assert_eq!(v.rem_euclid(2), 0);
            *dst = i64::try_from(v / 2).map_err(|_| Error::Overflow("quaternion product"))?;
        }
        HurwitzQuaternion::from_doubled(n)
    }
}

impl fmt::Display for HurwitzQuaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let half = |v: i64| {
            if v % 2 == 0 {
                format!("{}", v / 2)
            } else {
                format!("{v}/2")
            }
        };
        write!(
            f,
            "{} + {}i + {}j + {}k",
            half(self.n[0]),
            half(self.n[1]),
            half(self.n[2]),
            half(self.n[3])
        )
    }
}

/// One of the six letters `A, A⁻¹, B, B⁻¹, C, C⁻¹`, in that enum order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Letter {
    A,
    AInv,
    B,
    BInv,
    C,
    CInv,
}

impl Letter {
    pub const ALL: [Letter; 6] = [Letter::A, Letter::AInv, Letter::B, Letter::BInv, Letter::C, Letter::CInv];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Letter {
        Self::ALL[i]
    }

    pub fn inverse(self) -> Letter {
        Self::ALL[self.index() ^ 1]
    }

    /// Integer matrix equal to five times the rotation.
    pub fn scaled_matrix(self) -> [[i64; 3]; 3] {
        let m = match self {
            Letter::A | Letter::AInv => A5,
            Letter::B | Letter::BInv => B5,
            Letter::C | Letter::CInv => C5,
        };
        if self.index() % 2 == 1 {
            transpose(&m)
        } else {
            m
        }
    }

    /// `5 · w · p`, exact.
    pub fn apply_scaled(self, p: &LatticePoint) -> LatticePoint {
        LatticePoint::from(mat_vec(&self.scaled_matrix(), &p.coords()))
    }

    /// `w · p` when it is integral.
    pub fn apply(self, p: &LatticePoint) -> Option<LatticePoint> {
        let v = mat_vec(&self.scaled_matrix(), &p.coords());
        v.iter().all(|c| c % 5 == 0).then(|| LatticePoint::new(v[0] / 5, v[1] / 5, v[2] / 5))
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Letter::A => "A",
            Letter::AInv => "A^-1",
            Letter::B => "B",
            Letter::BInv => "B^-1",
            Letter::C => "C",
            Letter::CInv => "C^-1",
        })
    }
}

impl FromStr for Letter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Letter> {
        let t = s.trim();
        let (base, inv) = match t.strip_suffix("^-1").or_else(|| t.strip_suffix("-1")).or_else(|| t.strip_suffix('\'')) {
            Some(b) => (b, true),
            None => (t, false),
        };
        let letter = match base {
            "A" => Letter::A,
            "B" => Letter::B,
            "C" => Letter::C,
            _ => return Err(Error::precondition(format!("unknown letter {s:?}"))),
        };
        Ok(if inv { letter.inverse() } else { letter })
    }
}

impl TryFrom<String> for Letter {
    type Error = Error;
    fn try_from(s: String) -> Result<Letter> {
        s.parse()
    }
}

impl From<Letter> for String {
    fn from(l: Letter) -> String {
        l.to_string()
    }
}

const A5: [[i64; 3]; 3] = [[5, 0, 0], [0, -4, 3], [0, -3, -4]];
const B5: [[i64; 3]; 3] = [[-4, 0, 3], [0, 5, 0], [-3, 0, -4]];
const C5: [[i64; 3]; 3] = [[-4, -3, 0], [3, -4, 0], [0, 0, 5]];

fn transpose(m: &[[i64; 3]; 3]) -> [[i64; 3]; 3] {
    let mut t = [[0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = m[j][i];
        }
    }
    t
}

fn mat_vec(m: &[[i64; 3]; 3], v: &[i64; 3]) -> [i64; 3] {
    [0, 1, 2].map(|i| m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2])
}

/// A 3×3 rational matrix stored as integer numerators over one positive
/// denominator, kept in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RationalMatrix3 {
    num: [[i64; 3]; 3],
    den: i64,
}

impl RationalMatrix3 {
    pub fn new(num: [[i64; 3]; 3], den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::precondition("zero denominator"));
        }
        let (num, den) = if den < 0 { (num.map(|r| r.map(|v| -v)), -den) } else { (num, den) };
        let g = num
            .iter()
            .flatten()
            .fold(den as u64, |g, &v| crate::lattice::gcd(g, v.unsigned_abs()));
        let g = g.max(1) as i64;
        Ok(RationalMatrix3 {
            num: num.map(|r| r.map(|v| v / g)),
            den: den / g,
        })
    }

    pub fn identity() -> Self {
        RationalMatrix3 {
            num: [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
            den: 1,
        }
    }

    pub fn numerators(&self) -> [[i64; 3]; 3] {
        self.num
    }

    pub fn denominator(&self) -> i64 {
        self.den
    }

    pub fn transpose(&self) -> Self {
        RationalMatrix3 {
            num: transpose(&self.num),
            den: self.den,
        }
    }

    pub fn column(&self, j: usize) -> [i64; 3] {
        [self.num[0][j], self.num[1][j], self.num[2][j]]
    }

    pub fn checked_mul(&self, other: &RationalMatrix3) -> Result<Self> {
        let mut out = [[0i64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let s: i128 = (0..3).map(|k| self.num[i][k] as i128 * other.num[k][j] as i128).sum();
                out[i][j] = i64::try_from(s).map_err(|_| Error::Overflow("matrix product"))?;
            }
        }
        let den = self.den.checked_mul(other.den).ok_or(Error::Overflow("matrix product"))?;
        RationalMatrix3::new(out, den)
    }

    /// `M v` as numerators over [`RationalMatrix3::denominator`].
    pub fn apply_numerators(&self, v: &LatticePoint) -> [i64; 3] {
        mat_vec(&self.num, &v.coords())
    }

    /// Determinant as a reduced fraction `(numerator, denominator)`.
    pub fn determinant(&self) -> (i128, i128) {
        let m = self.num.map(|r| r.map(|v| v as i128));
        let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        let den = (self.den as i128).pow(3);
        let g = gcd_i128(det, den);
        (det / g, den / g)
    }

    /// `MᵀM = I` exactly.
    pub fn is_orthogonal(&self) -> bool {
        self.transpose().checked_mul(self).map(|p| p == Self::identity()).unwrap_or(false)
    }
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

impl fmt::Display for RationalMatrix3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(1/{})[", self.den)?;
        for (i, r) in self.num.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{} {} {}", r[0], r[1], r[2])?;
        }
        f.write_str("]")
    }
}

/// The rotation matrix of `w` (denominator 5, or 1 on the fixed axis).
pub fn letter_matrix(w: Letter) -> RationalMatrix3 {
    RationalMatrix3::new(w.scaled_matrix(), 5).expect("nonzero denominator")
}

/// The six norm-10 quaternions `1 + 3i, 1 − 3i, 1 + 3j, 1 − 3j, 1 + 3k, 1 − 3k`.
pub fn a5_quaternions() -> [HurwitzQuaternion; 6] {
    let q = |b, c, d| HurwitzQuaternion::lipschitz(1, b, c, d).expect("small coordinates");
    [q(3, 0, 0), q(-3, 0, 0), q(0, 3, 0), q(0, -3, 0), q(0, 0, 3), q(0, 0, -3)]
}

/// The matrix of `v ↦ r̄ v r / Nr(r)` on pure quaternions in the basis
/// `(i, j, k)`.
pub fn rotation_of(r: &HurwitzQuaternion) -> Result<RationalMatrix3> {
    let nr = r.norm();
    if nr == 0 {
        return Err(Error::ZeroNorm);
    }
    let rbar = r.conjugate();
    let mut num = [[0i64; 3]; 3];
    for j in 0..3 {
        let mut e = [0i64; 4];
        e[j + 1] = 2;
        let basis = HurwitzQuaternion::from_doubled(e)?;
        let image = rbar.checked_mul(&basis)?.checked_mul(r)?;
        let doubled = image.doubled();
        debug_assert_eq!(doubled[0], 0);
        for i in 0..3 {
            num[i][j] = doubled[i + 1];
        }
    }
    // image = doubled / 2, then divided by Nr(r).
    let den = i64::try_from(2 * nr).map_err(|_| Error::Overflow("rotation_of"))?;
    RationalMatrix3::new(num, den)
}

/// The norm-10 quaternion whose conjugation action is the rotation of `w`.
pub fn quaternion_for_letter(w: Letter) -> HurwitzQuaternion {
    let target = letter_matrix(w);
    a5_quaternions()
        .into_iter()
        .find(|r| rotation_of(r).map(|m| m == target).unwrap_or(false))
        .expect("every letter matrix arises from a norm-10 quaternion")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lq(a: i64, b: i64, c: i64, d: i64) -> HurwitzQuaternion {
        HurwitzQuaternion::lipschitz(a, b, c, d).unwrap()
    }

    #[test]
    fn hamilton_relations() {
        let i = lq(0, 1, 0, 0);
        let j = lq(0, 0, 1, 0);
        let k = lq(0, 0, 0, 1);
        assert_eq!(i.checked_mul(&j).unwrap(), k);
        assert_eq!(j.checked_mul(&k).unwrap(), i);
        assert_eq!(k.checked_mul(&i).unwrap(), j);
        assert_eq!(j.checked_mul(&i).unwrap(), lq(0, 0, 0, -1));
        let q = HurwitzQuaternion::from_doubled([1, -3, 5, 7]).unwrap();
        assert_eq!(q.checked_mul(&HurwitzQuaternion::one()).unwrap(), q);
    }

    #[test]
    fn norm_ten_product() {
        let p = lq(1, 3, 0, 0);
        let prod = p.checked_mul(&lq(1, -3, 0, 0)).unwrap();
        assert_eq!(prod, lq(10, 0, 0, 0));
        assert_eq!(p.norm(), 10);
    }

    #[test]
    fn parity_invariant() {
        assert!(HurwitzQuaternion::from_doubled([1, 1, 1, 2]).is_err());
        let h = HurwitzQuaternion::from_doubled([1, 1, 1, 1]).unwrap();
        assert_eq!(h.norm(), 1);
        assert_eq!(h.trace(), 1);
    }

    #[test]
    fn overflow_is_reported() {
        let big = HurwitzQuaternion::from_doubled([i64::MAX - 1, 0, 0, 0]).unwrap();
        assert_eq!(big.checked_mul(&big), Err(Error::Overflow("quaternion product")));
    }

    #[test]
    fn a5_set() {
        let qs = a5_quaternions();
        assert!(qs.iter().all(|q| q.norm() == 10 && q.trace() == 2));
        assert!(qs.contains(&lq(1, -3, 0, 0)));
        for q in &qs {
            assert!(qs.contains(&q.conjugate()));
        }
    }

    #[test]
    fn rotation_of_one_minus_3i() {
        let m = rotation_of(&lq(1, -3, 0, 0)).unwrap();
        assert_eq!(m.denominator(), 5);
        assert_eq!(m.column(0), [5, 0, 0]);
        assert_eq!(m.column(1), [0, -4, 3]);
        assert_eq!(m.column(2), [0, -3, -4]);
        assert_eq!(rotation_of(&HurwitzQuaternion::one()).unwrap(), RationalMatrix3::identity());
        assert_eq!(
            rotation_of(&HurwitzQuaternion::from_doubled([0; 4]).unwrap()),
            Err(Error::ZeroNorm)
        );
    }

    #[test]
    fn rotation_set_matches_letter_matrices() {
        let mut from_quats: Vec<_> = a5_quaternions().iter().map(|r| rotation_of(r).unwrap().numerators()).collect();
        let mut from_letters: Vec<_> = Letter::ALL.iter().map(|&w| letter_matrix(w).numerators()).collect();
        from_quats.sort();
        from_letters.sort();
        assert_eq!(from_quats, from_letters);
        for w in Letter::ALL {
            assert_eq!(rotation_of(&quaternion_for_letter(w)).unwrap(), letter_matrix(w));
        }
    }

    #[test]
    fn letter_matrices_are_rotations() {
        for w in Letter::ALL {
            let m = letter_matrix(w);
            assert!(m.is_orthogonal(), "{w}");
            assert_eq!(m.determinant(), (1, 1));
            assert_eq!(m.denominator(), 5);
            assert_eq!(letter_matrix(w.inverse()), m.transpose());
            assert_eq!(m.checked_mul(&letter_matrix(w.inverse())).unwrap(), RationalMatrix3::identity());
            assert_eq!(w.inverse().inverse(), w);
        }
    }

    #[test]
    fn letter_images_of_10_1_0() {
        let p = LatticePoint::new(10, 1, 0);
        assert_eq!(letter_matrix(Letter::A).apply_numerators(&p), [50, -4, -3]);
        assert_eq!(Letter::A.apply(&p), None);
        assert_eq!(Letter::B.apply(&p), Some(LatticePoint::new(-8, 1, -6)));
    }

    #[test]
    fn letter_parse_roundtrip() {
        for w in Letter::ALL {
            assert_eq!(w.to_string().parse::<Letter>().unwrap(), w);
        }
        assert_eq!("C-1".parse::<Letter>().unwrap(), Letter::CInv);
        assert!("D".parse::<Letter>().is_err());
    }
}
