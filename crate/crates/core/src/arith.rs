//! Positive definite binary quadratic forms, form class groups, the
//! orthogonal-complement form of a sphere point, and representation counts
//! by `x² + y² + z²`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::lattice::{count_hd_with, enumerate_hd_with, is_squarefree, so3z_orbits, LatticePoint};

/// The form `a X² + b XY + c Y²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BinaryForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `(u, v, g)` with `u·a + v·b = g = gcd(a, b) ≥ 0`.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let k = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - k * r1);
        (s0, s1) = (s1, s0 - k * s1);
        (t0, t1) = (t1, t0 - k * t1);
    }
    if r0 < 0 {
        (-s0, -t0, -r0)
    } else {
        (s0, t0, r0)
    }
}

fn to_i64(v: i128, what: &'static str) -> Result<i64> {
    i64::try_from(v).map_err(|_| Error::Overflow(what))
}

impl BinaryForm {
    pub const fn new(a: i64, b: i64, c: i64) -> Self {
        BinaryForm { a, b, c }
    }

    /// `b² − 4ac`.
    pub fn discriminant(&self) -> i128 {
        let (a, b, c) = (self.a as i128, self.b as i128, self.c as i128);
        b * b - 4 * a * c
    }

    pub fn is_positive_definite(&self) -> bool {
        self.a > 0 && self.discriminant() < 0
    }

    pub fn is_primitive(&self) -> bool {
        gcd_i128(gcd_i128(self.a as i128, self.b as i128), self.c as i128) == 1
    }

    /// `|b| ≤ a ≤ c`, with `b ≥ 0` when `|b| = a` or `a = c`.
    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        b.abs() <= a && a <= c && (b >= 0 || (b.abs() != a && a != c))
    }

    pub fn value(&self, x: i64, y: i64) -> i128 {
        let (x, y) = (x as i128, y as i128);
        self.a as i128 * x * x + self.b as i128 * x * y + self.c as i128 * y * y
    }

    /// The inverse class representative `(a, −b, c)`.
    pub fn opposite(&self) -> BinaryForm {
        BinaryForm::new(self.a, -self.b, self.c)
    }

    fn check_definite(&self) -> Result<()> {
        let disc = self.discriminant();
        if disc == 0 {
            return Err(Error::Degenerate { a: self.a, b: self.b, c: self.c });
        }
        if disc > 0 || self.a <= 0 {
            return Err(Error::Indefinite { a: self.a, b: self.b, c: self.c });
        }
        Ok(())
    }

    /// The unique reduced form properly equivalent to `self`.
    pub fn reduce(&self) -> Result<BinaryForm> {
        self.check_definite()?;
        let disc = self.discriminant();
        let (mut a, mut b) = (self.a as i128, self.b as i128);
        let mut c;
        loop {
            // Translate b into (−a, a].
            let two_a = 2 * a;
            let mut r = b.rem_euclid(two_a);
            if r > a {
                r -= two_a;
            }
            b = r;
            c = (b * b - disc) / (4 * a);
            if a > c {
                // (a, b, c) ~ (c, −b, a); c is recomputed from the discriminant.
                a = c;
                b = -b;
                continue;
            }
            if a == c && b < 0 {
                b = -b;
            }
            break;
        }
        Ok(BinaryForm {
            a: to_i64(a, "form reduction")?,
            b: to_i64(b, "form reduction")?,
            c: to_i64(c, "form reduction")?,
        })
    }
}

/// Dirichlet composition of two primitive forms of the same negative
/// discriminant, unreduced.
fn compose_raw(f1: &BinaryForm, f2: &BinaryForm) -> Result<BinaryForm> {
    let disc = f1.discriminant();
    let (mut f1, mut f2) = (*f1, *f2);
    if f1.a > f2.a {
        std::mem::swap(&mut f1, &mut f2);
    }
    let (a1, b1) = (f1.a as i128, f1.b as i128);
    let (a2, b2, c2) = (f2.a as i128, f2.b as i128, f2.c as i128);
    let s = (b1 + b2) / 2;
    let n = b2 - s;
    let (y1, d) = if a2 % a1 == 0 {
        (0, a1)
    } else {
        let (u, _, g) = ext_gcd(a2, a1);
        (u, g)
    };
    let (x2, y2, d1) = if s % d == 0 {
        (0, -1, d)
    } else {
        let (u, v, g) = ext_gcd(s, d);
        (u, -v, g)
    };
    let v1 = a1 / d1;
    let v2 = a2 / d1;
    let r = (y1 * y2 * n - x2 * c2).rem_euclid(v1);
    let b3 = b2 + 2 * v2 * r;
    let a3 = v1 * v2;
    let num = b3 * b3 - disc;
    if num % (4 * a3) != 0 {
        return Err(Error::precondition("composition produced a non-integral form"));
    }
    let c3 = num / (4 * a3);
    Ok(BinaryForm {
        a: to_i64(a3, "composition")?,
        b: to_i64(b3, "composition")?,
        c: to_i64(c3, "composition")?,
    })
}

/// Reduced primitive forms of one negative discriminant under composition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassGroup {
    pub discriminant: i64,
    /// Sorted reduced forms, one per class.
    pub forms: Vec<BinaryForm>,
}

pub fn class_group(disc: i64) -> Result<ClassGroup> {
    if disc >= 0 || !matches!(disc.rem_euclid(4), 0 | 1) {
        return Err(Error::InvalidDiscriminant(disc));
    }
    let n = -(disc as i128);
    let mut forms = Vec::new();
    let mut a: i128 = 1;
    while 3 * a * a <= n {
        for b in -a + 1..=a {
            if (b - disc as i128).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - disc as i128;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            let f = BinaryForm::new(a as i64, b as i64, c as i64);
            if c >= a && f.is_reduced() && f.is_primitive() {
                forms.push(f);
            }
        }
        a += 1;
    }
    forms.sort_unstable();
    Ok(ClassGroup {
        discriminant: disc,
        forms,
    })
}

impl ClassGroup {
    /// The class number.
    pub fn order(&self) -> usize {
        self.forms.len()
    }

    pub fn identity(&self) -> BinaryForm {
        let d = self.discriminant;
        if d.rem_euclid(4) == 0 {
            BinaryForm::new(1, 0, -d / 4)
        } else {
            BinaryForm::new(1, 1, (1 - d) / 4)
        }
    }

    pub fn contains(&self, f: &BinaryForm) -> bool {
        self.forms.binary_search(f).is_ok()
    }

    fn member(&self, f: &BinaryForm) -> Result<()> {
        if self.contains(f) {
            Ok(())
        } else {
            Err(Error::NotInGroup {
                a: f.a,
                b: f.b,
                c: f.c,
                disc: self.discriminant,
            })
        }
    }

    /// The class of a primitive form of this discriminant, reduced.
    pub fn class_of(&self, f: &BinaryForm) -> Result<BinaryForm> {
        if f.discriminant() != self.discriminant as i128 {
            return Err(Error::NotInGroup {
                a: f.a,
                b: f.b,
                c: f.c,
                disc: self.discriminant,
            });
        }
        let r = f.reduce()?;
        self.member(&r)?;
        Ok(r)
    }

    pub fn compose(&self, f: &BinaryForm, g: &BinaryForm) -> Result<BinaryForm> {
        self.member(f)?;
        self.member(g)?;
        compose_raw(f, g)?.reduce()
    }

    pub fn inverse(&self, f: &BinaryForm) -> Result<BinaryForm> {
        self.member(f)?;
        f.opposite().reduce()
    }

    pub fn pow(&self, f: &BinaryForm, n: u64) -> Result<BinaryForm> {
        self.member(f)?;
        let mut result = self.identity();
        let mut base = *f;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = self.compose(&result, &base)?;
            }
            base = self.compose(&base, &base)?;
            e >>= 1;
        }
        Ok(result)
    }

    /// Least `n ≥ 1` with `fⁿ = 1`.
    pub fn element_order(&self, f: &BinaryForm) -> Result<u64> {
        self.member(f)?;
        let id = self.identity();
        let mut x = *f;
        let mut n = 1;
        while x != id {
            x = self.compose(&x, f)?;
            n += 1;
        }
        Ok(n)
    }

    /// The subgroup generated by `g`, sorted.
    pub fn cyclic_subgroup(&self, g: &BinaryForm) -> Result<Vec<BinaryForm>> {
        self.member(g)?;
        let id = self.identity();
        let mut out = vec![id];
        let mut x = *g;
        while x != id {
            out.push(x);
            x = self.compose(&x, g)?;
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Order of the image of `f` in the quotient by `⟨g⟩`.
    pub fn order_modulo(&self, f: &BinaryForm, g: &BinaryForm) -> Result<u64> {
        let sub = self.cyclic_subgroup(g)?;
        self.member(f)?;
        let mut x = *f;
        let mut n = 1;
        while sub.binary_search(&x).is_err() {
            x = self.compose(&x, f)?;
            n += 1;
        }
        Ok(n)
    }

    pub fn is_cyclic(&self) -> Result<bool> {
        let h = self.order() as u64;
        for f in &self.forms {
            if self.element_order(f)? == h {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// `{f² : f ∈ G}`, sorted.
    pub fn squares(&self) -> Result<Vec<BinaryForm>> {
        let set: BTreeSet<BinaryForm> = self.forms.iter().map(|f| self.compose(f, f)).collect::<Result<_>>()?;
        Ok(set.into_iter().collect())
    }

    /// Number of classes with `f² = 1` (the ambiguous classes).
    pub fn two_torsion_count(&self) -> Result<usize> {
        let id = self.identity();
        let mut n = 0;
        for f in &self.forms {
            if self.compose(f, f)? == id {
                n += 1;
            }
        }
        Ok(n)
    }

    /// Reduced form of the class of a prime ideal above `p`: `(p, b, ·)`
    /// with `b² ≡ D (mod 4p)` and `b ∈ [0, 2p)` minimal.
    pub fn prime_above_form(&self, p: u64) -> Result<BinaryForm> {
        if p < 2 || !is_prime(p) {
            return Err(Error::precondition(format!("{p} is not prime")));
        }
        let four_p = 4 * p as i128;
        let disc = self.discriminant as i128;
        let b = (0..2 * p as i128)
            .find(|b| (b * b - disc).rem_euclid(four_p) == 0)
            .ok_or(Error::InertPrime {
                p,
                disc: self.discriminant,
            })?;
        let c = (b * b - disc) / four_p;
        self.class_of(&BinaryForm::new(p as i64, b as i64, to_i64(c, "prime form")?))
    }
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|k: &u64| k * k <= n).all(|k| n % k != 0)
}

/// Discriminant of `ℚ(√−d)` for squarefree `d`: `−d` if `d ≡ 3 (mod 4)`,
/// otherwise `−4d`.
pub fn field_discriminant(d: u64) -> Result<i64> {
    if d == 0 || !is_squarefree(d) {
        return Err(Error::precondition(format!("{d} is not a positive squarefree integer")));
    }
    let d = i64::try_from(d).map_err(|_| Error::Overflow("discriminant"))?;
    Ok(if d % 4 == 3 { -d } else { -4 * d })
}

/// The form induced on the rank-2 lattice `x^⊥ ∩ ℤ³` by an oriented basis
/// `(λ, λ′)` with `det(λ, λ′, x) > 0`, halved when `d ≡ 3 (mod 8)`, and
/// reduced.
pub fn perp_form(x: &LatticePoint, d: u64) -> Result<BinaryForm> {
    if x.norm() != d as u128 {
        return Err(Error::NormMismatch {
            point: *x,
            expected: d,
            found: x.norm(),
        });
    }
    if !crate::lattice::is_primitive(x) {
        return Err(Error::precondition(format!("{x} is not primitive")));
    }
    let (a, b, c) = (x.x as i128, x.y as i128, x.z as i128);
    let (mut v1, mut v2) = if a == 0 && b == 0 {
        ([1i128, 0, 0], [0i128, 1, 0])
    } else {
        let (s, t, g) = ext_gcd(a, b);
        ([b / g, -a / g, 0], [-c * s, -c * t, g])
    };
    let cross = [
        v1[1] * v2[2] - v1[2] * v2[1],
        v1[2] * v2[0] - v1[0] * v2[2],
        v1[0] * v2[1] - v1[1] * v2[0],
    ];
    let det = cross[0] * a + cross[1] * b + cross[2] * c;
    if det < 0 {
        std::mem::swap(&mut v1, &mut v2);
    }
    let dot = |u: &[i128; 3], v: &[i128; 3]| u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    let (mut fa, mut fb, mut fc) = (dot(&v1, &v1), 2 * dot(&v1, &v2), dot(&v2, &v2));
    if d % 8 == 3 {
        if fa % 2 != 0 || fb % 2 != 0 || fc % 2 != 0 {
            return Err(Error::precondition(format!("perp form of {x} is not divisible by 2")));
        }
        (fa, fb, fc) = (fa / 2, fb / 2, fc / 2);
    }
    BinaryForm {
        a: to_i64(fa, "perp form")?,
        b: to_i64(fb, "perp form")?,
        c: to_i64(fc, "perp form")?,
    }
    .reduce()
}

/// Summary of the perp map on `H̃*_d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PerpSummary {
    pub d: u64,
    pub discriminant: i64,
    pub class_number: usize,
    /// Size of `H̃*_d` (orbits of `SO₃(ℤ)⁺` for `d ≡ 1, 2 (mod 4)`, of
    /// `SO₃(ℤ)` for `d ≡ 3 (mod 4)`).
    pub orbit_count: usize,
    /// Image class → number of orbits mapping to it.
    #[serde(serialize_with = "fibers_as_list")]
    pub fibers: BTreeMap<BinaryForm, usize>,
    pub two_torsion: usize,
    /// Every fiber has `two_torsion` elements.
    pub fibers_uniform: bool,
    /// The image equals `f · G²` for any image class `f`.
    pub image_is_square_coset: bool,
    /// Every point's perp form has the field discriminant.
    pub discriminants_match: bool,
}

fn fibers_as_list<S: serde::Serializer>(m: &BTreeMap<BinaryForm, usize>, s: S) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Fiber<'a> {
        form: &'a BinaryForm,
        size: usize,
    }
    s.collect_seq(m.iter().map(|(form, &size)| Fiber { form, size }))
}

pub fn perp_summary(d: u64, budget: &Budget) -> Result<PerpSummary> {
    let disc = field_discriminant(d)?;
    let group = class_group(disc)?;
    let points = enumerate_hd_with(d, budget)?;
    let mut discriminants_match = true;
    for x in &points {
        if perp_form(x, d)?.discriminant() != disc as i128 {
            discriminants_match = false;
        }
    }
    let orbits = so3z_orbits(&points, d % 4 != 3)?;
    let mut fibers: BTreeMap<BinaryForm, usize> = BTreeMap::new();
    for o in &orbits {
        let f = group.class_of(&perp_form(&o.representative, d)?)?;
        *fibers.entry(f).or_default() += 1;
    }
    let two_torsion = group.two_torsion_count()?;
    let fibers_uniform = fibers.values().all(|&n| n == two_torsion);
    let image_is_square_coset = match fibers.keys().next() {
        None => false,
        Some(f0) => {
            let coset: BTreeSet<BinaryForm> = group
                .squares()?
                .iter()
                .map(|s| group.compose(f0, s))
                .collect::<Result<_>>()?;
            coset == fibers.keys().copied().collect()
        }
    };
    Ok(PerpSummary {
        d,
        discriminant: disc,
        class_number: group.order(),
        orbit_count: orbits.len(),
        fibers,
        two_torsion,
        fibers_uniform,
        image_is_square_coset,
        discriminants_match,
    })
}

/// Ordered pairs `(x₁, x₂) ∈ H_d²` with `x₁ · x₂ = e`.
pub fn dot_pair_count(d: u64, e: i64, budget: &Budget) -> Result<u128> {
    if e.unsigned_abs() > d {
        return Err(Error::precondition(format!("|e| = {} exceeds d = {d}", e.unsigned_abs())));
    }
    Ok(dot_product_distribution(d, budget)?.get(&e).copied().unwrap_or(0))
}

/// `e ↦ #{(x₁, x₂) ∈ H_d² : x₁ · x₂ = e}` over all occurring `e`.
pub fn dot_product_distribution(d: u64, budget: &Budget) -> Result<BTreeMap<i64, u128>> {
    let n = count_hd_with(d, budget)? as u128;
    Budget::check("dot product pair scan", n * n, budget.max_pairs)?;
    let points = enumerate_hd_with(d, budget)?;
    let partial: Vec<BTreeMap<i64, u128>> = points
        .par_iter()
        .map(|x| {
            let mut m = BTreeMap::new();
            for y in &points {
                *m.entry(x.dot(y) as i64).or_default() += 1;
            }
            m
        })
        .collect();
    let mut total = BTreeMap::new();
    for m in partial {
        for (k, v) in m {
            *total.entry(k).or_default() += v;
        }
    }
    Ok(total)
}

/// Upper bound for Σ(d, ℓ, q) by dot products: `|H_d|` plus the pairs with
/// `|x·x′| < d`, `x·x′ ≡ d (mod q²)` and `x·x′ ≡ ±d (mod 5^{2ℓ})`.
///
/// Agreement mod `q` gives `x′ ≡ x (mod q)`, while shadowing only gives
/// `x′ ≡ ±x (mod 5^ℓ)` with a sign independent of the first, so the two
/// congruences cannot be merged into `x·x′ ≡ ±d (mod q² 5^{2ℓ})`.
pub fn sigma_dot_bound(d: u64, ell: usize, q: u64, budget: &Budget) -> Result<u128> {
    let m5 = u32::try_from(2 * ell)
        .ok()
        .and_then(|k| 5i128.checked_pow(k))
        .ok_or(Error::Overflow("5^(2ℓ)"))?;
    let mq = (q as i128) * (q as i128);
    let di = d as i128;
    let hd = count_hd_with(d, budget)? as u128;
    let dist = dot_product_distribution(d, budget)?;
    let extra: u128 = dist
        .iter()
        .filter(|(&e, _)| {
            let e = e as i128;
            e.abs() < di && (e - di).rem_euclid(mq) == 0 && ((e - di).rem_euclid(m5) == 0 || (e + di).rem_euclid(m5) == 0)
        })
        .map(|(_, &k)| k)
        .sum();
    Ok(hd + extra)
}

/// Number of pairs `(u, v) ∈ ℤ³ × ℤ³` with `u·u = a`, `2u·v = b`,
/// `v·v = c`: the representations of `aX² + bXY + cY²` by
/// `x² + y² + z²`.
pub fn pall_count(a: i64, b: i64, c: i64, budget: &Budget) -> Result<u128> {
    BinaryForm::new(a, b, c).check_definite()?;
    let (ua, uc) = (a as u64, c as u64);
    let na = count_hd_with(ua, budget)? as u128;
    let nc = count_hd_with(uc, budget)? as u128;
    Budget::check("representation scan", na * nc, budget.max_pairs)?;
    let us = enumerate_hd_with(ua, budget)?;
    let vs = enumerate_hd_with(uc, budget)?;
    Ok(us
        .par_iter()
        .map(|u| vs.iter().filter(|v| 2 * u.dot(v) == b as i128).count() as u128)
        .sum())
}

/// Both sides of `|H_d| = 24·h` (`d ≡ 3 mod 8`) or `12·h` (`d ≡ 1, 2 mod 4`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CardinalityCheck {
    pub d: u64,
    pub hd: u64,
    pub h: usize,
    pub factor: u64,
    pub relation_holds: bool,
}

pub fn verify_cardinality(d: u64, budget: &Budget) -> Result<CardinalityCheck> {
    if d <= 3 || d % 8 == 7 || !is_squarefree(d) {
        return Err(Error::precondition(format!("d = {d} must be squarefree, > 3 and not 7 mod 8")));
    }
    let h = class_group(field_discriminant(d)?)?.order();
    let hd = count_hd_with(d, budget)?;
    let factor = if d % 8 == 3 { 24 } else { 12 };
    Ok(CardinalityCheck {
        d,
        hd,
        h,
        factor,
        relation_holds: hd == factor * h as u64,
    })
}
