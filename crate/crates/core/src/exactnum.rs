//! Exact arithmetic in the ring of finite sums `Σ qᵢ√rᵢ` with rational
//! `qᵢ` and squarefree positive integer radicands `rᵢ`.
//!
//! Every coupling coefficient and every tabulated constant of the
//! deformation calculus lives in this ring, so equality of symbolic
//! results is decidable by term-wise comparison of canonical forms.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, One, Signed, ToPrimitive, Zero};

/// Exact rational number in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Shorthand for a small rational constant.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for a small integer as a rational.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Error raised by partial operations of the exact number ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactError {
    /// `sqrt_of_rational` was asked for the square root of a negative number.
    NegativeRadicand,
}

impl fmt::Display for ExactError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactError::NegativeRadicand => write!(f, "square root of a negative rational"),
        }
    }
}

/// Splits `n` into `(s, u)` with `n = s² · u` and `u` squarefree.
fn squarefree_decompose(n: u64) -> (u64, u64) {
    debug_assert!(n >= 1);
    let mut square = 1u64;
    let mut free = 1u64;
    let mut rest = n;
    let mut p = 2u64;
    while p * p <= rest {
        if rest % p == 0 {
            let mut e = 0u32;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            for _ in 0..e / 2 {
                square *= p;
            }
            if e % 2 == 1 {
                free *= p;
            }
        }
        p += 1;
    }
    (square, free * rest)
}

/// Splits a positive big integer into `(s, u)` with `n = s² · u` and `u`
/// squarefree, by trial division; the squarefree part must fit `u64`.
fn squarefree_decompose_big(n: &BigInt) -> (BigInt, u64) {
    debug_assert!(n.is_positive());
    let mut rest = n.clone();
    let mut square = BigInt::one();
    let mut free = 1u64;
    let mut p = 2u64;
    // trial primes cover all realistic factorial-built radicands
    while p <= 1_000_003 {
        let bp = BigInt::from(p);
        if (&bp * &bp) > rest {
            break;
        }
        if (&rest % &bp).is_zero() {
            let mut e = 0u32;
            while (&rest % &bp).is_zero() {
                rest /= &bp;
                e += 1;
            }
            for _ in 0..e / 2 {
                square *= &bp;
            }
            if e % 2 == 1 {
                free = free.checked_mul(p).expect("squarefree part overflows u64");
            }
        }
        p += 1;
    }
    // the remainder is 1, prime, or a perfect square of a large prime
    let root = rest.sqrt();
    if &root * &root == rest {
        square *= root;
    } else {
        let r = rest.to_u64().expect("squarefree part overflows u64");
        free = free.checked_mul(r).expect("squarefree part overflows u64");
    }
    (square, free)
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Exact element of the ring `Σ q_r √r`, with every radicand a squarefree
/// positive integer and every stored coefficient nonzero.
///
/// The key `1` carries the rational part. The ring is in fact a field
/// (the compositum of the quadratic extensions involved); [`Self::inverse`]
/// computes reciprocals by Galois-conjugate rationalization.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct RadicalNumber {
    terms: BTreeMap<u64, Rational>,
}

impl RadicalNumber {
    pub fn zero() -> Self {
        RadicalNumber {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_rational(q: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(1, q);
        }
        RadicalNumber { terms }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(rat_int(n))
    }

    /// Canonical single term `q·√r`; `r` need not be squarefree.
    pub fn from_sqrt(coeff: Rational, radicand: u64) -> Self {
        assert!(radicand >= 1, "radicand must be positive");
        let (s, u) = squarefree_decompose(radicand);
        let q = coeff * rat_int(s as i64);
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(u, q);
        }
        RadicalNumber { terms }
    }

    /// `√(a/b)` as a canonical single-term radical, `√(a/b) = (1/b)√(ab)`.
    /// Square factors are pulled out at arbitrary precision; only the
    /// squarefree remainder must fit the `u64` radicand key.
    pub fn sqrt_of_rational(q: &Rational) -> Result<Self, ExactError> {
        if q.is_negative() {
            return Err(ExactError::NegativeRadicand);
        }
        if q.is_zero() {
            return Ok(Self::zero());
        }
        let (sn, un) = squarefree_decompose_big(q.numer());
        let (sd, ud) = squarefree_decompose_big(q.denom());
        // sqrt(n/d) = (sn/(sd·ud)) · sqrt(un·ud)
        let coeff = Rational::new(sn, &sd * BigInt::from(ud));
        let radicand = un
            .checked_mul(ud)
            .expect("squarefree radicand part overflows u64");
        Ok(Self::from_sqrt(coeff, radicand))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The rational part is the whole number iff no proper radical occurs.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&1).cloned(),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &Rational)> {
        self.terms.iter().map(|(r, q)| (*r, q))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn insert_term(&mut self, radicand: u64, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.terms.entry(radicand) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        RadicalNumber {
            terms: self.terms.iter().map(|(r, c)| (*r, c * q)).collect(),
        }
    }

    /// Negates every term whose radicand is divisible by the prime `p`
    /// (the Galois automorphism `√p → −√p`).
    fn conjugate(&self, p: u64) -> Self {
        RadicalNumber {
            terms: self
                .terms
                .iter()
                .map(|(r, c)| (*r, if r % p == 0 { -c } else { c.clone() }))
                .collect(),
        }
    }

    fn smallest_radical_prime(&self) -> Option<u64> {
        let mut best: Option<u64> = None;
        for r in self.terms.keys() {
            if *r == 1 {
                continue;
            }
            let mut n = *r;
            let mut p = 2u64;
            while p * p <= n {
                if n % p == 0 {
                    n = p;
                    break;
                }
                p += 1;
            }
            best = Some(match best {
                Some(b) if b <= n => b,
                _ => n,
            });
        }
        best
    }

    /// Exact reciprocal, or `None` for zero.
    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let mut numer = RadicalNumber::one();
        let mut cur = self.clone();
        while let Some(p) = cur.smallest_radical_prime() {
            let conj = cur.conjugate(p);
            numer = &numer * &conj;
            cur = &cur * &conj;
        }
        let norm = cur.as_rational().expect("rationalized norm");
        if norm.is_zero() {
            return None;
        }
        Some(numer.scale(&norm.recip()))
    }

    /// IEEE double evaluation `Σ q_r √r`.
    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(r, q)| q.to_f64().unwrap_or(f64::NAN) * Float::sqrt(*r as f64))
            .sum()
    }
}

impl Add for &RadicalNumber {
    type Output = RadicalNumber;
    fn add(self, rhs: &RadicalNumber) -> RadicalNumber {
        let mut out = self.clone();
        for (r, q) in &rhs.terms {
            out.insert_term(*r, q.clone());
        }
        out
    }
}

impl Add for RadicalNumber {
    type Output = RadicalNumber;
    fn add(self, rhs: RadicalNumber) -> RadicalNumber {
        &self + &rhs
    }
}

impl AddAssign<&RadicalNumber> for RadicalNumber {
    fn add_assign(&mut self, rhs: &RadicalNumber) {
        for (r, q) in &rhs.terms {
            self.insert_term(*r, q.clone());
        }
    }
}

impl Sub for &RadicalNumber {
    type Output = RadicalNumber;
    fn sub(self, rhs: &RadicalNumber) -> RadicalNumber {
        let mut out = self.clone();
        for (r, q) in &rhs.terms {
            out.insert_term(*r, -q);
        }
        out
    }
}

impl Sub for RadicalNumber {
    type Output = RadicalNumber;
    fn sub(self, rhs: RadicalNumber) -> RadicalNumber {
        &self - &rhs
    }
}

impl SubAssign<&RadicalNumber> for RadicalNumber {
    fn sub_assign(&mut self, rhs: &RadicalNumber) {
        for (r, q) in &rhs.terms {
            self.insert_term(*r, -q);
        }
    }
}

impl Neg for &RadicalNumber {
    type Output = RadicalNumber;
    fn neg(self) -> RadicalNumber {
        RadicalNumber {
            terms: self.terms.iter().map(|(r, q)| (*r, -q)).collect(),
        }
    }
}

impl Neg for RadicalNumber {
    type Output = RadicalNumber;
    fn neg(self) -> RadicalNumber {
        -&self
    }
}

impl Mul for &RadicalNumber {
    type Output = RadicalNumber;
    fn mul(self, rhs: &RadicalNumber) -> RadicalNumber {
        let mut out = RadicalNumber::zero();
        for (r, a) in &self.terms {
            for (s, b) in &rhs.terms {
                // √r·√s = d·√u with d = gcd(r,s) and u = (r/d)(s/d);
                // u is squarefree since r/d and s/d are coprime squarefree.
                let d = gcd_u64(*r, *s);
                let u = (r / d)
                    .checked_mul(s / d)
                    .expect("radicand product overflow");
                out.insert_term(u, a * b * rat_int(d as i64));
            }
        }
        out
    }
}

impl Mul for RadicalNumber {
    type Output = RadicalNumber;
    fn mul(self, rhs: RadicalNumber) -> RadicalNumber {
        &self * &rhs
    }
}

impl Mul<&Rational> for &RadicalNumber {
    type Output = RadicalNumber;
    fn mul(self, rhs: &Rational) -> RadicalNumber {
        self.scale(rhs)
    }
}

impl From<Rational> for RadicalNumber {
    fn from(q: Rational) -> Self {
        Self::from_rational(q)
    }
}

impl From<i64> for RadicalNumber {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

fn fmt_term(q: &Rational, r: u64, lead: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let neg = q.is_negative();
    let mag = q.abs();
    if lead {
        if neg {
            write!(f, "-")?;
        }
    } else if neg {
        write!(f, " - ")?;
    } else {
        write!(f, " + ")?;
    }
    if r == 1 {
        write!(f, "{}", mag)
    } else if mag.is_one() {
        write!(f, "sqrt({})", r)
    } else {
        write!(f, "{}*sqrt({})", mag, r)
    }
}

impl fmt::Display for RadicalNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (r, q)) in self.terms.iter().enumerate() {
            fmt_term(q, *r, i == 0, f)?;
        }
        Ok(())
    }
}

impl fmt::Debug for RadicalNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RadicalNumber({})", self)
    }
}

/// Human-readable form, e.g. `4/3*sqrt(15)`.
pub fn to_display_string(x: &RadicalNumber) -> String {
    x.to_string()
}

/// Sum of radical numbers.
pub fn radical_sum<'a>(it: impl IntoIterator<Item = &'a RadicalNumber>) -> RadicalNumber {
    let mut acc = RadicalNumber::zero();
    for x in it {
        acc += x;
    }
    acc
}

/// Collects the terms as `(numerator, denominator, radicand)` triples in
/// canonical order, the wire layout used by the JSON serializers.
pub fn term_records(x: &RadicalNumber) -> Vec<(BigInt, BigInt, u64)> {
    x.terms
        .iter()
        .map(|(r, q)| (q.numer().clone(), q.denom().clone(), *r))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sqrt_term(c: i64, d: i64, r: u64) -> RadicalNumber {
        RadicalNumber::from_sqrt(rat(c, d), r)
    }

    #[test]
    fn squarefree_decomposition() {
        assert_eq!(squarefree_decompose(1), (1, 1));
        assert_eq!(squarefree_decompose(4), (2, 1));
        assert_eq!(squarefree_decompose(12), (2, 3));
        assert_eq!(squarefree_decompose(360), (6, 10));
        assert_eq!(squarefree_decompose(97), (1, 97));
    }

    #[test]
    fn sqrt_of_rational_examples() {
        // 4/9 -> 2/3
        let x = RadicalNumber::sqrt_of_rational(&rat(4, 9)).unwrap();
        assert_eq!(x, RadicalNumber::from_rational(rat(2, 3)));
        // 5/3 -> (1/3)*sqrt(15)
        let x = RadicalNumber::sqrt_of_rational(&rat(5, 3)).unwrap();
        assert_eq!(x, sqrt_term(1, 3, 15));
        // 0 -> 0
        let x = RadicalNumber::sqrt_of_rational(&Rational::zero()).unwrap();
        assert!(x.is_zero());
        assert_eq!(
            RadicalNumber::sqrt_of_rational(&rat(-1, 2)),
            Err(ExactError::NegativeRadicand)
        );
    }

    #[test]
    fn multiplication_examples() {
        // (√2)·(√2) = 2
        let s2 = sqrt_term(1, 1, 2);
        assert_eq!(&s2 * &s2, RadicalNumber::from_integer(2));
        // (2√2)·(√15) = 2√30
        let a = sqrt_term(2, 1, 2);
        let b = sqrt_term(1, 1, 15);
        assert_eq!(&a * &b, sqrt_term(2, 1, 30));
        // (1+√2)(1−√2) = −1
        let p = RadicalNumber::one() + s2.clone();
        let m = RadicalNumber::one() - s2;
        assert_eq!(p * m, RadicalNumber::from_integer(-1));
    }

    #[test]
    fn to_f64_examples() {
        let x = sqrt_term(6, 1, 2);
        assert!((x.to_f64() - 8.485281374238570).abs() < 1e-13);
        let y = RadicalNumber::sqrt_of_rational(&rat(3, 10)).unwrap();
        assert!(((-&y).to_f64() + 0.5477225575051661).abs() < 1e-14);
        assert_eq!(RadicalNumber::zero().to_f64(), 0.0);
    }

    #[test]
    fn inverse_rationalizes() {
        let x = RadicalNumber::one() + sqrt_term(1, 1, 2) + sqrt_term(2, 3, 15);
        let inv = x.inverse().unwrap();
        assert_eq!(&x * &inv, RadicalNumber::one());
        assert!(RadicalNumber::zero().inverse().is_none());
        // single-term case
        let y = sqrt_term(4, 3, 15);
        assert_eq!(&y * &y.inverse().unwrap(), RadicalNumber::one());
    }

    #[test]
    fn display_forms() {
        assert_eq!(sqrt_term(4, 3, 15).to_string(), "4/3*sqrt(15)");
        assert_eq!(sqrt_term(-1, 1, 2).to_string(), "-sqrt(2)");
        let x = RadicalNumber::from_integer(2) - sqrt_term(1, 2, 3);
        assert_eq!(x.to_string(), "2 - 1/2*sqrt(3)");
        assert_eq!(RadicalNumber::zero().to_string(), "0");
    }

    fn arb_radical() -> impl Strategy<Value = RadicalNumber> {
        proptest::collection::vec(
            (1u64..40, -20i64..20, 1i64..8),
            0..4,
        )
        .prop_map(|v| {
            let mut acc = RadicalNumber::zero();
            for (r, n, d) in v {
                acc += &RadicalNumber::from_sqrt(rat(n, d), r);
            }
            acc
        })
    }

    proptest! {
        #[test]
        fn ring_axioms((a, b, c) in (arb_radical(), arb_radical(), arb_radical())) {
            // associativity and distributivity, exact
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
        }

        #[test]
        fn canonical_form_idempotent(a in arb_radical()) {
            // rebuilding from term records reproduces the value
            let rebuilt = a.terms().fold(RadicalNumber::zero(), |acc, (r, q)| {
                acc + RadicalNumber::from_sqrt(q.clone(), r)
            });
            prop_assert_eq!(&rebuilt, &a);
            for (r, q) in a.terms() {
                prop_assert!(!q.is_zero());
                let (s, u) = squarefree_decompose(r);
                prop_assert_eq!((s, u), (1, r));
            }
        }

        #[test]
        fn float_is_multiplicative((a, b) in (arb_radical(), arb_radical())) {
            let lhs = (&a * &b).to_f64();
            let rhs = a.to_f64() * b.to_f64();
            let scale = 1.0 + lhs.abs().max(rhs.abs());
            prop_assert!((lhs - rhs).abs() / scale < 1e-12);
        }

        #[test]
        fn inverse_is_exact(a in arb_radical()) {
            if let Some(inv) = a.inverse() {
                prop_assert_eq!(&a * &inv, RadicalNumber::one());
            } else {
                prop_assert!(a.is_zero());
            }
        }
    }
}
