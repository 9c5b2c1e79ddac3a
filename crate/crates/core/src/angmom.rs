//! Exact su(2) coupling coefficients: Clebsch-Gordan (Wigner) coefficients
//! and Racah coefficients in unitary form, in the Rose phase convention.
//!
//! Angular momenta are stored as doubled integers so half-integer values
//! are exact; every projection argument below is likewise a doubled value.

use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::exactnum::{RadicalNumber, Rational};

/// An angular momentum `j`, stored as `2j`.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct AngMom {
    twice: u32,
}

impl AngMom {
    pub fn from_twice(twice: u32) -> Self {
        AngMom { twice }
    }

    /// Integer angular momentum `j`.
    pub fn integer(j: u32) -> Self {
        AngMom { twice: 2 * j }
    }

    pub fn twice(self) -> u32 {
        self.twice
    }

    pub fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    pub fn to_f64(self) -> f64 {
        self.twice as f64 / 2.0
    }

    /// Doubled projections `2m = −2j, −2j+2, …, 2j`.
    pub fn projections(self) -> impl Iterator<Item = i32> {
        let tj = self.twice as i32;
        (-tj..=tj).step_by(2)
    }
}

impl fmt::Display for AngMom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// Triangle condition on doubled angular momenta, including the parity
/// requirement that `a + b + c` is an integer.
pub fn triangle_ok(ta: u32, tb: u32, tc: u32) -> bool {
    (ta + tb + tc) % 2 == 0 && tc <= ta + tb && tc + tb >= ta && tc + ta >= tb
}

fn proj_ok(tj: u32, tm: i32) -> bool {
    tm.unsigned_abs() <= tj && (tj as i32 + tm) % 2 == 0
}

/// Factorial table over arbitrary-precision integers.
struct Factorials {
    table: alloc::vec::Vec<BigUint>,
}

impl Factorials {
    fn up_to(n: usize) -> Self {
        let mut table = alloc::vec::Vec::with_capacity(n + 1);
        table.push(BigUint::one());
        for i in 1..=n {
            let next = &table[i - 1] * BigUint::from(i);
            table.push(next);
        }
        Factorials { table }
    }

    fn get(&self, n: i32) -> &BigUint {
        &self.table[n as usize]
    }
}

fn big_ratio(num: BigUint, den: BigUint) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// `Δ(abc)² = (a+b−c)!(a−b+c)!(−a+b+c)!/(a+b+c+1)!` as an exact rational.
fn triangle_coeff(fac: &Factorials, ta: i32, tb: i32, tc: i32) -> Rational {
    let num = fac.get((ta + tb - tc) / 2) * fac.get((ta - tb + tc) / 2) * fac.get((-ta + tb + tc) / 2);
    let den = fac.get((ta + tb + tc) / 2 + 1).clone();
    big_ratio(num, den)
}

/// Exact Clebsch-Gordan coefficient `⟨j1 m1, j2 m2 | J M⟩` in the
/// Condon-Shortley phase convention (Rose 1957). All `tm*` arguments are
/// doubled projections. Selection-rule failures yield exact zero.
pub fn clebsch_gordan(
    j1: AngMom,
    tm1: i32,
    j2: AngMom,
    tm2: i32,
    j: AngMom,
    tm: i32,
) -> RadicalNumber {
    let (tj1, tj2, tj) = (j1.twice(), j2.twice(), j.twice());
    if tm1 + tm2 != tm
        || !proj_ok(tj1, tm1)
        || !proj_ok(tj2, tm2)
        || !proj_ok(tj, tm)
        || !triangle_ok(tj1, tj2, tj)
    {
        return RadicalNumber::zero();
    }
    let (tj1, tj2, tj) = (tj1 as i32, tj2 as i32, tj as i32);
    let fac = Factorials::up_to(((tj1 + tj2 + tj) / 2 + 1) as usize);

    let mut prefactor = triangle_coeff(&fac, tj1, tj2, tj) * Rational::from_integer(BigInt::from(tj + 1));
    let proj_product = fac.get((tj1 + tm1) / 2)
        * fac.get((tj1 - tm1) / 2)
        * fac.get((tj2 + tm2) / 2)
        * fac.get((tj2 - tm2) / 2)
        * fac.get((tj + tm) / 2)
        * fac.get((tj - tm) / 2);
    prefactor *= Rational::from_integer(BigInt::from(proj_product));

    // summation bounds: every factorial argument nonnegative
    let b1 = (tj1 + tj2 - tj) / 2;
    let b2 = (tj1 - tm1) / 2;
    let b3 = (tj2 + tm2) / 2;
    let c1 = (tj - tj2 + tm1) / 2;
    let c2 = (tj - tj1 - tm2) / 2;
    let k_min = 0.max(-c1).max(-c2);
    let k_max = b1.min(b2).min(b3);

    let mut sum = Rational::zero();
    let mut k = k_min;
    while k <= k_max {
        let den = fac.get(k)
            * fac.get(b1 - k)
            * fac.get(b2 - k)
            * fac.get(b3 - k)
            * fac.get(c1 + k)
            * fac.get(c2 + k);
        let term = big_ratio(BigUint::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        k += 1;
    }
    if sum.is_zero() {
        return RadicalNumber::zero();
    }
    RadicalNumber::sqrt_of_rational(&prefactor)
        .expect("CG prefactor is nonnegative")
        .scale(&sum)
}

/// Exact Racah `W(abcd;ef)` coefficient.
pub fn racah_w(a: AngMom, b: AngMom, c: AngMom, d: AngMom, e: AngMom, f: AngMom) -> RadicalNumber {
    let (ta, tb, tc, td, te, tf) = (
        a.twice() as i32,
        b.twice() as i32,
        c.twice() as i32,
        d.twice() as i32,
        e.twice() as i32,
        f.twice() as i32,
    );
    let tri = |x: i32, y: i32, z: i32| triangle_ok(x as u32, y as u32, z as u32);
    if !tri(ta, tb, te) || !tri(tc, td, te) || !tri(ta, tc, tf) || !tri(tb, td, tf) {
        return RadicalNumber::zero();
    }
    let max_arg = ((ta + tb + tc + td).max(ta + td + te + tf).max(tb + tc + te + tf)) / 2 + 1;
    let fac = Factorials::up_to(max_arg as usize + 1);

    let prefactor = triangle_coeff(&fac, ta, tb, te)
        * triangle_coeff(&fac, tc, td, te)
        * triangle_coeff(&fac, ta, tc, tf)
        * triangle_coeff(&fac, tb, td, tf);

    let s1 = (ta + tb + te) / 2;
    let s2 = (tc + td + te) / 2;
    let s3 = (ta + tc + tf) / 2;
    let s4 = (tb + td + tf) / 2;
    let t1 = (ta + tb + tc + td) / 2;
    let t2 = (ta + td + te + tf) / 2;
    let t3 = (tb + tc + te + tf) / 2;
    let z_min = s1.max(s2).max(s3).max(s4);
    let z_max = t1.min(t2).min(t3);

    let mut sum = Rational::zero();
    let mut z = z_min;
    while z <= z_max {
        let den = fac.get(z - s1)
            * fac.get(z - s2)
            * fac.get(z - s3)
            * fac.get(z - s4)
            * fac.get(t1 - z)
            * fac.get(t2 - z)
            * fac.get(t3 - z);
        let term = big_ratio(fac.get(z + 1).clone(), den);
        if (t1 + z) % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        z += 1;
    }
    if sum.is_zero() {
        return RadicalNumber::zero();
    }
    RadicalNumber::sqrt_of_rational(&prefactor)
        .expect("Racah prefactor is nonnegative")
        .scale(&sum)
}

/// Racah coefficient in unitary form,
/// `U(abcd;ef) = √((2e+1)(2f+1)) · W(abcd;ef)`.
pub fn racah_unitary(
    a: AngMom,
    b: AngMom,
    c: AngMom,
    d: AngMom,
    e: AngMom,
    f: AngMom,
) -> RadicalNumber {
    let w = racah_w(a, b, c, d, e, f);
    if w.is_zero() {
        return w;
    }
    let dims = Rational::from_integer(BigInt::from(
        (e.twice() + 1) as i64 * (f.twice() + 1) as i64,
    ));
    w * RadicalNumber::sqrt_of_rational(&dims).expect("positive dimension factor")
}
