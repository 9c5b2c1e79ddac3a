//! The deformed quadrupole algebra: generators `L` and a rank-2 tensor
//! `Q` with `[L,L]¹ = -√2 L`, `[L,Q]² = -√6 Q` and defining brackets
//!
//! `[Q,Q]¹ = 3√10 g₁(L²) L`,
//! `[Q,Q]³ = g₃(L²) [[L×L]²×L]³`.
//!
//! Unlike the vector case, the triple-bracket consistency conditions are
//! obstructed already at first order in the deformation: this module
//! computes the obstruction exactly and shows that only the trivial
//! deformation survives.

use alloc::vec::Vec;

use crate::angmom::{racah_unitary, AngMom};
use crate::exactnum::{rat, rat_int, RadicalNumber, Rational};
use crate::linalg::rref;
use crate::tensoralg::{Algebra, CoreTensor, TensorError, TensorExpr};

fn sqrt_int(n: i64) -> RadicalNumber {
    RadicalNumber::sqrt_of_rational(&rat_int(n)).expect("positive radicand")
}

/// Deformation series of the two quadrupole brackets:
/// `g₁(L²) = Σ_k a1[k] L²ᵏ` and `g₃(L²) = Σ_k a3[k] L²ᵏ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadDeformation {
    a1: Vec<Rational>,
    a3: Vec<Rational>,
}

impl QuadDeformation {
    pub fn new(a1: Vec<Rational>, a3: Vec<Rational>) -> Self {
        QuadDeformation { a1, a3 }
    }

    /// First-order deformation `[Q,Q]¹ = 3√10 (ε + a L²) L`,
    /// `[Q,Q]³ = b [[L×L]²×L]³`.
    pub fn first_order(epsilon: Rational, a: Rational, b: Rational) -> Self {
        QuadDeformation {
            a1: alloc::vec![epsilon, a],
            a3: alloc::vec![b],
        }
    }

    /// `[Q,Q]¹` in canonical form.
    pub fn bracket1(&self) -> TensorExpr {
        let norm = sqrt_int(90); // 3 sqrt10
        let mut f1 = TensorExpr::zero(1);
        for (k, c) in self.a1.iter().enumerate() {
            f1.add_term(k as u32, CoreTensor::L, &norm * c);
        }
        f1
    }

    /// `[Q,Q]³` in canonical form.
    pub fn bracket3(&self) -> TensorExpr {
        let mut f3 = TensorExpr::zero(3);
        for (k, c) in self.a3.iter().enumerate() {
            f3.add_term(
                k as u32,
                CoreTensor::LLL3,
                RadicalNumber::from_rational(c.clone()),
            );
        }
        f3
    }

    /// Word-level calculus context with both brackets installed.
    pub fn algebra(&self) -> Result<Algebra, TensorError> {
        Algebra::with_brackets(2, alloc::vec![(1, self.bracket1()), (3, self.bracket3())])
    }
}

/// Closed-form coefficients of `[Q, L²L]^Λ` on `([L×Q]^Λ, [[L×L]²×Q]^Λ)`
/// obtained by recoupling, valid for `Λ = 1` or `3`:
///
/// `2√3 (√3 − U(11Λ2;12))` and `2√3 · √2 U(11Λ2;22)`.
pub fn reduction_of_q_with_l2l(lambda_outer: u32) -> (RadicalNumber, RadicalNumber) {
    let one = AngMom::integer(1);
    let two = AngMom::integer(2);
    let lam = AngMom::integer(lambda_outer);
    let two_sqrt3 = sqrt_int(12);
    let c1 = &two_sqrt3 * &(&sqrt_int(3) - &racah_unitary(one, one, lam, two, one, two));
    let c2 = &two_sqrt3 * &(&sqrt_int(2) * &racah_unitary(one, one, lam, two, two, two));
    (c1, c2)
}

/// Closed-form coefficients of `[Q, [[L×L]²×L]³]^Λ` on
/// `([L×Q]^Λ, [[L×L]²×Q]^Λ)`, valid for `Λ = 1` or `3`:
///
/// `√3 (√7 U(22Λ1;23) + 2√(2Λ(Λ+1)) U(22Λ1;Λ3) U(21Λ1;22))` and
/// `√3 · 3√2 U(21Λ2;23)`.
pub fn reduction_of_q_with_lll3(lambda_outer: u32) -> (RadicalNumber, RadicalNumber) {
    let one = AngMom::integer(1);
    let two = AngMom::integer(2);
    let three = AngMom::integer(3);
    let lam = AngMom::integer(lambda_outer);
    let sqrt3 = sqrt_int(3);
    let mut c1 = &sqrt_int(7) * &racah_unitary(two, two, lam, one, two, three);
    let swing = &sqrt_int(2 * (lambda_outer * (lambda_outer + 1)) as i64)
        * &(&racah_unitary(two, two, lam, one, lam, three)
            * &racah_unitary(two, one, lam, one, two, two));
    c1 += &(&RadicalNumber::from_integer(2) * &swing);
    let c1 = &sqrt3 * &c1;
    let c2 = &sqrt3 * &(&sqrt_int(18) * &racah_unitary(two, one, lam, two, two, three));
    (c1, c2)
}

/// `[Q, [Q,Q]^inner]^outer` computed at word level, with the inner bracket
/// resolved through the defining relations.
pub fn double_bracket(
    alg: &Algebra,
    inner: u32,
    outer: u32,
) -> Result<TensorExpr, TensorError> {
    let q = alg.expr_t();
    let f = alg.coupled_commutator(&q, &q, inner)?;
    alg.coupled_commutator(&q, &f, outer)
}

/// The two independent triple-bracket consistency conditions of a rank-2
/// tensor, evaluated on this deformation:
///
/// `2√2 [Q,[Q,Q]¹]¹ + √7 [Q,[Q,Q]³]¹ = 0`
/// `[Q,[Q,Q]¹]³ − 2 [Q,[Q,Q]³]³ = 0`.
pub fn consistency_conditions(
    def: &QuadDeformation,
) -> Result<(TensorExpr, TensorExpr), TensorError> {
    let alg = def.algebra()?;
    let d11 = double_bracket(&alg, 1, 1)?;
    let d31 = double_bracket(&alg, 3, 1)?;
    let d13 = double_bracket(&alg, 1, 3)?;
    let d33 = double_bracket(&alg, 3, 3)?;
    let cond1 = d11.scale(&sqrt_int(8)).add(&d31.scale(&sqrt_int(7)));
    let cond3 = d13.sub(&d33.scale(&RadicalNumber::from_integer(2)));
    Ok((cond1, cond3))
}

/// One scalar condition of the first-order obstruction: the coefficient of
/// `L²ᵏ · core` in a consistency condition, as a linear form in the two
/// deformation parameters.
#[derive(Clone, Debug)]
pub struct ObstructionCondition {
    pub outer: u32,
    pub l2_power: u32,
    pub core: CoreTensor,
    /// multiplies the `L²` coefficient `a` of the rank-1 bracket
    pub coeff_a: RadicalNumber,
    /// multiplies the strength `b` of the rank-3 bracket
    pub coeff_b: RadicalNumber,
}

/// Exact first-order obstruction analysis.
#[derive(Clone, Debug)]
pub struct ObstructionReport {
    pub conditions: Vec<ObstructionCondition>,
    /// rank of the condition matrix over `(a, b)`
    pub rank: usize,
    /// true when the conditions force `a = b = 0`
    pub only_trivial: bool,
}

/// Evaluates the consistency conditions for a first-order deformation
/// `[Q,Q]¹ = 3√10(ε + a L²)L`, `[Q,Q]³ = b [[L×L]²×L]³`. The conditions
/// are independent of `ε` (the undeformed part commutes into `[L,Q]^Λ`
/// with `Λ = 1, 3`, which vanish), so they are linear forms in `(a, b)`;
/// the report collects them and row-reduces exactly.
pub fn first_order_obstruction() -> Result<ObstructionReport, TensorError> {
    use num_traits::Zero;
    let zero = Rational::zero();
    let unit_a = QuadDeformation::first_order(zero.clone(), rat(1, 1), zero.clone());
    let unit_b = QuadDeformation::first_order(zero.clone(), zero.clone(), rat(1, 1));
    let (a1, a3) = consistency_conditions(&unit_a)?;
    let (b1, b3) = consistency_conditions(&unit_b)?;
    let mut conditions = Vec::new();
    for (outer, ca, cb) in [(1u32, &a1, &b1), (3u32, &a3, &b3)] {
        let mut keys: alloc::collections::BTreeSet<(u32, CoreTensor)> =
            ca.iter().map(|(k, c, _)| (k, c)).collect();
        keys.extend(cb.iter().map(|(k, c, _)| (k, c)));
        for (k, core) in keys {
            conditions.push(ObstructionCondition {
                outer,
                l2_power: k,
                core,
                coeff_a: ca.coeff(k, core),
                coeff_b: cb.coeff(k, core),
            });
        }
    }
    let mut rows: Vec<Vec<RadicalNumber>> = conditions
        .iter()
        .map(|c| alloc::vec![c.coeff_a.clone(), c.coeff_b.clone()])
        .collect();
    let rank = rref(&mut rows);
    Ok(ObstructionReport {
        conditions,
        rank,
        only_trivial: rank == 2,
    })
}
