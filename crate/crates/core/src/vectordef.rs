//! The deformed vector algebra: generators `L` and a vector `A` with
//! `[L,L]¹ = -√2 L`, `[L,A]¹ = -√2 A` and
//! `[A,A]¹ = -√2 g(L²) L`, `g(L²) = Σ_k a_k L²ᵏ`.
//!
//! This module provides the closed-form reduction of `[A, L²ᵏ]¹` through a
//! recursion in `k`, the induced expansion of `[A, A²]¹`, an associativity
//! check, and the exact solver for the deformed quadratic invariant
//! `h(L²) + A²`. Every closed form is independently cross-checked against
//! the word-level engine in [`crate::tensoralg`].

use alloc::vec::Vec;

use crate::exactnum::{rat, RadicalNumber, Rational};
use crate::linalg::ExactSystem;
use crate::tensoralg::{Algebra, CoreTensor, TensorError, TensorExpr};

fn sqrt_rat(num: i64, den: i64) -> RadicalNumber {
    RadicalNumber::sqrt_of_rational(&rat(num, den)).expect("positive radicand")
}

/// A finite deformation series `g(L²) = Σ_{k=0}^{K} a_k L²ᵏ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorDeformation {
    a: Vec<Rational>,
}

impl VectorDeformation {
    /// `a[k]` is the coefficient of `L²ᵏ`; trailing zeros are dropped.
    pub fn new(mut a: Vec<Rational>) -> Self {
        use num_traits::Zero;
        while a.len() > 1 && a.last().map_or(false, Zero::is_zero) {
            a.pop();
        }
        if a.is_empty() {
            a.push(Rational::zero());
        }
        VectorDeformation { a }
    }

    /// Highest power `K` with `a_K ≠ 0` (0 for the undeformed algebras).
    pub fn order(&self) -> usize {
        self.a.len() - 1
    }

    pub fn coeff(&self, k: usize) -> Rational {
        use num_traits::Zero;
        self.a.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    /// The defining bracket `[A,A]¹ = -√2 g(L²) L` in canonical form.
    pub fn bracket(&self) -> TensorExpr {
        let msqrt2 = -&sqrt_rat(2, 1);
        let mut f1 = TensorExpr::zero(1);
        for (k, ak) in self.a.iter().enumerate() {
            f1.add_term(k as u32, CoreTensor::L, &msqrt2 * ak);
        }
        f1
    }

    /// Word-level calculus context with this defining bracket installed.
    pub fn algebra(&self) -> Algebra {
        Algebra::with_brackets(1, alloc::vec![(1, self.bracket())])
            .expect("vector bracket is a valid rank-1 relation")
    }
}

/// Exact solution of the reduction recursion for `[A, L²ᵏ]¹`:
///
/// `[A, L²ᵏ]¹ = Σ_i x_i⁽ᵏ⁾ L²ⁱ A + Σ_i y_i⁽ᵏ⁾ L²ⁱ [L×A]¹
///            + Σ_i z_i⁽ᵏ⁾ L²ⁱ [[L×L]²×A]¹`
///
/// with `x_i⁽ᵏ⁾, y_i⁽ᵏ⁾` defined for `i < k` and `z_i⁽ᵏ⁾` for `i < k-1`.
pub struct RecursionTable {
    kmax: usize,
    x: Vec<Vec<RadicalNumber>>,
    y: Vec<Vec<RadicalNumber>>,
    z: Vec<Vec<RadicalNumber>>,
}

impl RecursionTable {
    pub fn new(kmax: usize) -> Self {
        let mut t = RecursionTable {
            kmax,
            x: alloc::vec![Vec::new(); kmax + 1],
            y: alloc::vec![Vec::new(); kmax + 1],
            z: alloc::vec![Vec::new(); kmax + 1],
        };
        if kmax == 0 {
            return t;
        }
        t.x[1] = alloc::vec![RadicalNumber::from_integer(2)];
        t.y[1] = alloc::vec![sqrt_rat(8, 1)];
        let c_xy = sqrt_rat(8, 9); // (2/3) sqrt2
        let c_yx = sqrt_rat(8, 1); // 2 sqrt2
        let c_yz = sqrt_rat(3, 10);
        let c_yz2 = sqrt_rat(8, 15); // 2 sqrt(2/15)
        let c_zy = sqrt_rat(10, 3);
        let two = RadicalNumber::from_integer(2);
        let two_sqrt2 = sqrt_rat(8, 1);
        for k in 2..=kmax {
            let mut xk = Vec::with_capacity(k);
            let mut yk = Vec::with_capacity(k);
            for i in 0..k {
                let mut xv = &two * &t.x_at(k - 1, i as isize);
                xv += &t.x_at(k - 1, i as isize - 1);
                xv += &(&c_xy * &t.y_at(k - 1, i as isize - 1));
                if i == k - 1 {
                    xv += &two;
                }
                xk.push(xv);

                let mut yv = &c_yx * &t.x_at(k - 1, i as isize);
                yv += &t.y_at(k - 1, i as isize);
                yv -= &(&c_yz * &t.z_at(k - 1, i as isize));
                yv += &t.y_at(k - 1, i as isize - 1);
                yv += &(&c_yz2 * &t.z_at(k - 1, i as isize - 1));
                if i == k - 1 {
                    yv += &two_sqrt2;
                }
                yk.push(yv);
            }
            let mut zk = Vec::with_capacity(k - 1);
            for i in 0..k - 1 {
                let mut zv = &c_zy * &t.y_at(k - 1, i as isize);
                zv -= &t.z_at(k - 1, i as isize);
                zv += &t.z_at(k - 1, i as isize - 1);
                zk.push(zv);
            }
            t.x[k] = xk;
            t.y[k] = yk;
            t.z[k] = zk;
        }
        t
    }

    pub fn kmax(&self) -> usize {
        self.kmax
    }

    fn at(v: &[Vec<RadicalNumber>], k: usize, i: isize) -> RadicalNumber {
        if k == 0 || i < 0 {
            return RadicalNumber::zero();
        }
        v[k].get(i as usize)
            .cloned()
            .unwrap_or_else(RadicalNumber::zero)
    }

    /// `x_i⁽ᵏ⁾`, zero outside the defined range (including `k = 0`).
    pub fn x_at(&self, k: usize, i: isize) -> RadicalNumber {
        Self::at(&self.x, k, i)
    }

    pub fn y_at(&self, k: usize, i: isize) -> RadicalNumber {
        Self::at(&self.y, k, i)
    }

    pub fn z_at(&self, k: usize, i: isize) -> RadicalNumber {
        Self::at(&self.z, k, i)
    }

    /// The closed form of `[A, L²ᵏ]¹` as a canonical tensor expression.
    pub fn reduction_expr(&self, k: usize) -> TensorExpr {
        assert!(k <= self.kmax, "recursion table too small");
        let mut e = TensorExpr::zero(1);
        if k == 0 {
            return e;
        }
        for i in 0..k {
            e.add_term(i as u32, CoreTensor::T, self.x_at(k, i as isize));
            e.add_term(i as u32, CoreTensor::LxT1, self.y_at(k, i as isize));
            if i < k - 1 {
                e.add_term(i as u32, CoreTensor::LLxT1, self.z_at(k, i as isize));
            }
        }
        e
    }
}

/// `[A, L²ᵏ]¹` computed directly at word level.
pub fn a_l2k_commutator(alg: &Algebra, k: u32) -> Result<TensorExpr, TensorError> {
    alg.coupled_commutator(&alg.expr_t(), &alg.expr_l2_power(k), 1)
}

/// Associativity of the deformed algebra reduces to
/// `[[A, L²ᵏ]¹ × L]⁰ = 0` for every power appearing in the deformation;
/// checks it exactly for `k = 1, …, kmax`.
pub fn check_associativity(kmax: u32) -> Result<bool, TensorError> {
    let alg = Algebra::so3_only(1);
    let l = alg.expr_l();
    for k in 1..=kmax {
        let comm = a_l2k_commutator(&alg, k)?;
        let scalar = alg.coupled_product(&comm, &l, 0)?;
        if !scalar.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Coefficient series of `[A, A²]¹ = -(Σ u_i L²ⁱ A + Σ v_i L²ⁱ [L×A]¹
/// + Σ w_i L²ⁱ [[L×L]²×A]¹)`.
pub struct ScalarSquareSeries {
    pub u: Vec<RadicalNumber>,
    pub v: Vec<RadicalNumber>,
    pub w: Vec<RadicalNumber>,
}

impl ScalarSquareSeries {
    /// Closed form induced by the reduction table.
    pub fn from_table(def: &VectorDeformation, table: &RecursionTable) -> Self {
        let kk = def.order();
        assert!(table.kmax() >= kk, "recursion table too small");
        let two = RadicalNumber::from_integer(2);
        let sqrt2 = sqrt_rat(2, 1);
        let two_sqrt2 = sqrt_rat(8, 1);
        let third_sqrt2 = sqrt_rat(2, 9); // (1/3) sqrt2
        let c_vz = sqrt_rat(3, 40); // (1/2) sqrt(3/10)
        let c_vz2 = sqrt_rat(2, 15);
        let c_wy = sqrt_rat(5, 6);
        let half = RadicalNumber::from_rational(rat(1, 2));
        let three_halves = RadicalNumber::from_rational(rat(3, 2));
        let mut u = Vec::new();
        let mut v = Vec::new();
        let mut w = Vec::new();
        for i in 0..=kk {
            let ii = i as isize;
            let mut ui = RadicalNumber::zero();
            let mut vi = RadicalNumber::zero();
            for k in i..=kk {
                let ak = RadicalNumber::from_rational(def.coeff(k));
                let mut su = &two * &table.x_at(k, ii);
                su += &(&third_sqrt2 * &table.y_at(k, ii - 1));
                if k == i {
                    su += &two;
                }
                ui += &(&ak * &su);

                let mut sv = &sqrt2 * &table.x_at(k, ii);
                sv += &(&three_halves * &table.y_at(k, ii));
                sv -= &(&c_vz * &table.z_at(k, ii));
                sv += &(&c_vz2 * &table.z_at(k, ii - 1));
                if k == i {
                    sv += &two_sqrt2;
                }
                vi += &(&ak * &sv);
            }
            u.push(ui);
            v.push(vi);
            if i < kk {
                let mut wi = RadicalNumber::zero();
                for k in i + 1..=kk {
                    let ak = RadicalNumber::from_rational(def.coeff(k));
                    let mut sw = &c_wy * &table.y_at(k, ii);
                    sw += &(&half * &table.z_at(k, ii));
                    wi += &(&ak * &sw);
                }
                w.push(wi);
            }
        }
        ScalarSquareSeries { u, v, w }
    }

    /// The expansion written out as a canonical tensor expression.
    pub fn commutator_expr(&self) -> TensorExpr {
        let mut e = TensorExpr::zero(1);
        for (i, ui) in self.u.iter().enumerate() {
            e.add_term(i as u32, CoreTensor::T, -ui);
        }
        for (i, vi) in self.v.iter().enumerate() {
            e.add_term(i as u32, CoreTensor::LxT1, -vi);
        }
        for (i, wi) in self.w.iter().enumerate() {
            e.add_term(i as u32, CoreTensor::LLxT1, -wi);
        }
        e
    }
}

/// `[A, A²]¹` computed directly at word level through the defining bracket.
pub fn a_squared_commutator(alg: &Algebra) -> Result<TensorExpr, TensorError> {
    alg.commutator_t_with_t_squared()
}

/// `[A, L·A]¹ = 0`: the scalar product `L·A = -√3 [L×A]⁰` stays an
/// invariant of the deformed algebra for any deformation series.
pub fn check_scalar_invariant(def: &VectorDeformation) -> Result<bool, TensorError> {
    let alg = def.algebra();
    let adotl = alg
        .expr_core(CoreTensor::ScalarLT)?
        .scale(&-&sqrt_rat(3, 1));
    let comm = alg.coupled_commutator(&alg.expr_t(), &adotl, 1)?;
    Ok(comm.is_zero())
}

/// Coefficients of the deformed quadratic invariant
/// `C = Σ_{k=1}^{K+1} b_k L²ᵏ + A²`; `b[k-1]` holds `b_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantCoeffs {
    pub b: Vec<Rational>,
}

/// Failure modes of the invariant solver.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InvariantError {
    /// the linear conditions admit no common solution with `b_k = 0` for
    /// `k > K+1`
    Inconsistent,
    /// a solved coefficient came out irrational (never expected)
    Irrational,
}

/// Solves `[A, Σ b_k L²ᵏ + A²]¹ = 0` exactly for `b_1, …, b_{K+1}`.
///
/// The commutator expands over the basis `L²ⁱ A`, `L²ⁱ [L×A]¹`,
/// `L²ⁱ [[L×L]²×A]¹`; equating each coefficient to the matching term of
/// the `[A, A²]¹` series gives an overdetermined linear system, solved and
/// checked in exact arithmetic.
pub fn solve_invariant(def: &VectorDeformation) -> Result<InvariantCoeffs, InvariantError> {
    let kk = def.order();
    let table = RecursionTable::new(kk + 1);
    let series = ScalarSquareSeries::from_table(def, &table);
    let n = kk + 1;
    let mut sys = ExactSystem::new(n);
    let mut feed = |row: Vec<RadicalNumber>| -> Result<(), InvariantError> {
        sys.add_row(row).map_err(|_| InvariantError::Inconsistent)
    };
    for i in 0..=kk {
        let mut row: Vec<RadicalNumber> =
            (1..=n).map(|k| table.x_at(k, i as isize)).collect();
        row.push(series.u[i].clone());
        feed(row)?;
        let mut row: Vec<RadicalNumber> =
            (1..=n).map(|k| table.y_at(k, i as isize)).collect();
        row.push(series.v[i].clone());
        feed(row)?;
        if i < kk {
            let mut row: Vec<RadicalNumber> =
                (1..=n).map(|k| table.z_at(k, i as isize)).collect();
            row.push(series.w[i].clone());
            feed(row)?;
        }
    }
    let solution = sys.solve();
    let b = solution
        .into_iter()
        .map(|c| c.as_rational().ok_or(InvariantError::Irrational))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(InvariantCoeffs { b })
}

/// Independent word-level check that `Σ b_k L²ᵏ + A²` commutes with `A`
/// (commutation with `L` holds by construction since it is a scalar).
pub fn verify_invariant(
    def: &VectorDeformation,
    coeffs: &InvariantCoeffs,
) -> Result<bool, TensorError> {
    let alg = def.algebra();
    let mut total = a_squared_commutator(&alg)?;
    for (idx, bk) in coeffs.b.iter().enumerate() {
        let k = (idx + 1) as u32;
        let piece = a_l2k_commutator(&alg, k)?;
        total = total.add(&piece.scale(&RadicalNumber::from_rational(bk.clone())));
    }
    Ok(total.is_zero())
}

/// A commonly quoted closed form for the invariant coefficients of a
/// fourth-order deformation, reproduced verbatim for comparison. It
/// disagrees with the exact solver in its third coefficient (an apparent
/// misprint: the same parameter appears twice); [`solve_invariant`] is
/// authoritative.
pub fn fourth_order_closed_form(def: &VectorDeformation) -> Vec<Rational> {
    assert!(def.order() <= 4);
    let (a0, a1, a2, a3, a4) = (
        def.coeff(0),
        def.coeff(1),
        def.coeff(2),
        def.coeff(3),
        def.coeff(4),
    );
    alloc::vec![
        &a0 + &a1,
        &(&(&a1 * &rat(1, 2)) + &(&a2 * &rat(4, 3))) + &(&(&a3 * &rat(-1, 3)) + &(&a4 * &rat(8, 15))),
        &(&(&a3 * &rat(1, 3)) + &(&a3 * &rat(5, 3))) + &(&a4 * &rat(-16, 15)),
        &(&a3 * &rat(1, 4)) + &(&a4 * &rat(2, 1)),
        &a4 * &rat(1, 5),
    ]
}

/// Differences between the exact solver and [`fourth_order_closed_form`],
/// as `(k, solved b_k, quoted b_k)` for every `k` where they disagree.
pub fn closed_form_discrepancies(
    def: &VectorDeformation,
) -> Result<Vec<(usize, Rational, Rational)>, InvariantError> {
    use num_traits::Zero;
    let solved = solve_invariant(def)?;
    let quoted = fourth_order_closed_form(def);
    let mut out = Vec::new();
    for k in 1..=5 {
        let s = if k <= solved.b.len() {
            solved.b[k - 1].clone()
        } else {
            Rational::zero()
        };
        let q = quoted[k - 1].clone();
        if s != q {
            out.push((k, s, q));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(v: i64) -> RadicalNumber {
        RadicalNumber::from_integer(v)
    }

    fn s2(num: i64, den: i64) -> RadicalNumber {
        RadicalNumber::from_sqrt(rat(num, den), 2)
    }

    fn s15(num: i64, den: i64) -> RadicalNumber {
        RadicalNumber::from_sqrt(rat(num, den), 15)
    }

    #[test]
    fn recursion_table_frozen_values() {
        let t = RecursionTable::new(5);
        // k = 1 seeds
        assert_eq!(t.x_at(1, 0), n(2));
        assert_eq!(t.y_at(1, 0), s2(2, 1));
        // k = 2
        assert_eq!(t.x_at(2, 0), n(4));
        assert_eq!(t.x_at(2, 1), RadicalNumber::from_rational(rat(20, 3)));
        assert_eq!(t.y_at(2, 0), s2(6, 1));
        assert_eq!(t.y_at(2, 1), s2(4, 1));
        assert_eq!(t.z_at(2, 0), s15(4, 3));
        // k = 3
        assert_eq!(t.x_at(3, 0), n(8));
        assert_eq!(t.x_at(3, 1), RadicalNumber::from_rational(rat(76, 3)));
        assert_eq!(t.x_at(3, 2), n(14));
        assert_eq!(t.y_at(3, 0), s2(12, 1));
        assert_eq!(t.y_at(3, 1), s2(26, 1));
        assert_eq!(t.y_at(3, 2), s2(6, 1));
        assert_eq!(t.z_at(3, 0), s15(8, 3));
        assert_eq!(t.z_at(3, 1), s15(4, 1));
        // k = 4
        assert_eq!(t.x_at(4, 0), n(16));
        assert_eq!(t.x_at(4, 1), RadicalNumber::from_rational(rat(224, 3)));
        assert_eq!(t.x_at(4, 2), n(88));
        assert_eq!(t.x_at(4, 3), n(24));
        assert_eq!(t.y_at(4, 0), s2(24, 1));
        assert_eq!(t.y_at(4, 1), s2(88, 1));
        assert_eq!(t.y_at(4, 2), s2(68, 1));
        assert_eq!(t.y_at(4, 3), s2(8, 1));
        assert_eq!(t.z_at(4, 0), s15(16, 3));
        assert_eq!(t.z_at(4, 1), s15(16, 1));
        assert_eq!(t.z_at(4, 2), s15(8, 1));
        // k = 5
        assert_eq!(t.x_at(5, 0), n(32));
        assert_eq!(t.x_at(5, 1), RadicalNumber::from_rational(rat(592, 3)));
        assert_eq!(t.x_at(5, 2), n(368));
        assert_eq!(t.x_at(5, 3), RadicalNumber::from_rational(rat(680, 3)));
        assert_eq!(t.x_at(5, 4), RadicalNumber::from_rational(rat(110, 3)));
        assert_eq!(t.y_at(5, 0), s2(48, 1));
        assert_eq!(t.y_at(5, 1), s2(248, 1));
        assert_eq!(t.y_at(5, 2), s2(352, 1));
        assert_eq!(t.y_at(5, 3), s2(140, 1));
        assert_eq!(t.y_at(5, 4), s2(10, 1));
        assert_eq!(t.z_at(5, 0), s15(32, 3));
        assert_eq!(t.z_at(5, 1), s15(48, 1));
        assert_eq!(t.z_at(5, 2), s15(160, 3));
        assert_eq!(t.z_at(5, 3), s15(40, 3));
        // out of range entries vanish
        assert!(t.x_at(0, 0).is_zero());
        assert!(t.x_at(2, -1).is_zero());
        assert!(t.z_at(2, 1).is_zero());
    }

    #[test]
    fn reduction_matches_word_level_commutator() {
        let alg = Algebra::so3_only(1);
        let t = RecursionTable::new(4);
        for k in 1..=4u32 {
            let direct = a_l2k_commutator(&alg, k).unwrap();
            assert_eq!(direct, t.reduction_expr(k as usize), "k = {k}");
        }
    }

    #[test]
    fn associativity_holds_for_low_powers() {
        assert!(check_associativity(4).unwrap());
    }

    #[test]
    fn square_series_matches_word_level_commutator() {
        let def = VectorDeformation::new(alloc::vec![rat(1, 1), rat(1, 2), rat(-1, 3)]);
        let table = RecursionTable::new(def.order());
        let series = ScalarSquareSeries::from_table(&def, &table);
        let engine = a_squared_commutator(&def.algebra()).unwrap();
        assert_eq!(engine, series.commutator_expr());
    }

    #[test]
    fn scalar_product_stays_invariant() {
        let def = VectorDeformation::new(alloc::vec![rat(-1, 1), rat(2, 3), rat(1, 5)]);
        assert!(check_scalar_invariant(&def).unwrap());
    }

    #[test]
    fn invariant_first_order() {
        // b_1 = a_0 + a_1, b_2 = a_1/2
        let def = VectorDeformation::new(alloc::vec![rat(1, 1), rat(1, 10)]);
        let c = solve_invariant(&def).unwrap();
        assert_eq!(c.b, alloc::vec![rat(11, 10), rat(1, 20)]);
        assert!(verify_invariant(&def, &c).unwrap());
    }

    #[test]
    fn invariant_single_parameter_closed_forms() {
        // columns of the solved closed form, one deformation parameter at
        // a time
        let cases: [(usize, alloc::vec::Vec<Rational>); 3] = [
            (2, alloc::vec![rat(0, 1), rat(4, 3), rat(1, 3)]),
            (3, alloc::vec![rat(0, 1), rat(-1, 3), rat(5, 3), rat(1, 4)]),
            (
                4,
                alloc::vec![rat(0, 1), rat(8, 15), rat(-16, 15), rat(2, 1), rat(1, 5)],
            ),
        ];
        for (k, expected) in cases {
            let mut a = alloc::vec![rat(0, 1); k + 1];
            a[k] = rat(1, 1);
            let c = solve_invariant(&VectorDeformation::new(a)).unwrap();
            assert_eq!(c.b, expected, "unit deformation at order {k}");
        }
    }

    #[test]
    fn invariant_fourth_order_verified_at_word_level() {
        let def = VectorDeformation::new(alloc::vec![
            rat(1, 1),
            rat(1, 2),
            rat(-1, 3),
            rat(2, 7),
            rat(3, 5),
        ]);
        let c = solve_invariant(&def).unwrap();
        assert_eq!(
            c.b,
            alloc::vec![
                rat(3, 2),
                rat(191, 6300),
                rat(-433, 1575),
                rat(89, 70),
                rat(3, 25)
            ]
        );
        assert!(verify_invariant(&def, &c).unwrap());
        // the quoted closed form disagrees exactly in b_3
        let d = closed_form_discrepancies(&def).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0], (3, rat(-433, 1575), rat(-12, 175)));
    }
}
