//! Acceptance suite: one test per acceptance criterion, each printing a
//! single pass line with its runtime. Tolerances are pinned here and must
//! not be loosened; a red criterion means the library is wrong.

use std::time::{Duration, Instant};

use defangmom::repbuilder::{
    casimir_eigenvalues, realize, reduced_matrix_elements, verify_realization,
    DeformationParams, SpectralParam, UnirrepLabel,
};
use defangmom_core::angmom::{clebsch_gordan, racah_unitary, triangle_ok, AngMom};
use defangmom_core::exactnum::{rat, rat_int, RadicalNumber};
use defangmom_core::quaddef;
use defangmom_core::tensoralg::{jacobi_conditions, Algebra, CoreTensor, TensorExpr};
use defangmom_core::vectordef::{
    check_associativity, check_scalar_invariant, closed_form_discrepancies, solve_invariant,
    verify_invariant, RecursionTable, VectorDeformation,
};

fn report(criterion: u32, name: &str, elapsed: Duration, budget: Duration) {
    println!(
        "criterion {criterion} ({name}): pass in {:.3}s (budget {:.0}s)",
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
    assert!(
        elapsed < budget,
        "criterion {criterion} exceeded its {budget:?} runtime budget: {elapsed:?}"
    );
}

fn rad(n: i64, d: i64) -> RadicalNumber {
    RadicalNumber::from_rational(rat(n, d))
}

fn sq(n: i64, d: i64, r: u64) -> RadicalNumber {
    RadicalNumber::from_sqrt(rat(n, d), r)
}

/// 1. The reduction table for k <= 5 matches every tabulated entry exactly.
#[test]
fn criterion_1_recursion_table_exact() {
    let start = Instant::now();
    let table = RecursionTable::new(5);
    // x^(k): rational multiples of the identity coupling
    let x: [&[RadicalNumber]; 5] = [
        &[rad(2, 1)],
        &[rad(4, 1), rad(20, 3)],
        &[rad(8, 1), rad(76, 3), rad(14, 1)],
        &[rad(16, 1), rad(224, 3), rad(88, 1), rad(24, 1)],
        &[rad(32, 1), rad(592, 3), rad(368, 1), rad(680, 3), rad(110, 3)],
    ];
    // y^(k): multiples of sqrt2
    let y: [&[RadicalNumber]; 5] = [
        &[sq(2, 1, 2)],
        &[sq(6, 1, 2), sq(4, 1, 2)],
        &[sq(12, 1, 2), sq(26, 1, 2), sq(6, 1, 2)],
        &[sq(24, 1, 2), sq(88, 1, 2), sq(68, 1, 2), sq(8, 1, 2)],
        &[sq(48, 1, 2), sq(248, 1, 2), sq(352, 1, 2), sq(140, 1, 2), sq(10, 1, 2)],
    ];
    // z^(k): multiples of sqrt(5/3) = (1/3) sqrt15
    let z: [&[RadicalNumber]; 5] = [
        &[],
        &[sq(4, 3, 15)],
        &[sq(8, 3, 15), sq(4, 1, 15)],
        &[sq(16, 3, 15), sq(16, 1, 15), sq(8, 1, 15)],
        &[sq(32, 3, 15), sq(48, 1, 15), sq(160, 3, 15), sq(40, 3, 15)],
    ];
    for k in 1..=5usize {
        for (i, want) in x[k - 1].iter().enumerate() {
            assert_eq!(&table.x_at(k, i as isize), want, "x^({k})_{i}");
        }
        for (i, want) in y[k - 1].iter().enumerate() {
            assert_eq!(&table.y_at(k, i as isize), want, "y^({k})_{i}");
        }
        for (i, want) in z[k - 1].iter().enumerate() {
            assert_eq!(&table.z_at(k, i as isize), want, "z^({k})_{i}");
        }
    }
    report(1, "reduction table exact", start.elapsed(), Duration::from_secs(1));
}

/// 2. ([A, L^2k] x L)^0 vanishes exactly for every k <= 6.
#[test]
fn criterion_2_associativity_order_six() {
    let start = Instant::now();
    assert_eq!(check_associativity(6), Ok(true));
    report(2, "associativity k <= 6", start.elapsed(), Duration::from_secs(10));
}

/// 3. Consistency conditions: one for a vector, two with pinned coefficient
/// ratios (2 sqrt2 : sqrt7) and (1 : -2) for a quadrupole.
#[test]
fn criterion_3_jacobi_reduction() {
    let start = Instant::now();
    let vector = jacobi_conditions(1);
    assert_eq!(vector.independent.len(), 1);
    assert_eq!(vector.independent[0].coeffs.len(), 1);
    assert!(!vector.independent[0].coeffs[0].1.is_zero());

    let quad = jacobi_conditions(2);
    assert_eq!(quad.independent.len(), 2);
    let mut seen = [false, false];
    for cond in &quad.independent {
        assert_eq!(cond.coeffs.len(), 2, "conditions couple inner ranks 1 and 3");
        let c1 = &cond.coeffs[0].1;
        let c3 = &cond.coeffs[1].1;
        assert_eq!(cond.coeffs[0].0, 1);
        assert_eq!(cond.coeffs[1].0, 3);
        // ratio c1 : c3 = 2 sqrt2 : sqrt7 <=> c1 sqrt7 - c3 2 sqrt2 = 0
        if (&(c1 * &sq(1, 1, 7)) - &(c3 * &sq(2, 1, 2))).is_zero() {
            seen[0] = true;
        }
        // ratio c1 : c3 = 1 : -2 <=> 2 c1 + c3 = 0
        if (&(c1 * &RadicalNumber::from_integer(2)) + c3).is_zero() {
            seen[1] = true;
        }
    }
    assert!(seen[0] && seen[1], "both pinned coefficient ratios must occur");
    report(3, "jacobi reduction", start.elapsed(), Duration::from_secs(5));
}

/// 4. Invariant solver: closed-form coefficients for a generic fourth-order
/// series, the b2/b3 typo comparison, and a deformed matrix check that the
/// realized quadratic invariant commutes and is scalar.
#[test]
fn criterion_4_invariant_solver() {
    let start = Instant::now();
    let (a0, a1, a2, a3, a4) = (rat(1, 1), rat(2, 3), rat(5, 7), rat(3, 11), rat(7, 13));
    let def = VectorDeformation::new(vec![
        a0.clone(),
        a1.clone(),
        a2.clone(),
        a3.clone(),
        a4.clone(),
    ]);
    let coeffs = solve_invariant(&def).unwrap();
    assert_eq!(coeffs.b.len(), 5);
    assert_eq!(coeffs.b[0], &a0 + &a1);
    assert_eq!(coeffs.b[3], &(&a3 / &rat_int(4)) + &(&a4 * &rat_int(2)));
    assert_eq!(coeffs.b[4], &a4 / &rat_int(5));
    assert!(verify_invariant(&def, &coeffs).unwrap());

    // the quoted closed form repeats a3 in b3 where a2 is meant
    let diffs = closed_form_discrepancies(&def).unwrap();
    assert!(!diffs.is_empty());
    assert!(diffs.iter().all(|(k, _, _)| *k == 2 || *k == 3));
    let b3 = diffs.iter().find(|(k, _, _)| *k == 3).expect("b3 typo");
    assert_eq!(&b3.1 - &b3.2, &(&a2 - &a3) / &rat_int(3));

    // deformed so(4) [3,1], a1 = 1/10: realized invariant commutes with A
    // and is scalar on the representation space
    let label = UnirrepLabel::So4 { twice_p: 6, twice_q: 2 };
    let params = DeformationParams::new(vec![rat_int(1), rat(1, 10)]);
    let m = realize(&label, &params, 0).unwrap();
    let rep = verify_realization(&m);
    assert!(rep.c1_comm < 1e-10, "[C1d, A] residual {}", rep.c1_comm);
    assert!(rep.casimir_scalar_dev < 1e-10, "C1d scalar deviation {}", rep.casimir_scalar_dev);
    report(4, "invariant solver", start.elapsed(), Duration::from_secs(10));
}

/// 5. [A, L.A]^1 = 0 exactly at word level for arbitrary finite-order series.
#[test]
fn criterion_5_scalar_product_invariant() {
    let start = Instant::now();
    for a in [
        vec![rat_int(1)],
        vec![rat_int(-1), rat(1, 2)],
        vec![rat_int(0), rat(2, 3), rat(-5, 7)],
        vec![rat_int(1), rat(1, 10), rat(3, 4), rat(-2, 9), rat(11, 13)],
    ] {
        let def = VectorDeformation::new(a);
        assert_eq!(check_scalar_invariant(&def), Ok(true));
    }
    report(5, "scalar product invariant", start.elapsed(), Duration::from_secs(10));
}

/// 6. Quadrupole obstruction: exactly four conditions of rank two, so only
/// the trivial first-order deformation survives; the closed-form reductions
/// agree with the word-level commutators as a second route.
#[test]
fn criterion_6_quadrupole_obstruction() {
    let start = Instant::now();
    let rep = quaddef::first_order_obstruction().unwrap();
    assert_eq!(rep.conditions.len(), 4);
    assert_eq!(rep.rank, 2);
    assert!(rep.only_trivial);

    let alg = Algebra::so3_only(2);
    let q = alg.expr_t();
    let l2l = TensorExpr::term(1, 1, CoreTensor::L, RadicalNumber::one());
    let lll3 = alg.expr_core(CoreTensor::LLL3).unwrap();
    for outer in [1u32, 3] {
        let (c_lx, c_llx) = match outer {
            1 => (CoreTensor::LxT1, CoreTensor::LLxT1),
            _ => (CoreTensor::LxT3, CoreTensor::LLxT3),
        };
        let (lx, llx) = quaddef::reduction_of_q_with_l2l(outer);
        let mut want = TensorExpr::zero(outer);
        want.add_term(0, c_lx, lx);
        want.add_term(0, c_llx, llx);
        assert_eq!(alg.coupled_commutator(&q, &l2l, outer).unwrap(), want);

        let (lx, llx) = quaddef::reduction_of_q_with_lll3(outer);
        let mut want = TensorExpr::zero(outer);
        want.add_term(0, c_lx, lx);
        want.add_term(0, c_llx, llx);
        assert_eq!(alg.coupled_commutator(&q, &lll3, outer).unwrap(), want);
    }
    report(6, "quadrupole obstruction", start.elapsed(), Duration::from_secs(1));
}

fn check_realization(
    label: &UnirrepLabel,
    params: &DeformationParams,
    cutoff: u32,
    residual_tol: f64,
    casimir_tol: f64,
) {
    let m = realize(label, params, cutoff).unwrap_or_else(|e| panic!("{label}: {e}"));
    let rep = verify_realization(&m);
    assert!(
        rep.max() < residual_tol,
        "{label}: residual {} over tolerance {residual_tol}",
        rep.max()
    );
    let (c1, c2) = casimir_eigenvalues(label, params).unwrap();
    assert!(
        (m.c1d[(0, 0)].re - c1).abs() < casimir_tol,
        "{label}: C1d spectral {} vs closed {}",
        m.c1d[(0, 0)].re,
        c1
    );
    assert!(
        (m.c2d[(0, 0)].re - c2).abs() < casimir_tol,
        "{label}: C2d spectral {} vs closed {}",
        m.c2d[(0, 0)].re,
        c2
    );
}

/// 7. Representation suite: every so(4) label with p <= 4, five deformed
/// parameter points, and truncated so(3,1)/e(3) towers all satisfy the
/// defining relations; undeformed reduced matrix elements match the
/// directly coded closed forms.
#[test]
fn criterion_7_representation_suite() {
    let start = Instant::now();
    // all 44 labels with p <= 4 (integer and half-integer)
    let mut so4_count = 0;
    for twice_p in 1..=8u32 {
        for twice_q in (-(twice_p as i32)..=twice_p as i32).step_by(2) {
            let label = UnirrepLabel::So4 { twice_p, twice_q };
            let params = DeformationParams::undeformed(&label);
            check_realization(&label, &params, 0, 1e-10, 1e-9);

            // undeformed closed forms: diag = q(p+1)/sqrt(l(l+1)),
            // lower = -sqrt((l^2-q^2)((p+1)^2-l^2)/(l(2l-1)))
            let red = reduced_matrix_elements(&label, &params, 0).unwrap();
            let p = twice_p as f64 / 2.0;
            let q = twice_q as f64 / 2.0;
            for (i, &tl) in red.tower.iter().enumerate() {
                let l = tl as f64 / 2.0;
                let diag = if tl == 0 { 0.0 } else { q * (p + 1.0) / (l * (l + 1.0)).sqrt() };
                assert!((red.diag[i] - diag).abs() < 1e-12, "{label} diag at l = {l}");
                let lower = if i == 0 {
                    0.0
                } else {
                    -((l * l - q * q) * ((p + 1.0) * (p + 1.0) - l * l) / (l * (2.0 * l - 1.0)))
                        .sqrt()
                };
                assert!((red.lower[i] - lower).abs() < 1e-12, "{label} lower at l = {l}");
            }
            so4_count += 1;
        }
    }
    assert!(so4_count >= 20);

    // deformed parameter points on [3,1], all passing the unitarity scan
    let label = UnirrepLabel::So4 { twice_p: 6, twice_q: 2 };
    let deformed = [
        vec![rat_int(1), rat(1, 10)],
        vec![rat_int(1), rat(1, 4)],
        vec![rat_int(1), rat(-1, 50)],
        vec![rat_int(1), rat_int(0), rat(1, 100)],
        vec![rat_int(1), rat(1, 10), rat(1, 50)],
    ];
    for a in deformed {
        let params = DeformationParams::new(a);
        check_realization(&label, &params, 0, 1e-10, 1e-9);
    }

    // truncated infinite towers at cutoff 10: interior residuals only
    let infinite = [
        UnirrepLabel::So31 { twice_l0: 2, c: SpectralParam::Real(2.0) },
        UnirrepLabel::So31 { twice_l0: 3, c: SpectralParam::Real(1.0) },
        UnirrepLabel::So31 { twice_l0: 0, c: SpectralParam::Imaginary(0.5) },
        UnirrepLabel::E3 { twice_l0: 0, eps: 1.0 },
        UnirrepLabel::E3 { twice_l0: 1, eps: -3.0 },
        UnirrepLabel::E3 { twice_l0: 2, eps: 2.0 },
    ];
    for label in infinite {
        let params = DeformationParams::undeformed(&label);
        let m = realize(&label, &params, 10).unwrap();
        let rep = verify_realization(&m);
        assert!(rep.interior_only);
        assert!(rep.max() < 1e-8, "{label}: interior residual {}", rep.max());

        // undeformed closed forms: diag = -l0 s/sqrt(l(l+1)),
        // lower = -sqrt((l^2-l0^2)(s^2+l^2 resp. s^2)/(l(2l-1)))
        let red = reduced_matrix_elements(&label, &params, 10).unwrap();
        let l0 = label.twice_l0() as f64 / 2.0;
        let (s, s2, radial) = match label {
            UnirrepLabel::So31 { c, .. } => (c.real().unwrap_or(0.0), c.squared(), true),
            UnirrepLabel::E3 { eps, .. } => (eps, 0.0, false),
            _ => unreachable!(),
        };
        for (i, &tl) in red.tower.iter().enumerate() {
            let l = tl as f64 / 2.0;
            let diag = if tl == 0 { 0.0 } else { -l0 * s / (l * (l + 1.0)).sqrt() };
            assert!((red.diag[i] - diag).abs() < 1e-12, "{label} diag at l = {l}");
            let shift = if radial { s2 + l * l } else { s * s };
            let lower = if i == 0 {
                0.0
            } else {
                -((l * l - l0 * l0) * shift / (l * (2.0 * l - 1.0))).sqrt()
            };
            assert!((red.lower[i] - lower).abs() < 1e-12, "{label} lower at l = {l}");
        }
    }
    report(7, "representation suite", start.elapsed(), Duration::from_secs(30));
}

/// 8. Coupling coefficient properties, exact and exhaustive for j <= 3.
#[test]
fn criterion_8_coupling_properties() {
    let start = Instant::now();
    for tj1 in 0..=6u32 {
        for tj2 in 0..=6u32 {
            let j1 = AngMom::from_twice(tj1);
            let j2 = AngMom::from_twice(tj2);
            for tj in (tj1.abs_diff(tj2)..=tj1 + tj2).step_by(2) {
                for tjp in (tj1.abs_diff(tj2)..=tj1 + tj2).step_by(2) {
                    let j = AngMom::from_twice(tj);
                    let jp = AngMom::from_twice(tjp);
                    for tm in AngMom::from_twice(tj.min(tjp)).projections() {
                        let mut sum = RadicalNumber::zero();
                        for tm1 in j1.projections() {
                            sum += &(&clebsch_gordan(j1, tm1, j2, tm - tm1, j, tm)
                                * &clebsch_gordan(j1, tm1, j2, tm - tm1, jp, tm));
                        }
                        let want = if tj == tjp {
                            RadicalNumber::one()
                        } else {
                            RadicalNumber::zero()
                        };
                        assert_eq!(sum, want, "orthogonality at {tj1} {tj2} {tj} {tjp} {tm}");
                    }
                }
            }
        }
    }
    for ta in 0..=6u32 {
        for tb in 0..=6u32 {
            for tc in 0..=6u32 {
                for td in 0..=6u32 {
                    let (a, b, c, d) = (
                        AngMom::from_twice(ta),
                        AngMom::from_twice(tb),
                        AngMom::from_twice(tc),
                        AngMom::from_twice(td),
                    );
                    for tf in (tb.abs_diff(td)..=tb + td).step_by(2) {
                        for tfp in (tb.abs_diff(td)..=tb + td).step_by(2) {
                            if !triangle_ok(ta, tf, tc) || !triangle_ok(ta, tfp, tc) {
                                continue;
                            }
                            let f = AngMom::from_twice(tf);
                            let fp = AngMom::from_twice(tfp);
                            let mut sum = RadicalNumber::zero();
                            for te in (ta.abs_diff(tb)..=ta + tb).step_by(2) {
                                if !triangle_ok(te, td, tc) {
                                    continue;
                                }
                                let e = AngMom::from_twice(te);
                                sum += &(&racah_unitary(a, b, c, d, e, f)
                                    * &racah_unitary(a, b, c, d, e, fp));
                            }
                            let want = if tf == tfp {
                                RadicalNumber::one()
                            } else {
                                RadicalNumber::zero()
                            };
                            assert_eq!(sum, want, "unitarity at {ta} {tb} {tc} {td} {tf} {tfp}");
                        }
                    }
                }
            }
        }
    }
    report(8, "coupling properties", start.elapsed(), Duration::from_secs(5));
}
