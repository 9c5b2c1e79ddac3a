//! Matrix realizations of the unitary irreducible representations of the
//! deformed so(4), so(3,1) and e(3) algebras, built from the exact reduced
//! matrix elements and verified numerically against the defining relations.
//!
//! The towers contain each so(3) representation at most once:
//!
//! * so(4): label `[p,q]`, `l = |q|, |q|+1, …, p`;
//! * so(3,1): label `(l0,c)` with `c` real, or `l0 = 0` and `c = iν`;
//! * e(3): label `(l0,ε)`.
//!
//! Infinite towers are truncated at a cutoff and verified on the interior
//! blocks only, since truncation necessarily breaks the vector bracket at
//! the top block.

use defangmom_core::angmom::{clebsch_gordan, AngMom};
use defangmom_core::exactnum::{rat, rat_int, Rational};
use defangmom_core::vectordef::{solve_invariant, VectorDeformation};
use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use std::fmt;

type CMatrix = DMatrix<Complex64>;

/// The second label of an so(3,1) unirrep: real `c`, or pure imaginary
/// `c = iν` (allowed only with `l0 = 0`), which enters the matrix elements
/// only through `c² = -ν²`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum SpectralParam {
    Real(f64),
    Imaginary(f64),
}

impl SpectralParam {
    pub fn squared(self) -> f64 {
        match self {
            SpectralParam::Real(c) => c * c,
            SpectralParam::Imaginary(nu) => -nu * nu,
        }
    }

    /// Real value, if real.
    pub fn real(self) -> Option<f64> {
        match self {
            SpectralParam::Real(c) => Some(c),
            SpectralParam::Imaginary(_) => None,
        }
    }
}

impl fmt::Display for SpectralParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectralParam::Real(c) => write!(f, "{c}"),
            SpectralParam::Imaginary(nu) => write!(f, "i*{nu}"),
        }
    }
}

/// Label of a unitary irreducible representation whose tower contains each
/// so(3) representation at most once. Angular momenta are stored doubled so
/// half-integer towers are exact.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum UnirrepLabel {
    /// `[p,q]`, `p ≥ |q|`, `p - |q|` an integer.
    So4 { twice_p: u32, twice_q: i32 },
    /// `(l0,c)`.
    So31 { twice_l0: u32, c: SpectralParam },
    /// `(l0,ε)`.
    E3 { twice_l0: u32, eps: f64 },
}

/// An invalid representation label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelError(pub String);

impl fmt::Display for LabelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid label: {}", self.0)
    }
}

impl std::error::Error for LabelError {}

impl UnirrepLabel {
    pub fn validate(&self) -> Result<(), LabelError> {
        match *self {
            UnirrepLabel::So4 { twice_p, twice_q } => {
                let tq = twice_q.unsigned_abs();
                if tq > twice_p {
                    return Err(LabelError(format!(
                        "so(4) requires p >= |q| (got 2p = {twice_p}, 2q = {twice_q})"
                    )));
                }
                if (twice_p - tq) % 2 != 0 {
                    return Err(LabelError(
                        "so(4) requires p and |q| both integer or both half-integer".into(),
                    ));
                }
                Ok(())
            }
            UnirrepLabel::So31 { twice_l0, c } => {
                if matches!(c, SpectralParam::Imaginary(_)) && twice_l0 != 0 {
                    return Err(LabelError(
                        "so(3,1) allows imaginary c only with l0 = 0".into(),
                    ));
                }
                Ok(())
            }
            UnirrepLabel::E3 { .. } => Ok(()),
        }
    }

    /// Doubled lowest tower value: `|q|` for so(4), `l0` otherwise.
    pub fn twice_l0(&self) -> u32 {
        match *self {
            UnirrepLabel::So4 { twice_q, .. } => twice_q.unsigned_abs(),
            UnirrepLabel::So31 { twice_l0, .. } | UnirrepLabel::E3 { twice_l0, .. } => twice_l0,
        }
    }

    /// Doubled highest tower value for finite towers (`p` for so(4)).
    pub fn twice_l1(&self) -> Option<u32> {
        match *self {
            UnirrepLabel::So4 { twice_p, .. } => Some(twice_p),
            _ => None,
        }
    }

    /// Leading coefficient `a0` of the defining bracket series for the
    /// undeformed algebra: `+1` (so(4)), `-1` (so(3,1)), `0` (e(3)).
    pub fn base_coeff(&self) -> Rational {
        match self {
            UnirrepLabel::So4 { .. } => rat_int(1),
            UnirrepLabel::So31 { .. } => rat_int(-1),
            UnirrepLabel::E3 { .. } => rat_int(0),
        }
    }

    pub fn is_truncated(&self) -> bool {
        !matches!(self, UnirrepLabel::So4 { .. })
    }

    pub fn algebra_name(&self) -> &'static str {
        match self {
            UnirrepLabel::So4 { .. } => "so4",
            UnirrepLabel::So31 { .. } => "so31",
            UnirrepLabel::E3 { .. } => "e3",
        }
    }
}

impl fmt::Display for UnirrepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let half = |t: i64| {
            if t % 2 == 0 {
                format!("{}", t / 2)
            } else {
                format!("{t}/2")
            }
        };
        match *self {
            UnirrepLabel::So4 { twice_p, twice_q } => {
                write!(f, "[{},{}]", half(twice_p as i64), half(twice_q as i64))
            }
            UnirrepLabel::So31 { twice_l0, c } => write!(f, "({},{})", half(twice_l0 as i64), c),
            UnirrepLabel::E3 { twice_l0, eps } => write!(f, "({},{})", half(twice_l0 as i64), eps),
        }
    }
}

/// The deformation series `g(L²) = Σ_k a_k L²ᵏ`, including the constant
/// term `a0` that selects the undeformed algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformationParams {
    a: Vec<Rational>,
}

impl DeformationParams {
    pub fn new(a: Vec<Rational>) -> Self {
        let mut a = a;
        if a.is_empty() {
            a.push(Rational::zero());
        }
        DeformationParams { a }
    }

    /// Undeformed series for the given algebra: `g = a0`.
    pub fn undeformed(label: &UnirrepLabel) -> Self {
        DeformationParams::new(vec![label.base_coeff()])
    }

    /// `a0` replaced by the algebra's required value, keeping `a_k`, `k > 0`.
    pub fn with_base(&self, label: &UnirrepLabel) -> Self {
        let mut a = self.a.clone();
        a[0] = label.base_coeff();
        DeformationParams::new(a)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.a
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.a.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_deformed(&self) -> bool {
        self.a.iter().skip(1).any(|c| !c.is_zero())
    }

    /// `g(t) = Σ_k a_k tᵏ` exactly.
    pub fn g_at(&self, t: &Rational) -> Rational {
        horner(&self.a, t)
    }

    /// `G(x, y)` with `x = l²`, `y = l0²`: the divided difference
    /// `Σ_k a_k (Φ_k(x) - Φ_k(y))/(x - y)` of the telescoped partial sums,
    /// which is a total polynomial in `(x, y)` (the `x = y` singularity is
    /// removable). For `l > l0` it equals
    /// `(x-y)⁻¹ Σ_{j=l0}^{l-1} (2j+1) g(j(j+1))`.
    pub fn big_g(&self, x: &Rational, y: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for (k, ak) in self.a.iter().enumerate() {
            if !ak.is_zero() {
                acc += ak * &divided_difference(&partial_sum_poly(k), x, y);
            }
        }
        acc
    }

    /// Direct sum form of `G` over the half-open tower `[l0, l)`; the
    /// arguments are doubled and must satisfy `l > l0`.
    pub fn big_g_sum_form(&self, twice_l: u32, twice_l0: u32) -> Rational {
        assert!(twice_l > twice_l0 && (twice_l - twice_l0) % 2 == 0);
        let mut sum = Rational::zero();
        let mut tj = twice_l0;
        while tj < twice_l {
            let j = rat(tj as i64, 2);
            let t = &j * &(&j + &rat_int(1));
            sum += &(&(&j * &rat_int(2)) + &rat_int(1)) * &self.g_at(&t);
            tj += 2;
        }
        let x = rat((twice_l as i64) * (twice_l as i64), 4);
        let y = rat((twice_l0 as i64) * (twice_l0 as i64), 4);
        sum / (x - y)
    }

    /// Coefficients `b_k` of the deformed quadratic invariant
    /// `C = Σ_k b_k L²ᵏ + A²`, solved exactly; `b[k-1]` holds `b_k`.
    pub fn invariant_coeffs(&self) -> Vec<Rational> {
        solve_invariant(&VectorDeformation::new(self.a.clone()))
            .expect("polynomial deformations always admit an invariant")
            .b
    }

    /// `h(t) = Σ_k b_k tᵏ` with the invariant coefficients.
    pub fn h_at(&self, t: &Rational) -> Rational {
        let b = self.invariant_coeffs();
        let mut acc = Rational::zero();
        let mut power = t.clone();
        for bk in &b {
            acc += bk * &power;
            power *= t;
        }
        acc
    }
}

fn horner(coeffs: &[Rational], t: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for c in coeffs.iter().rev() {
        acc = &(&acc * t) + c;
    }
    acc
}

/// Coefficients (low to high) of the unique polynomial `Φ_k` of degree
/// `k+1` with `Φ_k(l²) = Σ_{j=0}^{l-1} (2j+1) (j(j+1))ᵏ`. The telescoping
/// step `Φ_k((j+1)²) - Φ_k(j²) = (2j+1)(j(j+1))ᵏ` is a polynomial identity
/// in `j`, so the same `Φ_k` serves integer and half-integer towers.
fn partial_sum_poly(k: usize) -> Vec<Rational> {
    // Newton interpolation at x = l² for l = 0..=k+1.
    let n = k + 2;
    let mut xs = Vec::with_capacity(n);
    let mut fs = Vec::with_capacity(n);
    let mut sum = Rational::zero();
    for l in 0..n as i64 {
        xs.push(rat_int(l * l));
        fs.push(sum.clone());
        let t = rat_int(l * (l + 1));
        let mut term = rat_int(2 * l + 1);
        for _ in 0..k {
            term *= &t;
        }
        sum += term;
    }
    // divided differences in place
    let mut dd = fs;
    for level in 1..n {
        for i in (level..n).rev() {
            let num = &dd[i] - &dd[i - 1];
            dd[i] = num / (&xs[i] - &xs[i - level]);
        }
    }
    // expand the Newton form into monomial coefficients
    let mut coeffs = vec![Rational::zero(); n];
    let mut basis = vec![Rational::zero(); n];
    basis[0] = rat_int(1);
    let mut basis_len = 1;
    for (i, c) in dd.iter().enumerate() {
        for (j, b) in basis.iter().enumerate().take(basis_len) {
            coeffs[j] += c * b;
        }
        if i + 1 < n {
            // basis *= (x - xs[i])
            for j in (0..basis_len).rev() {
                let shifted = basis[j].clone();
                basis[j + 1] += &shifted;
                basis[j] = -(&shifted * &xs[i]);
            }
            basis_len += 1;
        }
    }
    coeffs
}

/// `(p(x) - p(y))/(x - y)` evaluated exactly as the total polynomial
/// `Σ_i c_i Σ_{a+b=i-1} xᵃ yᵇ`.
fn divided_difference(coeffs: &[Rational], x: &Rational, y: &Rational) -> Rational {
    let deg = coeffs.len();
    let mut xpow = vec![rat_int(1)];
    let mut ypow = vec![rat_int(1)];
    for i in 1..deg {
        xpow.push(&xpow[i - 1] * x);
        ypow.push(&ypow[i - 1] * y);
    }
    let mut acc = Rational::zero();
    for (i, c) in coeffs.iter().enumerate().skip(1) {
        if c.is_zero() {
            continue;
        }
        let mut inner = Rational::zero();
        for a in 0..i {
            inner += &xpow[a] * &ypow[i - 1 - a];
        }
        acc += c * &inner;
    }
    acc
}

/// Deformation parameters that break unitarity: a radicand of the reduced
/// matrix elements went negative at the reported tower position.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitarityError {
    /// doubled `l` at which the first negative radicand appears
    pub twice_l: u32,
    pub radicand: f64,
}

impl fmt::Display for UnitarityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "non-unitary parameters: radicand {} < 0 at 2l = {}",
            self.radicand, self.twice_l
        )
    }
}

impl std::error::Error for UnitarityError {}

/// Reduced matrix elements of the vector operator over a tower, indexed by
/// tower position; `lower[0] = 0` (no block below the bottom).
#[derive(Clone, Debug)]
pub struct ReducedElements {
    /// doubled `l` values of the tower, ascending
    pub tower: Vec<u32>,
    /// `⟨l‖A‖l⟩`
    pub diag: Vec<f64>,
    /// `⟨l-1‖A‖l⟩`
    pub lower: Vec<f64>,
}

impl ReducedElements {
    /// `⟨l+1‖A‖l⟩`, from the vector-operator conjugation rule
    /// `⟨l+1‖A‖l⟩ = -√((2l+1)/(2l+3)) ⟨l‖A‖l+1⟩`.
    pub fn upper(&self, i: usize) -> f64 {
        if i + 1 >= self.tower.len() {
            return 0.0;
        }
        let tl = self.tower[i] as f64;
        -((tl + 1.0) / (tl + 3.0)).sqrt() * self.lower[i + 1]
    }
}

fn l_of(tl: u32) -> Rational {
    rat(tl as i64, 2)
}

fn lsq_of(tl: u32) -> Rational {
    rat((tl as i64) * (tl as i64), 4)
}

fn to_f(q: &Rational) -> f64 {
    q.to_f64().expect("rational fits f64")
}

/// Nonnegative square root with a small tolerance for roundoff on the
/// float-valued radicands of the infinite towers.
fn checked_sqrt(radicand: f64, twice_l: u32) -> Result<f64, UnitarityError> {
    if radicand < -1e-12 {
        return Err(UnitarityError { twice_l, radicand });
    }
    Ok(radicand.max(0.0).sqrt())
}

/// Tower of doubled `l` values for a label; `cutoff` is the number of
/// blocks above `l0` kept for the infinite towers (ignored for so(4)).
pub fn tower_of(label: &UnirrepLabel, cutoff: u32) -> Vec<u32> {
    let tl0 = label.twice_l0();
    let tl1 = label.twice_l1().unwrap_or(tl0 + 2 * cutoff);
    (tl0..=tl1).step_by(2).collect()
}

/// Reduced matrix elements of `A` across the tower, deformed through the
/// function `G`; every radicand is scanned before any matrix is built.
pub fn reduced_matrix_elements(
    label: &UnirrepLabel,
    params: &DeformationParams,
    cutoff: u32,
) -> Result<ReducedElements, UnitarityError> {
    let tower = tower_of(label, cutoff);
    let mut diag = Vec::with_capacity(tower.len());
    let mut lower = Vec::with_capacity(tower.len());
    match *label {
        UnirrepLabel::So4 { twice_p, twice_q } => {
            let q = rat(twice_q as i64, 2);
            let p1 = &rat(twice_p as i64, 2) + &rat_int(1);
            let qsq = &q * &q;
            let gp = params.big_g(&(&p1 * &p1), &qsq);
            // the diagonal element carries sqrt(G((p+1)², q²))
            if twice_q != 0 && gp.is_negative() {
                return Err(UnitarityError {
                    twice_l: twice_p + 2,
                    radicand: to_f(&gp),
                });
            }
            let qp1 = to_f(&(&q * &p1));
            for (i, &tl) in tower.iter().enumerate() {
                let l = l_of(tl);
                let ll1 = &l * &(&l + &rat_int(1));
                diag.push(if tl == 0 {
                    0.0
                } else {
                    qp1 * (to_f(&gp).max(0.0) / to_f(&ll1)).sqrt()
                });
                if i == 0 {
                    lower.push(0.0);
                    continue;
                }
                let lsq = lsq_of(tl);
                let gl = params.big_g(&lsq, &qsq);
                let num = &(&lsq - &qsq)
                    * &(&(&(&p1 * &p1) * &gp) - &(&lsq * &gl));
                let den = &l * &(&(&l * &rat_int(2)) - &rat_int(1));
                let radicand = &num / &den;
                if radicand.is_negative() {
                    return Err(UnitarityError {
                        twice_l: tl,
                        radicand: to_f(&radicand),
                    });
                }
                lower.push(-to_f(&radicand).sqrt());
            }
        }
        UnirrepLabel::So31 { twice_l0, c } => {
            let csq = c.squared();
            let l0c = match c {
                SpectralParam::Real(cv) => (twice_l0 as f64 / 2.0) * cv,
                SpectralParam::Imaginary(_) => 0.0, // requires l0 = 0
            };
            fill_infinite_tower(
                &tower, params, twice_l0, csq, l0c, &mut diag, &mut lower,
            )?;
        }
        UnirrepLabel::E3 { twice_l0, eps } => {
            let l0eps = (twice_l0 as f64 / 2.0) * eps;
            fill_infinite_tower(
                &tower, params, twice_l0, eps * eps, l0eps, &mut diag, &mut lower,
            )?;
        }
    }
    Ok(ReducedElements { tower, diag, lower })
}

/// so(3,1) and e(3) share the same shape: diagonal `-l0 s/√(l(l+1))` and
/// lower `-√((l²-l0²)(s² - l² G(l², l0²))/(l(2l-1)))` with `s = c` or `ε`.
fn fill_infinite_tower(
    tower: &[u32],
    params: &DeformationParams,
    twice_l0: u32,
    s_squared: f64,
    l0s: f64,
    diag: &mut Vec<f64>,
    lower: &mut Vec<f64>,
) -> Result<(), UnitarityError> {
    let ysq = lsq_of(twice_l0);
    for (i, &tl) in tower.iter().enumerate() {
        let l = l_of(tl);
        let ll1 = &l * &(&l + &rat_int(1));
        diag.push(if tl == 0 { 0.0 } else { -l0s / to_f(&ll1).sqrt() });
        if i == 0 {
            lower.push(0.0);
            continue;
        }
        let lsq = lsq_of(tl);
        let gl = params.big_g(&lsq, &ysq);
        let num = to_f(&(&lsq - &ysq)) * (s_squared - to_f(&(&lsq * &gl)));
        let den = to_f(&(&l * &(&(&l * &rat_int(2)) - &rat_int(1))));
        lower.push(-checked_sqrt(num / den, tl)?);
    }
    Ok(())
}

/// Dense realization of the generators and both Casimir operators over a
/// tower of `|l,m⟩` states. Spherical components are indexed `m + 1`.
pub struct MatrixRealization {
    pub label: UnirrepLabel,
    pub params: DeformationParams,
    /// doubled `l` values, ascending
    pub tower: Vec<u32>,
    pub dim: usize,
    /// `L_{-1}, L_0, L_{+1}`
    pub lmat: [CMatrix; 3],
    /// `A_{-1}, A_0, A_{+1}`
    pub amat: [CMatrix; 3],
    /// deformed quadratic Casimir `h(L²) + A·A`
    pub c1d: CMatrix,
    /// `L·A`
    pub c2d: CMatrix,
}

fn scalar_product(u: &[CMatrix; 3], v: &[CMatrix; 3]) -> CMatrix {
    // U·V = Σ_m (-1)^m U_m V_{-m}
    let mut acc = &u[1] * &v[1];
    acc -= &u[2] * &v[0];
    acc -= &u[0] * &v[2];
    acc
}

/// Builds the matrices for a label; `cutoff` bounds the infinite towers.
pub fn realize(
    label: &UnirrepLabel,
    params: &DeformationParams,
    cutoff: u32,
) -> Result<MatrixRealization, UnitarityError> {
    let red = reduced_matrix_elements(label, params, cutoff)?;
    let tower = red.tower.clone();
    let mut offsets = Vec::with_capacity(tower.len());
    let mut dim = 0usize;
    for &tl in &tower {
        offsets.push(dim);
        dim += tl as usize + 1;
    }
    let state = |block: usize, tm: i32| -> usize {
        offsets[block] + ((tm + tower[block] as i32) / 2) as usize
    };

    let mut lmat = [
        CMatrix::zeros(dim, dim),
        CMatrix::zeros(dim, dim),
        CMatrix::zeros(dim, dim),
    ];
    for (b, &tl) in tower.iter().enumerate() {
        let l = tl as f64 / 2.0;
        let mut tm = -(tl as i32);
        while tm <= tl as i32 {
            let m = tm as f64 / 2.0;
            lmat[1][(state(b, tm), state(b, tm))] = Complex64::new(m, 0.0);
            if tm + 2 <= tl as i32 {
                let amp = -(((l - m) * (l + m + 1.0)) / 2.0).sqrt();
                lmat[2][(state(b, tm + 2), state(b, tm))] = Complex64::new(amp, 0.0);
            }
            if tm - 2 >= -(tl as i32) {
                let amp = (((l + m) * (l - m + 1.0)) / 2.0).sqrt();
                lmat[0][(state(b, tm - 2), state(b, tm))] = Complex64::new(amp, 0.0);
            }
            tm += 2;
        }
    }

    // A via the Wigner-Eckart factorization <l'm'|A_mu|lm> = <lm 1mu|l'm'> <l'||A||l>
    let one = AngMom::integer(1);
    let mut amat = [
        CMatrix::zeros(dim, dim),
        CMatrix::zeros(dim, dim),
        CMatrix::zeros(dim, dim),
    ];
    for (b, &tl) in tower.iter().enumerate() {
        let jl = AngMom::from_twice(tl);
        // (target block, reduced element)
        let mut targets: Vec<(usize, f64)> = vec![(b, red.diag[b])];
        if b > 0 {
            targets.push((b - 1, red.lower[b]));
        }
        if b + 1 < tower.len() {
            targets.push((b + 1, red.upper(b)));
        }
        for (bp, rme) in targets {
            if rme == 0.0 {
                continue;
            }
            let jlp = AngMom::from_twice(tower[bp]);
            for tmu in [-2i32, 0, 2] {
                let mut tm = -(tl as i32);
                while tm <= tl as i32 {
                    let tmp = tm + tmu;
                    if tmp.unsigned_abs() <= tower[bp] {
                        let cg = clebsch_gordan(jl, tm, one, tmu, jlp, tmp).to_f64();
                        if cg != 0.0 {
                            amat[(tmu / 2 + 1) as usize][(state(bp, tmp), state(b, tm))] =
                                Complex64::new(cg * rme, 0.0);
                        }
                    }
                    tm += 2;
                }
            }
        }
    }

    // Casimir matrices: C2d = L·A; C1d = h(L²) + A·A with h block-scalar
    let c2d = scalar_product(&lmat, &amat);
    let mut c1d = scalar_product(&amat, &amat);
    for (b, &tl) in tower.iter().enumerate() {
        let l = l_of(tl);
        let h = to_f(&params.h_at(&(&l * &(&l + &rat_int(1)))));
        for k in 0..=tl as usize {
            let i = offsets[b] + k;
            c1d[(i, i)] += Complex64::new(h, 0.0);
        }
    }

    Ok(MatrixRealization {
        label: *label,
        params: params.clone(),
        tower,
        dim,
        lmat,
        amat,
        c1d,
        c2d,
    })
}

/// Frobenius-norm residuals of the defining relations on a realization.
#[derive(Clone, Debug)]
pub struct ResidualReport {
    /// `[L,L]¹ + √2 L`
    pub ll: f64,
    /// `[L,A]¹ + √2 A`
    pub la: f64,
    /// `[A,A]¹ + √2 g(L²) L`
    pub aa: f64,
    /// `max_μ ‖[C1d, A_μ]‖`
    pub c1_comm: f64,
    /// `max_μ ‖[C2d, A_μ]‖`
    pub c2_comm: f64,
    /// `max_m ‖L_m† - (-1)^m L_{-m}‖` and the same for `A`
    pub herm_l: f64,
    pub herm_a: f64,
    /// largest off-scalar deviation of `C1d` and `C2d` across blocks
    pub casimir_scalar_dev: f64,
    /// residuals restricted to blocks `l ≤ lmax - 1` (truncated towers)
    pub interior_only: bool,
}

impl ResidualReport {
    pub fn max(&self) -> f64 {
        [
            self.ll,
            self.la,
            self.aa,
            self.c1_comm,
            self.c2_comm,
            self.herm_l,
            self.herm_a,
            self.casimir_scalar_dev,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn coupled_comm_1(u: &[CMatrix; 3], v: &[CMatrix; 3], tm_out: i32) -> CMatrix {
    let one = AngMom::integer(1);
    let dim = u[0].nrows();
    let mut acc = CMatrix::zeros(dim, dim);
    for tm1 in [-2i32, 0, 2] {
        let tm2 = tm_out - tm1;
        if tm2.unsigned_abs() > 2 {
            continue;
        }
        let cg = clebsch_gordan(one, tm1, one, tm2, one, tm_out).to_f64();
        if cg != 0.0 {
            let (a, b) = (&u[(tm1 / 2 + 1) as usize], &v[(tm2 / 2 + 1) as usize]);
            acc += (a * b - b * a).scale(cg);
        }
    }
    acc
}

/// Numeric verification of a realization against the defining relations
/// and the Casimir property. For truncated towers the residual matrices
/// are projected onto the interior blocks first.
pub fn verify_realization(m: &MatrixRealization) -> ResidualReport {
    let interior_only = m.label.is_truncated();
    let interior_dim = if interior_only && m.tower.len() > 1 {
        m.dim - (*m.tower.last().unwrap() as usize + 1)
    } else {
        m.dim
    };
    let norm = |x: &CMatrix| -> f64 {
        let mut acc = 0.0;
        for i in 0..interior_dim {
            for j in 0..interior_dim {
                acc += x[(i, j)].norm_sqr();
            }
        }
        acc.sqrt()
    };
    let sqrt2 = 2f64.sqrt();

    let mut ll = 0.0f64;
    let mut la = 0.0f64;
    let mut aa = 0.0f64;
    // g(L²) L as block-scalar multiples of the L components
    let g_of_block: Vec<f64> = m
        .tower
        .iter()
        .map(|&tl| {
            let l = l_of(tl);
            to_f(&m.params.g_at(&(&l * &(&l + &rat_int(1)))))
        })
        .collect();
    let mut gl = [
        m.lmat[0].clone(),
        m.lmat[1].clone(),
        m.lmat[2].clone(),
    ];
    {
        let mut offset = 0usize;
        for (b, &tl) in m.tower.iter().enumerate() {
            for comp in &mut gl {
                // L is block-diagonal, so scaling rows of a block suffices
                for i in offset..offset + tl as usize + 1 {
                    for j in 0..m.dim {
                        comp[(i, j)] *= Complex64::new(g_of_block[b], 0.0);
                    }
                }
            }
            offset += tl as usize + 1;
        }
    }
    for tm in [-2i32, 0, 2] {
        let idx = (tm / 2 + 1) as usize;
        ll = ll.max(norm(
            &(coupled_comm_1(&m.lmat, &m.lmat, tm) + m.lmat[idx].scale(sqrt2)),
        ));
        la = la.max(norm(
            &(coupled_comm_1(&m.lmat, &m.amat, tm) + m.amat[idx].scale(sqrt2)),
        ));
        aa = aa.max(norm(
            &(coupled_comm_1(&m.amat, &m.amat, tm) + gl[idx].scale(sqrt2)),
        ));
    }

    let mut c1_comm = 0.0f64;
    let mut c2_comm = 0.0f64;
    let mut herm_l = 0.0f64;
    let mut herm_a = 0.0f64;
    for tm in [-2i32, 0, 2] {
        let idx = (tm / 2 + 1) as usize;
        let oidx = (-tm / 2 + 1) as usize;
        c1_comm = c1_comm.max(norm(&(&m.c1d * &m.amat[idx] - &m.amat[idx] * &m.c1d)));
        c2_comm = c2_comm.max(norm(&(&m.c2d * &m.amat[idx] - &m.amat[idx] * &m.c2d)));
        // X_m† = (-1)^m X_{-m}
        let sign = if tm == 0 { 1.0 } else { -1.0 };
        herm_l = herm_l.max(norm(&(m.lmat[idx].adjoint() - m.lmat[oidx].scale(sign))));
        herm_a = herm_a.max(norm(&(m.amat[idx].adjoint() - m.amat[oidx].scale(sign))));
    }

    // off-scalar deviation of the Casimir matrices per block
    let mut casimir_scalar_dev = 0.0f64;
    let mut offset = 0usize;
    for &tl in &m.tower {
        let n = tl as usize + 1;
        if offset + n > interior_dim {
            break;
        }
        for mat in [&m.c1d, &m.c2d] {
            let first = mat[(offset, offset)];
            for i in 0..n {
                for j in 0..n {
                    let expect = if i == j { first } else { Complex64::new(0.0, 0.0) };
                    casimir_scalar_dev =
                        casimir_scalar_dev.max((mat[(offset + i, offset + j)] - expect).norm());
                }
            }
        }
        offset += n;
    }

    ResidualReport {
        ll,
        la,
        aa,
        c1_comm,
        c2_comm,
        herm_l,
        herm_a,
        casimir_scalar_dev,
        interior_only,
    }
}

/// Closed-form eigenvalues of the deformed Casimir operators:
///
/// * so(4): `⟨C1d⟩ = h(|q|(|q|+1)) - (|q|+1) G((|q|+1)², q²)
///   + (p+1)² G((p+1)², q²)`, `⟨C2d⟩ = q(p+1) √G((p+1)², q²)`;
/// * so(3,1): `⟨C1d⟩ = h(l0(l0+1)) - (l0+1) G((l0+1)², l0²) + c²`,
///   `⟨C2d⟩ = -l0 c`;
/// * e(3): the so(3,1) forms with `ε` in place of `c`.
pub fn casimir_eigenvalues(
    label: &UnirrepLabel,
    params: &DeformationParams,
) -> Result<(f64, f64), UnitarityError> {
    match *label {
        UnirrepLabel::So4 { twice_p, twice_q } => {
            let q = rat(twice_q as i64, 2);
            let aq = rat(twice_q.unsigned_abs() as i64, 2);
            let p1 = &rat(twice_p as i64, 2) + &rat_int(1);
            let qsq = &q * &q;
            let aq1 = &aq + &rat_int(1);
            let gp = params.big_g(&(&p1 * &p1), &qsq);
            let c1 = &(&params.h_at(&(&aq * &aq1)) - &(&aq1 * &params.big_g(&(&aq1 * &aq1), &qsq)))
                + &(&(&p1 * &p1) * &gp);
            if twice_q != 0 && gp.is_negative() {
                return Err(UnitarityError {
                    twice_l: twice_p + 2,
                    radicand: to_f(&gp),
                });
            }
            let c2 = to_f(&(&q * &p1)) * to_f(&gp).max(0.0).sqrt();
            Ok((to_f(&c1), c2))
        }
        UnirrepLabel::So31 { twice_l0, c } => {
            let c2 = match c {
                SpectralParam::Real(cv) => -(twice_l0 as f64 / 2.0) * cv,
                SpectralParam::Imaginary(_) => 0.0,
            };
            Ok((infinite_c1(params, twice_l0, c.squared()), c2))
        }
        UnirrepLabel::E3 { twice_l0, eps } => Ok((
            infinite_c1(params, twice_l0, eps * eps),
            -(twice_l0 as f64 / 2.0) * eps,
        )),
    }
}

fn infinite_c1(params: &DeformationParams, twice_l0: u32, s_squared: f64) -> f64 {
    let l0 = rat(twice_l0 as i64, 2);
    let l01 = &l0 + &rat_int(1);
    let exact = &params.h_at(&(&l0 * &l01))
        - &(&l01 * &params.big_g(&(&l01 * &l01), &(&l0 * &l0)));
    to_f(&exact) + s_squared
}
