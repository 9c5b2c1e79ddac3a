//! Canonical-form calculus of so(3) irreducible tensor operators built
//! from the angular momentum `L` and a single irreducible tensor `T` of
//! integer rank λ (the vector `A` for λ = 1, the quadrupole `Q` for λ = 2).
//!
//! Expressions are kept in a normal form `Σ c · L²ᵏ · core` over a fixed
//! finite catalog of core tensors ([`CoreTensor`]). Coupled products and
//! coupled commutators are evaluated by expanding everything into
//! normal-ordered words in the spherical components `L_m`, `T_μ` and then
//! solving exactly for the canonical coefficients; a result that cannot be
//! expressed in the catalog raises [`TensorError::OutsideCatalog`] rather
//! than returning anything silently wrong.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::angmom::{clebsch_gordan, racah_unitary, triangle_ok, AngMom};
use crate::exactnum::{rat_int, RadicalNumber, Rational};
use crate::linalg::{rref, ExactSystem};

/// Canonical core tensors: every expression handled by the calculus is a
/// polynomial in `L²` times one of these, with T-degree at most one.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum CoreTensor {
    /// the scalar 1
    Unit,
    /// `[L×T]⁰` (proportional to `L·T`), λ = 1 only
    ScalarLT,
    /// `L`
    L,
    /// `T` itself (rank λ)
    T,
    /// `[L×T]¹`
    LxT1,
    /// `[[L×L]²×T]¹`
    LLxT1,
    /// `[L×L]²`
    LL2,
    /// `[L×T]²`
    LxT2,
    /// `[[L×L]²×T]²`
    LLxT2,
    /// `[[L×L]²×L]³`
    LLL3,
    /// `[L×T]³` (λ = 2 only)
    LxT3,
    /// `[[L×L]²×T]³` (λ = 2 only)
    LLxT3,
}

impl CoreTensor {
    const ALL: [CoreTensor; 12] = [
        CoreTensor::Unit,
        CoreTensor::ScalarLT,
        CoreTensor::L,
        CoreTensor::T,
        CoreTensor::LxT1,
        CoreTensor::LLxT1,
        CoreTensor::LL2,
        CoreTensor::LxT2,
        CoreTensor::LLxT2,
        CoreTensor::LLL3,
        CoreTensor::LxT3,
        CoreTensor::LLxT3,
    ];

    pub fn rank(self, lambda: u32) -> u32 {
        match self {
            CoreTensor::Unit | CoreTensor::ScalarLT => 0,
            CoreTensor::L | CoreTensor::LxT1 | CoreTensor::LLxT1 => 1,
            CoreTensor::T => lambda,
            CoreTensor::LL2 | CoreTensor::LxT2 | CoreTensor::LLxT2 => 2,
            CoreTensor::LLL3 | CoreTensor::LxT3 | CoreTensor::LLxT3 => 3,
        }
    }

    pub fn t_degree(self) -> u32 {
        match self {
            CoreTensor::Unit | CoreTensor::L | CoreTensor::LL2 | CoreTensor::LLL3 => 0,
            _ => 1,
        }
    }

    pub fn valid_for(self, lambda: u32) -> bool {
        let t = 2 * lambda;
        match self {
            CoreTensor::Unit | CoreTensor::L | CoreTensor::LL2 | CoreTensor::LLL3 => true,
            CoreTensor::T => true,
            CoreTensor::ScalarLT => triangle_ok(2, t, 0),
            CoreTensor::LxT1 => triangle_ok(2, t, 2),
            CoreTensor::LxT2 => triangle_ok(2, t, 4),
            CoreTensor::LxT3 => triangle_ok(2, t, 6),
            CoreTensor::LLxT1 => triangle_ok(4, t, 2),
            CoreTensor::LLxT2 => triangle_ok(4, t, 4),
            CoreTensor::LLxT3 => triangle_ok(4, t, 6),
        }
    }

    /// All catalog members available for tensor rank λ.
    pub fn catalog(lambda: u32) -> Vec<CoreTensor> {
        Self::ALL
            .iter()
            .copied()
            .filter(|c| c.valid_for(lambda))
            .collect()
    }

    pub fn name(self, t_symbol: &str) -> String {
        use alloc::format;
        match self {
            CoreTensor::Unit => String::from("1"),
            CoreTensor::ScalarLT => format!("[Lx{}]^0", t_symbol),
            CoreTensor::L => String::from("L"),
            CoreTensor::T => String::from(t_symbol),
            CoreTensor::LxT1 => format!("[Lx{}]^1", t_symbol),
            CoreTensor::LLxT1 => format!("[[LxL]^2x{}]^1", t_symbol),
            CoreTensor::LL2 => String::from("[LxL]^2"),
            CoreTensor::LxT2 => format!("[Lx{}]^2", t_symbol),
            CoreTensor::LLxT2 => format!("[[LxL]^2x{}]^2", t_symbol),
            CoreTensor::LLL3 => String::from("[[LxL]^2xL]^3"),
            CoreTensor::LxT3 => format!("[Lx{}]^3", t_symbol),
            CoreTensor::LLxT3 => format!("[[LxL]^2x{}]^3", t_symbol),
        }
    }
}

/// Errors of the tensor calculus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TensorError {
    /// the normal form does not lie in the core catalog
    OutsideCatalog { rank: u32 },
    /// a `[T,T]` bracket was needed but no defining relation was supplied
    MissingBracket,
    /// the requested coupling violates the triangle condition
    InvalidCoupling { r1: u32, r2: u32, target: u32 },
    /// the core tensor does not exist for this tensor rank
    InvalidCore { core: CoreTensor, lambda: u32 },
}

impl fmt::Display for TensorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TensorError::OutsideCatalog { rank } => {
                write!(f, "normal form of rank-{rank} result lies outside the core catalog")
            }
            TensorError::MissingBracket => {
                write!(f, "[T,T] bracket required but no defining relation was supplied")
            }
            TensorError::InvalidCoupling { r1, r2, target } => {
                write!(f, "invalid coupling ({r1} x {r2}) -> {target}")
            }
            TensorError::InvalidCore { core, lambda } => {
                write!(f, "core {:?} is not defined for tensor rank {lambda}", core)
            }
        }
    }
}

/// A finite linear combination `Σ c_{k,core} · L²ᵏ · core` of fixed rank.
/// `L²` powers always stand to the left of the core.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TensorExpr {
    rank: u32,
    terms: BTreeMap<(u32, CoreTensor), RadicalNumber>,
}

impl TensorExpr {
    pub fn zero(rank: u32) -> Self {
        TensorExpr {
            rank,
            terms: BTreeMap::new(),
        }
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, l2_power: u32, core: CoreTensor, coeff: RadicalNumber) {
        if coeff.is_zero() {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.terms.entry((l2_power, core)) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += &coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn term(rank: u32, l2_power: u32, core: CoreTensor, coeff: RadicalNumber) -> Self {
        let mut e = Self::zero(rank);
        e.add_term(l2_power, core, coeff);
        e
    }

    pub fn coeff(&self, l2_power: u32, core: CoreTensor) -> RadicalNumber {
        self.terms
            .get(&(l2_power, core))
            .cloned()
            .unwrap_or_else(RadicalNumber::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, CoreTensor, &RadicalNumber)> {
        self.terms.iter().map(|((k, c), v)| (*k, *c, v))
    }

    pub fn scale(&self, c: &RadicalNumber) -> Self {
        if c.is_zero() {
            return Self::zero(self.rank);
        }
        TensorExpr {
            rank: self.rank,
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.rank, other.rank, "rank mismatch in tensor sum");
        let mut out = self.clone();
        for ((k, c), v) in &other.terms {
            out.add_term(*k, *c, v.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&RadicalNumber::from_integer(-1)))
    }

    pub fn max_l2_power(&self) -> u32 {
        self.terms.keys().map(|(k, _)| *k).max().unwrap_or(0)
    }

    /// Pretty form close to the paper's notation, e.g.
    /// `4*A + 20/3*L^2*A + 6*sqrt(2)*[LxA]^1`.
    pub fn pretty(&self, t_symbol: &str) -> String {
        use alloc::format;
        use alloc::string::ToString;
        if self.is_zero() {
            return String::from("0");
        }
        let mut pieces = Vec::new();
        for ((k, core), coeff) in &self.terms {
            let coeff_str = if coeff.num_terms() > 1 {
                format!("({})", coeff)
            } else {
                coeff.to_string()
            };
            let mut factors = alloc::vec![coeff_str];
            if *k > 0 {
                factors.push(format!("L^{}", 2 * k));
            }
            if *core != CoreTensor::Unit {
                factors.push(core.name(t_symbol));
            }
            pieces.push(factors.join("*"));
        }
        pieces.join(" + ")
    }
}

impl fmt::Display for TensorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pretty("T"))
    }
}

// ---------------------------------------------------------------------------
// component-level engine: normal-ordered words in the generators L_m, T_mu
// ---------------------------------------------------------------------------

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
enum Gen {
    L(i8),
    T(i8),
}

/// A normal-ordered word: `L` components in descending order, then the
/// `T` components in their original order (they are never reordered).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Default)]
struct Word {
    ls: Vec<i8>,
    ts: Vec<i8>,
}

impl Word {
    fn len(&self) -> usize {
        self.ls.len() + self.ts.len()
    }

    fn gens(&self) -> impl Iterator<Item = Gen> + '_ {
        self.ls
            .iter()
            .map(|&m| Gen::L(m))
            .chain(self.ts.iter().map(|&mu| Gen::T(mu)))
    }

    fn appended(&self, g: Gen) -> Word {
        let mut w = self.clone();
        match g {
            Gen::L(m) => w.ls.push(m),
            Gen::T(mu) => w.ts.push(mu),
        }
        w
    }

    fn split_last(&self) -> Option<(Word, Gen)> {
        let mut w = self.clone();
        if let Some(mu) = w.ts.pop() {
            return Some((w, Gen::T(mu)));
        }
        w.ls.pop().map(|m| (w, Gen::L(m)))
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
struct Poly {
    terms: BTreeMap<Word, RadicalNumber>,
}

impl Poly {
    fn zero() -> Self {
        Poly::default()
    }

    fn unit() -> Self {
        let mut p = Poly::zero();
        p.add_term(Word::default(), RadicalNumber::one());
        p
    }

    fn from_gen(g: Gen) -> Self {
        let mut p = Poly::zero();
        p.add_term(Word::default().appended(g), RadicalNumber::one());
        p
    }

    fn from_scaled_gen(o: Option<(Gen, RadicalNumber)>) -> Self {
        let mut p = Poly::zero();
        if let Some((g, c)) = o {
            p.add_term(Word::default().appended(g), c);
        }
        p
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, w: Word, c: RadicalNumber) {
        if c.is_zero() {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.terms.entry(w) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn add_scaled(&mut self, p: &Poly, c: &RadicalNumber) {
        if c.is_zero() {
            return;
        }
        for (w, v) in &p.terms {
            self.add_term(w.clone(), v * c);
        }
    }

    fn max_len(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }
}

/// Component table of the defining `[T_μ, T_ν]` relations, already in
/// normal-ordered form; index `(μ+λ)·(2λ+1) + (ν+λ)`.
struct TtTable {
    entries: Vec<Poly>,
}

/// Cached component commutators: `[L_m, L_n]`, `[L_m, T_μ]` and, once the
/// defining relations are installed, `[T_μ, T_ν]`. With the `tt` table
/// present the normal order also sorts `T` components descending, using
/// the defining relations to swap them; without it the `T` order is kept
/// as written.
struct EngineCtx {
    lambda: u32,
    ll: [[Option<(i8, RadicalNumber)>; 3]; 3],
    lt: Vec<Option<(i8, RadicalNumber)>>,
    tt: Option<TtTable>,
}

impl EngineCtx {
    fn new(lambda: u32) -> Self {
        let one = AngMom::integer(1);
        let lam = AngMom::integer(lambda);
        let sqrt2 = RadicalNumber::from_sqrt(Rational::from_integer(1.into()), 2);
        let mut ll: [[Option<(i8, RadicalNumber)>; 3]; 3] = Default::default();
        for m in -1i8..=1 {
            for n in -1i8..=1 {
                let s = m + n;
                if s.unsigned_abs() > 1 {
                    continue;
                }
                let cg = clebsch_gordan(one, 2 * m as i32, one, 2 * n as i32, one, 2 * s as i32);
                let coeff = -&(&sqrt2 * &cg);
                if !coeff.is_zero() {
                    ll[(m + 1) as usize][(n + 1) as usize] = Some((s, coeff));
                }
            }
        }
        let span = (2 * lambda + 1) as usize;
        let norm = RadicalNumber::sqrt_of_rational(&rat_int((lambda * (lambda + 1)) as i64))
            .expect("nonnegative");
        let mut lt = alloc::vec![None; 3 * span];
        for m in -1i8..=1 {
            for mu in -(lambda as i8)..=(lambda as i8) {
                let s = m + mu;
                if s.unsigned_abs() > lambda as u8 {
                    continue;
                }
                let cg = clebsch_gordan(one, 2 * m as i32, lam, 2 * mu as i32, lam, 2 * s as i32);
                let coeff = -&(&norm * &cg);
                if !coeff.is_zero() {
                    lt[(m + 1) as usize * span + (mu + lambda as i8) as usize] = Some((s, coeff));
                }
            }
        }
        EngineCtx {
            lambda,
            ll,
            lt,
            tt: None,
        }
    }

    fn comm_ll(&self, m: i8, n: i8) -> Option<&(i8, RadicalNumber)> {
        self.ll[(m + 1) as usize][(n + 1) as usize].as_ref()
    }

    fn comm_lt(&self, m: i8, mu: i8) -> Option<&(i8, RadicalNumber)> {
        let span = (2 * self.lambda + 1) as usize;
        self.lt[(m + 1) as usize * span + (mu + self.lambda as i8) as usize].as_ref()
    }

    fn comm_tt(&self, mu: i8, nu: i8) -> Result<&Poly, TensorError> {
        let table = self.tt.as_ref().ok_or(TensorError::MissingBracket)?;
        let span = (2 * self.lambda + 1) as usize;
        Ok(&table.entries
            [(mu + self.lambda as i8) as usize * span + (nu + self.lambda as i8) as usize])
    }

    fn can_append(&self, w: &Word, g: Gen) -> bool {
        match g {
            Gen::L(m) => w.ts.is_empty() && w.ls.last().map_or(true, |&x| x >= m),
            Gen::T(mu) => self.tt.is_none() || w.ts.last().map_or(true, |&x| x >= mu),
        }
    }

    /// right-multiply a normal word by one generator
    fn word_mul_gen(&self, w: &Word, g: Gen) -> Poly {
        if self.can_append(w, g) {
            let mut p = Poly::zero();
            p.add_term(w.appended(g), RadicalNumber::one());
            return p;
        }
        let (w2, x) = w.split_last().expect("nonempty word with violation");
        // w·g = (w″·g)·x + w″·[x,g]
        let p1 = self.word_mul_gen(&w2, g);
        let mut out = self.poly_mul_gen(&p1, x);
        let comm = match (x, g) {
            (Gen::L(m), Gen::L(n)) => {
                Poly::from_scaled_gen(self.comm_ll(m, n).map(|(s, c)| (Gen::L(*s), c.clone())))
            }
            (Gen::T(mu), Gen::L(m)) => {
                Poly::from_scaled_gen(self.comm_lt(m, mu).map(|(s, c)| (Gen::T(*s), -c)))
            }
            (Gen::T(mu), Gen::T(nu)) => self
                .comm_tt(mu, nu)
                .expect("T reordering only happens with the tt table installed")
                .clone(),
            (Gen::L(_), Gen::T(_)) => unreachable!("an L never violates order against a T"),
        };
        if !comm.is_zero() {
            let mut w2p = Poly::zero();
            w2p.add_term(w2, RadicalNumber::one());
            let piece = self.poly_mul(&w2p, &comm);
            out.add_scaled(&piece, &RadicalNumber::one());
        }
        out
    }

    fn poly_mul_gen(&self, p: &Poly, g: Gen) -> Poly {
        let mut out = Poly::zero();
        for (w, c) in &p.terms {
            let piece = self.word_mul_gen(w, g);
            out.add_scaled(&piece, c);
        }
        out
    }

    fn poly_mul(&self, a: &Poly, b: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (wb, cb) in &b.terms {
            let mut p = a.clone();
            for g in wb.gens() {
                p = self.poly_mul_gen(&p, g);
            }
            out.add_scaled(&p, cb);
        }
        out
    }

    /// `L² = Σ_m (−1)^m L_m L_{−m}` as a normal-ordered polynomial
    fn l2_poly(&self) -> Poly {
        let mut out = Poly::zero();
        for m in -1i8..=1 {
            let seq = [Gen::L(m), Gen::L(-m)];
            let mut p = Poly::unit();
            for g in seq {
                p = self.poly_mul_gen(&p, g);
            }
            let sign = if m == 0 {
                RadicalNumber::one()
            } else {
                RadicalNumber::from_integer(-1)
            };
            out.add_scaled(&p, &sign);
        }
        out
    }

    fn gen_commutator(&self, a: Gen, b: Gen) -> Result<Poly, TensorError> {
        match (a, b) {
            (Gen::L(m), Gen::L(n)) => Ok(Poly::from_scaled_gen(
                self.comm_ll(m, n).map(|(s, c)| (Gen::L(*s), c.clone())),
            )),
            (Gen::L(m), Gen::T(mu)) => Ok(Poly::from_scaled_gen(
                self.comm_lt(m, mu).map(|(s, c)| (Gen::T(*s), c.clone())),
            )),
            (Gen::T(mu), Gen::L(m)) => Ok(Poly::from_scaled_gen(
                self.comm_lt(m, mu).map(|(s, c)| (Gen::T(*s), -c)),
            )),
            (Gen::T(mu), Gen::T(nu)) => self.comm_tt(mu, nu).cloned(),
        }
    }

    fn word_commutator(&self, w1: &Word, w2: &Word) -> Result<Poly, TensorError> {
        let g1: Vec<Gen> = w1.gens().collect();
        let g2: Vec<Gen> = w2.gens().collect();
        let mut out = Poly::zero();
        for i in 0..g1.len() {
            for j in 0..g2.len() {
                let middle = self.gen_commutator(g1[i], g2[j])?;
                if middle.is_zero() {
                    continue;
                }
                // x-prefix · y-prefix · [x_i, y_j] · y-suffix · x-suffix
                let mut p = Poly::unit();
                for g in g1[..i].iter().chain(g2[..j].iter()) {
                    p = self.poly_mul_gen(&p, *g);
                }
                p = self.poly_mul(&p, &middle);
                for g in g2[j + 1..].iter().chain(g1[i + 1..].iter()) {
                    p = self.poly_mul_gen(&p, *g);
                }
                out.add_scaled(&p, &RadicalNumber::one());
            }
        }
        Ok(out)
    }

    fn poly_commutator(&self, p: &Poly, q: &Poly) -> Result<Poly, TensorError> {
        let mut out = Poly::zero();
        for (w1, c1) in &p.terms {
            for (w2, c2) in &q.terms {
                let piece = self.word_commutator(w1, w2)?;
                out.add_scaled(&piece, &(c1 * c2));
            }
        }
        Ok(out)
    }
}

/// An irreducible tensor operator of integer rank, stored componentwise
/// as normal-ordered polynomials; index `M + rank`.
#[derive(Clone, PartialEq, Eq, Debug)]
struct TensorOp {
    rank: u32,
    comps: Vec<Poly>,
}

impl TensorOp {
    fn zero(rank: u32) -> Self {
        TensorOp {
            rank,
            comps: alloc::vec![Poly::zero(); (2 * rank + 1) as usize],
        }
    }

    fn comp(&self, m: i32) -> &Poly {
        &self.comps[(m + self.rank as i32) as usize]
    }

    fn comp_mut(&mut self, m: i32) -> &mut Poly {
        &mut self.comps[(m + self.rank as i32) as usize]
    }

    fn is_zero(&self) -> bool {
        self.comps.iter().all(Poly::is_zero)
    }

    fn max_len(&self) -> usize {
        self.comps.iter().map(Poly::max_len).max().unwrap_or(0)
    }

    fn couple(ctx: &EngineCtx, x: &TensorOp, y: &TensorOp, target: u32) -> TensorOp {
        let (jx, jy, jt) = (
            AngMom::integer(x.rank),
            AngMom::integer(y.rank),
            AngMom::integer(target),
        );
        let mut out = TensorOp::zero(target);
        for m in -(target as i32)..=(target as i32) {
            for m1 in -(x.rank as i32)..=(x.rank as i32) {
                let m2 = m - m1;
                if m2.unsigned_abs() > y.rank {
                    continue;
                }
                let cg = clebsch_gordan(jx, 2 * m1, jy, 2 * m2, jt, 2 * m);
                if cg.is_zero() {
                    continue;
                }
                let prod = ctx.poly_mul(x.comp(m1), y.comp(m2));
                out.comp_mut(m).add_scaled(&prod, &cg);
            }
        }
        out
    }

    fn commutator(
        ctx: &EngineCtx,
        x: &TensorOp,
        y: &TensorOp,
        target: u32,
    ) -> Result<TensorOp, TensorError> {
        let (jx, jy, jt) = (
            AngMom::integer(x.rank),
            AngMom::integer(y.rank),
            AngMom::integer(target),
        );
        let mut out = TensorOp::zero(target);
        for m in -(target as i32)..=(target as i32) {
            for m1 in -(x.rank as i32)..=(x.rank as i32) {
                let m2 = m - m1;
                if m2.unsigned_abs() > y.rank {
                    continue;
                }
                let cg = clebsch_gordan(jx, 2 * m1, jy, 2 * m2, jt, 2 * m);
                if cg.is_zero() {
                    continue;
                }
                let comm = ctx.poly_commutator(x.comp(m1), y.comp(m2))?;
                out.comp_mut(m).add_scaled(&comm, &cg);
            }
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// the public algebra context
// ---------------------------------------------------------------------------

/// Calculus context for a fixed tensor rank λ and (optionally) defining
/// `[T,T]^Λ` relations. Immutable after construction and safe to share.
pub struct Algebra {
    lambda: u32,
    ctx: EngineCtx,
    core_ops: BTreeMap<CoreTensor, TensorOp>,
}

impl Algebra {
    /// Context with only the so(3)-module relations (2.1a,b); any use of a
    /// `[T,T]` bracket fails with [`TensorError::MissingBracket`].
    pub fn so3_only(lambda: u32) -> Self {
        Self::build(lambda, None).expect("so(3)-only context is always valid")
    }

    /// Context with defining relations `[T,T]^Λ = f^Λ(L)`; brackets absent
    /// from the list are taken to vanish.
    pub fn with_brackets(
        lambda: u32,
        brackets: Vec<(u32, TensorExpr)>,
    ) -> Result<Self, TensorError> {
        Self::build(lambda, Some(brackets))
    }

    fn build(
        lambda: u32,
        brackets: Option<Vec<(u32, TensorExpr)>>,
    ) -> Result<Self, TensorError> {
        assert!(lambda >= 1, "tensor rank must be at least 1");
        let ctx = EngineCtx::new(lambda);
        let mut core_ops = BTreeMap::new();
        let l = TensorOp {
            rank: 1,
            comps: alloc::vec![
                Poly::from_gen(Gen::L(-1)),
                Poly::from_gen(Gen::L(0)),
                Poly::from_gen(Gen::L(1)),
            ],
        };
        let t = TensorOp {
            rank: lambda,
            comps: (-(lambda as i8)..=(lambda as i8))
                .map(|mu| Poly::from_gen(Gen::T(mu)))
                .collect(),
        };
        let ll2 = TensorOp::couple(&ctx, &l, &l, 2);
        for core in CoreTensor::catalog(lambda) {
            let op = match core {
                CoreTensor::Unit => {
                    let mut u = TensorOp::zero(0);
                    *u.comp_mut(0) = Poly::unit();
                    u
                }
                CoreTensor::L => l.clone(),
                CoreTensor::T => t.clone(),
                CoreTensor::LL2 => ll2.clone(),
                CoreTensor::LLL3 => TensorOp::couple(&ctx, &ll2, &l, 3),
                CoreTensor::ScalarLT => TensorOp::couple(&ctx, &l, &t, 0),
                CoreTensor::LxT1 => TensorOp::couple(&ctx, &l, &t, 1),
                CoreTensor::LxT2 => TensorOp::couple(&ctx, &l, &t, 2),
                CoreTensor::LxT3 => TensorOp::couple(&ctx, &l, &t, 3),
                CoreTensor::LLxT1 => TensorOp::couple(&ctx, &ll2, &t, 1),
                CoreTensor::LLxT2 => TensorOp::couple(&ctx, &ll2, &t, 2),
                CoreTensor::LLxT3 => TensorOp::couple(&ctx, &ll2, &t, 3),
            };
            core_ops.insert(core, op);
        }
        let mut alg = Algebra {
            lambda,
            ctx,
            core_ops,
        };
        if let Some(brackets) = brackets {
            let lam = AngMom::integer(lambda);
            let span = (2 * lambda + 1) as usize;
            let mut bracket_ops: BTreeMap<u32, TensorOp> = BTreeMap::new();
            for (big_lambda, expr) in brackets {
                if expr.rank() != big_lambda
                    || big_lambda % 2 == 0
                    || big_lambda > 2 * lambda - 1
                    || expr.iter().any(|(_, c, _)| c.t_degree() != 0)
                {
                    return Err(TensorError::InvalidCoupling {
                        r1: lambda,
                        r2: lambda,
                        target: big_lambda,
                    });
                }
                bracket_ops.insert(big_lambda, alg.expr_to_op(&expr));
            }
            let mut entries = alloc::vec![Poly::zero(); span * span];
            for mu in -(lambda as i8)..=(lambda as i8) {
                for nu in -(lambda as i8)..=(lambda as i8) {
                    let m = (mu + nu) as i32;
                    let mut p = Poly::zero();
                    for (big_lambda, op) in &bracket_ops {
                        if m.unsigned_abs() > *big_lambda {
                            continue;
                        }
                        let cg = clebsch_gordan(
                            lam,
                            2 * mu as i32,
                            lam,
                            2 * nu as i32,
                            AngMom::integer(*big_lambda),
                            2 * m,
                        );
                        p.add_scaled(op.comp(m), &cg);
                    }
                    entries[(mu + lambda as i8) as usize * span + (nu + lambda as i8) as usize] = p;
                }
            }
            alg.ctx.tt = Some(TtTable { entries });
        }
        Ok(alg)
    }

    pub fn lambda(&self) -> u32 {
        self.lambda
    }

    /// `L` as an expression.
    pub fn expr_l(&self) -> TensorExpr {
        TensorExpr::term(1, 0, CoreTensor::L, RadicalNumber::one())
    }

    /// `T` as an expression.
    pub fn expr_t(&self) -> TensorExpr {
        TensorExpr::term(self.lambda, 0, CoreTensor::T, RadicalNumber::one())
    }

    /// `L²ᵏ` as a rank-0 expression.
    pub fn expr_l2_power(&self, k: u32) -> TensorExpr {
        TensorExpr::term(0, k, CoreTensor::Unit, RadicalNumber::one())
    }

    /// A single catalog core as an expression.
    pub fn expr_core(&self, core: CoreTensor) -> Result<TensorExpr, TensorError> {
        if !core.valid_for(self.lambda) {
            return Err(TensorError::InvalidCore {
                core,
                lambda: self.lambda,
            });
        }
        Ok(TensorExpr::term(
            core.rank(self.lambda),
            0,
            core,
            RadicalNumber::one(),
        ))
    }

    fn l2_powers(&self, up_to: u32) -> Vec<Poly> {
        let mut powers = Vec::with_capacity(up_to as usize + 1);
        powers.push(Poly::unit());
        if up_to >= 1 {
            let l2 = self.ctx.l2_poly();
            for k in 1..=up_to {
                let next = self.ctx.poly_mul(&powers[(k - 1) as usize], &l2);
                powers.push(next);
            }
        }
        powers
    }

    fn expr_to_op(&self, e: &TensorExpr) -> TensorOp {
        let powers = self.l2_powers(e.max_l2_power());
        let mut out = TensorOp::zero(e.rank());
        for (k, core, coeff) in e.iter() {
            let base = &self.core_ops[&core];
            debug_assert_eq!(base.rank, e.rank(), "core rank mismatch in expression");
            for m in -(e.rank() as i32)..=(e.rank() as i32) {
                let piece = self.ctx.poly_mul(&powers[k as usize], base.comp(m));
                out.comp_mut(m).add_scaled(&piece, coeff);
            }
        }
        out
    }

    /// Solve exactly for the canonical form of a computed tensor operator.
    /// The solve runs on the highest component; the result is then
    /// re-expanded and compared on every component.
    fn op_to_expr(&self, op: &TensorOp) -> Result<TensorExpr, TensorError> {
        let rank = op.rank;
        if op.is_zero() {
            return Ok(TensorExpr::zero(rank));
        }
        let cores: Vec<CoreTensor> = CoreTensor::catalog(self.lambda)
            .into_iter()
            .filter(|c| c.rank(self.lambda) == rank)
            .collect();
        if cores.is_empty() {
            return Err(TensorError::OutsideCatalog { rank });
        }
        let kmax = (op.max_len() / 2) as u32;
        let powers = self.l2_powers(kmax);
        let mut basis: Vec<(u32, CoreTensor, Poly)> = Vec::new();
        let top = rank as i32;
        for k in 0..=kmax {
            for &core in &cores {
                let poly = self
                    .ctx
                    .poly_mul(&powers[k as usize], self.core_ops[&core].comp(top));
                basis.push((k, core, poly));
            }
        }
        let mut words: alloc::collections::BTreeSet<Word> =
            op.comp(top).terms.keys().cloned().collect();
        for (_, _, p) in &basis {
            words.extend(p.terms.keys().cloned());
        }
        let mut sys = ExactSystem::new(basis.len());
        for w in &words {
            let mut row: Vec<RadicalNumber> = basis
                .iter()
                .map(|(_, _, p)| p.terms.get(w).cloned().unwrap_or_else(RadicalNumber::zero))
                .collect();
            row.push(
                op.comp(top)
                    .terms
                    .get(w)
                    .cloned()
                    .unwrap_or_else(RadicalNumber::zero),
            );
            sys.add_row(row)
                .map_err(|_| TensorError::OutsideCatalog { rank })?;
        }
        let solution = sys.solve();
        let mut expr = TensorExpr::zero(rank);
        for ((k, core, _), coeff) in basis.iter().zip(solution) {
            expr.add_term(*k, *core, coeff);
        }
        // faithfulness check on all components
        if self.expr_to_op(&expr) != *op {
            return Err(TensorError::OutsideCatalog { rank });
        }
        Ok(expr)
    }

    fn check_triangle(&self, x: &TensorExpr, y: &TensorExpr, target: u32) -> Result<(), TensorError> {
        if triangle_ok(2 * x.rank(), 2 * y.rank(), 2 * target) {
            Ok(())
        } else {
            Err(TensorError::InvalidCoupling {
                r1: x.rank(),
                r2: y.rank(),
                target,
            })
        }
    }

    /// Coupled product `[x × y]^Λ` reduced to canonical form.
    pub fn coupled_product(
        &self,
        x: &TensorExpr,
        y: &TensorExpr,
        target: u32,
    ) -> Result<TensorExpr, TensorError> {
        self.check_triangle(x, y, target)?;
        let op = TensorOp::couple(&self.ctx, &self.expr_to_op(x), &self.expr_to_op(y), target);
        self.op_to_expr(&op)
    }

    /// Coupled commutator `[x, y]^Λ` reduced to canonical form; `[T,T]`
    /// pairs are resolved through the defining relations.
    pub fn coupled_commutator(
        &self,
        x: &TensorExpr,
        y: &TensorExpr,
        target: u32,
    ) -> Result<TensorExpr, TensorError> {
        self.check_triangle(x, y, target)?;
        let op = TensorOp::commutator(
            &self.ctx,
            &self.expr_to_op(x),
            &self.expr_to_op(y),
            target,
        )?;
        self.op_to_expr(&op)
    }

    /// Coupled Leibniz rule: expands `[t, [u × v]^Λ23]^Λ` through the double
    /// unitary-Racah sum instead of multiplying out the inner product.
    pub fn leibniz_expand(
        &self,
        t: &TensorExpr,
        u: &TensorExpr,
        v: &TensorExpr,
        lambda23: u32,
        target: u32,
    ) -> Result<TensorExpr, TensorError> {
        self.check_triangle(u, v, lambda23)?;
        if !triangle_ok(2 * t.rank(), 2 * lambda23, 2 * target) {
            return Err(TensorError::InvalidCoupling {
                r1: t.rank(),
                r2: lambda23,
                target,
            });
        }
        let (l1, l2, l3) = (t.rank(), u.rank(), v.rank());
        let mut out = TensorExpr::zero(target);
        for l12 in l1.abs_diff(l2)..=l1 + l2 {
            if !triangle_ok(2 * l12, 2 * l3, 2 * target) {
                continue;
            }
            let u_coeff = racah_unitary(
                AngMom::integer(l1),
                AngMom::integer(l2),
                AngMom::integer(target),
                AngMom::integer(l3),
                AngMom::integer(l12),
                AngMom::integer(lambda23),
            );
            if u_coeff.is_zero() {
                continue;
            }
            let inner = self.coupled_commutator(t, u, l12)?;
            let piece = self.coupled_product(&inner, v, target)?;
            out = out.add(&piece.scale(&u_coeff));
        }
        for l13 in l1.abs_diff(l3)..=l1 + l3 {
            if !triangle_ok(2 * l2, 2 * l13, 2 * target) {
                continue;
            }
            let u_coeff = racah_unitary(
                AngMom::integer(l1),
                AngMom::integer(l3),
                AngMom::integer(target),
                AngMom::integer(l2),
                AngMom::integer(l13),
                AngMom::integer(lambda23),
            );
            if u_coeff.is_zero() {
                continue;
            }
            let phase = (l3 + target).wrapping_sub(l13 + lambda23) as i32;
            let sign = if phase.rem_euclid(2) == 0 {
                RadicalNumber::one()
            } else {
                RadicalNumber::from_integer(-1)
            };
            let inner = self.coupled_commutator(t, v, l13)?;
            let piece = self.coupled_product(u, &inner, target)?;
            out = out.add(&piece.scale(&(&u_coeff * &sign)));
        }
        Ok(out)
    }

    /// `[T, T²]¹` with `T² = Σ_μ (−1)^μ T_μ T_{−μ}`, reduced to canonical
    /// form through the defining relations.
    pub fn commutator_t_with_t_squared(&self) -> Result<TensorExpr, TensorError> {
        let mut t2 = TensorOp::zero(0);
        for mu in -(self.lambda as i8)..=(self.lambda as i8) {
            // build each product through the engine so the word lands in
            // normal-ordered form
            let prod = self
                .ctx
                .poly_mul(&Poly::from_gen(Gen::T(mu)), &Poly::from_gen(Gen::T(-mu)));
            let sign = if mu.rem_euclid(2) == 0 {
                RadicalNumber::one()
            } else {
                RadicalNumber::from_integer(-1)
            };
            t2.comp_mut(0).add_scaled(&prod, &sign);
        }
        let t_op = self.expr_to_op(&self.expr_t());
        let op = TensorOp::commutator(&self.ctx, &t_op, &t2, 1)?;
        self.op_to_expr(&op)
    }
}

// ---------------------------------------------------------------------------
// Jacobi conditions for [T,[T,T]] triples
// ---------------------------------------------------------------------------

/// One raw Jacobi condition row: the coefficients of the brackets
/// `[T,[T,T]^Λ12]^Λ` over `Λ12 = 1, 3, …, 2λ−1` for a fixed `(Λ23, Λ)`.
#[derive(Clone, Debug)]
pub struct JacobiRow {
    pub lambda23: u32,
    pub lambda_total: u32,
    pub coeffs: Vec<(u32, RadicalNumber)>,
}

/// An independent condition after exact row reduction (leading coefficient
/// normalized to 1).
#[derive(Clone, Debug)]
pub struct JacobiCondition {
    pub lambda_total: u32,
    pub coeffs: Vec<(u32, RadicalNumber)>,
}

#[derive(Clone, Debug)]
pub struct JacobiReport {
    pub raw: Vec<JacobiRow>,
    pub independent: Vec<JacobiCondition>,
}

/// The associativity (Jacobi) conditions of the `(T,T,T)` triple: for each
/// `(Λ23, Λ)` the coefficient vector
/// `δ_{Λ12,Λ23} − 2(−1)^{λ−Λ} U(λλΛλ;Λ12Λ23)` over the odd `Λ12`, followed
/// by exact row reduction within each outer rank `Λ`.
pub fn jacobi_conditions(lambda: u32) -> JacobiReport {
    assert!(lambda >= 1);
    let lam = AngMom::integer(lambda);
    let odd: Vec<u32> = (1..=2 * lambda - 1).step_by(2).collect();
    let mut raw = Vec::new();
    for &l23 in &odd {
        for total in lambda.abs_diff(l23)..=lambda + l23 {
            let cols: Vec<u32> = odd
                .iter()
                .copied()
                .filter(|&l12| triangle_ok(2 * lambda, 2 * l12, 2 * total))
                .collect();
            if cols.is_empty() {
                continue;
            }
            let sign = if (lambda as i32 - total as i32).rem_euclid(2) == 0 {
                RadicalNumber::from_integer(-2)
            } else {
                RadicalNumber::from_integer(2)
            };
            let coeffs: Vec<(u32, RadicalNumber)> = cols
                .iter()
                .map(|&l12| {
                    let u = racah_unitary(
                        lam,
                        lam,
                        AngMom::integer(total),
                        lam,
                        AngMom::integer(l12),
                        AngMom::integer(l23),
                    );
                    let mut c = &sign * &u;
                    if l12 == l23 {
                        c += &RadicalNumber::one();
                    }
                    (l12, c)
                })
                .collect();
            raw.push(JacobiRow {
                lambda23: l23,
                lambda_total: total,
                coeffs,
            });
        }
    }
    // reduce per outer rank
    let mut independent = Vec::new();
    let totals: alloc::collections::BTreeSet<u32> =
        raw.iter().map(|r| r.lambda_total).collect();
    for total in totals {
        let cols: Vec<u32> = odd
            .iter()
            .copied()
            .filter(|&l12| triangle_ok(2 * lambda, 2 * l12, 2 * total))
            .collect();
        let mut rows: Vec<Vec<RadicalNumber>> = raw
            .iter()
            .filter(|r| r.lambda_total == total)
            .map(|r| {
                cols.iter()
                    .map(|&c| {
                        r.coeffs
                            .iter()
                            .find(|(l, _)| *l == c)
                            .map(|(_, v)| v.clone())
                            .unwrap_or_else(RadicalNumber::zero)
                    })
                    .collect()
            })
            .collect();
        rref(&mut rows);
        for row in rows {
            independent.push(JacobiCondition {
                lambda_total: total,
                coeffs: cols.iter().copied().zip(row).collect(),
            });
        }
    }
    JacobiReport { raw, independent }
}
