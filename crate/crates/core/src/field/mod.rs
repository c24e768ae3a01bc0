//! Exact arithmetic in `K_d = F_p(u_1)(u_2)...(u_d)` with the lexicographic
//! valuation `ω : K_d^× → Z^d`.
//!
//! An element of level `k` is a reduced fraction of polynomials in `u_k`
//! whose coefficients are elements of level `k - 1`; level `0` is `F_p`.
//! The canonical form is: numerator and denominator coprime, denominator
//! monic in `u_k`, coefficients canonical recursively. Equality is therefore
//! structural.
//!
//! `u_d` is the coarsest uniformizer, so the first coordinate of `ω(f)` is
//! the `u_d`-adic order of `f`. For `d = 2` the letters are `t = u_2` and
//! `u = u_1`, and `ω(t^a u^b) = (a, b)`.

mod poly;
mod text;

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;

use crate::ordered_values::LexVal;
use poly::Poly;

pub use text::ParseError;

/// Maximum supported tower depth.
pub const MAX_DEPTH: usize = 6;

/// Default bound on polynomial degrees accepted by [`Tower::field_op`].
pub const DEFAULT_DEGREE_BOUND: usize = 64;

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("tower depth {0} unsupported (max {MAX_DEPTH})")]
    Depth(usize),
    #[error("degree {degree} exceeds the bound {bound}")]
    DegreeBound { degree: usize, bound: usize },
    #[error("element is not in the valuation ring")]
    NotInValuationRing,
    #[error("monomial of infinite or non-integral exponent")]
    Domain,
    #[error("elements from different fields (p={0}, level {1} vs p={2}, level {3})")]
    Mismatch(u32, usize, u32, usize),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// The four field operations exposed through [`Tower::field_op`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// The field `F_p(u_1)...(u_depth)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Tower {
    p: u32,
    depth: usize,
    degree_bound: usize,
}

impl Tower {
    pub fn new(p: u32, depth: usize) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if depth > MAX_DEPTH {
            return Err(FieldError::Depth(depth));
        }
        Ok(Tower {
            p,
            depth,
            degree_bound: DEFAULT_DEGREE_BOUND,
        })
    }

    pub fn with_degree_bound(mut self, bound: usize) -> Self {
        self.degree_bound = bound;
        self
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    /// The tower obtained by dropping the `s` coarsest letters.
    pub fn residue_tower(&self, s: usize) -> Tower {
        Tower {
            depth: self.depth - s,
            ..*self
        }
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem::zero_at(self.p, self.depth)
    }

    pub fn one(&self) -> FieldElem {
        FieldElem::one_at(self.p, self.depth)
    }

    pub fn int(&self, n: i64) -> FieldElem {
        let r = n.rem_euclid(self.p as i64) as u32;
        FieldElem::prime(self.p, r).embed(self.depth)
    }

    /// The letter `u_i`, `1 ≤ i ≤ depth`.
    pub fn var(&self, i: usize) -> FieldElem {
        assert!(i >= 1 && i <= self.depth, "variable index out of range");
        let below = FieldElem::one_at(self.p, i - 1);
        FieldElem::from_parts(Poly::monomial(below.clone(), 1), Poly::constant(below))
            .embed(self.depth)
    }

    /// The coarse uniformizer `u_depth` (`t` when `depth = 2`).
    pub fn uniformizer(&self) -> FieldElem {
        self.var(self.depth)
    }

    /// `x_λ = ∏ u_{d-i}^{λ_i}`, the monomial of valuation `λ`.
    pub fn monomial(&self, lambda: &LexVal) -> Result<FieldElem, FieldError> {
        let coords = lambda.to_i64s().ok_or(FieldError::Domain)?;
        if coords.len() > self.depth {
            return Err(FieldError::Domain);
        }
        let mut exps = coords;
        exps.resize(self.depth, 0);
        if exps
            .iter()
            .any(|e| e.unsigned_abs() as usize > 4 * self.degree_bound)
        {
            return Err(FieldError::DegreeBound {
                degree: exps
                    .iter()
                    .map(|e| e.unsigned_abs() as usize)
                    .max()
                    .unwrap_or(0),
                bound: 4 * self.degree_bound,
            });
        }
        Ok(FieldElem::monomial_from_exps(self.p, &exps))
    }

    /// Exact field operation with the degree guard applied to inputs and
    /// result.
    pub fn field_op(
        &self,
        kind: FieldOp,
        f: &FieldElem,
        g: &FieldElem,
    ) -> Result<FieldElem, FieldError> {
        for x in [f, g] {
            self.check_member(x)?;
        }
        let out = match kind {
            FieldOp::Add => f + g,
            FieldOp::Sub => f - g,
            FieldOp::Mul => f * g,
            FieldOp::Div => {
                if g.is_zero() {
                    return Err(FieldError::DivisionByZero);
                }
                f / g
            }
        };
        self.check_member(&out)?;
        Ok(out)
    }

    /// Checks that `x` belongs to this tower and respects the degree guard.
    pub fn check_member(&self, x: &FieldElem) -> Result<(), FieldError> {
        if x.p != self.p || x.level() != self.depth {
            return Err(FieldError::Mismatch(self.p, self.depth, x.p, x.level()));
        }
        let degree = x.degree();
        if degree > self.degree_bound {
            return Err(FieldError::DegreeBound {
                degree,
                bound: self.degree_bound,
            });
        }
        Ok(())
    }

    /// Parses an element; see the crate README for the grammar.
    pub fn parse(&self, s: &str) -> Result<FieldElem, FieldError> {
        let f = text::parse(self, s)?;
        self.check_member(&f)?;
        Ok(f)
    }

    /// Canonical text form, accepted back by [`Tower::parse`].
    pub fn format(&self, f: &FieldElem) -> String {
        text::format(self, f)
    }

    /// Name of the letter `u_level` in this tower's text form.
    pub fn var_name(&self, level: usize) -> String {
        match (self.depth, level) {
            (2, 2) => "t".into(),
            (1 | 2, 1) => "u".into(),
            _ => format!("u{level}"),
        }
    }
}

fn is_prime(p: u32) -> bool {
    p >= 2
        && (2u32..)
            .take_while(|q| q * q <= p)
            .all(|q| !p.is_multiple_of(q))
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Prime(u32),
    Frac(Arc<Fraction>),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
struct Fraction {
    num: Poly,
    den: Poly,
}

/// An element of some level of the tower `F_p(u_1)...(u_k)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElem {
    p: u32,
    level: u8,
    repr: Repr,
}

impl FieldElem {
    fn prime(p: u32, v: u32) -> Self {
        FieldElem {
            p,
            level: 0,
            repr: Repr::Prime(v % p),
        }
    }

    fn zero_at(p: u32, level: usize) -> Self {
        if level == 0 {
            return FieldElem::prime(p, 0);
        }
        FieldElem {
            p,
            level: level as u8,
            repr: Repr::Frac(Arc::new(Fraction {
                num: Poly::zero(),
                den: Poly::constant(FieldElem::one_at(p, level - 1)),
            })),
        }
    }

    fn one_at(p: u32, level: usize) -> Self {
        FieldElem::prime(p, 1).embed(level)
    }

    /// Builds `num / den` from already reduced, monic-denominator parts.
    fn from_parts(num: Poly, den: Poly) -> Self {
        let below = den.lead().expect("zero denominator");
        let (p, level) = (below.p, below.level + 1);
        FieldElem {
            p,
            level,
            repr: Repr::Frac(Arc::new(Fraction { num, den })),
        }
    }

    /// Reduces `num / den` to canonical form.
    fn normalized(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            let below = den.lead().unwrap();
            return FieldElem::zero_at(below.p, below.level as usize + 1);
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.exact_div(&g), den.exact_div(&g))
        };
        let lead = den.lead().unwrap();
        if lead.is_one() {
            FieldElem::from_parts(num, den)
        } else {
            let inv = lead.inv();
            FieldElem::from_parts(num.scale(&inv), den.scale(&inv))
        }
    }

    fn monomial_from_exps(p: u32, exps: &[i64]) -> Self {
        // exps[0] is the exponent of the top letter
        let Some((&top, rest)) = exps.split_first() else {
            return FieldElem::prime(p, 1);
        };
        let c = FieldElem::monomial_from_exps(p, rest);
        let one = c.one_like();
        if top >= 0 {
            FieldElem::from_parts(Poly::monomial(c, top as usize), Poly::constant(one))
        } else {
            FieldElem::from_parts(
                Poly::constant(c),
                Poly::monomial(one, top.unsigned_abs() as usize),
            )
        }
    }

    pub fn level(&self) -> usize {
        self.level as usize
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn zero_like(&self) -> Self {
        FieldElem::zero_at(self.p, self.level())
    }

    pub fn one_like(&self) -> Self {
        FieldElem::one_at(self.p, self.level())
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Prime(v) => *v == 0,
            Repr::Frac(f) => f.num.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.repr {
            Repr::Prime(v) => *v == 1,
            Repr::Frac(f) => f.den.is_one() && f.num.is_one(),
        }
    }

    /// Wraps `self` as a constant of a higher level.
    pub fn embed(&self, level: usize) -> Self {
        assert!(level >= self.level(), "cannot embed into a lower level");
        let mut x = self.clone();
        while x.level() < level {
            let one = x.one_like();
            x = FieldElem::from_parts(Poly::constant(x), Poly::constant(one));
        }
        x
    }

    fn fraction(&self) -> &Fraction {
        match &self.repr {
            Repr::Frac(f) => f,
            Repr::Prime(_) => unreachable!("prime-field element has no fraction"),
        }
    }

    /// Value in `0..p` of a level-0 element.
    pub fn as_prime(&self) -> Option<u32> {
        match self.repr {
            Repr::Prime(v) => Some(v),
            Repr::Frac(_) => None,
        }
    }

    /// Largest polynomial degree appearing anywhere in the representation.
    pub fn degree(&self) -> usize {
        match &self.repr {
            Repr::Prime(_) => 0,
            Repr::Frac(f) => {
                let own = f.num.degree().unwrap_or(0).max(f.den.degree().unwrap_or(0));
                f.num
                    .0
                    .iter()
                    .chain(&f.den.0)
                    .map(FieldElem::degree)
                    .fold(own, usize::max)
            }
        }
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        match &self.repr {
            Repr::Prime(v) => FieldElem::prime(self.p, mod_inv(*v, self.p)),
            Repr::Frac(f) => {
                let lead_inv = f.num.lead().unwrap().inv();
                FieldElem::from_parts(f.den.scale(&lead_inv), f.num.scale(&lead_inv))
            }
        }
    }

    pub fn checked_div(&self, other: &FieldElem) -> Result<FieldElem, FieldError> {
        if other.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self / other)
    }

    /// Integer power; negative exponents invert. Panics on `0^(negative)`.
    pub fn pow(&self, e: i64) -> Self {
        let mut base = if e < 0 { self.inv() } else { self.clone() };
        let mut n = e.unsigned_abs();
        let mut acc = self.one_like();
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// The valuation `ω(f) ∈ Z^level ∪ {∞}`.
    pub fn val(&self) -> LexVal {
        match self.val_i64() {
            None => LexVal::Infinite,
            Some(c) => LexVal::Finite(c.into_iter().map(BigInt::from).collect()),
        }
    }

    /// The valuation as machine integers, `None` for zero.
    pub(crate) fn val_i64(&self) -> Option<Vec<i64>> {
        if self.is_zero() {
            return None;
        }
        let mut out = Vec::with_capacity(self.level());
        self.push_val(&mut out, 1);
        Some(out)
    }

    // Appends sign·ω(self) coordinates; self is nonzero.
    fn push_val(&self, out: &mut Vec<i64>, sign: i64) {
        let Repr::Frac(f) = &self.repr else {
            return;
        };
        let on = f.num.order().unwrap();
        let od = f.den.order().unwrap();
        out.push(sign * (on as i64 - od as i64));
        let start = out.len();
        f.num.0[on].push_val(out, sign);
        let mut rest = Vec::with_capacity(out.len() - start);
        f.den.0[od].push_val(&mut rest, -sign);
        for (a, b) in out[start..].iter_mut().zip(rest) {
            *a += b;
        }
    }

    /// First coordinate of the valuation (the `u_level`-adic order), or
    /// `None` for zero.
    pub fn coarse_order(&self) -> Option<i64> {
        if self.is_zero() || self.level == 0 {
            return if self.is_zero() { None } else { Some(0) };
        }
        let f = self.fraction();
        Some(f.num.order().unwrap() as i64 - f.den.order().unwrap() as i64)
    }

    /// The residue map `𝒪 → 𝒦₁`: evaluates the top letter at `0`.
    ///
    /// Defined when the first valuation coordinate is `≥ 0`.
    pub fn residue(&self) -> Result<FieldElem, FieldError> {
        if self.level == 0 {
            return Err(FieldError::Domain);
        }
        let f = self.fraction();
        if f.num.is_zero() {
            return Ok(FieldElem::zero_at(self.p, self.level() - 1));
        }
        if self.coarse_order().unwrap() < 0 {
            return Err(FieldError::NotInValuationRing);
        }
        let c0 = f
            .den
            .coeff(0)
            .expect("reduced fraction has unit denominator");
        match f.num.coeff(0) {
            Some(n0) if !n0.is_zero() => Ok(n0 / c0),
            _ => Ok(FieldElem::zero_at(self.p, self.level() - 1)),
        }
    }

    /// Iterated residue dropping the `s` coarsest letters; defined when the
    /// first `s` valuation coordinates are lexicographically `≥ 0`.
    pub fn residue_n(&self, s: usize) -> Result<FieldElem, FieldError> {
        if s > self.level() {
            return Err(FieldError::Domain);
        }
        if let Some(c) = self.val_i64() {
            if LexVal::from_ints(c[..s].iter().copied()).is_negative() {
                return Err(FieldError::NotInValuationRing);
            }
        }
        let mut x = self.clone();
        for _ in 0..s {
            x = match x.coarse_order() {
                Some(0) => x.residue()?,
                _ => FieldElem::zero_at(self.p, x.level() - 1),
            };
        }
        Ok(x)
    }

    /// The constant `c ∈ F_p^×` with `f = c·x_{ω(f)}·w`, `w` a one-unit
    /// (every residue down to `F_p` equal to 1).
    pub fn leading_coeff(&self) -> Option<u32> {
        let exps = self.val_i64()?;
        let mono = FieldElem::monomial_from_exps(self.p, &exps);
        let unit = self / &mono;
        unit.residue_n(self.level()).ok()?.as_prime()
    }

    fn check_same(&self, other: &FieldElem) {
        assert!(
            self.p == other.p && self.level == other.level,
            "{}",
            FieldError::Mismatch(self.p, self.level(), other.p, other.level())
        );
    }
}

fn mod_inv(v: u32, p: u32) -> u32 {
    // Fermat: v^(p-2) mod p
    let (mut base, mut e, mut acc) = (v as u64 % p as u64, p as u64 - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

impl<'a> Add<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;

    fn add(self, rhs: &FieldElem) -> FieldElem {
        self.check_same(rhs);
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        match (&self.repr, &rhs.repr) {
            (Repr::Prime(a), Repr::Prime(b)) => FieldElem::prime(self.p, (a + b) % self.p),
            _ => {
                let (x, y) = (self.fraction(), rhs.fraction());
                if x.den == y.den {
                    return FieldElem::normalized(x.num.add(&y.num), x.den.clone());
                }
                if x.den.is_one() {
                    // denominators coprime, result already reduced
                    return FieldElem::from_parts(x.num.mul(&y.den).add(&y.num), y.den.clone());
                }
                if y.den.is_one() {
                    return FieldElem::from_parts(y.num.mul(&x.den).add(&x.num), x.den.clone());
                }
                let g = x.den.gcd(&y.den);
                if g.is_one() {
                    let num = x.num.mul(&y.den).add(&y.num.mul(&x.den));
                    return FieldElem::from_parts(num, x.den.mul(&y.den));
                }
                let xd = x.den.exact_div(&g);
                let yd = y.den.exact_div(&g);
                let num = x.num.mul(&yd).add(&y.num.mul(&xd));
                let den = xd.mul(&y.den);
                FieldElem::normalized(num, den)
            }
        }
    }
}

impl Neg for &FieldElem {
    type Output = FieldElem;

    fn neg(self) -> FieldElem {
        match &self.repr {
            Repr::Prime(v) => FieldElem::prime(self.p, (self.p - v) % self.p),
            Repr::Frac(f) => FieldElem::from_parts(f.num.neg(), f.den.clone()),
        }
    }
}

impl<'a> Sub<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;

    fn sub(self, rhs: &FieldElem) -> FieldElem {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;

    fn mul(self, rhs: &FieldElem) -> FieldElem {
        self.check_same(rhs);
        if self.is_zero() || rhs.is_zero() {
            return self.zero_like();
        }
        if self.is_one() {
            return rhs.clone();
        }
        if rhs.is_one() {
            return self.clone();
        }
        match (&self.repr, &rhs.repr) {
            (Repr::Prime(a), Repr::Prime(b)) => {
                FieldElem::prime(self.p, ((*a as u64 * *b as u64) % self.p as u64) as u32)
            }
            _ => {
                let (x, y) = (self.fraction(), rhs.fraction());
                if x.den.is_one() && y.den.is_one() {
                    return FieldElem::from_parts(x.num.mul(&y.num), x.den.clone());
                }
                let g1 = x.num.gcd(&y.den);
                let g2 = y.num.gcd(&x.den);
                let (xn, yd) = if g1.is_one() {
                    (x.num.clone(), y.den.clone())
                } else {
                    (x.num.exact_div(&g1), y.den.exact_div(&g1))
                };
                let (yn, xd) = if g2.is_one() {
                    (y.num.clone(), x.den.clone())
                } else {
                    (y.num.exact_div(&g2), x.den.exact_div(&g2))
                };
                FieldElem::from_parts(xn.mul(&yn), xd.mul(&yd))
            }
        }
    }
}

impl<'a> Div<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;

    /// Panics on division by zero; see [`FieldElem::checked_div`].
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &FieldElem) -> FieldElem {
        self * &rhs.inv()
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for FieldElem {
            type Output = FieldElem;
            fn $m(self, rhs: FieldElem) -> FieldElem {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl Neg for FieldElem {
    type Output = FieldElem;

    fn neg(self) -> FieldElem {
        -&self
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Generic text form with letters named `u1, u2, ...` by level.
impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tower = Tower {
            p: self.p,
            depth: self.level(),
            degree_bound: DEFAULT_DEGREE_BOUND,
        };
        if self.level() <= 2 {
            // avoid the t/u aliases so Display never depends on context
            f.write_str(&text::format_with(&tower, self, &|l| format!("u{l}")))
        } else {
            f.write_str(&tower.format(self))
        }
    }
}

#[cfg(test)]
mod tests;
