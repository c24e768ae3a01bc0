//! Dense univariate polynomials whose coefficients live one level down the
//! tower. Coefficients are stored lowest degree first with no trailing zeros.

use super::FieldElem;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub(crate) struct Poly(pub(crate) Vec<FieldElem>);

impl Poly {
    pub(crate) fn zero() -> Self {
        Poly(Vec::new())
    }

    pub(crate) fn constant(c: FieldElem) -> Self {
        let mut p = Poly(vec![c]);
        p.trim();
        p
    }

    /// `c · x^e`.
    pub(crate) fn monomial(c: FieldElem, e: usize) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![c.zero_like(); e];
        v.push(c);
        Poly(v)
    }

    pub(crate) fn trim(&mut self) {
        while self.0.last().is_some_and(FieldElem::is_zero) {
            self.0.pop();
        }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn is_one(&self) -> bool {
        self.0.len() == 1 && self.0[0].is_one()
    }

    pub(crate) fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub(crate) fn lead(&self) -> Option<&FieldElem> {
        self.0.last()
    }

    /// Index of the lowest nonzero coefficient.
    pub(crate) fn order(&self) -> Option<usize> {
        self.0.iter().position(|c| !c.is_zero())
    }

    pub(crate) fn coeff(&self, i: usize) -> Option<&FieldElem> {
        self.0.get(i)
    }

    pub(crate) fn add(&self, other: &Poly) -> Poly {
        let (long, short) = if self.0.len() >= other.0.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut v = long.0.clone();
        for (a, b) in v.iter_mut().zip(&short.0) {
            *a = &*a + b;
        }
        let mut p = Poly(v);
        p.trim();
        p
    }

    pub(crate) fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|c| -c).collect())
    }

    pub(crate) fn scale(&self, c: &FieldElem) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        if c.is_one() {
            return self.clone();
        }
        Poly(self.0.iter().map(|a| a * c).collect())
    }

    pub(crate) fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        let zero = self.0[0].zero_like();
        let mut v = vec![zero; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                v[i + j] = &v[i + j] + &(a * b);
            }
        }
        let mut p = Poly(v);
        p.trim();
        p
    }

    /// Euclidean division; `divisor` must be nonzero.
    pub(crate) fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("polynomial division by zero");
        if divisor.is_one() {
            return (self.clone(), Poly::zero());
        }
        let lead_inv = divisor.0[dd].inv();
        let mut rem = self.0.clone();
        let Some(sd) = self.degree() else {
            return (Poly::zero(), Poly::zero());
        };
        if sd < dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![divisor.0[0].zero_like(); sd - dd + 1];
        for k in (0..=sd - dd).rev() {
            let c = &rem[k + dd];
            if c.is_zero() {
                continue;
            }
            let q = c * &lead_inv;
            for (j, b) in divisor.0.iter().enumerate() {
                if !b.is_zero() {
                    rem[k + j] = &rem[k + j] - &(&q * b);
                }
            }
            quot[k] = q;
        }
        rem.truncate(dd);
        let mut r = Poly(rem);
        r.trim();
        let mut q = Poly(quot);
        q.trim();
        (q, r)
    }

    pub(crate) fn exact_div(&self, divisor: &Poly) -> Poly {
        let (q, r) = self.div_rem(divisor);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub(crate) fn monic(&self) -> Poly {
        match self.lead() {
            Some(l) if !l.is_one() => self.scale(&l.inv()),
            _ => self.clone(),
        }
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub(crate) fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return if self.is_zero() {
                other.monic()
            } else {
                self.monic()
            };
        }
        if self.0[0].level() > 0 {
            return primitive_gcd(self, other);
        }
        let mut a = self.clone();
        let mut b = other.clone();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            if b.degree() == Some(0) {
                return Poly::constant(b.0[0].one_like());
            }
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }
}

// Polynomials over the ring `K'[v]` below a coefficient field `K'(v)`,
// stored as their coefficient lists.
type RingPoly = Vec<Poly>;

/// Gcd over `K'(v)` computed in `K'[v][x]` with primitive pseudo-remainder
/// sequences, which avoids the coefficient growth of plain Euclid.
fn primitive_gcd(a: &Poly, b: &Poly) -> Poly {
    let one = a.0[0].one_like();
    let unit_den = Poly::constant(one.fraction().den.0[0].clone());
    let mut x = primitive_part(to_ring(a));
    let mut y = primitive_part(to_ring(b));
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while y.len() > 1 {
        let r = pseudo_rem(&x, &y);
        x = y;
        y = primitive_part(r);
    }
    if y.is_empty() {
        let coeffs = x
            .into_iter()
            .map(|c| FieldElem::from_parts(c, unit_den.clone()))
            .collect();
        let mut p = Poly(coeffs);
        p.trim();
        return p.monic();
    }
    Poly::constant(one)
}

fn to_ring(p: &Poly) -> RingPoly {
    let mut l: Option<Poly> = None;
    for c in &p.0 {
        let d = &c.fraction().den;
        l = Some(match l {
            None => d.clone(),
            Some(l) => {
                let g = l.gcd(d);
                l.mul(&d.exact_div(&g))
            }
        });
    }
    let l = l.expect("nonzero polynomial");
    p.0.iter()
        .map(|c| {
            let f = c.fraction();
            f.num.mul(&l.exact_div(&f.den))
        })
        .collect()
}

fn primitive_part(mut p: RingPoly) -> RingPoly {
    while p.last().is_some_and(Poly::is_zero) {
        p.pop();
    }
    let mut content: Option<Poly> = None;
    for c in p.iter().filter(|c| !c.is_zero()) {
        if content.as_ref().is_some_and(|g| g.degree() == Some(0)) {
            break;
        }
        content = Some(match content {
            None => c.monic(),
            Some(g) => g.gcd(c),
        });
    }
    match content {
        Some(g) if g.degree() != Some(0) => p.iter().map(|c| c.exact_div(&g)).collect(),
        _ => p,
    }
}

fn pseudo_rem(a: &RingPoly, b: &RingPoly) -> RingPoly {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r = a.clone();
    while r.len() > db {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        for c in r.iter_mut() {
            *c = c.mul(lb);
        }
        for (j, bj) in b.iter().enumerate() {
            let k = dr - db + j;
            r[k] = r[k].add(&lr.mul(bj).neg());
        }
        while r.last().is_some_and(Poly::is_zero) {
            r.pop();
        }
    }
    r
}
