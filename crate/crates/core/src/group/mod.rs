//! The root datum of `SL_n`, the action of monomial matrices on the
//! standard apartment, parahoric and Iwahori membership, and the Iwasawa and
//! affine Bruhat decompositions.
//!
//! Indices are 0-based. The Iwahori subgroup is the one attached to the
//! origin and the chamber of upper triangular matrices: integral entries
//! with strictly lower entries in `𝕄`.

pub mod domain;

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::field::{FieldElem, FieldError, Tower};
use crate::lattice::{
    act, class_eq, psi_inv, ApartmentPoint, LatticeClass, LatticeError, PivotRule, ValuationContext,
};
use crate::matrix::Matrix;
use crate::ordered_values::LexVal;

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("root index ({0}, {1}) invalid for n = {2}")]
    Root(usize, usize, usize),
    #[error("Weyl element needs a nonzero parameter")]
    ZeroParameter,
    #[error("matrix is not monomial")]
    NotMonomial,
    #[error("determinant is not 1")]
    NotSpecialLinear,
    #[error("matrix is singular")]
    Singular,
    #[error("shape mismatch")]
    Shape,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// `x_{(i,j)}(c) = 1 + c·E_{ij}` for `i < j` and `1 − c·E_{ij}` for `i > j`.
pub fn root_elem(
    tower: Tower,
    n: usize,
    i: usize,
    j: usize,
    c: &FieldElem,
) -> Result<Matrix, GroupError> {
    if i == j || i >= n || j >= n {
        return Err(GroupError::Root(i, j, n));
    }
    let mut m = Matrix::identity(tower, n);
    m.set(i, j, if i < j { c.clone() } else { -c });
    Ok(m)
}

/// `m_α(c) = x_α(c)·x_{−α}(c⁻¹)·x_α(c)` for `α = (i, j)`.
pub fn weyl_elem(
    tower: Tower,
    n: usize,
    i: usize,
    j: usize,
    c: &FieldElem,
) -> Result<Matrix, GroupError> {
    if c.is_zero() {
        return Err(GroupError::ZeroParameter);
    }
    let x = root_elem(tower, n, i, j, c)?;
    let y = root_elem(tower, n, j, i, &c.inv())?;
    Ok(&(&x * &y) * &x)
}

/// `x ↦ y` with `y_i = x_{perm[i]} + trans_i`, modulo the diagonal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AffineWeylElem {
    perm: Vec<usize>,
    trans: Vec<LexVal>,
}

impl AffineWeylElem {
    pub fn new(perm: Vec<usize>, trans: Vec<LexVal>) -> Result<Self, GroupError> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(GroupError::Shape);
            }
        }
        if trans.len() != n {
            return Err(GroupError::Shape);
        }
        let t = ApartmentPoint::new(trans).map_err(GroupError::Lattice)?;
        Ok(AffineWeylElem {
            perm,
            trans: t.coords().to_vec(),
        })
    }

    pub fn identity(n: usize, dim: usize) -> Self {
        AffineWeylElem {
            perm: (0..n).collect(),
            trans: vec![LexVal::zero(dim); n],
        }
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn trans(&self) -> &[LexVal] {
        &self.trans
    }

    pub fn is_translation(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn apply(&self, x: &ApartmentPoint) -> ApartmentPoint {
        let c = x.coords();
        ApartmentPoint::new(
            self.perm
                .iter()
                .zip(&self.trans)
                .map(|(&p, t)| &c[p] + t)
                .collect(),
        )
        .expect("shapes agree")
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffineWeylElem) -> AffineWeylElem {
        let perm = self.perm.iter().map(|&p| other.perm[p]).collect();
        let trans = self
            .perm
            .iter()
            .zip(&self.trans)
            .map(|(&p, t)| t + &other.trans[p])
            .collect();
        AffineWeylElem::new(perm, trans).expect("valid composition")
    }

    pub fn inverse(&self) -> AffineWeylElem {
        let n = self.perm.len();
        let mut perm = vec![0; n];
        let mut trans = vec![LexVal::Infinite; n];
        for (i, &p) in self.perm.iter().enumerate() {
            perm[p] = i;
            trans[p] = -self.trans[i].clone();
        }
        AffineWeylElem::new(perm, trans).expect("valid inverse")
    }
}

impl fmt::Debug for AffineWeylElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t: Vec<String> = self.trans.iter().map(ToString::to_string).collect();
        write!(f, "perm {:?} trans ({})", self.perm, t.join(", "))
    }
}

/// `ν(m)` for a monomial matrix of determinant 1.
pub fn nu_action(m: &Matrix) -> Result<AffineWeylElem, GroupError> {
    if !m.is_monomial_shape() {
        return Err(GroupError::NotMonomial);
    }
    if !m.det().map_err(|_| GroupError::Shape)?.is_one() {
        return Err(GroupError::NotSpecialLinear);
    }
    nu_action_gl(m, m.tower().depth())
}

/// `ν` on all monomial matrices, using the first `rank` valuation
/// coordinates. Column `j` with nonzero entry in row `r` sends the `j`-th
/// coordinate to position `r`, shifted by the valuation of that entry.
pub(crate) fn nu_action_gl(m: &Matrix, rank: usize) -> Result<AffineWeylElem, GroupError> {
    if !m.is_monomial_shape() {
        return Err(GroupError::NotMonomial);
    }
    let n = m.rows();
    let mut perm = vec![0; n];
    let mut trans = vec![LexVal::Infinite; n];
    for j in 0..n {
        let r = (0..n).find(|&r| !m.get(r, j).is_zero()).unwrap();
        perm[r] = j;
        trans[r] = m.get(r, j).val().truncate(rank);
    }
    AffineWeylElem::new(perm, trans)
}

/// `g` fixes the point `psi_inv(x)`.
pub fn is_in_parahoric(g: &Matrix, x: &ApartmentPoint) -> Result<bool, GroupError> {
    let ctx = ValuationContext::new(g.tower(), x.dim())?;
    let l = psi_inv(&ctx, x)?;
    Ok(class_eq(&act(g, &l)?, &l)?)
}

/// Membership in the Iwahori subgroup of the origin.
pub fn is_in_iwahori(g: &Matrix) -> Result<bool, GroupError> {
    if !g.is_square() {
        return Err(GroupError::Shape);
    }
    if !g.det().map_err(|_| GroupError::Shape)?.is_one() {
        return Err(GroupError::NotSpecialLinear);
    }
    Ok(is_iwahori_shape(g))
}

fn is_iwahori_shape(g: &Matrix) -> bool {
    let n = g.rows();
    (0..n).all(|i| {
        (0..n).all(|j| {
            let v = g.get(i, j).val();
            if i > j {
                v.is_positive()
            } else {
                v.is_nonnegative()
            }
        })
    })
}

/// `g = u·m·k` with `u` upper unitriangular, `m` monomial, `k` Iwahori.
#[derive(Debug, Clone)]
pub struct Iwasawa {
    pub u: Matrix,
    pub m: Matrix,
    pub k: Matrix,
}

/// `g = b1·m·b2` with `b1, b2` Iwahori and `m` monomial.
#[derive(Debug, Clone)]
pub struct Bruhat {
    pub b1: Matrix,
    pub m: Matrix,
    pub b2: Matrix,
}

pub fn iwasawa(g: &Matrix) -> Result<Iwasawa, GroupError> {
    iwasawa_with(g, PivotRule::Canonical)
}

/// Iwasawa decomposition. The pivot in each row is forced, so a
/// [`PivotRule::Shuffled`] rule instead first replaces `g` by a random
/// element `u'·g·k'` of its double coset, decomposes that, and folds `u'`
/// and `k'` back into the factors.
pub fn iwasawa_with(g: &Matrix, rule: PivotRule) -> Result<Iwasawa, GroupError> {
    check_sl(g)?;
    let Some(mut rng) = rule.rng() else {
        return echelon(g);
    };
    let n = g.rows();
    let (u0, u0_inv) = random_upper_unitriangular(g.tower(), n, &mut rng);
    let (k0, k0_inv) = random_iwahori(g.tower(), n, &mut rng);
    let d = echelon(&(&(&u0 * g) * &k0))?;
    Ok(Iwasawa {
        u: &u0_inv * &d.u,
        m: d.m,
        k: &d.k * &k0_inv,
    })
}

fn check_sl(g: &Matrix) -> Result<(), GroupError> {
    if !g.is_square() {
        return Err(GroupError::Shape);
    }
    let det = g.det().map_err(|_| GroupError::Shape)?;
    if det.is_zero() {
        return Err(GroupError::Singular);
    }
    if !det.is_one() {
        return Err(GroupError::NotSpecialLinear);
    }
    Ok(())
}

/// Bottom-up echelon form over `GL_n(K)`: left upper unitriangular row
/// operations and right Iwahori column operations. In each row the pivot
/// is the leftmost entry of minimal valuation among the unused columns,
/// which is what makes the column operations lie in the Iwahori.
pub(crate) fn echelon(g: &Matrix) -> Result<Iwasawa, GroupError> {
    let n = g.rows();
    let tower = g.tower();
    let mut a = g.clone();
    let mut u = Matrix::identity(tower, n);
    let mut k = Matrix::identity(tower, n);
    let mut free: Vec<usize> = (0..n).collect();
    for row in (0..n).rev() {
        let &c = free
            .iter()
            .min_by(|&&x, &&y| {
                a.get(row, x)
                    .val()
                    .cmp(&a.get(row, y).val())
                    .then(x.cmp(&y))
            })
            .unwrap();
        if a.get(row, c).is_zero() {
            return Err(GroupError::Singular);
        }
        let inv = a.get(row, c).inv();
        for &j in &free {
            if j != c && !a.get(row, j).is_zero() {
                let x = -&(a.get(row, j) * &inv);
                a.add_col_multiple(j, c, &x);
                k.add_row_multiple(c, j, &-&x);
            }
        }
        for i in 0..row {
            if !a.get(i, c).is_zero() {
                let y = -&(a.get(i, c) * &inv);
                a.add_row_multiple(i, row, &y);
                u.add_col_multiple(row, i, &-&y);
            }
        }
        free.retain(|&j| j != c);
    }
    let (m, w) = monomial_part(&a)?;
    Ok(Iwasawa { u, m, k: &w * &k })
}

/// Splits a monomial matrix `a = m·w` with `m` having entries `c·x_λ`,
/// `c ∈ F_p^×`, and `w` diagonal with one-unit entries.
fn monomial_part(a: &Matrix) -> Result<(Matrix, Matrix), GroupError> {
    if !a.is_monomial_shape() {
        return Err(GroupError::NotMonomial);
    }
    let tower = a.tower();
    let n = a.rows();
    let mut m = Matrix::zeros(tower, n, n);
    let mut w = Vec::with_capacity(n);
    for j in 0..n {
        let r = (0..n).find(|&r| !a.get(r, j).is_zero()).unwrap();
        let x = a.get(r, j);
        let lead = tower.int(x.leading_coeff().expect("nonzero") as i64);
        let mono = &tower.monomial(&x.val())? * &lead;
        w.push(x / &mono);
        m.set(r, j, mono);
    }
    Ok((m, Matrix::diag(tower, &w)))
}

pub fn bruhat(g: &Matrix) -> Result<Bruhat, GroupError> {
    bruhat_with(g, PivotRule::Canonical)
}

/// Affine Bruhat decomposition by elimination with Iwahori operations on
/// both sides. The pivot is a global minimum of `(ω(g_ij), j − i)`; every
/// entry below it in its column or left of it in its row then has strictly
/// larger valuation, so the clearing operations are Iwahori. A
/// [`PivotRule::Shuffled`] rule breaks ties randomly and also moves `g`
/// randomly inside its double coset first.
pub fn bruhat_with(g: &Matrix, rule: PivotRule) -> Result<Bruhat, GroupError> {
    check_sl(g)?;
    let n = g.rows();
    let tower = g.tower();
    let mut rng = rule.rng();
    let id = || (Matrix::identity(tower, n), Matrix::identity(tower, n));
    let ((l0, l0_inv), (r0, r0_inv)) = match rng.as_mut() {
        Some(r) => (random_iwahori(tower, n, r), random_iwahori(tower, n, r)),
        None => (id(), id()),
    };
    let mut a = &(&l0 * g) * &r0;
    let mut b1 = Matrix::identity(tower, n);
    let mut b2 = Matrix::identity(tower, n);
    let mut rows: Vec<usize> = (0..n).collect();
    let mut cols: Vec<usize> = (0..n).collect();
    while !rows.is_empty() {
        let key = |i: usize, j: usize| (a.get(i, j).val(), j as i64 - i as i64);
        let mut best = None;
        let mut ties = Vec::new();
        for &i in &rows {
            for &j in &cols {
                let kv = key(i, j);
                match &best {
                    Some(b) if kv > *b => {}
                    Some(b) if kv == *b => ties.push((i, j)),
                    _ => {
                        best = Some(kv);
                        ties = vec![(i, j)];
                    }
                }
            }
        }
        let (pi, pj) = match rng.as_mut() {
            Some(r) => *ties.choose(r).unwrap(),
            None => ties[0],
        };
        if a.get(pi, pj).is_zero() {
            return Err(GroupError::Singular);
        }
        let inv = a.get(pi, pj).inv();
        for &r in &rows {
            if r != pi && !a.get(r, pj).is_zero() {
                let x = -&(a.get(r, pj) * &inv);
                a.add_row_multiple(r, pi, &x);
                b1.add_col_multiple(pi, r, &-&x);
            }
        }
        for &c in &cols {
            if c != pj && !a.get(pi, c).is_zero() {
                let y = -&(a.get(pi, c) * &inv);
                a.add_col_multiple(c, pj, &y);
                b2.add_row_multiple(pj, c, &-&y);
            }
        }
        rows.retain(|&r| r != pi);
        cols.retain(|&c| c != pj);
    }
    let (m, w) = monomial_part(&a)?;
    Ok(Bruhat {
        b1: &l0_inv * &b1,
        m,
        b2: &(&w * &b2) * &r0_inv,
    })
}

/// Which chamber at infinity the retraction is centred at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChamberSign {
    /// Upper triangular unipotent radical.
    Plus,
    /// Lower triangular unipotent radical.
    Minus,
}

/// Retraction onto the standard apartment from the sector germ of the
/// chosen chamber: for a basis `B = u·m·k`, the image is `ν(m)(origin)`.
pub fn retract_to_apartment(
    l: &LatticeClass,
    sign: ChamberSign,
) -> Result<ApartmentPoint, GroupError> {
    let b = l.basis();
    let n = l.n();
    let rank = l.context().rank();
    let m = match sign {
        ChamberSign::Plus => echelon(b)?.m,
        ChamberSign::Minus => {
            let j = antidiagonal(b.tower(), n);
            let m = echelon(&(&j * b))?.m;
            &j * &m
        }
    };
    let origin = ApartmentPoint::origin(n, rank);
    Ok(nu_action_gl(&m, rank)?.apply(&origin))
}

fn antidiagonal(tower: Tower, n: usize) -> Matrix {
    let mut j = Matrix::zeros(tower, n, n);
    for i in 0..n {
        j.set(i, n - 1 - i, tower.one());
    }
    j
}

/// A random upper unitriangular matrix and its inverse, as a product of
/// root elements with one-term parameters.
pub(crate) fn random_upper_unitriangular(
    tower: Tower,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> (Matrix, Matrix) {
    let mut m = Matrix::identity(tower, n);
    let mut inv = Matrix::identity(tower, n);
    for i in 0..n {
        for j in i + 1..n {
            let c = random_term(tower, rng, -2);
            m = &m * &root_elem(tower, n, i, j, &c).expect("valid root");
            inv = &root_elem(tower, n, i, j, &-&c).expect("valid root") * &inv;
        }
    }
    (m, inv)
}

/// A random Iwahori element and its inverse: a constant torus element
/// followed by root elements with admissible one-term parameters.
pub(crate) fn random_iwahori(tower: Tower, n: usize, rng: &mut ChaCha8Rng) -> (Matrix, Matrix) {
    let c = tower.int(rng.gen_range(1..tower.p() as i64));
    let mut d = vec![tower.one(); n];
    d[0] = c.clone();
    d[n - 1] = c.inv();
    let mut m = Matrix::diag(tower, &d);
    let e: Vec<FieldElem> = d.iter().map(FieldElem::inv).collect();
    let mut inv = Matrix::diag(tower, &e);
    for _ in 0..n {
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let c = random_term(tower, rng, 0);
        let c = if i > j { &c * &tower.var(1) } else { c };
        m = &m * &root_elem(tower, n, i, j, &c).expect("valid root");
        inv = &root_elem(tower, n, i, j, &-&c).expect("valid root") * &inv;
    }
    (m, inv)
}

/// Zero or a term `c·x_λ` with coarse exponent in
/// `[min_coarse, min_coarse + 1]` and finer exponents in `[-1, 1]`; when
/// `min_coarse = 0` the term is integral.
fn random_term(tower: Tower, rng: &mut ChaCha8Rng, min_coarse: i64) -> FieldElem {
    if rng.gen_range(0..4) == 0 {
        return tower.zero();
    }
    let mut exps = vec![rng.gen_range(min_coarse..=min_coarse + 1)];
    for _ in 1..tower.depth() {
        exps.push(rng.gen_range(-1..=1));
    }
    if min_coarse == 0 && exps[0] == 0 {
        // keep the term integral: finer exponents lexicographically >= 0
        for e in exps.iter_mut().skip(1) {
            *e = e.abs();
        }
    }
    let mono = tower
        .monomial(&LexVal::from_ints(exps))
        .expect("small exponents");
    &mono * &tower.int(rng.gen_range(1..tower.p() as i64))
}
