//! Homothety classes of `𝕆`-lattices in `K^n`, their relative position and
//! distances, common apartments, and coordinates in the standard apartment.
//!
//! Everything is relative to a [`ValuationContext`], which fixes the tower
//! and how many leading coordinates of the valuation are in force. The full
//! context gives the `Λ = Z^d` building; a context of rank `s < d` gives the
//! building of the coarser valuation `ω_{≤s}`.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::field::{FieldElem, FieldError, Tower};
use crate::matrix::{Matrix, MatrixError};
use crate::ordered_values::{abs_val, LexVal};

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
    #[error("lattices live in different valuation contexts")]
    Context,
    #[error("lattice rank must be at least 2, got {0}")]
    Rank(usize),
    #[error("matrix is not square")]
    NotSquare,
    #[error("determinant is not 1")]
    NotSpecialLinear,
    #[error("lattice class is not in the standard apartment")]
    NotInApartment,
    #[error("empty point set")]
    Empty,
    #[error("invalid apartment point: {0}")]
    Point(String),
    #[error("invalid valuation context: rank {rank}, depth {depth}")]
    BadContext { rank: usize, depth: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl From<MatrixError> for LatticeError {
    fn from(e: MatrixError) -> Self {
        match e {
            MatrixError::Singular => LatticeError::Singular,
            MatrixError::NotSquare => LatticeError::NotSquare,
            MatrixError::Shape(a, _, c, _) => LatticeError::Dimension(a, c),
            MatrixError::Ragged => LatticeError::NotSquare,
        }
    }
}

/// A tower together with the number of leading valuation coordinates used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ValuationContext {
    tower: Tower,
    rank: usize,
}

impl ValuationContext {
    pub fn new(tower: Tower, rank: usize) -> Result<Self, LatticeError> {
        if rank == 0 || rank > tower.depth() {
            return Err(LatticeError::BadContext {
                rank,
                depth: tower.depth(),
            });
        }
        Ok(ValuationContext { tower, rank })
    }

    /// The context using the whole valuation.
    pub fn full(tower: Tower) -> Self {
        assert!(tower.depth() >= 1, "the prime field carries no valuation");
        ValuationContext {
            tower,
            rank: tower.depth(),
        }
    }

    pub fn tower(&self) -> Tower {
        self.tower
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_full(&self) -> bool {
        self.rank == self.tower.depth()
    }

    pub fn val(&self, f: &FieldElem) -> LexVal {
        let v = f.val();
        if self.is_full() {
            v
        } else {
            v.truncate(self.rank)
        }
    }

    /// `f` lies in the valuation ring of this context.
    pub fn is_integral(&self, f: &FieldElem) -> bool {
        self.val(f).is_nonnegative()
    }

    /// A monomial whose valuation in this context is `lambda`.
    pub fn monomial(&self, lambda: &LexVal) -> Result<FieldElem, FieldError> {
        self.tower.monomial(lambda)
    }

    pub fn min_val(&self, m: &Matrix) -> LexVal {
        m.entries()
            .map(|x| self.val(x))
            .min()
            .unwrap_or(LexVal::Infinite)
    }

    pub fn is_integral_matrix(&self, m: &Matrix) -> bool {
        m.entries().all(|x| self.is_integral(x))
    }

    /// `m ∈ GL_n` of the valuation ring.
    pub fn is_unimodular(&self, m: &Matrix) -> bool {
        self.is_integral_matrix(m) && m.det().is_ok_and(|d| self.val(&d).is_zero())
    }
}

/// How [`smith_form_with`] breaks ties between pivots of equal valuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotRule {
    /// Lexicographically smallest `(row, column)`.
    #[default]
    Canonical,
    /// Uniformly random among the minimal positions.
    Shuffled(u64),
}

impl PivotRule {
    pub(crate) fn rng(self) -> Option<ChaCha8Rng> {
        match self {
            PivotRule::Canonical => None,
            PivotRule::Shuffled(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        }
    }
}

/// `M = P·D·Q` with `P, Q` unimodular and `D` diagonal with monomial
/// entries of nondecreasing valuation.
#[derive(Debug, Clone)]
pub struct SmithForm {
    pub p: Matrix,
    pub d: Matrix,
    pub q: Matrix,
    /// Valuations of the diagonal of `D` in the working context.
    pub invariants: Vec<LexVal>,
}

pub fn smith_form(ctx: &ValuationContext, m: &Matrix) -> Result<SmithForm, LatticeError> {
    smith_form_with(ctx, m, PivotRule::Canonical)
}

pub fn smith_form_with(
    ctx: &ValuationContext,
    m: &Matrix,
    rule: PivotRule,
) -> Result<SmithForm, LatticeError> {
    if !m.is_square() {
        return Err(LatticeError::NotSquare);
    }
    let n = m.rows();
    let tower = m.tower();
    let mut rng = rule.rng();
    let mut a = m.clone();
    let mut p = Matrix::identity(tower, n);
    let mut q = Matrix::identity(tower, n);
    for k in 0..n {
        let mut best = LexVal::Infinite;
        let mut ties = Vec::new();
        for i in k..n {
            for j in k..n {
                let v = ctx.val(a.get(i, j));
                if v < best {
                    best = v;
                    ties.clear();
                    ties.push((i, j));
                } else if v == best && !v.is_infinite() {
                    ties.push((i, j));
                }
            }
        }
        if best.is_infinite() {
            return Err(LatticeError::Singular);
        }
        let (pi, pj) = match rng.as_mut() {
            Some(r) => *ties.choose(r).unwrap(),
            None => ties[0],
        };
        a.swap_rows(k, pi);
        p.swap_cols(k, pi);
        a.swap_cols(k, pj);
        q.swap_rows(k, pj);
        let inv = a.get(k, k).inv();
        for r in k + 1..n {
            if !a.get(r, k).is_zero() {
                let c = -&(a.get(r, k) * &inv);
                a.add_row_multiple(r, k, &c);
                p.add_col_multiple(k, r, &-&c);
            }
        }
        for j in k + 1..n {
            if !a.get(k, j).is_zero() {
                let c = -&(a.get(k, j) * &inv);
                a.add_col_multiple(j, k, &c);
                q.add_row_multiple(k, j, &-&c);
            }
        }
    }
    let mut invariants = Vec::with_capacity(n);
    for i in 0..n {
        let v = ctx.val(a.get(i, i));
        let mono = ctx.monomial(&v)?;
        let unit = a.get(i, i) / &mono;
        q.scale_row(i, &unit);
        a.set(i, i, mono);
        invariants.push(v);
    }
    Ok(SmithForm {
        p,
        d: a,
        q,
        invariants,
    })
}

/// The class `[B·𝕆^n]` of the lattice spanned by the columns of `B`.
#[derive(Clone)]
pub struct LatticeClass {
    ctx: ValuationContext,
    basis: Matrix,
}

impl LatticeClass {
    pub fn new(ctx: ValuationContext, basis: Matrix) -> Result<Self, LatticeError> {
        if !basis.is_square() {
            return Err(LatticeError::NotSquare);
        }
        if basis.rows() < 2 {
            return Err(LatticeError::Rank(basis.rows()));
        }
        if basis.tower() != ctx.tower() {
            return Err(LatticeError::Context);
        }
        if basis.det()?.is_zero() {
            return Err(LatticeError::Singular);
        }
        Ok(LatticeClass { ctx, basis })
    }

    /// The standard class `[𝕆^n]`.
    pub fn standard(ctx: ValuationContext, n: usize) -> Self {
        LatticeClass::new(ctx, Matrix::identity(ctx.tower(), n)).expect("identity basis")
    }

    pub fn n(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn context(&self) -> &ValuationContext {
        &self.ctx
    }

    /// The same basis read in another context over the same tower.
    pub fn with_context(&self, ctx: ValuationContext) -> Result<Self, LatticeError> {
        LatticeClass::new(ctx, self.basis.clone())
    }

    fn check_compatible(&self, other: &LatticeClass) -> Result<(), LatticeError> {
        if self.n() != other.n() {
            return Err(LatticeError::Dimension(self.n(), other.n()));
        }
        if self.ctx != other.ctx {
            return Err(LatticeError::Context);
        }
        Ok(())
    }

    /// `B₁⁻¹B₂`.
    fn transition(&self, other: &LatticeClass) -> Result<Matrix, LatticeError> {
        self.check_compatible(other)?;
        Ok(&self.basis.inverse()? * &other.basis)
    }
}

impl fmt::Debug for LatticeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}]", self.basis)
    }
}

/// Equality of homothety classes.
pub fn class_eq(l1: &LatticeClass, l2: &LatticeClass) -> Result<bool, LatticeError> {
    let m = l1.transition(l2)?;
    Ok(is_scaled_unimodular(&l1.ctx, &m))
}

/// `m ∈ K^×·GL_n(𝕆)`: after scaling by `monomial(-μ)`, `μ` the minimal
/// entry valuation, the matrix is integral, so it suffices that its
/// determinant is a unit, i.e. `ω(det m) = n·μ`.
pub(crate) fn is_scaled_unimodular(ctx: &ValuationContext, m: &Matrix) -> bool {
    let mu = ctx.min_val(m);
    let Ok(det) = m.det() else {
        return false;
    };
    if det.is_zero() || mu.is_infinite() {
        return false;
    }
    ctx.val(&det) == mu.scale(m.rows() as i64).expect("finite")
}

/// Invariant valuations of `B₁⁻¹B₂`, sorted and shifted so the minimum is 0.
pub fn rel_position(l1: &LatticeClass, l2: &LatticeClass) -> Result<Vec<LexVal>, LatticeError> {
    rel_position_with(l1, l2, PivotRule::Canonical)
}

pub fn rel_position_with(
    l1: &LatticeClass,
    l2: &LatticeClass,
    rule: PivotRule,
) -> Result<Vec<LexVal>, LatticeError> {
    let m = l1.transition(l2)?;
    let sf = smith_form_with(&l1.ctx, &m, rule)?;
    let base = sf.invariants[0].clone();
    Ok(sf.invariants.iter().map(|v| v - &base).collect())
}

/// The largest normalized invariant.
pub fn dist_max(l1: &LatticeClass, l2: &LatticeClass) -> Result<LexVal, LatticeError> {
    Ok(rel_position(l1, l2)?.pop().expect("n >= 2"))
}

/// `Σ_{i<j} (ν_j − ν_i)` over the sorted invariants.
pub fn dist_sum(l1: &LatticeClass, l2: &LatticeClass) -> Result<LexVal, LatticeError> {
    Ok(sum_of_gaps(&rel_position(l1, l2)?))
}

fn sum_of_gaps(nu: &[LexVal]) -> LexVal {
    let n = nu.len() as i64;
    // Σ_{i<j}(ν_j − ν_i) = Σ_k (2k − n + 1)·ν_k for sorted ν
    let dim = nu[0].dim().unwrap_or(0);
    nu.iter()
        .enumerate()
        .fold(LexVal::zero(dim), |acc, (k, v)| {
            acc + v.scale(2 * k as i64 - n + 1).expect("finite")
        })
}

/// A basis in which both classes are diagonal, and their coordinates.
#[derive(Debug, Clone)]
pub struct CommonApartment {
    pub basis: Matrix,
    pub x1: ApartmentPoint,
    pub x2: ApartmentPoint,
}

pub fn common_apartment(
    l1: &LatticeClass,
    l2: &LatticeClass,
) -> Result<CommonApartment, LatticeError> {
    let m = l1.transition(l2)?;
    let sf = smith_form(&l1.ctx, &m)?;
    let basis = &l1.basis * &sf.p;
    let n = l1.n();
    let dim = l1.ctx.rank();
    Ok(CommonApartment {
        basis,
        x1: ApartmentPoint::origin(n, dim),
        x2: ApartmentPoint::new(sf.invariants)?,
    })
}

/// A point of `Λ^n / Λ·(1,…,1)`, stored with first coordinate 0.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ApartmentPoint {
    coords: Vec<LexVal>,
}

impl ApartmentPoint {
    pub fn new(coords: Vec<LexVal>) -> Result<Self, LatticeError> {
        let Some(first) = coords.first().cloned() else {
            return Err(LatticeError::Point("no coordinates".into()));
        };
        let dim = first
            .dim()
            .ok_or_else(|| LatticeError::Point("infinite coordinate".into()))?;
        if coords.iter().any(|c| c.dim() != Some(dim)) {
            return Err(LatticeError::Point("coordinates of mixed dimension".into()));
        }
        Ok(ApartmentPoint {
            coords: coords.iter().map(|c| c - &first).collect(),
        })
    }

    pub fn from_ints(coords: &[&[i64]]) -> Result<Self, LatticeError> {
        ApartmentPoint::new(
            coords
                .iter()
                .map(|c| LexVal::from_ints(c.iter().copied()))
                .collect(),
        )
    }

    pub fn origin(n: usize, dim: usize) -> Self {
        ApartmentPoint {
            coords: vec![LexVal::zero(dim); n],
        }
    }

    pub fn coords(&self) -> &[LexVal] {
        &self.coords
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    /// Value-group rank of the coordinates.
    pub fn dim(&self) -> usize {
        self.coords[0].dim().expect("finite")
    }

    /// The affine root `x ↦ x_j − x_i` indexed by `(i, j)`; this is the
    /// sign convention for which the fixator of `x` in the root group of
    /// `(i, j)` is `{x_{(i,j)}(c) : ω(c) ≥ −α(x)}`.
    pub fn root(&self, i: usize, j: usize) -> LexVal {
        &self.coords[j] - &self.coords[i]
    }

    /// The lattice-side root `x_i − x_j`.
    pub fn lattice_root(&self, i: usize, j: usize) -> LexVal {
        &self.coords[i] - &self.coords[j]
    }

    pub fn translate(&self, v: &[LexVal]) -> Result<Self, LatticeError> {
        ApartmentPoint::new(self.coords.iter().zip(v).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Debug for ApartmentPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cs: Vec<String> = self.coords.iter().map(ToString::to_string).collect();
        write!(f, "({})", cs.join(", "))
    }
}

/// `Σ_{i<j} |α_{i,j}(y − x)|`, the root-sum distance on the apartment.
pub fn apartment_dist_sum(x: &ApartmentPoint, y: &ApartmentPoint) -> LexVal {
    let n = x.n();
    let diff: Vec<LexVal> = (0..n).map(|i| &y.coords[i] - &x.coords[i]).collect();
    let mut acc = LexVal::zero(x.dim());
    for i in 0..n {
        for j in i + 1..n {
            acc = acc + abs_val(&(&diff[j] - &diff[i])).expect("finite");
        }
    }
    acc
}

/// Apartment coordinates of a class diagonal in the standard basis.
///
/// Any representative is accepted: row `i` of a basis of `⊕ 𝕆 x_i e_i` has
/// minimal valuation `ω(x_i)` up to a common shift, and the class is
/// diagonal exactly when dividing out those row minima leaves a
/// unimodular matrix.
pub fn psi(l: &LatticeClass) -> Result<ApartmentPoint, LatticeError> {
    let b = l.basis();
    let n = l.n();
    let ctx = l.context();
    let mut mins = Vec::with_capacity(n);
    let mut scaled = b.clone();
    for i in 0..n {
        let v = (0..n).map(|j| ctx.val(b.get(i, j))).min().expect("n >= 2");
        let mono = ctx.monomial(&v)?;
        scaled.scale_row(i, &mono.inv());
        mins.push(v);
    }
    if !ctx.is_unimodular(&scaled) {
        return Err(LatticeError::NotInApartment);
    }
    ApartmentPoint::new(mins)
}

/// The diagonal class `[⊕ 𝕆 x_{λ_i} e_i]`.
pub fn psi_inv(ctx: &ValuationContext, x: &ApartmentPoint) -> Result<LatticeClass, LatticeError> {
    if x.dim() != ctx.rank() {
        return Err(LatticeError::Dimension(x.dim(), ctx.rank()));
    }
    let entries = x
        .coords()
        .iter()
        .map(|c| ctx.monomial(c))
        .collect::<Result<Vec<_>, _>>()?;
    LatticeClass::new(*ctx, Matrix::diag(ctx.tower(), &entries))
}

/// The bounds `λ_α` of the half-apartments `{α ≥ −λ_α}` cutting out the
/// enclosure of a finite set of apartment points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfApartmentBound {
    n: usize,
    bounds: BTreeMap<(usize, usize), LexVal>,
}

impl HalfApartmentBound {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `λ_{(i,j)}`, 0-based indices.
    pub fn get(&self, i: usize, j: usize) -> Option<&LexVal> {
        self.bounds.get(&(i, j))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize), &LexVal)> {
        self.bounds.iter()
    }

    /// `α(x) ≥ −λ_α` for every root.
    pub fn contains(&self, x: &ApartmentPoint) -> bool {
        x.n() == self.n
            && self
                .bounds
                .iter()
                .all(|(&(i, j), l)| l.is_infinite() || (-x.root(i, j)) <= *l)
    }
}

pub fn enclosure(points: &[ApartmentPoint]) -> Result<HalfApartmentBound, LatticeError> {
    let first = points.first().ok_or(LatticeError::Empty)?;
    let n = first.n();
    if points.iter().any(|x| x.n() != n || x.dim() != first.dim()) {
        return Err(LatticeError::Point("points of different shapes".into()));
    }
    let mut bounds = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let l = points.iter().map(|x| -x.root(i, j)).max().unwrap();
                bounds.insert((i, j), l);
            }
        }
    }
    Ok(HalfApartmentBound { n, bounds })
}

/// `g·[L] = [g·B]` for `g ∈ SL_n(K)`.
pub fn act(g: &Matrix, l: &LatticeClass) -> Result<LatticeClass, LatticeError> {
    if !g.is_square() {
        return Err(LatticeError::NotSquare);
    }
    if g.rows() != l.n() {
        return Err(LatticeError::Dimension(g.rows(), l.n()));
    }
    if !g.det()?.is_one() {
        return Err(LatticeError::NotSpecialLinear);
    }
    act_gl(g, l)
}

/// The action of `GL_n(K)`, without the determinant check.
pub fn act_gl(g: &Matrix, l: &LatticeClass) -> Result<LatticeClass, LatticeError> {
    LatticeClass::new(l.ctx, g * &l.basis)
}
