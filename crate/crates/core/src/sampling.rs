//! Seeded random generators for field elements, group elements and lattice
//! classes. Everything here is deterministic in the seed.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::{FieldElem, Tower};
use crate::group::{root_elem, weyl_elem};
use crate::lattice::{ApartmentPoint, LatticeClass, ValuationContext};
use crate::matrix::Matrix;
use crate::ordered_values::LexVal;
use crate::projections::CoarseContext;

pub struct Sampler {
    tower: Tower,
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(tower: Tower, seed: u64) -> Self {
        Sampler {
            tower,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn tower(&self) -> Tower {
        self.tower
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn seed_for_rerun(&mut self) -> u64 {
        self.rng.gen()
    }

    fn exps(&mut self, range: i64) -> Vec<i64> {
        (0..self.tower.depth())
            .map(|_| self.rng.gen_range(-range..=range))
            .collect()
    }

    fn nonzero_const(&mut self) -> FieldElem {
        let p = self.tower.p() as i64;
        self.tower.int(self.rng.gen_range(1..p))
    }

    /// `c·x_λ` with `c ≠ 0` and `λ ∈ [−range, range]^d`.
    pub fn term(&mut self, range: i64) -> FieldElem {
        let e = self.exps(range);
        let mono = self.tower.monomial(&LexVal::from_ints(e)).unwrap();
        &self.nonzero_const() * &mono
    }

    /// A term with valuation `λ` and a random nonzero constant.
    pub fn term_with_val(&mut self, lambda: &LexVal) -> FieldElem {
        &self.nonzero_const() * &self.tower.monomial(lambda).unwrap()
    }

    /// A sum of up to `terms` terms.
    pub fn laurent(&mut self, terms: usize, range: i64) -> FieldElem {
        let k = self.rng.gen_range(0..=terms);
        (0..k).fold(self.tower.zero(), |acc, _| &acc + &self.term(range))
    }

    /// A nonzero rational function: a Laurent polynomial divided by one.
    pub fn elem(&mut self) -> FieldElem {
        let num = self.laurent(3, 3);
        let mut den = self.laurent(2, 2);
        if den.is_zero() {
            den = self.tower.one();
        }
        &num / &den
    }

    pub fn nonzero_elem(&mut self) -> FieldElem {
        loop {
            let f = self.elem();
            if !f.is_zero() {
                return f;
            }
        }
    }

    /// A value with coordinates in `[−range, range]` and `d` coordinates.
    pub fn lexval(&mut self, dim: usize, range: i64) -> LexVal {
        LexVal::from_ints((0..dim).map(|_| self.rng.gen_range(-range..=range)))
    }

    /// A value `≥ 0` in the context with small coordinates.
    pub fn nonneg_lexval(&mut self, ctx: &ValuationContext) -> LexVal {
        loop {
            let v = self.lexval(self.tower.depth(), 2);
            if ctx.val(&self.tower.monomial(&v).unwrap()).is_nonnegative() {
                return v;
            }
        }
    }

    /// A value `> 0` in the context.
    pub fn positive_lexval(&mut self, ctx: &ValuationContext) -> LexVal {
        loop {
            let v = self.lexval(self.tower.depth(), 2);
            if ctx.val(&self.tower.monomial(&v).unwrap()).is_positive() {
                return v;
            }
        }
    }

    /// An element of the valuation ring of `ctx`.
    pub fn integral(&mut self, ctx: &ValuationContext) -> FieldElem {
        let k = self.rng.gen_range(0..=3);
        let mut num = self.tower.zero();
        for _ in 0..k {
            let v = self.nonneg_lexval(ctx);
            num = &num + &self.term_with_val(&v);
        }
        if self.rng.gen_bool(0.5) {
            let v = self.positive_lexval(ctx);
            let den = &self.tower.one() + &self.term_with_val(&v);
            &num / &den
        } else {
            num
        }
    }

    /// An element of the maximal ideal of `ctx`.
    pub fn maximal_ideal(&mut self, ctx: &ValuationContext) -> FieldElem {
        let v = self.positive_lexval(ctx);
        let m = self.tower.monomial(&v).unwrap();
        &self.integral(ctx) * &m
    }

    /// A unit of the valuation ring of `ctx`.
    pub fn unit(&mut self, ctx: &ValuationContext) -> FieldElem {
        &self.nonzero_const() + &self.maximal_ideal(ctx)
    }

    fn root_pair(&mut self, n: usize) -> (usize, usize) {
        let i = self.rng.gen_range(0..n);
        let j = (i + self.rng.gen_range(1..n)) % n;
        (i, j)
    }

    /// A random generator of `SL_n(K)` with parameter valuations in
    /// `[−range, range]^d`: a root element, a Weyl element or a torus
    /// element.
    pub fn sl_generator(&mut self, n: usize, range: i64) -> Matrix {
        let (i, j) = self.root_pair(n);
        match self.rng.gen_range(0..4) {
            0 | 1 => {
                let c = &self.term(range) + &self.laurent(1, range);
                root_elem(self.tower, n, i, j, &c).unwrap()
            }
            2 => {
                let c = self.term(range);
                weyl_elem(self.tower, n, i, j, &c).unwrap()
            }
            _ => {
                let c = self.term(range);
                let mut d = vec![self.tower.one(); n];
                d[i] = c.clone();
                d[j] = c.inv();
                Matrix::diag(self.tower, &d)
            }
        }
    }

    /// A product of `1..=max_len` generators.
    pub fn sl_word(&mut self, n: usize, max_len: usize, range: i64) -> Matrix {
        let len = self.rng.gen_range(1..=max_len);
        (0..len).fold(Matrix::identity(self.tower, n), |acc, _| {
            &acc * &self.sl_generator(n, range)
        })
    }

    /// An element of `SL_n` of the valuation ring of `ctx`.
    pub fn sl_integral(&mut self, ctx: &ValuationContext, n: usize, len: usize) -> Matrix {
        let mut g = Matrix::identity(self.tower, n);
        for _ in 0..len {
            let (i, j) = self.root_pair(n);
            let factor = match self.rng.gen_range(0..4) {
                0 | 1 => {
                    let c = self.integral(ctx);
                    root_elem(self.tower, n, i, j, &c).unwrap()
                }
                2 => {
                    let c = self.unit(ctx);
                    weyl_elem(self.tower, n, i, j, &c).unwrap()
                }
                _ => {
                    let c = self.unit(ctx);
                    let mut d = vec![self.tower.one(); n];
                    d[i] = c.clone();
                    d[j] = c.inv();
                    Matrix::diag(self.tower, &d)
                }
            };
            g = &g * &factor;
        }
        g
    }

    /// An element of `SL_n` congruent to the identity modulo the maximal
    /// ideal of `ctx`.
    pub fn congruence_elem(&mut self, ctx: &ValuationContext, n: usize, len: usize) -> Matrix {
        let mut g = Matrix::identity(self.tower, n);
        for _ in 0..len {
            let (i, j) = self.root_pair(n);
            let c = self.maximal_ideal(ctx);
            g = &g * &root_elem(self.tower, n, i, j, &c).unwrap();
        }
        g
    }

    /// A monomial matrix of determinant 1.
    pub fn monomial_sl(&mut self, n: usize, range: i64) -> Matrix {
        let mut g = Matrix::identity(self.tower, n);
        for _ in 0..n + 1 {
            let (i, j) = self.root_pair(n);
            let c = self.term(range);
            let factor = if self.rng.gen_bool(0.5) {
                weyl_elem(self.tower, n, i, j, &c).unwrap()
            } else {
                let mut d = vec![self.tower.one(); n];
                d[i] = c.clone();
                d[j] = c.inv();
                Matrix::diag(self.tower, &d)
            };
            g = &g * &factor;
        }
        g
    }

    /// A random lattice class: `g·D·𝕆^n` for a short word `g` and a
    /// diagonal monomial matrix `D`.
    pub fn lattice(&mut self, ctx: &ValuationContext, n: usize) -> LatticeClass {
        let g = self.sl_word(n, 3, 2);
        let x = self.apartment_point(n, 2);
        let d: Vec<FieldElem> = x
            .coords()
            .iter()
            .map(|c| self.tower.monomial(c).unwrap())
            .collect();
        LatticeClass::new(*ctx, &g * &Matrix::diag(self.tower, &d)).unwrap()
    }

    /// A random class in the fiber of `π_{≤s}` over `base`: the basis of
    /// `base` times an element of `SL_n(𝒪)`, a diagonal of coarse units
    /// and a random scalar.
    pub fn fiber_member(&mut self, ctx: &CoarseContext, base: &LatticeClass) -> LatticeClass {
        let n = base.n();
        let g = self.sl_integral(&ctx.coarse(), n, 3);
        let d: Vec<FieldElem> = (0..n)
            .map(|_| {
                let mut e = vec![0; ctx.s()];
                e.extend((ctx.s()..self.tower.depth()).map(|_| self.rng.gen_range(-2..=2)));
                self.tower.monomial(&LexVal::from_ints(e)).unwrap()
            })
            .collect();
        let scalar = self.term(2);
        let b = &(base.basis() * &g) * &Matrix::diag(self.tower, &d);
        LatticeClass::new(ctx.fine(), b.scale(&scalar)).unwrap()
    }

    /// A point with full-rank coordinates in `[−range, range]^d`.
    pub fn apartment_point(&mut self, n: usize, range: i64) -> ApartmentPoint {
        let dim = self.tower.depth();
        let coords = (0..n).map(|_| self.lexval(dim, range)).collect();
        ApartmentPoint::new(coords).unwrap()
    }

    pub fn choose<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        items.choose(&mut self.rng).expect("nonempty")
    }

    pub fn gen_range(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn gen_bool(&mut self) -> bool {
        self.rng.gen()
    }
}
