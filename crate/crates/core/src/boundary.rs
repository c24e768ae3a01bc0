//! The `Z²`-tree of `SL_2` over `F_p(u)(t)`: ends of the fiber trees of the
//! coarse projection, boundary points `𝕆b₁ ⊕ 𝒪b₂`, the limits `lim±`,
//! gluing across adjacent fibers, the map `Υ` to edges of the coarse tree
//! and balls in a fiber tree.
//!
//! `𝕆` is the valuation ring of the full valuation, `𝒪 ⊇ 𝕆` the one of its
//! first coordinate and `ℳ = t𝒪` the maximal ideal of `𝒪`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::field::{FieldError, Tower};
use crate::lattice::{class_eq, rel_position, LatticeClass, LatticeError, ValuationContext};
use crate::matrix::Matrix;
use crate::ordered_values::LexVal;
use crate::projections::{coarsen, lift, residue_class, CoarseContext, ProjectionError};

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum BoundaryError {
    #[error("boundary constructions need n = 2 and d = 2, got n = {n}, d = {d}")]
    Unsupported { n: usize, d: usize },
    #[error("basis is degenerate")]
    Degenerate,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

fn check_basis(m: &Matrix) -> Result<(), BoundaryError> {
    if m.rows() != 2 || m.cols() != 2 || m.tower().depth() != 2 {
        return Err(BoundaryError::Unsupported {
            n: m.rows(),
            d: m.tower().depth(),
        });
    }
    match m.det() {
        Ok(d) if !d.is_zero() => Ok(()),
        _ => Err(BoundaryError::Degenerate),
    }
}

fn split(tower: Tower) -> CoarseContext {
    CoarseContext::new(tower, 1).expect("depth 2")
}

fn coarse_class(m: Matrix) -> LatticeClass {
    let ctx = split(m.tower()).coarse();
    LatticeClass::new(ctx, m).expect("checked basis")
}

fn mat(tower: Tower, rows: [[crate::FieldElem; 2]; 2]) -> Matrix {
    Matrix::from_rows(tower, rows.into_iter().map(Vec::from).collect()).expect("2x2")
}

/// The end of `T_P` containing the ray `[𝕆b₁ ⊕ 𝕆uⁿb₂]`, `n ≥ 0`, where
/// `b₁, b₂` are the columns of the basis and `P = [𝒪b₁ ⊕ 𝒪b₂]`.
#[derive(Debug, Clone)]
pub struct End {
    basis: Matrix,
}

impl End {
    pub fn new(basis: Matrix) -> Result<Self, BoundaryError> {
        check_basis(&basis)?;
        Ok(End { basis })
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn tower(&self) -> Tower {
        self.basis.tower()
    }

    /// `[𝕆b₁ ⊕ 𝕆uⁿb₂]`.
    pub fn vertex(&self, n: i64) -> LatticeClass {
        let k = self.tower();
        let d = Matrix::diag(k, &[k.one(), k.var(1).pow(n)]);
        LatticeClass::new(ValuationContext::full(k), &self.basis * &d).expect("checked basis")
    }

    /// The coarse vertex `P` whose fiber tree contains the ray.
    pub fn fiber_base(&self) -> LatticeClass {
        coarse_class(self.basis.clone())
    }
}

/// The class of the module `𝕆b₁ ⊕ 𝒪b₂` up to homothety.
#[derive(Debug, Clone)]
pub struct BoundaryPoint {
    basis: Matrix,
}

impl BoundaryPoint {
    pub fn new(basis: Matrix) -> Result<Self, BoundaryError> {
        check_basis(&basis)?;
        Ok(BoundaryPoint { basis })
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    /// `[𝒪b₁ ⊕ 𝒪b₂]`, the least `𝒪`-lattice containing the module.
    pub fn outer(&self) -> LatticeClass {
        coarse_class(self.basis.clone())
    }

    /// `[ℳb₁ ⊕ 𝒪b₂]`, the largest `𝒪`-lattice inside the module.
    pub fn inner(&self) -> LatticeClass {
        let k = self.basis.tower();
        let d = Matrix::diag(k, &[k.uniformizer(), k.one()]);
        coarse_class(&self.basis * &d)
    }
}

/// Equality of boundary points.
///
/// With `g = B₁⁻¹B₂`, the points agree iff `g·M₀ = λ·M₀` for the module
/// `M₀ = 𝕆e₁ ⊕ 𝒪e₂` and some `λ`. The endomorphism ring of `M₀` is
/// `{h : h₁₁ ∈ 𝕆, h₂₁ ∈ 𝒪, h₁₂ ∈ ℳ, h₂₂ ∈ 𝒪}`; modulo `ℳ` its elements
/// are lower triangular, so `λ` is forced to have the valuation of `g₁₁`,
/// and `h = g/λ` is then a unit of the ring iff `h₂₂ ∈ 𝒪^×`.
pub fn bp_eq(a: &BoundaryPoint, b: &BoundaryPoint) -> Result<bool, BoundaryError> {
    if a.basis.tower() != b.basis.tower() {
        return Err(LatticeError::Context.into());
    }
    let g = &a.basis.inverse().map_err(LatticeError::from)? * &b.basis;
    if g.get(0, 0).is_zero() {
        return Ok(false);
    }
    let k = g.tower();
    let h = g.scale(&k.monomial(&g.get(0, 0).val())?.inv());
    let coarse = split(k).coarse();
    Ok(coarse.is_integral(h.get(1, 0))
        && coarse.val(h.get(0, 1)).is_positive()
        && coarse.val(h.get(1, 1)).is_zero())
}

/// `lim⁻(E) = [𝕆b₁ ⊕ 𝒪tb₂]`, `lim⁺(E) = [𝒪b₁ ⊕ 𝕆b₂]`.
pub fn lim(e: &End, sign: Sign) -> BoundaryPoint {
    let k = e.tower();
    let (z, o, t) = (k.zero(), k.one(), k.uniformizer());
    let c = match sign {
        Sign::Minus => mat(k, [[o, z.clone()], [z, t]]),
        Sign::Plus => mat(k, [[z.clone(), o.clone()], [o, z]]),
    };
    BoundaryPoint {
        basis: &e.basis * &c,
    }
}

/// Ends are equal iff both of their limits are.
pub fn end_eq(a: &End, b: &End) -> Result<bool, BoundaryError> {
    Ok(bp_eq(&lim(a, Sign::Plus), &lim(b, Sign::Plus))?
        && bp_eq(&lim(a, Sign::Minus), &lim(b, Sign::Minus))?)
}

/// The end `Ẽ = E(t·b₂, b₁)` of the neighbouring fiber with
/// `lim⁺(Ẽ) = lim⁻(E)` and `lim⁻(Ẽ) = lim⁺(E)`.
pub fn glue(e: &End) -> End {
    let k = e.tower();
    let c = mat(k, [[k.zero(), k.one()], [k.uniformizer(), k.zero()]]);
    End {
        basis: &e.basis * &c,
    }
}

/// An oriented edge of the coarse tree.
#[derive(Debug, Clone)]
pub struct Edge {
    pub from: LatticeClass,
    pub to: LatticeClass,
}

impl Edge {
    pub fn same_oriented(&self, other: &Edge) -> Result<bool, BoundaryError> {
        Ok(class_eq(&self.from, &other.from)? && class_eq(&self.to, &other.to)?)
    }

    pub fn same_unoriented(&self, other: &Edge) -> Result<bool, BoundaryError> {
        Ok(self.same_oriented(other)?
            || (class_eq(&self.from, &other.to)? && class_eq(&self.to, &other.from)?))
    }

    pub fn reversed(&self) -> Edge {
        Edge {
            from: self.to.clone(),
            to: self.from.clone(),
        }
    }
}

/// The edge `[𝒪c₁ ⊕ 𝒪c₂] → [ℳc₁ ⊕ 𝒪c₂]` attached to `lim(E, sign)` for
/// `lim(E, sign) = 𝕆c₁ ⊕ 𝒪c₂`.
pub fn upsilon(e: &End, sign: Sign) -> Edge {
    edge_of(&lim(e, sign))
}

pub fn edge_of(bp: &BoundaryPoint) -> Edge {
    Edge {
        from: bp.outer(),
        to: bp.inner(),
    }
}

/// The coarse apartment edge `]n, n+1[` from `[𝒪e₁ ⊕ 𝒪tⁿe₂]` to
/// `[𝒪e₁ ⊕ 𝒪tⁿ⁺¹e₂]`.
pub fn apartment_edge(tower: Tower, n: i64) -> Edge {
    let t = tower.uniformizer();
    let at = |m: i64| coarse_class(Matrix::diag(tower, &[tower.one(), t.pow(m)]));
    Edge {
        from: at(n),
        to: at(n + 1),
    }
}

/// The boundary point `(n, ±∞)` of the standard apartment:
/// `(n, +∞) = [𝕆e₁ ⊕ 𝒪tⁿ⁺¹e₂]`, the limit of `[𝕆e₁ ⊕ 𝕆tⁿuᵐe₂]` as
/// `m → +∞`, and `(n, −∞) = [𝕆tⁿ⁻¹e₂ ⊕ 𝒪e₁]`.
pub fn apartment_boundary_point(tower: Tower, n: i64, sign: Sign) -> BoundaryPoint {
    let (z, o, t) = (tower.zero(), tower.one(), tower.uniformizer());
    let basis = match sign {
        Sign::Plus => mat(tower, [[o, z.clone()], [z, t.pow(n + 1)]]),
        Sign::Minus => mat(tower, [[z, o], [t.pow(n - 1), tower.zero()]]),
    };
    BoundaryPoint { basis }
}

/// Letter for the neighbour `B·[[u,0],[0,1]]`; letters `c < p` stand for
/// `B·[[1,0],[c,u]]`.
pub fn infinity_letter(tower: Tower) -> usize {
    tower.p() as usize
}

/// The `p + 1` neighbours of `lt` in its fiber tree, computed in the
/// residue building and lifted back, in letter order.
pub fn fiber_neighbors(lt: &LatticeClass) -> Result<Vec<LatticeClass>, BoundaryError> {
    check_basis(lt.basis())?;
    let k = lt.context().tower();
    let cc = split(k);
    if *lt.context() != cc.fine() {
        return Err(LatticeError::Context.into());
    }
    let base = coarsen(lt, &cc)?;
    let r = residue_class(lt, &base, &cc)?;
    let rk = cc.residue_tower();
    let u = rk.var(1);
    (0..=k.p() as usize)
        .map(|c| {
            let step = if c == infinity_letter(k) {
                mat(rk, [[u.clone(), rk.zero()], [rk.zero(), rk.one()]])
            } else {
                mat(rk, [[rk.one(), rk.zero()], [rk.int(c as i64), u.clone()]])
            };
            let nb = LatticeClass::new(cc.residue(), r.basis() * &step)?;
            Ok(lift(&nb, &base, &cc)?)
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct BallVertex {
    pub class: LatticeClass,
    pub depth: usize,
    pub parent: Option<usize>,
    /// Letters of the path from the centre.
    pub word: Vec<usize>,
    /// Number of pairwise distinct neighbours found.
    pub valence: usize,
}

/// A ball in a fiber tree, explored breadth first.
#[derive(Debug, Clone)]
pub struct FiberBall {
    pub radius: usize,
    pub vertices: Vec<BallVertex>,
    /// Adjacent pairs inside the ball, including any that close a cycle.
    pub edges: BTreeSet<(usize, usize)>,
}

impl FiberBall {
    pub fn is_regular(&self, valence: usize) -> bool {
        self.vertices.iter().all(|v| v.valence == valence)
    }

    /// Connected by construction, so a tree iff `|E| = |V| − 1`.
    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.vertices.len()
    }

    pub fn leaves(&self) -> impl Iterator<Item = (usize, &BallVertex)> {
        self.vertices
            .iter()
            .enumerate()
            .filter(move |(_, v)| v.depth == self.radius)
    }

    /// The end of the geodesic ray from the centre through a vertex.
    pub fn outward_end(&self, index: usize) -> End {
        let v = &self.vertices[index];
        let k = v.class.context().tower();
        let b = v.class.basis();
        let basis = if v.word.last() == Some(&infinity_letter(k)) {
            mat(
                k,
                [
                    [b.get(0, 1).clone(), b.get(0, 0).clone()],
                    [b.get(1, 1).clone(), b.get(1, 0).clone()],
                ],
            )
        } else {
            b.clone()
        };
        End { basis }
    }

    /// Label from the relative position to the centre and the path word.
    pub fn label(&self, index: usize) -> String {
        let v = &self.vertices[index];
        let k = v.class.context().tower();
        let inv = rel_position(&self.vertices[0].class, &v.class).expect("same context");
        let word: Vec<String> = v
            .word
            .iter()
            .map(|&c| {
                if c == infinity_letter(k) {
                    "inf".to_string()
                } else {
                    c.to_string()
                }
            })
            .collect();
        let inv: Vec<String> = inv.iter().map(LexVal::to_string).collect();
        format!("{} [{}]", inv.join(" "), word.join("."))
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph fiber_tree {\n  node [shape=box];\n");
        for i in 0..self.vertices.len() {
            let _ = writeln!(out, "  v{i} [label=\"{}\"];", self.label(i));
        }
        for (a, b) in &self.edges {
            let _ = writeln!(out, "  v{a} -- v{b};");
        }
        for (i, _) in self.leaves() {
            let e = self.outward_end(i);
            let to = upsilon(&e, Sign::Plus).to;
            let _ = writeln!(
                out,
                "  end{i} [shape=point];\n  v{i} -- end{i} [style=dashed, label=\"Upsilon+ to {:?}\"];",
                to.basis()
            );
        }
        out.push_str("}\n");
        out
    }
}

/// The ball of the given radius around `center` in its fiber tree.
pub fn fiber_ball(center: &LatticeClass, radius: usize) -> Result<FiberBall, BoundaryError> {
    check_basis(center.basis())?;
    let mut vertices = vec![BallVertex {
        class: center.clone(),
        depth: 0,
        parent: None,
        word: Vec::new(),
        valence: 0,
    }];
    let mut edges = BTreeSet::new();
    let mut next = 0;
    while next < vertices.len() {
        let nbs = fiber_neighbors(&vertices[next].class)?;
        let mut distinct: Vec<&LatticeClass> = Vec::new();
        for nb in &nbs {
            if !distinct.iter().any(|d| class_eq(d, nb).unwrap_or(false)) {
                distinct.push(nb);
            }
        }
        vertices[next].valence = distinct.len();
        for (letter, nb) in nbs.iter().enumerate() {
            let mut found = None;
            for (j, v) in vertices.iter().enumerate() {
                if class_eq(&v.class, nb)? {
                    found = Some(j);
                    break;
                }
            }
            match found {
                Some(j) if j != next => {
                    edges.insert((next.min(j), next.max(j)));
                }
                Some(_) => {}
                None if vertices[next].depth < radius => {
                    let mut word = vertices[next].word.clone();
                    word.push(letter);
                    let j = vertices.len();
                    vertices.push(BallVertex {
                        class: nb.clone(),
                        depth: vertices[next].depth + 1,
                        parent: Some(next),
                        word,
                        valence: 0,
                    });
                    edges.insert((next, j));
                }
                None => {}
            }
        }
        next += 1;
    }
    Ok(FiberBall {
        radius,
        vertices,
        edges,
    })
}
