//! The projection `π_{≤s}` from the building of `ω` to the building of the
//! coarsening `ω₁ = ω_{≤s}`, and the identification of its fibers with the
//! building of the residue field `𝒦₁ = 𝒪/ℳ` under the finer part `ω₀`.
//!
//! `𝒦₁` is the tower obtained by dropping the `s` coarsest letters; the
//! residue map evaluates those letters at `0`, and the inclusion of the
//! smaller tower is a section of it.

use crate::field::{FieldError, Tower};
use crate::lattice::{class_eq, LatticeClass, LatticeError, ValuationContext};

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum ProjectionError {
    #[error("split index {s} must satisfy 1 <= s < {depth}")]
    SplitIndex { s: usize, depth: usize },
    #[error("class is in the wrong valuation context")]
    Context,
    #[error("class is not in the fiber over the base")]
    NotInFiber,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Splits `Λ = Z^d` as `Λ₁ × Λ₀`, `Λ₁` the first `s` coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CoarseContext {
    tower: Tower,
    s: usize,
}

impl CoarseContext {
    pub fn new(tower: Tower, s: usize) -> Result<Self, ProjectionError> {
        if s == 0 || s >= tower.depth() {
            return Err(ProjectionError::SplitIndex {
                s,
                depth: tower.depth(),
            });
        }
        Ok(CoarseContext { tower, s })
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn tower(&self) -> Tower {
        self.tower
    }

    /// The context of `ω`.
    pub fn fine(&self) -> ValuationContext {
        ValuationContext::full(self.tower)
    }

    /// The context of `ω₁`.
    pub fn coarse(&self) -> ValuationContext {
        ValuationContext::new(self.tower, self.s).expect("checked in new")
    }

    /// `𝒦₁` as a tower of depth `d − s`.
    pub fn residue_tower(&self) -> Tower {
        self.tower.residue_tower(self.s)
    }

    /// `(𝒦₁, ω₀)`.
    pub fn residue(&self) -> ValuationContext {
        ValuationContext::full(self.residue_tower())
    }

    fn expect(&self, l: &LatticeClass, ctx: ValuationContext) -> Result<(), ProjectionError> {
        if *l.context() == ctx {
            Ok(())
        } else {
            Err(ProjectionError::Context)
        }
    }
}

/// `π([L]) = [𝒪·L]`.
pub fn coarsen(l: &LatticeClass, ctx: &CoarseContext) -> Result<LatticeClass, ProjectionError> {
    ctx.expect(l, ctx.fine())?;
    Ok(l.with_context(ctx.coarse())?)
}

pub fn in_fiber(
    lt: &LatticeClass,
    base: &LatticeClass,
    ctx: &CoarseContext,
) -> Result<bool, ProjectionError> {
    ctx.expect(base, ctx.coarse())?;
    Ok(class_eq(&coarsen(lt, ctx)?, base)?)
}

/// `Res_L([L̃]) = [a·L̃ / ℳL]`, written in the basis of `L`.
///
/// With `M = B_L⁻¹·B_L̃` and `a` the monomial of coarse valuation `−μ`,
/// `μ` the least coarse valuation of an entry of `M`, the matrix `a·M`
/// lies in `GL_n(𝒪)` and its entrywise residue spans the image.
pub fn residue_class(
    lt: &LatticeClass,
    base: &LatticeClass,
    ctx: &CoarseContext,
) -> Result<LatticeClass, ProjectionError> {
    if !in_fiber(lt, base, ctx)? {
        return Err(ProjectionError::NotInFiber);
    }
    let m = &base.basis().inverse().map_err(LatticeError::from)? * lt.basis();
    let mu = ctx.coarse().min_val(&m);
    let a = ctx.tower.monomial(&-mu)?;
    let reduced = m
        .scale(&a)
        .try_map(ctx.residue_tower(), |x| x.residue_n(ctx.s))?;
    Ok(LatticeClass::new(ctx.residue(), reduced)?)
}

/// The section of [`residue_class`] over `L`: the basis of `R` is read in
/// `K` through the inclusion of `𝒦₁` and multiplied into the basis of `L`.
pub fn lift(
    r: &LatticeClass,
    base: &LatticeClass,
    ctx: &CoarseContext,
) -> Result<LatticeClass, ProjectionError> {
    ctx.expect(r, ctx.residue())?;
    ctx.expect(base, ctx.coarse())?;
    if r.n() != base.n() {
        return Err(LatticeError::Dimension(r.n(), base.n()).into());
    }
    let depth = ctx.tower.depth();
    let up = r
        .basis()
        .try_map(ctx.tower, |x| Ok::<_, FieldError>(x.embed(depth)))?;
    Ok(LatticeClass::new(ctx.fine(), base.basis() * &up)?)
}
