//! JSON records for the command line. Field elements are text in the
//! element grammar, values are `"(a,b)"` strings, permutations are 1-based.

use serde::{Deserialize, Serialize};

use crate::field::{FieldError, Tower};
use crate::group::{AffineWeylElem, GroupError};
use crate::lattice::{ApartmentPoint, LatticeClass, LatticeError, ValuationContext};
use crate::matrix::Matrix;
use crate::ordered_values::LexVal;

/// `{"rank": d, "coarse": s}`; `coarse` is omitted for the full valuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextTag {
    pub rank: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coarse: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRecord {
    pub n: usize,
    pub basis: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context: Option<ContextTag>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointRecord {
    pub coords: Vec<LexVal>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeylRecord {
    pub perm: Vec<usize>,
    pub trans: Vec<LexVal>,
}

pub fn matrix_rows(m: &Matrix) -> Vec<Vec<String>> {
    m.to_rows()
        .iter()
        .map(|r| r.iter().map(|x| m.tower().format(x)).collect())
        .collect()
}

pub fn parse_matrix(tower: Tower, rows: &[Vec<String>]) -> Result<Matrix, LatticeError> {
    let parsed = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|s| tower.parse(s))
                .collect::<Result<Vec<_>, FieldError>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Matrix::from_rows(tower, parsed)?)
}

pub fn context_tag(ctx: &ValuationContext) -> ContextTag {
    ContextTag {
        rank: ctx.tower().depth(),
        coarse: (!ctx.is_full()).then_some(ctx.rank()),
    }
}

pub fn class_record(l: &LatticeClass) -> ClassRecord {
    ClassRecord {
        n: l.n(),
        basis: matrix_rows(l.basis()),
        context: Some(context_tag(l.context())),
    }
}

/// Reads a class, using `default` when the record has no context tag;
/// `tower_at` builds the tower of a given depth.
pub fn read_class(
    rec: &ClassRecord,
    default: ContextTag,
    tower_at: impl Fn(usize) -> Result<Tower, FieldError>,
) -> Result<LatticeClass, LatticeError> {
    let tag = rec.context.unwrap_or(default);
    let tower = tower_at(tag.rank)?;
    let ctx = ValuationContext::new(tower, tag.coarse.unwrap_or(tag.rank))?;
    let basis = parse_matrix(tower, &rec.basis)?;
    if basis.rows() != rec.n {
        return Err(LatticeError::Dimension(basis.rows(), rec.n));
    }
    LatticeClass::new(ctx, basis)
}

pub fn point_record(x: &ApartmentPoint) -> PointRecord {
    PointRecord {
        coords: x.coords().to_vec(),
    }
}

pub fn read_point(rec: &PointRecord) -> Result<ApartmentPoint, LatticeError> {
    ApartmentPoint::new(rec.coords.clone())
}

pub fn weyl_record(w: &AffineWeylElem) -> WeylRecord {
    WeylRecord {
        perm: w.perm().iter().map(|i| i + 1).collect(),
        trans: w.trans().to_vec(),
    }
}

pub fn read_weyl(rec: &WeylRecord) -> Result<AffineWeylElem, GroupError> {
    if rec.perm.contains(&0) {
        return Err(GroupError::Shape);
    }
    AffineWeylElem::new(rec.perm.iter().map(|i| i - 1).collect(), rec.trans.clone())
}
