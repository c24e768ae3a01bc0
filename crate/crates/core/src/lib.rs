//! Exact arithmetic for the lattice model of the Λ-building of `SL_n` over
//! `K_d = F_p(u_1)...(u_d)` with its lexicographic `Z^d` valuation.

pub mod boundary;
pub mod field;
pub mod group;
pub mod json;
pub mod lattice;
pub mod matrix;
pub mod ordered_values;
pub mod projections;
pub mod sampling;
pub mod verify;

pub use field::{FieldElem, FieldError, FieldOp, Tower};
pub use ordered_values::{LexVal, ProjectionMode, ValueError};

/// Any error of the crate, tagged with the module it came from.
#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Values(#[from] ValueError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Lattice(#[from] lattice::LatticeError),
    #[error(transparent)]
    Group(#[from] group::GroupError),
    #[error(transparent)]
    Projection(#[from] projections::ProjectionError),
    #[error(transparent)]
    Boundary(#[from] boundary::BoundaryError),
}

impl Error {
    pub fn module(&self) -> &'static str {
        match self {
            Error::Values(_) => "ordered_values",
            Error::Field(_) => "valued_field",
            Error::Lattice(_) => "lattice_building",
            Error::Group(_) => "group_algorithms",
            Error::Projection(_) => "projections",
            Error::Boundary(_) => "sl2_boundary",
        }
    }
}

impl From<matrix::MatrixError> for Error {
    fn from(e: matrix::MatrixError) -> Self {
        Error::Lattice(e.into())
    }
}
