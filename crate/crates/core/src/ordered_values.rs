//! The value group `Z^d` with lexicographic order, extended by `∞`.
//!
//! Coordinate `0` is the coarsest one: for the two-local field
//! `F_p(u)(t)` the valuation of `t^a u^b` is `(a, b)`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Errors raised by value-group operations.
#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum ValueError {
    #[error("value dimensions differ: {0} vs {1}")]
    Dimension(usize, usize),
    #[error("projection index {index} out of range 1..={dim}")]
    Index { index: usize, dim: usize },
    #[error("operation undefined on infinity")]
    Infinite,
    #[error("cannot parse value {0:?}")]
    Parse(String),
}

/// Which truncation of the value group a projection keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionMode {
    /// Keep the first `s` coordinates.
    UpTo,
    /// Keep the first `s - 1` coordinates.
    Below,
}

/// An element of `Z^d ∪ {∞}`.
///
/// The derived order compares finite values lexicographically and puts `∞`
/// above everything. Values of different dimensions still compare (so the
/// type is `Ord`), but the result is meaningless; use [`lex_cmp`] when the
/// dimensions are not known to agree.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum LexVal {
    Finite(Vec<BigInt>),
    Infinite,
}

impl LexVal {
    pub fn zero(dim: usize) -> Self {
        LexVal::Finite(vec![BigInt::zero(); dim])
    }

    pub fn from_ints<I: IntoIterator<Item = i64>>(coords: I) -> Self {
        LexVal::Finite(coords.into_iter().map(BigInt::from).collect())
    }

    /// The `i`-th unit vector of `Z^dim`.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut c = vec![BigInt::zero(); dim];
        c[i] = BigInt::from(1);
        LexVal::Finite(c)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, LexVal::Infinite)
    }

    pub fn coords(&self) -> Option<&[BigInt]> {
        match self {
            LexVal::Finite(c) => Some(c),
            LexVal::Infinite => None,
        }
    }

    /// Coordinates as machine integers; `None` for `∞` or on overflow.
    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        self.coords()?
            .iter()
            .map(|c| i64::try_from(c).ok())
            .collect()
    }

    pub fn dim(&self) -> Option<usize> {
        self.coords().map(|c| c.len())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, LexVal::Finite(c) if c.iter().all(Zero::is_zero))
    }

    /// Strictly below zero in the lexicographic order.
    pub fn is_negative(&self) -> bool {
        match self {
            LexVal::Finite(c) => c
                .iter()
                .find(|x| !x.is_zero())
                .is_some_and(|x| x.is_negative()),
            LexVal::Infinite => false,
        }
    }

    pub fn is_positive(&self) -> bool {
        !self.is_negative() && !self.is_zero()
    }

    pub fn is_nonnegative(&self) -> bool {
        !self.is_negative()
    }

    /// Multiplication by an integer; `n · ∞ = ∞` for `n > 0`.
    pub fn scale(&self, n: i64) -> Result<LexVal, ValueError> {
        match self {
            LexVal::Finite(c) => Ok(LexVal::Finite(c.iter().map(|x| x * n).collect())),
            LexVal::Infinite if n > 0 => Ok(LexVal::Infinite),
            LexVal::Infinite => Err(ValueError::Infinite),
        }
    }

    /// Checked sum; `a + ∞ = ∞`.
    pub fn checked_add(&self, other: &LexVal) -> Result<LexVal, ValueError> {
        match (self, other) {
            (LexVal::Finite(a), LexVal::Finite(b)) => {
                if a.len() != b.len() {
                    return Err(ValueError::Dimension(a.len(), b.len()));
                }
                Ok(LexVal::Finite(
                    a.iter().zip(b).map(|(x, y)| x + y).collect(),
                ))
            }
            _ => Ok(LexVal::Infinite),
        }
    }

    /// Appends the coordinates of `tail`; both must be finite.
    pub fn concat(&self, tail: &LexVal) -> LexVal {
        match (self, tail) {
            (LexVal::Finite(a), LexVal::Finite(b)) => {
                LexVal::Finite(a.iter().chain(b.iter()).cloned().collect())
            }
            _ => LexVal::Infinite,
        }
    }

    /// Pads a finite value with trailing zeros up to `dim` coordinates.
    pub fn pad_to(&self, dim: usize) -> LexVal {
        match self {
            LexVal::Finite(c) => {
                let mut c = c.clone();
                c.resize(dim, BigInt::zero());
                LexVal::Finite(c)
            }
            LexVal::Infinite => LexVal::Infinite,
        }
    }

    /// Keeps the first `k` coordinates without range checks.
    pub(crate) fn truncate(&self, k: usize) -> LexVal {
        match self {
            LexVal::Finite(c) => LexVal::Finite(c[..k.min(c.len())].to_vec()),
            LexVal::Infinite => LexVal::Infinite,
        }
    }
}

/// Lexicographic comparison with a dimension check.
pub fn lex_cmp(a: &LexVal, b: &LexVal) -> Result<Ordering, ValueError> {
    if let (Some(da), Some(db)) = (a.dim(), b.dim()) {
        if da != db {
            return Err(ValueError::Dimension(da, db));
        }
    }
    Ok(a.cmp(b))
}

/// Projection onto the first `s` (or `s - 1`) coordinates.
pub fn project(a: &LexVal, s: usize, mode: ProjectionMode) -> Result<LexVal, ValueError> {
    if let Some(dim) = a.dim() {
        if s == 0 || s > dim {
            return Err(ValueError::Index { index: s, dim });
        }
    } else if s == 0 {
        return Err(ValueError::Index { index: s, dim: 0 });
    }
    let keep = match mode {
        ProjectionMode::UpTo => s,
        ProjectionMode::Below => s - 1,
    };
    Ok(a.truncate(keep))
}

/// `|a| = max(a, -a)`.
pub fn abs_val(a: &LexVal) -> Result<LexVal, ValueError> {
    match a {
        LexVal::Infinite => Err(ValueError::Infinite),
        _ if a.is_negative() => Ok(-a.clone()),
        _ => Ok(a.clone()),
    }
}

impl Add for LexVal {
    type Output = LexVal;

    /// Panics on mismatched dimensions; see [`LexVal::checked_add`].
    fn add(self, rhs: LexVal) -> LexVal {
        self.checked_add(&rhs)
            .expect("adding values of different dimension")
    }
}

impl<'a> Add<&'a LexVal> for &'a LexVal {
    type Output = LexVal;

    fn add(self, rhs: &LexVal) -> LexVal {
        self.checked_add(rhs)
            .expect("adding values of different dimension")
    }
}

impl Neg for LexVal {
    type Output = LexVal;

    /// Panics on `∞`, which has no negative.
    fn neg(self) -> LexVal {
        match self {
            LexVal::Finite(c) => LexVal::Finite(c.into_iter().map(|x| -x).collect()),
            LexVal::Infinite => panic!("negating infinity"),
        }
    }
}

impl Sub for LexVal {
    type Output = LexVal;

    fn sub(self, rhs: LexVal) -> LexVal {
        self + (-rhs)
    }
}

impl<'a> Sub<&'a LexVal> for &'a LexVal {
    type Output = LexVal;

    fn sub(self, rhs: &LexVal) -> LexVal {
        self + &(-rhs.clone())
    }
}

impl fmt::Display for LexVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LexVal::Infinite => write!(f, "inf"),
            LexVal::Finite(c) => {
                write!(f, "(")?;
                for (i, x) in c.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl FromStr for LexVal {
    type Err = ValueError;

    /// Accepts `(a1,...,ad)` and `inf`; whitespace is ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact == "inf" || compact == "∞" {
            return Ok(LexVal::Infinite);
        }
        let inner = compact
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| ValueError::Parse(s.to_string()))?;
        if inner.is_empty() {
            return Ok(LexVal::Finite(Vec::new()));
        }
        inner
            .split(',')
            .map(|x| {
                x.parse::<BigInt>()
                    .map_err(|_| ValueError::Parse(s.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(LexVal::Finite)
    }
}

impl Serialize for LexVal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for LexVal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
