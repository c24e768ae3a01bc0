//! Dense matrices over one level of the field tower.

use std::fmt;
use std::ops::Mul;

use crate::field::{FieldElem, Tower};
use crate::ordered_values::LexVal;

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("matrix is singular")]
    Singular,
    #[error("shape mismatch: {0}x{1} vs {2}x{3}")]
    Shape(usize, usize, usize, usize),
    #[error("matrix is not square")]
    NotSquare,
    #[error("ragged rows")]
    Ragged,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    tower: Tower,
    rows: usize,
    cols: usize,
    data: Vec<FieldElem>,
}

impl Matrix {
    pub fn zeros(tower: Tower, rows: usize, cols: usize) -> Self {
        Matrix {
            tower,
            rows,
            cols,
            data: vec![tower.zero(); rows * cols],
        }
    }

    pub fn identity(tower: Tower, n: usize) -> Self {
        let mut m = Matrix::zeros(tower, n, n);
        for i in 0..n {
            m.data[i * n + i] = tower.one();
        }
        m
    }

    pub fn diag(tower: Tower, entries: &[FieldElem]) -> Self {
        let n = entries.len();
        let mut m = Matrix::zeros(tower, n, n);
        for (i, e) in entries.iter().enumerate() {
            m.data[i * n + i] = e.clone();
        }
        m
    }

    pub fn from_rows(tower: Tower, rows: Vec<Vec<FieldElem>>) -> Result<Self, MatrixError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(MatrixError::Ragged);
        }
        Ok(Matrix {
            tower,
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds a matrix from text entries, e.g. `&[&["1", "t"], &["0", "1"]]`.
    pub fn parse(tower: Tower, rows: &[&[&str]]) -> Result<Self, crate::field::FieldError> {
        let rows = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|s| tower.parse(s))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Matrix::from_rows(tower, rows).expect("rows of a slice literal"))
    }

    /// Column matrix with the given entries.
    pub fn column(tower: Tower, entries: &[FieldElem]) -> Self {
        Matrix {
            tower,
            rows: entries.len(),
            cols: 1,
            data: entries.to_vec(),
        }
    }

    pub fn from_columns(tower: Tower, cols: &[Matrix]) -> Result<Self, MatrixError> {
        let n = cols.first().map_or(0, |c| c.rows);
        let mut m = Matrix::zeros(tower, n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            if c.rows != n || c.cols != 1 {
                return Err(MatrixError::Shape(c.rows, c.cols, n, 1));
            }
            for i in 0..n {
                m.set(i, j, c.get(i, 0).clone());
            }
        }
        Ok(m)
    }

    pub fn tower(&self) -> Tower {
        self.tower
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &FieldElem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column_at(&self, j: usize) -> Matrix {
        let entries: Vec<_> = (0..self.rows).map(|i| self.get(i, j).clone()).collect();
        Matrix::column(self.tower, &entries)
    }

    pub fn entries(&self) -> impl Iterator<Item = &FieldElem> {
        self.data.iter()
    }

    pub fn to_rows(&self) -> Vec<Vec<FieldElem>> {
        self.data
            .chunks(self.cols.max(1))
            .map(<[_]>::to_vec)
            .collect()
    }

    /// Applies `f` entrywise, producing a matrix over `tower`.
    pub fn try_map<E>(
        &self,
        tower: Tower,
        f: impl Fn(&FieldElem) -> Result<FieldElem, E>,
    ) -> Result<Matrix, E> {
        Ok(Matrix {
            tower,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect::<Result<_, _>>()?,
        })
    }

    pub fn scale(&self, c: &FieldElem) -> Matrix {
        Matrix {
            data: self.data.iter().map(|x| x * c).collect(),
            ..self.clone()
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut m = Matrix::zeros(self.tower, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn checked_mul(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        if self.cols != other.rows {
            return Err(MatrixError::Shape(
                self.rows, self.cols, other.rows, other.cols,
            ));
        }
        let mut m = Matrix::zeros(self.tower, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = m.get(i, j) + &(a * b);
                        m.set(i, j, v);
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
            ..self.clone()
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
            ..self.clone()
        }
    }

    /// `row[dst] += c · row[src]`.
    pub fn add_row_multiple(&mut self, dst: usize, src: usize, c: &FieldElem) {
        if c.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let s = self.get(src, j);
            if !s.is_zero() {
                let v = self.get(dst, j) + &(c * s);
                self.set(dst, j, v);
            }
        }
    }

    /// `col[dst] += c · col[src]`.
    pub fn add_col_multiple(&mut self, dst: usize, src: usize, c: &FieldElem) {
        if c.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let s = self.get(i, src);
            if !s.is_zero() {
                let v = self.get(i, dst) + &(c * s);
                self.set(i, dst, v);
            }
        }
    }

    pub fn scale_row(&mut self, i: usize, c: &FieldElem) {
        for j in 0..self.cols {
            let v = self.get(i, j) * c;
            self.set(i, j, v);
        }
    }

    pub fn scale_col(&mut self, j: usize, c: &FieldElem) {
        for i in 0..self.rows {
            let v = self.get(i, j) * c;
            self.set(i, j, v);
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    pub fn det(&self) -> Result<FieldElem, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare);
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = self.tower.one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !a.get(r, c).is_zero()) else {
                return Ok(self.tower.zero());
            };
            if p != c {
                a.swap_rows(p, c);
                det = -&det;
            }
            let pivot = a.get(c, c).clone();
            det = &det * &pivot;
            let inv = pivot.inv();
            for r in c + 1..n {
                if !a.get(r, c).is_zero() {
                    let f = -&(a.get(r, c) * &inv);
                    a.add_row_multiple(r, c, &f);
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<Matrix, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare);
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(self.tower, n);
        for c in 0..n {
            let p = (c..n)
                .find(|&r| !a.get(r, c).is_zero())
                .ok_or(MatrixError::Singular)?;
            a.swap_rows(p, c);
            inv.swap_rows(p, c);
            let pinv = a.get(c, c).inv();
            a.scale_row(c, &pinv);
            inv.scale_row(c, &pinv);
            for r in 0..n {
                if r != c && !a.get(r, c).is_zero() {
                    let f = -a.get(r, c);
                    a.add_row_multiple(r, c, &f);
                    inv.add_row_multiple(r, c, &f);
                }
            }
        }
        Ok(inv)
    }

    /// Entry valuations, row major.
    pub fn valuations(&self) -> Vec<LexVal> {
        self.data.iter().map(FieldElem::val).collect()
    }

    /// Smallest entry valuation (∞ for the zero matrix).
    pub fn min_val(&self) -> LexVal {
        self.data
            .iter()
            .map(FieldElem::val)
            .min()
            .unwrap_or(LexVal::Infinite)
    }

    /// True if every entry has nonnegative valuation.
    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.val().is_nonnegative())
    }

    /// Exactly one nonzero entry in each row and each column.
    pub fn is_monomial_shape(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols)
                    .filter(|&j| !self.get(i, j).is_zero())
                    .count()
                    == 1
            })
            && (0..self.cols).all(|j| {
                (0..self.rows)
                    .filter(|&i| !self.get(i, j).is_zero())
                    .count()
                    == 1
            })
    }

    pub fn is_diagonal(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn is_identity(&self) -> bool {
        self.is_diagonal() && (0..self.rows).all(|i| self.get(i, i).is_one())
    }

    pub fn is_upper_unitriangular(&self) -> bool {
        self.is_square()
            && (0..self.rows)
                .all(|i| self.get(i, i).is_one() && (0..i).all(|j| self.get(i, j).is_zero()))
    }

    pub fn is_lower_unitriangular(&self) -> bool {
        self.transpose().is_upper_unitriangular()
    }

    /// Largest polynomial degree among the entries.
    pub fn degree(&self) -> usize {
        self.data.iter().map(FieldElem::degree).max().unwrap_or(0)
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        self.checked_mul(rhs).expect("matrix shapes")
    }
}

impl Mul for Matrix {
    type Output = Matrix;

    fn mul(self, rhs: Matrix) -> Matrix {
        &self * &rhs
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .to_rows()
            .iter()
            .map(|r| {
                let cells: Vec<String> = r.iter().map(|x| self.tower.format(x)).collect();
                format!("[{}]", cells.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}
