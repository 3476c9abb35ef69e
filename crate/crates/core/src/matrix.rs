//! Dense exact matrices over a single [`Field`].
//!
//! Prime-field elimination runs on raw `u64` residues; rational elimination
//! works on arbitrary-precision fractions. Both paths pivot on the first
//! nonzero entry in column order, so results are canonical.

use std::fmt;
use std::ops::{Index, IndexMut};

use thiserror::Error;

use crate::field::{Field, FieldError, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrices over different fields: {0} and {1}")]
    FieldMismatch(Field, Field),
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("entry count {found} does not match {rows}x{cols}")]
    EntryCount {
        rows: usize,
        cols: usize,
        found: usize,
    },
    #[error("block ({0},{1}) has the wrong shape: {2}")]
    BlockShape(usize, usize, String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("internal check failed: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    entries: Vec<Scalar>,
}

/// Reduced row-echelon form together with its pivot data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub matrix: Matrix,
    pub rank: usize,
    pub pivot_cols: Vec<usize>,
}

impl Matrix {
    pub fn new(field: Field, rows: usize, cols: usize, entries: Vec<Scalar>) -> Result<Self, MatrixError> {
        if entries.len() != rows * cols {
            return Err(MatrixError::EntryCount {
                rows,
                cols,
                found: entries.len(),
            });
        }
        if let Some(bad) = entries.iter().find(|e| e.field() != field) {
            return Err(FieldError::FieldMismatch {
                expected: field,
                found: bad.field(),
            }
            .into());
        }
        Ok(Matrix {
            field,
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            entries: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        Self::scalar(field, n, &field.one())
    }

    pub fn scalar(field: Field, n: usize, c: &Scalar) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m[(i, i)] = c.clone();
        }
        m
    }

    pub fn from_fn(field: Field, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let e = f(i, j);
                assert_eq!(e.field(), field, "entry outside the matrix field");
                entries.push(e);
            }
        }
        Matrix {
            field,
            rows,
            cols,
            entries,
        }
    }

    /// Builds a matrix from integer rows, reducing into `field`.
    pub fn from_i64_rows<R: AsRef<[i64]>>(field: Field, rows: &[R]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        assert!(rows.iter().all(|row| row.as_ref().len() == c), "ragged rows");
        Self::from_fn(field, r, c, |i, j| field.from_i64(rows[i].as_ref()[j]))
    }

    pub fn diagonal(field: Field, diag: &[Scalar]) -> Self {
        let mut m = Self::zeros(field, diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = d.clone();
        }
        m
    }

    /// Column vector.
    pub fn column(field: Field, v: &[Scalar]) -> Self {
        Self::from_fn(field, v.len(), 1, |i, _| v[i].clone())
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Scalar::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = &self[(i, j)];
                    if i == j {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    fn same_field(&self, other: &Matrix) -> Result<(), MatrixError> {
        if self.field != other.field {
            return Err(MatrixError::FieldMismatch(self.field, other.field));
        }
        Ok(())
    }

    fn require_square(&self) -> Result<usize, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare(self.rows, self.cols));
        }
        Ok(self.rows)
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        self.same_field(other)?;
        if self.cols != other.rows {
            return Err(MatrixError::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (n, k, m) = (self.rows, self.cols, other.cols);
        if let Some(p) = self.field.modulus() {
            let a = self.residues();
            let b = other.residues();
            let mut out = vec![0u64; n * m];
            for i in 0..n {
                for t in 0..k {
                    let x = a[i * k + t];
                    if x == 0 {
                        continue;
                    }
                    for j in 0..m {
                        out[i * m + j] = (out[i * m + j] + x * b[t * m + j]) % p;
                    }
                }
            }
            return Ok(Self::from_residues(p, n, m, &out));
        }
        let mut out = Matrix::zeros(self.field, n, m);
        for i in 0..n {
            for t in 0..k {
                let x = &self.entries[i * k + t];
                if x.is_zero() {
                    continue;
                }
                for j in 0..m {
                    let prod = x * &other.entries[t * m + j];
                    out.entries[i * m + j] = &out.entries[i * m + j] + &prod;
                }
            }
        }
        Ok(out)
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> Result<Matrix, MatrixError> {
        self.same_field(other)?;
        if self.shape() != other.shape() {
            return Err(MatrixError::Dimension(format!(
                "shapes {:?} and {:?} differ",
                self.shape(),
                other.shape()
            )));
        }
        Ok(Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        assert_eq!(c.field(), self.field, "scalar outside the matrix field");
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * c).collect(),
        }
    }

    /// `a·self + b·other`.
    pub fn lin_comb(&self, a: &Scalar, other: &Matrix, b: &Scalar) -> Result<Matrix, MatrixError> {
        self.zip_with(other, |x, y| &(a * x) + &(b * y))
    }

    /// `self·other - other·self`.
    pub fn commutator(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        self.matmul(other)?.sub(&other.matmul(self)?)
    }

    pub fn commutes_with(&self, other: &Matrix) -> Result<bool, MatrixError> {
        Ok(self.commutator(other)?.is_zero())
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.field, self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn pow(&self, k: u32) -> Result<Matrix, MatrixError> {
        let n = self.require_square()?;
        let mut acc = Matrix::identity(self.field, n);
        for _ in 0..k {
            acc = acc.matmul(self)?;
        }
        Ok(acc)
    }

    /// Copy of the `rows x cols` window starting at `(r0, c0)`.
    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Result<Matrix, MatrixError> {
        if r0 + rows > self.rows || c0 + cols > self.cols {
            return Err(MatrixError::Dimension(format!(
                "window {rows}x{cols} at ({r0},{c0}) exceeds {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(Matrix::from_fn(self.field, rows, cols, |i, j| self[(r0 + i, c0 + j)].clone()))
    }

    /// Block-diagonal sum of square or rectangular blocks.
    pub fn direct_sum(field: Field, blocks: &[&Matrix]) -> Result<Matrix, MatrixError> {
        let mut grid = BlockGrid::new(
            field,
            blocks.iter().map(|b| b.rows).collect(),
            blocks.iter().map(|b| b.cols).collect(),
        );
        for (i, b) in blocks.iter().enumerate() {
            grid.set(i, i, (*b).clone())?;
        }
        grid.assemble()
    }

    /// Row-major entries flattened into a single vector (the `vec` of the matrix).
    pub fn to_vector(&self) -> Vec<Scalar> {
        self.entries.clone()
    }

    fn residues(&self) -> Vec<u64> {
        self.entries
            .iter()
            .map(|e| e.residue().expect("prime-field entry"))
            .collect()
    }

    fn from_residues(p: u64, rows: usize, cols: usize, data: &[u64]) -> Matrix {
        Matrix {
            field: Field::Prime { p },
            rows,
            cols,
            entries: data.iter().map(|&value| Scalar::Mod { value, p }).collect(),
        }
    }

    /// Reduced row-echelon form (unique), rank and pivot columns.
    pub fn rref(&self) -> Rref {
        if let Some(p) = self.field.modulus() {
            let mut data = self.residues();
            let pivot_cols = rref_mod(&mut data, self.rows, self.cols, p);
            return Rref {
                matrix: Self::from_residues(p, self.rows, self.cols, &data),
                rank: pivot_cols.len(),
                pivot_cols,
            };
        }
        self.rref_generic()
    }

    /// Field-agnostic elimination on `Scalar`s. The prime-field fast path must
    /// agree with it exactly.
    pub fn rref_generic(&self) -> Rref {
        let mut m = self.clone();
        let (rows, cols) = (m.rows, m.cols);
        let mut pivot_cols = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(piv) = (r..rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, piv);
            let inv = m[(r, c)].inv().expect("pivot is nonzero");
            for j in c..cols {
                m[(r, j)] = &m[(r, j)] * &inv;
            }
            for i in 0..rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let factor = m[(i, c)].clone();
                for j in c..cols {
                    let delta = &factor * &m[(r, j)];
                    m[(i, j)] = &m[(i, j)] - &delta;
                }
            }
            pivot_cols.push(c);
            r += 1;
        }
        Rref {
            rank: pivot_cols.len(),
            matrix: m,
            pivot_cols,
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Basis of the right kernel `{v : self·v = 0}`. One vector per free column,
    /// in increasing column order, with a 1 in its own free position and 0 in
    /// the other free positions.
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        let Rref {
            matrix: r,
            pivot_cols,
            ..
        } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivot_cols {
            is_pivot[c] = true;
        }
        (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = vec![self.field.zero(); self.cols];
                v[f] = self.field.one();
                for (i, &pc) in pivot_cols.iter().enumerate() {
                    v[pc] = -&r[(i, f)];
                }
                v
            })
            .collect()
    }

    /// Solves `self·x = b` for one column `b`; `None` when inconsistent.
    pub fn solve(&self, b: &[Scalar]) -> Result<Option<Vec<Scalar>>, MatrixError> {
        if b.len() != self.rows {
            return Err(MatrixError::Dimension(format!(
                "right-hand side has length {}, expected {}",
                b.len(),
                self.rows
            )));
        }
        let aug = Matrix::from_fn(self.field, self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                b[i].clone()
            }
        });
        let Rref {
            matrix: r,
            pivot_cols,
            ..
        } = aug.rref();
        if pivot_cols.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![self.field.zero(); self.cols];
        for (i, &pc) in pivot_cols.iter().enumerate() {
            x[pc] = r[(i, self.cols)].clone();
        }
        Ok(Some(x))
    }

    pub fn determinant(&self) -> Result<Scalar, MatrixError> {
        let n = self.require_square()?;
        if let Some(p) = self.field.modulus() {
            let mut data = self.residues();
            return Ok(Scalar::Mod {
                value: det_mod(&mut data, n, p),
                p,
            });
        }
        let mut m = self.clone();
        let mut det = self.field.one();
        for c in 0..n {
            let Some(piv) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return Ok(self.field.zero());
            };
            if piv != c {
                m.swap_rows(piv, c);
                det = -&det;
            }
            let pivot = m[(c, c)].clone();
            det = &det * &pivot;
            let inv = pivot.inv().expect("pivot is nonzero");
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let factor = &m[(i, c)] * &inv;
                for j in c..n {
                    let delta = &factor * &m[(c, j)];
                    m[(i, j)] = &m[(i, j)] - &delta;
                }
            }
        }
        Ok(det)
    }

    pub fn is_invertible(&self) -> bool {
        self.determinant().is_ok_and(|d| !d.is_zero())
    }

    /// Determinant and, when it is nonzero, the inverse. The inverse is
    /// checked against `A·A⁻¹ = A⁻¹·A = I` before it is returned.
    pub fn det_inv(&self) -> Result<(Scalar, Option<Matrix>), MatrixError> {
        let n = self.require_square()?;
        let det = self.determinant()?;
        if det.is_zero() {
            return Ok((det, None));
        }
        let aug = Matrix::from_fn(self.field, n, 2 * n, |i, j| {
            if j < n {
                self[(i, j)].clone()
            } else if j - n == i {
                self.field.one()
            } else {
                self.field.zero()
            }
        });
        let inv = aug.rref().matrix.submatrix(0, n, n, n)?;
        if !self.matmul(&inv)?.is_identity() || !inv.matmul(self)?.is_identity() {
            return Err(MatrixError::Internal("inverse failed verification".into()));
        }
        Ok((det, Some(inv)))
    }

    pub fn inverse(&self) -> Result<Option<Matrix>, MatrixError> {
        Ok(self.det_inv()?.1)
    }

    /// Least `k <= n` with `A^k = 0`, or `None` when `A` is not nilpotent.
    pub fn nilpotency_index(&self) -> Result<Option<usize>, MatrixError> {
        let n = self.require_square()?;
        if n == 0 {
            return Ok(Some(0));
        }
        let mut power = self.clone();
        for k in 1..=n {
            if power.is_zero() {
                return Ok(Some(k));
            }
            power = power.matmul(self)?;
        }
        Ok(None)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Scalar;

    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|e| e.to_string()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

fn rref_mod(data: &mut [u64], rows: usize, cols: usize, p: u64) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| data[i * cols + c] != 0) else {
            continue;
        };
        if piv != r {
            for j in 0..cols {
                data.swap(r * cols + j, piv * cols + j);
            }
        }
        let inv = inv_mod(data[r * cols + c], p);
        for j in c..cols {
            data[r * cols + j] = data[r * cols + j] * inv % p;
        }
        for i in 0..rows {
            let factor = data[i * cols + c];
            if i == r || factor == 0 {
                continue;
            }
            let neg = p - factor;
            for j in c..cols {
                let v = data[r * cols + j];
                if v != 0 {
                    data[i * cols + j] = (data[i * cols + j] + neg * v) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

fn det_mod(data: &mut [u64], n: usize, p: u64) -> u64 {
    let mut det = 1 % p;
    for c in 0..n {
        let Some(piv) = (c..n).find(|&i| data[i * n + c] != 0) else {
            return 0;
        };
        if piv != c {
            for j in 0..n {
                data.swap(c * n + j, piv * n + j);
            }
            det = (p - det) % p;
        }
        let pivot = data[c * n + c];
        det = det * pivot % p;
        let inv = inv_mod(pivot, p);
        for i in c + 1..n {
            let x = data[i * n + c];
            if x == 0 {
                continue;
            }
            let neg = p - x * inv % p;
            for j in c..n {
                data[i * n + j] = (data[i * n + j] + neg * data[c * n + j]) % p;
            }
        }
    }
    det
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut base, mut exp, mut acc) = (a % p, p - 2, 1u64);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// A matrix described by a partition into blocks; absent blocks are zero.
#[derive(Debug, Clone)]
pub struct BlockGrid {
    field: Field,
    row_sizes: Vec<usize>,
    col_sizes: Vec<usize>,
    blocks: Vec<((usize, usize), Matrix)>,
}

impl BlockGrid {
    pub fn new(field: Field, row_sizes: Vec<usize>, col_sizes: Vec<usize>) -> Self {
        BlockGrid {
            field,
            row_sizes,
            col_sizes,
            blocks: Vec::new(),
        }
    }

    /// Square grid with `k` blocks of size `n` in each direction.
    pub fn uniform(field: Field, k: usize, n: usize) -> Self {
        Self::new(field, vec![n; k], vec![n; k])
    }

    pub fn set(&mut self, i: usize, j: usize, block: Matrix) -> Result<&mut Self, MatrixError> {
        let (Some(&r), Some(&c)) = (self.row_sizes.get(i), self.col_sizes.get(j)) else {
            return Err(MatrixError::BlockShape(i, j, "outside the grid".into()));
        };
        if block.shape() != (r, c) {
            return Err(MatrixError::BlockShape(
                i,
                j,
                format!("expected {r}x{c}, got {}x{}", block.rows, block.cols),
            ));
        }
        if block.field != self.field {
            return Err(MatrixError::FieldMismatch(self.field, block.field));
        }
        self.blocks.retain(|(pos, _)| *pos != (i, j));
        self.blocks.push(((i, j), block));
        Ok(self)
    }

    pub fn assemble(&self) -> Result<Matrix, MatrixError> {
        let offsets = |sizes: &[usize]| -> Vec<usize> {
            sizes
                .iter()
                .scan(0, |acc, &s| {
                    let o = *acc;
                    *acc += s;
                    Some(o)
                })
                .collect()
        };
        let (ro, co) = (offsets(&self.row_sizes), offsets(&self.col_sizes));
        let mut out = Matrix::zeros(
            self.field,
            self.row_sizes.iter().sum(),
            self.col_sizes.iter().sum(),
        );
        for ((i, j), b) in &self.blocks {
            if b.shape() != (self.row_sizes[*i], self.col_sizes[*j]) {
                return Err(MatrixError::BlockShape(*i, *j, "inconsistent".into()));
            }
            for r in 0..b.rows {
                for c in 0..b.cols {
                    out[(ro[*i] + r, co[*j] + c)] = b[(r, c)].clone();
                }
            }
        }
        Ok(out)
    }
}
