//! Dense matrices over a generic scalar, with the exact elimination routines
//! the rest of the crate is built on: rank and determinants via fraction-free
//! (Bareiss-style) elimination, reduced row echelon form for kernels and
//! inverses, and Pfaffians of skew-symmetric matrices.
//!
//! Pivot selection is always "first nonzero in column order", so every
//! routine is deterministic.

use crate::scalar::{FieldScalar, Scalar};
use thiserror::Error;

/// Default size cap for Pfaffian computations.
pub const PFAFFIAN_SIZE_CAP: usize = 40;

/// Direct expansion is used up to this size; skew elimination above it.
const PFAFFIAN_EXPANSION_MAX: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("matrix is not skew-symmetric")]
    NotSkew,
    #[error("skew matrix has odd size {0}")]
    OddSize(usize),
    #[error("matrix size {0} exceeds the cap {1}")]
    TooLarge(usize, usize),
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            entries: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Matrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        assert!(
            rows.iter().all(|r| r.len() == ncols),
            "ragged rows in matrix constructor"
        );
        Matrix {
            rows: nrows,
            cols: ncols,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<U: Scalar>(&self, mut f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| f(e)).collect(),
        }
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|e| e.clone() * s.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() + other[(i, j)].clone()
        })
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        Self::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                acc = acc + self[(i, k)].clone() * other[(k, j)].clone();
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "vector length must match columns");
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for k in 0..self.cols {
                    acc = acc + self[(i, k)].clone() * v[k].clone();
                }
                acc
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn is_skew(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in i..self.cols {
                if self[(i, j)] != -self[(j, i)].clone() {
                    return false;
                }
            }
        }
        true
    }

    /// Principal submatrix on the given (distinct) index set, in the given
    /// order.
    pub fn principal_submatrix(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), idx.len(), |i, j| self[(idx[i], idx[j])].clone())
    }

    /// Square submatrix with row and column `v` removed.
    pub fn delete_row_col(&self, v: usize) -> Self {
        let idx: Vec<usize> = (0..self.rows).filter(|&i| i != v).collect();
        self.principal_submatrix(&idx)
    }

    /// Appends `v` as an extra column.
    pub fn augment_col(&self, v: &[T]) -> Self {
        assert_eq!(self.rows, v.len(), "column length must match rows");
        Self::from_fn(self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                v[i].clone()
            }
        })
    }

    /// Simultaneous row/column relabeling: entry (i, j) moves to
    /// (perm[i], perm[j]).
    pub fn apply_perm(&self, perm: &[usize]) -> Self {
        assert_eq!(self.rows, self.cols);
        assert_eq!(perm.len(), self.rows);
        let mut out = Self::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(perm[i], perm[j])] = self[(i, j)].clone();
            }
        }
        out
    }

    /// Pfaffian by recursive expansion along the first row; needs only ring
    /// operations, so it also works for polynomial entries.
    pub fn pfaffian_expansion(&self) -> Result<T, MatrixError> {
        self.check_skew_even()?;
        let active: Vec<usize> = (0..self.rows).collect();
        Ok(self.pf_expand(&active))
    }

    fn check_skew_even(&self) -> Result<(), MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::NotSquare(self.rows, self.cols));
        }
        if self.rows > PFAFFIAN_SIZE_CAP {
            return Err(MatrixError::TooLarge(self.rows, PFAFFIAN_SIZE_CAP));
        }
        if self.rows % 2 != 0 {
            return Err(MatrixError::OddSize(self.rows));
        }
        if !self.is_skew() {
            return Err(MatrixError::NotSkew);
        }
        Ok(())
    }

    fn pf_expand(&self, active: &[usize]) -> T {
        if active.is_empty() {
            return T::one();
        }
        let i0 = active[0];
        let mut acc = T::zero();
        for j in 1..active.len() {
            let entry = self[(i0, active[j])].clone();
            if entry.is_zero() {
                continue;
            }
            let rest: Vec<usize> = active[1..]
                .iter()
                .copied()
                .filter(|&k| k != active[j])
                .collect();
            let term = entry * self.pf_expand(&rest);
            acc = if j % 2 == 1 { acc + term } else { acc - term };
        }
        acc
    }

    /// Determinant by cofactor expansion; division-free reference route used
    /// to cross-check the elimination determinant and symbolic Pfaffians.
    pub fn det_expansion(&self) -> Result<T, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::NotSquare(self.rows, self.cols));
        }
        let active: Vec<usize> = (0..self.rows).collect();
        Ok(self.det_expand(&active, &active))
    }

    fn det_expand(&self, rows: &[usize], cols: &[usize]) -> T {
        match rows.len() {
            0 => return T::one(),
            1 => return self[(rows[0], cols[0])].clone(),
            _ => {}
        }
        let i0 = rows[0];
        let mut acc = T::zero();
        for (j, &col) in cols.iter().enumerate() {
            let entry = self[(i0, col)].clone();
            if entry.is_zero() {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&k| k != col).collect();
            let term = entry * self.det_expand(&rows[1..], &rest);
            acc = if j % 2 == 0 { acc + term } else { acc - term };
        }
        acc
    }
}

impl<T: FieldScalar> Matrix<T> {
    /// Fraction-free (Bareiss-style) elimination with first-nonzero pivoting.
    /// Returns the rank and, for square full-rank input, the determinant.
    fn bareiss(&self) -> (usize, T) {
        let mut a = self.clone();
        let mut prev = T::one();
        let mut sign_flip = false;
        let mut rank = 0usize;
        let mut row = 0usize;
        for col in 0..a.cols {
            if row >= a.rows {
                break;
            }
            let Some(piv) = (row..a.rows).find(|&r| !a[(r, col)].is_zero()) else {
                continue;
            };
            if piv != row {
                for j in 0..a.cols {
                    a.entries.swap(piv * a.cols + j, row * a.cols + j);
                }
                sign_flip = !sign_flip;
            }
            for i in row + 1..a.rows {
                for j in col + 1..a.cols {
                    let num = a[(row, col)].clone() * a[(i, j)].clone()
                        - a[(i, col)].clone() * a[(row, j)].clone();
                    a[(i, j)] = num / prev.clone();
                }
                a[(i, col)] = T::zero();
            }
            prev = a[(row, col)].clone();
            rank += 1;
            row += 1;
        }
        let det = if self.rows == self.cols && rank == self.rows {
            if sign_flip {
                -prev
            } else {
                prev
            }
        } else {
            T::zero()
        };
        (rank, det)
    }

    /// Row rank by exact elimination.
    pub fn rank(&self) -> usize {
        self.bareiss().0
    }

    /// Determinant by exact elimination.
    pub fn det(&self) -> Result<T, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::NotSquare(self.rows, self.cols));
        }
        Ok(self.bareiss().1)
    }

    /// Reduced row echelon form; returns the reduced matrix and the pivot
    /// columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0usize;
        for col in 0..a.cols {
            if row >= a.rows {
                break;
            }
            let Some(piv) = (row..a.rows).find(|&r| !a[(r, col)].is_zero()) else {
                continue;
            };
            if piv != row {
                for j in 0..a.cols {
                    a.entries.swap(piv * a.cols + j, row * a.cols + j);
                }
            }
            let inv = T::one() / a[(row, col)].clone();
            for j in col..a.cols {
                a[(row, j)] = a[(row, j)].clone() * inv.clone();
            }
            for i in 0..a.rows {
                if i == row || a[(i, col)].is_zero() {
                    continue;
                }
                let f = a[(i, col)].clone();
                for j in col..a.cols {
                    let sub = f.clone() * a[(row, j)].clone();
                    a[(i, j)] = a[(i, j)].clone() - sub;
                }
            }
            pivots.push(col);
            row += 1;
        }
        (a, pivots)
    }

    /// Basis of the right null space in reduced echelon parametrization, one
    /// vector per free column in ascending order.
    pub fn kernel_basis(&self) -> Vec<Vec<T>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![T::zero(); self.cols];
                v[f] = T::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -r[(row, f)].clone();
                }
                v
            })
            .collect()
    }

    /// Exact inverse.
    pub fn inverse(&self) -> Result<Self, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        let aug = Self::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self[(i, j)].clone()
            } else if j - n == i {
                T::one()
            } else {
                T::zero()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots.iter().any(|&c| c >= n) {
            return Err(MatrixError::SingularMatrix);
        }
        Ok(Self::from_fn(n, n, |i, j| r[(i, j + n)].clone()))
    }

    /// One solution of `self * x = rhs`, with free variables set to zero;
    /// `None` if the system is inconsistent.
    pub fn solve(&self, rhs: &[T]) -> Option<Vec<T>> {
        assert_eq!(self.rows, rhs.len());
        let aug = self.augment_col(rhs);
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![T::zero(); self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = r[(row, self.cols)].clone();
        }
        Some(x)
    }

    /// Whether `v` is a linear combination of the columns, decided by the
    /// rank test rank([m | v]) = rank(m).
    pub fn in_column_space(&self, v: &[T]) -> Result<bool, MatrixError> {
        if v.len() != self.rows {
            return Err(MatrixError::DimensionMismatch(format!(
                "vector length {} vs {} rows",
                v.len(),
                self.rows
            )));
        }
        Ok(self.augment_col(v).rank() == self.rank())
    }

    /// Pfaffian of an even skew-symmetric matrix: direct expansion up to size
    /// 8, skew elimination above, capped at [`PFAFFIAN_SIZE_CAP`].
    pub fn pfaffian(&self) -> Result<T, MatrixError> {
        self.check_skew_even()?;
        if self.rows <= PFAFFIAN_EXPANSION_MAX {
            let active: Vec<usize> = (0..self.rows).collect();
            return Ok(self.pf_expand(&active));
        }
        Ok(self.pfaffian_elimination())
    }

    /// Skew elimination: congruence transformations with unit determinant
    /// reduce the matrix to a direct sum of 2x2 blocks whose pivots multiply
    /// to the Pfaffian; row/column swaps each flip the sign.
    fn pfaffian_elimination(&self) -> T {
        let n = self.rows;
        let mut a = self.clone();
        let mut pf = T::one();
        let mut k = 0usize;
        while k < n {
            let Some(piv) = (k + 1..n).find(|&j| !a[(k, j)].is_zero()) else {
                return T::zero();
            };
            if piv != k + 1 {
                for j in 0..n {
                    a.entries.swap(piv * n + j, (k + 1) * n + j);
                }
                for i in 0..n {
                    a.entries.swap(i * n + piv, i * n + k + 1);
                }
                pf = -pf;
            }
            let p = a[(k, k + 1)].clone();
            for i in k + 2..n {
                // Clear a[k][i] via row/column k+1, then a[k+1][i] via
                // row/column k; both are Pfaffian-preserving congruences.
                let c = -(a[(k, i)].clone() / p.clone());
                if !c.is_zero() {
                    a.add_sym(i, k + 1, &c);
                }
                let c2 = a[(k + 1, i)].clone() / p.clone();
                if !c2.is_zero() {
                    a.add_sym(i, k, &c2);
                }
            }
            pf = pf * p;
            k += 2;
        }
        pf
    }

    /// row_i += c * row_j and col_i += c * col_j.
    fn add_sym(&mut self, i: usize, j: usize, c: &T) {
        let n = self.cols;
        for t in 0..n {
            let add = c.clone() * self[(j, t)].clone();
            self[(i, t)] = self[(i, t)].clone() + add;
        }
        for t in 0..n {
            let add = c.clone() * self[(t, j)].clone();
            self[(t, i)] = self[(t, i)].clone() + add;
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &self.entries[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &mut self.entries[i * self.cols + j]
    }
}

/// Builds a skew matrix from its strict upper triangle, row-major.
pub fn skew_from_upper<T: Scalar>(n: usize, upper: &[T]) -> Matrix<T> {
    assert_eq!(upper.len(), n * (n - 1) / 2, "wrong upper triangle length");
    let mut m = Matrix::zeros(n, n);
    let mut it = upper.iter();
    for i in 0..n {
        for j in i + 1..n {
            let e = it.next().unwrap().clone();
            m[(i, j)] = e.clone();
            m[(j, i)] = -e;
        }
    }
    m
}

/// Sign of a permutation given in image form.
pub fn permutation_sign(perm: &[usize]) -> i8 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1i8;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0usize;
        let mut cur = start;
        while !seen[cur] {
            seen[cur] = true;
            cur = perm[cur];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::Q;
    use num_traits::Zero as _;

    fn qm(rows: &[&[i64]]) -> Matrix<Q> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| q(x, 1)).collect())
                .collect(),
        )
    }

    #[test]
    fn rank_examples() {
        assert_eq!(Matrix::<Q>::zeros(3, 3).rank(), 0);
        assert_eq!(qm(&[&[0, 1], &[-1, 0]]).rank(), 2);
        // Kernel of [[0,a,b],[-a,0,c],[-b,-c,0]] is spanned by (c,-b,a).
        let m = qm(&[&[0, 1, 2], &[-1, 0, 1], &[-2, -1, 0]]);
        assert_eq!(m.rank(), 2);
        let span = vec![q(1, 1), q(-2, 1), q(1, 1)];
        assert!(m.mul_vec(&span).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn in_column_space_examples() {
        let m = qm(&[&[0, 1], &[-1, 0]]);
        assert!(m.in_column_space(&[q(1, 1), q(1, 1)]).unwrap());

        // Skew with B12=1, B13=2, B23=1: kernel (1,-2,1) is orthogonal to
        // (1,1,1); cross-check by solving.
        let m = qm(&[&[0, 1, 2], &[-1, 0, 1], &[-2, -1, 0]]);
        let ones = vec![q(1, 1); 3];
        assert!(m.in_column_space(&ones).unwrap());
        let x = m.solve(&ones).expect("consistent");
        assert_eq!(m.mul_vec(&x), ones);

        let z = Matrix::<Q>::zeros(3, 3);
        assert!(!z.in_column_space(&ones).unwrap());

        assert!(m.in_column_space(&[q(1, 1)]).is_err());
    }

    #[test]
    fn kernel_basis_examples() {
        assert!(Matrix::<Q>::identity(2).kernel_basis().is_empty());

        let m = Matrix::from_rows(vec![vec![q(1, 1), q(-1, 1)]]);
        let k = m.kernel_basis();
        assert_eq!(k, vec![vec![q(1, 1), q(1, 1)]]);

        let m = qm(&[&[0, 1, 2], &[-1, 0, 1], &[-2, -1, 0]]);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 1);
        assert!(m.mul_vec(&k[0]).iter().all(|x| x.is_zero()));
        // Proportional to (c,-b,a) = (1,-2,1).
        let v = &k[0];
        assert_eq!(v[0].clone() * q(-2, 1), v[1]);
        assert_eq!(v[0], v[2]);
    }

    #[test]
    fn inverse_examples() {
        let m = qm(&[&[0, 1], &[-1, 0]]);
        assert_eq!(m.inverse().unwrap(), qm(&[&[0, -1], &[1, 0]]));
        let id = Matrix::<Q>::identity(3);
        assert_eq!(id.inverse().unwrap(), id);
        let odd = qm(&[&[0, 1, 2], &[-1, 0, 1], &[-2, -1, 0]]);
        assert_eq!(odd.inverse(), Err(MatrixError::SingularMatrix));
    }

    #[test]
    fn pfaffian_examples() {
        let m = skew_from_upper(2, &[q(7, 3)]);
        assert_eq!(m.pfaffian().unwrap(), q(7, 3));

        // Generic 4x4 with upper entries (a,b,c,d,e,f): Pf = af - be + cd.
        let m = skew_from_upper(4, &[q(2, 1), q(3, 1), q(5, 1), q(7, 1), q(11, 1), q(13, 1)]);
        assert_eq!(m.pfaffian().unwrap(), q(2 * 13 - 3 * 11 + 5 * 7, 1));

        let odd = Matrix::<Q>::zeros(3, 3);
        assert_eq!(odd.pfaffian(), Err(MatrixError::OddSize(3)));
        let notskew = qm(&[&[1, 0], &[0, 1]]);
        assert_eq!(notskew.pfaffian(), Err(MatrixError::NotSkew));
    }

    #[test]
    fn pfaffian_of_running_example_matrix() {
        // Basis (dlog y1, dlog y2, dlog y3, dz), upper entries
        // (b3, -b2, -1, b1, -1, -1); Pfaffian is -(b1+b2+b3).
        let check = |b1: i64, b2: i64, b3: i64| {
            let m = skew_from_upper(
                4,
                &[q(b3, 1), q(-b2, 1), q(-1, 1), q(b1, 1), q(-1, 1), q(-1, 1)],
            );
            assert_eq!(m.pfaffian().unwrap(), q(-(b1 + b2 + b3), 1));
        };
        check(1, 1, 1);
        check(3, 2, 1);
        check(1, 1, -2);
    }

    #[test]
    fn pfaffian_elimination_matches_expansion() {
        // Size 10 forces the elimination path; compare against expansion.
        let upper: Vec<Q> = (0..45).map(|k| q((k * k % 11) as i64 - 5, 1)).collect();
        let m = skew_from_upper(10, &upper);
        assert_eq!(m.pfaffian().unwrap(), m.pfaffian_expansion().unwrap());
    }

    #[test]
    fn pfaffian_size_cap() {
        let m = Matrix::<Q>::zeros(42, 42);
        assert_eq!(m.pfaffian(), Err(MatrixError::TooLarge(42, 40)));
    }

    #[test]
    fn det_routes_agree() {
        let m = qm(&[&[2, 1, 0], &[1, -3, 4], &[0, 5, 1]]);
        assert_eq!(m.det().unwrap(), m.det_expansion().unwrap());
        let singular = qm(&[&[1, 2], &[2, 4]]);
        assert!(singular.det().unwrap().is_zero());
    }

    #[test]
    fn permutation_sign_basics() {
        assert_eq!(permutation_sign(&[0, 1, 2]), 1);
        assert_eq!(permutation_sign(&[1, 0, 2]), -1);
        assert_eq!(permutation_sign(&[1, 2, 0]), 1);
    }
}
