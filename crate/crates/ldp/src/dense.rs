//! Minimal dense linear algebra for the solver and its oracles.
//!
//! Storage is row-major `Vec<T>`. Containers validate their entries on
//! construction (no NaN or infinities ever get in) and are immutable in
//! shape afterwards. Dimension mismatches in the arithmetic kernels are
//! caller bugs and panic; runtime conditions a caller can act on
//! (rank-deficient least squares) come back as errors.

use std::fmt;
use std::ops::Index;

use crate::scalar::{Real, Scalar};

/// Pivot-ratio threshold used for rank decisions when the caller does not
/// supply one. A factorization pivot `d` counts as zero when
/// `|d| <= tol * (largest pivot + 1)`.
pub const DEFAULT_PIVOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DenseError {
    /// An entry failed the admissibility check (NaN or infinite).
    NonFinite { index: usize },
    /// Construction data does not match the requested shape.
    ShapeMismatch { expected: usize, got: usize },
    /// Matrices must have at least one row and one column.
    EmptyDimension,
    /// The least-squares subsystem has numerically dependent columns;
    /// carries the rank actually detected.
    RankDeficient { rank: usize },
}

impl fmt::Display for DenseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DenseError::NonFinite { index } => {
                write!(f, "entry {index} is not finite")
            }
            DenseError::ShapeMismatch { expected, got } => {
                write!(f, "expected {expected} entries, got {got}")
            }
            DenseError::EmptyDimension => write!(f, "dimensions must be at least 1"),
            DenseError::RankDeficient { rank } => {
                write!(f, "rank-deficient system (detected rank {rank})")
            }
        }
    }
}

impl std::error::Error for DenseError {}

/// Dense column vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector<T = f64> {
    entries: Vec<T>,
}

impl<T: Scalar> Vector<T> {
    pub fn new(entries: Vec<T>) -> Result<Self, DenseError> {
        for (i, e) in entries.iter().enumerate() {
            if !e.is_admissible() {
                return Err(DenseError::NonFinite { index: i });
            }
        }
        Ok(Vector { entries })
    }

    pub fn zeros(len: usize) -> Self {
        Vector {
            entries: vec![T::zero(); len],
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.entries.iter()
    }

    pub fn into_vec(self) -> Vec<T> {
        self.entries
    }

    pub fn dot(&self, other: &Vector<T>) -> T {
        assert_eq!(self.len(), other.len(), "dot: length mismatch");
        let mut acc = T::zero();
        for (a, b) in self.entries.iter().zip(other.entries.iter()) {
            acc = acc + a.clone() * b.clone();
        }
        acc
    }

    /// Entry-wise map; the result is revalidated so a map that produces
    /// non-finite values fails loudly instead of poisoning the container.
    pub fn map<F: FnMut(&T) -> T>(&self, f: F) -> Result<Self, DenseError> {
        Vector::new(self.entries.iter().map(f).collect())
    }
}

impl<T: Real> Vector<T> {
    pub fn norm2(&self) -> T {
        let mut acc = T::zero();
        for e in &self.entries {
            acc = acc + *e * *e;
        }
        acc.sqrt()
    }

    pub fn norm_inf(&self) -> T {
        let mut best = T::zero();
        for e in &self.entries {
            let a = e.abs();
            if a > best {
                best = a;
            }
        }
        best
    }
}

impl<T> Index<usize> for Vector<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.entries[i]
    }
}

impl<'a, T> IntoIterator for &'a Vector<T> {
    type Item = &'a T;
    type IntoIter = std::slice::Iter<'a, T>;
    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}

/// Dense row-major matrix with at least one row and one column.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T = f64> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self, DenseError> {
        if rows == 0 || cols == 0 {
            return Err(DenseError::EmptyDimension);
        }
        if data.len() != rows * cols {
            return Err(DenseError::ShapeMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        for (i, e) in data.iter().enumerate() {
            if !e.is_admissible() {
                return Err(DenseError::NonFinite { index: i });
            }
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self, DenseError> {
        if rows.is_empty() {
            return Err(DenseError::EmptyDimension);
        }
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(DenseError::ShapeMismatch {
                    expected: cols,
                    got: r.len(),
                });
            }
            data.extend(r.iter().cloned());
        }
        Matrix::new(rows.len(), cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "zeros: dimensions must be at least 1");
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        assert!(i < self.rows, "row index {i} out of range");
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &self.data[i * self.cols + j]
    }

    pub fn transpose(&self) -> Matrix<T> {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.data[i * self.cols + j].clone());
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// `M v`, accumulating each row's dot product left to right.
    pub fn mat_vec(&self, v: &Vector<T>) -> Vector<T> {
        assert_eq!(self.cols, v.len(), "mat_vec: dimension mismatch");
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut acc = T::zero();
            for j in 0..self.cols {
                acc = acc + self.data[i * self.cols + j].clone() * v[j].clone();
            }
            out.push(acc);
        }
        Vector { entries: out }
    }

    /// `Mᵀ v` with the same accumulation order as `M.transpose().mat_vec(v)`,
    /// so the two agree to the last bit.
    pub fn transpose_mat_vec(&self, v: &Vector<T>) -> Vector<T> {
        assert_eq!(self.rows, v.len(), "transpose_mat_vec: dimension mismatch");
        let mut out = Vec::with_capacity(self.cols);
        for j in 0..self.cols {
            let mut acc = T::zero();
            for i in 0..self.rows {
                acc = acc + self.data[i * self.cols + j].clone() * v[i].clone();
            }
            out.push(acc);
        }
        Vector { entries: out }
    }

    pub fn mat_mul(&self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "mat_mul: dimension mismatch");
        let mut data = Vec::with_capacity(self.rows * rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = T::zero();
                for k in 0..self.cols {
                    acc = acc
                        + self.data[i * self.cols + k].clone() * rhs.data[k * rhs.cols + j].clone();
                }
                data.push(acc);
            }
        }
        Matrix {
            rows: self.rows,
            cols: rhs.cols,
            data,
        }
    }
}

impl<T: Real> Matrix<T> {
    pub fn row_norm2(&self, i: usize) -> T {
        let mut acc = T::zero();
        for e in self.row(i) {
            acc = acc + *e * *e;
        }
        acc.sqrt()
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &self.data[i * self.cols + j]
    }
}

/// Householder QR of a column-gathered submatrix, factoring in place and
/// applying the reflections to `rhs` as they are formed. Returns the
/// absolute values of the R diagonal.
fn householder_factor<T: Real>(a: &mut [T], rows: usize, cols: usize, rhs: &mut [T]) -> Vec<T> {
    debug_assert_eq!(a.len(), rows * cols);
    debug_assert_eq!(rhs.len(), rows);
    let steps = cols.min(rows);
    let mut diag = Vec::with_capacity(steps);
    for k in 0..steps {
        // Column norm below the diagonal.
        let mut norm = T::zero();
        for i in k..rows {
            let v = a[i * cols + k];
            norm = norm + v * v;
        }
        let norm = norm.sqrt();
        if norm == T::zero() {
            diag.push(T::zero());
            continue;
        }
        let pivot = a[k * cols + k];
        let alpha = if pivot > T::zero() { -norm } else { norm };
        // Reflector v = column with v_k := pivot - alpha; H = I - 2vvᵀ/(vᵀv).
        a[k * cols + k] = pivot - alpha;
        let mut vtv = T::zero();
        for i in k..rows {
            let v = a[i * cols + k];
            vtv = vtv + v * v;
        }
        for j in (k + 1)..cols {
            let mut dot = T::zero();
            for i in k..rows {
                dot = dot + a[i * cols + k] * a[i * cols + j];
            }
            let factor = (dot + dot) / vtv;
            for i in k..rows {
                let update = factor * a[i * cols + k];
                a[i * cols + j] = a[i * cols + j] - update;
            }
        }
        let mut dot = T::zero();
        for i in k..rows {
            dot = dot + a[i * cols + k] * rhs[i];
        }
        let factor = (dot + dot) / vtv;
        for i in k..rows {
            let update = factor * a[i * cols + k];
            rhs[i] = rhs[i] - update;
        }
        a[k * cols + k] = alpha;
        diag.push(alpha.abs());
    }
    diag
}

fn rank_from_diag<T: Real>(diag: &[T], tol: T) -> usize {
    let mut largest = T::zero();
    for d in diag {
        if *d > largest {
            largest = *d;
        }
    }
    let threshold = tol * (largest + T::one());
    diag.iter().filter(|d| **d > threshold).count()
}

/// Least squares `min ‖M[:, cols] z − f‖₂` over the given column subset,
/// solved by Householder QR without column pivoting. The result is indexed
/// like `cols`. Fails with [`DenseError::RankDeficient`] when the gathered
/// columns are numerically dependent under [`DEFAULT_PIVOT_TOL`].
pub fn ls_solve_subset<T: Real>(
    m: &Matrix<T>,
    f: &Vector<T>,
    cols: &[usize],
) -> Result<Vector<T>, DenseError> {
    assert!(!cols.is_empty(), "ls_solve_subset: empty column subset");
    assert_eq!(m.rows(), f.len(), "ls_solve_subset: rhs length mismatch");
    for (i, &c) in cols.iter().enumerate() {
        assert!(c < m.cols(), "ls_solve_subset: column {c} out of range");
        assert!(
            !cols[..i].contains(&c),
            "ls_solve_subset: duplicate column {c}"
        );
    }
    let rows = m.rows();
    let k = cols.len();
    let mut a = Vec::with_capacity(rows * k);
    for i in 0..rows {
        for &c in cols {
            a.push(*m.get(i, c));
        }
    }
    let mut rhs: Vec<T> = f.as_slice().to_vec();
    let diag = householder_factor(&mut a, rows, k, &mut rhs);
    let tol = T::from(DEFAULT_PIVOT_TOL).expect("pivot tolerance fits in scalar");
    let rank = rank_from_diag(&diag, tol);
    if diag.len() < k || rank < k {
        return Err(DenseError::RankDeficient { rank });
    }
    // Back-substitute R z = rhs[..k]; R diagonal was overwritten in place.
    let mut z = vec![T::zero(); k];
    for i in (0..k).rev() {
        let mut acc = rhs[i];
        for j in (i + 1)..k {
            acc = acc - a[i * k + j] * z[j];
        }
        z[i] = acc / a[i * k + i];
    }
    Ok(Vector { entries: z })
}

/// Numerical invertibility test: the smallest-magnitude pivot of a QR
/// factorization must exceed `tol * (largest-magnitude pivot + 1)`.
/// Deterministic for a fixed input.
pub fn is_invertible<T: Real>(b: &Matrix<T>, tol: T) -> bool {
    assert_eq!(b.rows(), b.cols(), "is_invertible: matrix must be square");
    let n = b.rows();
    let mut a = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            a.push(*b.get(i, j));
        }
    }
    let mut rhs = vec![T::zero(); n];
    let diag = householder_factor(&mut a, n, n, &mut rhs);
    let mut largest = T::zero();
    let mut smallest = T::infinity();
    for d in &diag {
        if *d > largest {
            largest = *d;
        }
        if *d < smallest {
            smallest = *d;
        }
    }
    smallest > tol * (largest + T::one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vecf(v: &[f64]) -> Vector {
        Vector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn vector_rejects_non_finite() {
        assert_eq!(
            Vector::new(vec![1.0, f64::NAN]),
            Err(DenseError::NonFinite { index: 1 })
        );
        assert_eq!(
            Vector::new(vec![f64::INFINITY]),
            Err(DenseError::NonFinite { index: 0 })
        );
    }

    #[test]
    fn matrix_validates_shape_and_entries() {
        assert_eq!(
            Matrix::new(2, 2, vec![1.0, 2.0, 3.0]),
            Err(DenseError::ShapeMismatch {
                expected: 4,
                got: 3
            })
        );
        assert_eq!(
            Matrix::<f64>::new(0, 3, vec![]),
            Err(DenseError::EmptyDimension)
        );
        assert_eq!(
            Matrix::new(1, 2, vec![1.0, f64::NEG_INFINITY]),
            Err(DenseError::NonFinite { index: 1 })
        );
    }

    #[test]
    fn identity_mat_vec_is_exact() {
        let id = Matrix::<f64>::identity(3);
        let v = vecf(&[3.5, -2.25, 1e-30]);
        assert_eq!(id.mat_vec(&v), v);
    }

    #[test]
    fn mat_vec_small_example() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let v = vecf(&[5.0, 6.0]);
        assert_eq!(m.mat_vec(&v).as_slice(), &[17.0, 39.0]);
    }

    #[test]
    fn transpose_mat_vec_matches_explicit_transpose_bitwise() {
        // Same accumulation order on both routes, so equality is exact.
        let m = Matrix::from_rows(&[
            vec![0.1, -97.3, 55.5],
            vec![1e-9, 2.0, -3.25],
            vec![7.0, 0.3, 0.7],
            vec![-0.11, 12.0, 9.5],
        ])
        .unwrap();
        let v = vecf(&[1.5, -0.25, 3.125, 0.875]);
        let fast = m.transpose_mat_vec(&v);
        let slow = m.transpose().mat_vec(&v);
        assert_eq!(fast.as_slice(), slow.as_slice());
    }

    #[test]
    #[should_panic(expected = "mat_vec: dimension mismatch")]
    fn mat_vec_panics_on_mismatch() {
        let m = Matrix::<f64>::identity(2);
        let v = vecf(&[1.0, 2.0, 3.0]);
        let _ = m.mat_vec(&v);
    }

    #[test]
    fn mat_mul_against_hand_computation() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, -1.0]]).unwrap();
        let b = Matrix::from_rows(&[vec![3.0, 0.5], vec![1.0, 1.0]]).unwrap();
        let c = a.mat_mul(&b);
        assert_eq!(c.row(0), &[5.0, 2.5]);
        assert_eq!(c.row(1), &[-1.0, -1.0]);
    }

    #[test]
    fn ls_solve_single_column_is_the_mean() {
        // min ‖(1,1)z − (1,3)‖ → z = 2.
        let m = Matrix::from_rows(&[vec![1.0], vec![1.0]]).unwrap();
        let f = vecf(&[1.0, 3.0]);
        let z = ls_solve_subset(&m, &f, &[0]).unwrap();
        assert!((z[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn ls_solve_exact_square_system() {
        let m = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        // Solution (1, 2): rhs = (4, 7).
        let f = vecf(&[4.0, 7.0]);
        let z = ls_solve_subset(&m, &f, &[0, 1]).unwrap();
        assert!((z[0] - 1.0).abs() < 1e-14);
        assert!((z[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn ls_solve_subset_reorders_with_cols() {
        let m = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let f = vecf(&[4.0, 7.0]);
        let z = ls_solve_subset(&m, &f, &[1, 0]).unwrap();
        assert!((z[0] - 2.0).abs() < 1e-14);
        assert!((z[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ls_solve_detects_dependent_columns() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0], vec![-1.0, -2.0]]).unwrap();
        let f = vecf(&[1.0, 0.0, 1.0]);
        assert_eq!(
            ls_solve_subset(&m, &f, &[0, 1]),
            Err(DenseError::RankDeficient { rank: 1 })
        );
    }

    #[test]
    fn ls_solve_wide_subset_is_rank_deficient() {
        // Two columns, one row: cannot be full column rank.
        let m = Matrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        let f = vecf(&[1.0]);
        assert!(matches!(
            ls_solve_subset(&m, &f, &[0, 1]),
            Err(DenseError::RankDeficient { .. })
        ));
    }

    #[test]
    fn is_invertible_identity_and_singular() {
        let id = Matrix::<f64>::identity(3);
        for tol in [1e-15, 1e-12, 1e-6, 0.4] {
            assert!(is_invertible(&id, tol), "tol {tol}");
        }
        let ones = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(!is_invertible(&ones, 1e-14));
        let skinny_ok = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1e-6]]).unwrap();
        assert!(is_invertible(&skinny_ok, 1e-12));
        assert!(!is_invertible(&skinny_ok, 1e-3));
    }

    #[test]
    fn norms_small_examples() {
        let v = vecf(&[3.0, -4.0]);
        assert_eq!(v.norm2(), 5.0);
        assert_eq!(v.norm_inf(), 4.0);
        assert_eq!(Vector::<f64>::zeros(4).norm2(), 0.0);
    }

    #[test]
    fn rational_kernels_are_exact() {
        use num_rational::BigRational;
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        let m = Matrix::from_rows(&[vec![r(1, 3), r(1, 7)], vec![r(2, 5), r(-1, 2)]]).unwrap();
        let v = Vector::new(vec![r(21, 1), r(14, 1)]).unwrap();
        let out = m.mat_vec(&v);
        assert_eq!(out[0], r(9, 1));
        // 21·(2/5) + 14·(−1/2) = 42/5 − 7 = 7/5, with no rounding anywhere.
        assert_eq!(out[1], r(7, 5));
    }
}
