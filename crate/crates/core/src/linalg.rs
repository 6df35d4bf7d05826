//! Small dense linear algebra: vectors, square matrices, positive diagonal
//! scalings and a partially pivoted direct solver.
//!
//! Everything here is immutable after construction. Constructors reject
//! empty data and non-finite entries, so any [`Vector`] or [`Matrix`] in hand
//! has dimension at least one and finite entries.

use std::ops::{Deref, Index};

use crate::error::{IcpError, Result};

/// Relative pivot magnitude below which [`solve_linear`] reports singularity.
pub const PIVOT_THRESHOLD: f64 = 1e-12;

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(IcpError::NonFinite {
            index,
            value: values[index],
        }),
        None => Ok(()),
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(IcpError::DimensionMismatch { expected, found })
    }
}

/// A finite real vector of length at least one.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(IcpError::Empty);
        }
        check_finite(&entries)?;
        Ok(Vector(entries))
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "vector dimension must be at least 1");
        Vector(vec![0.0; n])
    }

    /// Constant vector `(value, …, value)`.
    pub fn filled(n: usize, value: f64) -> Result<Self> {
        Vector::new(vec![value; n])
    }

    /// Unchecked constructor for results computed from finite data.
    pub(crate) fn from_raw(entries: Vec<f64>) -> Self {
        debug_assert!(!entries.is_empty());
        Vector(entries)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Whether every entry is finite. Only results of arithmetic that
    /// overflowed can fail this.
    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn inf_norm(&self) -> f64 {
        inf_norm(self)
    }

    /// Componentwise `self + other`.
    pub fn add(&self, other: &Vector) -> Result<Vector> {
        check_dim(self.len(), other.len())?;
        Ok(Vector(self.iter().zip(other.iter()).map(|(a, b)| a + b).collect()))
    }

    /// Componentwise `self - other`.
    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        check_dim(self.len(), other.len())?;
        Ok(Vector(self.iter().zip(other.iter()).map(|(a, b)| a - b).collect()))
    }

    /// `‖self - other‖∞`.
    pub fn distance_inf(&self, other: &Vector) -> Result<f64> {
        check_dim(self.len(), other.len())?;
        Ok(self
            .iter()
            .zip(other.iter())
            .fold(0.0, |acc, (a, b)| f64::max(acc, (a - b).abs())))
    }
}

impl Deref for Vector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = IcpError;

    fn try_from(entries: Vec<f64>) -> Result<Self> {
        Vector::new(entries)
    }
}

impl TryFrom<&[f64]> for Vector {
    type Error = IcpError;

    fn try_from(entries: &[f64]) -> Result<Self> {
        Vector::new(entries.to_vec())
    }
}

/// A finite square matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds an `n×n` matrix from `n·n` row-major entries.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(IcpError::Empty);
        }
        check_dim(n * n, data.len())?;
        check_finite(&data)?;
        Ok(Matrix { n, data })
    }

    /// Builds a matrix from row slices; every row must have as many entries
    /// as there are rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            let row = row.as_ref();
            check_dim(n, row.len())?;
            data.extend_from_slice(row);
        }
        Matrix::from_row_major(n, data)
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_diagonal(&vec![1.0; n])
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "matrix dimension must be at least 1");
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub(crate) fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Matrix::zeros(n);
        for (i, d) in diag.iter().enumerate() {
            m.data[i * n + i] = *d;
        }
        m
    }

    pub(crate) fn from_raw(n: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), n * n);
        Matrix { n, data }
    }

    /// Dimension `n` of the `n×n` matrix.
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn row_major(&self) -> &[f64] {
        &self.data
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j];
            }
        }
        Matrix { n, data }
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| f64::max(acc, v.abs()))
    }

    /// Induced ∞-norm (maximum absolute row sum).
    pub fn inf_norm(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn mat_vec(&self, v: &Vector) -> Result<Vector> {
        mat_vec(self, v)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

/// A positive diagonal matrix `Ω`, stored as its diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalScaling(Vec<f64>);

impl DiagonalScaling {
    /// Rejects any entry that is not strictly positive and finite.
    pub fn new(diag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(IcpError::Empty);
        }
        check_finite(&diag)?;
        if let Some(index) = diag.iter().position(|&d| d <= 0.0) {
            return Err(IcpError::NonPositiveScaling {
                index,
                value: diag[index],
            });
        }
        Ok(DiagonalScaling(diag))
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "scaling dimension must be at least 1");
        DiagonalScaling(vec![1.0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::MIN, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::MAX, f64::min)
    }

    /// `Ω·v`.
    pub fn apply(&self, v: &Vector) -> Result<Vector> {
        check_dim(self.dim(), v.len())?;
        Ok(Vector(self.0.iter().zip(v.iter()).map(|(w, x)| w * x).collect()))
    }
}

/// Componentwise `max(0, v_i)`.
pub fn positive_part(v: &Vector) -> Vector {
    Vector(v.iter().map(|&x| if x > 0.0 { x } else { 0.0 }).collect())
}

/// `A·v`.
pub fn mat_vec(a: &Matrix, v: &Vector) -> Result<Vector> {
    check_dim(a.dim(), v.len())?;
    let out = (0..a.dim())
        .map(|i| a.row(i).iter().zip(v.iter()).map(|(x, y)| x * y).sum())
        .collect();
    Ok(Vector(out))
}

/// `max_i |v_i|`.
pub fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| f64::max(acc, x.abs()))
}

/// Solves `A x = b` by Gaussian elimination with partial (row) pivoting.
///
/// A pivot whose magnitude is at or below `PIVOT_THRESHOLD · max|A_ij|` is
/// reported as [`IcpError::Singular`]; the all-zero matrix is always
/// singular.
pub fn solve_linear(a: &Matrix, b: &Vector) -> Result<Vector> {
    let n = a.dim();
    check_dim(n, b.len())?;
    let threshold = PIVOT_THRESHOLD * a.max_abs();
    let mut lu = a.data.clone();
    let mut x = b.0.clone();

    for col in 0..n {
        let (pivot_row, pivot) = (col..n)
            .map(|r| (r, lu[r * n + col].abs()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot <= threshold {
            return Err(IcpError::Singular {
                column: col,
                pivot,
                threshold,
            });
        }
        if pivot_row != col {
            for j in 0..n {
                lu.swap(col * n + j, pivot_row * n + j);
            }
            x.swap(col, pivot_row);
        }
        let diag = lu[col * n + col];
        for r in col + 1..n {
            let factor = lu[r * n + col] / diag;
            if factor == 0.0 {
                continue;
            }
            lu[r * n + col] = 0.0;
            for j in col + 1..n {
                lu[r * n + j] -= factor * lu[col * n + j];
            }
            x[r] -= factor * x[col];
        }
    }

    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|j| lu[row * n + j] * x[j]).sum();
        x[row] = (x[row] - tail) / lu[row * n + row];
    }
    Ok(Vector(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(xs: &[f64]) -> Vector {
        Vector::new(xs.to_vec()).unwrap()
    }

    #[test]
    fn positive_part_examples() {
        assert_eq!(positive_part(&v(&[-1.0, 0.0, 2.0])), v(&[0.0, 0.0, 2.0]));
        assert_eq!(positive_part(&v(&[0.0, 0.0])), v(&[0.0, 0.0]));
        assert_eq!(positive_part(&v(&[-5.0])), v(&[0.0]));
    }

    #[test]
    fn positive_part_of_negative_zero_is_positive_zero() {
        let out = positive_part(&v(&[-0.0]));
        assert!(out[0].is_sign_positive());
    }

    #[test]
    fn mat_vec_examples() {
        assert_eq!(
            mat_vec(&Matrix::identity(2), &v(&[3.0, -2.0])).unwrap(),
            v(&[3.0, -2.0])
        );
        let a = Matrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap();
        assert_eq!(mat_vec(&a, &v(&[1.0, 1.0])).unwrap(), v(&[3.0, 3.0]));
        assert_eq!(
            mat_vec(&Matrix::zeros(3), &v(&[1.0, -7.0, 2.5])).unwrap(),
            v(&[0.0, 0.0, 0.0])
        );
    }

    #[test]
    fn mat_vec_dimension_mismatch() {
        let err = mat_vec(&Matrix::identity(2), &v(&[1.0, 2.0, 3.0])).unwrap_err();
        assert_eq!(err, IcpError::DimensionMismatch { expected: 2, found: 3 });
    }

    #[test]
    fn solve_linear_examples() {
        assert_eq!(
            solve_linear(&Matrix::identity(2), &v(&[4.0, -1.0])).unwrap(),
            v(&[4.0, -1.0])
        );
        let a = Matrix::from_rows(&[[2.0, 0.0], [0.0, 4.0]]).unwrap();
        assert_eq!(solve_linear(&a, &v(&[2.0, 8.0])).unwrap(), v(&[1.0, 2.0]));
        let err = solve_linear(&Matrix::zeros(2), &v(&[1.0, 1.0])).unwrap_err();
        assert!(matches!(err, IcpError::Singular { column: 0, .. }));
    }

    #[test]
    fn solve_linear_needs_pivoting() {
        let a = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert_eq!(solve_linear(&a, &v(&[3.0, 5.0])).unwrap(), v(&[5.0, 3.0]));
    }

    #[test]
    fn solve_linear_rank_deficient() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]).unwrap();
        assert!(matches!(
            solve_linear(&a, &v(&[1.0, 1.0])),
            Err(IcpError::Singular { column: 1, .. })
        ));
    }

    #[test]
    fn inf_norm_examples() {
        assert_eq!(inf_norm(&[0.0, 0.0, 0.0]), 0.0);
        assert_eq!(inf_norm(&[-3.0, 2.0]), 3.0);
        assert_eq!(inf_norm(&[1e-9]), 1e-9);
    }

    #[test]
    fn constructors_reject_bad_data() {
        assert_eq!(Vector::new(vec![]), Err(IcpError::Empty));
        assert!(matches!(
            Vector::new(vec![1.0, f64::NAN]),
            Err(IcpError::NonFinite { index: 1, .. })
        ));
        assert!(matches!(
            Matrix::from_row_major(2, vec![1.0; 3]),
            Err(IcpError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            Matrix::from_row_major(1, vec![f64::INFINITY]),
            Err(IcpError::NonFinite { .. })
        ));
        assert!(matches!(
            DiagonalScaling::new(vec![1.0, 0.0]),
            Err(IcpError::NonPositiveScaling { index: 1, .. })
        ));
        assert!(DiagonalScaling::new(vec![-2.0]).is_err());
    }

    fn diag_dominant(n: usize, entries: &[f64]) -> Matrix {
        let mut data = entries[..n * n].to_vec();
        for i in 0..n {
            let off: f64 = (0..n).filter(|&j| j != i).map(|j| data[i * n + j].abs()).sum();
            data[i * n + i] = off + 0.5 + data[i * n + i].abs();
        }
        Matrix::from_row_major(n, data).unwrap()
    }

    proptest! {
        #[test]
        fn positive_part_is_idempotent_and_dominates(xs in prop::collection::vec(-1e6f64..1e6, 1..32)) {
            let x = Vector::new(xs).unwrap();
            let p = positive_part(&x);
            prop_assert_eq!(positive_part(&p), p.clone());
            for (pi, xi) in p.iter().zip(x.iter()) {
                prop_assert!(*pi >= 0.0);
                prop_assert!(pi >= xi);
            }
        }

        #[test]
        fn solve_linear_small_residual(
            n in 1usize..=64,
            entries in prop::collection::vec(-1.0f64..1.0, 64 * 64),
            rhs in prop::collection::vec(-10.0f64..10.0, 64),
        ) {
            let a = diag_dominant(n, &entries);
            let b = Vector::new(rhs[..n].to_vec()).unwrap();
            let x = solve_linear(&a, &b).unwrap();
            let r = mat_vec(&a, &x).unwrap().sub(&b).unwrap();
            prop_assert!(r.inf_norm() <= 1e-10 * (1.0 + b.inf_norm()));
        }
    }
}
