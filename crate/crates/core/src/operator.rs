//! Dense square complex matrices acting on the `N`-dimensional Hilbert space.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{ChordError, Result};

/// An `N × N` complex matrix with finite entries.
///
/// States, unitaries and translation operators all live here. Matrix
/// products go through [`ndarray`].
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    entries: Array2<Complex64>,
}

impl DenseOperator {
    pub fn new(entries: Array2<Complex64>) -> Result<Self> {
        let (rows, cols) = entries.dim();
        if rows != cols {
            return Err(ChordError::NotSquare { rows, cols });
        }
        if let Some(((row, col), _)) = entries
            .indexed_iter()
            .find(|(_, z)| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(ChordError::NonFinite { row, col });
        }
        Ok(Self { entries })
    }

    /// Wraps entries produced by code paths that cannot create non-finite values.
    pub(crate) fn from_array(entries: Array2<Complex64>) -> Self {
        debug_assert_eq!(entries.nrows(), entries.ncols());
        Self { entries }
    }

    pub fn from_fn(dim: usize, f: impl FnMut((usize, usize)) -> Complex64) -> Result<Self> {
        Self::new(Array2::from_shape_fn((dim, dim), f))
    }

    pub fn zeros(dim: usize) -> Self {
        Self { entries: Array2::zeros((dim, dim)) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { entries: Array2::eye(dim) }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Array2<Complex64> {
        &self.entries
    }

    pub fn into_entries(self) -> Array2<Complex64> {
        self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[[row, col]]
    }

    pub fn matmul(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.check_dim(other)?;
        Ok(Self::from_array(self.entries.dot(&other.entries)))
    }

    pub fn adjoint(&self) -> DenseOperator {
        Self::from_array(self.entries.t().mapv(|z| z.conj()))
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.diag().sum()
    }

    pub fn scale(&self, factor: Complex64) -> DenseOperator {
        Self::from_array(self.entries.mapv(|z| z * factor))
    }

    pub fn add(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.check_dim(other)?;
        Ok(Self::from_array(&self.entries + &other.entries))
    }

    pub fn sub(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.check_dim(other)?;
        Ok(Self::from_array(&self.entries - &other.entries))
    }

    /// `U · self · U†`.
    pub fn conjugate_by(&self, u: &DenseOperator) -> Result<DenseOperator> {
        self.check_dim(u)?;
        let left = u.entries.dot(&self.entries);
        Ok(Self::from_array(left.dot(&u.entries.t().mapv(|z| z.conj()))))
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &DenseOperator) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max-entry deviation of `self` from `self†`.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.entries[[i, j]] - self.entries[[j, i]].conj()).norm());
            }
        }
        worst
    }

    /// Max-entry deviation of `self† self` from the identity.
    pub fn unitarity_residual(&self) -> f64 {
        let gram = self.entries.t().mapv(|z| z.conj()).dot(&self.entries);
        gram.indexed_iter()
            .map(|((i, j), z)| {
                let target = if i == j { 1.0 } else { 0.0 };
                (z - target).norm()
            })
            .fold(0.0, f64::max)
    }

    fn check_dim(&self, other: &DenseOperator) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(ChordError::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }
}

/// Hilbert–Schmidt inner product `Tr(A† B)`.
pub fn hs_inner(a: &DenseOperator, b: &DenseOperator) -> Result<Complex64> {
    a.check_dim(b)?;
    Ok(a.entries
        .iter()
        .zip(b.entries.iter())
        .map(|(x, y)| x.conj() * y)
        .sum())
}

/// Eigenvalues of a Hermitian operator in ascending order.
pub fn hermitian_eigenvalues(op: &DenseOperator) -> Result<Vec<f64>> {
    let n = op.dim();
    let mat = faer::Mat::<Complex64>::from_fn(n, n, |i, j| op.get(i, j));
    let mut values = mat
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .map_err(|e| ChordError::EigenSolver(format!("{e:?}")))?;
    values.sort_by(f64::total_cmp);
    Ok(values)
}
