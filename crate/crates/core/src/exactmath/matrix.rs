use std::fmt::Debug;

use crate::scalar::ExactInt;

use super::{ExactMathError, GaussianInteger};

/// Exact ring element stored in a [`Matrix`].
pub trait Ring: Clone + PartialEq + Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
}

impl<T: ExactInt> Ring for T {
    fn zero() -> Self {
        T::zero()
    }
    fn one() -> Self {
        T::one()
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self.add_exact(rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.sub_exact(rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        self.mul_exact(rhs)
    }
    fn neg(&self) -> Self {
        self.neg_exact()
    }
}

impl<T: ExactInt> Ring for GaussianInteger<T> {
    fn zero() -> Self {
        GaussianInteger::zero()
    }
    fn one() -> Self {
        GaussianInteger::one()
    }
    fn is_zero(&self) -> bool {
        GaussianInteger::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
}

/// Dense row-major matrix over an exact ring.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

/// Integer matrix (the `S` and `A` parts of a Hamiltonian).
pub type IntMatrix<T> = Matrix<T>;

/// Gaussian-integer matrix (Hamiltonians and commutant candidates).
pub type GaussianMatrix<T> = Matrix<GaussianInteger<T>>;

impl<E: Ring> Matrix<E> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![E::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m.data[k * n + k] = E::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Build from a list of rows; all rows must share one length.
    pub fn from_rows(rows: Vec<Vec<E>>) -> Result<Self, ExactMathError> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if nrows == 0 || ncols == 0 {
            return Err(ExactMathError::Empty);
        }
        let mut data = Vec::with_capacity(nrows * ncols);
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != ncols {
                return Err(ExactMathError::RaggedRow {
                    row: r,
                    len: row.len(),
                    expected: ncols,
                });
            }
            data.extend(row);
        }
        Ok(Self {
            rows: nrows,
            cols: ncols,
            data,
        })
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

    pub fn get(&self, r: usize, c: usize) -> &E {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: E) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[E] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn entries(&self) -> &[E] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Ring::is_zero)
    }

    pub fn map<F: Ring>(&self, f: impl Fn(&E) -> F) -> Matrix<F> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    fn same_shape(&self, rhs: &Self) -> Result<(), ExactMathError> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(ExactMathError::DimensionMismatch {
                left: (self.rows, self.cols),
                right: (rhs.rows, rhs.cols),
            });
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, ExactMathError> {
        self.same_shape(rhs)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, ExactMathError> {
        self.same_shape(rhs)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.sub(b)).collect(),
        })
    }

    pub fn scale(&self, k: &E) -> Self {
        self.map(|e| e.mul(k))
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, ExactMathError> {
        if self.cols != rhs.rows {
            return Err(ExactMathError::DimensionMismatch {
                left: (self.rows, self.cols),
                right: (rhs.rows, rhs.cols),
            });
        }
        Ok(Self::from_fn(self.rows, rhs.cols, |r, c| {
            (0..self.cols).fold(E::zero(), |acc, k| acc.add(&self.get(r, k).mul(rhs.get(k, c))))
        }))
    }

    /// Exact matrix-vector product.
    pub fn matvec(&self, v: &[E]) -> Result<Vec<E>, ExactMathError> {
        if v.len() != self.cols {
            return Err(ExactMathError::DimensionMismatch {
                left: (self.rows, self.cols),
                right: (v.len(), 1),
            });
        }
        Ok(self.matvec_unchecked(v))
    }

    pub(crate) fn matvec_unchecked(&self, v: &[E]) -> Vec<E> {
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(m, _)| !m.is_zero())
                    .fold(E::zero(), |acc, (m, x)| acc.add(&m.mul(x)))
            })
            .collect()
    }

    /// `self^k` by repeated squaring.
    pub fn pow(&self, mut k: u32) -> Result<Self, ExactMathError> {
        if !self.is_square() {
            return Err(ExactMathError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            base = base.mul(&base)?;
            k >>= 1;
        }
        Ok(acc)
    }
}

/// Exact matrix-vector product `M v`.
pub fn matvec<E: Ring>(m: &Matrix<E>, v: &[E]) -> Result<Vec<E>, ExactMathError> {
    m.matvec(v)
}

impl<T: ExactInt> GaussianMatrix<T> {
    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.is_square() && *self == self.conj_transpose()
    }

    /// Real parts as an integer matrix.
    pub fn real_part(&self) -> IntMatrix<T> {
        self.map(|z| z.re.clone())
    }

    /// Imaginary parts as an integer matrix.
    pub fn imag_part(&self) -> IntMatrix<T> {
        self.map(|z| z.im.clone())
    }

    pub fn max_magnitude_bits(&self) -> u64 {
        self.data.iter().map(GaussianInteger::magnitude_bits).max().unwrap_or(0)
    }
}

impl<T: ExactInt> IntMatrix<T> {
    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self, ExactMathError> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| T::from_i64(v)).collect())
                .collect(),
        )
    }

    pub fn to_gaussian(&self) -> GaussianMatrix<T> {
        self.map(|v| GaussianInteger::real(v.clone()))
    }

    pub fn is_symmetric(&self) -> bool {
        self.first_asymmetry(false).is_none()
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.first_asymmetry(true).is_none()
    }

    /// First `(r, c)` breaking `M = ±Mᵀ`.
    pub(crate) fn first_asymmetry(&self, anti: bool) -> Option<(usize, usize)> {
        if !self.is_square() {
            return Some((0, 0));
        }
        for r in 0..self.rows {
            for c in r..self.cols {
                let mirrored = if anti {
                    self.get(c, r).neg_exact()
                } else {
                    self.get(c, r).clone()
                };
                if *self.get(r, c) != mirrored {
                    return Some((r, c));
                }
            }
        }
        None
    }
}
