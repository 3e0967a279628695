use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{Signed, Zero};

use super::scalar::{rational_to_f64, GaussRat, Rational, Scalar};
use super::LinalgError;

/// Which scalar field a matrix lives over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Backend {
    Exact,
    Float,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Exact => "exact",
            Backend::Float => "float",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Entries {
    Exact(Vec<GaussRat>),
    Float(Vec<Complex64>),
}

/// Dense complex matrix, row-major, over the exact Gaussian rationals or `f64`.
///
/// Mixed-backend arithmetic is an error; convert explicitly with [`Matrix::to_float`].
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Entries,
}

impl Matrix {
    pub fn from_exact(rows: usize, cols: usize, entries: Vec<GaussRat>) -> Result<Self, LinalgError> {
        check_len(rows, cols, entries.len())?;
        Ok(Self { rows, cols, entries: Entries::Exact(entries) })
    }

    pub fn from_float(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self, LinalgError> {
        check_len(rows, cols, entries.len())?;
        Ok(Self { rows, cols, entries: Entries::Float(entries) })
    }

    /// Exact matrix with integer entries. Panics on a length mismatch; meant for literals.
    pub fn from_ints(rows: usize, cols: usize, entries: &[i64]) -> Self {
        Self::from_exact(rows, cols, entries.iter().map(|&v| GaussRat::from_int(v)).collect())
            .expect("entry count must equal rows * cols")
    }

    /// Exact matrix with Gaussian-integer entries given as `(re, im)` pairs.
    pub fn from_gaussian_ints(rows: usize, cols: usize, entries: &[(i64, i64)]) -> Self {
        Self::from_exact(rows, cols, entries.iter().map(|&(r, i)| GaussRat::from_ints(r, i)).collect())
            .expect("entry count must equal rows * cols")
    }

    pub fn zeros(rows: usize, cols: usize, backend: Backend) -> Self {
        let n = rows * cols;
        let entries = match backend {
            Backend::Exact => Entries::Exact(vec![GaussRat::zero(); n]),
            Backend::Float => Entries::Float(vec![Complex64::zero(); n]),
        };
        Self { rows, cols, entries }
    }

    pub fn identity(n: usize, backend: Backend) -> Self {
        let mut m = Self::zeros(n, n, backend);
        for i in 0..n {
            m.set_one(i, i);
        }
        m
    }

    /// Standard basis column vector `e_i` of length `n`.
    pub fn basis(n: usize, i: usize, backend: Backend) -> Self {
        let mut m = Self::zeros(n, 1, backend);
        m.set_one(i, 0);
        m
    }

    /// Diagonal matrix; entries copied from a list of scalars of one backend.
    pub fn diagonal(diag: &[GaussRat]) -> Self {
        let n = diag.len();
        let mut entries = vec![GaussRat::zero(); n * n];
        for (i, v) in diag.iter().enumerate() {
            entries[i * n + i] = v.clone();
        }
        Self { rows: n, cols: n, entries: Entries::Exact(entries) }
    }

    fn set_one(&mut self, r: usize, c: usize) {
        let idx = r * self.cols + c;
        match &mut self.entries {
            Entries::Exact(v) => v[idx] = GaussRat::one(),
            Entries::Float(v) => v[idx] = Complex64::new(1.0, 0.0),
        }
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

    pub fn backend(&self) -> Backend {
        match self.entries {
            Entries::Exact(_) => Backend::Exact,
            Entries::Float(_) => Backend::Float,
        }
    }

    pub fn exact_entries(&self) -> Option<&[GaussRat]> {
        match &self.entries {
            Entries::Exact(v) => Some(v),
            Entries::Float(_) => None,
        }
    }

    pub fn float_entries(&self) -> Option<&[Complex64]> {
        match &self.entries {
            Entries::Float(v) => Some(v),
            Entries::Exact(_) => None,
        }
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        let idx = r * self.cols + c;
        match &self.entries {
            Entries::Exact(v) => Scalar::Exact(v[idx].clone()),
            Entries::Float(v) => Scalar::Float(v[idx]),
        }
    }

    pub fn to_float(&self) -> Matrix {
        match &self.entries {
            Entries::Float(_) => self.clone(),
            Entries::Exact(v) => Self {
                rows: self.rows,
                cols: self.cols,
                entries: Entries::Float(v.iter().map(GaussRat::to_complex).collect()),
            },
        }
    }

    /// Converts to the requested backend. Only exact-to-float (or identity) is possible.
    pub fn to_backend(&self, backend: Backend) -> Result<Matrix, LinalgError> {
        match (self.backend(), backend) {
            (a, b) if a == b => Ok(self.clone()),
            (Backend::Exact, Backend::Float) => Ok(self.to_float()),
            _ => Err(LinalgError::UnsupportedBackend("float to exact conversion")),
        }
    }

    fn same_shape(&self, other: &Matrix, op: &'static str) -> Result<(), LinalgError> {
        if self.shape() != other.shape() {
            return Err(LinalgError::ShapeMismatch { op, left: self.shape(), right: other.shape() });
        }
        Ok(())
    }

    fn zip_with(
        &self,
        other: &Matrix,
        op: &'static str,
        fe: impl Fn(&GaussRat, &GaussRat) -> GaussRat,
        ff: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Matrix, LinalgError> {
        self.same_shape(other, op)?;
        let entries = match (&self.entries, &other.entries) {
            (Entries::Exact(a), Entries::Exact(b)) => {
                Entries::Exact(a.iter().zip(b).map(|(x, y)| fe(x, y)).collect())
            }
            (Entries::Float(a), Entries::Float(b)) => {
                Entries::Float(a.iter().zip(b).map(|(x, y)| ff(*x, *y)).collect())
            }
            _ => return Err(LinalgError::BackendMismatch),
        };
        Ok(Matrix { rows: self.rows, cols: self.cols, entries })
    }

    pub fn checked_add(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.zip_with(other, "add", |a, b| a + b, |a, b| a + b)
    }

    pub fn checked_sub(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.zip_with(other, "sub", |a, b| a - b, |a, b| a - b)
    }

    pub fn neg(&self) -> Matrix {
        self.map(|x| -x, |x| -x)
    }

    fn map(&self, fe: impl Fn(&GaussRat) -> GaussRat, ff: impl Fn(Complex64) -> Complex64) -> Matrix {
        let entries = match &self.entries {
            Entries::Exact(v) => Entries::Exact(v.iter().map(fe).collect()),
            Entries::Float(v) => Entries::Float(v.iter().map(|x| ff(*x)).collect()),
        };
        Matrix { rows: self.rows, cols: self.cols, entries }
    }

    /// Multiplies every entry by a rational; works on both backends.
    pub fn scale_rational(&self, k: &Rational) -> Matrix {
        let kf = rational_to_f64(k);
        self.map(|x| x.scale(k), |x| x * kf)
    }

    pub fn scale(&self, k: &Scalar) -> Result<Matrix, LinalgError> {
        match (k, self.backend()) {
            (Scalar::Exact(g), Backend::Exact) => Ok(self.map(|x| x * g, |x| x)),
            (Scalar::Float(c), Backend::Float) => Ok(self.map(|x| x.clone(), |x| x * c)),
            _ => Err(LinalgError::BackendMismatch),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let (r, c) = (self.rows, self.cols);
        let entries = match &self.entries {
            Entries::Exact(v) => {
                Entries::Exact((0..r * c).map(|k| v[(k % r) * c + k / r].clone()).collect())
            }
            Entries::Float(v) => Entries::Float((0..r * c).map(|k| v[(k % r) * c + k / r]).collect()),
        };
        Matrix { rows: c, cols: r, entries }
    }

    pub fn conj(&self) -> Matrix {
        self.map(GaussRat::conj, |x| x.conj())
    }

    /// Conjugate transpose `A^*`.
    pub fn adjoint(&self) -> Matrix {
        self.transpose().conj()
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::ShapeMismatch { op: "matmul", left: self.shape(), right: other.shape() });
        }
        let (n, m, p) = (self.rows, self.cols, other.cols);
        let entries = match (&self.entries, &other.entries) {
            (Entries::Exact(a), Entries::Exact(b)) => {
                let mut out = vec![GaussRat::zero(); n * p];
                for i in 0..n {
                    for k in 0..m {
                        let aik = &a[i * m + k];
                        if aik.is_zero() {
                            continue;
                        }
                        for j in 0..p {
                            let bkj = &b[k * p + j];
                            if !bkj.is_zero() {
                                out[i * p + j] += &(aik * bkj);
                            }
                        }
                    }
                }
                Entries::Exact(out)
            }
            (Entries::Float(a), Entries::Float(b)) => {
                let mut out = vec![Complex64::zero(); n * p];
                for i in 0..n {
                    for k in 0..m {
                        let aik = a[i * m + k];
                        for j in 0..p {
                            out[i * p + j] += aik * b[k * p + j];
                        }
                    }
                }
                Entries::Float(out)
            }
            _ => return Err(LinalgError::BackendMismatch),
        };
        Ok(Matrix { rows: n, cols: p, entries })
    }

    /// Kronecker product `A ⊗ B = [a_ij B]`.
    pub fn kron(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        let (m, n, p, q) = (self.rows, self.cols, other.rows, other.cols);
        let (rows, cols) = (m * p, n * q);
        let idx = |i: usize, j: usize, k: usize, l: usize| (i * p + k) * cols + j * q + l;
        let entries = match (&self.entries, &other.entries) {
            (Entries::Exact(a), Entries::Exact(b)) => {
                let mut out = vec![GaussRat::zero(); rows * cols];
                for i in 0..m {
                    for j in 0..n {
                        let aij = &a[i * n + j];
                        if aij.is_zero() {
                            continue;
                        }
                        for k in 0..p {
                            for l in 0..q {
                                out[idx(i, j, k, l)] = aij * &b[k * q + l];
                            }
                        }
                    }
                }
                Entries::Exact(out)
            }
            (Entries::Float(a), Entries::Float(b)) => {
                let mut out = vec![Complex64::zero(); rows * cols];
                for i in 0..m {
                    for j in 0..n {
                        for k in 0..p {
                            for l in 0..q {
                                out[idx(i, j, k, l)] = a[i * n + j] * b[k * q + l];
                            }
                        }
                    }
                }
                Entries::Float(out)
            }
            _ => return Err(LinalgError::BackendMismatch),
        };
        Ok(Matrix { rows, cols, entries })
    }

    /// Column-stacking vectorization.
    pub fn vec(&self) -> Matrix {
        let t = self.transpose();
        Matrix { rows: self.rows * self.cols, cols: 1, entries: t.entries }
    }

    /// Reshapes a column of length `r * c` into an `r × c` matrix, row-major.
    pub fn reshape(&self, rows: usize, cols: usize) -> Result<Matrix, LinalgError> {
        check_len(rows, cols, self.rows * self.cols)?;
        Ok(Matrix { rows, cols, entries: self.entries.clone() })
    }

    pub fn trace(&self) -> Result<Scalar, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare(self.shape()));
        }
        let n = self.rows;
        Ok(match &self.entries {
            Entries::Exact(v) => {
                let mut acc = GaussRat::zero();
                for i in 0..n {
                    acc += &v[i * n + i];
                }
                Scalar::Exact(acc)
            }
            Entries::Float(v) => Scalar::Float((0..n).map(|i| v[i * n + i]).sum()),
        })
    }

    /// `PQ - QP`.
    pub fn commutator(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare(self.shape()));
        }
        self.same_shape(other, "commutator")?;
        self.matmul(other)?.checked_sub(&other.matmul(self)?)
    }

    /// Exact backend: every entry is zero. Float backend: every modulus is at most `tol`.
    pub fn is_zero(&self, tol: f64) -> bool {
        match &self.entries {
            Entries::Exact(v) => v.iter().all(GaussRat::is_zero),
            Entries::Float(v) => v.iter().all(|x| x.norm() <= tol),
        }
    }

    /// Entrywise equality; exact on the exact backend. Shape or backend mismatch is `false`.
    pub fn approx_eq(&self, other: &Matrix, tol: f64) -> bool {
        if self.shape() != other.shape() {
            return false;
        }
        match (&self.entries, &other.entries) {
            (Entries::Exact(a), Entries::Exact(b)) => a == b,
            (Entries::Float(a), Entries::Float(b)) => a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol),
            _ => false,
        }
    }

    /// Largest entry modulus, as `f64`.
    pub fn max_abs(&self) -> f64 {
        match &self.entries {
            Entries::Exact(v) => v.iter().map(|x| x.to_complex().norm()).fold(0.0, f64::max),
            Entries::Float(v) => v.iter().map(|x| x.norm()).fold(0.0, f64::max),
        }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.approx_eq(&self.adjoint(), tol)
    }

    pub fn is_projector(&self, tol: f64) -> Result<bool, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare(self.shape()));
        }
        Ok(self.is_hermitian(tol) && self.approx_eq(&self.matmul(self)?, tol))
    }

    /// Positive semidefiniteness.
    ///
    /// Float: Hermitian within `tol` and smallest eigenvalue at least `-tol`.
    /// Exact: Hermitian and a symmetric Gaussian elimination meets no negative pivot and no
    /// zero pivot with a nonzero remainder row, which is an exact test for Hermitian matrices.
    pub fn is_psd(&self, tol: f64) -> Result<bool, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare(self.shape()));
        }
        if !self.is_hermitian(tol) {
            return Ok(false);
        }
        match &self.entries {
            Entries::Float(_) => Ok(self.min_eigenvalue()? >= -tol),
            Entries::Exact(v) => Ok(exact_psd(self.rows, v.clone())),
        }
    }

    /// Rank by exact elimination, or by counting singular values above `tol` on the float backend.
    pub fn rank(&self, tol: f64) -> usize {
        match &self.entries {
            Entries::Float(_) => {
                let m = self.to_nalgebra().expect("float conversion");
                m.singular_values().iter().filter(|s| **s > tol).count()
            }
            Entries::Exact(v) => exact_rank(self.rows, self.cols, v.clone()),
        }
    }

    /// Smallest eigenvalue of a Hermitian matrix (computed on the float backend).
    pub fn min_eigenvalue(&self) -> Result<f64, LinalgError> {
        let m = self.to_nalgebra()?;
        let eig = m.symmetric_eigen();
        Ok(eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
    }

    pub(crate) fn to_nalgebra(&self) -> Result<DMatrix<Complex64>, LinalgError> {
        let f = self.to_float();
        let v = f.float_entries().expect("converted to float");
        Ok(DMatrix::from_row_slice(self.rows, self.cols, v))
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<Complex64>) -> Matrix {
        let (rows, cols) = m.shape();
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(m[(i, j)]);
            }
        }
        Matrix { rows, cols, entries: Entries::Float(entries) }
    }

    /// Sums same-shape matrices; an empty iterator yields the zero matrix of the given shape.
    pub fn sum<'a>(
        items: impl IntoIterator<Item = &'a Matrix>,
        rows: usize,
        cols: usize,
        backend: Backend,
    ) -> Result<Matrix, LinalgError> {
        let mut acc = Matrix::zeros(rows, cols, backend);
        for m in items {
            acc = acc.checked_add(m)?;
        }
        Ok(acc)
    }

    /// Product of a non-empty list of matrices, left to right.
    pub fn product<'a>(items: impl IntoIterator<Item = &'a Matrix>) -> Result<Option<Matrix>, LinalgError> {
        let mut it = items.into_iter();
        let Some(first) = it.next() else { return Ok(None) };
        let mut acc = first.clone();
        for m in it {
            acc = acc.matmul(m)?;
        }
        Ok(Some(acc))
    }

    /// Copies this matrix into the top-left corner of a larger zero matrix.
    pub fn embed(&self, rows: usize, cols: usize) -> Result<Matrix, LinalgError> {
        if rows < self.rows || cols < self.cols {
            return Err(LinalgError::ShapeMismatch { op: "embed", left: self.shape(), right: (rows, cols) });
        }
        let mut out = Matrix::zeros(rows, cols, self.backend());
        match (&mut out.entries, &self.entries) {
            (Entries::Exact(o), Entries::Exact(s)) => {
                for i in 0..self.rows {
                    for j in 0..self.cols {
                        o[i * cols + j] = s[i * self.cols + j].clone();
                    }
                }
            }
            (Entries::Float(o), Entries::Float(s)) => {
                for i in 0..self.rows {
                    for j in 0..self.cols {
                        o[i * cols + j] = s[i * self.cols + j];
                    }
                }
            }
            _ => unreachable!("zeros built with the same backend"),
        }
        Ok(out)
    }
}

fn check_len(rows: usize, cols: usize, len: usize) -> Result<(), LinalgError> {
    if rows == 0 || cols == 0 {
        return Err(LinalgError::EmptyShape);
    }
    if rows * cols != len {
        return Err(LinalgError::EntryCount { rows, cols, len });
    }
    Ok(())
}

fn exact_rank(rows: usize, cols: usize, mut a: Vec<GaussRat>) -> usize {
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !a[r * cols + c].is_zero()) else { continue };
        for j in 0..cols {
            a.swap(p * cols + j, rank * cols + j);
        }
        let pivot = a[rank * cols + c].clone();
        for r in rank + 1..rows {
            let factor = a[r * cols + c].checked_div(&pivot).expect("nonzero pivot");
            if factor.is_zero() {
                continue;
            }
            for j in c..cols {
                let delta = &factor * &a[rank * cols + j];
                a[r * cols + j] = &a[r * cols + j] - &delta;
            }
        }
        rank += 1;
    }
    rank
}

fn exact_psd(n: usize, mut a: Vec<GaussRat>) -> bool {
    for k in 0..n {
        let pivot = a[k * n + k].clone();
        // Hermitian input keeps diagonal entries real through elimination.
        if pivot.re.is_negative() {
            return false;
        }
        if pivot.re.is_zero() {
            if (k + 1..n).any(|j| !a[k * n + j].is_zero()) {
                return false;
            }
            continue;
        }
        for i in k + 1..n {
            let factor = a[i * n + k].checked_div(&pivot).expect("nonzero pivot");
            if factor.is_zero() {
                continue;
            }
            for j in k..n {
                let delta = &factor * &a[k * n + j];
                a[i * n + j] = &a[i * n + j] - &delta;
            }
        }
    }
    true
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}
