//! Exact and floating-point complex matrix algebra.
//!
//! The exact backend works over Gaussian rationals so that projector identities,
//! commutators and orthogonality can be tested for exact equality with zero. The float
//! backend exists for Schmidt decompositions and arbitrary states.

mod matrix;
mod scalar;
mod schmidt;

pub use matrix::{Backend, Matrix};
pub use scalar::{format_rational, parse_rational, rational, rational_to_f64, GaussRat, Rational, Scalar};
pub use schmidt::{schmidt_decompose, SchmidtDecomposition};

use thiserror::Error;

/// Default absolute tolerance for float comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("mixed exact/float arithmetic")]
    BackendMismatch,
    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix of shape {0:?} is not square")]
    NotSquare((usize, usize)),
    #[error("{rows}x{cols} matrix given {len} entries")]
    EntryCount { rows: usize, cols: usize, len: usize },
    #[error("matrices must have at least one row and one column")]
    EmptyShape,
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero vector")]
    ZeroVector,
    #[error("operation unsupported on this backend: {0}")]
    UnsupportedBackend(&'static str),
    #[error("matrix is not positive semidefinite")]
    NotPsd,
    #[error("{0}")]
    Parse(String),
}

/// Tests `Tr(AB) = 0` for positive semidefinite `A`, `B`.
///
/// For PSD pairs this coincides with `AB = 0`. On the float backend both inputs are
/// eigenvalue-checked first; on the exact backend positivity is the caller's claim.
pub fn psd_trace_orthogonal(a: &Matrix, b: &Matrix, tol: f64) -> Result<bool, LinalgError> {
    if a.shape() != b.shape() {
        return Err(LinalgError::ShapeMismatch { op: "psd_trace_orthogonal", left: a.shape(), right: b.shape() });
    }
    if a.backend() == Backend::Float && !(a.is_psd(tol)? && b.is_psd(tol)?) {
        return Err(LinalgError::NotPsd);
    }
    Ok(a.matmul(b)?.trace()?.is_zero(tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> Matrix {
        Matrix::from_ints(2, 2, &[1, 0, 0, -1])
    }

    fn x() -> Matrix {
        Matrix::from_ints(2, 2, &[0, 1, 1, 0])
    }

    fn half() -> Rational {
        rational(1, 2)
    }

    #[test]
    fn kron_examples() {
        let i2 = Matrix::identity(2, Backend::Exact);
        assert_eq!(i2.kron(&i2).unwrap(), Matrix::identity(4, Backend::Exact));
        // Z ⊗ Z expanded entrywise by hand.
        let zz = Matrix::from_ints(4, 4, &[1, 0, 0, 0, 0, -1, 0, 0, 0, 0, -1, 0, 0, 0, 0, 1]);
        assert_eq!(z().kron(&z()).unwrap(), zz);
        let zero = Matrix::zeros(2, 2, Backend::Exact);
        let m = Matrix::from_gaussian_ints(2, 3, &[(1, 2), (0, 0), (3, 0), (0, -1), (5, 5), (2, 0)]);
        assert!(zero.kron(&m).unwrap().is_zero(0.0));
        assert_eq!(zero.kron(&m).unwrap().shape(), (4, 6));
        assert_eq!(z().kron(&z().to_float()), Err(LinalgError::BackendMismatch));
    }

    #[test]
    fn vec_examples() {
        let i2 = Matrix::identity(2, Backend::Exact);
        assert_eq!(i2.vec(), Matrix::from_ints(4, 1, &[1, 0, 0, 1]));
        let m = Matrix::from_ints(2, 2, &[1, 2, 3, 4]);
        assert_eq!(m.vec(), Matrix::from_ints(4, 1, &[1, 3, 2, 4]));
    }

    #[test]
    fn projector_examples() {
        assert!(Matrix::identity(3, Backend::Exact).is_projector(0.0).unwrap());
        let i2 = Matrix::identity(2, Backend::Exact);
        let p = i2.checked_add(&z()).unwrap().scale_rational(&half());
        assert!(p.is_projector(0.0).unwrap());
        assert!(!i2.scale_rational(&half()).is_projector(0.0).unwrap());
        let rect = Matrix::from_ints(1, 2, &[1, 0]);
        assert!(matches!(rect.is_projector(0.0), Err(LinalgError::NotSquare(_))));
        assert!(p.to_float().is_projector(DEFAULT_TOL).unwrap());
    }

    #[test]
    fn commutator_examples() {
        let m = Matrix::from_gaussian_ints(2, 2, &[(1, 1), (2, 0), (0, -3), (4, 0)]);
        let i2 = Matrix::identity(2, Backend::Exact);
        assert!(i2.commutator(&m).unwrap().is_zero(0.0));
        // XZ - ZX = 2XZ since ZX = -XZ.
        let xz = x().matmul(&z()).unwrap();
        let c = x().commutator(&z()).unwrap();
        assert_eq!(c, xz.scale_rational(&rational(2, 1)));
        assert!(!c.is_zero(0.0));
        let zi = z().kron(&i2).unwrap();
        let ix = i2.kron(&x()).unwrap();
        assert!(zi.commutator(&ix).unwrap().is_zero(0.0));
        assert!(z().commutator(&Matrix::identity(3, Backend::Exact)).is_err());
    }

    #[test]
    fn psd_trace_examples() {
        let a = Matrix::from_ints(2, 2, &[1, 0, 0, 0]);
        let b = Matrix::from_ints(2, 2, &[0, 0, 0, 1]);
        assert!(psd_trace_orthogonal(&a, &b, 0.0).unwrap());
        assert!(a.matmul(&b).unwrap().is_zero(0.0));
        let i2 = Matrix::identity(2, Backend::Exact);
        assert!(!psd_trace_orthogonal(&i2, &i2, 0.0).unwrap());
        // P = |0><0|, Q = |+><+|: Tr(PQ) = 1/2.
        let q = Matrix::from_ints(2, 2, &[1, 1, 1, 1]).scale_rational(&half());
        assert!(!psd_trace_orthogonal(&a, &q, 0.0).unwrap());
        assert!(psd_trace_orthogonal(&a, &Matrix::identity(3, Backend::Exact), 0.0).is_err());
        let neg = Matrix::from_ints(2, 2, &[-1, 0, 0, 0]).to_float();
        assert_eq!(psd_trace_orthogonal(&neg, &b.to_float(), DEFAULT_TOL), Err(LinalgError::NotPsd));
    }

    #[test]
    fn exact_psd_test() {
        assert!(Matrix::from_ints(2, 2, &[1, 1, 1, 1]).is_psd(0.0).unwrap());
        assert!(!Matrix::from_ints(2, 2, &[1, 2, 2, 1]).is_psd(0.0).unwrap());
        assert!(!Matrix::from_ints(2, 2, &[0, 1, 1, 0]).is_psd(0.0).unwrap());
        assert!(Matrix::from_ints(3, 3, &[0, 0, 0, 0, 2, 1, 0, 1, 1]).is_psd(0.0).unwrap());
        let y = Matrix::from_gaussian_ints(2, 2, &[(0, 0), (0, -1), (0, 1), (0, 0)]);
        let i2 = Matrix::identity(2, Backend::Exact);
        assert!(i2.checked_add(&y).unwrap().is_psd(0.0).unwrap());
        assert!(!y.is_psd(0.0).unwrap());
        // Non-Hermitian input is never PSD.
        assert!(!Matrix::from_ints(2, 2, &[1, 1, 0, 1]).is_psd(0.0).unwrap());
    }

    #[test]
    fn rank_agrees_across_backends() {
        let m = Matrix::from_ints(3, 3, &[1, 2, 3, 2, 4, 6, 0, 1, 1]);
        assert_eq!(m.rank(0.0), 2);
        assert_eq!(m.to_float().rank(DEFAULT_TOL), 2);
        assert_eq!(Matrix::identity(4, Backend::Exact).rank(0.0), 4);
        assert_eq!(Matrix::zeros(2, 3, Backend::Exact).rank(0.0), 0);
    }
}
