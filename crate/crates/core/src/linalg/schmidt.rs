use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{Backend, LinalgError, Matrix};

/// `ψ = Σ λ_i α_i ⊗ β_i` with orthonormal `α_i`, `β_i` and `λ_i > 0` non-increasing.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    /// `d_A × rank`, columns are the `α_i`.
    pub left: Matrix,
    /// `d_B × rank`, columns are the `β_i`.
    pub right: Matrix,
}

impl SchmidtDecomposition {
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    /// Rebuilds `Σ λ_i α_i ⊗ β_i` as a column of length `d_A · d_B`.
    pub fn reconstruct(&self) -> Matrix {
        let (da, db) = (self.left.rows(), self.right.rows());
        let l = self.left.float_entries().expect("float");
        let r = self.right.float_entries().expect("float");
        let k = self.rank();
        let mut out = vec![Complex64::new(0.0, 0.0); da * db];
        for (i, lam) in self.coefficients.iter().enumerate() {
            for a in 0..da {
                for b in 0..db {
                    out[a * db + b] += l[a * k + i] * r[b * k + i] * *lam;
                }
            }
        }
        Matrix::from_float(da * db, 1, out).expect("length da*db")
    }
}

/// Schmidt decomposition of a bipartite state in `C^{d_A} ⊗ C^{d_B}` via the SVD of its
/// `d_A × d_B` coefficient matrix. Coefficients at or below `tol` are dropped.
pub fn schmidt_decompose(psi: &Matrix, da: usize, db: usize, tol: f64) -> Result<SchmidtDecomposition, LinalgError> {
    if psi.backend() != Backend::Float {
        return Err(LinalgError::UnsupportedBackend("Schmidt decomposition needs the float backend"));
    }
    if psi.cols() != 1 || psi.rows() != da * db {
        return Err(LinalgError::ShapeMismatch { op: "schmidt_decompose", left: psi.shape(), right: (da * db, 1) });
    }
    if psi.is_zero(tol) {
        return Err(LinalgError::ZeroVector);
    }
    let v = psi.float_entries().expect("float");
    // Row-major reshape: Ψ[a, b] = ψ[a·d_B + b], so ψ = Σ σ u ⊗ conj(v) for Ψ = U Σ V^*.
    let coeff = DMatrix::from_row_slice(da, db, v);
    let svd = coeff.svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^*");
    let mut order: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > tol)
        .collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let k = order.len();
    let coefficients = order.iter().map(|&i| svd.singular_values[i]).collect();
    let left = DMatrix::from_fn(da, k, |a, c| u[(a, order[c])]);
    let right = DMatrix::from_fn(db, k, |b, c| v_t[(order[c], b)]);
    Ok(SchmidtDecomposition {
        coefficients,
        left: Matrix::from_nalgebra(&left),
        right: Matrix::from_nalgebra(&right),
    })
}
