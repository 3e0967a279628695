//! Exact vectorization identities and a float Schmidt decomposition.

use qmonad::linalg::{psd_trace_orthogonal, rational, schmidt_decompose, Backend, Matrix};

fn main() {
    let a = Matrix::from_gaussian_ints(2, 2, &[(1, 0), (0, 1), (2, 0), (-1, 0)]);
    let b = Matrix::from_ints(2, 2, &[0, 1, 1, 0]);
    let c = Matrix::from_ints(2, 2, &[1, 2, 3, 4]);

    let lhs = a.kron(&b).unwrap().matmul(&c.vec()).unwrap();
    let rhs = b.matmul(&c).unwrap().matmul(&a.transpose()).unwrap().vec();
    println!("(A⊗B)vec(C) = vec(BCA^T): {}", lhs == rhs);

    let inner = a.vec().adjoint().matmul(&c.vec()).unwrap().get(0, 0);
    let trace = a.adjoint().matmul(&c).unwrap().trace().unwrap();
    println!("vec(A)^*vec(C) = {inner}, Tr(A^*C) = {trace}");

    let half = rational(1, 2);
    let z = Matrix::from_ints(2, 2, &[1, 0, 0, -1]);
    let id = Matrix::identity(2, Backend::Exact);
    let up = id.checked_add(&z).unwrap().scale_rational(&half);
    let down = id.checked_sub(&z).unwrap().scale_rational(&half);
    println!("Tr(P0 P1) = 0: {}", psd_trace_orthogonal(&up, &down, 0.0).unwrap());

    // 3e0⊗e0 + 4e1⊗e1 is already in Schmidt form.
    let psi = Matrix::from_ints(4, 1, &[3, 0, 0, 4]).to_float();
    let s = schmidt_decompose(&psi, 2, 2, 1e-12).unwrap();
    println!("Schmidt coefficients {:?}, rank {}", s.coefficients, s.rank());
}
