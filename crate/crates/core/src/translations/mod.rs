//! Correspondences between CSPs, relational structures, empirical models, boolean
//! constraint systems and graph homomorphism problems.

mod bcs;
mod csp;
mod graphs;

pub use bcs::{
    bcs_quantum_solution_verify, operator_to_projectors, projectors_to_operator, verify_operator_solution, Bcs,
    BoolConstraint, OperatorSolution,
};
pub use csp::{
    check_state_independent_witness, check_state_witness, csp_to_pair, empirical_to_csp, is_strongly_contextual,
    pair_to_csp, pvms_to_cert, CspConstraint, CspInstance, EmpiricalModel, MeasurementContext, Pvms,
};
pub use graphs::{
    bcs_solution_to_mr, graph_pair_to_bcs, ji_variable, mr_to_bcs_solution, verify_graph_qhom, verify_mr, Graph,
    GraphQhomReport, MrCert,
};

use thiserror::Error;

use crate::linalg::LinalgError;
use crate::monad::MonadError;
use crate::report::Report;
use crate::structures::StructureError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TranslationError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Monad(#[from] MonadError),
    #[error("{0}")]
    Invalid(String),
    #[error("unknown variable or measurement {0}")]
    UnknownVariable(String),
    #[error("unknown outcome or value {0}")]
    UnknownOutcome(String),
    #[error("{0} is missing")]
    Missing(String),
    #[error("operator for {0} is not a self-adjoint involution")]
    NotBinary(String),
    #[error("expected {expected}x{expected} matrices, found {found:?}")]
    DimensionMismatch { expected: usize, found: (usize, usize) },
    #[error("precondition failed:\n{0}")]
    Precondition(Report),
    #[error("input does not verify:\n{0}")]
    NotVerified(Report),
}

/// All tuples over `0..n` of the given length, in lexicographic order.
pub fn tuples(n: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = n.checked_pow(len as u32).unwrap_or(usize::MAX);
    (0..if n == 0 && len > 0 { 0 } else { total }).map(move |mut code| {
        let mut t = vec![0; len];
        for slot in t.iter_mut().rev() {
            *slot = code % n.max(1);
            code /= n.max(1);
        }
        t
    })
}
