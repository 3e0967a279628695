//! Projector-valued distributions and the graded quantum monad.
//!
//! `Q_d A` is never materialized; only the distributions and certificates in play are
//! represented. A [`QDistribution`] is keyed by element indices of some base structure,
//! and nesting `ProjDist<QDistribution>` gives elements of `Q_d Q_d' A`.

mod cert;
mod dist;

pub use cert::{cert_to_kleisli, is_classical_homomorphism, kleisli_compose, kleisli_to_cert, verify_qhom, QHomCert};
pub use dist::ProjDist;

use thiserror::Error;

use crate::linalg::{Backend, LinalgError, Matrix};
use crate::report::{Condition, Report};
use crate::structures::{is_homomorphism, terminal, Homomorphism, Signature, Structure, StructureError};

/// A projector-valued distribution over the universe of a structure.
pub type QDistribution = ProjDist<usize>;

/// An element of `Q_d Q_d' A`.
pub type NestedQDistribution = ProjDist<QDistribution>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MonadError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("expected {expected}x{expected} matrices, found {found:?}")]
    DimensionMismatch { expected: usize, found: (usize, usize) },
    #[error("key appears twice in a distribution")]
    DuplicateKey,
    #[error("distribution has empty support")]
    EmptySupport,
    #[error("element index {0} is not in the base structure")]
    UnknownElement(usize),
    #[error("tuple of length {found} for relation of arity {arity}")]
    ArityMismatch { arity: usize, found: usize },
    #[error("base structures do not match")]
    BaseMismatch,
    #[error("map is not a homomorphism")]
    NotHomomorphism,
    #[error("invalid certificate:\n{0}")]
    InvalidCertificate(Report),
    #[error("invalid distribution:\n{0}")]
    InvalidDistribution(Report),
}

fn check_keys(p: &QDistribution, base: &Structure) -> Result<(), MonadError> {
    match p.keys().find(|&&k| k >= base.size()) {
        Some(&k) => Err(MonadError::UnknownElement(k)),
        None => Ok(()),
    }
}

/// Generic normalization check: every value a projector and the values summing to `I`.
pub fn verify_dist<K: PartialEq>(p: &ProjDist<K>, tol: f64, label: impl Fn(&K) -> String) -> Result<Report, MonadError> {
    let mut report = Report::new();
    for (k, m) in p.support() {
        if !m.is_projector(tol)? {
            report.push(Condition::Projector, label(k), "value is not a projector");
        }
    }
    let total = p.total()?;
    if !total.approx_eq(&Matrix::identity(p.dim(), total.backend()), tol) {
        report.push(Condition::Normalization, "support", "values do not sum to the identity");
    }
    Ok(report)
}

/// Checks that `p` is an element of `Q_d A` for the given base.
pub fn verify_qdist(p: &QDistribution, base: &Structure, tol: f64) -> Result<Report, MonadError> {
    check_keys(p, base)?;
    verify_dist(p, tol, |&k| format!("x={}", base.name(k)))
}

/// Checks `(p_1, …, p_k) ∈ R^{Q_d A}`: cross-commutation of all values (QR1) and
/// vanishing products over non-tuples of `R^A` (QR2).
pub fn verify_relation_membership(
    tuple: &[QDistribution],
    relation: &str,
    a: &Structure,
    tol: f64,
) -> Result<Report, MonadError> {
    let (rel, _) = a.relation_by_name(relation)?;
    let arity = a.signature().arity(rel);
    if tuple.len() != arity {
        return Err(MonadError::ArityMismatch { arity, found: tuple.len() });
    }
    let dim = tuple[0].dim();
    for p in tuple {
        check_keys(p, a)?;
        if p.dim() != dim {
            return Err(MonadError::DimensionMismatch { expected: dim, found: (p.dim(), p.dim()) });
        }
    }
    let mut report = Report::new();
    for i in 0..arity {
        for j in i..arity {
            for (x, px) in tuple[i].support() {
                for (y, py) in tuple[j].support() {
                    if !px.commutator(py)?.is_zero(tol) {
                        report.push(
                            Condition::Qr1,
                            format!("p{}({}), p{}({})", i + 1, a.name(*x), j + 1, a.name(*y)),
                            "values do not commute",
                        );
                    }
                }
            }
        }
    }
    let mut choice = Vec::with_capacity(arity);
    qr2_walk(tuple, rel, a, tol, &mut choice, &mut report)?;
    Ok(report)
}

fn qr2_walk(
    tuple: &[QDistribution],
    rel: usize,
    a: &Structure,
    tol: f64,
    choice: &mut Vec<usize>,
    report: &mut Report,
) -> Result<(), MonadError> {
    let i = choice.len();
    if i == tuple.len() {
        if !a.contains(rel, choice) {
            let mats: Vec<&Matrix> = choice.iter().zip(tuple).map(|(x, p)| p.get(x).expect("in support")).collect();
            let prod = Matrix::product(mats)?.expect("non-empty");
            if !prod.is_zero(tol) {
                report.push(Condition::Qr2, a.format_tuple(choice), "product over a non-tuple is nonzero");
            }
        }
        return Ok(());
    }
    for &x in tuple[i].keys() {
        choice.push(x);
        qr2_walk(tuple, rel, a, tol, choice, report)?;
        choice.pop();
    }
    Ok(())
}

/// Unit `η_A(x) = δ_x`.
pub fn eta(x: &str, a: &Structure) -> Result<QDistribution, MonadError> {
    Ok(ProjDist::delta(a.element(x)?))
}

/// Functor action `Q_d h(p)(y) = Σ_{h(x) = y} p(x)`.
pub fn qd_map(h: &Homomorphism, a: &Structure, b: &Structure, p: &QDistribution) -> Result<QDistribution, MonadError> {
    check_keys(p, a).map_err(|_| MonadError::BaseMismatch)?;
    if !is_homomorphism(a, b, h)? {
        return Err(MonadError::NotHomomorphism);
    }
    p.map(|&x| h.apply(x))
}

/// Graded multiplication `μ^{d,d'}_A`; every inner key must be a valid distribution over `base`.
pub fn mu(n: &NestedQDistribution, base: &Structure, tol: f64) -> Result<QDistribution, MonadError> {
    for p in n.keys() {
        let r = verify_qdist(p, base, tol)?;
        if !r.pass {
            return Err(MonadError::InvalidDistribution(r));
        }
    }
    n.flatten()
}

/// Strength `m(p, q)(x, y) = p(x) ⊗ q(y)`, keyed by indices of `product(a, b)`.
pub fn strength(p: &QDistribution, a: &Structure, q: &QDistribution, b: &Structure) -> Result<QDistribution, MonadError> {
    if a.signature() != b.signature() {
        return Err(StructureError::SignatureMismatch.into());
    }
    check_keys(p, a)?;
    check_keys(q, b)?;
    let mut entries = Vec::new();
    for (x, px) in p.support() {
        for (y, qy) in q.support() {
            entries.push((x * b.size() + y, px.kron(qy)?));
        }
    }
    ProjDist::new(p.dim() * q.dim(), entries)
}

/// Confirms `Q_d ⊤ ≅ ⊤`: over the terminal structure the only distribution is `{⋆ ↦ I_d}`,
/// and it is related to itself in every relation.
pub fn check_affine(signature: &Signature, dim: usize) -> Result<Report, MonadError> {
    let top = terminal(signature);
    let mut report = Report::new();
    let unique = ProjDist::new(dim, [(0usize, Matrix::identity(dim, Backend::Exact))])?;
    report.extend(verify_qdist(&unique, &top, 0.0)?);
    for sym in signature.relations() {
        let tuple = vec![unique.clone(); sym.arity];
        let r = verify_relation_membership(&tuple, &sym.name, &top, 0.0)?;
        if !r.pass {
            report.push(Condition::Affine, sym.name.clone(), "constant tuple not related in Q_d ⊤");
        }
    }
    // With a one-element universe the support is at most {⋆}; normalization fixes p(⋆) = I.
    let forced = unique.total()?;
    if forced != Matrix::identity(dim, Backend::Exact) || unique.support().len() != 1 {
        report.push(Condition::Affine, "*", "normalization does not force the identity");
    }
    Ok(report)
}

/// Whether `p` is a valid distribution over the terminal structure for `signature`.
pub fn is_terminal_distribution(p: &QDistribution, signature: &Signature, tol: f64) -> bool {
    let top = terminal(signature);
    matches!(verify_qdist(p, &top, tol), Ok(r) if r.pass)
}

#[cfg(test)]
mod tests;
