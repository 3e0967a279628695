use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use crate::linalg::{Backend, Matrix};
use crate::monad::{verify_qhom, QHomCert};
use crate::report::{Condition, Report};
use crate::structures::{find_homomorphism, Signature, Structure, StructureError};

use super::{tuples, TranslationError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CspConstraint {
    pub scope: Vec<String>,
    pub allowed: BTreeSet<Vec<String>>,
}

/// A CSP `(V, D, C)` over named variables and values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CspInstance {
    pub variables: Vec<String>,
    pub domain: Vec<String>,
    pub constraints: Vec<CspConstraint>,
}

fn index_of(names: &[String]) -> HashMap<&str, usize> {
    names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect()
}

fn check_unique(names: &[String], what: &str) -> Result<(), TranslationError> {
    let mut seen = BTreeSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(TranslationError::Invalid(format!("{what} {n} is declared twice")));
        }
    }
    Ok(())
}

impl CspInstance {
    pub fn new(variables: Vec<String>, domain: Vec<String>, constraints: Vec<CspConstraint>) -> Result<Self, TranslationError> {
        check_unique(&variables, "variable")?;
        check_unique(&domain, "value")?;
        let vars = index_of(&variables);
        let vals = index_of(&domain);
        for c in &constraints {
            if c.scope.is_empty() {
                return Err(TranslationError::Invalid("constraint with empty scope".into()));
            }
            if let Some(v) = c.scope.iter().find(|v| !vars.contains_key(v.as_str())) {
                return Err(TranslationError::UnknownVariable(v.clone()));
            }
            for t in &c.allowed {
                if t.len() != c.scope.len() {
                    return Err(TranslationError::Invalid(format!(
                        "allowed tuple ({}) does not match scope ({})",
                        t.join(","),
                        c.scope.join(",")
                    )));
                }
                if let Some(o) = t.iter().find(|o| !vals.contains_key(o.as_str())) {
                    return Err(TranslationError::UnknownOutcome(o.clone()));
                }
            }
        }
        Ok(Self { variables, domain, constraints })
    }

    /// Whether an assignment, given as value indices per variable, meets every constraint.
    pub fn is_solution(&self, assignment: &[usize]) -> bool {
        let vars = index_of(&self.variables);
        self.constraints.iter().all(|c| {
            let t: Vec<String> = c.scope.iter().map(|v| self.domain[assignment[vars[v.as_str()]]].clone()).collect();
            c.allowed.contains(&t)
        })
    }
}

/// `(𝒜_CSP, ℬ_CSP)`: relation `C<i>` per constraint, interpreted in `𝒜` as the scope and in
/// `ℬ` as the allowed set.
pub fn csp_to_pair(k: &CspInstance) -> Result<(Structure, Structure), TranslationError> {
    let names: Vec<String> = (1..=k.constraints.len()).map(|i| format!("C{i}")).collect();
    let sig = Signature::new(names.iter().zip(&k.constraints).map(|(n, c)| (n.clone(), c.scope.len())))?;
    let a_rel: Vec<(String, Vec<Vec<String>>)> =
        names.iter().zip(&k.constraints).map(|(n, c)| (n.clone(), vec![c.scope.clone()])).collect();
    let b_rel: Vec<(String, Vec<Vec<String>>)> =
        names.iter().zip(&k.constraints).map(|(n, c)| (n.clone(), c.allowed.iter().cloned().collect())).collect();
    let a = Structure::new(sig.clone(), k.variables.iter().cloned(), a_rel)?;
    let b = Structure::new(sig, k.domain.iter().cloned(), b_rel)?;
    Ok((a, b))
}

/// One constraint `(𝐚, R^ℬ)` per relation tuple of `𝒜`.
pub fn pair_to_csp(a: &Structure, b: &Structure) -> Result<CspInstance, TranslationError> {
    if a.signature() != b.signature() {
        return Err(StructureError::SignatureMismatch.into());
    }
    let names = |t: &[usize], s: &Structure| t.iter().map(|&e| s.name(e).to_string()).collect::<Vec<_>>();
    let constraints = a
        .tuples()
        .map(|(rel, t)| CspConstraint { scope: names(t, a), allowed: b.relation(rel).iter().map(|u| names(u, b)).collect() })
        .collect();
    CspInstance::new(a.universe().to_vec(), b.universe().to_vec(), constraints)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurementContext {
    pub members: Vec<String>,
    /// Possible joint outcomes, aligned with `members`.
    pub support: BTreeSet<Vec<String>>,
}

/// A possibilistic empirical model: per context, the set of joint outcomes with nonzero
/// probability.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmpiricalModel {
    pub measurements: Vec<String>,
    pub outcomes: Vec<String>,
    pub contexts: Vec<MeasurementContext>,
}

impl EmpiricalModel {
    pub fn new(measurements: Vec<String>, outcomes: Vec<String>, contexts: Vec<MeasurementContext>) -> Result<Self, TranslationError> {
        check_unique(&measurements, "measurement")?;
        check_unique(&outcomes, "outcome")?;
        let ms = index_of(&measurements);
        let os = index_of(&outcomes);
        let mut covered = BTreeSet::new();
        for c in &contexts {
            check_unique(&c.members, "context member")?;
            for m in &c.members {
                if !ms.contains_key(m.as_str()) {
                    return Err(TranslationError::UnknownVariable(m.clone()));
                }
                covered.insert(m.as_str());
            }
            for s in &c.support {
                if s.len() != c.members.len() {
                    return Err(TranslationError::Invalid(format!("assignment ({}) is not total on its context", s.join(","))));
                }
                if let Some(o) = s.iter().find(|o| !os.contains_key(o.as_str())) {
                    return Err(TranslationError::UnknownOutcome(o.clone()));
                }
            }
        }
        if let Some(m) = measurements.iter().find(|m| !covered.contains(m.as_str())) {
            return Err(TranslationError::Invalid(format!("measurement {m} lies in no context")));
        }
        Ok(Self { measurements, outcomes, contexts })
    }

    /// Members of a context sorted by declaration order, with the permutation applied.
    fn sorted_context(&self, c: &MeasurementContext) -> (Vec<String>, Vec<usize>) {
        let ms = index_of(&self.measurements);
        let mut perm: Vec<usize> = (0..c.members.len()).collect();
        perm.sort_by_key(|&i| ms[c.members[i].as_str()]);
        (perm.iter().map(|&i| c.members[i].clone()).collect(), perm)
    }
}

/// `CSP_e`: one constraint per context with scope in declaration order and the support as
/// the allowed set.
pub fn empirical_to_csp(e: &EmpiricalModel) -> Result<CspInstance, TranslationError> {
    let constraints = e
        .contexts
        .iter()
        .map(|c| {
            let (scope, perm) = e.sorted_context(c);
            let allowed = c.support.iter().map(|s| perm.iter().map(|&i| s[i].clone()).collect()).collect();
            CspConstraint { scope, allowed }
        })
        .collect();
    CspInstance::new(e.measurements.clone(), e.outcomes.clone(), constraints)
}

/// No global assignment is consistent with every context's support.
pub fn is_strongly_contextual(e: &EmpiricalModel) -> Result<bool, TranslationError> {
    let (a, b) = csp_to_pair(&empirical_to_csp(e)?)?;
    Ok(find_homomorphism(&a, &b)?.is_none())
}

/// Projective measurements keyed by measurement (or variable) and outcome. Omitted outcomes
/// have zero projector.
#[derive(Clone, Debug, PartialEq)]
pub struct Pvms {
    dim: usize,
    backend: Backend,
    measurements: BTreeMap<String, BTreeMap<String, Matrix>>,
}

impl Pvms {
    pub fn new(dim: usize, measurements: BTreeMap<String, BTreeMap<String, Matrix>>) -> Result<Self, TranslationError> {
        let mut backend = None;
        let mut out = BTreeMap::new();
        for (x, povm) in measurements {
            let mut kept = BTreeMap::new();
            for (o, m) in povm {
                if m.shape() != (dim, dim) {
                    return Err(TranslationError::DimensionMismatch { expected: dim, found: m.shape() });
                }
                if *backend.get_or_insert(m.backend()) != m.backend() {
                    return Err(crate::linalg::LinalgError::BackendMismatch.into());
                }
                if !m.is_zero(0.0) {
                    kept.insert(o, m);
                }
            }
            out.insert(x, kept);
        }
        Ok(Self { dim, backend: backend.unwrap_or(Backend::Exact), measurements: out })
    }

    /// One-dimensional measurements with a deterministic outcome per variable.
    pub fn classical(assignment: &BTreeMap<String, String>) -> Self {
        let one = Matrix::identity(1, Backend::Exact);
        let measurements = assignment.iter().map(|(x, o)| (x.clone(), BTreeMap::from([(o.clone(), one.clone())]))).collect();
        Self::new(1, measurements).expect("1x1 exact")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn measurements(&self) -> &BTreeMap<String, BTreeMap<String, Matrix>> {
        &self.measurements
    }

    pub fn get(&self, x: &str) -> Result<&BTreeMap<String, Matrix>, TranslationError> {
        self.measurements.get(x).ok_or_else(|| TranslationError::Missing(format!("measurement {x}")))
    }

    /// `P_{x,o}`, zero when not listed.
    pub fn effect(&self, x: &str, o: &str) -> Result<Matrix, TranslationError> {
        Ok(self.get(x)?.get(o).cloned().unwrap_or_else(|| Matrix::zeros(self.dim, self.dim, self.backend)))
    }

    /// `P_{x₁,o₁}⋯P_{xₖ,oₖ}`.
    pub fn joint(&self, xs: &[String], os: &[String]) -> Result<Matrix, TranslationError> {
        let mut acc = Matrix::identity(self.dim, self.backend);
        for (x, o) in xs.iter().zip(os) {
            acc = acc.matmul(&self.effect(x, o)?)?;
        }
        Ok(acc)
    }

    /// Each effect a projector and each measurement summing to the identity.
    pub fn check_projective(&self, tol: f64) -> Result<Report, TranslationError> {
        let mut report = Report::new();
        for (x, povm) in &self.measurements {
            for (o, m) in povm {
                if !m.is_projector(tol)? {
                    report.push(Condition::Projector, format!("{x} -> {o}"), "effect is not a projector");
                }
            }
            let total = Matrix::sum(povm.values(), self.dim, self.dim, self.backend)?;
            if !total.approx_eq(&Matrix::identity(self.dim, self.backend), tol) {
                report.push(Condition::Normalization, x.clone(), "effects do not sum to the identity");
            }
        }
        Ok(report)
    }

    /// Pairwise commutation of all effects of measurements that share a scope.
    pub(crate) fn check_commuting<'a>(&self, scopes: impl IntoIterator<Item = &'a [String]>, tol: f64) -> Result<Report, TranslationError> {
        let mut pairs = BTreeSet::new();
        for scope in scopes {
            for (i, x) in scope.iter().enumerate() {
                for y in &scope[i + 1..] {
                    if x != y {
                        pairs.insert(if x < y { (x.clone(), y.clone()) } else { (y.clone(), x.clone()) });
                    }
                }
            }
        }
        let mut report = Report::new();
        for (x, y) in pairs {
            let (px, py) = (self.get(&x)?, self.get(&y)?);
            for (o, p) in px {
                for (u, q) in py {
                    if !p.commutator(q)?.is_zero(tol) {
                        report.push(Condition::Commutation, format!("{x} -> {o}, {y} -> {u}"), "projectors do not commute");
                    }
                }
            }
        }
        Ok(report)
    }
}

fn witness_preconditions(e: &EmpiricalModel, pvms: &Pvms, tol: f64) -> Result<(), TranslationError> {
    for x in &e.measurements {
        for o in pvms.get(x)?.keys() {
            if !e.outcomes.contains(o) {
                return Err(TranslationError::UnknownOutcome(o.clone()));
            }
        }
    }
    let mut report = pvms.check_projective(tol)?;
    report.extend(pvms.check_commuting(e.contexts.iter().map(|c| c.members.as_slice()), tol)?);
    if !report.pass {
        return Err(TranslationError::Precondition(report));
    }
    Ok(())
}

/// Calls `visit` with every joint outcome of a context that the model rules out.
fn for_each_forbidden(
    e: &EmpiricalModel,
    mut visit: impl FnMut(&MeasurementContext, &[String]) -> Result<(), TranslationError>,
) -> Result<(), TranslationError> {
    for c in &e.contexts {
        for t in tuples(e.outcomes.len(), c.members.len()) {
            let s: Vec<String> = t.iter().map(|&i| e.outcomes[i].clone()).collect();
            if !c.support.contains(&s) {
                visit(c, &s)?;
            }
        }
    }
    Ok(())
}

fn describe(c: &MeasurementContext, s: &[String]) -> (String, String) {
    (
        format!("{{{}}}", c.members.join(",")),
        format!("forbidden outcome ({})", s.join(",")),
    )
}

/// State-dependent witness: `ψ^* P_{𝐱,s} ψ = 0` for every outcome outside the support.
pub fn check_state_witness(e: &EmpiricalModel, psi: &Matrix, pvms: &Pvms, tol: f64) -> Result<Report, TranslationError> {
    witness_preconditions(e, pvms, tol)?;
    if psi.shape() != (pvms.dim, 1) {
        return Err(TranslationError::DimensionMismatch { expected: pvms.dim, found: psi.shape() });
    }
    let adj = psi.adjoint();
    let mut report = Report::new();
    for_each_forbidden(e, |c, s| {
        let value = adj.matmul(&pvms.joint(&c.members, s)?)?.matmul(psi)?.get(0, 0);
        if !value.is_zero(tol) {
            let (loc, detail) = describe(c, s);
            report.push(Condition::Witness, loc, format!("{detail} has weight {value}"));
        }
        Ok(())
    })?;
    Ok(report)
}

/// State-independent witness: `P_{𝐱,s} = 𝟎` for every outcome outside the support.
pub fn check_state_independent_witness(e: &EmpiricalModel, pvms: &Pvms, tol: f64) -> Result<Report, TranslationError> {
    witness_preconditions(e, pvms, tol)?;
    let mut report = Report::new();
    for_each_forbidden(e, |c, s| {
        if !pvms.joint(&c.members, s)?.is_zero(tol) {
            let (loc, detail) = describe(c, s);
            report.push(Condition::Witness, loc, format!("{detail} has a nonzero projector"));
        }
        Ok(())
    })?;
    Ok(report)
}

/// The certificate `P_{x,o}` for the structure pair of a CSP.
pub fn pvms_to_cert(k: &CspInstance, pvms: &Pvms) -> Result<QHomCert, TranslationError> {
    let (a, b) = csp_to_pair(k)?;
    let mut cells = Vec::new();
    for (x, v) in k.variables.iter().enumerate() {
        for (o, m) in pvms.get(v)? {
            let y = b.element(o).map_err(|_| TranslationError::UnknownOutcome(o.clone()))?;
            cells.push(((x, y), m.clone()));
        }
    }
    Ok(QHomCert::new(pvms.dim, Arc::new(a), Arc::new(b), cells)?)
}

/// Whether the measurements form a quantum solution of the CSP, through `verify_qhom`.
pub(crate) fn quantum_solution_report(k: &CspInstance, pvms: &Pvms, tol: f64) -> Result<Report, TranslationError> {
    Ok(verify_qhom(&pvms_to_cert(k, pvms)?, tol))
}
