use std::collections::{BTreeMap, BTreeSet};

use crate::linalg::{rational, Backend, Matrix};
use crate::report::{Condition, Report};

use super::csp::quantum_solution_report;
use super::{tuples, CspConstraint, CspInstance, Pvms, TranslationError};

/// A boolean constraint with an explicit truth table indexed big-endian by the bits of the
/// scope, so `table[0b101]` is the value at `(1, 0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoolConstraint {
    pub scope: Vec<String>,
    pub table: Vec<bool>,
}

impl BoolConstraint {
    pub fn from_fn(scope: Vec<String>, f: impl Fn(&[bool]) -> bool) -> Self {
        let k = scope.len();
        let table = (0..1usize << k).map(|i| f(&bits(i, k))).collect();
        Self { scope, table }
    }

    pub fn eval(&self, values: &[bool]) -> bool {
        self.table[values.iter().fold(0, |acc, &b| acc << 1 | b as usize)]
    }
}

pub(crate) fn bits(i: usize, k: usize) -> Vec<bool> {
    (0..k).map(|j| i >> (k - 1 - j) & 1 == 1).collect()
}

pub(crate) fn bitstring(values: &[bool]) -> String {
    values.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// A boolean constraint system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bcs {
    pub variables: Vec<String>,
    pub constraints: Vec<BoolConstraint>,
}

impl Bcs {
    pub fn new(variables: Vec<String>, constraints: Vec<BoolConstraint>) -> Result<Self, TranslationError> {
        let vars: BTreeSet<&String> = variables.iter().collect();
        if vars.len() != variables.len() {
            return Err(TranslationError::Invalid("a variable is declared twice".into()));
        }
        for c in &constraints {
            if c.scope.is_empty() {
                return Err(TranslationError::Invalid("constraint with empty scope".into()));
            }
            if let Some(v) = c.scope.iter().find(|v| !vars.contains(v)) {
                return Err(TranslationError::UnknownVariable(v.clone()));
            }
            if c.table.len() != 1 << c.scope.len() {
                return Err(TranslationError::Invalid(format!("truth table for ({}) is not total", c.scope.join(","))));
            }
        }
        Ok(Self { variables, constraints })
    }

    /// The same system as a CSP over the domain `{0, 1}`.
    pub fn to_csp(&self) -> CspInstance {
        let constraints = self
            .constraints
            .iter()
            .map(|c| {
                let k = c.scope.len();
                let allowed = (0..1usize << k)
                    .filter(|&i| c.table[i])
                    .map(|i| bits(i, k).iter().map(|&b| if b { "1" } else { "0" }.to_string()).collect())
                    .collect();
                CspConstraint { scope: c.scope.clone(), allowed }
            })
            .collect();
        CspInstance::new(self.variables.clone(), vec!["0".into(), "1".into()], constraints).expect("validated system")
    }

    pub fn is_satisfied_by(&self, assignment: &BTreeMap<String, bool>) -> bool {
        self.constraints.iter().all(|c| {
            let v: Vec<bool> = c.scope.iter().map(|x| assignment[x]).collect();
            c.eval(&v)
        })
    }
}

/// Binary observables `A_x` with `A_x² = I`, self-adjoint, commuting within scopes.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSolution {
    pub dim: usize,
    pub operators: BTreeMap<String, Matrix>,
}

impl OperatorSolution {
    pub fn new(dim: usize, operators: BTreeMap<String, Matrix>) -> Result<Self, TranslationError> {
        if let Some(m) = operators.values().find(|m| m.shape() != (dim, dim)) {
            return Err(TranslationError::DimensionMismatch { expected: dim, found: m.shape() });
        }
        Ok(Self { dim, operators })
    }

    /// `A_x = (−1)^{s(x)}` in dimension one.
    pub fn classical(assignment: &BTreeMap<String, bool>) -> Self {
        let operators = assignment
            .iter()
            .map(|(x, &b)| (x.clone(), Matrix::from_ints(1, 1, &[if b { -1 } else { 1 }])))
            .collect();
        Self { dim: 1, operators }
    }

    fn backend(&self) -> Backend {
        self.operators.values().next().map_or(Backend::Exact, Matrix::backend)
    }

    fn get(&self, x: &str) -> Result<&Matrix, TranslationError> {
        self.operators.get(x).ok_or_else(|| TranslationError::Missing(format!("operator for {x}")))
    }
}

fn split(a: &Matrix) -> (Matrix, Matrix) {
    let i = Matrix::identity(a.rows(), a.backend());
    let half = rational(1, 2);
    (
        i.checked_add(a).expect("square").scale_rational(&half),
        i.checked_sub(a).expect("square").scale_rational(&half),
    )
}

/// Checks binarity, self-adjointness, commutation within scopes and, per constraint, that
/// `P_{𝐱,𝐨} = 𝟎` whenever `b_c(𝐨) = 0`, with `P_{x,0} = (I+A_x)/2` and `P_{x,1} = (I−A_x)/2`.
pub fn verify_operator_solution(bcs: &Bcs, sol: &OperatorSolution, tol: f64) -> Result<Report, TranslationError> {
    let mut report = Report::new();
    let id = Matrix::identity(sol.dim, sol.backend());
    for x in &bcs.variables {
        let a = sol.get(x)?;
        if !a.is_hermitian(tol) {
            report.push(Condition::SelfAdjoint, x.clone(), "operator is not self-adjoint");
        }
        if !a.matmul(a)?.approx_eq(&id, tol) {
            report.push(Condition::Binary, x.clone(), "operator does not square to the identity");
        }
    }
    let mut pairs = BTreeSet::new();
    for c in &bcs.constraints {
        for (i, x) in c.scope.iter().enumerate() {
            for y in &c.scope[i + 1..] {
                if x != y {
                    pairs.insert(if x < y { (x, y) } else { (y, x) });
                }
            }
        }
    }
    for (x, y) in pairs {
        if !sol.get(x)?.commutator(sol.get(y)?)?.is_zero(tol) {
            report.push(Condition::Commutation, format!("{x}, {y}"), "operators in a common scope do not commute");
        }
    }
    let splits: BTreeMap<&String, (Matrix, Matrix)> =
        bcs.variables.iter().map(|x| Ok((x, split(sol.get(x)?)))).collect::<Result<_, TranslationError>>()?;
    for (ci, c) in bcs.constraints.iter().enumerate() {
        let k = c.scope.len();
        for t in tuples(2, k) {
            let v: Vec<bool> = t.iter().map(|&b| b == 1).collect();
            if c.eval(&v) {
                continue;
            }
            let mut p = id.clone();
            for (x, &b) in c.scope.iter().zip(&v) {
                let (p0, p1) = &splits[x];
                p = p.matmul(if b { p1 } else { p0 })?;
            }
            if !p.is_zero(tol) {
                report.push(
                    Condition::Constraint,
                    format!("constraint {} ({})", ci + 1, c.scope.join(",")),
                    format!("forbidden outcome {} has a nonzero projector", bitstring(&v)),
                );
            }
        }
    }
    Ok(report)
}

/// Spectral split `P_{x,0} = (I+A_x)/2`, `P_{x,1} = (I−A_x)/2`.
pub fn operator_to_projectors(sol: &OperatorSolution, tol: f64) -> Result<Pvms, TranslationError> {
    let id = Matrix::identity(sol.dim, sol.backend());
    let mut out = BTreeMap::new();
    for (x, a) in &sol.operators {
        if !a.is_hermitian(tol) || !a.matmul(a)?.approx_eq(&id, tol) {
            return Err(TranslationError::NotBinary(x.clone()));
        }
        let (p0, p1) = split(a);
        out.insert(x.clone(), BTreeMap::from([("0".to_string(), p0), ("1".to_string(), p1)]));
    }
    Pvms::new(sol.dim, out)
}

/// `A_x = P_{x,0} − P_{x,1}` for two-outcome projective measurements.
pub fn projectors_to_operator(pvms: &Pvms, tol: f64) -> Result<OperatorSolution, TranslationError> {
    let report = pvms.check_projective(tol)?;
    if !report.pass {
        return Err(TranslationError::Precondition(report));
    }
    let mut operators = BTreeMap::new();
    for (x, povm) in pvms.measurements() {
        if let Some(o) = povm.keys().find(|o| *o != "0" && *o != "1") {
            return Err(TranslationError::UnknownOutcome(o.clone()));
        }
        let a = pvms.effect(x, "0")?.checked_sub(&pvms.effect(x, "1")?)?;
        operators.insert(x.clone(), a);
    }
    OperatorSolution::new(pvms.dim(), operators)
}

/// Whether two-outcome measurements form a quantum solution of the system, checked as a
/// quantum homomorphism between the structures of its CSP.
pub fn bcs_quantum_solution_verify(bcs: &Bcs, pvms: &Pvms, tol: f64) -> Result<Report, TranslationError> {
    quantum_solution_report(&bcs.to_csp(), pvms, tol)
}
