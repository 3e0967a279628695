//! Built-in instances, addressed as `catalog:<id>` on the command line.
//!
//! Every entry is checked by its verifier when it is loaded.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::games::{check_perfect, strategy_from_cert, GameError, Strategy};
use crate::linalg::{Backend, LinalgError, Matrix};
use crate::monad::{verify_qhom, MonadError, QHomCert};
use crate::report::{Condition, Report};
use crate::structures::{Homomorphism, Structure};
use crate::translations::{
    bcs_quantum_solution_verify, check_state_independent_witness, check_state_witness, csp_to_pair,
    operator_to_projectors, pvms_to_cert, verify_operator_solution, Bcs, BoolConstraint, EmpiricalModel, Graph,
    MeasurementContext, OperatorSolution, Pvms, TranslationError,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("unknown catalog entry {0}")]
    Unknown(String),
    #[error(transparent)]
    Translation(#[from] TranslationError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Monad(#[from] MonadError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("entry {id} does not verify:\n{report}")]
    Invalid { id: String, report: Report },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Structure,
    Csp,
    Bcs,
    Empirical,
    Certificate,
    Strategy,
    Graph,
    OperatorSolution,
    Pvms,
    State,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Kind::Structure => "structure",
            Kind::Csp => "csp",
            Kind::Bcs => "bcs",
            Kind::Empirical => "empirical",
            Kind::Certificate => "certificate",
            Kind::Strategy => "strategy",
            Kind::Graph => "graph",
            Kind::OperatorSolution => "operator-solution",
            Kind::Pvms => "pvms",
            Kind::State => "state",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub enum Payload {
    Structure(Structure),
    Bcs(Bcs),
    Empirical(EmpiricalModel),
    /// A certificate together with the catalog ids of its source and target.
    Certificate { cert: QHomCert, source: &'static str, target: &'static str },
    Strategy(Strategy),
    Graph(Graph),
    OperatorSolution(OperatorSolution),
    /// Measurements together with their outcome order.
    Pvms { pvms: Pvms, outcomes: Vec<String> },
    State(Matrix),
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub kind: Kind,
    pub note: &'static str,
    pub payload: Payload,
}

struct Recipe {
    id: &'static str,
    kind: Kind,
    note: &'static str,
    build: fn() -> Result<Payload, CatalogError>,
    verify: fn(&Payload) -> Result<Report, CatalogError>,
}

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn binary() -> Vec<String> {
    names(&["0", "1"])
}

const SQUARE_VARS: [&str; 9] = ["A", "B", "C", "D", "E", "F", "G", "H", "I"];
const SQUARE_LINES: [([&str; 3], bool); 6] = [
    (["A", "B", "C"], false),
    (["D", "E", "F"], false),
    (["G", "H", "I"], false),
    (["A", "D", "G"], false),
    (["B", "E", "H"], false),
    (["C", "F", "I"], true),
];

/// Nine boolean variables in a 3×3 array; each row and the first two columns have even
/// parity, the last column odd.
pub fn magic_square_bcs() -> Bcs {
    let constraints = SQUARE_LINES
        .iter()
        .map(|(scope, odd)| BoolConstraint::from_fn(names(scope), |v| v.iter().filter(|&&b| b).count() % 2 == *odd as usize))
        .collect();
    Bcs::new(names(&SQUARE_VARS), constraints).expect("well-formed")
}

pub fn magic_square_pair() -> (Structure, Structure) {
    csp_to_pair(&magic_square_bcs().to_csp()).expect("well-formed")
}

pub fn pauli(name: char) -> Matrix {
    match name {
        'I' => Matrix::identity(2, Backend::Exact),
        'X' => Matrix::from_ints(2, 2, &[0, 1, 1, 0]),
        'Y' => Matrix::from_gaussian_ints(2, 2, &[(0, 0), (0, -1), (0, 1), (0, 0)]),
        'Z' => Matrix::from_ints(2, 2, &[1, 0, 0, -1]),
        _ => panic!("unknown Pauli {name}"),
    }
}

/// Tensor product of Paulis, e.g. `"ZI"` for `Z ⊗ I`.
pub fn pauli_string(s: &str) -> Matrix {
    s.chars().map(pauli).reduce(|a, b| a.kron(&b).expect("exact")).expect("nonempty")
}

/// The Mermin–Peres square of two-qubit observables.
pub fn magic_square_operators() -> OperatorSolution {
    let ops = ["ZI", "IZ", "ZZ", "IX", "XI", "XX", "ZX", "XZ", "YY"];
    let operators = SQUARE_VARS.iter().zip(ops).map(|(v, p)| (v.to_string(), pauli_string(p))).collect();
    OperatorSolution::new(4, operators).expect("4x4")
}

pub fn magic_square_pvms() -> Pvms {
    operator_to_projectors(&magic_square_operators(), 0.0).expect("binary observables")
}

pub fn magic_square_cert() -> QHomCert {
    pvms_to_cert(&magic_square_bcs().to_csp(), &magic_square_pvms()).expect("well-formed")
}

/// Rows and columns as contexts, with the parity-respecting assignments as support.
pub fn magic_square_model() -> EmpiricalModel {
    let bcs = magic_square_bcs();
    let contexts = bcs
        .constraints
        .iter()
        .map(|c| {
            let support = (0..8usize)
                .map(|i| [i >> 2 & 1 == 1, i >> 1 & 1 == 1, i & 1 == 1])
                .filter(|v| c.eval(v))
                .map(|v| v.iter().map(|&b| if b { "1" } else { "0" }.to_string()).collect())
                .collect();
            MeasurementContext { members: c.scope.clone(), support }
        })
        .collect();
    EmpiricalModel::new(names(&SQUARE_VARS), binary(), contexts).expect("well-formed")
}

/// `e_{000} + e_{111}`, unnormalized.
pub fn ghz_state() -> Matrix {
    let mut v = vec![0i64; 8];
    v[0] = 1;
    v[7] = 1;
    Matrix::from_ints(8, 1, &v)
}

const GHZ_CONTEXTS: [[&str; 3]; 4] = [["X1", "X2", "X3"], ["X1", "Y2", "Y3"], ["Y1", "X2", "Y3"], ["Y1", "Y2", "X3"]];

/// `X` and `Y` measurements on each of three qubits; outcome `0` is the `+1` eigenspace.
pub fn ghz_pvms() -> Pvms {
    let half = crate::linalg::rational(1, 2);
    let mut out = BTreeMap::new();
    for party in 0..3 {
        for p in ['X', 'Y'] {
            let mut ops: Vec<Matrix> = vec![pauli('I'); 3];
            ops[party] = pauli(p);
            let a = ops.iter().skip(1).fold(ops[0].clone(), |acc, m| acc.kron(m).expect("exact"));
            let id = Matrix::identity(8, Backend::Exact);
            let p0 = id.checked_add(&a).expect("8x8").scale_rational(&half);
            let p1 = id.checked_sub(&a).expect("8x8").scale_rational(&half);
            out.insert(format!("{p}{}", party + 1), BTreeMap::from([("0".to_string(), p0), ("1".to_string(), p1)]));
        }
    }
    Pvms::new(8, out).expect("8x8")
}

/// Support model of measuring `psi` with `pvms`: a joint outcome is possible iff
/// `ψ^* P_{𝐱,s} ψ ≠ 0`.
pub fn model_from_state(
    measurements: Vec<String>,
    outcomes: Vec<String>,
    contexts: &[Vec<String>],
    psi: &Matrix,
    pvms: &Pvms,
    tol: f64,
) -> Result<EmpiricalModel, CatalogError> {
    let adj = psi.adjoint();
    let mut out = Vec::new();
    for members in contexts {
        let mut support = BTreeSet::new();
        for t in crate::translations::tuples(outcomes.len(), members.len()) {
            let s: Vec<String> = t.iter().map(|&i| outcomes[i].clone()).collect();
            let w = adj.matmul(&pvms.joint(members, &s)?)?.matmul(psi)?.get(0, 0);
            if !w.is_zero(tol) {
                support.insert(s);
            }
        }
        out.push(MeasurementContext { members: members.clone(), support });
    }
    Ok(EmpiricalModel::new(measurements, outcomes, out)?)
}

pub fn ghz_model() -> EmpiricalModel {
    let contexts: Vec<Vec<String>> = GHZ_CONTEXTS.iter().map(|c| names(c)).collect();
    let ms = names(&["X1", "Y1", "X2", "Y2", "X3", "Y3"]);
    model_from_state(ms, binary(), &contexts, &ghz_state(), &ghz_pvms(), 0.0).expect("exact")
}

fn bell_scenario(possible: impl Fn(usize, usize, usize, usize) -> bool) -> EmpiricalModel {
    let mut contexts = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            let support = (0..4)
                .filter(|&o| possible(i, j, o >> 1, o & 1))
                .map(|o| vec![(o >> 1).to_string(), (o & 1).to_string()])
                .collect();
            contexts.push(MeasurementContext { members: vec![format!("a{i}"), format!("b{j}")], support });
        }
    }
    EmpiricalModel::new(names(&["a0", "a1", "b0", "b1"]), binary(), contexts).expect("well-formed")
}

/// Outputs agree unless both inputs are `1`, in which case they differ.
pub fn pr_box() -> EmpiricalModel {
    bell_scenario(|i, j, x, y| (x ^ y) == (i & j))
}

pub fn full_support_model() -> EmpiricalModel {
    bell_scenario(|_, _, _, _| true)
}

pub fn cycle(n: usize) -> Graph {
    let vs: Vec<String> = (1..=n).map(|i| format!("v{i}")).collect();
    let es: Vec<(String, String)> = (0..n).map(|i| (vs[i].clone(), vs[(i + 1) % n].clone())).collect();
    Graph::new(&vs, &es).expect("well-formed")
}

pub fn complete_bipartite(m: usize, n: usize) -> Graph {
    let left: Vec<String> = (1..=m).map(|i| format!("a{i}")).collect();
    let right: Vec<String> = (1..=n).map(|i| format!("b{i}")).collect();
    let es: Vec<(String, String)> = left.iter().flat_map(|a| right.iter().map(move |b| (a.clone(), b.clone()))).collect();
    let vs: Vec<String> = left.into_iter().chain(right).collect();
    Graph::new(&vs, &es).expect("well-formed")
}

/// `K₂ → K₂` in dimension 2: both rows split by the `Z` eigenspaces, in opposite order.
pub fn k2_swap_cert() -> QHomCert {
    let (p, q) = {
        let id = pauli('I');
        let z = pauli('Z');
        let h = crate::linalg::rational(1, 2);
        (id.checked_add(&z).unwrap().scale_rational(&h), id.checked_sub(&z).unwrap().scale_rational(&h))
    };
    let k2 = Arc::new(Graph::complete(2).to_structure());
    QHomCert::new(2, k2.clone(), k2, [((0, 0), p.clone()), ((0, 1), q.clone()), ((1, 0), q), ((1, 1), p)])
        .expect("well-formed")
}

fn lift(g: &Graph, h: &Graph, map: Vec<usize>) -> QHomCert {
    QHomCert::classical_lift(Arc::new(g.to_structure()), Arc::new(h.to_structure()), &Homomorphism::new(map))
        .expect("well-formed")
}

fn pass() -> Result<Report, CatalogError> {
    Ok(Report::new())
}

fn certificate(p: &Payload) -> Result<Report, CatalogError> {
    match p {
        Payload::Certificate { cert, .. } => Ok(verify_qhom(cert, 0.0)),
        _ => unreachable!("certificate entry"),
    }
}

const RECIPES: &[Recipe] = &[
    Recipe {
        id: "magic-square-bcs",
        kind: Kind::Bcs,
        note: "Mermin-Peres magic square parity system",
        build: || Ok(Payload::Bcs(magic_square_bcs())),
        verify: |_| pass(),
    },
    Recipe {
        id: "magic-square-A",
        kind: Kind::Structure,
        note: "variable structure of the magic square CSP",
        build: || Ok(Payload::Structure(magic_square_pair().0)),
        verify: |_| pass(),
    },
    Recipe {
        id: "magic-square-B",
        kind: Kind::Structure,
        note: "value structure of the magic square CSP",
        build: || Ok(Payload::Structure(magic_square_pair().1)),
        verify: |_| pass(),
    },
    Recipe {
        id: "magic-square-opsol",
        kind: Kind::OperatorSolution,
        note: "two-qubit Pauli observables of the Mermin-Peres square",
        build: || Ok(Payload::OperatorSolution(magic_square_operators())),
        verify: |p| match p {
            Payload::OperatorSolution(s) => Ok(verify_operator_solution(&magic_square_bcs(), s, 0.0)?),
            _ => unreachable!(),
        },
    },
    Recipe {
        id: "magic-square-pvms",
        kind: Kind::Pvms,
        note: "spectral projectors of the magic square observables",
        build: || Ok(Payload::Pvms { pvms: magic_square_pvms(), outcomes: binary() }),
        verify: |p| match p {
            Payload::Pvms { pvms, .. } => {
                let mut r = bcs_quantum_solution_verify(&magic_square_bcs(), pvms, 0.0)?;
                r.extend(check_state_independent_witness(&magic_square_model(), pvms, 0.0)?);
                Ok(r)
            }
            _ => unreachable!(),
        },
    },
    Recipe {
        id: "magic-square-cert",
        kind: Kind::Certificate,
        note: "dimension-4 quantum homomorphism from the magic square observables",
        build: || Ok(Payload::Certificate { cert: magic_square_cert(), source: "magic-square-A", target: "magic-square-B" }),
        verify: certificate,
    },
    Recipe {
        id: "magic-square-strategy",
        kind: Kind::Strategy,
        note: "perfect 4x4 strategy for the magic square homomorphism game",
        build: || Ok(Payload::Strategy(strategy_from_cert(&magic_square_cert(), 0.0)?)),
        verify: |p| match p {
            Payload::Strategy(s) => {
                let (a, b) = magic_square_pair();
                Ok(check_perfect(s, &a, &b, 0.0)?)
            }
            _ => unreachable!(),
        },
    },
    Recipe {
        id: "magic-square-model",
        kind: Kind::Empirical,
        note: "support model of the magic square rows and columns",
        build: || Ok(Payload::Empirical(magic_square_model())),
        verify: |_| pass(),
    },
    Recipe {
        id: "ghz-model",
        kind: Kind::Empirical,
        note: "GHZ supports for the XXX, XYY, YXY, YYX contexts",
        build: || Ok(Payload::Empirical(ghz_model())),
        verify: |_| pass(),
    },
    Recipe {
        id: "ghz-state",
        kind: Kind::State,
        note: "unnormalized three-qubit GHZ state",
        build: || Ok(Payload::State(ghz_state())),
        verify: |p| match p {
            Payload::State(s) => {
                let mut r = Report::new();
                if s.is_zero(0.0) {
                    r.push(Condition::Witness, "state", "zero vector");
                }
                Ok(r)
            }
            _ => unreachable!(),
        },
    },
    Recipe {
        id: "ghz-pvms",
        kind: Kind::Pvms,
        note: "X and Y measurements on each GHZ qubit",
        build: || Ok(Payload::Pvms { pvms: ghz_pvms(), outcomes: binary() }),
        verify: |p| match p {
            Payload::Pvms { pvms, .. } => Ok(check_state_witness(&ghz_model(), &ghz_state(), pvms, 0.0)?),
            _ => unreachable!(),
        },
    },
    Recipe {
        id: "pr-box",
        kind: Kind::Empirical,
        note: "Popescu-Rohrlich box supports",
        build: || Ok(Payload::Empirical(pr_box())),
        verify: |_| pass(),
    },
    Recipe {
        id: "full-support",
        kind: Kind::Empirical,
        note: "Bell scenario with every joint outcome possible",
        build: || Ok(Payload::Empirical(full_support_model())),
        verify: |_| pass(),
    },
    Recipe { id: "K2", kind: Kind::Graph, note: "complete graph on 2 vertices", build: || Ok(Payload::Graph(Graph::complete(2))), verify: |_| pass() },
    Recipe { id: "K3", kind: Kind::Graph, note: "complete graph on 3 vertices", build: || Ok(Payload::Graph(Graph::complete(3))), verify: |_| pass() },
    Recipe { id: "C5", kind: Kind::Graph, note: "5-cycle", build: || Ok(Payload::Graph(cycle(5))), verify: |_| pass() },
    Recipe { id: "K33", kind: Kind::Graph, note: "complete bipartite graph K3,3", build: || Ok(Payload::Graph(complete_bipartite(3, 3))), verify: |_| pass() },
    Recipe {
        id: "k2-swap-cert",
        kind: Kind::Certificate,
        note: "dimension-2 certificate K2 -> K2 built from Z eigenspaces",
        build: || Ok(Payload::Certificate { cert: k2_swap_cert(), source: "K2", target: "K2" }),
        verify: certificate,
    },
    Recipe {
        id: "k3-rotation-cert",
        kind: Kind::Certificate,
        note: "classical rotation of K3 as a dimension-1 certificate",
        build: || {
            let k3 = Graph::complete(3);
            Ok(Payload::Certificate { cert: lift(&k3, &k3, vec![1, 2, 0]), source: "K3", target: "K3" })
        },
        verify: certificate,
    },
    Recipe {
        id: "c5-k3-cert",
        kind: Kind::Certificate,
        note: "3-colouring of the 5-cycle as a dimension-1 certificate",
        build: || Ok(Payload::Certificate { cert: lift(&cycle(5), &Graph::complete(3), vec![0, 1, 0, 1, 2]), source: "C5", target: "K3" }),
        verify: certificate,
    },
];

/// `(id, kind, note)` for every entry.
pub fn catalog_list() -> Vec<(&'static str, Kind, &'static str)> {
    RECIPES.iter().map(|s| (s.id, s.kind, s.note)).collect()
}

/// Builds and verifies an entry.
pub fn catalog_get(id: &str) -> Result<CatalogEntry, CatalogError> {
    let recipe = RECIPES.iter().find(|s| s.id == id).ok_or_else(|| CatalogError::Unknown(id.to_string()))?;
    let payload = (recipe.build)()?;
    let report = (recipe.verify)(&payload)?;
    if !report.pass {
        return Err(CatalogError::Invalid { id: id.to_string(), report });
    }
    Ok(CatalogEntry { id: recipe.id, kind: recipe.kind, note: recipe.note, payload })
}

/// An entry read as a structure; graphs become `{E}`-structures.
pub fn catalog_structure(id: &str) -> Result<Structure, CatalogError> {
    match catalog_get(id)?.payload {
        Payload::Structure(s) => Ok(s),
        Payload::Graph(g) => Ok(g.to_structure()),
        _ => Err(CatalogError::Unknown(format!("{id} (not a structure)"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_verifies() {
        for (id, kind, _) in catalog_list() {
            let e = catalog_get(id).unwrap_or_else(|err| panic!("{id}: {err}"));
            assert_eq!(e.kind, kind);
        }
        assert!(matches!(catalog_get("nonexistent"), Err(CatalogError::Unknown(_))));
    }

    #[test]
    fn magic_square_shapes() {
        let bcs = magic_square_bcs();
        assert_eq!((bcs.variables.len(), bcs.constraints.len()), (9, 6));
        let ops = magic_square_operators();
        assert_eq!(ops.operators.len(), 9);
        assert!(ops.operators.values().all(|m| m.shape() == (4, 4) && m.backend() == Backend::Exact));
        let (a, b) = magic_square_pair();
        assert_eq!((a.size(), b.size(), a.signature().len()), (9, 2, 6));
        let even = b.relation(0).len();
        assert_eq!(even, 4);
        // Five even-parity relations and one odd.
        let odd: Vec<_> = (0..6).filter(|&r| b.relation(r).iter().all(|t| t.iter().sum::<usize>() % 2 == 1)).collect();
        assert_eq!(odd, vec![5]);
    }

    #[test]
    fn ghz_model_shape() {
        let m = ghz_model();
        assert_eq!((m.contexts.len(), m.measurements.len()), (4, 6));
        assert!(m.contexts.iter().all(|c| c.support.len() == 4));
        // XXX has even parity, the other contexts odd.
        for (c, odd) in m.contexts.iter().zip([false, true, true, true]) {
            for s in &c.support {
                assert_eq!(s.iter().filter(|o| *o == "1").count() % 2 == 1, odd);
            }
        }
    }

    #[test]
    fn pauli_products() {
        let y = pauli('Y');
        assert_eq!(y.matmul(&y).unwrap(), pauli('I'));
        let zx = pauli('Z').matmul(&pauli('X')).unwrap();
        let iy = y.scale(&crate::linalg::Scalar::Exact(crate::linalg::GaussRat::i())).unwrap();
        assert_eq!(zx, iy);
    }
}
