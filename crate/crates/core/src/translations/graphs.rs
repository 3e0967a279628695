use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::linalg::{Backend, Matrix};
use crate::monad::{verify_qhom, QHomCert};
use crate::report::{Condition, Report};
use crate::structures::Structure;

use super::bcs::BoolConstraint;
use super::{bcs_quantum_solution_verify, Bcs, Pvms, TranslationError};

/// A finite simple graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    vertices: Vec<String>,
    index: HashMap<String, usize>,
    /// Unordered edges stored as `(i, j)` with `i < j`.
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new<S: AsRef<str>>(vertices: &[S], edges: &[(S, S)]) -> Result<Self, TranslationError> {
        if vertices.is_empty() {
            return Err(TranslationError::Invalid("a graph needs at least one vertex".into()));
        }
        let vertices: Vec<String> = vertices.iter().map(|v| v.as_ref().to_string()).collect();
        let index: HashMap<String, usize> = vertices.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        if index.len() != vertices.len() {
            return Err(TranslationError::Invalid("a vertex is declared twice".into()));
        }
        let mut es = BTreeSet::new();
        for (u, v) in edges {
            let (u, v) = (u.as_ref(), v.as_ref());
            let i = *index.get(u).ok_or_else(|| TranslationError::UnknownVariable(u.to_string()))?;
            let j = *index.get(v).ok_or_else(|| TranslationError::UnknownVariable(v.to_string()))?;
            if i == j {
                return Err(TranslationError::Invalid(format!("loop at {u}")));
            }
            es.insert((i.min(j), i.max(j)));
        }
        Ok(Self { vertices, index, edges: es })
    }

    pub fn complete(n: usize) -> Self {
        let vs: Vec<String> = (1..=n).map(|i| format!("v{i}")).collect();
        let mut es = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                es.push((vs[i].clone(), vs[j].clone()));
            }
        }
        Self::new(&vs, &es).expect("well-formed")
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn vertex(&self, name: &str) -> Result<usize, TranslationError> {
        self.index.get(name).copied().ok_or_else(|| TranslationError::UnknownVariable(name.to_string()))
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    /// The `{E}`-structure with `E` symmetric.
    pub fn to_structure(&self) -> Structure {
        let es: Vec<(&str, &str)> =
            self.edges.iter().map(|&(i, j)| (self.vertices[i].as_str(), self.vertices[j].as_str())).collect();
        let vs: Vec<&str> = self.vertices.iter().map(String::as_str).collect();
        Structure::graph(&vs, &es).expect("graph is well-formed")
    }
}

/// The boolean variable standing for "`x` is sent to `y`".
pub fn ji_variable(x: &str, y: &str) -> String {
    format!("r({x},{y})")
}

/// For each vertex `x` of `G`: `⋁_y r_{xy}`, then `¬(r_{xy} ∧ r_{xy'})` for `y < y'`, then
/// `¬(r_{xy} ∧ r_{x'y'})` for `x ∼ x'` and `y ≁ y'`, skipping constraints already emitted
/// from the other endpoint.
pub fn graph_pair_to_bcs(g: &Graph, h: &Graph) -> Bcs {
    let var = |x: usize, y: usize| ji_variable(&g.vertices[x], &h.vertices[y]);
    let variables: Vec<String> =
        (0..g.vertices.len()).flat_map(|x| (0..h.vertices.len()).map(move |y| (x, y))).map(|(x, y)| var(x, y)).collect();
    let nand = |s: Vec<String>| BoolConstraint::from_fn(s, |v| !(v[0] && v[1]));
    let mut constraints = Vec::new();
    let mut seen = BTreeSet::new();
    let nh = h.vertices.len();
    for x in 0..g.vertices.len() {
        let scope = (0..nh).map(|y| var(x, y)).collect();
        constraints.push(BoolConstraint::from_fn(scope, |v| v.iter().any(|&b| b)));
        for y in 0..nh {
            for y2 in y + 1..nh {
                constraints.push(nand(vec![var(x, y), var(x, y2)]));
            }
        }
        for x2 in (0..g.vertices.len()).filter(|&x2| g.adjacent(x, x2)) {
            for y in 0..nh {
                for y2 in (0..nh).filter(|&y2| !h.adjacent(y, y2)) {
                    let key = if (x, y) < (x2, y2) { ((x, y), (x2, y2)) } else { ((x2, y2), (x, y)) };
                    if seen.insert(key) {
                        constraints.push(nand(vec![var(x, y), var(x2, y2)]));
                    }
                }
            }
        }
    }
    Bcs::new(variables, constraints).expect("well-formed")
}

/// Projectors `P_{x,y}` keyed by vertex names of `G` and `H`. Omitted cells are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct MrCert {
    dim: usize,
    backend: Backend,
    projectors: BTreeMap<(String, String), Matrix>,
}

impl MrCert {
    pub fn new(dim: usize, cells: impl IntoIterator<Item = ((String, String), Matrix)>) -> Result<Self, TranslationError> {
        let mut projectors = BTreeMap::new();
        let mut backend = None;
        for (k, m) in cells {
            if m.shape() != (dim, dim) {
                return Err(TranslationError::DimensionMismatch { expected: dim, found: m.shape() });
            }
            if *backend.get_or_insert(m.backend()) != m.backend() {
                return Err(crate::linalg::LinalgError::BackendMismatch.into());
            }
            if !m.is_zero(0.0) {
                projectors.insert(k, m);
            }
        }
        Ok(Self { dim, backend: backend.unwrap_or(Backend::Exact), projectors })
    }

    /// Reads a certificate between graph structures as an MR certificate, forgetting nothing
    /// but the extra conditions it is checked against.
    pub fn from_qhom(c: &QHomCert) -> Self {
        let cells = c.cells().map(|(&(x, y), m)| ((c.source().name(x).to_string(), c.target().name(y).to_string()), m.clone()));
        Self::new(c.dim(), cells).expect("certificate cells are well-formed")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells(&self) -> &BTreeMap<(String, String), Matrix> {
        &self.projectors
    }

    pub fn value(&self, x: &str, y: &str) -> Matrix {
        self.projectors
            .get(&(x.to_string(), y.to_string()))
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.dim, self.dim, self.backend))
    }
}

/// MR1: every `P_{x,y}` a projector with rows summing to `I`. MR2: `P_{x,y} P_{x',y'} = 𝟎`
/// whenever `x ∼ x'` and `y ≁ y'`.
pub fn verify_mr(g: &Graph, h: &Graph, cert: &MrCert, tol: f64) -> Result<Report, TranslationError> {
    for (x, y) in cert.projectors.keys() {
        g.vertex(x)?;
        h.vertex(y)?;
    }
    let mut report = Report::new();
    let id = Matrix::identity(cert.dim, cert.backend);
    for ((x, y), m) in &cert.projectors {
        if !m.is_projector(tol)? {
            report.push(Condition::Projector, format!("P[{x},{y}]"), "not a projector");
        }
    }
    for x in &g.vertices {
        let row = cert.projectors.range((x.clone(), String::new())..).take_while(|((x2, _), _)| x2 == x);
        let total = Matrix::sum(row.map(|(_, m)| m), cert.dim, cert.dim, cert.backend)?;
        if !total.approx_eq(&id, tol) {
            report.push(Condition::Mr1, format!("row {x}"), "projectors do not sum to the identity");
        }
    }
    for (i, j) in g.edges() {
        let (x, x2) = (&g.vertices[i], &g.vertices[j]);
        for (a, y) in h.vertices.iter().enumerate() {
            for (b, y2) in h.vertices.iter().enumerate() {
                if h.adjacent(a, b) {
                    continue;
                }
                for (u, v, s, t) in [(x, x2, y, y2), (x2, x, y, y2)] {
                    let p = cert.value(u, s).matmul(&cert.value(v, t))?;
                    if !p.is_zero(tol) {
                        report.push(
                            Condition::Mr2,
                            format!("P[{u},{s}] P[{v},{t}]"),
                            "adjacent vertices sent to non-adjacent targets with nonzero product",
                        );
                    }
                }
            }
        }
    }
    Ok(report)
}

/// `Q_{xy,1} = P_{x,y}` and `Q_{xy,0} = I − P_{x,y}`.
pub fn mr_to_bcs_solution(g: &Graph, h: &Graph, cert: &MrCert, tol: f64) -> Result<Pvms, TranslationError> {
    let report = verify_mr(g, h, cert, tol)?;
    if !report.pass {
        return Err(TranslationError::NotVerified(report));
    }
    let id = Matrix::identity(cert.dim, cert.backend);
    let mut out = BTreeMap::new();
    for x in &g.vertices {
        for y in &h.vertices {
            let p = cert.value(x, y);
            let q0 = id.checked_sub(&p)?;
            out.insert(ji_variable(x, y), BTreeMap::from([("0".to_string(), q0), ("1".to_string(), p)]));
        }
    }
    Pvms::new(cert.dim, out)
}

/// Inverse of [`mr_to_bcs_solution`]: `P_{x,y} = Q_{xy,1}`.
pub fn bcs_solution_to_mr(g: &Graph, h: &Graph, pvms: &Pvms, tol: f64) -> Result<MrCert, TranslationError> {
    let report = bcs_quantum_solution_verify(&graph_pair_to_bcs(g, h), pvms, tol)?;
    if !report.pass {
        return Err(TranslationError::NotVerified(report));
    }
    let mut cells = Vec::new();
    for x in &g.vertices {
        for y in &h.vertices {
            cells.push(((x.clone(), y.clone()), pvms.effect(&ji_variable(x, y), "1")?));
        }
    }
    MrCert::new(pvms.dim(), cells)
}

/// Both notions of quantum graph homomorphism evaluated on one certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphQhomReport {
    pub qhom: Report,
    pub mr: Report,
}

pub fn verify_graph_qhom(g: &Graph, h: &Graph, cert: &QHomCert, tol: f64) -> Result<GraphQhomReport, TranslationError> {
    if **cert.source() != g.to_structure() || **cert.target() != h.to_structure() {
        return Err(TranslationError::Invalid("certificate is not between the given graphs".into()));
    }
    Ok(GraphQhomReport { qhom: verify_qhom(cert, tol), mr: verify_mr(g, h, &MrCert::from_qhom(cert), tol)? })
}
