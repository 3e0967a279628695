use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use indexmap::IndexMap;
use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::catalog::Payload;
use crate::games::Strategy;
use crate::linalg::{format_rational, parse_rational, rational_to_f64, Backend, GaussRat, Matrix, Rational, Scalar};
use crate::monad::QHomCert;
use crate::structures::{Homomorphism, Signature, Structure};
use crate::translations::{
    Bcs, BoolConstraint, CspConstraint, CspInstance, EmpiricalModel, Graph, MeasurementContext, OperatorSolution, Pvms,
};

use super::{from_json, to_json, Document, IoError};

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(untagged)]
enum Num {
    Text(String),
    Number(f64),
}

impl Num {
    fn exact(&self) -> Result<Rational, IoError> {
        match self {
            Num::Text(s) => Ok(parse_rational(s)?),
            Num::Number(x) if x.fract() == 0.0 && x.abs() < 9.0e15 => Ok(Rational::from_integer((*x as i64).into())),
            Num::Number(x) => Err(IoError::Invalid(format!("exact entries must be rationals written as strings, found {x}"))),
        }
    }

    fn float(&self) -> Result<f64, IoError> {
        match self {
            Num::Text(s) => Ok(rational_to_f64(&parse_rational(s)?)),
            Num::Number(x) => Ok(*x),
        }
    }
}

fn zero_num() -> Num {
    Num::Text("0".into())
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct Entry {
    re: Num,
    #[serde(default = "zero_num")]
    im: Num,
}

impl Entry {
    fn exact(g: &GaussRat) -> Self {
        Entry { re: Num::Text(format_rational(&g.re)), im: Num::Text(format_rational(&g.im)) }
    }

    fn float(c: &Complex64) -> Self {
        Entry { re: Num::Number(c.re), im: Num::Number(c.im) }
    }

    fn to_exact(&self) -> Result<GaussRat, IoError> {
        Ok(GaussRat::new(self.re.exact()?, self.im.exact()?))
    }

    fn to_float(&self) -> Result<Complex64, IoError> {
        Ok(Complex64::new(self.re.float()?, self.im.float()?))
    }
}

fn default_backend() -> String {
    "exact".into()
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct MatrixDoc {
    rows: usize,
    cols: usize,
    #[serde(default = "default_backend")]
    backend: String,
    entries: Vec<Entry>,
}

impl MatrixDoc {
    fn from_matrix(m: &Matrix) -> Self {
        let entries = match m.backend() {
            Backend::Exact => m.exact_entries().expect("exact").iter().map(Entry::exact).collect(),
            Backend::Float => m.float_entries().expect("float").iter().map(Entry::float).collect(),
        };
        MatrixDoc { rows: m.rows(), cols: m.cols(), backend: m.backend().to_string(), entries }
    }

    fn to_matrix(&self) -> Result<Matrix, IoError> {
        match self.backend.as_str() {
            "exact" => Ok(Matrix::from_exact(self.rows, self.cols, self.entries.iter().map(Entry::to_exact).collect::<Result<_, _>>()?)?),
            "float" => Ok(Matrix::from_float(self.rows, self.cols, self.entries.iter().map(Entry::to_float).collect::<Result<_, _>>()?)?),
            other => Err(IoError::Invalid(format!("unknown backend {other}"))),
        }
    }
}

impl Document for Matrix {
    fn from_json(text: &str) -> Result<Self, IoError> {
        from_json::<MatrixDoc>(text)?.to_matrix()
    }

    fn to_json(&self) -> String {
        to_json(&MatrixDoc::from_matrix(self))
    }

    fn from_payload(p: Payload) -> Option<Self> {
        match p {
            Payload::State(m) => Some(m),
            _ => None,
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct RelationDoc {
    name: String,
    arity: usize,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct StructureDoc {
    signature: Vec<RelationDoc>,
    universe: Vec<String>,
    #[serde(default)]
    relations: IndexMap<String, Vec<Vec<String>>>,
}

impl StructureDoc {
    fn from_structure(s: &Structure) -> Self {
        let signature = s.signature().relations().iter().map(|r| RelationDoc { name: r.name.clone(), arity: r.arity }).collect();
        let relations = s
            .signature()
            .relations()
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let tuples = s.relation(i).iter().map(|t| t.iter().map(|&e| s.name(e).to_string()).collect()).collect();
                (r.name.clone(), tuples)
            })
            .collect();
        StructureDoc { signature, universe: s.universe().to_vec(), relations }
    }

    fn to_structure(&self) -> Result<Structure, IoError> {
        let sig = Signature::new(self.signature.iter().map(|r| (r.name.clone(), r.arity)))?;
        Ok(Structure::new(sig, self.universe.iter().cloned(), self.relations.iter().map(|(n, ts)| (n.clone(), ts.clone())))?)
    }
}

impl Document for Structure {
    fn from_json(text: &str) -> Result<Self, IoError> {
        from_json::<StructureDoc>(text)?.to_structure()
    }

    fn to_json(&self) -> String {
        to_json(&StructureDoc::from_structure(self))
    }

    fn from_payload(p: Payload) -> Option<Self> {
        match p {
            Payload::Structure(s) => Some(s),
            Payload::Graph(g) => Some(g.to_structure()),
            _ => None,
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    vertices: Vec<String>,
    edges: Vec<[String; 2]>,
}

impl Document for Graph {
    fn from_json(text: &str) -> Result<Self, IoError> {
        let doc: GraphDoc = from_json(text)?;
        let edges: Vec<(String, String)> = doc.edges.into_iter().map(|[u, v]| (u, v)).collect();
        Ok(Graph::new(&doc.vertices, &edges)?)
    }

    fn to_json(&self) -> String {
        let v = self.vertices();
        let edges = self.edges().map(|(i, j)| [v[i].clone(), v[j].clone()]).collect();
        to_json(&GraphDoc { vertices: v.to_vec(), edges })
    }

    fn from_payload(p: Payload) -> Option<Self> {
        match p {
            Payload::Graph(g) => Some(g),
            _ => None,
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct CspConstraintDoc {
    scope: Vec<String>,
    allowed: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct CspDoc {
    variables: Vec<String>,
    domain: Vec<String>,
    constraints: Vec<CspConstraintDoc>,
}

impl Document for CspInstance {
    fn from_json(text: &str) -> Result<Self, IoError> {
        let doc: CspDoc = from_json(text)?;
        let constraints = doc
            .constraints
            .into_iter()
            .map(|c| CspConstraint { scope: c.scope, allowed: c.allowed.into_iter().collect() })
            .collect();
        Ok(CspInstance::new(doc.variables, doc.domain, constraints)?)
    }

    fn to_json(&self) -> String {
        let constraints = self
            .constraints
            .iter()
            .map(|c| CspConstraintDoc { scope: c.scope.clone(), allowed: c.allowed.iter().cloned().collect() })
            .collect();
        to_json(&CspDoc { variables: self.variables.clone(), domain: self.domain.clone(), constraints })
    }

    fn from_payload(p: Payload) -> Option<Self> {
        match p {
            Payload::Bcs(b) => Some(b.to_csp()),
            _ => None,
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct WeightedOutcome {
    outcome: Vec<String>,
    p: Num,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct ContextDoc {
    members: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    support: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    probabilities: Option<Vec<WeightedOutcome>>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct EmpiricalDoc {
    measurements: Vec<String>,
    outcomes: Vec<String>,
    contexts: Vec<ContextDoc>,
}

/// Threshold below which a float probability counts as zero.
const FLOAT_SUPPORT_TOL: f64 = 1e-12;

impl Document for EmpiricalModel {
    fn from_json(text: &str) -> Result<Self, IoError> {
        let doc: EmpiricalDoc = from_json(text)?;
        let mut contexts = Vec::new();
        for c in doc.contexts {
            let support: BTreeSet<Vec<String>> = match (c.support, c.probabilities) {
                (Some(s), None) => s.into_iter().collect(),
                (None, Some(ps)) => {
                    let mut out = BTreeSet::new();
                    for w in ps {
                        let possible = match &w.p {
                            Num::Text(s) => !parse_rational(s)?.is_zero(),
                            Num::Number(x) => *x > FLOAT_SUPPORT_TOL,
                        };
                        if possible {
                            out.insert(w.outcome);
                        }
                    }
                    out
                }
                _ => {
                    return Err(IoError::Invalid(format!(
                        "context {{{}}} needs exactly one of support or probabilities",
                        c.members.join(",")
                    )))
                }
            };
            contexts.push(MeasurementContext { members: c.members, support });
        }
        Ok(EmpiricalModel::new(doc.measurements, doc.outcomes, contexts)?)
    }

    fn to_json(&self) -> String {
        let contexts = self
            .contexts
            .iter()
            .map(|c| ContextDoc { members: c.members.clone(), support: Some(c.support.iter().cloned().collect()), probabilities: None })
            .collect();
        to_json(&EmpiricalDoc { measurements: self.measurements.clone(), outcomes: self.outcomes.clone(), contexts })
    }

    fn from_payload(p: Payload) -> Option<Self> {
        match p {
            Payload::Empirical(e) => Some(e),
            _ => None,
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct BoolConstraintDoc {
    scope: Vec<String>,
    table: BTreeMap<String, u8>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct BcsDoc {
    variables: Vec<String>,
    constraints: Vec<BoolConstraintDoc>,
}

impl Document for Bcs {
    fn from_json(text: &str) -> Result<Self, IoError> {
        let doc: BcsDoc = from_json(text)?;
        let mut constraints = Vec::new();
        for c in doc.constraints {
            let k = c.scope.len();
            let mut table = vec![None; 1 << k];
            for (bits, value) in &c.table {
                let valid = bits.len() == k && bits.chars().all(|ch| ch == '0' || ch == '1');
                if !valid {
                    return Err(IoError::Invalid(format!("bad truth-table key {bits:?} for scope ({})", c.scope.join(","))));
                }
                if *value > 1 {
                    return Err(IoError::Invalid(format!("truth-table value for {bits} must be 0 or 1")));
                }
                table[usize::from_str_radix(bits, 2).expect("binary digits")] = Some(*value == 1);
            }
            let table: Option<Vec<bool>> = table.into_iter().collect();
            let table = table.ok_or_else(|| IoError::Invalid(format!("truth table for ({}) is not total", c.scope.join(","))))?;
            constraints.push(BoolConstraint { scope: c.scope, table });
        }
        Ok(Bcs::new(doc.variables, constraints)?)
    }

    fn to_json(&self) -> String {
        let constraints = self
            .constraints
            .iter()
            .map(|c| {
                let k = c.scope.len();
                let table = c.table.iter().enumerate().map(|(i, &b)| (format!("{i:0k$b}"), b as u8)).collect();
                BoolConstraintDoc { scope: c.scope.clone(), table }
            })
            .collect();
        to_json(&BcsDoc { variables: self.variables.clone(), constraints })
    }

    fn from_payload(p: Payload) -> Option<Self> {
        match p {
            Payload::Bcs(b) => Some(b),
            _ => None,
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct OpsolDoc {
    dim: usize,
    operators: BTreeMap<String, MatrixDoc>,
}

impl Document for OperatorSolution {
    fn from_json(text: &str) -> Result<Self, IoError> {
        let doc: OpsolDoc = from_json(text)?;
        let ops = doc.operators.iter().map(|(k, m)| Ok((k.clone(), m.to_matrix()?))).collect::<Result<_, IoError>>()?;
        Ok(OperatorSolution::new(doc.dim, ops)?)
    }

    fn to_json(&self) -> String {
        let operators = self.operators.iter().map(|(k, m)| (k.clone(), MatrixDoc::from_matrix(m))).collect();
        to_json(&OpsolDoc { dim: self.dim, operators })
    }

    fn from_payload(p: Payload) -> Option<Self> {
        match p {
            Payload::OperatorSolution(o) => Some(o),
            _ => None,
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct PvmsDoc {
    measurements: BTreeMap<String, Vec<MatrixDoc>>,
}

/// Reads measurements whose effects are listed in the order of `outcomes`.
pub fn parse_pvms(text: &str, outcomes: &[String]) -> Result<Pvms, IoError> {
    let doc: PvmsDoc = from_json(text)?;
    let mut dim = None;
    let mut out = BTreeMap::new();
    for (x, effects) in doc.measurements {
        if effects.len() != outcomes.len() {
            return Err(IoError::Invalid(format!("measurement {x} lists {} effects for {} outcomes", effects.len(), outcomes.len())));
        }
        let mut povm = BTreeMap::new();
        for (o, m) in outcomes.iter().zip(&effects) {
            let m = m.to_matrix()?;
            dim.get_or_insert(m.rows());
            povm.insert(o.clone(), m);
        }
        out.insert(x, povm);
    }
    let dim = dim.ok_or_else(|| IoError::Invalid("no measurements".into()))?;
    Ok(Pvms::new(dim, out)?)
}

pub fn pvms_to_json(pvms: &Pvms, outcomes: &[String]) -> String {
    let measurements = pvms
        .measurements()
        .iter()
        .map(|(x, povm)| {
            let zero = Matrix::zeros(pvms.dim(), pvms.dim(), pvms.backend());
            (x.clone(), outcomes.iter().map(|o| MatrixDoc::from_matrix(povm.get(o).unwrap_or(&zero))).collect())
        })
        .collect();
    to_json(&PvmsDoc { measurements })
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct HomMapDoc {
    map: IndexMap<String, String>,
}

pub fn parse_hom_map(text: &str, a: &Structure, b: &Structure) -> Result<Homomorphism, IoError> {
    let doc: HomMapDoc = from_json(text)?;
    let pairs: Vec<(String, String)> = doc.map.into_iter().collect();
    Ok(Homomorphism::from_names(a, b, &pairs)?)
}

pub fn hom_map_to_json(f: &Homomorphism, a: &Structure, b: &Structure) -> String {
    let map = (0..a.size()).map(|x| (a.name(x).to_string(), b.name(f.apply(x)).to_string())).collect();
    to_json(&HomMapDoc { map })
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(untagged)]
enum RefDoc {
    Name(String),
    Structure(StructureDoc),
    Graph(GraphDoc),
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct CellDoc {
    x: String,
    y: String,
    matrix: MatrixDoc,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct CertDoc {
    dim: usize,
    source: RefDoc,
    target: RefDoc,
    projectors: Vec<CellDoc>,
}

/// Where a certificate's structure comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum StructureRef {
    /// `catalog:<id>` or a path, written back verbatim.
    Named(String),
    Inline,
}

#[derive(Clone, Debug)]
pub struct CertFile {
    pub cert: QHomCert,
    pub source: StructureRef,
    pub target: StructureRef,
}

impl CertFile {
    pub fn inline(cert: QHomCert) -> Self {
        CertFile { cert, source: StructureRef::Inline, target: StructureRef::Inline }
    }
}

pub fn parse_cert(text: &str, resolve: &dyn Fn(&str) -> Result<Structure, IoError>) -> Result<CertFile, IoError> {
    let doc: CertDoc = from_json(text)?;
    let side = |r: &RefDoc| -> Result<(Structure, StructureRef), IoError> {
        match r {
            RefDoc::Name(n) => Ok((resolve(n)?, StructureRef::Named(n.clone()))),
            RefDoc::Structure(s) => Ok((s.to_structure()?, StructureRef::Inline)),
            RefDoc::Graph(g) => {
                let edges: Vec<(String, String)> = g.edges.iter().map(|[u, v]| (u.clone(), v.clone())).collect();
                Ok((Graph::new(&g.vertices, &edges)?.to_structure(), StructureRef::Inline))
            }
        }
    };
    let (a, source) = side(&doc.source)?;
    let (b, target) = side(&doc.target)?;
    let mut cells = Vec::new();
    for c in &doc.projectors {
        cells.push(((a.element(&c.x)?, b.element(&c.y)?), c.matrix.to_matrix()?));
    }
    let cert = QHomCert::new(doc.dim, Arc::new(a), Arc::new(b), cells)?;
    Ok(CertFile { cert, source, target })
}

pub fn cert_to_json(file: &CertFile) -> String {
    let c = &file.cert;
    let side = |r: &StructureRef, s: &Structure| match r {
        StructureRef::Named(n) => RefDoc::Name(n.clone()),
        StructureRef::Inline => RefDoc::Structure(StructureDoc::from_structure(s)),
    };
    let projectors = c
        .cells()
        .map(|(&(x, y), m)| CellDoc { x: c.source().name(x).to_string(), y: c.target().name(y).to_string(), matrix: MatrixDoc::from_matrix(m) })
        .collect();
    to_json(&CertDoc { dim: c.dim(), source: side(&file.source, c.source()), target: side(&file.target, c.target()), projectors })
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(untagged)]
enum StateDoc {
    Exact {
        entries: Vec<Entry>,
        #[serde(rename = "normSq")]
        norm_sq: String,
    },
    Float {
        #[serde(rename = "floatEntries")]
        float_entries: Vec<Entry>,
    },
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct AliceOutcome {
    tuple: Vec<String>,
    matrix: MatrixDoc,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct AliceDoc {
    relation: String,
    tuple: Vec<String>,
    outcomes: Vec<AliceOutcome>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct BobOutcome {
    value: String,
    matrix: MatrixDoc,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct BobDoc {
    element: String,
    outcomes: Vec<BobOutcome>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct StrategyDoc {
    dim_a: usize,
    dim_b: usize,
    state: StateDoc,
    alice: Vec<AliceDoc>,
    bob: Vec<BobDoc>,
}

impl Document for Strategy {
    fn from_json(text: &str) -> Result<Self, IoError> {
        let doc: StrategyDoc = from_json(text)?;
        let n = doc.dim_a * doc.dim_b;
        let state = match &doc.state {
            StateDoc::Exact { entries, norm_sq } => {
                let psi = Matrix::from_exact(n, 1, entries.iter().map(Entry::to_exact).collect::<Result<_, _>>()?)?;
                let declared = parse_rational(norm_sq)?;
                let Scalar::Exact(actual) = psi.adjoint().matmul(&psi)?.get(0, 0) else { unreachable!("exact") };
                if actual.re != declared {
                    return Err(IoError::Invalid(format!("normSq is {norm_sq} but the entries give {}", format_rational(&actual.re))));
                }
                psi
            }
            StateDoc::Float { float_entries } => Matrix::from_float(n, 1, float_entries.iter().map(Entry::to_float).collect::<Result<_, _>>()?)?,
        };
        let mut alice = BTreeMap::new();
        for a in doc.alice {
            let mut povm = BTreeMap::new();
            for o in a.outcomes {
                povm.insert(o.tuple, o.matrix.to_matrix()?);
            }
            if alice.insert((a.relation.clone(), a.tuple.clone()), povm).is_some() {
                return Err(IoError::Invalid(format!("Alice context {}({}) is listed twice", a.relation, a.tuple.join(","))));
            }
        }
        let mut bob = BTreeMap::new();
        for b in doc.bob {
            let mut povm = BTreeMap::new();
            for o in b.outcomes {
                povm.insert(o.value, o.matrix.to_matrix()?);
            }
            if bob.insert(b.element.clone(), povm).is_some() {
                return Err(IoError::Invalid(format!("Bob element {} is listed twice", b.element)));
            }
        }
        Ok(Strategy::new(doc.dim_a, doc.dim_b, state, alice, bob)?)
    }

    fn to_json(&self) -> String {
        let st = self.state();
        let state = match st.backend() {
            Backend::Exact => {
                let Scalar::Exact(n) = self.norm_sq() else { unreachable!("exact") };
                StateDoc::Exact { entries: st.exact_entries().expect("exact").iter().map(Entry::exact).collect(), norm_sq: format_rational(&n.re) }
            }
            Backend::Float => StateDoc::Float { float_entries: st.float_entries().expect("float").iter().map(Entry::float).collect() },
        };
        let alice = self
            .alice()
            .iter()
            .map(|((rel, t), povm)| AliceDoc {
                relation: rel.clone(),
                tuple: t.clone(),
                outcomes: povm.iter().map(|(ys, m)| AliceOutcome { tuple: ys.clone(), matrix: MatrixDoc::from_matrix(m) }).collect(),
            })
            .collect();
        let bob = self
            .bob()
            .iter()
            .map(|(x, povm)| BobDoc {
                element: x.clone(),
                outcomes: povm.iter().map(|(y, m)| BobOutcome { value: y.clone(), matrix: MatrixDoc::from_matrix(m) }).collect(),
            })
            .collect();
        to_json(&StrategyDoc { dim_a: self.dim_a(), dim_b: self.dim_b(), state, alice, bob })
    }

    fn from_payload(p: Payload) -> Option<Self> {
        match p {
            Payload::Strategy(s) => Some(s),
            _ => None,
        }
    }
}
