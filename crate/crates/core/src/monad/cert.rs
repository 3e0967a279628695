use std::collections::BTreeMap;
use std::sync::Arc;

use crate::linalg::{Backend, LinalgError, Matrix};
use crate::report::{Condition, Report};
use crate::structures::{gaifman, is_homomorphism, Homomorphism, Structure};

use super::{verify_qdist, verify_relation_membership, MonadError, ProjDist, QDistribution};

/// A family `{P_{x,y}}` of `d × d` matrices indexed by source and target elements.
/// Omitted cells are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct QHomCert {
    dim: usize,
    backend: Backend,
    source: Arc<Structure>,
    target: Arc<Structure>,
    projectors: BTreeMap<(usize, usize), Matrix>,
}

impl QHomCert {
    pub fn new(
        dim: usize,
        source: Arc<Structure>,
        target: Arc<Structure>,
        cells: impl IntoIterator<Item = ((usize, usize), Matrix)>,
    ) -> Result<Self, MonadError> {
        let mut projectors = BTreeMap::new();
        let mut backend = None;
        for ((x, y), m) in cells {
            if x >= source.size() {
                return Err(MonadError::UnknownElement(x));
            }
            if y >= target.size() {
                return Err(MonadError::UnknownElement(y));
            }
            if m.shape() != (dim, dim) {
                return Err(MonadError::DimensionMismatch { expected: dim, found: m.shape() });
            }
            if *backend.get_or_insert(m.backend()) != m.backend() {
                return Err(LinalgError::BackendMismatch.into());
            }
            if projectors.contains_key(&(x, y)) {
                return Err(MonadError::DuplicateKey);
            }
            if !m.is_zero(0.0) {
                projectors.insert((x, y), m);
            }
        }
        Ok(Self { dim, backend: backend.unwrap_or(Backend::Exact), source, target, projectors })
    }

    /// The dimension-one certificate of a classical map: `P_{x,y} = [1]` iff `f(x) = y`.
    pub fn classical_lift(source: Arc<Structure>, target: Arc<Structure>, f: &Homomorphism) -> Result<Self, MonadError> {
        f.check_shape(&source, &target)?;
        let one = Matrix::identity(1, Backend::Exact);
        let cells: Vec<_> = f.map.iter().enumerate().map(|(x, &y)| ((x, y), one.clone())).collect();
        Self::new(1, source, target, cells)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn source(&self) -> &Arc<Structure> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Structure> {
        &self.target
    }

    pub fn cells(&self) -> impl Iterator<Item = (&(usize, usize), &Matrix)> {
        self.projectors.iter()
    }

    pub fn get(&self, x: usize, y: usize) -> Option<&Matrix> {
        self.projectors.get(&(x, y))
    }

    pub fn value(&self, x: usize, y: usize) -> Matrix {
        self.get(x, y).cloned().unwrap_or_else(|| self.zero())
    }

    pub fn zero(&self) -> Matrix {
        Matrix::zeros(self.dim, self.dim, self.backend)
    }

    /// Nonzero cells of row `x`.
    pub fn row(&self, x: usize) -> impl Iterator<Item = (usize, &Matrix)> {
        self.projectors.range((x, 0)..(x + 1, 0)).map(|(&(_, y), m)| (y, m))
    }

    /// `P_{x,y}` for a tuple: `P_{x_1,y_1} ⋯ P_{x_k,y_k}`.
    pub fn tuple_product(&self, xs: &[usize], ys: &[usize]) -> Result<Matrix, MonadError> {
        let mut acc = Matrix::identity(self.dim, self.backend);
        for (&x, &y) in xs.iter().zip(ys) {
            match self.get(x, y) {
                Some(m) => acc = acc.matmul(m)?,
                None => return Ok(self.zero()),
            }
        }
        Ok(acc)
    }

    /// For a dimension-one certificate whose rows are deltas, the underlying classical map.
    pub fn classical_map(&self) -> Option<Homomorphism> {
        if self.dim != 1 {
            return None;
        }
        let one = Matrix::identity(1, self.backend);
        let mut map = Vec::with_capacity(self.source.size());
        for x in 0..self.source.size() {
            let row: Vec<_> = self.row(x).collect();
            match row.as_slice() {
                [(y, m)] if m.approx_eq(&one, 0.0) => map.push(*y),
                _ => return None,
            }
        }
        Some(Homomorphism::new(map))
    }

    /// Replaces every cell by `f(cell)`, keeping structures and dimension.
    pub fn map_cells(&self, dim: usize, f: impl Fn(&Matrix) -> Result<Matrix, MonadError>) -> Result<Self, MonadError> {
        let cells = self
            .projectors
            .iter()
            .map(|(&k, m)| Ok((k, f(m)?)))
            .collect::<Result<Vec<_>, MonadError>>()?;
        Self::new(dim, self.source.clone(), self.target.clone(), cells)
    }

    fn location(&self, x: usize, y: usize) -> String {
        format!("P[{},{}]", self.source.name(x), self.target.name(y))
    }
}

/// Checks QH1 (rows sum to `I`), QH2 (commutation across Gaifman-adjacent source elements)
/// and QH3 (products over `x ∈ R^A`, `y ∉ R^B` vanish), plus that every cell is a projector.
pub fn verify_qhom(c: &QHomCert, tol: f64) -> Report {
    match verify_inner(c, tol) {
        Ok(r) => r,
        Err(e) => {
            let mut r = Report::new();
            r.push(Condition::Projector, "certificate", e.to_string());
            r
        }
    }
}

fn verify_inner(c: &QHomCert, tol: f64) -> Result<Report, MonadError> {
    let (a, b) = (&*c.source, &*c.target);
    let mut report = Report::new();
    if a.signature() != b.signature() {
        report.push(Condition::Homomorphism, "signature", "source and target signatures differ");
        return Ok(report);
    }
    for (&(x, y), m) in &c.projectors {
        if !m.is_projector(tol)? {
            report.push(Condition::Projector, c.location(x, y), "not a projector");
        }
    }
    let identity = Matrix::identity(c.dim, c.backend);
    for x in 0..a.size() {
        let sum = Matrix::sum(c.row(x).map(|(_, m)| m), c.dim, c.dim, c.backend)?;
        if !sum.approx_eq(&identity, tol) {
            report.push(Condition::Qh1, format!("x={}", a.name(x)), "row does not sum to the identity");
        }
    }
    let g = gaifman(a);
    for (x, x2) in g.edges() {
        for (y, p) in c.row(x) {
            for (y2, q) in c.row(x2) {
                if x == x2 && y >= y2 {
                    continue;
                }
                if !p.commutator(q)?.is_zero(tol) {
                    report.push(
                        Condition::Qh2,
                        format!("{} vs {}", c.location(x, y), c.location(x2, y2)),
                        "projectors of adjacent elements do not commute",
                    );
                }
            }
        }
    }
    for (rel, xs) in a.tuples() {
        let mut ys = Vec::with_capacity(xs.len());
        qh3_walk(c, rel, xs, &mut ys, tol, &mut report)?;
    }
    Ok(report)
}

fn qh3_walk(
    c: &QHomCert,
    rel: usize,
    xs: &[usize],
    ys: &mut Vec<usize>,
    tol: f64,
    report: &mut Report,
) -> Result<(), MonadError> {
    let i = ys.len();
    if i == xs.len() {
        if !c.target.contains(rel, ys) && !c.tuple_product(xs, ys)?.is_zero(tol) {
            report.push(
                Condition::Qh3,
                format!(
                    "{} {} -> {}",
                    c.source.signature().relations()[rel].name,
                    c.source.format_tuple(xs),
                    c.target.format_tuple(ys)
                ),
                "product over a non-tuple of the target is nonzero",
            );
        }
        return Ok(());
    }
    let next: Vec<usize> = c.row(xs[i]).map(|(y, _)| y).collect();
    for y in next {
        ys.push(y);
        qh3_walk(c, rel, xs, ys, tol, report)?;
        ys.pop();
    }
    Ok(())
}

/// The Kleisli arrow `h: A → Q_d B` of a verified certificate, as one distribution per
/// source element.
pub fn cert_to_kleisli(c: &QHomCert, tol: f64) -> Result<Vec<QDistribution>, MonadError> {
    let report = verify_qhom(c, tol);
    if !report.pass {
        return Err(MonadError::InvalidCertificate(report));
    }
    (0..c.source.size())
        .map(|x| ProjDist::new(c.dim, c.row(x).map(|(y, m)| (y, m.clone()))))
        .collect()
}

/// Inverse of [`cert_to_kleisli`]: each `h(x)` must be a distribution over `target`, and
/// `h` must send every tuple of `source` into the lifted relation of `Q_d target`.
pub fn kleisli_to_cert(
    source: Arc<Structure>,
    target: Arc<Structure>,
    h: &[QDistribution],
    tol: f64,
) -> Result<QHomCert, MonadError> {
    if h.len() != source.size() {
        return Err(MonadError::BaseMismatch);
    }
    let dim = h.first().map(ProjDist::dim).ok_or(MonadError::EmptySupport)?;
    let mut report = Report::new();
    for p in h {
        if p.dim() != dim {
            return Err(MonadError::DimensionMismatch { expected: dim, found: (p.dim(), p.dim()) });
        }
        report.extend(verify_qdist(p, &target, tol)?);
    }
    for (rel, xs) in source.tuples() {
        let tuple: Vec<QDistribution> = xs.iter().map(|&x| h[x].clone()).collect();
        let name = &source.signature().relations()[rel].name;
        report.extend(verify_relation_membership(&tuple, name, &target, tol)?);
    }
    if !report.pass {
        return Err(MonadError::InvalidDistribution(report));
    }
    let cells = h
        .iter()
        .enumerate()
        .flat_map(|(x, p)| p.support().iter().map(move |(y, m)| ((x, *y), m.clone())));
    QHomCert::new(dim, source, target, cells)
}

/// Graded Kleisli composition `R_{x,z} = Σ_y P_{x,y} ⊗ Q_{y,z}`, of dimension `d·d'`.
pub fn kleisli_compose(h: &QHomCert, k: &QHomCert, tol: f64) -> Result<QHomCert, MonadError> {
    if !Arc::ptr_eq(&h.target, &k.source) && *h.target != *k.source {
        return Err(MonadError::BaseMismatch);
    }
    for c in [h, k] {
        let report = verify_qhom(c, tol);
        if !report.pass {
            return Err(MonadError::InvalidCertificate(report));
        }
    }
    if h.backend != k.backend {
        return Err(LinalgError::BackendMismatch.into());
    }
    let dim = h.dim * k.dim;
    let mut acc: BTreeMap<(usize, usize), Matrix> = BTreeMap::new();
    for (&(x, y), p) in &h.projectors {
        for (z, q) in k.row(y) {
            let term = p.kron(q)?;
            match acc.get_mut(&(x, z)) {
                Some(m) => *m = m.checked_add(&term)?,
                None => {
                    acc.insert((x, z), term);
                }
            }
        }
    }
    QHomCert::new(dim, h.source.clone(), k.target.clone(), acc)
}

/// Whether a certificate is the classical lift of a homomorphism.
pub fn is_classical_homomorphism(c: &QHomCert) -> bool {
    c.classical_map()
        .map(|f| is_homomorphism(&c.source, &c.target, &f).unwrap_or(false))
        .unwrap_or(false)
}
