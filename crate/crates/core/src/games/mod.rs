//! The two-prover homomorphism game.
//!
//! Alice receives a relation name and a tuple of the source structure, Bob a single
//! element, and they answer with target elements. Strategies are stored by element
//! names so that they can be read and written without the structures at hand.

mod special;

pub use special::{
    cert_from_special_strategy, schmidt_reduce, strategy_from_cert, to_maximally_entangled, verify_special_form,
    SpecialFormReport,
};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::linalg::{format_rational, rational_to_f64, Backend, LinalgError, Matrix, Rational, Scalar};
use crate::monad::MonadError;
use crate::report::{Condition, Report};
use crate::structures::{Homomorphism, Structure, StructureError};

/// Alice's question: a relation name and a tuple of element names.
pub type Context = (String, Vec<String>);

/// Alice's POVM for one context, keyed by answer tuples. Missing answers have zero effect.
pub type AlicePovm = BTreeMap<Vec<String>, Matrix>;

/// Bob's POVM for one element, keyed by answers.
pub type BobPovm = BTreeMap<String, Matrix>;

/// Outcome probabilities keyed by question, Alice's answer and Bob's answer.
pub type ProbabilityTable = BTreeMap<(Question, Vec<String>, String), Probability>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Monad(#[from] MonadError),
    #[error("{0}")]
    Shape(String),
    #[error("the state is zero")]
    ZeroState,
    #[error("no POVM for {0}")]
    MissingPovm(String),
    #[error("unknown label {0}")]
    UnknownLabel(String),
    #[error("malformed POVMs:\n{0}")]
    MalformedPovm(Report),
    #[error("strategy is not perfect:\n{0}")]
    NotPerfect(Report),
    #[error("strategy is not in special form:\n{0}")]
    NotSpecialForm(Report),
    #[error("certificate does not verify:\n{0}")]
    InvalidCertificate(Report),
    #[error("contexts {first} and {second} define different projectors for element {element}")]
    ContextClash { element: String, first: String, second: String },
    #[error("dimensions {0} and {1} differ")]
    NotSquare(usize, usize),
    #[error("state has Schmidt rank {rank} < {dim}")]
    NotFullRank { rank: usize, dim: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Question {
    pub relation: String,
    pub tuple: Vec<String>,
    pub element: String,
}

impl fmt::Display for Question {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}) / {}", self.relation, self.tuple.join(","), self.element)
    }
}

/// A probability, exact when computed on the exact backend.
#[derive(Clone, Debug, PartialEq)]
pub enum Probability {
    Exact(Rational),
    Float(f64),
}

impl Probability {
    pub fn to_f64(&self) -> f64 {
        match self {
            Probability::Exact(r) => rational_to_f64(r),
            Probability::Float(x) => *x,
        }
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        match self {
            Probability::Exact(r) => r.is_zero(),
            Probability::Float(x) => x.abs() <= tol,
        }
    }

    pub fn is_one(&self, tol: f64) -> bool {
        match self {
            Probability::Exact(r) => r.is_one(),
            Probability::Float(x) => (x - 1.0).abs() <= tol,
        }
    }

    fn zero(backend: Backend) -> Self {
        match backend {
            Backend::Exact => Probability::Exact(Rational::zero()),
            Backend::Float => Probability::Float(0.0),
        }
    }

    fn add(&self, other: &Probability) -> Probability {
        match (self, other) {
            (Probability::Exact(a), Probability::Exact(b)) => Probability::Exact(a + b),
            _ => Probability::Float(self.to_f64() + other.to_f64()),
        }
    }

    fn div(&self, n: usize) -> Probability {
        match self {
            Probability::Exact(a) => Probability::Exact(a / Rational::from_integer(n.into())),
            Probability::Float(x) => Probability::Float(x / n as f64),
        }
    }

    fn min<'a>(&'a self, other: &'a Probability) -> &'a Probability {
        if other.to_f64() < self.to_f64() {
            other
        } else {
            self
        }
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Probability::Exact(r) => f.write_str(&format_rational(r)),
            Probability::Float(x) => write!(f, "{x}"),
        }
    }
}

/// A pure-state strategy: shared state `ψ ∈ C^{d_A} ⊗ C^{d_B}`, Alice's POVMs per context
/// and Bob's POVMs per element.
///
/// Exact states are kept unnormalized; probabilities divide by `ψ^*ψ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Strategy {
    dim_a: usize,
    dim_b: usize,
    state: Matrix,
    alice: BTreeMap<Context, AlicePovm>,
    bob: BTreeMap<String, BobPovm>,
}

impl Strategy {
    /// Checks shapes and backends and drops zero effects. POVM conditions are checked by
    /// [`Strategy::check_povms`].
    pub fn new(
        dim_a: usize,
        dim_b: usize,
        state: Matrix,
        alice: BTreeMap<Context, AlicePovm>,
        bob: BTreeMap<String, BobPovm>,
    ) -> Result<Self, GameError> {
        if state.shape() != (dim_a * dim_b, 1) {
            return Err(GameError::Shape(format!(
                "state has shape {:?}, expected a column of length {}",
                state.shape(),
                dim_a * dim_b
            )));
        }
        if state.is_zero(0.0) {
            return Err(GameError::ZeroState);
        }
        let backend = state.backend();
        let check = |m: &Matrix, d: usize, what: &str| -> Result<(), GameError> {
            if m.shape() != (d, d) {
                return Err(GameError::Shape(format!("{what} effect has shape {:?}, expected {d}x{d}", m.shape())));
            }
            if m.backend() != backend {
                return Err(LinalgError::BackendMismatch.into());
            }
            Ok(())
        };
        let mut a2 = BTreeMap::new();
        for ((rel, tuple), povm) in alice {
            let mut kept = BTreeMap::new();
            for (ys, m) in povm {
                check(&m, dim_a, "Alice")?;
                if ys.len() != tuple.len() {
                    return Err(GameError::Shape(format!(
                        "answer ({}) to {rel}({}) has the wrong length",
                        ys.join(","),
                        tuple.join(",")
                    )));
                }
                if !m.is_zero(0.0) {
                    kept.insert(ys, m);
                }
            }
            a2.insert((rel, tuple), kept);
        }
        let mut b2 = BTreeMap::new();
        for (x, povm) in bob {
            let mut kept = BTreeMap::new();
            for (y, m) in povm {
                check(&m, dim_b, "Bob")?;
                if !m.is_zero(0.0) {
                    kept.insert(y, m);
                }
            }
            b2.insert(x, kept);
        }
        Ok(Self { dim_a, dim_b, state, alice: a2, bob: b2 })
    }

    /// The deterministic strategy answering `f(𝐱)` and `f(x)`, with `d_A = d_B = 1`.
    /// `f` need not be a homomorphism.
    pub fn deterministic(a: &Structure, b: &Structure, f: &Homomorphism) -> Result<Self, GameError> {
        f.check_shape(a, b)?;
        let one = Matrix::identity(1, Backend::Exact);
        let names = |t: &[usize], s: &Structure| t.iter().map(|&e| s.name(e).to_string()).collect::<Vec<_>>();
        let mut alice = BTreeMap::new();
        for (rel, t) in a.tuples() {
            let ctx = (a.signature().relations()[rel].name.clone(), names(t, a));
            alice.insert(ctx, BTreeMap::from([(names(&f.apply_tuple(t), b), one.clone())]));
        }
        let bob = (0..a.size())
            .map(|x| (a.name(x).to_string(), BTreeMap::from([(b.name(f.apply(x)).to_string(), one.clone())])))
            .collect();
        Self::new(1, 1, one.clone(), alice, bob)
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn backend(&self) -> Backend {
        self.state.backend()
    }

    pub fn state(&self) -> &Matrix {
        &self.state
    }

    pub fn alice(&self) -> &BTreeMap<Context, AlicePovm> {
        &self.alice
    }

    pub fn bob(&self) -> &BTreeMap<String, BobPovm> {
        &self.bob
    }

    /// `ψ^*ψ`.
    pub fn norm_sq(&self) -> Scalar {
        let n = self.state.adjoint().matmul(&self.state).expect("column");
        n.get(0, 0)
    }

    pub fn to_float(&self) -> Strategy {
        let conv = |m: &Matrix| m.to_float();
        self.map_parts(&conv, &conv, self.state.to_float(), self.dim_a, self.dim_b).expect("same shapes")
    }

    /// Replaces the state, keeping the measurements.
    pub fn with_state(&self, state: Matrix) -> Result<Strategy, GameError> {
        Self::new(self.dim_a, self.dim_b, state, self.alice.clone(), self.bob.clone())
    }

    /// Applies local isometries or unitaries: `ψ ↦ (U_A ⊗ U_B)ψ`, `ℰ ↦ U_A ℰ U_A^*`,
    /// `ℱ ↦ U_B ℱ U_B^*`. With co-isometries this is a local compression.
    pub fn transform(&self, ua: &Matrix, ub: &Matrix) -> Result<Strategy, GameError> {
        if ua.cols() != self.dim_a || ub.cols() != self.dim_b || ua.backend() != self.backend() {
            return Err(GameError::Shape("local maps do not fit the strategy".into()));
        }
        let state = ua.kron(ub)?.matmul(&self.state)?;
        let (ua_adj, ub_adj) = (ua.adjoint(), ub.adjoint());
        let fa = |m: &Matrix| ua.matmul(m).and_then(|x| x.matmul(&ua_adj)).expect("checked shapes");
        let fb = |m: &Matrix| ub.matmul(m).and_then(|x| x.matmul(&ub_adj)).expect("checked shapes");
        self.map_parts(&fa, &fb, state, ua.rows(), ub.rows())
    }

    /// Embeds into `C^{da} ⊗ C^{db}`, zero-padding the state. The first listed effect of
    /// each POVM absorbs the identity on the added dimensions.
    pub fn pad(&self, da: usize, db: usize) -> Result<Strategy, GameError> {
        if da < self.dim_a || db < self.dim_b {
            return Err(GameError::Shape("padding must not shrink the strategy".into()));
        }
        let mut state = Matrix::zeros(da * db, 1, self.backend());
        for a in 0..self.dim_a {
            for b in 0..self.dim_b {
                let v = self.state.get(a * self.dim_b + b, 0);
                let e = Matrix::basis(da * db, a * db + b, self.backend()).scale(&v)?;
                state = state.checked_add(&e)?;
            }
        }
        let complement = |d_old: usize, d_new: usize| -> Result<Matrix, GameError> {
            let all = Matrix::identity(d_new, self.backend());
            Ok(all.checked_sub(&Matrix::identity(d_old, self.backend()).embed(d_new, d_new)?)?)
        };
        let (ca, cb) = (complement(self.dim_a, da)?, complement(self.dim_b, db)?);
        let mut alice = BTreeMap::new();
        for (ctx, povm) in &self.alice {
            let mut out = BTreeMap::new();
            for (i, (ys, m)) in povm.iter().enumerate() {
                let mut e = m.embed(da, da)?;
                if i == 0 {
                    e = e.checked_add(&ca)?;
                }
                out.insert(ys.clone(), e);
            }
            alice.insert(ctx.clone(), out);
        }
        let mut bob = BTreeMap::new();
        for (x, povm) in &self.bob {
            let mut out = BTreeMap::new();
            for (i, (y, m)) in povm.iter().enumerate() {
                let mut e = m.embed(db, db)?;
                if i == 0 {
                    e = e.checked_add(&cb)?;
                }
                out.insert(y.clone(), e);
            }
            bob.insert(x.clone(), out);
        }
        Strategy::new(da, db, state, alice, bob)
    }

    fn map_parts(
        &self,
        fa: &dyn Fn(&Matrix) -> Matrix,
        fb: &dyn Fn(&Matrix) -> Matrix,
        state: Matrix,
        da: usize,
        db: usize,
    ) -> Result<Strategy, GameError> {
        let alice = self
            .alice
            .iter()
            .map(|(ctx, povm)| (ctx.clone(), povm.iter().map(|(ys, m)| (ys.clone(), fa(m))).collect()))
            .collect();
        let bob = self
            .bob
            .iter()
            .map(|(x, povm)| (x.clone(), povm.iter().map(|(y, m)| (y.clone(), fb(m))).collect()))
            .collect();
        Strategy::new(da, db, state, alice, bob)
    }

    /// Every effect PSD and every POVM summing to the identity.
    pub fn check_povms(&self, tol: f64) -> Result<Report, GameError> {
        let mut report = Report::new();
        let mut check = |povm: &mut dyn Iterator<Item = (String, &Matrix)>, d: usize, loc: String| -> Result<(), GameError> {
            let mut total = Matrix::zeros(d, d, self.backend());
            for (label, m) in povm {
                if !m.is_psd(tol)? {
                    report.push(Condition::Povm, format!("{loc} -> {label}"), "effect is not positive semidefinite");
                }
                total = total.checked_add(m)?;
            }
            if !total.approx_eq(&Matrix::identity(d, self.backend()), tol) {
                report.push(Condition::Povm, loc, "effects do not sum to the identity");
            }
            Ok(())
        };
        for ((rel, t), povm) in &self.alice {
            let mut it = povm.iter().map(|(ys, m)| (format!("({})", ys.join(",")), m));
            check(&mut it, self.dim_a, format!("Alice {rel}({})", t.join(",")))?;
        }
        for (x, povm) in &self.bob {
            let mut it = povm.iter().map(|(y, m)| (y.clone(), m));
            check(&mut it, self.dim_b, format!("Bob {x}"))?;
        }
        Ok(report)
    }

    fn kernel(&self) -> Result<Kernel, GameError> {
        let psi = self.state.reshape(self.dim_a, self.dim_b)?;
        Ok(Kernel { psi_adj: psi.adjoint(), psi, norm: self.norm_sq() })
    }

    fn alice_povm(&self, relation: &str, tuple: &[String]) -> Result<&AlicePovm, GameError> {
        self.alice
            .get(&(relation.to_string(), tuple.to_vec()))
            .ok_or_else(|| GameError::MissingPovm(format!("Alice {relation}({})", tuple.join(","))))
    }

    fn bob_povm(&self, x: &str) -> Result<&BobPovm, GameError> {
        self.bob.get(x).ok_or_else(|| GameError::MissingPovm(format!("Bob {x}")))
    }

    /// Probabilities of all listed joint answers, keyed by question and answers.
    pub fn probability_table(&self) -> Result<ProbabilityTable, GameError> {
        let k = self.kernel()?;
        let mut out = BTreeMap::new();
        for ((rel, t), povm) in &self.alice {
            for (ys, e) in povm {
                let left = k.left(e)?;
                for (x, bpovm) in &self.bob {
                    for (y, f) in bpovm {
                        let q = Question { relation: rel.clone(), tuple: t.clone(), element: x.clone() };
                        out.insert((q, ys.clone(), y.clone()), k.finish(&left, f)?);
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Precomputed pieces of `ψ^*(ℰ⊗ℱ)ψ = Tr(Ψ^* ℰ Ψ ℱ^T)` where `Ψ` is the `d_A × d_B` reshape of `ψ`.
struct Kernel {
    psi: Matrix,
    psi_adj: Matrix,
    norm: Scalar,
}

impl Kernel {
    fn left(&self, e: &Matrix) -> Result<Matrix, LinalgError> {
        self.psi_adj.matmul(e)?.matmul(&self.psi)
    }

    fn finish(&self, left: &Matrix, f: &Matrix) -> Result<Probability, LinalgError> {
        // Tr(M F^T) = Σ_ij M_ij F_ij
        let value = left.matmul(&f.transpose())?.trace()?;
        Ok(match (value, &self.norm) {
            (Scalar::Exact(v), Scalar::Exact(n)) => Probability::Exact(&v.re / &n.re),
            (v, n) => Probability::Float(v.to_complex().re / n.to_complex().re),
        })
    }

    fn alice_only(&self, e: &Matrix) -> Result<Probability, LinalgError> {
        let id = Matrix::identity(self.psi.cols(), e.backend());
        self.finish(&self.left(e)?, &id)
    }
}

/// Probability that Alice answers `ys` and Bob answers `y`.
pub fn outcome_probability(s: &Strategy, q: &Question, ys: &[String], y: &str) -> Result<Probability, GameError> {
    let apovm = s.alice_povm(&q.relation, &q.tuple)?;
    let bpovm = s.bob_povm(&q.element)?;
    if ys.len() != q.tuple.len() {
        return Err(GameError::Shape(format!("answer ({}) has the wrong length", ys.join(","))));
    }
    let (Some(e), Some(f)) = (apovm.get(ys), bpovm.get(y)) else {
        return Ok(Probability::zero(s.backend()));
    };
    let k = s.kernel()?;
    Ok(k.finish(&k.left(e)?, f)?)
}

/// Resolves the strategy against the structures and checks POVM validity.
fn check_game(s: &Strategy, a: &Structure, b: &Structure, tol: f64) -> Result<(), GameError> {
    if a.signature() != b.signature() {
        return Err(StructureError::SignatureMismatch.into());
    }
    for (rel, t) in a.tuples() {
        let name = &a.signature().relations()[rel].name;
        let tuple: Vec<String> = t.iter().map(|&e| a.name(e).to_string()).collect();
        for ys in s.alice_povm(name, &tuple)?.keys() {
            for y in ys {
                b.element(y).map_err(|_| GameError::UnknownLabel(y.clone()))?;
            }
        }
    }
    for x in a.universe() {
        for y in s.bob_povm(x)?.keys() {
            b.element(y).map_err(|_| GameError::UnknownLabel(y.clone()))?;
        }
    }
    let povms = s.check_povms(tol)?;
    if !povms.pass {
        return Err(GameError::MalformedPovm(povms));
    }
    Ok(())
}

fn is_winning(tuple: &[String], x: &str, ys: &[String], y: &str) -> bool {
    tuple.iter().zip(ys).all(|(xi, yi)| xi != x || yi == y)
}

fn in_relation(b: &Structure, relation: &str, ys: &[String]) -> bool {
    let Ok((rel, _)) = b.relation_by_name(relation) else { return false };
    let idx: Result<Vec<usize>, _> = ys.iter().map(|y| b.element(y)).collect();
    idx.map(|t| b.contains(rel, &t)).unwrap_or(false)
}

/// Checks the two perfect-strategy conditions on every question:
/// QS1, Bob's answer agrees with Alice's at every position holding his element, and
/// QS2, Alice's answer lies in the target relation.
pub fn check_perfect(s: &Strategy, a: &Structure, b: &Structure, tol: f64) -> Result<Report, GameError> {
    check_game(s, a, b, tol)?;
    let k = s.kernel()?;
    let mut report = Report::new();
    for (rel, t) in a.tuples() {
        let name = &a.signature().relations()[rel].name;
        let tuple: Vec<String> = t.iter().map(|&e| a.name(e).to_string()).collect();
        let apovm = s.alice_povm(name, &tuple)?;
        let members: BTreeSet<&String> = tuple.iter().collect();
        for (ys, e) in apovm {
            if !in_relation(b, name, ys) {
                let p = k.alice_only(e)?;
                if !p.is_zero(tol) {
                    report.push(
                        Condition::Qs2,
                        format!("{name}({})", tuple.join(",")),
                        format!("answer ({}) is outside the target relation with probability {p}", ys.join(",")),
                    );
                }
            }
            let left = k.left(e)?;
            for x in &members {
                for (y, f) in s.bob_povm(x)? {
                    if is_winning(&tuple, x, ys, y) {
                        continue;
                    }
                    let p = k.finish(&left, f)?;
                    if !p.is_zero(tol) {
                        report.push(
                            Condition::Qs1,
                            format!("{name}({}) / {x}", tuple.join(",")),
                            format!("answers ({}) and {y} disagree with probability {p}", ys.join(",")),
                        );
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Minimum over questions and uniform mean of the winning probability.
pub fn winning_probability(
    s: &Strategy,
    a: &Structure,
    b: &Structure,
    tol: f64,
) -> Result<(Probability, Probability), GameError> {
    check_game(s, a, b, tol)?;
    let k = s.kernel()?;
    let mut total = Probability::zero(s.backend());
    let mut min: Option<Probability> = None;
    let mut count = 0usize;
    for (rel, t) in a.tuples() {
        let name = &a.signature().relations()[rel].name;
        let tuple: Vec<String> = t.iter().map(|&e| a.name(e).to_string()).collect();
        let apovm = s.alice_povm(name, &tuple)?;
        let lefts: Vec<_> = apovm
            .iter()
            .filter(|(ys, _)| in_relation(b, name, ys))
            .map(|(ys, e)| Ok((ys, k.left(e)?)))
            .collect::<Result<_, LinalgError>>()?;
        for x in a.universe() {
            let mut win = Probability::zero(s.backend());
            for (ys, left) in &lefts {
                for (y, f) in s.bob_povm(x)? {
                    if is_winning(&tuple, x, ys, y) {
                        win = win.add(&k.finish(left, f)?);
                    }
                }
            }
            total = total.add(&win);
            min = Some(match min {
                None => win,
                Some(m) => m.min(&win).clone(),
            });
            count += 1;
        }
    }
    let Some(min) = min else {
        // No questions at all: every strategy wins.
        let one = match s.backend() {
            Backend::Exact => Probability::Exact(Rational::one()),
            Backend::Float => Probability::Float(1.0),
        };
        return Ok((one.clone(), one));
    };
    Ok((min, total.div(count)))
}
