use std::collections::BTreeMap;
use std::sync::Arc;

use crate::linalg::{schmidt_decompose, Backend, Matrix};
use crate::monad::{verify_qhom, QHomCert};
use crate::report::{Condition, Report};
use crate::structures::Structure;

use super::{check_perfect, in_relation, AlicePovm, Context, GameError, Strategy};

/// Outcome of [`verify_special_form`]. `pass` is the conjunction of all flags.
#[derive(Clone, Debug, PartialEq)]
pub struct SpecialFormReport {
    pub projective_alice: bool,
    pub projective_bob: bool,
    pub max_entangled: bool,
    pub transpose_link: bool,
    pub relation_zero: bool,
    /// Each of Alice's measurements is the product of its marginals.
    pub product_form: bool,
    pub pass: bool,
    pub report: Report,
}

/// `Σ_{i<d} e_i ⊗ e_i`, unnormalized.
pub(crate) fn max_entangled_state(d: usize, backend: Backend) -> Matrix {
    Matrix::identity(d, backend).reshape(d * d, 1).expect("d*d entries")
}

fn context_label((rel, t): &Context) -> String {
    format!("{rel}({})", t.join(","))
}

/// `ℰ^i_{𝐱,y} = Σ_{𝐲_i = y} ℰ_{𝐱,𝐲}`.
fn marginal(povm: &AlicePovm, i: usize, d: usize, backend: Backend) -> BTreeMap<String, Matrix> {
    let mut out: BTreeMap<String, Matrix> = BTreeMap::new();
    for (ys, m) in povm {
        let acc = out.entry(ys[i].clone()).or_insert_with(|| Matrix::zeros(d, d, backend));
        *acc = acc.checked_add(m).expect("same shape");
    }
    out.retain(|_, m| !m.is_zero(0.0));
    out
}

/// Strategy of the perfect-strategy construction: maximally entangled state,
/// `ℰ_{𝐱,𝐲} = P_{𝐱₁,𝐲₁}⋯P_{𝐱ₖ,𝐲ₖ}` and `ℱ_{x,y} = P_{x,y}^T`.
pub fn strategy_from_cert(c: &QHomCert, tol: f64) -> Result<Strategy, GameError> {
    let report = verify_qhom(c, tol);
    if !report.pass {
        return Err(GameError::InvalidCertificate(report));
    }
    let (a, b) = (c.source(), c.target());
    let mut alice = BTreeMap::new();
    for (rel, t) in a.tuples() {
        let mut povm = BTreeMap::new();
        // Walk the product of row supports; other answers have a zero factor.
        let rows: Vec<Vec<usize>> = t.iter().map(|&x| c.row(x).map(|(y, _)| y).collect()).collect();
        let mut combos: Vec<Vec<usize>> = vec![Vec::new()];
        for r in &rows {
            combos = combos
                .into_iter()
                .flat_map(|p| r.iter().map(move |&y| [p.as_slice(), &[y]].concat()))
                .collect();
        }
        for ys in combos {
            let m = c.tuple_product(t, &ys)?;
            if !m.is_zero(tol) {
                povm.insert(ys.iter().map(|&y| b.name(y).to_string()).collect(), m);
            }
        }
        let ctx = (a.signature().relations()[rel].name.clone(), t.iter().map(|&x| a.name(x).to_string()).collect());
        alice.insert(ctx, povm);
    }
    let bob = (0..a.size())
        .map(|x| (a.name(x).to_string(), c.row(x).map(|(y, m)| (b.name(y).to_string(), m.transpose())).collect()))
        .collect();
    Strategy::new(c.dim(), c.dim(), max_entangled_state(c.dim(), c.backend()), alice, bob)
}

/// Checks projectivity, maximal entanglement, the transpose link between Alice's marginals
/// and Bob, vanishing outside the target relations and the product form of Alice's
/// measurements.
pub fn verify_special_form(s: &Strategy, target: &Structure, tol: f64) -> SpecialFormReport {
    let mut report = Report::new();
    let (d, backend) = (s.dim_a(), s.backend());
    let mut flags = [true; 6];
    let [pa, pb, me, tl, rz, pf] = &mut flags;

    for (ctx, povm) in s.alice() {
        for (ys, m) in povm {
            if !m.is_projector(tol).unwrap_or(false) {
                *pa = false;
                report.push(Condition::ProjectiveAlice, context_label(ctx), format!("effect for ({}) is not a projector", ys.join(",")));
            }
        }
    }
    for (x, povm) in s.bob() {
        for (y, m) in povm {
            if !m.is_projector(tol).unwrap_or(false) {
                *pb = false;
                report.push(Condition::ProjectiveBob, x.clone(), format!("effect for {y} is not a projector"));
            }
        }
    }

    if s.dim_a() != s.dim_b() {
        *me = false;
        report.push(Condition::MaxEntangled, "state", format!("dimensions {} and {} differ", s.dim_a(), s.dim_b()));
    } else {
        let st = s.state();
        let c = st.get(0, 0);
        let omega = max_entangled_state(d, backend);
        let ok = omega.scale(&c).map(|m| m.approx_eq(st, tol)).unwrap_or(false);
        if !ok {
            *me = false;
            report.push(Condition::MaxEntangled, "state", "state is not a multiple of the maximally entangled vector");
        }
    }

    for (ctx, povm) in s.alice() {
        let (rel, t) = ctx;
        for (ys, m) in povm {
            if !in_relation(target, rel, ys) && !m.is_zero(tol) {
                *rz = false;
                report.push(Condition::RelationZero, context_label(ctx), format!("nonzero effect for ({}) outside the relation", ys.join(",")));
            }
        }
        let marginals: Vec<_> = (0..t.len()).map(|i| marginal(povm, i, d, backend)).collect();
        for (i, (x, mi)) in t.iter().zip(&marginals).enumerate() {
            let Some(bob) = s.bob().get(x) else {
                *tl = false;
                report.push(Condition::TransposeLink, context_label(ctx), format!("Bob has no measurement for {x}"));
                continue;
            };
            let labels: std::collections::BTreeSet<&String> = mi.keys().chain(bob.keys()).collect();
            for y in labels {
                let lhs = mi.get(y).cloned().unwrap_or_else(|| Matrix::zeros(d, d, backend));
                let rhs = bob.get(y).map(|f| f.transpose()).unwrap_or_else(|| Matrix::zeros(s.dim_b(), s.dim_b(), backend));
                if !lhs.approx_eq(&rhs, tol) {
                    *tl = false;
                    report.push(
                        Condition::TransposeLink,
                        context_label(ctx),
                        format!("marginal at position {} for {y} differs from Bob's transposed effect at {x}", i + 1),
                    );
                }
            }
        }
        // Enumerate the product of marginal supports and compare with the listed effects.
        let supports: Vec<Vec<(&String, &Matrix)>> = marginals.iter().map(|m| m.iter().collect()).collect();
        let mut seen = 0usize;
        let mut bad = Vec::new();
        product_walk(&supports, &mut Vec::new(), &mut |ys, prod| {
            let listed = povm.get(ys);
            if listed.is_some() {
                seen += 1;
            }
            let lhs = listed.cloned().unwrap_or_else(|| Matrix::zeros(d, d, backend));
            if !lhs.approx_eq(prod, tol) {
                bad.push(ys.join(","));
            }
        });
        if seen != povm.len() {
            bad.push("answers outside the marginal supports".into());
        }
        if !bad.is_empty() {
            *pf = false;
            for b in bad {
                report.push(Condition::ProductForm, context_label(ctx), format!("effect for ({b}) is not the product of its marginals"));
            }
        }
    }
    let [projective_alice, projective_bob, max_entangled, transpose_link, relation_zero, product_form] = flags;
    SpecialFormReport {
        projective_alice,
        projective_bob,
        max_entangled,
        transpose_link,
        relation_zero,
        product_form,
        pass: flags.iter().all(|f| *f),
        report,
    }
}

fn product_walk(supports: &[Vec<(&String, &Matrix)>], prefix: &mut Vec<(String, Matrix)>, visit: &mut dyn FnMut(&Vec<String>, &Matrix)) {
    if prefix.len() == supports.len() {
        let ys: Vec<String> = prefix.iter().map(|(y, _)| y.clone()).collect();
        let prod = Matrix::product(prefix.iter().map(|(_, m)| m)).expect("square").expect("nonempty");
        visit(&ys, &prod);
        return;
    }
    for (y, m) in &supports[prefix.len()] {
        prefix.push(((*y).clone(), (*m).clone()));
        product_walk(supports, prefix, visit);
        prefix.pop();
    }
}

/// Reads a certificate off a special-form strategy: `P_{x,y} = ℰ^i_{𝐱,y}` whenever `x = 𝐱_i`.
/// Elements occurring in no tuple take `ℱ_{x,y}^T`.
pub fn cert_from_special_strategy(
    s: &Strategy,
    source: Arc<Structure>,
    target: Arc<Structure>,
    tol: f64,
) -> Result<QHomCert, GameError> {
    let (d, backend) = (s.dim_a(), s.backend());
    let mut rows: BTreeMap<usize, (String, BTreeMap<usize, Matrix>)> = BTreeMap::new();
    for (rel, t) in source.tuples() {
        let rel_name = &source.signature().relations()[rel].name;
        let tuple: Vec<String> = t.iter().map(|&x| source.name(x).to_string()).collect();
        let ctx = (rel_name.clone(), tuple);
        let povm = s.alice().get(&ctx).ok_or_else(|| GameError::MissingPovm(context_label(&ctx)))?;
        for (i, &x) in t.iter().enumerate() {
            let mut row = BTreeMap::new();
            for (y, m) in marginal(povm, i, d, backend) {
                let y = target.element(&y).map_err(|_| GameError::UnknownLabel(y.clone()))?;
                row.insert(y, m);
            }
            let here = format!("{} position {}", context_label(&ctx), i + 1);
            match rows.get(&x) {
                None => {
                    rows.insert(x, (here, row));
                }
                Some((first, prev)) => {
                    let same = prev.len() == row.len()
                        && prev.iter().zip(&row).all(|((y1, m1), (y2, m2))| y1 == y2 && m1.approx_eq(m2, tol));
                    if !same {
                        return Err(GameError::ContextClash {
                            element: source.name(x).to_string(),
                            first: first.clone(),
                            second: here,
                        });
                    }
                }
            }
        }
    }
    // Clashes are reported first; the transpose link would also reject them, less specifically.
    let sf = verify_special_form(s, &target, tol);
    if !sf.pass {
        return Err(GameError::NotSpecialForm(sf.report));
    }
    let mut cells = Vec::new();
    for x in 0..source.size() {
        if let Some((_, row)) = rows.remove(&x) {
            cells.extend(row.into_iter().map(|(y, m)| ((x, y), m)));
            continue;
        }
        let name = source.name(x);
        let bob = s.bob().get(name).ok_or_else(|| GameError::MissingPovm(format!("Bob {name}")))?;
        for (y, f) in bob {
            let y = target.element(y).map_err(|_| GameError::UnknownLabel(y.clone()))?;
            cells.push(((x, y), f.transpose()));
        }
    }
    let cert = QHomCert::new(d, source, target, cells)?;
    let report = verify_qhom(&cert, tol);
    if !report.pass {
        return Err(GameError::InvalidCertificate(report));
    }
    Ok(cert)
}

/// Compresses both sides onto the supports of the Schmidt vectors, so that the new state
/// `Σ λ_i e_i ⊗ e_i` has full Schmidt rank. Works on the float backend.
pub fn schmidt_reduce(s: &Strategy, tol: f64) -> Result<Strategy, GameError> {
    let s = s.to_float();
    let dec = schmidt_decompose(s.state(), s.dim_a(), s.dim_b(), tol)?;
    let pa = dec.left.adjoint();
    let pb = dec.right.adjoint();
    s.transform(&pa, &pb)
}

/// Swaps a full-Schmidt-rank state of a perfect `d ⊗ d` strategy for `Σ e_i ⊗ e_i`,
/// keeping the measurements.
pub fn to_maximally_entangled(s: &Strategy, a: &Structure, b: &Structure, tol: f64) -> Result<Strategy, GameError> {
    let d = s.dim_a();
    if d != s.dim_b() {
        return Err(GameError::NotSquare(d, s.dim_b()));
    }
    let rank = s.state().reshape(d, d)?.rank(tol);
    if rank < d {
        return Err(GameError::NotFullRank { rank, dim: d });
    }
    let report = check_perfect(s, a, b, tol)?;
    if !report.pass {
        return Err(GameError::NotPerfect(report));
    }
    s.with_state(max_entangled_state(d, s.backend()))
}
