//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always reach the terminal.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use qmonad::catalog::{
    catalog_get, catalog_list, ghz_model, ghz_pvms, ghz_state, magic_square_bcs, magic_square_cert, magic_square_model,
    magic_square_operators, magic_square_pair, magic_square_pvms, pr_box, full_support_model, Kind, Payload,
};
use qmonad::games::{cert_from_special_strategy, check_perfect, schmidt_reduce, strategy_from_cert, verify_special_form, winning_probability};
use qmonad::linalg::{psd_trace_orthogonal, Backend, Matrix, Scalar};
use qmonad::monad::{kleisli_compose, mu, qd_map, verify_qhom, NestedQDistribution, ProjDist, QHomCert};
use qmonad::structures::{find_homomorphism, Homomorphism, Structure};
use qmonad::translations::{
    bcs_quantum_solution_verify, bcs_solution_to_mr, check_state_independent_witness, check_state_witness, graph_pair_to_bcs,
    is_strongly_contextual, mr_to_bcs_solution, operator_to_projectors, projectors_to_operator, verify_mr,
    verify_operator_solution, MrCert, OperatorSolution,
};
use rand::Rng;

const EXACT: f64 = 0.0;

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Result<String, String> {
    let start = Instant::now();
    let (a, b) = magic_square_pair();
    ensure(find_homomorphism(&a, &b).unwrap().is_none(), || "classical homomorphism found".into())?;
    let (code, out) = qmonad::cli::dispatch(["qmonad", "hom", "find", "catalog:magic-square-A", "catalog:magic-square-B"]);
    ensure(code == 1 && out.trim() == "Absent", || format!("hom find gave {code}: {out}"))?;

    // Rows ABC, DEF, GHI and columns ADG, BEH have even parity, column CFI odd.
    let parity = [(0, 1, 2, 0), (3, 4, 5, 0), (6, 7, 8, 0), (0, 3, 6, 0), (1, 4, 7, 0), (2, 5, 8, 1)];
    let bcs = magic_square_bcs();
    for mask in 0u32..512 {
        let bit = |i: usize| (mask >> i & 1) as u8;
        let by_hand = parity.iter().all(|&(i, j, k, p)| bit(i) ^ bit(j) ^ bit(k) == p);
        let assignment: BTreeMap<String, bool> = "ABCDEFGHI".chars().enumerate().map(|(i, c)| (c.to_string(), bit(i) == 1)).collect();
        ensure(!by_hand && !bcs.is_satisfied_by(&assignment), || format!("assignment {mask:09b} satisfies the square"))?;
    }

    let entry = catalog_get("magic-square-cert").unwrap();
    let Payload::Certificate { cert, .. } = entry.payload else { return Err("wrong kind".into()) };
    ensure(cert.dim() == 4 && cert.backend() == Backend::Exact, || "certificate is not exact of dimension 4".into())?;
    ensure(verify_qhom(&cert, EXACT).pass, || "certificate fails".into())?;
    let (code, _) = qmonad::cli::dispatch(["qhom", "qhom", "verify", "catalog:magic-square-cert"]);
    ensure(code == 0, || format!("qhom verify exit {code}"))?;
    let s = strategy_from_cert(&cert, EXACT).unwrap();
    ensure(check_perfect(&s, &a, &b, EXACT).unwrap().pass, || "strategy not perfect".into())?;
    let (min, _) = winning_probability(&s, &a, &b, EXACT).unwrap();
    ensure(min.is_one(EXACT) && matches!(min, qmonad::games::Probability::Exact(_)), || format!("min winning probability {min}"))?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!("512 assignments refuted, d=4 certificate exact, min win 1, {elapsed:.2?}"))
}

fn spectral_agreement(bcs: &qmonad::translations::Bcs, sol: &OperatorSolution) -> Result<bool, String> {
    let direct = verify_operator_solution(bcs, sol, EXACT).unwrap().pass;
    let pvms = operator_to_projectors(sol, EXACT).unwrap();
    let via = bcs_quantum_solution_verify(bcs, &pvms, EXACT).unwrap().pass;
    ensure(direct == via, || format!("direct {direct}, via projectors {via}"))?;
    ensure(projectors_to_operator(&pvms, EXACT).unwrap() == *sol, || "operator round trip differs".into())?;
    ensure(operator_to_projectors(&projectors_to_operator(&pvms, EXACT).unwrap(), EXACT).unwrap() == pvms, || {
        "projector round trip differs".into()
    })?;
    Ok(direct)
}

fn criterion_2() -> Result<String, String> {
    let bcs = magic_square_bcs();
    let sol = magic_square_operators();
    ensure(spectral_agreement(&bcs, &sol)?, || "magic square operators rejected".into())?;
    let mut ops = sol.operators.clone();
    let flipped = ops["I"].neg();
    ops.insert("I".into(), flipped);
    ensure(!spectral_agreement(&bcs, &OperatorSolution::new(4, ops).unwrap())?, || "flipped solution accepted".into())?;

    let mut rng = common::rng(2);
    let (mut sat, mut unsat) = (0, 0);
    for _ in 0..100 {
        let n = rng.random_range(1..=5);
        let k = rng.random_range(1..=4);
        let bcs = common::random_bcs(&mut rng, n, k);
        let assignment: BTreeMap<String, bool> = bcs.variables.iter().map(|v| (v.clone(), rng.random_bool(0.5))).collect();
        let ok = spectral_agreement(&bcs, &OperatorSolution::classical(&assignment))?;
        ensure(ok == bcs.is_satisfied_by(&assignment), || "d=1 verdict disagrees with evaluation".into())?;
        if ok {
            sat += 1
        } else {
            unsat += 1
        }
    }
    Ok(format!("magic square plus 100 d=1 cases ({sat} solutions, {unsat} non-solutions)"))
}

fn catalog_certs() -> Vec<(&'static str, QHomCert)> {
    catalog_list()
        .into_iter()
        .filter(|(_, kind, _)| *kind == Kind::Certificate)
        .map(|(id, _, _)| match catalog_get(id).unwrap().payload {
            Payload::Certificate { cert, .. } => (id, cert),
            _ => unreachable!(),
        })
        .collect()
}

fn criterion_3() -> Result<String, String> {
    let certs = catalog_certs();
    for (id, c) in &certs {
        let s = strategy_from_cert(c, EXACT).map_err(|e| format!("{id}: {e}"))?;
        let special = verify_special_form(&s, c.target(), EXACT);
        ensure(
            special.projective_alice && special.projective_bob && special.max_entangled && special.transpose_link && special.relation_zero,
            || format!("{id}: special form fails\n{}", special.report),
        )?;
        let back = cert_from_special_strategy(&s, c.source().clone(), c.target().clone(), EXACT).map_err(|e| format!("{id}: {e}"))?;
        ensure(back == *c, || format!("{id}: round trip differs"))?;
    }
    Ok(format!("{} catalog certificates", certs.len()))
}

fn criterion_4() -> Result<String, String> {
    let s = strategy_from_cert(&magic_square_cert(), EXACT).unwrap();
    let padded = s.pad(8, 8).unwrap();
    let r = schmidt_reduce(&padded, 1e-9).map_err(|e| e.to_string())?;
    ensure((r.dim_a(), r.dim_b()) == (4, 4), || format!("reduced to {}x{}", r.dim_a(), r.dim_b()))?;
    let before = s.probability_table().unwrap();
    let after = r.probability_table().unwrap();
    let keys: BTreeSet<_> = before.keys().chain(after.keys()).collect();
    let mut worst: f64 = 0.0;
    for k in &keys {
        let p = before.get(k).map_or(0.0, |p| p.to_f64());
        let q = after.get(k).map_or(0.0, |p| p.to_f64());
        worst = worst.max((p - q).abs());
    }
    ensure(worst <= 1e-9, || format!("tables differ by {worst:e}"))?;
    Ok(format!("8x8 -> 4x4, {} table entries, max deviation {worst:.1e}", keys.len()))
}

fn criterion_5() -> Result<String, String> {
    let mut rng = common::rng(5);
    let mut cases = 0;
    for _ in 0..240 {
        let n = rng.random_range(1..=3);
        let a = common::random_structure(&mut rng, n, 0.4);
        let (d1, d2, d3) = (rng.random_range(1..=2), rng.random_range(1..=2), rng.random_range(1..=2));
        let p = common::dist(&mut rng, d1, n);
        // Left unit: μ(η(p)) = p.
        let left = mu(&ProjDist::delta(p.clone()), &a, EXACT).unwrap();
        ensure(left == p, || "left unit fails".into())?;
        // Right unit: μ(Q(η)(p)) = p.
        let right = mu(&p.map(|&x| ProjDist::delta(x)).unwrap(), &a, EXACT).unwrap();
        ensure(right == p, || "right unit fails".into())?;
        // Associativity on Q Q Q A.
        let inner = common::distinct_dists(&mut rng, d3, n, 3);
        let middle: Vec<NestedQDistribution> = (0..3).map(|_| common::dist_over(&mut rng, d2, &inner)).collect();
        let mut distinct: Vec<NestedQDistribution> = Vec::new();
        for m in middle {
            if !distinct.contains(&m) {
                distinct.push(m);
            }
        }
        let triple: ProjDist<NestedQDistribution> = common::dist_over(&mut rng, d1, &distinct);
        let outer_first = mu(&triple.flatten().unwrap(), &a, EXACT).unwrap();
        let inner_first = mu(&triple.try_map(|m| mu(m, &a, EXACT)).unwrap(), &a, EXACT).unwrap();
        ensure(outer_first == inner_first, || "associativity fails".into())?;
        ensure(outer_first.dim() == d1 * d2 * d3, || "grade is not multiplicative".into())?;
        cases += 1;
    }
    let mut nat = 0;
    while nat < 60 {
        let n = rng.random_range(1..=3);
        let a = common::random_structure(&mut rng, n, 0.4);
        let m = rng.random_range(1..=3);
        let (h, b) = common::random_hom_into(&mut rng, &a, m);
        let (d1, d2) = (rng.random_range(1..=2), rng.random_range(1..=2));
        let inner = common::distinct_dists(&mut rng, d2, n, 2);
        let nested = common::dist_over(&mut rng, d1, &inner);
        let lhs = qd_map(&h, &a, &b, &mu(&nested, &a, EXACT).unwrap()).unwrap();
        let pushed = nested.try_map(|p| qd_map(&h, &a, &b, p)).unwrap();
        let rhs = mu(&pushed, &b, EXACT).unwrap();
        ensure(lhs == rhs, || "naturality of μ fails".into())?;
        nat += 1;
    }
    Ok(format!("{cases} unit/associativity cases, {nat} naturality cases"))
}

fn criterion_6() -> Result<String, String> {
    ensure(is_strongly_contextual(&pr_box()).unwrap(), || "PR box not strongly contextual".into())?;
    let ghz = ghz_model();
    ensure(ghz.contexts.len() == 4 && ghz.measurements.len() == 6, || "GHZ model shape".into())?;
    ensure(ghz.contexts.iter().all(|c| c.support.len() == 4), || "GHZ supports are not of size 4".into())?;
    ensure(is_strongly_contextual(&ghz).unwrap(), || "GHZ not strongly contextual".into())?;
    ensure(!is_strongly_contextual(&full_support_model()).unwrap(), || "full support flagged".into())?;
    let r = check_state_witness(&ghz, &ghz_state(), &ghz_pvms(), EXACT).map_err(|e| e.to_string())?;
    ensure(r.pass, || format!("GHZ witness fails\n{r}"))?;
    let ms = magic_square_model();
    ensure(is_strongly_contextual(&ms).unwrap(), || "magic square model not strongly contextual".into())?;
    let r = check_state_independent_witness(&ms, &magic_square_pvms(), EXACT).map_err(|e| e.to_string())?;
    ensure(r.pass, || format!("magic square witness fails\n{r}"))?;
    let r = check_state_independent_witness(&ghz, &ghz_pvms(), EXACT).map_err(|e| e.to_string())?;
    ensure(!r.pass, || "GHZ PVMs pass state-independently".into())?;
    Ok("PR box, GHZ, magic square contextual; full support not; witnesses as expected".into())
}

fn criterion_7() -> Result<String, String> {
    let graphs = common::all_graphs(4);
    let (mut pairs, mut sat, mut lifts) = (0, 0, 0);
    for g in &graphs {
        let sg = g.to_structure();
        for h in &graphs {
            let sh = Arc::new(h.to_structure());
            let bcs = graph_pair_to_bcs(g, h);
            let homs = common::brute_homs(&sg, &sh);
            let found = find_homomorphism(&sg, &sh).unwrap();
            ensure(found.is_some() == !homs.is_empty(), || "solver disagrees with brute force".into())?;
            let satisfiable = common::bcs_satisfiable(&bcs);
            ensure(satisfiable == !homs.is_empty(), || {
                format!("BCS satisfiable {satisfiable} but {} homomorphisms for {:?} -> {:?}", homs.len(), g, h)
            })?;
            pairs += 1;
            sat += usize::from(satisfiable);
            let sg = Arc::new(sg.clone());
            // Every lift on small pairs; first, middle and last otherwise.
            let picked: Vec<&Homomorphism> = if sg.size() <= 3 && sh.size() <= 3 || homs.len() <= 3 {
                homs.iter().collect()
            } else {
                vec![&homs[0], &homs[homs.len() / 2], &homs[homs.len() - 1]]
            };
            for f in picked {
                let c = QHomCert::classical_lift(sg.clone(), sh.clone(), f).unwrap();
                let mr = MrCert::from_qhom(&c);
                ensure(verify_mr(g, h, &mr, EXACT).unwrap().pass, || "lift fails MR".into())?;
                let pvms = mr_to_bcs_solution(g, h, &mr, EXACT).map_err(|e| e.to_string())?;
                ensure(bcs_quantum_solution_verify(&bcs, &pvms, EXACT).unwrap().pass, || "BCS solution fails".into())?;
                let back = bcs_solution_to_mr(g, h, &pvms, EXACT).map_err(|e| e.to_string())?;
                ensure(back == mr, || "MR -> BCS -> MR differs".into())?;
                ensure(mr_to_bcs_solution(g, h, &back, EXACT).unwrap() == pvms, || "BCS -> MR -> BCS differs".into())?;
                lifts += 1;
            }
        }
    }
    Ok(format!("{} graphs, {pairs} pairs ({sat} satisfiable), {lifts} lifted homomorphisms", graphs.len()))
}

fn eta_lift(s: &Arc<Structure>) -> QHomCert {
    QHomCert::classical_lift(s.clone(), s.clone(), &Homomorphism::identity(s.size())).unwrap()
}

fn criterion_8() -> Result<String, String> {
    let certs = catalog_certs();
    let mut composed = 0;
    for (i, h) in &certs {
        ensure(kleisli_compose(h, &eta_lift(h.target()), EXACT).unwrap() == *h, || format!("{i} ∘ η differs"))?;
        ensure(kleisli_compose(&eta_lift(h.source()), h, EXACT).unwrap() == *h, || format!("η ∘ {i} differs"))?;
        for (j, k) in &certs {
            if h.target() != k.source() {
                continue;
            }
            let c = kleisli_compose(h, k, EXACT).map_err(|e| format!("{i};{j}: {e}"))?;
            ensure(c.dim() == h.dim() * k.dim(), || format!("{i};{j}: wrong grade"))?;
            ensure(verify_qhom(&c, EXACT).pass, || format!("{i};{j}: composite fails"))?;
            composed += 1;
        }
    }
    ensure(composed >= 3, || format!("only {composed} composable catalog pairs"))?;
    let mut rng = common::rng(8);
    for _ in 0..100 {
        let n = rng.random_range(1..=3);
        let a = common::random_structure(&mut rng, n, 0.4);
        let (mb, mc) = (rng.random_range(1..=3), rng.random_range(1..=3));
        let (f, b) = common::random_hom_into(&mut rng, &a, mb);
        let (g, c) = common::random_hom_into(&mut rng, &b, mc);
        let (a, b, c) = (Arc::new(a), Arc::new(b), Arc::new(c));
        let lf = QHomCert::classical_lift(a.clone(), b.clone(), &f).unwrap();
        let lg = QHomCert::classical_lift(b.clone(), c.clone(), &g).unwrap();
        ensure(verify_qhom(&lf, EXACT).pass && verify_qhom(&lg, EXACT).pass, || "random lift fails".into())?;
        let comp = kleisli_compose(&lf, &lg, EXACT).unwrap();
        ensure(verify_qhom(&comp, EXACT).pass, || "random composite fails".into())?;
        let classical = Homomorphism::new((0..a.size()).map(|x| g.apply(f.apply(x))).collect());
        ensure(comp == QHomCert::classical_lift(a.clone(), c.clone(), &classical).unwrap(), || "d=1 composite is not g∘f".into())?;
    }
    Ok(format!("{} catalog certificates with η, {composed} composable catalog pairs, 100 random d=1 pairs", certs.len()))
}

fn scalar_eq(a: Scalar, b: Scalar) -> bool {
    match (a, b) {
        (Scalar::Exact(x), Scalar::Exact(y)) => x == y,
        _ => false,
    }
}

fn criterion_9() -> Result<String, String> {
    let mut rng = common::rng(9);
    let dim = |rng: &mut rand_chacha::ChaCha8Rng| rng.random_range(1..=4);
    for _ in 0..500 {
        let (p, q, r, s) = (dim(&mut rng), dim(&mut rng), dim(&mut rng), dim(&mut rng));
        let a = common::matrix(&mut rng, p, q);
        let b = common::matrix(&mut rng, r, s);
        let c = common::matrix(&mut rng, s, q);
        let lhs = a.kron(&b).unwrap().matmul(&c.vec()).unwrap();
        let rhs = b.matmul(&c).unwrap().matmul(&a.transpose()).unwrap().vec();
        ensure(lhs == rhs, || "(A⊗B)vec(C) != vec(BCA^T)".into())?;
    }
    for _ in 0..500 {
        let n = dim(&mut rng);
        let a = common::matrix(&mut rng, n, n);
        let b = common::matrix(&mut rng, n, n);
        let inner = a.vec().adjoint().matmul(&b.vec()).unwrap().get(0, 0);
        ensure(scalar_eq(inner, a.adjoint().matmul(&b).unwrap().trace().unwrap()), || "vec(A)^*vec(B) != Tr(A^*B)".into())?;
        let h = a.checked_add(&a.adjoint()).unwrap();
        let inner = h.vec().adjoint().matmul(&b.vec()).unwrap().get(0, 0);
        ensure(scalar_eq(inner, h.matmul(&b).unwrap().trace().unwrap()), || "vec(H)^*vec(B) != Tr(HB) for Hermitian H".into())?;
    }
    let (mut orth, mut not) = (0, 0);
    for _ in 0..500 {
        let n = rng.random_range(2..=4);
        let (a, b) = psd_pair(&mut rng, n);
        let zero_trace = psd_trace_orthogonal(&a, &b, EXACT).unwrap();
        let zero_product = a.matmul(&b).unwrap().is_zero(EXACT);
        ensure(zero_trace == zero_product, || "Tr(AB)=0 and AB=0 disagree".into())?;
        if zero_trace {
            orth += 1
        } else {
            not += 1
        }
    }
    Ok(format!("500 kron/vec, 500 vec-trace, 500 PSD pairs ({orth} orthogonal, {not} not)"))
}

/// PSD pair `M^*M`, `N^*N`; half the time `N` annihilates the range of `M^*`.
fn psd_pair(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> (Matrix, Matrix) {
    let k = rng.random_range(1..n);
    let m = common::matrix(rng, k, n);
    let a = m.adjoint().matmul(&m).unwrap();
    let nn = if rng.random_bool(0.5) {
        // Rows of N from the complement of the row space of M, by Gram-Schmidt against A.
        let mut rows = Vec::new();
        for _ in 0..rng.random_range(1..=2) {
            let v = common::matrix(rng, n, 1);
            let proj = projector_onto(&a);
            let w = Matrix::identity(n, Backend::Exact).checked_sub(&proj).unwrap().matmul(&v).unwrap();
            rows.push(w.adjoint());
        }
        stack(&rows)
    } else {
        let rows = rng.random_range(1..=n);
        common::matrix(rng, rows, n)
    };
    (a, nn.adjoint().matmul(&nn).unwrap())
}

/// Orthogonal projector onto the column space of Hermitian `a`, by exact Gram-Schmidt.
fn projector_onto(a: &Matrix) -> Matrix {
    let n = a.rows();
    let mut basis: Vec<Matrix> = Vec::new();
    for j in 0..n {
        let mut v = Matrix::from_exact(n, 1, (0..n).map(|i| match a.get(i, j) {
            Scalar::Exact(g) => g,
            _ => unreachable!(),
        }).collect()).unwrap();
        for u in &basis {
            let coef = u.adjoint().matmul(&v).unwrap().get(0, 0);
            let norm = u.adjoint().matmul(u).unwrap().get(0, 0);
            let (Scalar::Exact(c), Scalar::Exact(nrm)) = (coef, norm) else { unreachable!() };
            let factor = Scalar::Exact(c.scale(&(qmonad::linalg::rational(1, 1) / nrm.re.clone())));
            v = v.checked_sub(&u.scale(&factor).unwrap()).unwrap();
        }
        if !v.is_zero(EXACT) {
            basis.push(v);
        }
    }
    let mut p = Matrix::zeros(n, n, Backend::Exact);
    for u in &basis {
        let Scalar::Exact(nrm) = u.adjoint().matmul(u).unwrap().get(0, 0) else { unreachable!() };
        let term = u.matmul(&u.adjoint()).unwrap().scale_rational(&(qmonad::linalg::rational(1, 1) / nrm.re));
        p = p.checked_add(&term).unwrap();
    }
    p
}

fn stack(rows: &[Matrix]) -> Matrix {
    let cols = rows[0].cols();
    let entries = rows
        .iter()
        .flat_map(|r| (0..cols).map(move |j| match r.get(0, j) {
            Scalar::Exact(g) => g,
            _ => unreachable!(),
        }))
        .collect();
    Matrix::from_exact(rows.len(), cols, entries).unwrap()
}

fn main() {
    let checks: [(&str, Check); 9] = [
        ("1 quantum advantage on the magic square", criterion_1),
        ("2 operator solutions and spectral projectors", criterion_2),
        ("3 certificate/strategy round trip", criterion_3),
        ("4 Schmidt reduction of a padded strategy", criterion_4),
        ("5 graded monad laws", criterion_5),
        ("6 contextuality", criterion_6),
        ("7 graph homomorphism constraint systems", criterion_7),
        ("8 Kleisli coherence", criterion_8),
        ("9 linear-algebra identities", criterion_9),
    ];
    let mut failed = Vec::new();
    for (name, check) in checks {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let took = start.elapsed();
        match result {
            Ok(detail) => println!("PASS  criterion {name}: {detail} [{took:.2?}]"),
            Err(why) => {
                println!("FAIL  criterion {name}: {why} [{took:.2?}]");
                failed.push(name);
            }
        }
    }
    if !failed.is_empty() {
        println!("{} of 9 criteria failed", failed.len());
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}
