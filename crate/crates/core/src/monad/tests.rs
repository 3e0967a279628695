use std::sync::Arc;

use super::*;
use crate::linalg::{rational, Rational};
use crate::structures::{Homomorphism, Signature, Structure};

fn half() -> Rational {
    rational(1, 2)
}

fn z_split() -> (Matrix, Matrix) {
    let i = Matrix::identity(2, Backend::Exact);
    let z = Matrix::from_ints(2, 2, &[1, 0, 0, -1]);
    (
        i.checked_add(&z).unwrap().scale_rational(&half()),
        i.checked_sub(&z).unwrap().scale_rational(&half()),
    )
}

fn x_split() -> (Matrix, Matrix) {
    let i = Matrix::identity(2, Backend::Exact);
    let x = Matrix::from_ints(2, 2, &[0, 1, 1, 0]);
    (
        i.checked_add(&x).unwrap().scale_rational(&half()),
        i.checked_sub(&x).unwrap().scale_rational(&half()),
    )
}

fn k(n: usize) -> Arc<Structure> {
    let vs: Vec<String> = (1..=n).map(|i| format!("v{i}")).collect();
    let mut es = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            es.push((vs[i].clone(), vs[j].clone()));
        }
    }
    Arc::new(Structure::graph(&vs, &es).unwrap())
}

fn two_points() -> Structure {
    let sig = Signature::new([("R", 2)]).unwrap();
    Structure::new(sig, ["a", "b"], [("R", vec![vec!["a", "b"]])]).unwrap()
}

#[test]
fn qdist_examples() {
    let a = two_points();
    let delta = eta("a", &a).unwrap();
    assert!(verify_qdist(&delta, &a, 0.0).unwrap().pass);
    let (p, q) = z_split();
    let split = ProjDist::new(2, [(0, p), (1, q)]).unwrap();
    assert!(verify_qdist(&split, &a, 0.0).unwrap().pass);
    let i2 = Matrix::identity(2, Backend::Exact);
    let double = ProjDist::new(2, [(0, i2.clone()), (1, i2.clone())]).unwrap();
    let r = verify_qdist(&double, &a, 0.0).unwrap();
    assert!(!r.pass && r.failed(Condition::Normalization));
    assert!(ProjDist::new(2, [(0, i2), (1, Matrix::identity(3, Backend::Exact))]).is_err());
    let half_i = Matrix::identity(2, Backend::Exact).scale_rational(&half());
    let r = verify_qdist(&ProjDist::new(2, [(0, half_i.clone()), (1, half_i)]).unwrap(), &a, 0.0).unwrap();
    assert!(r.failed(Condition::Projector));
}

#[test]
fn relation_membership_of_deltas() {
    let a = two_points();
    let da = eta("a", &a).unwrap();
    let db = eta("b", &a).unwrap();
    assert!(verify_relation_membership(&[da.clone(), db.clone()], "R", &a, 0.0).unwrap().pass);
    let r = verify_relation_membership(&[db, da.clone()], "R", &a, 0.0).unwrap();
    assert!(r.failed(Condition::Qr2));
    assert!(matches!(
        verify_relation_membership(&[da], "R", &a, 0.0),
        Err(MonadError::ArityMismatch { .. })
    ));
}

#[test]
fn membership_detects_non_commuting_entries() {
    let sig = Signature::new([("R", 2)]).unwrap();
    let full = Structure::new(
        sig,
        ["a", "b"],
        [("R", vec![vec!["a", "a"], vec!["a", "b"], vec!["b", "a"], vec!["b", "b"]])],
    )
    .unwrap();
    let (p, q) = z_split();
    let (r, s) = x_split();
    let pz = ProjDist::new(2, [(0, p), (1, q)]).unwrap();
    let px = ProjDist::new(2, [(0, r), (1, s)]).unwrap();
    let rep = verify_relation_membership(&[pz.clone(), px], "R", &full, 0.0).unwrap();
    assert!(rep.failed(Condition::Qr1) && !rep.failed(Condition::Qr2));
    assert!(verify_relation_membership(&[pz.clone(), pz], "R", &full, 0.0).unwrap().pass);
}

#[test]
fn classical_lift_verifies_and_broken_row_fails() {
    let k3 = k(3);
    let c = QHomCert::classical_lift(k3.clone(), k3.clone(), &Homomorphism::identity(3)).unwrap();
    assert!(verify_qhom(&c, 0.0).pass);
    assert!(is_classical_homomorphism(&c));
    let broken = QHomCert::new(1, k3.clone(), k3.clone(), c.cells().filter(|(k, _)| **k != (0, 0)).map(|(k, m)| (*k, m.clone())))
        .unwrap();
    assert!(verify_qhom(&broken, 0.0).failed(Condition::Qh1));
    let constant = QHomCert::classical_lift(k3.clone(), k3.clone(), &Homomorphism::new(vec![0, 0, 0])).unwrap();
    let r = verify_qhom(&constant, 0.0);
    assert!(r.failed(Condition::Qh3) && !r.failed(Condition::Qh1));
}

#[test]
fn d1_certificates_match_classical_homomorphisms() {
    let (k2, k3) = (k(2), k(3));
    for map in 0..9usize {
        let f = Homomorphism::new(vec![map % 3, map / 3]);
        let c = QHomCert::classical_lift(k2.clone(), k3.clone(), &f).unwrap();
        assert_eq!(verify_qhom(&c, 0.0).pass, crate::structures::is_homomorphism(&k2, &k3, &f).unwrap());
    }
}

/// A genuinely two-dimensional certificate K2 → K2 built from the Z-basis split.
fn swap_cert() -> QHomCert {
    let (p, q) = z_split();
    let k2 = k(2);
    QHomCert::new(2, k2.clone(), k2, [((0, 0), p.clone()), ((0, 1), q.clone()), ((1, 0), q), ((1, 1), p)]).unwrap()
}

#[test]
fn two_dimensional_certificate() {
    let c = swap_cert();
    assert!(verify_qhom(&c, 0.0).pass);
    assert!(!is_classical_homomorphism(&c));
    // On an edgeless source no commutation is required, so X and Z splits may coexist.
    let sig = Signature::graph();
    let free = Arc::new(Structure::new(sig, ["s", "t"], []).unwrap());
    let (p, q) = z_split();
    let (r, s) = x_split();
    let loose = QHomCert::new(2, free.clone(), k(2), [((0, 0), p), ((0, 1), q), ((1, 0), r), ((1, 1), s)]).unwrap();
    assert!(verify_qhom(&loose, 0.0).pass);
    // Put the same splits on adjacent vertices and QH2 fails.
    let (p, q) = z_split();
    let (r, s) = x_split();
    let bad = QHomCert::new(2, k(2), k(2), [((0, 0), p), ((0, 1), q), ((1, 0), r), ((1, 1), s)]).unwrap();
    assert!(verify_qhom(&bad, 0.0).failed(Condition::Qh2));
}

#[test]
fn qh1_implies_row_orthogonality() {
    let c = swap_cert();
    for x in 0..2 {
        let row: Vec<_> = c.row(x).collect();
        for (i, (_, p)) in row.iter().enumerate() {
            for (_, q) in row.iter().skip(i + 1) {
                assert!(p.matmul(q).unwrap().is_zero(0.0));
            }
        }
    }
}

#[test]
fn kleisli_round_trip() {
    let k3 = k(3);
    let c = QHomCert::classical_lift(k3.clone(), k3.clone(), &Homomorphism::identity(3)).unwrap();
    let h = cert_to_kleisli(&c, 0.0).unwrap();
    for (x, p) in h.iter().enumerate() {
        assert_eq!(*p, ProjDist::delta(x));
    }
    assert_eq!(kleisli_to_cert(k3.clone(), k3.clone(), &h, 0.0).unwrap(), c);
    let s = swap_cert();
    let h = cert_to_kleisli(&s, 0.0).unwrap();
    assert_eq!(kleisli_to_cert(s.source().clone(), s.target().clone(), &h, 0.0).unwrap(), s);
    // A Kleisli candidate sending an edge to a non-edge is rejected.
    let bad = vec![ProjDist::delta(0), ProjDist::delta(0)];
    assert!(kleisli_to_cert(k(2), k(2), &bad, 0.0).is_err());
}

#[test]
fn functor_action() {
    let a = two_points();
    let (p, q) = z_split();
    let dist = ProjDist::new(2, [(0, p), (1, q)]).unwrap();
    let id = Homomorphism::identity(2);
    assert_eq!(qd_map(&id, &a, &a, &dist).unwrap(), dist);
    assert_eq!(qd_map(&id, &a, &a, &ProjDist::delta(1)).unwrap(), ProjDist::delta(1));
    // Collapse both points onto a looped target point: images sum to I.
    let sig = Signature::new([("R", 2)]).unwrap();
    let point = Structure::new(sig, ["*"], [("R", vec![vec!["*", "*"]])]).unwrap();
    let merge = Homomorphism::new(vec![0, 0]);
    let image = qd_map(&merge, &a, &point, &dist).unwrap();
    assert_eq!(image.value(&0), Matrix::identity(2, Backend::Exact));
    assert_eq!(image.support().len(), 1);
    assert_eq!(qd_map(&Homomorphism::new(vec![1, 0]), &a, &a, &dist), Err(MonadError::NotHomomorphism));
}

#[test]
fn multiplication_unit_laws() {
    let a = two_points();
    let (p, q) = z_split();
    let dist = ProjDist::new(2, [(0, p), (1, q)]).unwrap();
    // μ^{1,d} ∘ η_{Q_d A}
    let left = mu(&ProjDist::delta(dist.clone()), &a, 0.0).unwrap();
    assert_eq!(left, dist);
    // μ^{d,1} ∘ Q_d η_A
    let right = mu(&dist.map(|&x| ProjDist::delta(x)).unwrap(), &a, 0.0).unwrap();
    assert_eq!(right, dist);
    let nested_delta: NestedQDistribution = ProjDist::delta(ProjDist::delta(1));
    assert_eq!(mu(&nested_delta, &a, 0.0).unwrap(), ProjDist::delta(1));
}

#[test]
fn mu_rejects_invalid_inner_keys() {
    let a = two_points();
    let i2 = Matrix::identity(2, Backend::Exact);
    let bad_inner = ProjDist::new(2, [(0, i2.clone()), (1, i2)]).unwrap();
    let nested = ProjDist::delta(bad_inner);
    assert!(matches!(mu(&nested, &a, 0.0), Err(MonadError::InvalidDistribution(_))));
}

#[test]
fn kleisli_composition_examples() {
    let k3 = k(3);
    let id1 = QHomCert::classical_lift(k3.clone(), k3.clone(), &Homomorphism::identity(3)).unwrap();
    let rot = QHomCert::classical_lift(k3.clone(), k3.clone(), &Homomorphism::new(vec![1, 2, 0])).unwrap();
    let comp = kleisli_compose(&rot, &rot, 0.0).unwrap();
    assert_eq!(comp.classical_map().unwrap().map, vec![2, 0, 1]);
    assert_eq!(kleisli_compose(&id1, &rot, 0.0).unwrap(), rot);
    let s = swap_cert();
    let k2 = s.source().clone();
    let id2 = QHomCert::classical_lift(k2.clone(), k2.clone(), &Homomorphism::identity(2)).unwrap();
    let sc = kleisli_compose(&s, &id2, 0.0).unwrap();
    assert_eq!(sc, s);
    assert!(verify_qhom(&sc, 0.0).pass);
    let ss = kleisli_compose(&s, &s, 0.0).unwrap();
    assert_eq!(ss.dim(), 4);
    assert!(verify_qhom(&ss, 0.0).pass);
    assert_eq!(kleisli_compose(&s, &rot, 0.0), Err(MonadError::BaseMismatch));
}

#[test]
fn strength_examples() {
    let a = two_points();
    let sd = strength(&ProjDist::delta(0), &a, &ProjDist::delta(1), &a).unwrap();
    assert_eq!(sd, ProjDist::delta(1));
    let prod = crate::structures::product(&a, &a).unwrap();
    let (p, q) = z_split();
    let (r, s) = x_split();
    let pz = ProjDist::new(2, [(0, p), (1, q)]).unwrap();
    let px = ProjDist::new(2, [(0, r), (1, s)]).unwrap();
    let m = strength(&pz, &a, &px, &a).unwrap();
    assert_eq!(m.dim(), 4);
    assert!(verify_qdist(&m, &prod, 0.0).unwrap().pass);
    // Relation preservation: ((δ_a, δ_b) related in A) ⊗ ((pz, pz) related over a looped full structure).
    let sig = Signature::new([("R", 2)]).unwrap();
    let full = Structure::new(
        sig,
        ["a", "b"],
        [("R", vec![vec!["a", "a"], vec!["a", "b"], vec!["b", "a"], vec!["b", "b"]])],
    )
    .unwrap();
    let pfull = crate::structures::product(&a, &full).unwrap();
    let m1 = strength(&ProjDist::delta(0), &a, &pz, &full).unwrap();
    let m2 = strength(&ProjDist::delta(1), &a, &pz, &full).unwrap();
    assert!(verify_relation_membership(&[m1, m2], "R", &pfull, 0.0).unwrap().pass);
}

#[test]
fn affine_checks() {
    let sig = Signature::new([("R", 2), ("U", 1)]).unwrap();
    assert!(check_affine(&sig, 1).unwrap().pass);
    assert!(check_affine(&sig, 4).unwrap().pass);
    let (p, q) = z_split();
    let two = ProjDist::new(2, [(0, p), (1, q)]).unwrap();
    assert!(!is_terminal_distribution(&two, &sig, 0.0));
    assert!(is_terminal_distribution(&ProjDist::delta(0), &sig, 0.0));
}
