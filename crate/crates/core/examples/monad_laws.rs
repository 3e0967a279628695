//! Projector-valued distributions: unit, multiplication, functor action and strength.

use qmonad::linalg::{rational, Backend, Matrix};
use qmonad::monad::{eta, mu, qd_map, strength, verify_qdist, ProjDist};
use qmonad::structures::{Homomorphism, Signature, Structure};

fn main() {
    let sig = Signature::new([("R", 2)]).unwrap();
    let a = Structure::new(sig.clone(), ["a", "b"], [("R", vec![vec!["a", "b"], vec!["b", "a"]])]).unwrap();

    let half = rational(1, 2);
    let id = Matrix::identity(2, Backend::Exact);
    let x = Matrix::from_ints(2, 2, &[0, 1, 1, 0]);
    let plus = id.checked_add(&x).unwrap().scale_rational(&half);
    let minus = id.checked_sub(&x).unwrap().scale_rational(&half);
    let p = ProjDist::new(2, [(0, plus), (1, minus)]).unwrap();
    println!("p is a distribution over A: {}", verify_qdist(&p, &a, 0.0).unwrap().pass);

    let left = mu(&ProjDist::delta(p.clone()), &a, 0.0).unwrap();
    let right = mu(&p.map(|&e| ProjDist::delta(e)).unwrap(), &a, 0.0).unwrap();
    println!("μ∘η = id: {}, μ∘Qη = id: {}", left == p, right == p);

    let d = eta("a", &a).unwrap();
    let nested = ProjDist::new(2, [(p.clone(), Matrix::identity(2, Backend::Exact))]).unwrap();
    let flat = mu(&nested, &a, 0.0).unwrap();
    println!("μ of a 2-graded nesting has dimension {}", flat.dim());

    let swap = Homomorphism::new(vec![1, 0]);
    let moved = qd_map(&swap, &a, &a, &p).unwrap();
    println!("Q(swap)(p)(b) = p(a): {}", moved.get(&1) == p.get(&0));

    let both = strength(&p, &a, &d, &a).unwrap();
    println!("strength(p, δ_a) has dimension {} and {} support points", both.dim(), both.support().len());
}
