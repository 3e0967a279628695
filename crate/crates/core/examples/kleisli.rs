//! Composing quantum homomorphism certificates in the Kleisli category.

use qmonad::catalog::catalog_get;
use qmonad::catalog::Payload;
use qmonad::monad::{cert_to_kleisli, kleisli_compose, verify_qhom, QHomCert};

fn cert(id: &str) -> QHomCert {
    match catalog_get(id).unwrap().payload {
        Payload::Certificate { cert, .. } => cert,
        _ => panic!("{id} is not a certificate"),
    }
}

fn main() {
    let colouring = cert("c5-k3-cert");
    let rotation = cert("k3-rotation-cert");
    let swap = cert("k2-swap-cert");

    let composite = kleisli_compose(&colouring, &rotation, 0.0).unwrap();
    println!("C5 -> K3 -> K3: dimension {}, verifies: {}", composite.dim(), verify_qhom(&composite, 0.0).pass);

    let twice = kleisli_compose(&swap, &swap, 0.0).unwrap();
    println!("swap;swap on K2: dimension {}, verifies: {}", twice.dim(), verify_qhom(&twice, 0.0).pass);
    for ((x, y), p) in twice.cells() {
        println!("  P[{},{}] has rank {}", twice.source().name(*x), twice.target().name(*y), p.rank(0.0));
    }

    let kleisli = cert_to_kleisli(&swap, 0.0).unwrap();
    println!("as a Kleisli morphism: {} distributions of dimension {}", kleisli.len(), kleisli[0].dim());
}
