//! Classical homomorphism search and the CSP view of a structure pair.

use qmonad::structures::{find_homomorphism, gaifman, Structure};
use qmonad::translations::{csp_to_pair, pair_to_csp};

fn cycle(n: usize) -> Structure {
    let vs: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
    let es: Vec<(String, String)> = (0..n).map(|i| (vs[i].clone(), vs[(i + 1) % n].clone())).collect();
    Structure::graph(&vs, &es).unwrap()
}

fn complete(n: usize) -> Structure {
    let vs: Vec<String> = (0..n).map(|i| format!("k{i}")).collect();
    let es: Vec<(String, String)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| (vs[i].clone(), vs[j].clone())).collect();
    Structure::graph(&vs, &es).unwrap()
}

fn main() {
    for (n, k) in [(4, 2), (5, 2), (5, 3)] {
        let (c, kk) = (cycle(n), complete(k));
        match find_homomorphism(&c, &kk).unwrap() {
            Some(f) => {
                let colours: Vec<&str> = (0..c.size()).map(|x| kk.name(f.apply(x))).collect();
                println!("C{n} -> K{k}: {}", colours.join(" "));
            }
            None => println!("C{n} -> K{k}: none"),
        }
    }

    let c5 = cycle(5);
    println!("Gaifman graph of C5 has {} edges", gaifman(&c5).edges().count());

    let csp = pair_to_csp(&c5, &complete(3)).unwrap();
    println!("as a CSP: {} variables, {} constraints", csp.variables.len(), csp.constraints.len());
    let (a, b) = csp_to_pair(&csp).unwrap();
    println!("back to structures: |A| = {}, |B| = {}, homomorphism exists: {}", a.size(), b.size(), find_homomorphism(&a, &b).unwrap().is_some());
}
