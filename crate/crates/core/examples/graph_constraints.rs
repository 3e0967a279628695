//! Graph homomorphisms as constraint systems, and the two quantum notions on graphs.

use qmonad::catalog::{complete_bipartite, cycle, k2_swap_cert};
use qmonad::structures::find_homomorphism;
use qmonad::translations::{graph_pair_to_bcs, mr_to_bcs_solution, verify_graph_qhom, bcs_quantum_solution_verify, Graph, MrCert};

fn main() {
    let k3 = Graph::complete(3);
    for (name, g) in [("C5", cycle(5)), ("K33", complete_bipartite(3, 3)), ("K4", Graph::complete(4))] {
        let bcs = graph_pair_to_bcs(&g, &k3);
        let hom = find_homomorphism(&g.to_structure(), &k3.to_structure()).unwrap().is_some();
        println!("{name} -> K3: {} variables, {} constraints, colourable: {hom}", bcs.variables.len(), bcs.constraints.len());
    }

    let k2 = Graph::complete(2);
    let cert = k2_swap_cert();
    let report = verify_graph_qhom(&k2, &k2, &cert, 0.0).unwrap();
    println!("swap certificate: quantum homomorphism {}, MR {}", report.qhom.pass, report.mr.pass);

    let mr = MrCert::from_qhom(&cert);
    let pvms = mr_to_bcs_solution(&k2, &k2, &mr, 0.0).unwrap();
    let bcs = graph_pair_to_bcs(&k2, &k2);
    println!("as a quantum solution of the constraint system:\n{}", bcs_quantum_solution_verify(&bcs, &pvms, 0.0).unwrap());
}
