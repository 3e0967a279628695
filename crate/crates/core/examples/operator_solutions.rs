//! Binary observables for a constraint system and the projectors of their spectral splits.

use std::collections::BTreeMap;

use qmonad::catalog::{magic_square_bcs, magic_square_operators};
use qmonad::translations::{bcs_quantum_solution_verify, operator_to_projectors, projectors_to_operator, verify_operator_solution, OperatorSolution};

fn main() {
    let bcs = magic_square_bcs();
    let sol = magic_square_operators();
    println!("Pauli operators:\n{}", verify_operator_solution(&bcs, &sol, 0.0).unwrap());

    let pvms = operator_to_projectors(&sol, 0.0).unwrap();
    println!("spectral projectors:\n{}", bcs_quantum_solution_verify(&bcs, &pvms, 0.0).unwrap());
    println!("round trip exact: {}", projectors_to_operator(&pvms, 0.0).unwrap() == sol);

    let guess: BTreeMap<String, bool> = bcs.variables.iter().map(|v| (v.clone(), false)).collect();
    println!("all-false scalar assignment:\n{}", verify_operator_solution(&bcs, &OperatorSolution::classical(&guess), 0.0).unwrap());
}
