//! Strong contextuality of the PR box and GHZ models, and their quantum witnesses.

use qmonad::catalog::{full_support_model, ghz_model, ghz_pvms, ghz_state, magic_square_model, magic_square_pvms, pr_box};
use qmonad::translations::{check_state_independent_witness, check_state_witness, empirical_to_csp, is_strongly_contextual};

fn main() {
    for (name, model) in [("PR box", pr_box()), ("GHZ", ghz_model()), ("magic square", magic_square_model()), ("full support", full_support_model())] {
        let csp = empirical_to_csp(&model).unwrap();
        println!(
            "{name}: {} contexts, {} CSP constraints, strongly contextual: {}",
            model.contexts.len(),
            csp.constraints.len(),
            is_strongly_contextual(&model).unwrap()
        );
    }

    let ghz = ghz_model();
    println!("GHZ state witness:\n{}", check_state_witness(&ghz, &ghz_state(), &ghz_pvms(), 0.0).unwrap());
    println!("GHZ measurements without the state:\n{}", check_state_independent_witness(&ghz, &ghz_pvms(), 0.0).unwrap());
    println!(
        "magic square, state-independent:\n{}",
        check_state_independent_witness(&magic_square_model(), &magic_square_pvms(), 0.0).unwrap()
    );
}
