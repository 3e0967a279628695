//! Shrinking a padded strategy to the support of its state, then flattening the state.

use qmonad::catalog::{k2_swap_cert, magic_square_cert};
use qmonad::games::{check_perfect, schmidt_reduce, strategy_from_cert, to_maximally_entangled};

fn main() {
    let s = strategy_from_cert(&magic_square_cert(), 0.0).unwrap();
    let padded = s.pad(8, 8).unwrap();
    let reduced = schmidt_reduce(&padded, 1e-9).unwrap();
    println!("{}x{} -> {}x{}", padded.dim_a(), padded.dim_b(), reduced.dim_a(), reduced.dim_b());

    let before = s.probability_table().unwrap();
    let after = reduced.probability_table().unwrap();
    let gap = before
        .iter()
        .map(|(k, p)| (p.to_f64() - after.get(k).map_or(0.0, |q| q.to_f64())).abs())
        .fold(0.0, f64::max);
    println!("largest change in any outcome probability: {gap:.2e}");

    let cert = k2_swap_cert();
    let (a, b) = (cert.source().clone(), cert.target().clone());
    let st = strategy_from_cert(&cert, 0.0).unwrap();
    let skewed = st.with_state(qmonad::linalg::Matrix::from_ints(4, 1, &[3, 0, 0, 1])).unwrap();
    println!("skewed state still perfect: {}", check_perfect(&skewed, &a, &b, 0.0).unwrap().pass);
    let flat = to_maximally_entangled(&skewed, &a, &b, 0.0).unwrap();
    println!("maximally entangled replacement equals the original: {}", flat == st);
}
