//! The magic square: no classical homomorphism, a perfect quantum strategy of dimension 4.

use qmonad::catalog::{magic_square_cert, magic_square_pair};
use qmonad::games::{check_perfect, strategy_from_cert, verify_special_form, winning_probability};
use qmonad::monad::verify_qhom;
use qmonad::structures::find_homomorphism;

fn main() {
    let (a, b) = magic_square_pair();
    println!("classical homomorphism: {:?}", find_homomorphism(&a, &b).unwrap().map(|_| "found").unwrap_or("absent"));

    let cert = magic_square_cert();
    println!("certificate of dimension {}:\n{}", cert.dim(), verify_qhom(&cert, 0.0));

    let s = strategy_from_cert(&cert, 0.0).unwrap();
    let (min, mean) = winning_probability(&s, &a, &b, 0.0).unwrap();
    println!("strategy {}x{}: minimum winning probability {min}, average {mean}", s.dim_a(), s.dim_b());
    println!("perfect: {}", check_perfect(&s, &a, &b, 0.0).unwrap().pass);
    println!("special form: {}", verify_special_form(&s, &b, 0.0).pass);
}
