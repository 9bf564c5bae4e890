//! Print the collected (closed) form of the n-th derivative of f(g(x)) for
//! small n, with the exact partition count behind each term, and show how
//! slowly the term count grows compared with the raw partition count.
//!
//! Run with: cargo run --example symbolic_table

use fdb::{bell_number, symbolic_expansion};

fn main() {
    for n in 0..=6 {
        let expansion = symbolic_expansion(n).unwrap();
        println!("(f o g)^({n}) = {expansion}");
    }

    println!("\nterms summed by each evaluator:");
    println!("  {:>5} {:>16} {:>8}", "order", "partitions", "profiles");
    for n in [1, 4, 8, 12, 16, 20] {
        let expansion = symbolic_expansion(n).unwrap();
        println!("  {:>5} {:>16} {:>8}", n, bell_number(n), expansion.len());
    }

    // The multiplicities themselves: one row per block profile.
    let n = 5;
    println!("\nprofile multiplicities at order {n}:");
    for (profile, count) in symbolic_expansion(n).unwrap().terms() {
        println!("  k={profile} parts={:?} count={count}", profile.parts());
    }
}
