//! Differentiate a composition of rational polynomials to high order, three
//! ways, in exact arithmetic: the set-partition sum, the closed form, and
//! the series-composition oracle. All three agree to the last digit.
//!
//! Run with: cargo run --example exact_derivatives

use fdb::{
    derivative_of_composition_closed_form, derivative_of_composition_combinatorial, eval_jet,
    oracle_nth_derivative, parse, rational,
};

fn main() {
    let f_src = "x^3 - 2*x + 1/2";
    let g_src = "x^2 + x/3";
    let point = rational(1, 2);
    let max_order = 8;

    let f = parse(f_src).unwrap();
    let g = parse(g_src).unwrap();

    // Derivatives of g at the point, and of f at g(point).
    let g_seq = eval_jet(&g, &point, max_order).unwrap().to_derivative_sequence();
    let f_seq = eval_jet(&f, g_seq.value(0), max_order)
        .unwrap()
        .to_derivative_sequence();

    println!("f = {f_src}");
    println!("g = {g_src}");
    println!("g({point}) = {}\n", g_seq.value(0));
    println!(
        "{:>5}  {:>22}  {:>22}  {:>22}",
        "order", "combinatorial", "closed form", "oracle"
    );
    for n in 0..=max_order {
        let comb = derivative_of_composition_combinatorial(&f_seq, &g_seq, n).unwrap();
        let closed = derivative_of_composition_closed_form(&f_seq, &g_seq, n).unwrap();
        let oracle = oracle_nth_derivative(&f_seq, &g_seq, n, &point).unwrap();
        assert_eq!(comb, closed);
        assert_eq!(comb, oracle);
        println!(
            "{n:>5}  {:>22}  {:>22}  {:>22}",
            comb.to_string(),
            closed.to_string(),
            oracle.to_string()
        );
    }
    println!("\nall orders agree exactly");
}
