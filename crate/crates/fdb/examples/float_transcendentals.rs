//! Transcendental compositions run in the float kind: derivatives of
//! exp(sin(x)) and ln(1 + x^2) compositions, cross-checked between the two
//! partition evaluators and the series oracle at 1e-9 relative tolerance.
//!
//! Run with: cargo run --example float_transcendentals

use fdb::jets::DEFAULT_ORACLE_REL_TOL;
use fdb::{
    derivative_of_composition_closed_form, derivative_of_composition_combinatorial, eval_jet,
    oracle_nth_derivative, parse, Scalar,
};

fn main() {
    let pairs = [
        ("exp(x)", "sin(x)"),
        ("ln(1 + x^2)", "cos(x) + x"),
        ("sin(x)", "exp(x/2) - 1"),
    ];
    let point = 0.3f64;
    let max_order = 8;

    for (f_src, g_src) in pairs {
        let f = parse(f_src).unwrap();
        let g = parse(g_src).unwrap();
        let g_seq = eval_jet(&g, &point, max_order).unwrap().to_derivative_sequence();
        let f_seq = eval_jet(&f, g_seq.value(0), max_order)
            .unwrap()
            .to_derivative_sequence();

        println!("d^n/dx^n {f_src} with x := {g_src}, at x = {point}:");
        for n in 1..=max_order {
            let comb = derivative_of_composition_combinatorial(&f_seq, &g_seq, n).unwrap();
            let closed = derivative_of_composition_closed_form(&f_seq, &g_seq, n).unwrap();
            let oracle = oracle_nth_derivative(&f_seq, &g_seq, n, &point).unwrap();
            assert!(comb.approx_eq_rel(&closed, DEFAULT_ORACLE_REL_TOL));
            assert!(comb.approx_eq_rel(&oracle, DEFAULT_ORACLE_REL_TOL));
            println!("  order {n}: {comb:>20.12e}");
        }
        println!("  (three routes agree within {DEFAULT_ORACLE_REL_TOL:e} relative)\n");
    }
}
