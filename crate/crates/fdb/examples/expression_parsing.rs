//! Tour of the expression language: accepted shapes, precedence corners,
//! pretty-printing round trips, and the offsets carried by parse errors.
//!
//! Run with: cargo run --example expression_parsing

use fdb::{eval_jet, parse, rational};

fn main() {
    println!("parsed and printed back:");
    for src in [
        "x",
        "exp(x^2)",
        "-x^2",
        "x^-3",
        "7/2 * x",
        "7 / 2 * x",
        "(x + 1)^2 / (1 - x)",
        "sin(cos(x)) - ln(1 + x^2)",
        "1/2/3",
    ] {
        let expr = parse(src).unwrap();
        let printed = expr.pretty();
        assert_eq!(parse(&printed).unwrap(), expr, "round trip for {src:?}");
        println!("  {src:<28} -> {printed}");
    }

    println!("\nrejected, with byte offsets:");
    for src in ["(x+", "x^2^3", "foo(x)", "x 2", "3/0", "x^(2)", ""] {
        let err = parse(src).unwrap_err();
        println!("  {src:<8} -> {err}");
    }

    println!("\nevaluating x^2 + x around 1 to order 3:");
    let expr = parse("x^2 + x").unwrap();
    let jet = eval_jet(&expr, &rational(1, 1), 3).unwrap();
    let seq = jet.to_derivative_sequence();
    for (order, value) in seq.values().iter().enumerate() {
        println!("  h^({order}) = {value}");
    }

    println!("\nerrors carry the offending subexpression span:");
    let expr = parse("1 + exp(x)").unwrap();
    let err = eval_jet(&expr, &rational(0, 1), 2).unwrap_err();
    println!("  exact kind on exp: {err}");
    let expr = parse("1/x").unwrap();
    let err = eval_jet(&expr, &rational(0, 1), 2).unwrap_err();
    println!("  pole at the point: {err}");
}
