//! Work with truncated Taylor expansions directly: ring operations, integer
//! powers, composition, and the elementary-function recurrences.
//!
//! Run with: cargo run --example jet_arithmetic

use fdb::{rational, Jet, Rational};

fn show(label: &str, jet: &Jet<Rational>) {
    let coeffs: Vec<String> = jet.coeffs().iter().map(|c| c.to_string()).collect();
    println!("  {label:<18} [{}] around {}", coeffs.join(", "), jet.point());
}

fn main() {
    let order = 4;
    let x = Jet::variable(rational(0, 1), order);
    let one = Jet::constant(rational(0, 1), rational(1, 1), order);

    println!("exact jets around 0, order {order}:");
    let one_plus_x = one.add(&x).unwrap();
    show("1 + x", &one_plus_x);
    show("(1+x)^2", &one_plus_x.int_pow(2).unwrap());
    show("(1+x)^-1", &one_plus_x.int_pow(-1).unwrap());
    let geometric = one.div(&one_plus_x.int_pow(-1).unwrap().scale(&rational(1, 1))).unwrap();
    show("1/(1/(1+x))", &geometric);

    // Composition: outer expanded at the inner value.
    let square_at_one = Jet::new(
        rational(1, 1),
        vec![rational(1, 1), rational(2, 1), rational(1, 1), rational(0, 1), rational(0, 1)],
    );
    let composed = Jet::compose(&square_at_one, &one_plus_x).unwrap();
    show("(1+x)^2 via comp", &composed);
    assert_eq!(composed, one_plus_x.int_pow(2).unwrap());

    println!("\nfloat jets around 0, order {order}:");
    let xf = Jet::variable(0.0f64, order);
    let ef = xf.exp().unwrap();
    let (sf, cf) = xf.sin_cos().unwrap();
    let lf = Jet::constant(0.0f64, 1.0, order).add(&xf).unwrap().ln().unwrap();
    for (name, jet) in [("exp x", &ef), ("sin x", &sf), ("cos x", &cf), ("ln(1+x)", &lf)] {
        let coeffs: Vec<String> = jet.coeffs().iter().map(|c| format!("{c:.6}")).collect();
        println!("  {name:<8} [{}]", coeffs.join(", "));
    }

    // Reading derivatives back multiplies by factorials.
    println!("\nderivatives of exp at 0 (all 1): {:?}", ef.to_derivative_sequence().values());
}
