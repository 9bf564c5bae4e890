//! Arbitrary-order derivatives of function compositions.
//!
//! The n-th derivative of `f(g(x))` can be written as a sum over all set
//! partitions of `{1, ..., n}`, or equivalently as a much shorter sum over
//! block profiles (integer partitions) with multinomial coefficients. This
//! crate implements both evaluators over exact rationals and `f64`, the
//! partition-extension step behind them, and an independent truncated
//! power-series oracle that recomputes the same derivatives by composing
//! Taylor jets directly.
//!
//! Entry points:
//! - [`combinatorics`]: set partitions, block profiles, Bell numbers and the
//!   exact counts relating them.
//! - [`faa_di_bruno`]: the two derivative evaluators and the symbolic
//!   coefficient table.
//! - [`jets`]: truncated Taylor series, composition, and the oracle.
//! - [`exprlang`]: a small expression language so `f` and `g` can be given
//!   as formulas.
//! - [`cli`]: the command implementations behind the `fdb` binary.
//!
//! ```
//! use fdb::{derivative_of_composition_closed_form,
//!           derivative_of_composition_combinatorial,
//!           eval_jet, oracle_nth_derivative, parse, rational};
//!
//! let f = parse("x^3 - 2*x").unwrap();
//! let g = parse("x^2 + x/3").unwrap();
//! let (point, order) = (rational(1, 2), 6);
//!
//! // Derivatives of g at the point, then of f at g(point).
//! let g_seq = eval_jet(&g, &point, order).unwrap().to_derivative_sequence();
//! let f_seq = eval_jet(&f, g_seq.value(0), order).unwrap().to_derivative_sequence();
//!
//! let combinatorial = derivative_of_composition_combinatorial(&f_seq, &g_seq, order).unwrap();
//! let closed = derivative_of_composition_closed_form(&f_seq, &g_seq, order).unwrap();
//! let oracle = oracle_nth_derivative(&f_seq, &g_seq, order, &point).unwrap();
//!
//! assert_eq!(combinatorial, rational(720, 1));
//! assert_eq!(closed, combinatorial);
//! assert_eq!(oracle, combinatorial);
//! ```

pub mod cli;
pub mod combinatorics;
pub mod exprlang;
pub mod faa_di_bruno;
pub mod jets;
pub mod scalar;

pub use combinatorics::{
    bell_number, block_profile, enumerate_block_profiles, enumerate_set_partitions,
    enumerate_set_partitions_with_cap, extend_partition, factorial, profile_count, BlockProfile,
    CombinatoricsError, SetPartition, DEFAULT_MAX_ENUM,
};
pub use exprlang::{eval_jet, parse, Expr, ParseError};
pub use faa_di_bruno::{
    all_derivatives_of_composition, derivative_of_composition_closed_form,
    derivative_of_composition_combinatorial, symbolic_expansion, DerivativeSequence, EvalError,
    TermExpansion, DEFAULT_MAX_ORDER,
};
pub use jets::{oracle_nth_derivative, Jet, JetError};
pub use scalar::{parse_rational, rational, Rational, Scalar, ScalarKind};
