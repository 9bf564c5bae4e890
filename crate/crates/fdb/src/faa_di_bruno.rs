//! The two evaluators for the n-th derivative of `f(g(x))`.
//!
//! The combinatorial evaluator sums `f^(|pi|)(g(x)) * prod_B g^(|B|)(x)`
//! over every set partition `pi` of `{1, ..., n}`, streaming the partitions
//! so memory stays O(n) despite the Bell-number term count. The closed-form
//! evaluator collects partitions with equal block profiles into single terms
//! with exact multinomial coefficients, shrinking the sum from Bell(n) terms
//! to p(n) terms. Both take the raw derivative values of `f` (at `g(x)`) and
//! `g` (at `x`) and agree exactly in the rational kind.
//!
//! Order 0 is supported with the empty-partition convention: the 0-th
//! derivative of the composition is `f(g(x))` itself, one term with
//! coefficient 1. This extends the n > 0 statement of the formula.

use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::combinatorics::{
    self, bell_number, enumerate_block_profiles, profile_count, BlockProfile, DEFAULT_MAX_ENUM,
};
use crate::scalar::Scalar;

/// Default cap on the order accepted by the closed-form evaluator and the
/// symbolic expansion.
pub const DEFAULT_MAX_ORDER: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("order {n} exceeds the {evaluator} cap {cap}; raise the cap to evaluate anyway")]
    CapExceeded {
        n: usize,
        cap: usize,
        evaluator: &'static str,
    },
    #[error("order-{required} evaluation needs derivatives up to order {required}, but f has order {f_order} and g has order {g_order}")]
    OrderMismatch {
        required: usize,
        f_order: usize,
        g_order: usize,
    },
}

/// Derivative values `h^(0), ..., h^(n)` of some function at a fixed point.
///
/// For the outer function the point is the inner value `g(x)`; for the inner
/// function it is `x` itself. `values()[0]` is the function value.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeSequence<S: Scalar> {
    values: Vec<S>,
}

impl<S: Scalar> DerivativeSequence<S> {
    /// Wrap raw derivative values. Panics if `values` is empty, since even
    /// order 0 carries the function value.
    pub fn new(values: Vec<S>) -> Self {
        assert!(
            !values.is_empty(),
            "a derivative sequence holds at least the order-0 value"
        );
        DerivativeSequence { values }
    }

    pub fn from_fn(order: usize, f: impl FnMut(usize) -> S) -> Self {
        DerivativeSequence {
            values: (0..=order).map(f).collect(),
        }
    }

    /// Highest derivative order held: `values().len() - 1`.
    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    /// The i-th derivative value.
    pub fn value(&self, i: usize) -> &S {
        &self.values[i]
    }
}

#[derive(Serialize, Deserialize)]
struct SequenceRepr {
    order: usize,
    values: Vec<serde_json::Value>,
}

impl<S: Scalar> Serialize for DerivativeSequence<S> {
    fn serialize<Z: Serializer>(&self, serializer: Z) -> Result<Z::Ok, Z::Error> {
        SequenceRepr {
            order: self.order(),
            values: self.values.iter().map(Scalar::to_json).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for DerivativeSequence<S> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = SequenceRepr::deserialize(deserializer)?;
        if repr.values.len() != repr.order + 1 {
            return Err(D::Error::custom(format!(
                "sequence of order {} must hold {} values, got {}",
                repr.order,
                repr.order + 1,
                repr.values.len()
            )));
        }
        let values = repr
            .values
            .iter()
            .map(S::from_json)
            .collect::<Result<Vec<_>, _>>()
            .map_err(D::Error::custom)?;
        Ok(DerivativeSequence { values })
    }
}

fn check_orders<S: Scalar>(
    f_seq: &DerivativeSequence<S>,
    g_seq: &DerivativeSequence<S>,
    n: usize,
) -> Result<(), EvalError> {
    if f_seq.order() < n || g_seq.order() < n {
        return Err(EvalError::OrderMismatch {
            required: n,
            f_order: f_seq.order(),
            g_order: g_seq.order(),
        });
    }
    Ok(())
}

/// Sum over all set partitions of `{1, ..., n}`, under the default
/// enumeration cap.
pub fn derivative_of_composition_combinatorial<S: Scalar>(
    f_seq: &DerivativeSequence<S>,
    g_seq: &DerivativeSequence<S>,
    n: usize,
) -> Result<S, EvalError> {
    derivative_of_composition_combinatorial_with_cap(f_seq, g_seq, n, DEFAULT_MAX_ENUM)
}

/// Sum over all set partitions of `{1, ..., n}`: for each partition the term
/// is `f_seq[block count] * prod over blocks of g_seq[block size]`, summed in
/// enumeration order.
pub fn derivative_of_composition_combinatorial_with_cap<S: Scalar>(
    f_seq: &DerivativeSequence<S>,
    g_seq: &DerivativeSequence<S>,
    n: usize,
    cap: usize,
) -> Result<S, EvalError> {
    check_orders(f_seq, g_seq, n)?;
    if n > cap {
        return Err(EvalError::CapExceeded {
            n,
            cap,
            evaluator: "combinatorial",
        });
    }
    if n == 0 {
        return Ok(f_seq.value(0).clone());
    }
    // Terms are accumulated per fixed-size chunk in enumeration order and
    // the chunk subtotals folded in, also in order: a deterministic chunked
    // reduction. Exact results are unaffected; float results are defined by
    // exactly this grouping. Chunk subtotals also keep rational gcd work on
    // small numbers instead of the ever-growing running total.
    const CHUNK: usize = 1024;
    let mut total = S::zero();
    let mut chunk = S::zero();
    let mut in_chunk = 0usize;
    combinatorics::visit_block_sizes(n, &mut |sizes| {
        let term = S::term_product(
            f_seq.value(sizes.len()),
            sizes.iter().map(|&size| g_seq.value(size)),
        );
        chunk += term;
        in_chunk += 1;
        if in_chunk == CHUNK {
            total += std::mem::replace(&mut chunk, S::zero());
            in_chunk = 0;
        }
    });
    if in_chunk > 0 {
        total += chunk;
    }
    Ok(total)
}

/// Sum over block profiles with multinomial coefficients, under the default
/// order cap.
pub fn derivative_of_composition_closed_form<S: Scalar>(
    f_seq: &DerivativeSequence<S>,
    g_seq: &DerivativeSequence<S>,
    n: usize,
) -> Result<S, EvalError> {
    derivative_of_composition_closed_form_with_cap(f_seq, g_seq, n, DEFAULT_MAX_ORDER)
}

/// Sum over block profiles `k` with `1*k_1 + ... + n*k_n = n`: each term is
/// `n!/(k_1! 1!^{k_1} ... k_n! n!^{k_n}) * f_seq[k_1+...+k_n] * prod_i
/// g_seq[i]^{k_i}`. Agrees exactly with the combinatorial evaluator whenever
/// both are computable.
pub fn derivative_of_composition_closed_form_with_cap<S: Scalar>(
    f_seq: &DerivativeSequence<S>,
    g_seq: &DerivativeSequence<S>,
    n: usize,
    cap: usize,
) -> Result<S, EvalError> {
    check_orders(f_seq, g_seq, n)?;
    if n > cap {
        return Err(EvalError::CapExceeded {
            n,
            cap,
            evaluator: "closed-form",
        });
    }
    let mut total = S::zero();
    for pf in enumerate_block_profiles(n) {
        let mut term = S::from_nat(&profile_count(&pf));
        term *= f_seq.value(pf.block_count());
        for (i, &ki) in pf.multiplicities().iter().enumerate() {
            for _ in 0..ki {
                term *= g_seq.value(i + 1);
            }
        }
        total += term;
    }
    Ok(total)
}

/// Derivative table of the composition for orders `0..=n`, computed by the
/// closed form.
pub fn all_derivatives_of_composition<S: Scalar>(
    f_seq: &DerivativeSequence<S>,
    g_seq: &DerivativeSequence<S>,
    n: usize,
) -> Result<DerivativeSequence<S>, EvalError> {
    all_derivatives_of_composition_with_cap(f_seq, g_seq, n, DEFAULT_MAX_ORDER)
}

pub fn all_derivatives_of_composition_with_cap<S: Scalar>(
    f_seq: &DerivativeSequence<S>,
    g_seq: &DerivativeSequence<S>,
    n: usize,
    cap: usize,
) -> Result<DerivativeSequence<S>, EvalError> {
    let values = (0..=n)
        .map(|m| derivative_of_composition_closed_form_with_cap(f_seq, g_seq, m, cap))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DerivativeSequence::new(values))
}

/// The coefficient table of the closed form at order n: one entry per block
/// profile, in enumeration order, with the exact number of set partitions
/// sharing that profile. Multiplicities sum to Bell(n).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermExpansion {
    n: usize,
    terms: Vec<(BlockProfile, BigUint)>,
}

impl TermExpansion {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(BlockProfile, BigUint)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

fn derivative_mark(order: usize) -> String {
    match order {
        0 => String::new(),
        1..=3 => "'".repeat(order),
        _ => format!("^({order})"),
    }
}

/// Prints the classical expanded form, e.g. for n = 3:
/// `f''' g'^3 + 3 f'' g' g'' + f' g'''`.
impl fmt::Display for TermExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (t, (pf, count)) in self.terms.iter().enumerate() {
            if t > 0 {
                f.write_str(" + ")?;
            }
            if !count.is_one() {
                write!(f, "{count} ")?;
            }
            write!(f, "f{}", derivative_mark(pf.block_count()))?;
            for (i, &ki) in pf.multiplicities().iter().enumerate() {
                if ki == 0 {
                    continue;
                }
                let mark = derivative_mark(i + 1);
                match (i < 3, ki) {
                    (_, 1) => write!(f, " g{mark}")?,
                    (true, _) => write!(f, " g{mark}^{ki}")?,
                    (false, _) => write!(f, " (g{mark})^{ki}")?,
                }
            }
        }
        Ok(())
    }
}

/// The symbolic closed form at order n: block profiles with their exact
/// partition counts, under the default order cap.
pub fn symbolic_expansion(n: usize) -> Result<TermExpansion, EvalError> {
    symbolic_expansion_with_cap(n, DEFAULT_MAX_ORDER)
}

pub fn symbolic_expansion_with_cap(n: usize, cap: usize) -> Result<TermExpansion, EvalError> {
    if n > cap {
        return Err(EvalError::CapExceeded {
            n,
            cap,
            evaluator: "symbolic expansion",
        });
    }
    let terms = enumerate_block_profiles(n)
        .into_iter()
        .map(|pf| {
            let count = profile_count(&pf);
            (pf, count)
        })
        .collect();
    Ok(TermExpansion { n, terms })
}

/// Total number of terms the combinatorial evaluator sums at order n.
pub fn combinatorial_term_count(n: usize) -> BigUint {
    bell_number(n)
}

/// Total number of terms the closed-form evaluator sums at order n.
pub fn closed_form_term_count(n: usize) -> usize {
    enumerate_block_profiles(n).len()
}
