//! Truncated Taylor expansions (jets) and the series-composition oracle.
//!
//! A jet holds the first `order + 1` Taylor coefficients of a function
//! around an expansion point. Jets form a ring under coefficientwise
//! addition and the truncated Cauchy product, and compose by Horner
//! evaluation of the outer coefficients in the inner delta series. None of
//! this touches set partitions, which is what makes
//! [`oracle_nth_derivative`] an independent check on the evaluators in
//! [`crate::faa_di_bruno`].
//!
//! Elementary functions are seeded from the constant term and extended by
//! the standard first-order recurrences. The constant term of exp/ln/sin/cos
//! is transcendental in general, so those operations exist only in the float
//! kind; the exact kind refuses them with [`JetError::Kind`].

use num_bigint::BigUint;
use num_traits::One;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::combinatorics::factorial;
use crate::faa_di_bruno::DerivativeSequence;
use crate::scalar::Scalar;

/// Default absolute tolerance when checking that an outer jet is expanded
/// at the inner jet's value (float kind; the exact kind compares exactly).
pub const DEFAULT_COMPOSE_POINT_TOL: f64 = 1e-9;

/// Default relative tolerance for float oracle cross-checks.
pub const DEFAULT_ORACLE_REL_TOL: f64 = 1e-9;

/// Default relative tolerance for float series-coefficient checks.
pub const DEFAULT_SERIES_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("jet orders differ: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("jets expanded around different points: expected {expected}, found {found}")]
    PointMismatch { expected: String, found: String },
    #[error("{op}: {reason}")]
    Domain { op: &'static str, reason: String },
    #[error("{op} needs the float kind (the constant term is transcendental in general)")]
    Kind { op: &'static str },
    #[error("order-{required} readback needs f and g derivatives up to that order, but f has order {f_order} and g has order {g_order}")]
    SequenceTooShort {
        required: usize,
        f_order: usize,
        g_order: usize,
    },
}

/// Truncated Taylor expansion: `coeffs()[i]` is the i-th derivative at
/// `point()` divided by i!.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet<S: Scalar> {
    point: S,
    coeffs: Vec<S>,
}

impl<S: Scalar> Jet<S> {
    /// Wrap raw coefficients. Panics if `coeffs` is empty.
    pub fn new(point: S, coeffs: Vec<S>) -> Self {
        assert!(!coeffs.is_empty(), "a jet holds at least the constant term");
        Jet { point, coeffs }
    }

    /// The jet of a constant function.
    pub fn constant(point: S, value: S, order: usize) -> Self {
        let mut coeffs = vec![S::zero(); order + 1];
        coeffs[0] = value;
        Jet { point, coeffs }
    }

    /// The jet of the identity function `x` around `point`.
    pub fn variable(point: S, order: usize) -> Self {
        let mut coeffs = vec![S::zero(); order + 1];
        coeffs[0] = point.clone();
        if order >= 1 {
            coeffs[1] = S::one();
        }
        Jet { point, coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn point(&self) -> &S {
        &self.point
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &S {
        &self.coeffs[i]
    }

    /// Divide derivative values by factorials: `coeffs[i] = d[i] / i!`.
    pub fn from_derivative_sequence(d: &DerivativeSequence<S>, point: S) -> Self {
        Self::from_derivative_values(d.values(), point)
    }

    fn from_derivative_values(values: &[S], point: S) -> Self {
        let mut coeffs = Vec::with_capacity(values.len());
        let mut fact = BigUint::one();
        for (i, v) in values.iter().enumerate() {
            if i > 1 {
                fact *= BigUint::from(i);
            }
            coeffs.push(v.clone() / S::from_nat(&fact));
        }
        Jet { point, coeffs }
    }

    /// Multiply coefficients by factorials: the exact inverse of
    /// [`Jet::from_derivative_sequence`] in the rational kind.
    pub fn to_derivative_sequence(&self) -> DerivativeSequence<S> {
        let mut fact = BigUint::one();
        let values = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if i > 1 {
                    fact *= BigUint::from(i);
                }
                c.mul_ref(&S::from_nat(&fact))
            })
            .collect();
        DerivativeSequence::new(values)
    }

    fn check_compatible(&self, rhs: &Self) -> Result<(), JetError> {
        if self.order() != rhs.order() {
            return Err(JetError::OrderMismatch {
                left: self.order(),
                right: rhs.order(),
            });
        }
        if self.point != rhs.point {
            return Err(JetError::PointMismatch {
                expected: self.point.to_string(),
                found: rhs.point.to_string(),
            });
        }
        Ok(())
    }

    /// Coefficientwise sum; requires the same order and point.
    pub fn add(&self, rhs: &Self) -> Result<Self, JetError> {
        self.check_compatible(rhs)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        Ok(Jet {
            point: self.point.clone(),
            coeffs,
        })
    }

    /// Coefficientwise difference; requires the same order and point.
    pub fn sub(&self, rhs: &Self) -> Result<Self, JetError> {
        self.check_compatible(rhs)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a.clone() - b.clone())
            .collect();
        Ok(Jet {
            point: self.point.clone(),
            coeffs,
        })
    }

    /// Coefficientwise scaling.
    pub fn scale(&self, c: &S) -> Self {
        Jet {
            point: self.point.clone(),
            coeffs: self.coeffs.iter().map(|a| a.mul_ref(c)).collect(),
        }
    }

    /// Truncated Cauchy product; requires the same order and point.
    pub fn mul(&self, rhs: &Self) -> Result<Self, JetError> {
        self.check_compatible(rhs)?;
        Ok(self.mul_impl(rhs))
    }

    fn mul_impl(&self, rhs: &Self) -> Self {
        let order = self.order();
        let mut coeffs = vec![S::zero(); order + 1];
        for (j, a) in self.coeffs.iter().enumerate() {
            for (i, b) in rhs.coeffs.iter().take(order + 1 - j).enumerate() {
                coeffs[j + i] += &a.mul_ref(b);
            }
        }
        Jet {
            point: self.point.clone(),
            coeffs,
        }
    }

    /// Truncated quotient; requires `rhs` to have a nonzero constant term.
    pub fn div(&self, rhs: &Self) -> Result<Self, JetError> {
        self.check_compatible(rhs)?;
        if rhs.coeffs[0].is_zero() {
            return Err(JetError::Domain {
                op: "div",
                reason: "division by a jet with zero constant term".into(),
            });
        }
        let order = self.order();
        let mut q: Vec<S> = Vec::with_capacity(order + 1);
        for m in 0..=order {
            let mut acc = self.coeffs[m].clone();
            for j in 1..=m {
                acc = acc - rhs.coeffs[j].mul_ref(&q[m - j]);
            }
            q.push(acc / rhs.coeffs[0].clone());
        }
        Ok(Jet {
            point: self.point.clone(),
            coeffs: q,
        })
    }

    /// Integer power by repeated squaring; negative exponents go through the
    /// reciprocal and need a nonzero constant term.
    pub fn int_pow(&self, m: i64) -> Result<Self, JetError> {
        if m < 0 && self.coeffs[0].is_zero() {
            return Err(JetError::Domain {
                op: "int_pow",
                reason: "negative power of a jet with zero constant term".into(),
            });
        }
        let mut result = Jet::constant(self.point.clone(), S::one(), self.order());
        let mut base = self.clone();
        let mut exp = m.unsigned_abs();
        while exp > 0 {
            if exp & 1 == 1 {
                result = result.mul_impl(&base);
            }
            base = base.mul_impl(&base);
            exp >>= 1;
        }
        if m < 0 {
            let unit = Jet::constant(self.point.clone(), S::one(), self.order());
            return unit.div(&result);
        }
        Ok(result)
    }

    /// exp of a jet (float kind only): `e_0 = exp(u_0)`,
    /// `e_m = (1/m) * sum_{j=1..m} j * u_j * e_{m-j}`.
    pub fn exp(&self) -> Result<Self, JetError> {
        let e0 = self.coeffs[0]
            .exp_value()
            .ok_or(JetError::Kind { op: "exp" })?;
        let mut e = vec![e0];
        for m in 1..=self.order() {
            let mut acc = S::zero();
            for j in 1..=m {
                acc += &S::from_nat(&BigUint::from(j)).mul_ref(&self.coeffs[j].mul_ref(&e[m - j]));
            }
            e.push(acc / S::from_nat(&BigUint::from(m)));
        }
        Ok(Jet {
            point: self.point.clone(),
            coeffs: e,
        })
    }

    /// ln of a jet (float kind only, constant term must be positive):
    /// `l_m = (u_m - (1/m) * sum_{j=1..m-1} j * l_j * u_{m-j}) / u_0`.
    pub fn ln(&self) -> Result<Self, JetError> {
        let l0 = match self.coeffs[0].ln_value() {
            None => return Err(JetError::Kind { op: "ln" }),
            Some(_) if !self.coeffs[0].is_strictly_positive() => {
                return Err(JetError::Domain {
                    op: "ln",
                    reason: format!("constant term {} is not positive", self.coeffs[0]),
                })
            }
            Some(v) => v,
        };
        let mut l = vec![l0];
        for m in 1..=self.order() {
            let mut acc = S::zero();
            for (j, lj) in l.iter().enumerate().take(m).skip(1) {
                acc += &S::from_nat(&BigUint::from(j)).mul_ref(&lj.mul_ref(&self.coeffs[m - j]));
            }
            let numer = self.coeffs[m].clone() - acc / S::from_nat(&BigUint::from(m));
            l.push(numer / self.coeffs[0].clone());
        }
        Ok(Jet {
            point: self.point.clone(),
            coeffs: l,
        })
    }

    /// sin and cos of a jet together (float kind only), via the coupled
    /// recurrences `s_m = (1/m) sum j u_j c_{m-j}`, `c_m = -(1/m) sum j u_j s_{m-j}`.
    pub fn sin_cos(&self) -> Result<(Self, Self), JetError> {
        let (s0, c0) = self.coeffs[0]
            .sin_cos_value()
            .ok_or(JetError::Kind { op: "sin/cos" })?;
        let mut s = vec![s0];
        let mut c = vec![c0];
        for m in 1..=self.order() {
            let mut s_acc = S::zero();
            let mut c_acc = S::zero();
            for j in 1..=m {
                let ju = S::from_nat(&BigUint::from(j)).mul_ref(&self.coeffs[j]);
                s_acc += &ju.mul_ref(&c[m - j]);
                c_acc += &ju.mul_ref(&s[m - j]);
            }
            let inv_m = S::one() / S::from_nat(&BigUint::from(m));
            s.push(s_acc.mul_ref(&inv_m));
            c.push(-c_acc.mul_ref(&inv_m));
        }
        let point = self.point.clone();
        Ok((
            Jet {
                point: point.clone(),
                coeffs: s,
            },
            Jet { point, coeffs: c },
        ))
    }

    /// Compose `outer(inner(.))` with the default point tolerance.
    pub fn compose(outer: &Self, inner: &Self) -> Result<Self, JetError> {
        Self::compose_with_tolerance(outer, inner, DEFAULT_COMPOSE_POINT_TOL)
    }

    /// Compose `outer(inner(.))` by Horner evaluation of the outer
    /// coefficients in the inner delta series (inner with its constant term
    /// zeroed). The outer jet must be expanded at the inner jet's value:
    /// exactly in the exact kind, within `point_tol` (absolute) in the float
    /// kind.
    pub fn compose_with_tolerance(
        outer: &Self,
        inner: &Self,
        point_tol: f64,
    ) -> Result<Self, JetError> {
        if outer.order() != inner.order() {
            return Err(JetError::OrderMismatch {
                left: outer.order(),
                right: inner.order(),
            });
        }
        if !outer.point.approx_eq_abs(&inner.coeffs[0], point_tol) {
            return Err(JetError::PointMismatch {
                expected: inner.coeffs[0].to_string(),
                found: outer.point.to_string(),
            });
        }
        let order = outer.order();
        let mut delta = inner.clone();
        delta.coeffs[0] = S::zero();
        let mut acc = Jet::constant(inner.point.clone(), outer.coeffs[order].clone(), order);
        for m in (0..order).rev() {
            acc = acc.mul_impl(&delta);
            acc.coeffs[0] += &outer.coeffs[m];
        }
        Ok(acc)
    }
}

#[derive(Serialize, Deserialize)]
struct JetRepr {
    order: usize,
    point: serde_json::Value,
    coeffs: Vec<serde_json::Value>,
}

impl<S: Scalar> Serialize for Jet<S> {
    fn serialize<Z: Serializer>(&self, serializer: Z) -> Result<Z::Ok, Z::Error> {
        JetRepr {
            order: self.order(),
            point: self.point.to_json(),
            coeffs: self.coeffs.iter().map(Scalar::to_json).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for Jet<S> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = JetRepr::deserialize(deserializer)?;
        if repr.coeffs.len() != repr.order + 1 {
            return Err(D::Error::custom(format!(
                "jet of order {} must hold {} coefficients, got {}",
                repr.order,
                repr.order + 1,
                repr.coeffs.len()
            )));
        }
        let point = S::from_json(&repr.point).map_err(D::Error::custom)?;
        let coeffs = repr
            .coeffs
            .iter()
            .map(S::from_json)
            .collect::<Result<Vec<_>, _>>()
            .map_err(D::Error::custom)?;
        Ok(Jet { point, coeffs })
    }
}

/// Recompute the n-th derivative of `f(g(x))` without partitions: convert
/// both sequences to jets (the outer one around the inner value `g_seq[0]`),
/// compose, and read back the order-n derivative.
pub fn oracle_nth_derivative<S: Scalar>(
    f_seq: &DerivativeSequence<S>,
    g_seq: &DerivativeSequence<S>,
    n: usize,
    point: &S,
) -> Result<S, JetError> {
    if f_seq.order() < n || g_seq.order() < n {
        return Err(JetError::SequenceTooShort {
            required: n,
            f_order: f_seq.order(),
            g_order: g_seq.order(),
        });
    }
    let inner = Jet::from_derivative_values(&g_seq.values()[..=n], point.clone());
    let outer = Jet::from_derivative_values(&f_seq.values()[..=n], g_seq.value(0).clone());
    let composed = Jet::compose(&outer, &inner)?;
    Ok(composed.coeff(n).mul_ref(&S::from_nat(&factorial(n))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::faa_di_bruno::all_derivatives_of_composition;
    use crate::scalar::{rational, Rational};
    use num_traits::Zero;
    use proptest::prelude::*;

    fn jet(point: i64, coeffs: &[(i64, i64)]) -> Jet<Rational> {
        Jet::new(
            rational(point, 1),
            coeffs.iter().map(|&(n, d)| rational(n, d)).collect(),
        )
    }

    fn int_jet(point: i64, coeffs: &[i64]) -> Jet<Rational> {
        Jet::new(
            rational(point, 1),
            coeffs.iter().map(|&n| rational(n, 1)).collect(),
        )
    }

    #[test]
    fn derivative_sequence_conversion_divides_by_factorials() {
        let d = DerivativeSequence::new(vec![rational(1, 1); 3]);
        let j = Jet::from_derivative_sequence(&d, rational(0, 1));
        assert_eq!(j.coeffs(), &[rational(1, 1), rational(1, 1), rational(1, 2)]);
        assert_eq!(j.to_derivative_sequence(), d);

        let zeros = DerivativeSequence::new(vec![rational(0, 1); 3]);
        let j = Jet::from_derivative_sequence(&zeros, rational(5, 1));
        assert!(j.coeffs().iter().all(|c| c.is_zero()));

        let constant = DerivativeSequence::new(vec![rational(9, 4)]);
        let j = Jet::from_derivative_sequence(&constant, rational(3, 1));
        assert_eq!(j.coeffs(), &[rational(9, 4)]);
        assert_eq!(j.to_derivative_sequence(), constant);
    }

    #[test]
    fn float_roundtrip_stays_within_tolerance() {
        let d = DerivativeSequence::new(vec![1.25f64, -3.5, 0.75, 10.0, -0.125]);
        let back = Jet::from_derivative_sequence(&d, 0.5).to_derivative_sequence();
        for (a, b) in d.values().iter().zip(back.values()) {
            assert!(a.approx_eq_rel(b, DEFAULT_SERIES_REL_TOL));
        }
    }

    #[test]
    fn cauchy_product_squares_one_plus_x() {
        let a = int_jet(0, &[1, 1, 0]);
        assert_eq!(a.mul(&a).unwrap(), int_jet(0, &[1, 2, 1]));

        let unit = int_jet(0, &[1, 0, 0]);
        assert_eq!(a.mul(&unit).unwrap(), a);

        let b = int_jet(0, &[1, 2, 3]);
        let c = int_jet(0, &[0, -2, 1]);
        assert_eq!(b.add(&c).unwrap(), int_jet(0, &[1, 0, 4]));
        assert_eq!(b.sub(&c).unwrap(), int_jet(0, &[1, 4, 2]));
    }

    #[test]
    fn compose_expands_the_square_of_one_plus_x() {
        // outer: y^2 around 1; inner: 1 + x around 0; result: (1+x)^2.
        let outer = int_jet(1, &[1, 2, 1]);
        let inner = int_jet(0, &[1, 1, 0]);
        let composed = Jet::compose(&outer, &inner).unwrap();
        assert_eq!(composed, int_jet(0, &[1, 2, 1]));
    }

    #[test]
    fn identity_is_neutral_for_composition() {
        let outer = jet(2, &[(1, 2), (3, 4), (5, 6), (7, 8)]);
        let inner_id = Jet::variable(rational(5, 1), 3);
        // outer must be expanded at the inner value, so rebase it to 5.
        let outer5 = Jet::new(rational(5, 1), outer.coeffs().to_vec());
        let composed = Jet::compose(&outer5, &inner_id).unwrap();
        assert_eq!(composed.coeffs(), outer.coeffs());
        assert_eq!(composed.point(), &rational(5, 1));

        let g = jet(0, &[(2, 1), (1, 3), (4, 5), (1, 7)]);
        let id_outer = Jet::variable(rational(2, 1), 3);
        assert_eq!(Jet::compose(&id_outer, &g).unwrap(), g);
    }

    #[test]
    fn exp_sin_and_int_pow_match_known_series() {
        let x = Jet::new(0.0f64, vec![0.0, 1.0, 0.0, 0.0]);
        let e = x.exp().unwrap();
        for (i, expected) in [1.0, 1.0, 0.5, 1.0 / 6.0].iter().enumerate() {
            assert!(e.coeff(i).approx_eq_rel(expected, DEFAULT_SERIES_REL_TOL));
        }
        let (s, _) = x.sin_cos().unwrap();
        for (i, expected) in [0.0, 1.0, 0.0, -1.0 / 6.0].iter().enumerate() {
            assert!(s.coeff(i).approx_eq_rel(expected, DEFAULT_SERIES_REL_TOL));
        }
        let cube = int_jet(0, &[1, 1, 0, 0]).int_pow(3).unwrap();
        assert_eq!(cube, int_jet(0, &[1, 3, 3, 1]));
    }

    #[test]
    fn elementary_series_match_closed_forms_to_order_12() {
        let order = 12;
        let x = Jet::variable(0.0f64, order);
        let e = x.exp().unwrap();
        let (s, c) = x.sin_cos().unwrap();
        let one_plus_x = Jet::new(0.0f64, {
            let mut v = vec![0.0; order + 1];
            v[0] = 1.0;
            v[1] = 1.0;
            v
        });
        let l = one_plus_x.ln().unwrap();
        let mut fact = 1.0f64;
        for k in 0..=order {
            if k > 1 {
                fact *= k as f64;
            }
            assert!(e.coeff(k).approx_eq_rel(&(1.0 / fact), DEFAULT_SERIES_REL_TOL));
            let sin_k = match k % 4 {
                0 | 2 => 0.0,
                1 => 1.0 / fact,
                _ => -1.0 / fact,
            };
            let cos_k = match k % 4 {
                1 | 3 => 0.0,
                0 => 1.0 / fact,
                _ => -1.0 / fact,
            };
            assert!(s.coeff(k).approx_eq_rel(&sin_k, DEFAULT_SERIES_REL_TOL), "sin {k}");
            assert!(c.coeff(k).approx_eq_rel(&cos_k, DEFAULT_SERIES_REL_TOL), "cos {k}");
            let ln_k = if k == 0 {
                0.0
            } else {
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign / k as f64
            };
            assert!(l.coeff(k).approx_eq_rel(&ln_k, DEFAULT_SERIES_REL_TOL), "ln {k}");
        }
    }

    #[test]
    fn transcendentals_refuse_the_exact_kind() {
        let j = int_jet(0, &[1, 1]);
        assert_eq!(j.exp(), Err(JetError::Kind { op: "exp" }));
        assert_eq!(j.ln(), Err(JetError::Kind { op: "ln" }));
        assert!(matches!(j.sin_cos(), Err(JetError::Kind { op: "sin/cos" })));
        // int_pow and div stay available in the exact kind.
        assert!(j.int_pow(-2).is_ok());
        assert!(j.div(&j).is_ok());
    }

    #[test]
    fn domain_errors_cover_ln_and_division() {
        let nonpositive = Jet::new(0.0f64, vec![-2.0, 1.0]);
        assert!(matches!(
            nonpositive.ln(),
            Err(JetError::Domain { op: "ln", .. })
        ));
        let zero_const = int_jet(0, &[0, 1]);
        assert!(matches!(
            int_jet(0, &[1, 1]).div(&zero_const),
            Err(JetError::Domain { op: "div", .. })
        ));
        assert!(matches!(
            zero_const.int_pow(-1),
            Err(JetError::Domain { op: "int_pow", .. })
        ));
    }

    #[test]
    fn mismatches_are_reported() {
        let a = int_jet(0, &[1, 2]);
        let b = int_jet(0, &[1, 2, 3]);
        assert!(matches!(a.add(&b), Err(JetError::OrderMismatch { .. })));
        let c = int_jet(1, &[1, 2]);
        assert!(matches!(a.mul(&c), Err(JetError::PointMismatch { .. })));
        // Composing around the wrong expansion point is the classic misuse.
        let outer = int_jet(7, &[1, 2]);
        let inner = int_jet(0, &[1, 1]);
        assert!(matches!(
            Jet::compose(&outer, &inner),
            Err(JetError::PointMismatch { .. })
        ));
    }

    #[test]
    fn float_compose_point_check_uses_the_tolerance() {
        let outer = Jet::new(1.0f64 + 1e-12, vec![1.0, 2.0, 1.0]);
        let inner = Jet::new(0.0f64, vec![1.0, 1.0, 0.0]);
        assert!(Jet::compose(&outer, &inner).is_ok());
        let far = Jet::new(1.5f64, vec![1.0, 2.0, 1.0]);
        assert!(matches!(
            Jet::compose(&far, &inner),
            Err(JetError::PointMismatch { .. })
        ));
        assert!(Jet::compose_with_tolerance(&far, &inner, 1.0).is_ok());
    }

    #[test]
    fn oracle_reproduces_chain_rule_and_identity() {
        let f = DerivativeSequence::new(vec![rational(1, 2); 4]);
        let g = DerivativeSequence::new(vec![
            rational(1, 2),
            rational(3, 1),
            rational(0, 1),
            rational(0, 1),
        ]);
        let point = rational(0, 1);
        assert_eq!(
            oracle_nth_derivative(&f, &g, 1, &point).unwrap(),
            rational(3, 2)
        );

        let id = DerivativeSequence::new(vec![
            rational(0, 1),
            rational(1, 1),
            rational(0, 1),
            rational(0, 1),
        ]);
        assert_eq!(oracle_nth_derivative(&id, &id, 1, &point).unwrap(), rational(1, 1));
        for n in 2..=3 {
            assert_eq!(oracle_nth_derivative(&id, &id, n, &point).unwrap(), rational(0, 1));
        }

        assert!(matches!(
            oracle_nth_derivative(&f, &g, 5, &point),
            Err(JetError::SequenceTooShort { required: 5, .. })
        ));
    }

    // Derivative sequence of a polynomial at a point, by formal
    // differentiation of the coefficient list plus Horner evaluation; used
    // as an input generator that shares no code with the jets.
    fn poly_derivative_sequence(
        coeffs: &[Rational],
        at: &Rational,
        order: usize,
    ) -> DerivativeSequence<Rational> {
        fn eval(coeffs: &[Rational], at: &Rational) -> Rational {
            let mut acc = rational(0, 1);
            for c in coeffs.iter().rev() {
                acc = acc * at.clone() + c.clone();
            }
            acc
        }
        let mut current = coeffs.to_vec();
        let mut values = Vec::with_capacity(order + 1);
        for _ in 0..=order {
            values.push(eval(&current, at));
            current = current
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| rational(i as i64, 1) * c.clone())
                .collect();
        }
        DerivativeSequence::new(values)
    }

    #[test]
    fn oracle_table_matches_the_closed_form_on_polynomials() {
        // f(y) = y^2 - 3y + 2, g(x) = 2x^2 + x at x = 1/2.
        let g_coeffs = [rational(0, 1), rational(1, 1), rational(2, 1)];
        let f_coeffs = [rational(2, 1), rational(-3, 1), rational(1, 1)];
        let point = rational(1, 2);
        let n = 3;
        let g_seq = poly_derivative_sequence(&g_coeffs, &point, n);
        let g_value = g_seq.value(0).clone();
        let f_seq = poly_derivative_sequence(&f_coeffs, &g_value, n);
        let table = all_derivatives_of_composition(&f_seq, &g_seq, n).unwrap();
        for m in 0..=n {
            let via_oracle = oracle_nth_derivative(&f_seq, &g_seq, m, &point).unwrap();
            assert_eq!(&via_oracle, table.value(m), "order {m}");
        }
    }

    #[test]
    fn jet_json_is_the_documented_schema() {
        let j = jet(0, &[(1, 2), (3, 1)]);
        assert_eq!(
            serde_json::to_string(&j).unwrap(),
            r#"{"order":1,"point":"0","coeffs":["1/2","3"]}"#
        );
        let back: Jet<Rational> =
            serde_json::from_str(r#"{"order":1,"point":"0","coeffs":["1/2","3"]}"#).unwrap();
        assert_eq!(back, j);
        let f: Jet<f64> = serde_json::from_str(r#"{"order":1,"point":0.5,"coeffs":[1.0,2.0]}"#).unwrap();
        assert_eq!(f.point(), &0.5);
        assert!(serde_json::from_str::<Jet<Rational>>(r#"{"order":2,"point":"0","coeffs":["1"]}"#).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ring_laws_hold_at_fixed_order_and_point(
            order in 0usize..=8,
            seed in proptest::array::uniform3(prop::collection::vec((-6i64..=6, 1i64..=6), 0..=9)),
        ) {
            let coeffs = |raw: &Vec<(i64, i64)>| -> Vec<Rational> {
                (0..=order)
                    .map(|i| raw.get(i).map(|&(n, d)| rational(n, d)).unwrap_or_else(|| rational(0, 1)))
                    .collect()
            };
            let p = rational(1, 3);
            let a = Jet::new(p.clone(), coeffs(&seed[0]));
            let b = Jet::new(p.clone(), coeffs(&seed[1]));
            let c = Jet::new(p.clone(), coeffs(&seed[2]));
            let unit = Jet::constant(p.clone(), rational(1, 1), order);

            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            prop_assert_eq!(
                a.mul(&b).unwrap().mul(&c).unwrap(),
                a.mul(&b.mul(&c).unwrap()).unwrap()
            );
            prop_assert_eq!(
                a.mul(&b.add(&c).unwrap()).unwrap(),
                a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
            );
            prop_assert_eq!(a.mul(&unit).unwrap(), a.clone());
        }

        #[test]
        fn division_undoes_multiplication(
            order in 0usize..=6,
            a_raw in prop::collection::vec((-6i64..=6, 1i64..=6), 0..=7),
            b_raw in prop::collection::vec((-6i64..=6, 1i64..=6), 0..=7),
            b0 in (1i64..=6, 1i64..=6),
        ) {
            let coeffs = |raw: &Vec<(i64, i64)>| -> Vec<Rational> {
                (0..=order)
                    .map(|i| raw.get(i).map(|&(n, d)| rational(n, d)).unwrap_or_else(|| rational(0, 1)))
                    .collect()
            };
            let p = rational(0, 1);
            let a = Jet::new(p.clone(), coeffs(&a_raw));
            let mut b_coeffs = coeffs(&b_raw);
            b_coeffs[0] = rational(b0.0, b0.1); // nonzero constant term
            let b = Jet::new(p, b_coeffs);
            let product = b.mul(&a).unwrap();
            prop_assert_eq!(product.div(&b).unwrap(), a);
        }

        #[test]
        fn composition_is_associative_when_points_chain(
            order in 0usize..=6,
            f_raw in prop::collection::vec((-5i64..=5, 1i64..=5), 0..=7),
            g_raw in prop::collection::vec((-5i64..=5, 1i64..=5), 0..=7),
            h_raw in prop::collection::vec((-5i64..=5, 1i64..=5), 0..=7),
        ) {
            let coeffs = |raw: &Vec<(i64, i64)>| -> Vec<Rational> {
                (0..=order)
                    .map(|i| raw.get(i).map(|&(n, d)| rational(n, d)).unwrap_or_else(|| rational(0, 1)))
                    .collect()
            };
            let t = rational(2, 1);
            let h = Jet::new(t, coeffs(&h_raw));
            let g = Jet::new(h.coeff(0).clone(), coeffs(&g_raw));
            let f = Jet::new(g.coeff(0).clone(), coeffs(&f_raw));
            let left = Jet::compose(&Jet::compose(&f, &g).unwrap(), &h).unwrap();
            let right = Jet::compose(&f, &Jet::compose(&g, &h).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }
    }
}
