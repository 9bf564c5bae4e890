//! A small single-variable expression language for supplying `f` and `g` as
//! formulas.
//!
//! Grammar:
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/") factor)*
//! factor := "-" factor | base ("^" intliteral)?
//! base   := number | "x" | name "(" expr ")" | "(" expr ")"
//! name   := "exp" | "ln" | "sin" | "cos"
//! number := integer | integer "/" integer      (rational literals)
//! ```
//!
//! Precedence notes, fixed by fiat: unary minus binds looser than `^`
//! (`-x^2` is `-(x^2)`), and `^` is non-associative (`x^2^3` is a parse
//! error). Exponents must be integer literals, possibly negated. Rational
//! literals are lexical: an integer immediately followed by `/` and a digit
//! (no whitespace) is one literal, so `7/2` is the number 7/2 while `7 / 2`
//! divides two integers; the two evaluate identically. There are no
//! floating-point literals and no implicit multiplication.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::jets::{Jet, JetError};
use crate::scalar::{Rational, Scalar};

/// Byte range of a node in the source string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    /// A nonnegative rational literal (the parser never produces negative
    /// ones; negation is a node).
    Number(Rational),
    /// The single variable `x`.
    Var,
    Neg(Box<Expr>),
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Call {
        func: Func,
        arg: Box<Expr>,
    },
}

/// A parsed expression. Equality is structural and ignores spans.
#[derive(Debug, Clone, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    /// Byte offset of the problem; at most the input length.
    pub offset: usize,
    pub message: String,
    pub expected: Option<&'static str>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: {}", self.offset, self.message)?;
        if let Some(hint) = self.expected {
            write!(f, " (expected {hint})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalErrorKind {
    /// A transcendental was requested in the exact kind.
    KindError,
    /// Division by zero constant term, ln of a nonpositive value, and the
    /// like.
    DomainError,
    /// The `^` exponent subtree is not a (possibly negated) integer literal.
    InvalidExponent,
}

/// Evaluation failure, carrying the offending subexpression's span.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} (at bytes {}..{} of the expression)", .span.start, .span.end)]
pub struct EvalError {
    pub span: Span,
    pub kind: EvalErrorKind,
    pub message: String,
}

const MAX_DEPTH: usize = 500;

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    depth: usize,
}

impl<'a> Parser<'a> {
    fn error(
        &self,
        offset: usize,
        message: impl Into<String>,
        expected: Option<&'static str>,
    ) -> ParseError {
        ParseError {
            offset,
            message: message.into(),
            expected,
        }
    }

    fn skip_ws(&mut self) {
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_whitespace())
        {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn parse_expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_term()?;
        loop {
            self.skip_ws();
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.parse_term()?;
            let span = Span {
                start: lhs.span.start,
                end: rhs.span.end,
            };
            lhs = Expr {
                kind: ExprKind::Binary {
                    op,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
                span,
            };
        }
    }

    fn parse_term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_factor()?;
        loop {
            self.skip_ws();
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.parse_factor()?;
            let span = Span {
                start: lhs.span.start,
                end: rhs.span.end,
            };
            lhs = Expr {
                kind: ExprKind::Binary {
                    op,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
                span,
            };
        }
    }

    fn parse_factor(&mut self) -> Result<Expr, ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            let err = self.error(
                self.pos,
                format!("expression nests deeper than {MAX_DEPTH} levels"),
                None,
            );
            self.depth -= 1;
            return Err(err);
        }
        let result = self.parse_factor_inner();
        self.depth -= 1;
        result
    }

    fn parse_factor_inner(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        if self.peek() == Some(b'-') {
            let start = self.pos;
            self.pos += 1;
            let inner = self.parse_factor()?;
            let span = Span {
                start,
                end: inner.span.end,
            };
            return Ok(Expr {
                kind: ExprKind::Neg(Box::new(inner)),
                span,
            });
        }
        let base = self.parse_base()?;
        self.skip_ws();
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let exponent = self.parse_exponent()?;
        self.skip_ws();
        if self.peek() == Some(b'^') {
            return Err(self.error(
                self.pos,
                "'^' is non-associative; parenthesize the base",
                None,
            ));
        }
        let span = Span {
            start: base.span.start,
            end: exponent.span.end,
        };
        Ok(Expr {
            kind: ExprKind::Binary {
                op: BinOp::Pow,
                lhs: Box::new(base),
                rhs: Box::new(exponent),
            },
            span,
        })
    }

    /// A bare (possibly negated) integer; rational literals are not allowed
    /// here, so `x^2/3` is `(x^2)/3`.
    fn parse_exponent(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let negated = self.peek() == Some(b'-');
        if negated {
            self.pos += 1;
            self.skip_ws();
        }
        let digits_start = self.pos;
        let digits = self.read_digits();
        if digits.is_empty() {
            return Err(self.error(
                self.pos,
                "'^' takes an integer literal exponent",
                Some("integer literal"),
            ));
        }
        let value: BigInt = digits.parse().expect("digits parse as BigInt");
        let number = Expr {
            kind: ExprKind::Number(Rational::from_integer(value)),
            span: Span {
                start: digits_start,
                end: self.pos,
            },
        };
        if negated {
            Ok(Expr {
                kind: ExprKind::Neg(Box::new(number)),
                span: Span {
                    start,
                    end: self.pos,
                },
            })
        } else {
            Ok(number)
        }
    }

    fn parse_base(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.error(self.pos, "unexpected end of input", Some("expression"))),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.parse_expr()?;
                self.skip_ws();
                if self.peek() != Some(b')') {
                    return Err(self.error(self.pos, "unclosed parenthesis", Some("')'")));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b) if b.is_ascii_digit() => self.parse_number(),
            Some(b) if b.is_ascii_lowercase() => self.parse_name(),
            Some(b) => Err(self.error(
                self.pos,
                format!("unexpected character {:?}", b as char),
                Some("expression"),
            )),
        }
    }

    fn read_digits(&mut self) -> &'a str {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits")
    }

    fn parse_number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let numer: BigInt = self.read_digits().parse().expect("digits parse as BigInt");
        // Adjacent "/digit" makes this a rational literal; anything else
        // leaves the "/" for the division operator.
        let denom = if self.peek() == Some(b'/')
            && self
                .bytes
                .get(self.pos + 1)
                .is_some_and(|b| b.is_ascii_digit())
        {
            self.pos += 1;
            let denom_start = self.pos;
            let denom: BigInt = self.read_digits().parse().expect("digits parse as BigInt");
            if denom.is_zero() {
                return Err(self.error(
                    denom_start,
                    "zero denominator in rational literal",
                    Some("positive integer"),
                ));
            }
            denom
        } else {
            BigInt::from(1)
        };
        Ok(Expr {
            kind: ExprKind::Number(Rational::new(numer, denom)),
            span: Span {
                start,
                end: self.pos,
            },
        })
    }

    fn parse_name(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_lowercase()) {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii letters");
        if name == "x" {
            return Ok(Expr {
                kind: ExprKind::Var,
                span: Span {
                    start,
                    end: self.pos,
                },
            });
        }
        let func = match name {
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            _ => {
                return Err(self.error(
                    start,
                    format!("unknown function {name:?}"),
                    Some("x, exp, ln, sin, or cos"),
                ))
            }
        };
        self.skip_ws();
        if self.peek() != Some(b'(') {
            return Err(self.error(self.pos, format!("{name} takes an argument"), Some("'('")));
        }
        self.pos += 1;
        let arg = self.parse_expr()?;
        self.skip_ws();
        if self.peek() != Some(b')') {
            return Err(self.error(self.pos, "unclosed function argument", Some("')'")));
        }
        self.pos += 1;
        Ok(Expr {
            kind: ExprKind::Call {
                func,
                arg: Box::new(arg),
            },
            span: Span {
                start,
                end: self.pos,
            },
        })
    }
}

/// Parse a source string into an expression tree. Any byte string yields
/// either an `Expr` or a `ParseError`; the parser never panics.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let mut parser = Parser {
        bytes: src.as_bytes(),
        pos: 0,
        depth: 0,
    };
    let expr = parser.parse_expr()?;
    parser.skip_ws();
    if parser.pos != parser.bytes.len() {
        return Err(parser.error(parser.pos, "unexpected trailing input", None));
    }
    Ok(expr)
}

// Context a node is printed in; a node whose own level is lower needs
// parentheses.
#[derive(PartialEq, PartialOrd, Clone, Copy)]
enum Level {
    Sum = 0,
    Product = 1,
    Prefix = 2,
    Atom = 3,
}

impl Expr {
    fn level(&self) -> Level {
        match &self.kind {
            ExprKind::Binary { op: BinOp::Add, .. } | ExprKind::Binary { op: BinOp::Sub, .. } => {
                Level::Sum
            }
            ExprKind::Binary { op: BinOp::Mul, .. } | ExprKind::Binary { op: BinOp::Div, .. } => {
                Level::Product
            }
            ExprKind::Binary { op: BinOp::Pow, .. } | ExprKind::Neg(_) => Level::Prefix,
            ExprKind::Number(r) if r.is_negative() => Level::Prefix,
            ExprKind::Number(_) | ExprKind::Var | ExprKind::Call { .. } => Level::Atom,
        }
    }

    fn write(&self, out: &mut String, context: Level) {
        let needs_parens = self.level() < context;
        if needs_parens {
            out.push('(');
        }
        match &self.kind {
            ExprKind::Number(r) => out.push_str(&r.to_string()),
            ExprKind::Var => out.push('x'),
            ExprKind::Neg(inner) => {
                out.push('-');
                inner.write(out, Level::Prefix);
            }
            ExprKind::Binary { op, lhs, rhs } => match op {
                BinOp::Add | BinOp::Sub => {
                    lhs.write(out, Level::Sum);
                    out.push_str(if *op == BinOp::Add { " + " } else { " - " });
                    rhs.write(out, Level::Product);
                }
                BinOp::Mul | BinOp::Div => {
                    lhs.write(out, Level::Product);
                    out.push_str(if *op == BinOp::Mul { " * " } else { " / " });
                    rhs.write(out, Level::Prefix);
                }
                BinOp::Pow => {
                    lhs.write(out, Level::Atom);
                    out.push('^');
                    // Exponents print bare: "x^-2" re-parses, "x^(-2)" would not.
                    match &rhs.kind {
                        ExprKind::Number(r) => out.push_str(&r.to_string()),
                        ExprKind::Neg(inner) => {
                            out.push('-');
                            inner.write(out, Level::Atom);
                        }
                        _ => rhs.write(out, Level::Atom),
                    }
                }
            },
            ExprKind::Call { func, arg } => {
                out.push_str(func.name());
                out.push('(');
                arg.write(out, Level::Sum);
                out.push(')');
            }
        }
        if needs_parens {
            out.push(')');
        }
    }

    /// Render back to source form. Re-parsing the result of a parsed
    /// expression yields a structurally identical tree.
    pub fn pretty(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, Level::Sum);
        out
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty())
    }
}

fn jet_error_at(err: JetError, span: Span) -> EvalError {
    let kind = match &err {
        JetError::Kind { .. } => EvalErrorKind::KindError,
        _ => EvalErrorKind::DomainError,
    };
    EvalError {
        span,
        kind,
        message: err.to_string(),
    }
}

fn integer_exponent(expr: &Expr) -> Result<i64, EvalError> {
    let invalid = |message: String| EvalError {
        span: expr.span,
        kind: EvalErrorKind::InvalidExponent,
        message,
    };
    let (negated, value) = match &expr.kind {
        ExprKind::Number(r) => (false, r),
        ExprKind::Neg(inner) => match &inner.kind {
            ExprKind::Number(r) => (true, r),
            _ => return Err(invalid("exponent must be an integer literal".into())),
        },
        _ => return Err(invalid("exponent must be an integer literal".into())),
    };
    if !value.is_integer() {
        return Err(invalid(format!("exponent {value} is not an integer")));
    }
    let magnitude = value
        .numer()
        .to_i64()
        .ok_or_else(|| invalid(format!("exponent {value} is out of range")))?;
    Ok(if negated { -magnitude } else { magnitude })
}

/// Evaluate an expression into a jet of the given order around `point`,
/// using only the truncated-series operations. The variable becomes the
/// identity jet `[point, 1, 0, ..., 0]`.
///
/// The exact kind rejects exp/ln/sin/cos with a kind error; domain errors
/// (division by a jet whose value at the point is zero, ln of a nonpositive
/// value) carry the offending subexpression's span either way.
pub fn eval_jet<S: Scalar>(expr: &Expr, point: &S, order: usize) -> Result<Jet<S>, EvalError> {
    match &expr.kind {
        ExprKind::Number(r) => Ok(Jet::constant(point.clone(), S::from_rational(r), order)),
        ExprKind::Var => Ok(Jet::variable(point.clone(), order)),
        ExprKind::Neg(inner) => {
            let jet = eval_jet(inner, point, order)?;
            Ok(jet.scale(&-S::one()))
        }
        ExprKind::Binary { op, lhs, rhs } => {
            if *op == BinOp::Pow {
                let base = eval_jet(lhs, point, order)?;
                let exponent = integer_exponent(rhs)?;
                return base
                    .int_pow(exponent)
                    .map_err(|e| jet_error_at(e, expr.span));
            }
            let a = eval_jet(lhs, point, order)?;
            let b = eval_jet(rhs, point, order)?;
            let result = match op {
                BinOp::Add => a.add(&b),
                BinOp::Sub => a.sub(&b),
                BinOp::Mul => a.mul(&b),
                BinOp::Div => a.div(&b),
                BinOp::Pow => unreachable!("handled above"),
            };
            result.map_err(|e| jet_error_at(e, expr.span))
        }
        ExprKind::Call { func, arg } => {
            let jet = eval_jet(arg, point, order)?;
            let result = match func {
                Func::Exp => jet.exp(),
                Func::Ln => jet.ln(),
                Func::Sin => jet.sin_cos().map(|(s, _)| s),
                Func::Cos => jet.sin_cos().map(|(_, c)| c),
            };
            result.map_err(|e| jet_error_at(e, expr.span))
        }
    }
}
