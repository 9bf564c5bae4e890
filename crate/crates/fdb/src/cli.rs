//! The command implementations behind the `fdb` binary.
//!
//! Each command writes either human-readable text or (with `--json`) exactly
//! one JSON object to the given writer; diagnostics never go there, they are
//! the binary's job and land on standard error. Exit codes are exhaustive
//! and disjoint: 0 success, 1 input error, 2 resource cap, 3 consistency
//! failure.

use std::collections::HashMap;
use std::io::Write;
use std::time::Instant;

use clap::ValueEnum;
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::combinatorics::{
    bell_number, enumerate_block_profiles, enumerate_set_partitions_with_cap,
    extend_partition, profile_count, CombinatoricsError, SetPartition, DEFAULT_MAX_ENUM,
};
use crate::exprlang::{self, Expr};
use crate::faa_di_bruno::{
    derivative_of_composition_closed_form_with_cap,
    derivative_of_composition_combinatorial_with_cap, DerivativeSequence, EvalError,
    DEFAULT_MAX_ORDER,
};
use crate::jets::{oracle_nth_derivative, DEFAULT_ORACLE_REL_TOL};
use crate::scalar::{rational, Rational, Scalar};

pub const ENV_MAX_ENUM: &str = "FDB_MAX_ENUM";
pub const ENV_MAX_ORDER: &str = "FDB_MAX_ORDER";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Cap(String),
    #[error("{0}")]
    Consistency(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 1 input error, 2 resource cap, 3 consistency failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io(_) => 1,
            CliError::Cap(_) => 2,
            CliError::Consistency(_) => 3,
        }
    }
}

fn cap_error(err: CombinatoricsError) -> CliError {
    match err {
        CombinatoricsError::CapExceeded { .. } => CliError::Cap(err.to_string()),
        other => CliError::Input(other.to_string()),
    }
}

fn eval_error(err: EvalError) -> CliError {
    match err {
        EvalError::CapExceeded { .. } => CliError::Cap(err.to_string()),
        EvalError::OrderMismatch { .. } => CliError::Input(err.to_string()),
    }
}

/// Resource guards, resolved from flags, environment, then defaults.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_enum: usize,
    pub max_order: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_enum: DEFAULT_MAX_ENUM,
            max_order: DEFAULT_MAX_ORDER,
        }
    }
}

impl Limits {
    /// Flags win over environment variables, which win over defaults.
    pub fn resolve(flag_max_enum: Option<usize>, flag_max_order: Option<usize>) -> Result<Self, CliError> {
        let env = |name: &str| std::env::var(name).ok();
        Limits::resolve_with(
            flag_max_enum,
            flag_max_order,
            env(ENV_MAX_ENUM).as_deref(),
            env(ENV_MAX_ORDER).as_deref(),
        )
    }

    fn resolve_with(
        flag_max_enum: Option<usize>,
        flag_max_order: Option<usize>,
        env_max_enum: Option<&str>,
        env_max_order: Option<&str>,
    ) -> Result<Self, CliError> {
        let parse_env = |name: &str, value: Option<&str>| -> Result<Option<usize>, CliError> {
            value
                .map(|s| {
                    s.trim().parse::<usize>().map_err(|_| {
                        CliError::Input(format!("{name} must be a nonnegative integer, got {s:?}"))
                    })
                })
                .transpose()
        };
        let defaults = Limits::default();
        Ok(Limits {
            max_enum: flag_max_enum
                .or(parse_env(ENV_MAX_ENUM, env_max_enum)?)
                .unwrap_or(defaults.max_enum),
            max_order: flag_max_order
                .or(parse_env(ENV_MAX_ORDER, env_max_order)?)
                .unwrap_or(defaults.max_order),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Combinatorial,
    Closed,
    Oracle,
    All,
}

impl Method {
    fn label(self) -> &'static str {
        match self {
            Method::Combinatorial => "combinatorial",
            Method::Closed => "closed",
            Method::Oracle => "oracle",
            Method::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Exact,
    Float,
}

impl Kind {
    fn label(self) -> &'static str {
        match self {
            Kind::Exact => "exact",
            Kind::Float => "float",
        }
    }
}

fn output_record(command: &str, inputs: Value, result: Value, started: Instant) -> Value {
    json!({
        "command": command,
        "inputs": inputs,
        "result": result,
        "elapsed_ns": started.elapsed().as_nanos() as u64,
    })
}

fn emit_json(out: &mut impl Write, record: &Value) -> Result<(), CliError> {
    writeln!(out, "{record}")?;
    Ok(())
}

/// `fdb partitions <n>`: list all partitions of `{1, ..., n}` with a
/// count/Bell cross-check footer.
pub fn cmd_partitions(
    n: usize,
    json: bool,
    limits: Limits,
    out: &mut impl Write,
) -> Result<(), CliError> {
    let started = Instant::now();
    let bell = bell_number(n);
    if json {
        let partitions: Vec<SetPartition> = enumerate_set_partitions_with_cap(n, limits.max_enum)
            .map_err(cap_error)?
            .collect();
        let count = partitions.len();
        let ok = BigUint::from(count) == bell;
        let record = output_record(
            "partitions",
            json!({ "n": n, "max_enum": limits.max_enum }),
            json!({
                "partitions": partitions,
                "count": count,
                "bell": bell.to_string(),
                "ok": ok,
            }),
            started,
        );
        emit_json(out, &record)?;
        if !ok {
            return Err(CliError::Consistency(format!(
                "enumerated {count} partitions but Bell({n}) = {bell}"
            )));
        }
        return Ok(());
    }
    let mut count = 0usize;
    for p in enumerate_set_partitions_with_cap(n, limits.max_enum).map_err(cap_error)? {
        writeln!(out, "{p}")?;
        count += 1;
    }
    let ok = BigUint::from(count) == bell;
    writeln!(
        out,
        "count={count} bell={bell} {}",
        if ok { "OK" } else { "MISMATCH" }
    )?;
    if !ok {
        return Err(CliError::Consistency(format!(
            "enumerated {count} partitions but Bell({n}) = {bell}"
        )));
    }
    Ok(())
}

/// `fdb profiles <n>`: list block profiles with their partition counts and a
/// sum/Bell cross-check footer.
pub fn cmd_profiles(
    n: usize,
    json: bool,
    limits: Limits,
    out: &mut impl Write,
) -> Result<(), CliError> {
    let started = Instant::now();
    if n > limits.max_order {
        return Err(CliError::Cap(format!(
            "n = {n} exceeds the profile cap {}; raise --max-order to enumerate anyway",
            limits.max_order
        )));
    }
    let rows: Vec<(crate::combinatorics::BlockProfile, BigUint)> = enumerate_block_profiles(n)
        .into_iter()
        .map(|pf| {
            let count = profile_count(&pf);
            (pf, count)
        })
        .collect();
    let sum: BigUint = rows.iter().map(|(_, c)| c.clone()).sum();
    let bell = bell_number(n);
    let ok = sum == bell;
    if json {
        let record = output_record(
            "profiles",
            json!({ "n": n, "max_order": limits.max_order }),
            json!({
                "profiles": rows
                    .iter()
                    .map(|(pf, c)| json!({ "profile": pf, "count": c.to_string() }))
                    .collect::<Vec<_>>(),
                "sum": sum.to_string(),
                "bell": bell.to_string(),
                "ok": ok,
            }),
            started,
        );
        emit_json(out, &record)?;
    } else {
        for (pf, count) in &rows {
            writeln!(out, "k={pf} count={count}")?;
        }
        writeln!(
            out,
            "sum={sum} bell={bell} {}",
            if ok { "OK" } else { "MISMATCH" }
        )?;
    }
    if !ok {
        return Err(CliError::Consistency(format!(
            "profile counts sum to {sum} but Bell({n}) = {bell}"
        )));
    }
    Ok(())
}

pub struct DeriveArgs<'a> {
    pub f: &'a str,
    pub g: &'a str,
    pub at: &'a str,
    pub n: usize,
    pub method: Method,
    pub kind: Kind,
}

fn parse_expression(flag: &str, src: &str) -> Result<Expr, CliError> {
    exprlang::parse(src).map_err(|e| CliError::Input(format!("--{flag} {src:?}: {e}")))
}

fn methods_to_run(method: Method) -> Vec<Method> {
    match method {
        Method::All => vec![Method::Combinatorial, Method::Closed, Method::Oracle],
        single => vec![single],
    }
}

fn derive_values<S: Scalar>(
    f_expr: &Expr,
    g_expr: &Expr,
    args: &DeriveArgs<'_>,
    limits: Limits,
) -> Result<Vec<(Method, S)>, CliError> {
    let point = S::parse_text(args.at)
        .map_err(|e| CliError::Input(format!("--at {:?}: {e}", args.at)))?;
    let g_jet = exprlang::eval_jet(g_expr, &point, args.n)
        .map_err(|e| CliError::Input(format!("--g {:?}: {e}", args.g)))?;
    let g_seq = g_jet.to_derivative_sequence();
    let f_jet = exprlang::eval_jet(f_expr, g_seq.value(0), args.n)
        .map_err(|e| CliError::Input(format!("--f {:?} (evaluated at g({}) = {}): {e}", args.f, args.at, g_seq.value(0))))?;
    let f_seq = f_jet.to_derivative_sequence();

    let mut values = Vec::new();
    for method in methods_to_run(args.method) {
        let value = match method {
            Method::Combinatorial => derivative_of_composition_combinatorial_with_cap(
                &f_seq,
                &g_seq,
                args.n,
                limits.max_enum,
            )
            .map_err(eval_error)?,
            Method::Closed => derivative_of_composition_closed_form_with_cap(
                &f_seq,
                &g_seq,
                args.n,
                limits.max_order,
            )
            .map_err(eval_error)?,
            Method::Oracle => oracle_nth_derivative(&f_seq, &g_seq, args.n, &point)
                .map_err(|e| CliError::Input(e.to_string()))?,
            Method::All => unreachable!("expanded above"),
        };
        values.push((method, value));
    }
    Ok(values)
}

fn values_agree<S: Scalar>(values: &[(Method, S)]) -> bool {
    values
        .windows(2)
        .all(|w| w[0].1.approx_eq_rel(&w[1].1, DEFAULT_ORACLE_REL_TOL))
}

fn report_derive<S: Scalar>(
    args: &DeriveArgs<'_>,
    values: &[(Method, S)],
    json: bool,
    started: Instant,
    out: &mut impl Write,
) -> Result<(), CliError> {
    let check_agreement = args.method == Method::All;
    let agree = values_agree(values);
    if json {
        let mut value_map = serde_json::Map::new();
        for (method, value) in values {
            value_map.insert(method.label().to_string(), value.to_json());
        }
        let mut result = json!({
            "values": Value::Object(value_map),
            "kind": args.kind.label(),
        });
        if check_agreement {
            result["agree"] = Value::Bool(agree);
        }
        let record = output_record(
            "derive",
            json!({
                "f": args.f,
                "g": args.g,
                "at": args.at,
                "n": args.n,
                "method": args.method.label(),
                "kind": args.kind.label(),
            }),
            result,
            started,
        );
        emit_json(out, &record)?;
    } else {
        for (method, value) in values {
            writeln!(out, "{} = {}", method.label(), value.to_display_string())?;
        }
        if check_agreement {
            let verdict = match (agree, args.kind) {
                (true, Kind::Exact) => "agreement: exact".to_string(),
                (true, Kind::Float) => {
                    format!("agreement: within {DEFAULT_ORACLE_REL_TOL:e} relative")
                }
                (false, _) => "agreement: METHODS DISAGREE".to_string(),
            };
            writeln!(out, "{verdict}")?;
        }
    }
    if check_agreement && !agree {
        return Err(CliError::Consistency(
            "evaluation methods disagree; this indicates an internal inconsistency".into(),
        ));
    }
    Ok(())
}

/// `fdb derive`: the order-n derivative of `f(g(x))` at a point, by any or
/// all of the three routes.
pub fn cmd_derive(
    args: &DeriveArgs<'_>,
    json: bool,
    limits: Limits,
    out: &mut impl Write,
) -> Result<(), CliError> {
    let started = Instant::now();
    if args.n > limits.max_order {
        return Err(CliError::Cap(format!(
            "order {} exceeds the cap {}; raise --max-order to evaluate anyway",
            args.n, limits.max_order
        )));
    }
    let runs_combinatorial = matches!(args.method, Method::Combinatorial | Method::All);
    if runs_combinatorial && args.n > limits.max_enum {
        return Err(CliError::Cap(format!(
            "order {} exceeds the enumeration cap {} for the combinatorial method; raise --max-enum or pick --method closed",
            args.n, limits.max_enum
        )));
    }
    let f_expr = parse_expression("f", args.f)?;
    let g_expr = parse_expression("g", args.g)?;
    match args.kind {
        Kind::Exact => {
            let values = derive_values::<Rational>(&f_expr, &g_expr, args, limits)?;
            report_derive(args, &values, json, started, out)
        }
        Kind::Float => {
            let values = derive_values::<f64>(&f_expr, &g_expr, args, limits)?;
            report_derive(args, &values, json, started, out)
        }
    }
}

/// One property suite's outcome.
#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
}

fn random_sequence(rng: &mut ChaCha8Rng, order: usize) -> DerivativeSequence<Rational> {
    DerivativeSequence::from_fn(order, |_| {
        rational(rng.gen_range(-5..=5), rng.gen_range(1..=5))
    })
}

/// The executable induction step: extensions of all partitions of
/// `{1, ..., n}` cover the next level exactly once, for n below `n_max`.
fn bijection_coverage_suite(n_max: usize, inject_fault: bool) -> SuiteOutcome {
    let mut checked = 0usize;
    for n in 0..n_max {
        let mut seen: HashMap<SetPartition, usize> = HashMap::new();
        for p in enumerate_set_partitions_with_cap(n, usize::MAX).expect("uncapped") {
            let mut extensions = extend_partition(&p);
            if inject_fault && n + 1 == n_max {
                // Test-only hook: drop one extension so coverage fails.
                extensions.pop();
            }
            for q in extensions {
                *seen.entry(q).or_insert(0) += 1;
            }
        }
        for q in enumerate_set_partitions_with_cap(n + 1, usize::MAX).expect("uncapped") {
            checked += 1;
            if seen.get(&q) != Some(&1) {
                return SuiteOutcome {
                    name: "bijection-coverage",
                    passed: false,
                    details: format!(
                        "partition {q} of {{1..{}}} covered {} times, expected exactly once",
                        n + 1,
                        seen.get(&q).copied().unwrap_or(0)
                    ),
                };
            }
        }
        if seen.len()
            != enumerate_set_partitions_with_cap(n + 1, usize::MAX)
                .expect("uncapped")
                .count()
        {
            return SuiteOutcome {
                name: "bijection-coverage",
                passed: false,
                details: format!("extension of level {n} produced extra partitions"),
            };
        }
    }
    SuiteOutcome {
        name: "bijection-coverage",
        passed: true,
        details: format!("levels 0..{n_max}, {checked} partitions covered exactly once"),
    }
}

/// Sum of profile counts equals Bell(n) equals the enumeration length.
fn count_identity_suite(n_max: usize, inject_fault: bool) -> SuiteOutcome {
    for n in 0..n_max {
        let mut bell = bell_number(n);
        if inject_fault && n + 1 == n_max {
            bell += 1u32;
        }
        let enumerated = enumerate_set_partitions_with_cap(n, usize::MAX)
            .expect("uncapped")
            .count();
        if BigUint::from(enumerated) != bell {
            return SuiteOutcome {
                name: "count-identity",
                passed: false,
                details: format!("enumerated {enumerated} partitions of n={n}, Bell says {bell}"),
            };
        }
        let profile_sum: BigUint = enumerate_block_profiles(n).iter().map(profile_count).sum();
        if profile_sum != bell {
            return SuiteOutcome {
                name: "count-identity",
                passed: false,
                details: format!("profile counts for n={n} sum to {profile_sum}, Bell says {bell}"),
            };
        }
    }
    SuiteOutcome {
        name: "count-identity",
        passed: true,
        details: format!("n = 0..{n_max}, enumeration and profile sums match Bell"),
    }
}

/// Combinatorial, closed-form and oracle evaluation agree exactly on seeded
/// random rational inputs.
fn evaluator_equivalence_suite(
    n_max: usize,
    trials: usize,
    seed: u64,
    inject_fault: bool,
) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0usize;
    for n in 1..=n_max {
        for trial in 0..trials {
            let f_seq = random_sequence(&mut rng, n);
            let g_seq = random_sequence(&mut rng, n);
            let point = rational(rng.gen_range(-3..=3), rng.gen_range(1..=3));
            let comb = derivative_of_composition_combinatorial_with_cap(&f_seq, &g_seq, n, n_max)
                .expect("orders match");
            let mut closed =
                derivative_of_composition_closed_form_with_cap(&f_seq, &g_seq, n, n_max)
                    .expect("orders match");
            if inject_fault && n == 1 && trial == 0 {
                closed += &rational(1, 1);
            }
            let oracle = oracle_nth_derivative(&f_seq, &g_seq, n, &point).expect("orders match");
            checked += 1;
            if comb != closed || comb != oracle {
                return SuiteOutcome {
                    name: "evaluator-equivalence",
                    passed: false,
                    details: format!(
                        "order {n} trial {trial}: combinatorial {comb}, closed {closed}, oracle {oracle}"
                    ),
                };
            }
        }
    }
    SuiteOutcome {
        name: "evaluator-equivalence",
        passed: true,
        details: format!("orders 1..={n_max}, {checked} seeded triples agree exactly"),
    }
}

/// Run the three property suites. Deterministic for a fixed seed.
/// `inject_fault` is a test-only hook that breaks each suite on purpose so
/// suite sensitivity itself can be exercised.
pub fn run_check(n_max: usize, trials: usize, seed: u64, inject_fault: bool) -> Vec<SuiteOutcome> {
    vec![
        bijection_coverage_suite(n_max, inject_fault),
        count_identity_suite(n_max, inject_fault),
        evaluator_equivalence_suite(n_max, trials, seed, inject_fault),
    ]
}

/// `fdb check`: run the property suites; any failure exits 3.
pub fn cmd_check(
    n_max: usize,
    trials: usize,
    seed: u64,
    inject_fault: bool,
    json: bool,
    out: &mut impl Write,
) -> Result<(), CliError> {
    let started = Instant::now();
    let outcomes = run_check(n_max, trials, seed, inject_fault);
    let passed = outcomes.iter().all(|o| o.passed);
    if json {
        let record = output_record(
            "check",
            json!({ "n_max": n_max, "trials": trials, "seed": seed }),
            json!({
                "suites": outcomes
                    .iter()
                    .map(|o| json!({
                        "name": o.name,
                        "passed": o.passed,
                        "details": o.details,
                    }))
                    .collect::<Vec<_>>(),
                "passed": passed,
            }),
            started,
        );
        emit_json(out, &record)?;
    } else {
        for o in &outcomes {
            writeln!(
                out,
                "{}: {} ({})",
                o.name,
                if o.passed { "PASS" } else { "FAIL" },
                o.details
            )?;
        }
        writeln!(out, "{}", if passed { "all suites passed" } else { "SUITE FAILURES" })?;
    }
    if !passed {
        let failed: Vec<&str> = outcomes
            .iter()
            .filter(|o| !o.passed)
            .map(|o| o.name)
            .collect();
        return Err(CliError::Consistency(format!(
            "property suites failed: {}",
            failed.join(", ")
        )));
    }
    Ok(())
}

struct BenchRow {
    method: &'static str,
    terms: Option<String>,
    wall_ns: Vec<u64>,
}

impl BenchRow {
    fn best_ns(&self) -> u64 {
        self.wall_ns.iter().copied().min().unwrap_or(0)
    }
}

/// `fdb bench`: time the three routes at order n on fixed seeded rational
/// inputs and report wall times plus term counts (Bell(n) vs p(n)).
pub fn cmd_bench(
    n: usize,
    reps: usize,
    json: bool,
    limits: Limits,
    out: &mut impl Write,
) -> Result<(), CliError> {
    let started = Instant::now();
    if n > limits.max_order {
        return Err(CliError::Cap(format!(
            "order {n} exceeds the cap {}; raise --max-order to bench anyway",
            limits.max_order
        )));
    }
    if n > limits.max_enum {
        return Err(CliError::Cap(format!(
            "order {n} exceeds the enumeration cap {}; the combinatorial route cannot be benched above it",
            limits.max_enum
        )));
    }
    if reps == 0 {
        return Err(CliError::Input("--reps must be at least 1".into()));
    }
    // Fixed seed: bench inputs are part of the reproducible output.
    let mut rng = ChaCha8Rng::seed_from_u64(0x0fdb);
    let f_seq = random_sequence(&mut rng, n);
    let g_seq = random_sequence(&mut rng, n);
    let point = rational(0, 1);

    let time_method = |compute: &dyn Fn() -> Rational| -> (Vec<u64>, Rational) {
        let mut wall = Vec::with_capacity(reps);
        let mut value = None;
        for _ in 0..reps {
            let t = Instant::now();
            let v = compute();
            wall.push(t.elapsed().as_nanos() as u64);
            value = Some(v);
        }
        (wall, value.expect("reps >= 1"))
    };

    let (comb_wall, comb_value) = time_method(&|| {
        derivative_of_composition_combinatorial_with_cap(&f_seq, &g_seq, n, limits.max_enum)
            .expect("cap checked above")
    });
    let (closed_wall, closed_value) = time_method(&|| {
        derivative_of_composition_closed_form_with_cap(&f_seq, &g_seq, n, limits.max_order)
            .expect("cap checked above")
    });
    let (oracle_wall, oracle_value) = time_method(&|| {
        oracle_nth_derivative(&f_seq, &g_seq, n, &point).expect("orders match")
    });

    let agree = comb_value == closed_value && comb_value == oracle_value;
    let rows = [
        BenchRow {
            method: "combinatorial",
            terms: Some(bell_number(n).to_string()),
            wall_ns: comb_wall,
        },
        BenchRow {
            method: "closed",
            terms: Some(enumerate_block_profiles(n).len().to_string()),
            wall_ns: closed_wall,
        },
        BenchRow {
            method: "oracle",
            terms: None,
            wall_ns: oracle_wall,
        },
    ];

    if json {
        let record = output_record(
            "bench",
            json!({ "n": n, "reps": reps, "seed": 0x0fdb }),
            json!({
                "methods": rows
                    .iter()
                    .map(|r| json!({
                        "method": r.method,
                        "terms": r.terms,
                        "wall_ns": r.wall_ns,
                        "best_ns": r.best_ns(),
                    }))
                    .collect::<Vec<_>>(),
                "value": comb_value.to_string(),
                "agree": agree,
            }),
            started,
        );
        emit_json(out, &record)?;
    } else {
        for r in &rows {
            let terms = r
                .terms
                .as_ref()
                .map(|t| format!(" terms={t}"))
                .unwrap_or_default();
            writeln!(
                out,
                "{}:{terms} best={:.3}ms reps={}",
                r.method,
                r.best_ns() as f64 / 1e6,
                reps
            )?;
        }
        writeln!(out, "value={comb_value}")?;
        writeln!(out, "agreement: {}", if agree { "OK" } else { "METHODS DISAGREE" })?;
    }
    if !agree {
        return Err(CliError::Consistency(
            "bench methods disagree; this indicates an internal inconsistency".into(),
        ));
    }
    Ok(())
}
