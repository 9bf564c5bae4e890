//! End-to-end tests of the `fdb` binary: exit codes, stream separation,
//! JSON shape, and determinism.

use std::process::{Command, Output};

use serde_json::Value;

fn fdb() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fdb"));
    cmd.env_remove("FDB_MAX_ENUM").env_remove("FDB_MAX_ORDER");
    cmd
}

fn run(args: &[&str]) -> Output {
    fdb().args(args).output().expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).unwrap()
}

fn json_of(output: &Output) -> Value {
    let text = stdout_of(output);
    serde_json::from_str(&text).unwrap_or_else(|e| panic!("stdout is not one JSON object: {e}\n{text}"))
}

/// Drop fields whose values are timings and therefore may differ run to run.
fn strip_timings(value: &mut Value) {
    match value {
        Value::Object(map) => {
            map.retain(|k, _| !matches!(k.as_str(), "elapsed_ns" | "wall_ns" | "best_ns"));
            for v in map.values_mut() {
                strip_timings(v);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timings),
        _ => {}
    }
}

#[test]
fn partitions_lists_and_cross_checks() {
    let output = run(&["partitions", "3"]);
    assert!(output.status.success());
    assert_eq!(
        stdout_of(&output),
        "{1,2,3}\n{1,2}{3}\n{1,3}{2}\n{1}{2,3}\n{1}{2}{3}\ncount=5 bell=5 OK\n"
    );
    assert!(stderr_of(&output).is_empty());

    let output = run(&["partitions", "0"]);
    assert_eq!(stdout_of(&output), "{}\ncount=1 bell=1 OK\n");
}

#[test]
fn cap_violations_exit_2_with_diagnostics_on_stderr() {
    let output = run(&["partitions", "40"]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stdout_of(&output).is_empty());
    assert!(stderr_of(&output).contains("cap"));

    let output = run(&["--max-enum", "3", "partitions", "4"]);
    assert_eq!(output.status.code(), Some(2));

    let output = run(&["profiles", "31"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn env_vars_mirror_the_cap_flags_and_flags_win() {
    let output = fdb()
        .env("FDB_MAX_ENUM", "3")
        .args(["partitions", "4"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));

    let output = fdb()
        .env("FDB_MAX_ENUM", "3")
        .args(["--max-enum", "14", "partitions", "4"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));

    let output = fdb()
        .env("FDB_MAX_ORDER", "2")
        .args(["profiles", "3"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));

    let output = fdb()
        .env("FDB_MAX_ENUM", "three")
        .args(["partitions", "2"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1), "bad env value is an input error");
}

#[test]
fn profiles_reports_counts_and_bell_sum() {
    let output = run(&["profiles", "3"]);
    assert!(output.status.success());
    assert_eq!(
        stdout_of(&output),
        "k=(3,0,0) count=1\nk=(1,1,0) count=3\nk=(0,0,1) count=1\nsum=5 bell=5 OK\n"
    );

    let record = json_of(&run(&["profiles", "4", "--json"]));
    assert_eq!(record["result"]["sum"], "15");
    assert_eq!(record["result"]["bell"], "15");
    assert_eq!(record["result"]["ok"], true);
    let counts: Vec<&str> = record["result"]["profiles"]
        .as_array()
        .unwrap()
        .iter()
        .map(|row| row["count"].as_str().unwrap())
        .collect();
    assert_eq!(counts, ["1", "6", "3", "4", "1"]);
}

#[test]
fn derive_examples_from_all_three_routes() {
    let output = run(&["derive", "--f", "x^2", "--g", "x+1", "--at", "0", "--n", "2"]);
    assert!(output.status.success());
    let text = stdout_of(&output);
    assert!(text.contains("combinatorial = 2"), "{text}");
    assert!(text.contains("closed = 2"), "{text}");
    assert!(text.contains("oracle = 2"), "{text}");
    assert!(text.contains("agreement: exact"), "{text}");

    let output = run(&[
        "derive", "--f", "x", "--g", "x^3", "--at", "2", "--n", "3", "--method", "closed",
    ]);
    assert_eq!(stdout_of(&output), "closed = 6\n");

    let record = json_of(&run(&[
        "derive", "--f", "exp(x)", "--g", "sin(x)", "--at", "0", "--n", "4", "--kind", "float",
        "--json",
    ]));
    assert_eq!(record["result"]["agree"], true);
    let values = record["result"]["values"].as_object().unwrap();
    let combinatorial = values["combinatorial"].as_f64().unwrap();
    let oracle = values["oracle"].as_f64().unwrap();
    assert!((combinatorial - oracle).abs() <= 1e-9 * combinatorial.abs().max(1.0));
}

#[test]
fn input_errors_exit_1_and_keep_stdout_clean() {
    let output = run(&["derive", "--f", "(x+", "--g", "x", "--at", "0", "--n", "1"]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stdout_of(&output).is_empty());
    assert!(stderr_of(&output).contains("parse error at byte 3"));

    // Transcendental in the exact kind.
    let output = run(&["derive", "--f", "exp(x)", "--g", "x", "--at", "0", "--n", "1"]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr_of(&output).contains("float"));

    // Pole at the evaluation point.
    let output = run(&["derive", "--f", "x", "--g", "1/x", "--at", "0", "--n", "1"]);
    assert_eq!(output.status.code(), Some(1));

    // Unknown flags are input errors (exit 1), not clap's default 2.
    let output = run(&["derive", "--nope"]);
    assert_eq!(output.status.code(), Some(1));

    let output = run(&["--help"]);
    assert_eq!(output.status.code(), Some(0));
}

#[test]
fn derive_order_caps_split_by_method() {
    // Closed form accepts orders the combinatorial cap rejects.
    let output = run(&[
        "derive", "--f", "x", "--g", "x", "--at", "0", "--n", "20", "--method", "closed",
    ]);
    assert!(output.status.success());

    let output = run(&["derive", "--f", "x", "--g", "x", "--at", "0", "--n", "20"]);
    assert_eq!(output.status.code(), Some(2));

    let output = run(&[
        "derive", "--f", "x", "--g", "x", "--at", "0", "--n", "31", "--method", "closed",
    ]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn check_passes_by_default_and_detects_injected_faults() {
    let output = run(&["check", "--n-max", "5", "--trials", "5", "--seed", "1"]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    let text = stdout_of(&output);
    assert_eq!(text.matches(": PASS").count(), 3, "{text}");

    let output = run(&["check", "--n-max", "0", "--trials", "5", "--seed", "1"]);
    assert!(output.status.success(), "vacuous pass");

    let output = run(&[
        "check", "--n-max", "5", "--trials", "5", "--seed", "1", "--inject-fault",
    ]);
    assert_eq!(output.status.code(), Some(3));
    assert!(stdout_of(&output).contains("FAIL"));
    assert!(stderr_of(&output).contains("suites failed"));
}

#[test]
fn bench_reports_term_counts_for_both_formulas() {
    let record = json_of(&run(&["bench", "--n", "10", "--reps", "1", "--json"]));
    let methods = record["result"]["methods"].as_array().unwrap();
    assert_eq!(methods[0]["terms"], "115975");
    assert_eq!(methods[1]["terms"], "42");
    assert_eq!(record["result"]["agree"], true);

    let record = json_of(&run(&["bench", "--n", "1", "--reps", "2", "--json"]));
    let methods = record["result"]["methods"].as_array().unwrap();
    assert_eq!(methods[0]["terms"], "1");
    assert_eq!(methods[1]["terms"], "1");
    assert_eq!(methods[0]["wall_ns"].as_array().unwrap().len(), 2);
}

#[test]
fn every_json_run_emits_exactly_one_object() {
    let commands: Vec<Vec<&str>> = vec![
        vec!["partitions", "4", "--json"],
        vec!["profiles", "5", "--json"],
        vec![
            "derive", "--f", "x^3", "--g", "x^2+1", "--at", "1/2", "--n", "4", "--json",
        ],
        vec!["check", "--n-max", "4", "--trials", "3", "--json"],
        vec!["bench", "--n", "5", "--reps", "1", "--json"],
    ];
    for args in commands {
        let output = run(&args);
        assert!(output.status.success(), "{args:?}: {}", stderr_of(&output));
        let record = json_of(&output);
        for key in ["command", "inputs", "result", "elapsed_ns"] {
            assert!(record.get(key).is_some(), "{args:?} missing {key}");
        }
        assert!(stderr_of(&output).is_empty(), "{args:?} wrote to stderr");
    }
}

#[test]
fn json_output_is_deterministic_up_to_timing_fields() {
    let cases: Vec<Vec<&str>> = vec![
        vec!["partitions", "5", "--json"],
        vec![
            "derive", "--f", "x^2 - 1/3", "--g", "x^3 + x", "--at", "2/7", "--n", "6", "--json",
        ],
        vec![
            "check", "--n-max", "5", "--trials", "6", "--seed", "99", "--json",
        ],
        vec!["bench", "--n", "6", "--reps", "2", "--json"],
    ];
    for args in cases {
        let mut first = json_of(&run(&args));
        let mut second = json_of(&run(&args));
        strip_timings(&mut first);
        strip_timings(&mut second);
        // Byte-identical once re-serialized (serde_json orders keys).
        assert_eq!(
            serde_json::to_string(&first).unwrap(),
            serde_json::to_string(&second).unwrap(),
            "{args:?}"
        );
    }
}

#[test]
fn partition_json_uses_the_documented_block_schema() {
    let record = json_of(&run(&["partitions", "3", "--json"]));
    let partitions = record["result"]["partitions"].as_array().unwrap();
    assert_eq!(partitions.len(), 5);
    assert_eq!(partitions[0]["n"], 3);
    assert_eq!(partitions[0]["blocks"], serde_json::json!([[1, 2, 3]]));
    assert_eq!(record["result"]["count"], 5);
    assert_eq!(record["result"]["bell"], "5");
    assert_eq!(record["result"]["ok"], true);
}
