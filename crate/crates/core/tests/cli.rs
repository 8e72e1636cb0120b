mod common;

use std::path::PathBuf;
use std::process::{Command, Output};

use common::*;
use pdiff::canon::decide;
use proptest::prelude::*;

fn pdiff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdiff"))
        .args(args)
        .output()
        .expect("run pdiff")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pdiff-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

/// Runs `counterexample` and replays its output through `eval --env`.
fn replay(lhs: &str, rhs: &str, tag: &str) {
    let o = pdiff(&["counterexample", lhs, rhs]);
    assert_eq!(o.status.code(), Some(1), "{lhs} = {rhs}");
    let text = stdout(&o);
    let printed = |key: &str| {
        text.lines()
            .find_map(|l| l.strip_prefix(&format!("# {key} = ")))
            .unwrap_or_else(|| panic!("no {key} in {text}"))
            .to_string()
    };
    let env = scratch(&format!("{tag}.env"), &text);
    let env = env.to_str().unwrap();
    for (side, key) in [(lhs, "lhs"), (rhs, "rhs")] {
        let o = pdiff(&["eval", side, "--env", env]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(stdout(&o).trim(), printed(key), "{side} under\n{text}");
    }
    assert_ne!(printed("lhs"), printed("rhs"));
}

#[test]
fn decide_examples() {
    let o = pdiff(&["decide", "D[x](x+y)", "1"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "equal\n"));
    let o = pdiff(&["decide", "D[x](f(x))", "f(x)"]);
    assert_eq!(
        (o.status.code(), stdout(&o).as_str()),
        (Some(1), "not-equal\n")
    );
    // leading minus signs are expressions, not flags
    assert_eq!(pdiff(&["decide", "-1*x", "-x"]).status.code(), Some(0));
    let o = pdiff(&["--json", "decide", "D[x](x+y)", "1"]);
    assert_eq!(stdout(&o).trim(), r#"{"result":"equal"}"#);
}

#[test]
fn canon_of_a_chain_rule_instance() {
    let o = pdiff(&["canon", "D[x](f(x*x))"]);
    assert_eq!(o.status.code(), Some(0));
    let printed = p(stdout(&o).trim());
    assert!(decide(&printed, &p("D[u](f(u); x*x)*(x + x)")));
    let o = pdiff(&["derive", "x", "f(x*x)"]);
    assert_eq!(p(stdout(&o).trim()), printed);
}

#[test]
fn malformed_input_exits_with_two() {
    for args in [
        vec!["decide", "x +", "1"],
        vec!["decide", "f(x)", "f(x, y)"],
        vec!["decide", "0.5", "1"],
        vec!["canon", "D[x](x"],
        vec!["derive", "2", "x"],
        vec!["eval", "x", "--env", "/nonexistent/env"],
        vec!["check-proof", "/nonexistent/proof"],
        vec!["counterexample", "f(", "1"],
        vec!["frobnicate"],
        vec![],
    ] {
        let o = pdiff(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
    }
    let bad = scratch("bad.proof", "(trans (axiom add-zero)");
    assert_eq!(
        pdiff(&["check-proof", bad.to_str().unwrap()]).status.code(),
        Some(2)
    );
    let bad = scratch("bad.env", "f/1 := x1\n");
    assert_eq!(
        pdiff(&["eval", "f(1)", "--env", bad.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn counterexample_output_replays() {
    replay("D[x](f(x))", "f(x)", "deriv");
    replay("f(x, y)", "f(y, x)", "swap");
    replay("D[x](f(x)*x; 2)", "3", "at");
    let o = pdiff(&["counterexample", "D[x](x*y)", "y"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "equal\n"));
    let o = pdiff(&["--json", "counterexample", "--budget", "200", "f(x)", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"], "not-equal");
    assert_ne!(v["lhs"], v["rhs"]);
}

#[test]
fn check_proof_and_certify() {
    let o = pdiff(&["certify", "D[x](x*f(x))"]);
    assert_eq!(o.status.code(), Some(0));
    let cert = scratch("cert.proof", &stdout(&o));
    let o = pdiff(&["check-proof", cert.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("accepted\n"));
    // the certificate uses the product rule, which the restricted mode forbids
    let o = pdiff(&["check-proof", "--rtc", cert.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("rejected\n"));
}

#[test]
fn oracle_decide_refutes_only() {
    let o = pdiff(&["oracle-decide", "D[x](f(x))", "f(x)", "--degree", "1"]);
    assert_eq!(
        (o.status.code(), stdout(&o).as_str()),
        (Some(1), "not-equal\n")
    );
    let o = pdiff(&[
        "oracle-decide",
        "D[x](D[y](f(x, y)))",
        "D[y](D[x](f(x, y)))",
    ]);
    assert_eq!(
        (o.status.code(), stdout(&o).as_str()),
        (Some(0), "indistinguishable\n")
    );
}

#[test]
fn eval_with_environment() {
    let env = scratch("sq.env", "# squares\nf/1 := x0^2 + 1/2\nx := 3\n");
    let o = pdiff(&[
        "eval",
        "D[y](f(y); x) + f(x)",
        "--env",
        env.to_str().unwrap(),
    ]);
    assert_eq!(stdout(&o), "31/2\n");
    assert_eq!(stdout(&pdiff(&["eval", "g(2) + x"])), "0\n");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn decide_exit_code_matches_library(seed in any::<u64>()) {
        let mut g = rng(seed);
        let (a, b) = if seed % 2 == 0 { equal_pair(&mut g) } else { random_pair(&mut g) };
        let (a, b) = (a.to_string(), b.to_string());
        let code = pdiff(&["decide", &a, &b]).status.code();
        let expected = if decide(&p(&a), &p(&b)) { 0 } else { 1 };
        prop_assert_eq!(code, Some(expected));
    }
}
