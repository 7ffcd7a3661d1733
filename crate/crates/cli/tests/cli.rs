use iel_cli::{run, Outcome};
use serde_json::Value;

fn iel(args: &[&str]) -> Outcome {
    iel_stdin(args, "")
}

fn iel_stdin(args: &[&str], input: &str) -> Outcome {
    let argv = std::iter::once("iel").chain(args.iter().copied());
    run(argv, &mut input.as_bytes())
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut v: Vec<&str> = args.to_vec();
    v.extend(["--format", "json"]);
    let o = iel(&v);
    (o.code, serde_json::from_str(&o.output).expect(&o.output))
}

#[test]
fn decide_coreflection() {
    let o = iel(&["decide", "p -> [] p"]);
    assert_eq!(o.code, 0);
    assert!(o.output.starts_with("provable\n"), "{}", o.output);
    assert!(o.output.contains("universe=3"));
}

#[test]
fn decide_expectations_set_the_exit_code() {
    assert_eq!(iel(&["decide", "[] p -> p", "--expect", "unprovable"]).code, 0);
    let o = iel(&["decide", "[] p -> p", "--expect", "provable"]);
    assert_eq!(o.code, 1);
    assert!(o.output.starts_with("unprovable"));
    assert_eq!(
        iel(&["decide", "r", "--hyp", "p", "--hyp", "p -> r", "--expect", "provable"]).code,
        0
    );
}

#[test]
fn decide_json() {
    let (code, v) = json(&["decide", "[] (p -> r) -> [] p -> [] r"]);
    assert_eq!(code, 0);
    assert_eq!(v["provable"], true);
    assert!(v["universe_size"].as_u64().unwrap() > 0);
    assert!(v["sequents"].as_u64().unwrap() > 0);
}

#[test]
fn normalize_trace_of_one_beta_step() {
    let o = iel(&["normalize", "(\\x:p. bel in x) y", "--trace"]);
    assert_eq!(o.code, 0);
    let lines: Vec<&str> = o.output.lines().collect();
    assert_eq!(lines.len(), 2, "{}", o.output);
    assert!(lines[1].contains("D1"));
    assert!(lines[1].ends_with("bel in y"));
    let (_, v) = json(&["normalize", "(\\x:p. bel in x) y", "--trace"]);
    assert_eq!(v["normal_form"], "bel in y");
    assert_eq!(v["steps"], 1);
    assert_eq!(v["trace"][0]["rule"], "D1");
}

#[test]
fn normalize_runs_out_of_fuel() {
    let o = iel(&["normalize", "(\\x:p. x) ((\\x:p. x) y)", "--fuel", "1"]);
    assert_eq!(o.code, 1);
    assert!(o.output.contains("exhausted"));
    assert_eq!(iel(&["normalize", "(\\x:p. x) ((\\x:p. x) y)", "--fuel", "2"]).code, 0);
}

#[test]
fn degree_example() {
    let o = iel(&["degree", "p1 (case z of {x => u | y => v})"]);
    assert_eq!(o.code, 0);
    assert_eq!(o.output, "bar=7 hash=4\n");
    let (_, v) = json(&["degree", "p1 (case z of {x => u | y => v})"]);
    assert_eq!(v["bar"], "7");
    assert_eq!(v["hash"], "4");
}

#[test]
fn check_reports_types_and_errors() {
    let o = iel(&["check", "\\x:p. bel in x"]);
    assert_eq!(o.code, 0);
    assert!(o.output.ends_with(": p -> [] p\n"), "{}", o.output);
    assert_eq!(iel(&["check", "\\x:p. bel in x", "--type", "p -> [] p"]).code, 0);
    assert_eq!(iel(&["check", "\\x:p. bel in x", "--type", "p -> p"]).code, 1);
    let (code, v) = json(&["check", "f x", "--hyp", "f : p -> r", "--hyp", "x : r"]);
    assert_eq!(code, 1);
    assert_eq!(v["error"]["path"], serde_json::json!([1]));
    assert_eq!(v["error"]["expected"], "p");
    assert_eq!(v["error"]["found"], "r");
}

#[test]
fn cps_translations_and_lemmas() {
    let o = iel(&["cps", "x", "--hyp", "x : p"]);
    assert_eq!(o.code, 0);
    assert!(o.output.contains("x _k"), "{}", o.output);
    assert_eq!(iel(&["cps", "x", "--hyp", "x : p", "--modified"]).code, 0);
    let args = [
        "cps",
        "(\\x:p. f x) y",
        "--hyp",
        "f : p -> r",
        "--hyp",
        "y : p",
        "--check-lemmas",
    ];
    let o = iel(&args);
    assert_eq!(o.code, 0, "{}", o.output);
    assert!(o.output.lines().all(|l| l.starts_with("PASS")));
    assert!(o.output.contains("detour-simulation"));
    assert_eq!(iel(&["cps", "efq[p] z", "--hyp", "z : bot"]).code, 1);
}

#[test]
fn cps_lemma_table_shows_the_box_reordering() {
    let args = [
        "cps",
        "bel z:r = a, x:p = case d of {y => u | w => u} in x",
        "--hyp",
        "u : [] p",
        "--hyp",
        "d : p \\/ p",
        "--hyp",
        "a : [] r",
        "--check-lemmas",
    ];
    let o = iel(&args);
    assert_eq!(o.code, 1);
    assert!(
        o.output.contains("FAIL permutation-invariance   P4 [1]"),
        "{}",
        o.output
    );
}

#[test]
fn meta_json() {
    let (code, v) = json(&["meta", "--property", "disjunction", "--atoms", "p,r", "--size", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["property"], "disjunction");
    assert_eq!(v["checked"], 432);
    assert_eq!(v["counterexamples"], serde_json::json!([]));
    let (_, v) = json(&[
        "meta",
        "--property",
        "reflection",
        "--atoms",
        "p",
        "--size",
        "2",
        "--scope",
        "components",
    ]);
    assert_eq!(v["scope"], "components");
    assert_eq!(v["checked"], 603);
}

#[test]
fn stdin_stands_in_for_an_argument() {
    let o = iel_stdin(&["decide", "-"], "p /\\ r -> r /\\ p\n");
    assert_eq!(o.code, 0);
    assert!(o.output.starts_with("provable"));
}

#[test]
fn usage_errors_name_the_flag() {
    let o = iel(&["meta", "--property", "nonsense"]);
    assert_eq!(o.code, 2);
    assert!(o.output.contains("--property"));
    let o = iel(&["decide", "p ->"]);
    assert_eq!(o.code, 2);
    let o = iel(&["decide", "p", "--hyp", "p -> "]);
    assert_eq!(o.code, 2);
    assert!(o.output.contains("--hyp"));
    let o = iel(&["normalize", "x", "--strategy", "sideways"]);
    assert_eq!(o.code, 2);
    assert!(o.output.contains("--strategy"));
    assert_eq!(iel(&["meta", "--property", "reflection", "--atoms", "p->r"]).code, 2);
    assert_eq!(iel(&["frobnicate"]).code, 2);
    assert_eq!(iel(&["--help"]).code, 0);
}

#[test]
fn selftest_suites() {
    let o = iel(&["selftest", "decide"]);
    assert_eq!(o.code, 0, "{}", o.output);
    assert!(o.output.starts_with("PASS decision-procedure"));
    let (code, v) = json(&["selftest", "metatheory"]);
    assert_eq!(code, 0);
    assert_eq!(v[0]["name"], "metatheory");
    assert_eq!(v[0]["failure_count"], 0);
}
