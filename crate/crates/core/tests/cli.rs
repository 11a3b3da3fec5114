mod common;

use std::process::Command;

fn tncb(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_tncb")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn fx(name: &str) -> String {
    common::fixture_path(name).display().to_string()
}

#[test]
fn generate_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.json");
    let (code, out, _) = tncb(&[
        "generate",
        "--grammar",
        &fx("english.grammar"),
        "--bag",
        &fx("dog.bag.json"),
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(out, "the big brown dog barked\n");
    let steps: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    let steps = steps.as_array().unwrap();
    assert_eq!(steps.len(), 4);
    assert_eq!(steps[3]["kind"], "adjoin");
    assert_eq!(steps[3]["mover_orth"], "big");
    assert_eq!(steps[3]["dest_orth"], "brown dog");
    assert_eq!(steps[3]["disrupted"], 2);
}

#[test]
fn random_init_is_reproducible() {
    let args = [
        "generate",
        "--grammar",
        &fx("english.grammar"),
        "--bag",
        &fx("dog.bag.json"),
        "--init",
        "random",
        "--seed",
        "42",
    ];
    let a = tncb(&args);
    assert_eq!(a, tncb(&args));
    assert_eq!(a.0, 0);
    assert_eq!(a.1, "the big brown dog barked\n");
}

#[test]
fn oracle_prints_realizations() {
    let (code, out, err) = tncb(&["oracle", "--grammar", &fx("english.grammar"), "--bag", &fx("dog.bag.json")]);
    assert_eq!(code, 0);
    assert_eq!(out, "the big brown dog barked\n");
    assert!(err.starts_with("1 realization(s)"));
    let (code, out, _) = tncb(&["oracle", "--grammar", &fx("english.grammar"), "--bag", &fx("the_the.bag.json")]);
    assert_eq!((code, out.as_str()), (1, ""));
    let (code, _, err) = tncb(&[
        "oracle",
        "--grammar",
        &fx("english.grammar"),
        "--bag",
        &fx("dog.bag.json"),
        "--limit",
        "5",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("oracle limit"));
}

#[test]
fn ambiguous_order_is_an_assumption_violation_unless_lenient() {
    let g = fx("adversarial_precedence.grammar");
    let b = fx("adversarial_precedence.bag.json");
    let (code, _, err) = tncb(&["generate", "--grammar", &g, "--bag", &b]);
    assert_eq!(code, 3, "{err}");
    assert!(err.contains("brown dog") && err.contains("dog brown"), "{err}");
    let (code, out, err) = tncb(&["generate", "--grammar", &g, "--bag", &b, "--lenient"]);
    assert_eq!(code, 0);
    assert_eq!(out, "brown dog\n");
    assert!(err.contains("warning"));
}

#[test]
fn stalled_rewrite_is_an_assumption_violation() {
    let g = fx("adversarial_dominance.grammar");
    let b = fx("adversarial_dominance.bag.json");
    for extra in [&[][..], &["--unbounded"][..]] {
        let mut args = vec!["generate", "--grammar", &g, "--bag", &b];
        args.extend(extra);
        let (code, _, err) = tncb(&args);
        assert_eq!(code, 3, "{err}");
        assert!(err.contains("monotonicity"), "{err}");
    }
}

#[test]
fn transfer_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let bag = dir.path().join("en.json");
    let brk = dir.path().join("en.brk");
    let (code, _, err) = tncb(&[
        "transfer",
        "--bag",
        &fx("japanese.bag.json"),
        "--lexicon",
        &fx("ja_en.lex"),
        "--bracketing",
        &fx("japanese.brk"),
        "--out-bag",
        bag.to_str().unwrap(),
        "--out-bracketing",
        brk.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(std::fs::read_to_string(&brk).unwrap(), "((book the) (red is))\n");
    assert_eq!(std::fs::read_to_string(&bag).unwrap(), common::read_fixture("japanese_en.bag.json"));
}

#[test]
fn transfer_without_coverage_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.json");
    let (code, _, err) = tncb(&[
        "transfer",
        "--bag",
        &fx("french.bag.json"),
        "--lexicon",
        &fx("ja_en.lex"),
        "--out-bag",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("no lexicon entry"), "{err}");
    assert!(!out.exists());
}

#[test]
fn check_accepts_repeated_bags() {
    let (code, out, _) = tncb(&[
        "check",
        "--grammar",
        &fx("english.grammar"),
        "--bag",
        &fx("dog.bag.json"),
        "--bag",
        &fx("the_dog.bag.json"),
        "--trials",
        "20",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out, "2 bag(s), 20 dominance trial(s) each: 0 violation(s)\n");
}

#[test]
fn input_errors_exit_two() {
    let (code, _, err) = tncb(&["generate", "--grammar", &fx("dog.bag.json"), "--bag", &fx("dog.bag.json")]);
    assert_eq!(code, 2);
    assert!(err.contains("dog.bag.json:1:"), "{err}");
    let (code, _, _) = tncb(&["generate", "--grammar", &fx("english.grammar")]);
    assert_eq!(code, 2);
    let (code, _, _) = tncb(&["check", "--grammar", &fx("english.grammar")]);
    assert_eq!(code, 2);
    let (code, out, _) = tncb(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("generate"));
}
