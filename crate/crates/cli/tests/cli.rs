use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn varieties(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_varieties")).args(args).env_remove("VARIETIES_THREADS").output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn inequality_holds_at_m4() {
    let out = varieties(&["rank", "inequality", "--p", "3", "--m", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["verdict"], "verified");
    assert_eq!(r["result"]["holds"], true);
    assert_eq!(r["config"]["m"], 4);

    let out = varieties(&["rank", "inequality", "--p", "3", "--m", "3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn cube_law_fails_in_s3_with_a_transposition() {
    let out = varieties(&["identity", "check", "--group", "sym:3", "--word", "x1^3"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    let witness: Vec<u32> = serde_json::from_value(r["result"]["counterexample"][0].clone()).unwrap();
    let moved = witness.iter().enumerate().filter(|&(i, &j)| i as u32 != j).count();
    assert_eq!(moved, 2);
}

#[test]
fn randomized_pass_is_inconclusive() {
    let out = varieties(&[
        "identity",
        "check",
        "--group",
        "ut:3:2",
        "--word",
        "(x1^3 x2^3)^3",
        "--mode",
        "randomized",
        "--trials",
        "50",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["result"]["verdict"], "no_counterexample_found");
}

#[test]
fn lemma_reports_are_byte_identical() {
    let args = ["ut", "verify-lemma1", "--p", "3", "--m", "2", "--trials", "200", "--seed", "7"];
    let a = varieties(&args);
    let b = varieties(&args);
    assert_eq!(a.status.code(), Some(0));
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
    // Thread count does not change the output.
    let c = Command::new(env!("CARGO_BIN_EXE_varieties")).args(args).env("VARIETIES_THREADS", "1").output().unwrap();
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn timing_lives_in_its_own_section() {
    let out = varieties(&["ut", "order", "--p", "3", "--m", "2", "--timing"]);
    let r = report(&out);
    assert!(r["timing"]["wall_time_ms"].is_u64());
    let plain = report(&varieties(&["ut", "order", "--p", "3", "--m", "2"]));
    assert!(plain.get("timing").is_none());
    assert_eq!(plain["result"], r["result"]);
}

#[test]
fn certificate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let cert_arg = cert.to_str().unwrap();
    let out =
        varieties(&["rank", "find-line", "--p", "3", "--arity", "3", "--dim", "2", "--count", "2", "--out", cert_arg]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let out = varieties(&["rank", "verify", cert_arg]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(report(&out)["result"]["check"]["valid"], true);

    // A bare certificate verifies too, and tampering is caught.
    let full: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    let mut bare = full["result"]["certificate"].clone();
    let bare_path = dir.path().join("bare.json");
    std::fs::write(&bare_path, bare.to_string()).unwrap();
    assert_eq!(varieties(&["rank", "verify", bare_path.to_str().unwrap()]).status.code(), Some(0));
    bare["generator"]["coeffs"] = serde_json::json!([1, 0, 0, 0, 0, 0, 0, 0]);
    std::fs::write(&bare_path, bare.to_string()).unwrap();
    assert_eq!(varieties(&["rank", "verify", bare_path.to_str().unwrap()]).status.code(), Some(1));

    let out = varieties(&["rank", "shadow", cert_arg, "--trials", "300", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["violations"], serde_json::json!([]));
}

#[test]
fn no_line_at_three_summands() {
    let out = varieties(&["rank", "find-line", "--p", "3", "--arity", "3", "--dim", "2", "--count", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["result"]["result"], "none_exists");
}

#[test]
fn usage_errors_exit_64() {
    for args in [
        vec!["frobnicate"],
        vec!["rank", "inequality", "--p", "3"],
        vec!["rank", "inequality", "--p", "4", "--m", "2"],
        vec!["identity", "check", "--group", "sym:3", "--word", "x1^0"],
        vec!["identity", "check", "--group", "nope:1", "--word", "x1"],
        vec!["ut", "verify-lemma1", "--p", "2", "--m", "1"],
        vec!["rank", "verify", "/nonexistent/cert.json"],
    ] {
        let out = varieties(&args);
        assert_eq!(out.status.code(), Some(64), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn identity_subcommands() {
    let out = varieties(&["identity", "verbal", "--group", "sym:3", "--word", "x1^2"]);
    assert_eq!(report(&out)["result"]["order"], 3);
    assert_eq!(varieties(&["identity", "member", "--group", "sym:3", "--m", "3", "--n", "2"]).status.code(), Some(0));
    assert_eq!(varieties(&["identity", "member", "--group", "sym:3", "--m", "2", "--n", "2"]).status.code(), Some(1));
    let out = varieties(&["identity", "scheme", "--group", "cyclic:8", "--m", "4", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["scheme_satisfied"], true);
    assert_eq!(varieties(&["identity", "coprime", "--group", "sym:3", "--m", "3", "--n", "2"]).status.code(), Some(0));
    let out = varieties(&["identity", "check", "--group", "cyclic:6", "--word", "x1^k", "--param", "k=6"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn wreath_subcommands() {
    let out = varieties(&["wreath", "build", "--base", "cyclic:2", "--top", "cyclic:3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["order"], "24");
    assert_eq!(r["result"]["kernel_of_alpha"], 8);

    let out = varieties(&[
        "wreath",
        "discriminate",
        "--group",
        "product:cyclic:2xcyclic:2",
        "--target",
        "cyclic:2",
        "--set",
        "0,0;1,0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["independent_recheck"], true);
    let out = varieties(&["wreath", "discriminate", "--group", "product:cyclic:2xcyclic:2", "--target", "cyclic:2"]);
    assert_eq!(out.status.code(), Some(1));

    let out = varieties(&["wreath", "uv-shadow", "--s", "1", "--r", "1", "--top", "cyclic:3", "--base", "cyclic:2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["kernel_words"], 500);

    let out = varieties(&["wreath", "abelian", "--set", "0,0;1,0;0,1"]);
    assert_eq!(report(&out)["result"]["coefficients"], serde_json::json!(["1", "3"]));
}

#[test]
fn words_subcommands() {
    assert_eq!(varieties(&["words", "nielsen", "--tuple", "x1 x2; x2"]).status.code(), Some(0));
    assert_eq!(varieties(&["words", "nielsen", "--tuple", "x1^2; x2"]).status.code(), Some(1));
    let out = varieties(&["words", "parse", "--word", "x1 x1^-1 x2"]);
    assert_eq!(report(&out)["result"]["word"], "x2");
}

#[test]
fn markdown_and_matrix_input() {
    let out = varieties(&["ut", "power", "--p", "3", "--m", "1", "--seed", "3", "--format", "markdown"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# ut power (verified)"));
    assert!(text.contains("| seed | 3 |"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.json");
    let matrix =
        r#"{"version":1,"p":3,"l":4,"m":1,"entries":{"1,2":[1],"1,3":[0],"1,4":[0],"2,3":[1],"2,4":[0],"3,4":[1]}}"#;
    std::fs::write(&path, matrix).unwrap();
    let out = varieties(&["ut", "power", "--p", "3", "--m", "1", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["fast"]["entries"]["1,4"], serde_json::json!([1]));
    assert!(Path::new(&path).exists());
}
