use std::process::{Command, Output};

use serde_json::Value;
use spgamma::bruhat::{decompose_w0, w0_inverse_times};
use spgamma::suite::{mat_json, pair_from_json, Status, SuiteReport};

fn verify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_verify")).args(args).output().expect("runs")
}

fn report(out: &Output) -> SuiteReport {
    serde_json::from_slice(&out.stdout).expect("valid report")
}

#[test]
fn same_seed_same_results() {
    let args = ["all", "--r", "1..2", "--m", "0..1", "--samples", "3", "--seed", "11"];
    let (a, b) = (verify(&args), verify(&args));
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stdout));
    let (ra, rb) = (report(&a), report(&b));
    assert_eq!(ra.results_json(), rb.results_json());
    assert_eq!(ra.status, Status::Pass);
    assert_eq!(ra.results.len(), 6 * 4);
}

#[test]
fn report_round_trips() {
    let out = verify(&["weyl", "--n", "3", "--seed", "2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rep: SuiteReport = serde_json::from_str(&text).unwrap();
    assert_eq!(rep.config.n, Some(3));
    assert_eq!(rep.results.len(), 6);
    assert_eq!(serde_json::to_string_pretty(&rep).unwrap() + "\n", text);
    assert!(rep.results.iter().all(|c| c.notes.iter().any(|n| n.starts_with("|B(M)| = "))));
}

#[test]
fn injected_fault_is_reported_with_exact_witness() {
    let out = verify(&["bruhat", "--r", "2", "--m", "1", "--samples", "3", "--inject-fault"]);
    assert_eq!(out.status.code(), Some(1));
    let rep = report(&out);
    assert_eq!(rep.status, Status::Fail);
    let cell = &rep.results[0];
    assert_eq!(cell.failures.len(), 3);
    for f in &cell.failures {
        assert_eq!(f.site, "w0^-1 n = m n' nbar");
        let n = pair_from_json(&f.input).unwrap();
        assert_eq!(f.expected, mat_json(&w0_inverse_times(&n).unwrap()));
        let mut bad = decompose_w0(&n).unwrap();
        bad.m1[(0, 0)] += spgamma::rat::int(1);
        assert_eq!(f.actual, mat_json(&bad.product().unwrap()));
        let entry = &f.actual[0][0];
        assert!(entry.as_str().unwrap().contains('/'), "rationals are serialized as n/d strings: {entry}");
    }
}

#[test]
fn text_format_and_out_file() {
    let path = std::env::temp_dir().join(format!("verify-{}.txt", std::process::id()));
    let out = verify(&["orbit", "--r", "1..2", "--m", "1", "--samples", "2", "--format", "text", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert!(text.starts_with("suite orbit seed 0\n"), "{text}");
    assert!(text.lines().last().unwrap().starts_with("status pass"));
}

#[test]
fn measure_reports_the_power_identity_failure() {
    let out = verify(&["measure", "--r", "3", "--m", "1", "--samples", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let f = &v["results"][0]["failures"][0];
    assert_eq!(f["expected"], 3);
    assert_eq!(f["actual"], -1);
}

#[test]
fn bad_arguments() {
    let out = verify(&["nonsense"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown suite 'nonsense'"));
    let out = verify(&["cutoff", "--prime", "4"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("4 is not prime"));
    assert_eq!(verify(&["bruhat", "--r", "3..1"]).status.code(), Some(3));
}
