use std::path::Path;
use std::process::{Command, Output};

fn grouplog(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grouplog"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn eval_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let abelian = write(dir.path(), "ab.fo", "(all x (all y (= (* x y) (* y x))))");
    assert_eq!(code(&grouplog(&["eval", &abelian, "Z6"])), 0);
    let out = grouplog(&["eval", &abelian, "S3"]);
    assert_eq!(code(&out), 1);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["holds"], false);
    let broken = write(dir.path(), "bad.fo", "(all x");
    assert_eq!(code(&grouplog(&["eval", &broken, "Z6"])), 2);
}

#[test]
fn eval_with_binding() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "id.fo", "(= x 1)");
    assert_eq!(code(&grouplog(&["eval", &f, "Z4", "--bind", "x=0"])), 0);
    assert_eq!(code(&grouplog(&["eval", &f, "Z4", "--bind", "x=1"])), 1);
}

#[test]
fn iso_exit_codes() {
    assert_eq!(code(&grouplog(&["iso", "UT3(2)", "D4"])), 0);
    assert_eq!(code(&grouplog(&["iso", "D4", "Q8"])), 1);
}

#[test]
fn gen_then_eval() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.fo");
    let p = path.to_str().unwrap();
    assert_eq!(code(&grouplog(&["gen", "cyclic2", "3", "-o", p])), 0);
    let side: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(path.with_extension("json")).unwrap()).unwrap();
    assert_eq!(side["target_order"], 8);
    assert_eq!(code(&grouplog(&["eval", p, "Z8"])), 0);
    assert_eq!(code(&grouplog(&["eval", p, "Z2+Z4"])), 1);
}

#[test]
fn verify_from_written_files() {
    let dir = tempfile::tempdir().unwrap();
    let sents = dir.path().join("sentences");
    let corpus = dir.path().join("corpus");
    let report = dir.path().join("u.jsonl");
    assert_eq!(code(&grouplog(&["gen", "desk", "-o", sents.to_str().unwrap()])), 0);
    assert_eq!(
        code(&grouplog(&[
            "corpus",
            "build",
            "--max-order",
            "8",
            "-o",
            corpus.to_str().unwrap()
        ])),
        0
    );
    let out = grouplog(&["verify", "soundness", "--sentences", sents.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let args = [
        "verify",
        "uniqueness",
        "--corpus",
        corpus.to_str().unwrap(),
        "-o",
        report.to_str().unwrap(),
    ];
    assert_eq!(code(&grouplog(&args)), 0);
    assert!(report.with_extension("csv").exists());
}

#[test]
fn lengths_and_usage_errors() {
    assert_eq!(code(&grouplog(&["lengths", "theta", "--range", "1..100"])), 0);
    assert_eq!(code(&grouplog(&["lengths", "nope"])), 2);
    assert_eq!(code(&grouplog(&["gen", "desk"])), 2);
}
