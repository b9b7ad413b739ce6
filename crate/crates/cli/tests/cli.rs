use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use plc_core::explain::axp_formula;
use plc_core::models::parse_model_file;
use plc_core::samples::{f1, f2};
use plc_core::{Formula, Mcm, Term};

fn plc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plc"))
        .args(args)
        .env_remove("PLC_NODE_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/review.plc")
}

fn review() -> Mcm {
    let text = fs::read_to_string(fixture()).unwrap();
    parse_model_file(&text).unwrap().knowledge.into_model().unwrap()
}

fn f1_name() -> String {
    let g = review();
    g.function_label(f1(&g).unwrap())
}

#[test]
fn announcement_check_on_the_review_model() {
    let g = review();
    let sig = g.sig();
    let lambda = Term::parse("or & an", sig).unwrap();
    let body = Formula::box_f(Formula::disj(
        lambda.parts().iter().map(|t| axp_formula(t, "1", sig)),
    ));
    let text = format!("[! or & an -> =1] {body}");
    let path = fixture();
    let name = f1_name();
    let args = [
        "check",
        "-m",
        path.to_str().unwrap(),
        "--state",
        "{si,or,an}",
        "--function",
        &name,
        "-f",
        &text,
    ];
    let out = plc(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out), "TRUE\n");
}

#[test]
fn contradiction_is_unsat_and_answered() {
    let out = plc(&["sat", "--mode", "finite", "-f", "=0 & =1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "UNSAT\n");
}

#[test]
fn sat_writes_a_checkable_witness() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.plc");
    let out = plc(&[
        "sat",
        "--atoms",
        "p,q",
        "-f",
        "diaF =0 & diaF =1 & boxI (p | q)",
        "-o",
        w.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "SAT\n");
    let check = plc(&["check", "-m", w.to_str().unwrap(), "-f", "diaF =0 & diaF =1 & boxI (p | q)"]);
    assert_eq!(stdout(&check), "TRUE\n");
}

#[test]
fn no_subjective_explanation_of_acceptance() {
    let path = fixture();
    let name = f1_name();
    let base = ["explain", "-m", path.to_str().unwrap(), "--state", "{si,or,an}", "--function", &name];
    let out = plc(&[&base[..], &["--subjective", "--value", "1"]].concat());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "classification\t1\n");
    let local = plc(&base);
    assert_eq!(stdout(&local), "classification\t1\naxp\tor & an\n");
    let rejection = plc(&[&base[..], &["--subjective", "--kind", "pimp", "--value", "0"]].concat());
    assert!(stdout(&rejection).lines().any(|l| l == "subpimp\t~an"));
}

#[test]
fn update_drops_f2() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("after.plc");
    let path = fixture();
    let out = plc(&[
        "update",
        "-m",
        path.to_str().unwrap(),
        "-f",
        "or & an -> =1",
        "-o",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let h = parse_model_file(&fs::read_to_string(&out_path).unwrap())
        .unwrap()
        .knowledge
        .into_model()
        .unwrap();
    assert!(f1(&h).is_some());
    assert!(f2(&h).is_none());
}

#[test]
fn reduce_and_normalize() {
    let out = plc(&["reduce", "-f", "[! p] =1"]);
    assert_eq!(stdout(&out), "boxI p -> =1\n");
    let dir = tempfile::tempdir().unwrap();
    let mdm = dir.path().join("m.plc");
    fs::write(
        &mdm,
        "val: 0 1\natoms: p\nworlds:\nu: {p} =1\nv: {} =0\nrelI: {u,v}\nrelF: {u} {v}\npoint: u\n",
    )
    .unwrap();
    let out = plc(&["normalize", "-m", mdm.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = parse_model_file(&stdout(&out)).unwrap();
    let m = doc.knowledge.into_model().unwrap();
    assert_eq!((m.num_states(), m.num_functions()), (2, 1));
    assert!(doc.point.is_some());
}

#[test]
fn output_is_deterministic() {
    let args = ["axioms", "--atoms", "p,q", "--seed", "3", "--count", "2"];
    let a = plc(&args);
    let b = plc(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("total\t"));
    assert!(!stdout(&a).contains("\tFAIL\t"));
}

#[test]
fn exit_codes() {
    assert_eq!(plc(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(plc(&["sat", "--mode", "sideways", "-f", "p"]).status.code(), Some(1));
    assert_eq!(plc(&["sat", "--atoms", "p", "-f", "p &"]).status.code(), Some(2));
    assert_eq!(plc(&["sat", "--atoms", "p", "-f", "q"]).status.code(), Some(2));
    let missing = plc(&["check", "-m", "/nonexistent/model.plc", "-f", "p"]);
    assert_eq!(missing.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_plc"))
        .args(["sat", "--atoms", "p,q", "-f", "diaF diaI (p & =0) & boxF diaI (q & =1) & diaF =1"])
        .env("PLC_NODE_BUDGET", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stdout(&out), "RESOURCE-OUT\n");
    let out = Command::new(env!("CARGO_BIN_EXE_plc"))
        .args(["reduce", "-f", "[! p] [! q] [! p & q] boxI boxF (p & q & =1)"])
        .env("PLC_NODE_BUDGET", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}
