//! The paper-review running example: a venue's acceptance classifier over
//! four properties of a submission (`si` significant, `or` original, `cl`
//! clearly written, `an` anonymous), known only through three constraints.

use crate::formula::Formula;
use crate::models::{build_mcm, FunctionSpec, Mcm, Point, StateSpec};
use crate::signature::Signature;
use crate::syntax::parse_formula;

pub const ATOMS: [&str; 4] = ["si", "or", "cl", "an"];

pub fn review_signature() -> Signature {
    Signature::new(ATOMS, ["0", "1"]).expect("valid signature")
}

/// The three constraints as formulas: the all-properties submission is
/// accepted, acceptance is monotone (one single-atom flip at a time), and
/// non-anonymous submissions are rejected.
pub fn review_constraints(sig: &Signature) -> Vec<Formula> {
    let mut out = vec![parse_formula("si & or & cl & an -> =1", sig).expect("valid")];
    let flips = sig.atoms().iter().map(|p| {
        let others = sig.atoms().iter().filter(|q| *q != p).cloned();
        Formula::implies(
            Formula::and(Formula::dec("1"), Formula::not(Formula::atom(p.as_str()))),
            Formula::cp(others, Formula::implies(Formula::atom(p.as_str()), Formula::dec("1"))),
        )
    });
    out.push(Formula::conj(flips));
    out.push(parse_formula("~an -> =0", sig).expect("valid"));
    out
}

/// `Γ` of the running example, built by filtering all of `Val^S`.
pub fn review_model() -> Mcm {
    let sig = review_signature();
    let cs = review_constraints(&sig);
    build_mcm(&sig, &StateSpec::All, &FunctionSpec::Constraints(cs)).expect("nonempty")
}

pub fn state(names: &[&str]) -> u64 {
    let sig = review_signature();
    names
        .iter()
        .fold(0, |m, n| m | 1 << sig.atom_index(n).expect("known atom"))
}

/// `s1 = {si, or, an}`.
pub fn s1() -> u64 {
    state(&["si", "or", "an"])
}

/// `s2 = {si, cl, an}`.
pub fn s2() -> u64 {
    state(&["si", "cl", "an"])
}

fn function_where(model: &Mcm, accept: impl Fn(u64) -> bool) -> Option<usize> {
    (0..model.num_functions()).find(|&f| {
        model
            .states()
            .iter()
            .enumerate()
            .all(|(s, &mask)| (model.value(f, s) == 1) == accept(mask))
    })
}

/// `f1`: accept iff anonymous and original or clear.
pub fn f1(model: &Mcm) -> Option<usize> {
    let (or, cl, an) = (state(&["or"]), state(&["cl"]), state(&["an"]));
    function_where(model, |s| s & an != 0 && s & (or | cl) != 0)
}

/// `f2`: accept iff significant and anonymous.
pub fn f2(model: &Mcm) -> Option<usize> {
    let sa = state(&["si", "an"]);
    function_where(model, |s| s & sa == sa)
}

pub fn point(model: &Mcm, s: u64, f: usize) -> Point {
    Point {
        state: model.state_index(s).expect("state of the full cube"),
        function: f,
    }
}
