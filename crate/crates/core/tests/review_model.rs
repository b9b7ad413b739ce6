use plc_core::explain::enumerate_axps;
use plc_core::models::{
    build_mcm, parse_model_file, render_model_file, update_mcm, FunctionSpec, Knowledge, StateSpec,
};
use plc_core::samples::{f1, f2, point, review_constraints, review_model, review_signature, s1};
use plc_core::semantics::check_mcm;
use plc_core::{parse_formula, Formula};

const SI: u32 = 0;
const OR: u32 = 1;
const CL: u32 = 2;
const AN: u32 = 3;

/// The classifier encoded as a 16-bit mask over states, checked directly:
/// the full state is accepted, accepting is preserved by adding any atom,
/// and non-anonymous states are rejected.
fn admissible(f: u32) -> bool {
    let accept = |s: u32| f >> s & 1 == 1;
    let full = (1 << SI) | (1 << OR) | (1 << CL) | (1 << AN);
    accept(full)
        && (0..16).all(|s| (0..4).all(|p| !accept(s) || accept(s | 1 << p)))
        && (0..16).all(|s| s >> AN & 1 == 1 || !accept(s))
}

#[test]
fn nineteen_classifiers_survive_the_constraints() {
    let expected = (0u32..1 << 16).filter(|&f| admissible(f)).count();
    assert_eq!(expected, 19);
    let g = review_model();
    assert_eq!(g.num_functions(), expected);
    for f in 0..g.num_functions() {
        let mask = (0..16).fold(0u32, |m, s| m | (g.value(f, s) as u32) << g.states()[s]);
        assert!(admissible(mask));
    }
    assert!(f1(&g).is_some() && f2(&g).is_some());
}

#[test]
fn fixture_matches_the_built_in_model() {
    let doc = parse_model_file(include_str!("fixtures/review.plc")).unwrap();
    let from_file = doc.knowledge.into_model().unwrap();
    let g = review_model();
    assert_eq!(from_file.num_functions(), g.num_functions());
    assert!(from_file.is_isomorphic(&g));
}

#[test]
fn compiled_and_generic_constraint_paths_agree() {
    // A vacuous announcement forces the generic evaluator.
    let sig = review_signature();
    let wrapped: Vec<Formula> = review_constraints(&sig)
        .into_iter()
        .map(|c| Formula::dynamic(Formula::Top, c))
        .collect();
    let slow = build_mcm(&sig, &StateSpec::All, &FunctionSpec::Constraints(wrapped)).unwrap();
    assert_eq!(slow.functions(), review_model().functions());
}

#[test]
fn learning_the_or_rule_discards_f2() {
    let g = review_model();
    let sig = g.sig().clone();
    let rule = parse_formula("or & an -> =1", &sig).unwrap();
    let Knowledge::Consistent(h) = update_mcm(&g, &rule).unwrap() else {
        panic!("update leaves classifiers");
    };
    assert!(f1(&h).is_some());
    assert!(f2(&h).is_none());
    assert!(h.num_functions() < g.num_functions());
    // Learning the same thing twice changes nothing.
    let Knowledge::Consistent(again) = update_mcm(&h, &rule).unwrap() else {
        panic!("still consistent");
    };
    assert_eq!(again, h);
    let p = point(&h, s1(), f1(&h).unwrap());
    assert!(check_mcm(&h, p, &Formula::box_f(rule)).unwrap());
}

#[test]
fn contradictory_update_is_inconsistent() {
    let g = review_model();
    let k = update_mcm(&g, &Formula::bottom()).unwrap();
    assert!(!k.is_consistent());
    assert!(k.model().is_err());
    let text = render_model_file(&k, None);
    let back = parse_model_file(&text).unwrap();
    assert!(!back.knowledge.is_consistent());
}

#[test]
fn every_point_of_the_review_model_has_an_explanation() {
    let g = review_model();
    for p in g.points() {
        assert!(!enumerate_axps(&g, p).is_empty());
    }
}
