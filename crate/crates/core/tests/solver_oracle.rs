use plc_core::gen::{all_formulas, random_formula, FormulaShape};
use plc_core::semantics::check_mcm;
use plc_core::solver::{
    brute_force_quasi_sat, brute_force_sat, sat_finite, sat_open, BruteBounds, BruteOutcome,
    Config, SatOutcome,
};
use plc_core::{Formula, Signature};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn binary() -> Vec<String> {
    vec!["0".into(), "1".into()]
}

// Over a single atom the bounds (2 states, 4 classifiers) cover every MCM,
// so the brute-force answer is exact.
#[test]
fn finite_agrees_with_exhaustive_search_over_one_atom() {
    let sig = Signature::new(["p"], ["0", "1"]).unwrap();
    let bounds = BruteBounds {
        max_states: 2,
        max_functions: 4,
    };
    let corpus = all_formulas(&sig, 5, true);
    for phi in &corpus {
        let fast = sat_finite(phi, &sig, &Config::default()).unwrap();
        let slow = brute_force_sat(phi, &sig, &bounds).unwrap();
        assert_eq!(fast.is_sat(), matches!(slow, BruteOutcome::Sat(_)), "{phi}");
        if let SatOutcome::Sat(w) = fast {
            assert!(check_mcm(&w.model, w.point, phi).unwrap());
        }
    }
}

#[test]
fn finite_is_consistent_with_bounded_search_over_two_atoms() {
    let sig = Signature::new(["p", "q"], ["0", "1"]).unwrap();
    let bounds = BruteBounds {
        max_states: 4,
        max_functions: 2,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let shape = FormulaShape::default();
    for i in 0..300 {
        let phi = random_formula(&mut rng, &sig, 3 + i % 9, &shape);
        let fast = sat_finite(&phi, &sig, &Config::default()).unwrap();
        match brute_force_sat(&phi, &sig, &bounds).unwrap() {
            BruteOutcome::Sat(_) => assert!(fast.is_sat(), "{phi}"),
            BruteOutcome::UnsatWithinBounds => {
                if let Some(w) = fast.witness() {
                    assert!(w.model.num_functions() > 2, "{phi}");
                }
            }
        }
    }
}

// Every MCM is a quasi-model, and grids found by the quasi search are
// open-mode models.
#[test]
fn open_mode_brackets() {
    let sig = Signature::new(["p", "q"], ["0", "1"]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let shape = FormulaShape::default();
    let small = BruteBounds {
        max_states: 2,
        max_functions: 2,
    };
    for i in 0..300 {
        let phi = random_formula(&mut rng, &sig, 3 + i % 8, &shape);
        let open = sat_open(&phi, &binary(), &Config::default()).unwrap();
        let finite = sat_finite(&phi, &sig, &Config::default()).unwrap();
        if finite.is_sat() {
            assert!(open.is_sat(), "{phi}");
        }
        if brute_force_quasi_sat(&phi, &binary(), &small).unwrap().is_some() {
            assert!(open.is_sat(), "{phi}");
        }
        if let Some(w) = open.witness() {
            assert!(check_mcm(&w.model, w.point, &phi).unwrap());
        }
    }
}

#[test]
fn open_mode_differs_from_finite_on_functionality() {
    let sig = Signature::new(["p"], ["0", "1"]).unwrap();
    let phi: Formula = "p & =1 & diaI (p & =0)".parse().unwrap();
    assert_eq!(sat_finite(&phi, &sig, &Config::default()).unwrap(), SatOutcome::Unsat);
    assert!(sat_open(&phi, &binary(), &Config::default()).unwrap().is_sat());
}

#[test]
fn only_functionality_needs_the_finite_vocabulary() {
    use plc_core::solver::{axiom_instances, valid_open, Schema};
    let sig = Signature::new(["p", "q"], ["0", "1"]).unwrap();
    for inst in axiom_instances(&sig, 2, 17, 10) {
        let open = valid_open(&inst.formula, sig.values(), &Config::default()).unwrap();
        assert_eq!(open.is_valid(), inst.schema != Schema::Funct, "{} {}", inst.schema, inst.formula);
    }
}
