use std::collections::BTreeSet;

use plc_core::explain::{axp_formula, check_axp, check_subjective, subjective_formula, Kind};
use plc_core::gen::{random_formula, random_mcm, FormulaShape};
use plc_core::models::{update_mcm, Knowledge};
use plc_core::semantics::{check_mcm, truth_table};
use plc_core::syntax::parse_formula_unchecked;
use plc_core::{expand_cp, render_formula, Formula, Signature, Term};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sig() -> Signature {
    Signature::new(["p", "q", "r"], ["0", "1", "2"]).unwrap()
}

fn random_term(rng: &mut ChaCha8Rng, sig: &Signature) -> Term {
    let all = Term::all_over(sig.full_mask());
    all[rng.gen_range(0..all.len())]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn render_then_parse_is_identity(seed in any::<u64>(), size in 1usize..25) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = FormulaShape { dyn_depth: 2, cp: true, top: true };
        let f = random_formula(&mut rng, &sig(), size, &shape);
        let text = render_formula(&f);
        prop_assert_eq!(parse_formula_unchecked(&text).unwrap(), f, "{}", text);
    }

    #[test]
    fn ceteris_paribus_matches_its_expansion(seed in any::<u64>(), size in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = sig();
        let m = random_mcm(&mut rng, &s, 8, 4);
        let inner = random_formula(&mut rng, &s, size, &FormulaShape::default());
        let x: BTreeSet<String> = s.names_in(rng.gen_range(0..8)).into_iter().map(String::from).collect();
        let cp = Formula::Cp(x.clone(), Box::new(inner.clone()));
        let expanded = expand_cp(&x, &inner, &s).unwrap();
        prop_assert_eq!(truth_table(&m, &cp).unwrap(), truth_table(&m, &expanded).unwrap());
    }

    #[test]
    fn updates_shrink_and_boxf_free_ones_are_idempotent(seed in any::<u64>(), size in 1usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = sig();
        let m = random_mcm(&mut rng, &s, 8, 6);
        let phi = random_formula(&mut rng, &s, size, &FormulaShape::default());
        if let Knowledge::Consistent(h) = update_mcm(&m, &phi).unwrap() {
            prop_assert!(h.num_functions() <= m.num_functions());
            prop_assert!(h.functions().iter().all(|f| m.functions().contains(f)));
            let classifier_local = phi.is_static()
                && !phi.subformulas().iter().any(|g| matches!(g, Formula::BoxF(_)));
            if classifier_local {
                prop_assert_eq!(update_mcm(&h, &phi).unwrap(), Knowledge::Consistent(h.clone()));
            }
        }
    }

    #[test]
    fn explanation_checks_agree_with_the_model_checker(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = sig();
        let m = random_mcm(&mut rng, &s, 8, 4);
        let t = random_term(&mut rng, &s);
        let x = rng.gen_range(0..3);
        let name = s.values()[x].clone();
        for p in m.points() {
            let by_table = check_axp(&m, p, &t, x);
            let by_formula = check_mcm(&m, p, &axp_formula(&t, &name, &s)).unwrap();
            prop_assert_eq!(by_table, by_formula);
            for kind in [Kind::Axp, Kind::Pimp] {
                let by_table = check_subjective(&m, p, kind, &t, x);
                let by_formula = check_mcm(&m, p, &subjective_formula(kind, &t, &name, &s)).unwrap();
                prop_assert_eq!(by_table, by_formula);
            }
        }
    }

    #[test]
    fn terms_are_ordered_by_length(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = sig();
        let t = random_term(&mut rng, &s);
        let parts = t.parts();
        prop_assert_eq!(parts.len(), 1usize << t.len());
        prop_assert!(parts.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(parts.iter().all(|u| u.is_part_of(&t)));
        let back = Term::parse(&t.render(&s), &s).unwrap();
        prop_assert_eq!(back, t);
    }
}

#[test]
fn boxf_updates_need_not_be_idempotent() {
    let text = "val: 0 1\natoms: p\nstates: all\nfunctions:\nf: {}=0; {p}=0\ng: {}=1; {p}=1\n";
    let Knowledge::Consistent(m) = plc_core::models::parse_model_file(text).unwrap().knowledge else {
        panic!("two classifiers")
    };
    let phi = parse_formula_unchecked("=1 & diaF =0").unwrap();
    let Knowledge::Consistent(h) = update_mcm(&m, &phi).unwrap() else { panic!("g survives") };
    assert_eq!(h.num_functions(), 1);
    assert!(matches!(update_mcm(&h, &phi).unwrap(), Knowledge::Inconsistent { .. }));
}
