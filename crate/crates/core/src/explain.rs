//! Prime implicants and abductive explanations, objective and subjective.
//!
//! All checks work directly on the tables of the model; the `*_formula`
//! builders give the same notions as formulas for cross-checking with the
//! model checker.

use crate::formula::Formula;
use crate::models::{Mcm, Point};
use crate::term::Term;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Pimp,
    Axp,
}

/// Every state satisfying `term` is classified `x` by function `f`.
pub fn is_implicant(model: &Mcm, f: usize, term: &Term, x: usize) -> bool {
    model
        .states()
        .iter()
        .enumerate()
        .all(|(s, &mask)| !term.satisfied_by(mask) || model.value(f, s) == x)
}

/// `PImp(λ, x)` for function `f`: at every state satisfying `λ`, the output
/// is `x` and, for each literal of `λ`, some state agreeing with it on the
/// other literals' atoms has an output other than `x`. When no state
/// satisfies `λ` this holds vacuously.
pub fn check_pimp(model: &Mcm, f: usize, term: &Term, x: usize) -> bool {
    let states = model.states();
    if !states.iter().any(|&s| term.satisfied_by(s)) {
        return true;
    }
    is_implicant(model, f, term, x)
        && term
            .literals()
            .iter()
            .all(|&(i, _)| !is_implicant(model, f, &term.without(i), x))
}

/// `AXp(λ, x)`: the point's state satisfies `λ` and `λ` is a prime implicant
/// for the point's function.
pub fn check_axp(model: &Mcm, point: Point, term: &Term, x: usize) -> bool {
    term.satisfied_by(model.states()[point.state]) && check_pimp(model, point.function, term, x)
}

/// The `□_F` version: the check holds for every classifier at the point's
/// state.
pub fn check_subjective(model: &Mcm, point: Point, kind: Kind, term: &Term, x: usize) -> bool {
    (0..model.num_functions()).all(|g| {
        let p = Point {
            state: point.state,
            function: g,
        };
        match kind {
            Kind::Pimp => check_pimp(model, g, term, x),
            Kind::Axp => check_axp(model, p, term, x),
        }
    })
}

/// The actual classification at a point.
pub fn classification(model: &Mcm, point: Point) -> usize {
    model.value(point.function, point.state)
}

/// All abductive explanations of the actual classification, in canonical term
/// order. Only parts of the state's complete term can hold at the state, so
/// those are the candidates.
pub fn enumerate_axps(model: &Mcm, point: Point) -> Vec<Term> {
    let x = classification(model, point);
    let full = Term::of_state(model.states()[point.state], model.sig().full_mask());
    full.parts()
        .into_iter()
        .filter(|t| check_axp(model, point, t, x))
        .collect()
}

/// All prime implicants of `f` for `x` over the signature's atoms.
pub fn enumerate_pimps(model: &Mcm, f: usize, x: usize) -> Vec<Term> {
    Term::all_over(model.sig().full_mask())
        .into_iter()
        .filter(|t| check_pimp(model, f, t, x))
        .collect()
}

/// All subjective explanations for `x` (default: the actual
/// classification). May be empty.
pub fn enumerate_subjective(model: &Mcm, point: Point, kind: Kind, x: Option<usize>) -> Vec<Term> {
    let x = x.unwrap_or_else(|| classification(model, point));
    let candidates = match kind {
        Kind::Axp => Term::of_state(model.states()[point.state], model.sig().full_mask()).parts(),
        Kind::Pimp => Term::all_over(model.sig().full_mask()),
    };
    candidates
        .into_iter()
        .filter(|t| check_subjective(model, point, kind, t, x))
        .collect()
}

/// `□_I(λ → (=x ∧ ⋀_{p ∈ Atm(λ)} ⟨Atm(λ)∖{p}⟩ ¬=x))`.
pub fn pimp_formula(term: &Term, x: &str, sig: &crate::Signature) -> Formula {
    let lambda = term.to_formula(sig);
    let atoms: Vec<String> = sig
        .names_in(term.atoms())
        .into_iter()
        .map(String::from)
        .collect();
    let minimal = atoms.iter().map(|p| {
        Formula::cp_dia(
            atoms.iter().filter(|q| *q != p).cloned(),
            Formula::not(Formula::dec(x)),
        )
    });
    let body = Formula::conj(std::iter::once(Formula::dec(x)).chain(minimal));
    Formula::box_i(Formula::implies(lambda, body))
}

/// `λ ∧ PImp(λ, x)`.
pub fn axp_formula(term: &Term, x: &str, sig: &crate::Signature) -> Formula {
    Formula::and(term.to_formula(sig), pimp_formula(term, x, sig))
}

pub fn subjective_formula(kind: Kind, term: &Term, x: &str, sig: &crate::Signature) -> Formula {
    Formula::box_f(match kind {
        Kind::Pimp => pimp_formula(term, x, sig),
        Kind::Axp => axp_formula(term, x, sig),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ClassifierFn;
    use crate::semantics::check_mcm;
    use crate::Signature;

    fn model() -> Mcm {
        // f0 = p ∧ q, f1 = constant 0, over the full cube of {p, q}.
        let sig = Signature::new(["p", "q"], ["0", "1"]).unwrap();
        Mcm::new(
            sig,
            vec![0, 1, 2, 3],
            vec![ClassifierFn::new(vec![0, 0, 0, 1]), ClassifierFn::new(vec![0, 0, 0, 0])],
        )
        .unwrap()
    }

    #[test]
    fn conjunction_classifier() {
        let m = model();
        let sig = m.sig().clone();
        let pq = Term::parse("p & q", &sig).unwrap();
        assert!(is_implicant(&m, 0, &pq, 1));
        assert!(check_pimp(&m, 0, &pq, 1));
        assert!(!check_pimp(&m, 0, &Term::parse("p", &sig).unwrap(), 1));
        let at = Point { state: 3, function: 0 };
        assert_eq!(enumerate_axps(&m, at), vec![pq]);
        let at0 = Point { state: 0, function: 0 };
        let rendered: Vec<String> = enumerate_axps(&m, at0).iter().map(|t| t.render(&sig)).collect();
        assert_eq!(rendered, ["~p", "~q"]);
    }

    #[test]
    fn constant_classifier_has_empty_explanation() {
        let m = model();
        let at = Point { state: 2, function: 1 };
        assert_eq!(enumerate_axps(&m, at), vec![Term::empty()]);
        assert!(check_pimp(&m, 1, &Term::empty(), 0));
    }

    #[test]
    fn formulas_agree_with_direct_checks() {
        let m = model();
        let sig = m.sig().clone();
        for t in Term::all_over(sig.full_mask()) {
            for (x, xn) in ["0", "1"].iter().enumerate() {
                for p in m.points().collect::<Vec<_>>() {
                    let by_model = check_mcm(&m, p, &axp_formula(&t, xn, &sig)).unwrap();
                    assert_eq!(by_model, check_axp(&m, p, &t, x), "{} {xn}", t.render(&sig));
                    let sub = check_mcm(&m, p, &subjective_formula(Kind::Pimp, &t, xn, &sig)).unwrap();
                    assert_eq!(sub, check_subjective(&m, p, Kind::Pimp, &t, x));
                }
            }
        }
    }
}
