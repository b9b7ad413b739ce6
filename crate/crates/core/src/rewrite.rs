//! Elimination of announcement operators and light simplification.

use crate::error::{Error, Result};
use crate::formula::{expand_cp_ordered, Formula};

/// Default cap on the size of a reduced formula.
pub const DEFAULT_NODE_BUDGET: usize = 1 << 20;

/// Rewrites every `[! χ] ψ` away, innermost first, with the reduction
/// equivalences:
///
/// ```text
/// [χ]p      ↔ (□_I χ → p)           [χ]=x      ↔ (□_I χ → =x)
/// [χ]¬ψ     ↔ (□_I χ → ¬[χ]ψ)       [χ](ψ ∧ θ) ↔ [χ]ψ ∧ [χ]θ
/// [χ]□_I ψ  ↔ (□_I χ → □_I [χ]ψ)    [χ]□_F ψ   ↔ (□_I χ → □_F [χ]ψ)
/// ```
///
/// `[χ]⊤` is treated like an atom. A ceteris-paribus node in the scope of an
/// announcement is expanded (atoms in name order) before the announcement
/// is pushed through it.
pub fn reduce_dynamic(phi: &Formula) -> Result<Formula> {
    reduce_dynamic_with_budget(phi, DEFAULT_NODE_BUDGET)
}

pub fn reduce_dynamic_with_budget(phi: &Formula, budget: usize) -> Result<Formula> {
    let mut r = Reducer { budget, used: 0 };
    r.reduce(phi)
}

struct Reducer {
    budget: usize,
    used: usize,
}

impl Reducer {
    fn spend(&mut self, f: Formula) -> Result<Formula> {
        self.used += 1;
        if self.used > self.budget {
            return Err(Error::NodeBudget(self.budget));
        }
        Ok(f)
    }

    fn reduce(&mut self, phi: &Formula) -> Result<Formula> {
        let out = match phi {
            Formula::Top | Formula::Atom(_) | Formula::Dec(_) => phi.clone(),
            Formula::Not(a) => Formula::not(self.reduce(a)?),
            Formula::And(a, b) => Formula::and(self.reduce(a)?, self.reduce(b)?),
            Formula::BoxI(a) => Formula::box_i(self.reduce(a)?),
            Formula::BoxF(a) => Formula::box_f(self.reduce(a)?),
            Formula::Cp(x, a) => Formula::Cp(x.clone(), Box::new(self.reduce(a)?)),
            Formula::Dyn(chi, psi) => {
                let chi = self.reduce(chi)?;
                let psi = self.reduce(psi)?;
                return self.push(&chi, &psi);
            }
        };
        self.spend(out)
    }

    /// `[χ]ψ` for announcement-free `χ` and `ψ`.
    fn push(&mut self, chi: &Formula, psi: &Formula) -> Result<Formula> {
        let guard = |body: Formula| Formula::implies(Formula::box_i(chi.clone()), body);
        let step = |this: &mut Self, next: &Formula| {
            debug_assert!(measure(next) < measure(psi), "reduction measure must decrease");
            this.push(chi, next)
        };
        let out = match psi {
            Formula::Top | Formula::Atom(_) | Formula::Dec(_) => guard(psi.clone()),
            Formula::Not(a) => guard(Formula::not(step(self, a)?)),
            Formula::And(a, b) => Formula::and(step(self, a)?, step(self, b)?),
            Formula::BoxI(a) => guard(Formula::box_i(step(self, a)?)),
            Formula::BoxF(a) => guard(Formula::box_f(step(self, a)?)),
            Formula::Cp(..) => {
                let expanded = expand_named(psi)?;
                self.used += expanded.size();
                return step(self, &expanded);
            }
            Formula::Dyn(..) => unreachable!("scopes are reduced before pushing"),
        };
        self.spend(out)
    }
}

/// Expands every ceteris-paribus node, inner ones first, with atoms in name
/// order.
fn expand_named(f: &Formula) -> Result<Formula> {
    Ok(match f {
        Formula::Top | Formula::Atom(_) | Formula::Dec(_) => f.clone(),
        Formula::Not(a) => Formula::not(expand_named(a)?),
        Formula::And(a, b) => Formula::and(expand_named(a)?, expand_named(b)?),
        Formula::BoxI(a) => Formula::box_i(expand_named(a)?),
        Formula::BoxF(a) => Formula::box_f(expand_named(a)?),
        Formula::Dyn(a, b) => Formula::dynamic(expand_named(a)?, expand_named(b)?),
        Formula::Cp(x, a) => {
            let atoms: Vec<String> = x.iter().cloned().collect();
            expand_cp_ordered(&atoms, &expand_named(a)?)?
        }
    })
}

/// Size once every ceteris-paribus node is expanded, plus one per such node:
/// strictly decreases along every step of [`Reducer::push`].
fn measure(f: &Formula) -> usize {
    fn cp_nodes(f: &Formula) -> usize {
        usize::from(matches!(f, Formula::Cp(..))) + f.children().into_iter().map(cp_nodes).sum::<usize>()
    }
    expand_named(f).expect("small index sets in checks").size() + cp_nodes(f)
}

/// Equivalence-preserving cleanup: constants are absorbed, double negations
/// removed, boxes of constants evaluated.
pub fn simplify(phi: &Formula) -> Formula {
    use Formula::*;
    let is_bottom = |f: &Formula| matches!(f, Not(a) if **a == Top);
    match phi {
        Top | Atom(_) | Dec(_) => phi.clone(),
        Not(a) => match simplify(a) {
            Not(inner) => *inner,
            a => Formula::not(a),
        },
        And(a, b) => {
            let (a, b) = (simplify(a), simplify(b));
            if a == Top {
                b
            } else if b == Top {
                a
            } else if is_bottom(&a) || is_bottom(&b) {
                Formula::bottom()
            } else {
                Formula::and(a, b)
            }
        }
        BoxI(a) | BoxF(a) | Cp(_, a) => {
            let a = simplify(a);
            if a == Top || is_bottom(&a) {
                // Both boxes and [X] are reflexive over nonempty models.
                return a;
            }
            match phi {
                BoxI(_) => Formula::box_i(a),
                BoxF(_) => Formula::box_f(a),
                Cp(x, _) => Cp(x.clone(), Box::new(a)),
                _ => unreachable!(),
            }
        }
        Dyn(chi, psi) => {
            let (chi, psi) = (simplify(chi), simplify(psi));
            if chi == Top || psi == Top {
                psi
            } else {
                Formula::dynamic(chi, psi)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula_unchecked as parse;

    fn has_dyn(f: &Formula) -> bool {
        matches!(f, Formula::Dyn(..)) || f.children().into_iter().any(has_dyn)
    }

    #[test]
    fn vacuous_announcement() {
        let r = reduce_dynamic(&parse("[! true] p").unwrap()).unwrap();
        assert_eq!(r, parse("boxI true -> p").unwrap());
        assert_eq!(simplify(&r), parse("p").unwrap());
    }

    #[test]
    fn decision_atom_axiom() {
        let r = reduce_dynamic(&parse("[! q] =1").unwrap()).unwrap();
        assert_eq!(r, parse("boxI q -> =1").unwrap());
    }

    #[test]
    fn box_f_axiom() {
        let r = reduce_dynamic(&parse("[! q] boxF p").unwrap()).unwrap();
        assert_eq!(r, parse("boxI q -> boxF (boxI q -> p)").unwrap());
    }

    #[test]
    fn nested_announcements_are_eliminated() {
        let f = parse("[! [! p] q] ~[! =0] boxI [p] =1").unwrap();
        let r = reduce_dynamic(&f).unwrap();
        assert!(!has_dyn(&r));
    }

    #[test]
    fn budget_is_enforced() {
        let f = parse("[! p] [! q] [! r] boxI boxF (p & q & r)").unwrap();
        assert!(matches!(
            reduce_dynamic_with_budget(&f, 5),
            Err(Error::NodeBudget(5))
        ));
    }

    #[test]
    fn simplifier_examples() {
        assert_eq!(simplify(&parse("~~p").unwrap()), parse("p").unwrap());
        assert_eq!(simplify(&parse("true & p").unwrap()), parse("p").unwrap());
        assert_eq!(simplify(&parse("boxI true").unwrap()), Formula::Top);
        assert_eq!(simplify(&parse("p & false").unwrap()), Formula::bottom());
    }
}
