//! Satisfaction for pointed MCMs and for (quasi-)multi-decision models.
//!
//! Both checkers compute truth tables bottom-up. For MCMs a table has one
//! entry per point, indexed by [`Mcm::point_index`].

use std::collections::HashMap;
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::models::{Mcm, Mdm, Point};

/// Truth of `phi` at one point.
pub fn check_mcm(model: &Mcm, point: Point, phi: &Formula) -> Result<bool> {
    Ok(truth_table(model, phi)?[model.point_index(point)])
}

/// Truth of `phi` at every point.
pub fn truth_table(model: &Mcm, phi: &Formula) -> Result<Vec<bool>> {
    phi.check_signature(model.sig())?;
    let mut ev = McmEval::new(model);
    let all: Rc<[bool]> = vec![true; model.num_functions()].into();
    Ok(ev.eval(phi, &all)?.as_ref().clone())
}

/// Per function: does it satisfy `phi` at every state?
pub fn globally_true(model: &Mcm, phi: &Formula) -> Result<Vec<bool>> {
    let t = truth_table(model, phi)?;
    let ns = model.num_states();
    Ok(t.chunks(ns).map(|c| c.iter().all(|&b| b)).collect())
}

pub fn valid_in_mcm(model: &Mcm, phi: &Formula) -> Result<bool> {
    Ok(truth_table(model, phi)?.into_iter().all(|b| b))
}

type Table = Rc<Vec<bool>>;

struct McmEval<'m, 'f> {
    model: &'m Mcm,
    // Keyed by the live function set and the subformula itself, so nested
    // announcements that recreate the same update share work.
    memo: HashMap<(Rc<[bool]>, &'f Formula), Table>,
}

impl<'m, 'f> McmEval<'m, 'f> {
    fn new(model: &'m Mcm) -> Self {
        McmEval {
            model,
            memo: HashMap::new(),
        }
    }

    fn eval(&mut self, phi: &'f Formula, active: &Rc<[bool]>) -> Result<Table> {
        let key = (active.clone(), phi);
        if let Some(t) = self.memo.get(&key) {
            return Ok(t.clone());
        }
        let t = Rc::new(self.compute(phi, active)?);
        self.memo.insert(key, t.clone());
        Ok(t)
    }

    fn compute(&mut self, phi: &'f Formula, active: &Rc<[bool]>) -> Result<Vec<bool>> {
        let m = self.model;
        let ns = m.num_states();
        let nf = m.num_functions();
        let n = ns * nf;
        Ok(match phi {
            Formula::Top => vec![true; n],
            Formula::Atom(p) => {
                let bit = 1u64 << m.sig().atom(p)?;
                (0..n).map(|i| m.states()[i % ns] & bit != 0).collect()
            }
            Formula::Dec(x) => {
                let v = m.sig().value(x)?;
                (0..n).map(|i| m.value(i / ns, i % ns) == v).collect()
            }
            Formula::Not(a) => self.eval(a, active)?.iter().map(|b| !b).collect(),
            Formula::And(a, b) => {
                let ta = self.eval(a, active)?;
                let tb = self.eval(b, active)?;
                ta.iter().zip(tb.iter()).map(|(x, y)| *x && *y).collect()
            }
            Formula::BoxI(a) => {
                let ta = self.eval(a, active)?;
                let mut out = vec![false; n];
                for f in 0..nf {
                    let all = ta[f * ns..(f + 1) * ns].iter().all(|&b| b);
                    out[f * ns..(f + 1) * ns].fill(all);
                }
                out
            }
            Formula::BoxF(a) => {
                let ta = self.eval(a, active)?;
                let mut out = vec![false; n];
                for s in 0..ns {
                    let all = (0..nf).filter(|&f| active[f]).all(|f| ta[f * ns + s]);
                    for f in 0..nf {
                        out[f * ns + s] = all;
                    }
                }
                out
            }
            Formula::Cp(x, a) => {
                let xmask = m.sig().mask_of(x)?;
                let ta = self.eval(a, active)?;
                let mut out = vec![false; n];
                for f in 0..nf {
                    let mut by_key: HashMap<u64, bool> = HashMap::new();
                    for s in 0..ns {
                        let e = by_key.entry(m.states()[s] & xmask).or_insert(true);
                        *e &= ta[f * ns + s];
                    }
                    for s in 0..ns {
                        out[f * ns + s] = by_key[&(m.states()[s] & xmask)];
                    }
                }
                out
            }
            Formula::Dyn(chi, psi) => {
                let tc = self.eval(chi, active)?;
                let survives: Vec<bool> = (0..nf)
                    .map(|f| active[f] && tc[f * ns..(f + 1) * ns].iter().all(|&b| b))
                    .collect();
                if !survives.iter().any(|&b| b) {
                    vec![true; n]
                } else {
                    let next: Rc<[bool]> = survives.clone().into();
                    let tp = self.eval(psi, &next)?;
                    (0..n).map(|i| !survives[i / ns] || tp[i]).collect()
                }
            }
        })
    }
}

/// Truth of a static, CP-free formula at world `w`.
pub fn check_mdm(m: &Mdm, w: usize, phi: &Formula) -> Result<bool> {
    if w >= m.num_worlds() {
        return Err(Error::Model(format!("world {w} out of range")));
    }
    Ok(mdm_truth_table(m, phi)?[w])
}

/// Truth of a static, CP-free formula at every world.
pub fn mdm_truth_table(m: &Mdm, phi: &Formula) -> Result<Vec<bool>> {
    phi.check_signature(&m.sig)?;
    let classes_i = m.rel_i.classes();
    let classes_f = m.rel_f.classes();
    let mut memo: HashMap<&Formula, Table> = HashMap::new();
    mdm_eval(m, phi, &classes_i, &classes_f, &mut memo).map(|t| t.as_ref().clone())
}

fn mdm_eval<'f>(
    m: &Mdm,
    phi: &'f Formula,
    ci: &[Vec<usize>],
    cf: &[Vec<usize>],
    memo: &mut HashMap<&'f Formula, Table>,
) -> Result<Table> {
    if let Some(t) = memo.get(phi) {
        return Ok(t.clone());
    }
    let n = m.num_worlds();
    let boxed = |t: &[bool], classes: &[Vec<usize>]| {
        let mut out = vec![false; n];
        for c in classes {
            let all = c.iter().all(|&w| t[w]);
            for &w in c {
                out[w] = all;
            }
        }
        out
    };
    let t = match phi {
        Formula::Top => vec![true; n],
        Formula::Atom(p) => {
            let bit = 1u64 << m.sig.atom(p)?;
            m.labels.iter().map(|l| l & bit != 0).collect()
        }
        Formula::Dec(x) => {
            let v = m.sig.value(x)?;
            m.decisions.iter().map(|&d| d == v).collect()
        }
        Formula::Not(a) => mdm_eval(m, a, ci, cf, memo)?.iter().map(|b| !b).collect(),
        Formula::And(a, b) => {
            let ta = mdm_eval(m, a, ci, cf, memo)?;
            let tb = mdm_eval(m, b, ci, cf, memo)?;
            ta.iter().zip(tb.iter()).map(|(x, y)| *x && *y).collect()
        }
        Formula::BoxI(a) => boxed(&mdm_eval(m, a, ci, cf, memo)?, ci),
        Formula::BoxF(a) => boxed(&mdm_eval(m, a, ci, cf, memo)?, cf),
        Formula::Cp(..) => {
            return Err(Error::Unsupported(
                "the ceteris-paribus operator on a multi-decision model (expand it first)",
            ))
        }
        Formula::Dyn(..) => {
            return Err(Error::Unsupported(
                "the dynamic operator on a multi-decision model (reduce it first)",
            ))
        }
    };
    let t = Rc::new(t);
    memo.insert(phi, t.clone());
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ClassifierFn, Partition};
    use crate::signature::Signature;
    use crate::syntax::parse_formula;

    fn sig() -> Signature {
        Signature::new(["p"], ["0", "1"]).unwrap()
    }

    /// S = {∅,{p}}, Φ = {identity-like f0: ∅↦0,{p}↦1 ; constant 1}.
    fn model() -> Mcm {
        Mcm::new(
            sig(),
            vec![0, 1],
            vec![ClassifierFn::new(vec![0, 1]), ClassifierFn::new(vec![1, 1])],
        )
        .unwrap()
    }

    fn f(text: &str) -> Formula {
        parse_formula(text, &sig()).unwrap()
    }

    #[test]
    fn basic_clauses() {
        let m = model();
        let at = |s, func| Point { state: s, function: func };
        assert!(check_mcm(&m, at(0, 0), &f("=0")).unwrap());
        assert!(!check_mcm(&m, at(0, 0), &f("boxI =0")).unwrap());
        assert!(check_mcm(&m, at(1, 0), &f("boxF =1")).unwrap());
        assert!(!check_mcm(&m, at(0, 1), &f("boxF =1")).unwrap());
        assert!(check_mcm(&m, at(0, 0), &f("[p] =0")).unwrap());
        assert!(!check_mcm(&m, at(0, 0), &f("[] =0")).unwrap());
    }

    #[test]
    fn at_least_and_independence_are_valid() {
        let m = model();
        assert!(valid_in_mcm(&m, &f("=0 | =1")).unwrap());
        assert!(valid_in_mcm(&m, &f("p -> boxF p")).unwrap());
        assert!(valid_in_mcm(&m, &f("boxI boxF =1 <-> boxF boxI =1")).unwrap());
    }

    #[test]
    fn dynamic_discards_classifiers() {
        let m = model();
        let p = Point { state: 0, function: 1 };
        // After learning "always 1", only the constant classifier remains.
        assert!(check_mcm(&m, p, &f("[! =1] boxF =1")).unwrap());
        // At a non-surviving classifier the announcement is vacuous.
        let q = Point { state: 0, function: 0 };
        assert!(check_mcm(&m, q, &f("[! =1] false")).unwrap());
        assert!(!check_mcm(&m, p, &f("[! =1] false")).unwrap());
    }

    #[test]
    fn unknown_names_error() {
        let m = model();
        let bad = Formula::atom("q");
        assert!(check_mcm(&m, Point { state: 0, function: 0 }, &bad).is_err());
    }

    #[test]
    fn mdm_singleton() {
        let m = Mdm::new(sig(), vec![1], vec![1], Partition::identity(1), Partition::identity(1))
            .unwrap();
        assert!(check_mdm(&m, 0, &f("boxI p & boxF p")).unwrap());
        assert!(matches!(
            check_mdm(&m, 0, &f("[p] p")),
            Err(Error::Unsupported(_))
        ));
    }
}
