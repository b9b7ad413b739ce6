use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::signature::Signature;

/// A consistent conjunction of literals over the signature's atoms, stored as
/// two disjoint bit masks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Term {
    pos: u64,
    neg: u64,
}

impl Term {
    pub fn new(pos: u64, neg: u64) -> Result<Term> {
        if pos & neg != 0 {
            return Err(Error::Model(format!(
                "term has an atom both positively and negatively (mask {:#x})",
                pos & neg
            )));
        }
        Ok(Term { pos, neg })
    }

    /// The empty conjunction.
    pub fn empty() -> Term {
        Term::default()
    }

    /// The complete term describing `state` over the atoms in `scope`.
    pub fn of_state(state: u64, scope: u64) -> Term {
        Term {
            pos: state & scope,
            neg: !state & scope,
        }
    }

    pub fn positives(&self) -> u64 {
        self.pos
    }

    pub fn negatives(&self) -> u64 {
        self.neg
    }

    /// `Atm(λ)` as a mask.
    pub fn atoms(&self) -> u64 {
        self.pos | self.neg
    }

    pub fn len(&self) -> usize {
        self.atoms().count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.atoms() == 0
    }

    pub fn satisfied_by(&self, state: u64) -> bool {
        state & self.pos == self.pos && state & self.neg == 0
    }

    /// `self ⊆ other`: every literal of `self` occurs in `other`.
    pub fn is_part_of(&self, other: &Term) -> bool {
        self.pos & !other.pos == 0 && self.neg & !other.neg == 0
    }

    /// The term without the literal on atom `i` (if any).
    pub fn without(&self, i: usize) -> Term {
        let keep = !(1u64 << i);
        Term {
            pos: self.pos & keep,
            neg: self.neg & keep,
        }
    }

    /// Literals as `(atom index, positive)`, by atom index.
    pub fn literals(&self) -> Vec<(usize, bool)> {
        (0..64)
            .filter(|i| self.atoms() >> i & 1 == 1)
            .map(|i| (i, self.pos >> i & 1 == 1))
            .collect()
    }

    /// The conjunction as a formula, literals in atom order.
    pub fn to_formula(&self, sig: &Signature) -> Formula {
        Formula::conj(self.literals().into_iter().map(|(i, positive)| {
            let a = Formula::atom(sig.atoms()[i].as_str());
            if positive {
                a
            } else {
                Formula::not(a)
            }
        }))
    }

    /// Recognises a conjunction of literals (or `true`); repeated literals are
    /// allowed, contradictory ones are not.
    pub fn from_formula(f: &Formula, sig: &Signature) -> Result<Term> {
        fn walk(f: &Formula, sig: &Signature, t: &mut Term) -> Result<()> {
            match f {
                Formula::Top => Ok(()),
                Formula::Atom(p) => {
                    t.pos |= 1 << sig.atom(p)?;
                    Ok(())
                }
                Formula::Not(inner) => match inner.as_ref() {
                    Formula::Atom(p) => {
                        t.neg |= 1 << sig.atom(p)?;
                        Ok(())
                    }
                    _ => Err(not_a_term(f)),
                },
                Formula::And(a, b) => {
                    walk(a, sig, t)?;
                    walk(b, sig, t)
                }
                _ => Err(not_a_term(f)),
            }
        }
        let mut t = Term::empty();
        walk(f, sig, &mut t)?;
        Term::new(t.pos, t.neg)
    }

    pub fn parse(text: &str, sig: &Signature) -> Result<Term> {
        Term::from_formula(&crate::syntax::parse_formula(text, sig)?, sig)
    }

    pub fn render(&self, sig: &Signature) -> String {
        self.to_formula(sig).to_string()
    }

    /// Every term over the atoms in `scope` (3^|scope| of them), in canonical
    /// order.
    pub fn all_over(scope: u64) -> Vec<Term> {
        let idx: Vec<usize> = (0..64).filter(|i| scope >> i & 1 == 1).collect();
        let mut out = vec![Term::empty()];
        for &i in &idx {
            let bit = 1u64 << i;
            let mut next = Vec::with_capacity(out.len() * 3);
            for t in &out {
                next.push(*t);
                next.push(Term { pos: t.pos | bit, ..*t });
                next.push(Term { neg: t.neg | bit, ..*t });
            }
            out = next;
        }
        out.sort();
        out
    }

    /// Every part of this term, in canonical order.
    pub fn parts(&self) -> Vec<Term> {
        let lits = self.literals();
        let mut out: Vec<Term> = (0u64..1 << lits.len())
            .map(|bits| {
                let mut t = Term::empty();
                for (k, &(i, positive)) in lits.iter().enumerate() {
                    if bits >> k & 1 == 1 {
                        if positive {
                            t.pos |= 1 << i;
                        } else {
                            t.neg |= 1 << i;
                        }
                    }
                }
                t
            })
            .collect();
        out.sort();
        out
    }
}

fn not_a_term(f: &Formula) -> Error {
    Error::Parse {
        pos: 0,
        msg: format!("`{f}` is not a conjunction of literals"),
    }
}

/// Canonical order: fewer literals first, then literal sequences compared by
/// atom index with the positive literal first.
impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        let key = |t: &Term| -> Vec<(usize, bool)> {
            t.literals().into_iter().map(|(i, p)| (i, !p)).collect()
        };
        self.len()
            .cmp(&other.len())
            .then_with(|| key(self).cmp(&key(other)))
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Signature-free rendering with atom indices, for debugging.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("true");
        }
        let parts: Vec<String> = self
            .literals()
            .into_iter()
            .map(|(i, p)| if p { format!("#{i}") } else { format!("~#{i}") })
            .collect();
        f.write_str(&parts.join(" & "))
    }
}
