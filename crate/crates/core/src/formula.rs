use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::signature::Signature;

/// Formulas of the static language extended with ceteris-paribus and dynamic
/// operators.
///
/// Derived connectives (`|`, `->`, `<->`, diamonds) are desugared into the
/// primitives at construction; the printer re-sugars them.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Top,
    Atom(String),
    /// Decision atom `t(x)`: the current classifier outputs value `x`.
    Dec(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    /// Quantifies over all input instances for the current classifier.
    BoxI(Box<Formula>),
    /// Quantifies over all classifiers for the current input instance.
    BoxF(Box<Formula>),
    /// `[X] φ`: φ holds at every instance agreeing with the current one on `X`.
    Cp(BTreeSet<String>, Box<Formula>),
    /// `[! φ] ψ`: ψ holds after discarding every classifier that does not
    /// globally satisfy φ.
    Dyn(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn top() -> Formula {
        Formula::Top
    }

    pub fn bottom() -> Formula {
        Formula::not(Formula::Top)
    }

    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::Atom(name.into())
    }

    pub fn dec(value: impl Into<String>) -> Formula {
        Formula::Dec(value.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(a, Formula::not(b)))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(
            Formula::implies(a.clone(), b.clone()),
            Formula::implies(b, a),
        )
    }

    pub fn box_i(f: Formula) -> Formula {
        Formula::BoxI(Box::new(f))
    }

    pub fn box_f(f: Formula) -> Formula {
        Formula::BoxF(Box::new(f))
    }

    pub fn dia_i(f: Formula) -> Formula {
        Formula::not(Formula::box_i(Formula::not(f)))
    }

    pub fn dia_f(f: Formula) -> Formula {
        Formula::not(Formula::box_f(Formula::not(f)))
    }

    pub fn cp<I, S>(atoms: I, f: Formula) -> Formula
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Formula::Cp(atoms.into_iter().map(Into::into).collect(), Box::new(f))
    }

    /// `⟨X⟩ φ`, the dual of [`Formula::cp`].
    pub fn cp_dia<I, S>(atoms: I, f: Formula) -> Formula
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Formula::not(Formula::cp(atoms, Formula::not(f)))
    }

    pub fn dynamic(announcement: Formula, scope: Formula) -> Formula {
        Formula::Dyn(Box::new(announcement), Box::new(scope))
    }

    /// Left-nested conjunction; the empty conjunction is `Top`.
    pub fn conj<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::Top)
    }

    /// Left-nested disjunction; the empty disjunction is `¬Top`.
    pub fn disj<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        items
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or_else(Formula::bottom)
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Top | Formula::Atom(_) | Formula::Dec(_) => 1,
            Formula::Not(a) | Formula::BoxI(a) | Formula::BoxF(a) | Formula::Cp(_, a) => {
                1 + a.size()
            }
            Formula::And(a, b) | Formula::Dyn(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Maximum nesting of dynamic operators.
    pub fn dyn_depth(&self) -> usize {
        match self {
            Formula::Top | Formula::Atom(_) | Formula::Dec(_) => 0,
            Formula::Not(a) | Formula::BoxI(a) | Formula::BoxF(a) | Formula::Cp(_, a) => {
                a.dyn_depth()
            }
            Formula::And(a, b) => a.dyn_depth().max(b.dyn_depth()),
            Formula::Dyn(a, b) => 1 + a.dyn_depth().max(b.dyn_depth()),
        }
    }

    pub fn is_static(&self) -> bool {
        self.dyn_depth() == 0
    }

    pub fn has_cp(&self) -> bool {
        match self {
            Formula::Top | Formula::Atom(_) | Formula::Dec(_) => false,
            Formula::Cp(..) => true,
            Formula::Not(a) | Formula::BoxI(a) | Formula::BoxF(a) => a.has_cp(),
            Formula::And(a, b) | Formula::Dyn(a, b) => a.has_cp() || b.has_cp(),
        }
    }

    /// Immediate subformulas.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Top | Formula::Atom(_) | Formula::Dec(_) => vec![],
            Formula::Not(a) | Formula::BoxI(a) | Formula::BoxF(a) | Formula::Cp(_, a) => {
                vec![a]
            }
            Formula::And(a, b) | Formula::Dyn(a, b) => vec![a, b],
        }
    }

    /// All subformulas, including the formula itself.
    pub fn subformulas(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        self.collect_subformulas(&mut out);
        out
    }

    fn collect_subformulas(&self, out: &mut BTreeSet<Formula>) {
        if out.insert(self.clone()) {
            for c in self.children() {
                c.collect_subformulas(out);
            }
        }
    }

    /// Subformulas plus one decision atom per declared value.
    pub fn subformulas_plus(&self, sig: &Signature) -> BTreeSet<Formula> {
        let mut out = self.subformulas();
        out.extend(sig.values().iter().map(Formula::dec));
        out
    }

    /// Input atoms occurring in the formula. Atoms that only index a
    /// ceteris-paribus operator count as occurrences.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(p) => {
                out.insert(p.clone());
            }
            Formula::Cp(x, a) => {
                out.extend(x.iter().cloned());
                a.collect_atoms(out);
            }
            _ => {
                for c in self.children() {
                    c.collect_atoms(out);
                }
            }
        }
    }

    fn collect_values(&self, out: &mut BTreeSet<String>) {
        if let Formula::Dec(v) = self {
            out.insert(v.clone());
        }
        for c in self.children() {
            c.collect_values(out);
        }
    }

    /// Checks every atom and value name against the signature.
    pub fn check_signature(&self, sig: &Signature) -> Result<()> {
        for a in self.atoms() {
            sig.atom(&a)?;
        }
        let mut values = BTreeSet::new();
        self.collect_values(&mut values);
        for v in values {
            sig.value(&v)?;
        }
        Ok(())
    }

    /// Replaces every ceteris-paribus node by its `□_I` expansion.
    pub fn expand_all_cp(&self, sig: &Signature) -> Result<Formula> {
        Ok(match self {
            Formula::Top | Formula::Atom(_) | Formula::Dec(_) => self.clone(),
            Formula::Not(a) => Formula::not(a.expand_all_cp(sig)?),
            Formula::BoxI(a) => Formula::box_i(a.expand_all_cp(sig)?),
            Formula::BoxF(a) => Formula::box_f(a.expand_all_cp(sig)?),
            Formula::And(a, b) => Formula::and(a.expand_all_cp(sig)?, b.expand_all_cp(sig)?),
            Formula::Dyn(a, b) => {
                Formula::dynamic(a.expand_all_cp(sig)?, b.expand_all_cp(sig)?)
            }
            Formula::Cp(x, a) => expand_cp(x, &a.expand_all_cp(sig)?, sig)?,
        })
    }
}

/// `conj(X, Y)`: every atom of `x` positively, every other atom of `y`
/// negatively, in the order of `y`.
pub fn conj_term(x: &BTreeSet<String>, y: &[String]) -> Result<Formula> {
    if x.iter().any(|p| !y.contains(p)) {
        return Err(Error::NotSubset(
            format!("{{{}}}", x.iter().cloned().collect::<Vec<_>>().join(",")),
            format!("{{{}}}", y.join(",")),
        ));
    }
    Ok(Formula::conj(y.iter().map(|p| {
        if x.contains(p) {
            Formula::atom(p.as_str())
        } else {
            Formula::not(Formula::atom(p.as_str()))
        }
    })))
}

/// Unfolds `[X] φ` into the conjunction over `Y ⊆ X` of
/// `conj(Y,X) → □_I(conj(Y,X) → φ)`.
///
/// The result has `2^|X|` conjuncts; subsets are enumerated in canonical bit
/// order over `X` sorted by the signature's atom order.
pub fn expand_cp(x: &BTreeSet<String>, phi: &Formula, sig: &Signature) -> Result<Formula> {
    let mut ordered: Vec<(usize, String)> = x
        .iter()
        .map(|p| Ok((sig.atom(p)?, p.clone())))
        .collect::<Result<_>>()?;
    ordered.sort();
    let ordered: Vec<String> = ordered.into_iter().map(|(_, p)| p).collect();
    expand_cp_ordered(&ordered, phi)
}

/// [`expand_cp`] with the atom order given explicitly.
pub fn expand_cp_ordered(ordered: &[String], phi: &Formula) -> Result<Formula> {
    if ordered.len() >= 24 {
        return Err(Error::NodeBudget(1 << 24));
    }
    let conjuncts = (0u64..1 << ordered.len()).map(|bits| {
        let y: BTreeSet<String> = ordered
            .iter()
            .enumerate()
            .filter(|(i, _)| bits >> i & 1 == 1)
            .map(|(_, p)| p.clone())
            .collect();
        let c = conj_term(&y, ordered).expect("subset by construction");
        Formula::implies(
            c.clone(),
            Formula::box_i(Formula::implies(c, phi.clone())),
        )
    });
    Ok(Formula::conj(conjuncts))
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::render_formula(self))
    }
}
