use std::collections::{BTreeMap, HashSet};

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::semantics;
use crate::signature::Signature;
use crate::solver::dag::{Dag, Node};

/// An input instance, as the bit mask of the atoms it makes true.
pub type InputInstance = u64;

/// A classifier: one output value index per state of the owning model, aligned
/// with [`Mcm::states`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassifierFn {
    pub name: Option<String>,
    pub table: Vec<usize>,
}

impl ClassifierFn {
    pub fn new(table: Vec<usize>) -> ClassifierFn {
        ClassifierFn { name: None, table }
    }

    pub fn named(name: impl Into<String>, table: Vec<usize>) -> ClassifierFn {
        ClassifierFn {
            name: Some(name.into()),
            table,
        }
    }
}

/// Multi-classifier model `(S, Φ)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mcm {
    sig: Signature,
    states: Vec<InputInstance>,
    functions: Vec<ClassifierFn>,
}

/// A point `(s, f)` of an MCM, by index into its states and functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub state: usize,
    pub function: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointedMcm {
    pub model: Mcm,
    pub point: Point,
}

impl PointedMcm {
    pub fn new(model: Mcm, point: Point) -> Result<PointedMcm> {
        if point.state >= model.num_states() || point.function >= model.num_functions() {
            return Err(Error::Model(format!(
                "point ({}, {}) is outside the model",
                point.state, point.function
            )));
        }
        Ok(PointedMcm { model, point })
    }

    pub fn check(&self, phi: &Formula) -> Result<bool> {
        semantics::check_mcm(&self.model, self.point, phi)
    }
}

impl Mcm {
    /// Builds a model from states in any order and tables aligned with that
    /// order. States are sorted by mask and the tables permuted to match.
    pub fn new(
        sig: Signature,
        states: Vec<InputInstance>,
        functions: Vec<ClassifierFn>,
    ) -> Result<Mcm> {
        if states.is_empty() {
            return Err(Error::Model("the state set is empty".into()));
        }
        if functions.is_empty() {
            return Err(Error::Model("the function set is empty".into()));
        }
        let full = sig.full_mask();
        let mut seen = HashSet::new();
        for &s in &states {
            if s & !full != 0 {
                return Err(Error::Model(format!("state {s:#x} uses undeclared atoms")));
            }
            if !seen.insert(s) {
                return Err(Error::Model(format!(
                    "duplicate state {}",
                    sig.render_set(s)
                )));
            }
        }
        let mut order: Vec<usize> = (0..states.len()).collect();
        order.sort_by_key(|&i| states[i]);
        let sorted: Vec<u64> = order.iter().map(|&i| states[i]).collect();

        let mut tables = HashSet::new();
        let mut names = HashSet::new();
        let mut fs = Vec::with_capacity(functions.len());
        for f in functions {
            if f.table.len() != states.len() {
                return Err(Error::Model(format!(
                    "function table has {} entries for {} states",
                    f.table.len(),
                    states.len()
                )));
            }
            if let Some(&v) = f.table.iter().find(|&&v| v >= sig.num_values()) {
                return Err(Error::Model(format!("value index {v} out of range")));
            }
            if let Some(n) = &f.name {
                if !names.insert(n.clone()) {
                    return Err(Error::Model(format!("duplicate function name `{n}`")));
                }
            }
            let table: Vec<usize> = order.iter().map(|&i| f.table[i]).collect();
            if !tables.insert(table.clone()) {
                return Err(Error::Model(match &f.name {
                    Some(n) => format!("function `{n}` duplicates another table"),
                    None => "duplicate function table".into(),
                }));
            }
            fs.push(ClassifierFn {
                name: f.name,
                table,
            });
        }
        Ok(Mcm {
            sig,
            states: sorted,
            functions: fs,
        })
    }

    pub fn sig(&self) -> &Signature {
        &self.sig
    }

    pub fn states(&self) -> &[InputInstance] {
        &self.states
    }

    pub fn functions(&self) -> &[ClassifierFn] {
        &self.functions
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_functions(&self) -> usize {
        self.functions.len()
    }

    pub fn num_points(&self) -> usize {
        self.states.len() * self.functions.len()
    }

    /// Points in function-major order, matching semantic truth tables.
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.num_functions())
            .flat_map(move |f| (0..self.num_states()).map(move |s| Point { state: s, function: f }))
    }

    pub fn point_index(&self, p: Point) -> usize {
        p.function * self.states.len() + p.state
    }

    pub fn state_index(&self, s: InputInstance) -> Option<usize> {
        self.states.binary_search(&s).ok()
    }

    pub fn function_index(&self, name: &str) -> Option<usize> {
        self.functions
            .iter()
            .position(|f| f.name.as_deref() == Some(name))
    }

    /// Output value index of function `f` at state `s` (both indices).
    pub fn value(&self, f: usize, s: usize) -> usize {
        self.functions[f].table[s]
    }

    pub fn is_full_cube(&self) -> bool {
        self.sig.num_atoms() < 64 && self.states.len() == 1usize << self.sig.num_atoms()
    }

    /// Display name of function `f`: its own name or `f<index>`.
    pub fn function_label(&self, f: usize) -> String {
        self.functions[f]
            .name
            .clone()
            .unwrap_or_else(|| format!("f{f}"))
    }

    /// Same state set and same set of tables, ignoring names and order.
    pub fn is_isomorphic(&self, other: &Mcm) -> bool {
        if self.sig != other.sig || self.states != other.states {
            return false;
        }
        let a: HashSet<&Vec<usize>> = self.functions.iter().map(|f| &f.table).collect();
        let b: HashSet<&Vec<usize>> = other.functions.iter().map(|f| &f.table).collect();
        a == b
    }

    /// The model with `Φ` restricted to the functions selected by `keep`,
    /// or `None` if nothing is kept.
    pub fn restrict(&self, keep: &[bool]) -> Option<Mcm> {
        let functions: Vec<ClassifierFn> = self
            .functions
            .iter()
            .zip(keep)
            .filter(|(_, &k)| k)
            .map(|(f, _)| f.clone())
            .collect();
        if functions.is_empty() {
            return None;
        }
        Some(Mcm {
            sig: self.sig.clone(),
            states: self.states.clone(),
            functions,
        })
    }
}

/// Which states a model is built over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StateSpec {
    All,
    List(Vec<InputInstance>),
}

/// An explicitly tabulated function: each state exactly once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitFn {
    pub name: Option<String>,
    pub rows: Vec<(InputInstance, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FunctionSpec {
    Explicit(Vec<ExplicitFn>),
    /// Keep every `f ∈ Val^S` that globally satisfies each constraint when it
    /// is the only classifier.
    Constraints(Vec<Formula>),
}

/// Largest `|Val|^|S|` the constraint builder will enumerate.
pub const MAX_ENUMERATED_FUNCTIONS: u64 = 1 << 22;

pub fn build_mcm(sig: &Signature, states: &StateSpec, spec: &FunctionSpec) -> Result<Mcm> {
    let states: Vec<u64> = match states {
        StateSpec::All => {
            if sig.num_atoms() > 20 {
                return Err(Error::BoundsTooLarge(format!(
                    "`states: all` over {} atoms",
                    sig.num_atoms()
                )));
            }
            (0..1u64 << sig.num_atoms()).collect()
        }
        StateSpec::List(l) => {
            let mut l = l.clone();
            l.sort_unstable();
            l
        }
    };
    match spec {
        FunctionSpec::Explicit(fns) => {
            let mut out = Vec::with_capacity(fns.len());
            for f in fns {
                let label = f.name.clone().unwrap_or_else(|| "function".into());
                let mut by_state = BTreeMap::new();
                for &(s, v) in &f.rows {
                    if v >= sig.num_values() {
                        return Err(Error::Model(format!("{label}: value index {v} out of range")));
                    }
                    if by_state.insert(s, v).is_some() {
                        return Err(Error::Model(format!(
                            "{label}: state {} listed twice",
                            sig.render_set(s)
                        )));
                    }
                }
                let mut table = Vec::with_capacity(states.len());
                for s in &states {
                    match by_state.remove(s) {
                        Some(v) => table.push(v),
                        None => {
                            return Err(Error::Model(format!(
                                "{label}: partial table, no value for {}",
                                sig.render_set(*s)
                            )))
                        }
                    }
                }
                if let Some(s) = by_state.keys().next() {
                    return Err(Error::Model(format!(
                        "{label}: {} is not a state of the model",
                        sig.render_set(*s)
                    )));
                }
                out.push(ClassifierFn {
                    name: f.name.clone(),
                    table,
                });
            }
            Mcm::new(sig.clone(), states, out)
        }
        FunctionSpec::Constraints(cs) => {
            for c in cs {
                c.check_signature(sig)?;
            }
            if states.len() as u64 != 1u64.checked_shl(sig.num_atoms() as u32).unwrap_or(0) {
                log::warn!(
                    "constraint mode over a partial state set; single-flip encodings of \
                     monotonicity are only faithful on the full cube"
                );
            }
            let tables = all_tables(sig.num_values(), states.len())?;
            let kept = match compile_constraints(sig, &states, cs)? {
                Some(fast) => tables
                    .into_iter()
                    .filter(|t| fast.accepts(t))
                    .map(ClassifierFn::new)
                    .collect(),
                None => {
                    let mut kept = Vec::new();
                    for table in tables {
                        let single = Mcm {
                            sig: sig.clone(),
                            states: states.clone(),
                            functions: vec![ClassifierFn::new(table)],
                        };
                        let mut ok = true;
                        for c in cs {
                            if !semantics::valid_in_mcm(&single, c)? {
                                ok = false;
                                break;
                            }
                        }
                        if ok {
                            kept.push(single.functions.into_iter().next().expect("one function"));
                        }
                    }
                    kept
                }
            };
            if kept.is_empty() {
                return Err(Error::Model("no function satisfies the constraints".into()));
            }
            Mcm::new(sig.clone(), states, kept)
        }
    }
}

/// Static constraints over at most 64 states, compiled for evaluation on
/// one table at a time with state sets as bit masks. With a single
/// classifier `□_F ψ` is just `ψ`.
struct Compiled {
    dag: Dag,
    atom_masks: Vec<u64>,
    all: u64,
    num_values: usize,
}

fn compile_constraints(sig: &Signature, states: &[u64], cs: &[Formula]) -> Result<Option<Compiled>> {
    if states.len() > 64 || cs.iter().any(|c| !c.is_static()) {
        return Ok(None);
    }
    let conj = Formula::conj(cs.iter().cloned()).expand_all_cp(sig)?;
    let dag = Dag::compile(&conj, &|p| sig.atom(p), &|v| sig.value(v))?;
    let atom_masks = (0..sig.num_atoms())
        .map(|bit| {
            states
                .iter()
                .enumerate()
                .filter(|(_, &s)| s >> bit & 1 == 1)
                .fold(0u64, |m, (i, _)| m | 1 << i)
        })
        .collect();
    Ok(Some(Compiled {
        dag,
        atom_masks,
        all: crate::signature::mask_of_len(states.len()),
        num_values: sig.num_values(),
    }))
}

impl Compiled {
    fn accepts(&self, table: &[usize]) -> bool {
        let mut dec = vec![0u64; self.num_values];
        for (i, &v) in table.iter().enumerate() {
            dec[v] |= 1 << i;
        }
        let mut val = vec![0u64; self.dag.len()];
        for (i, node) in self.dag.nodes.iter().enumerate() {
            val[i] = match *node {
                Node::Top => self.all,
                Node::Atom(bit) => self.atom_masks[bit],
                Node::Dec(v) => dec[v],
                Node::Not(a) => !val[a] & self.all,
                Node::And(a, b) => val[a] & val[b],
                Node::BoxI(a) => {
                    if val[a] == self.all {
                        self.all
                    } else {
                        0
                    }
                }
                Node::BoxF(a) => val[a],
            };
        }
        val[self.dag.root] == self.all
    }
}

/// Every table in `Val^S`, in lexicographic order (first state most
/// significant).
pub fn all_tables(num_values: usize, num_states: usize) -> Result<Vec<Vec<usize>>> {
    let count = (num_values as u64)
        .checked_pow(num_states as u32)
        .filter(|&c| c <= MAX_ENUMERATED_FUNCTIONS)
        .ok_or_else(|| {
            Error::BoundsTooLarge(format!(
                "{num_values}^{num_states} candidate functions"
            ))
        })?;
    let mut out = Vec::with_capacity(count as usize);
    let mut table = vec![0usize; num_states];
    loop {
        out.push(table.clone());
        let mut i = num_states;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            table[i] += 1;
            if table[i] < num_values {
                break;
            }
            table[i] = 0;
        }
    }
}

/// Result of a knowledge update. An update can discard every classifier; that
/// outcome is kept as a marker instead of an invalid model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Knowledge {
    Consistent(Mcm),
    Inconsistent {
        sig: Signature,
        states: Vec<InputInstance>,
    },
}

impl Knowledge {
    pub fn model(&self) -> Result<&Mcm> {
        match self {
            Knowledge::Consistent(m) => Ok(m),
            Knowledge::Inconsistent { .. } => Err(Error::Inconsistent),
        }
    }

    pub fn into_model(self) -> Result<Mcm> {
        match self {
            Knowledge::Consistent(m) => Ok(m),
            Knowledge::Inconsistent { .. } => Err(Error::Inconsistent),
        }
    }

    pub fn sig(&self) -> &Signature {
        match self {
            Knowledge::Consistent(m) => m.sig(),
            Knowledge::Inconsistent { sig, .. } => sig,
        }
    }

    pub fn states(&self) -> &[InputInstance] {
        match self {
            Knowledge::Consistent(m) => m.states(),
            Knowledge::Inconsistent { states, .. } => states,
        }
    }

    pub fn is_consistent(&self) -> bool {
        matches!(self, Knowledge::Consistent(_))
    }
}

/// `Γ^φ`: keep the classifiers that satisfy `φ` at every state of `Γ`.
pub fn update_mcm(model: &Mcm, phi: &Formula) -> Result<Knowledge> {
    let keep = semantics::globally_true(model, phi)?;
    Ok(match model.restrict(&keep) {
        Some(m) => Knowledge::Consistent(m),
        None => Knowledge::Inconsistent {
            sig: model.sig().clone(),
            states: model.states().to_vec(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_single_function() {
        let sig = Signature::new(["p"], ["0", "1"]).unwrap();
        let m = build_mcm(
            &sig,
            &StateSpec::All,
            &FunctionSpec::Explicit(vec![ExplicitFn {
                name: Some("f".into()),
                rows: vec![(1, 1), (0, 0)],
            }]),
        )
        .unwrap();
        assert_eq!(m.num_states(), 2);
        assert_eq!(m.num_functions(), 1);
        assert_eq!(m.functions()[0].table, vec![0, 1]);
    }

    #[test]
    fn explicit_errors() {
        let sig = Signature::new(["p"], ["0", "1"]).unwrap();
        let partial = FunctionSpec::Explicit(vec![ExplicitFn {
            name: None,
            rows: vec![(0, 0)],
        }]);
        assert!(build_mcm(&sig, &StateSpec::All, &partial).is_err());
        let dup = FunctionSpec::Explicit(vec![
            ExplicitFn {
                name: Some("a".into()),
                rows: vec![(0, 0), (1, 1)],
            },
            ExplicitFn {
                name: Some("b".into()),
                rows: vec![(1, 1), (0, 0)],
            },
        ]);
        assert!(matches!(
            build_mcm(&sig, &StateSpec::All, &dup),
            Err(Error::Model(_))
        ));
    }

    #[test]
    fn table_enumeration_order() {
        let t = all_tables(2, 2).unwrap();
        assert_eq!(t, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert!(all_tables(2, 40).is_err());
    }

    #[test]
    fn states_are_sorted_with_tables() {
        let sig = Signature::new(["p"], ["0", "1"]).unwrap();
        let m = Mcm::new(sig, vec![1, 0], vec![ClassifierFn::new(vec![1, 0])]).unwrap();
        assert_eq!(m.states(), &[0, 1]);
        assert_eq!(m.functions()[0].table, vec![0, 1]);
    }
}
