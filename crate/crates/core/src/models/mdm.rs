use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::models::mcm::{ClassifierFn, InputInstance, Mcm, Point};
use crate::signature::Signature;

/// An equivalence relation on `0..n`, stored as a class map whose class ids
/// are the smallest member of each class.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    class_of: Vec<usize>,
}

impl Partition {
    pub fn identity(n: usize) -> Partition {
        Partition {
            class_of: (0..n).collect(),
        }
    }

    /// Worlds with equal keys share a class.
    pub fn from_key<K: std::hash::Hash + Eq>(n: usize, key: impl Fn(usize) -> K) -> Partition {
        let mut first: HashMap<K, usize> = HashMap::new();
        let class_of = (0..n).map(|w| *first.entry(key(w)).or_insert(w)).collect();
        Partition { class_of }
    }

    /// Builds from explicit classes; worlds not mentioned are singletons.
    pub fn from_classes(n: usize, classes: &[Vec<usize>]) -> Result<Partition> {
        let mut label: Vec<Option<usize>> = vec![None; n];
        for (k, class) in classes.iter().enumerate() {
            for &w in class {
                if w >= n {
                    return Err(Error::Model(format!("world {w} out of range")));
                }
                if label[w].is_some() {
                    return Err(Error::Model(format!("world {w} is in two classes")));
                }
                label[w] = Some(k);
            }
        }
        Ok(Partition::from_key(n, |w| match label[w] {
            Some(k) => (k, usize::MAX),
            None => (usize::MAX, w),
        }))
    }

    pub fn len(&self) -> usize {
        self.class_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class_of.is_empty()
    }

    pub fn class_of(&self, w: usize) -> usize {
        self.class_of[w]
    }

    pub fn related(&self, a: usize, b: usize) -> bool {
        self.class_of[a] == self.class_of[b]
    }

    /// Classes ordered by their smallest member; members ascending.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut map: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (w, &c) in self.class_of.iter().enumerate() {
            map.entry(c).or_default().push(w);
        }
        map.into_values().collect()
    }

    pub fn num_classes(&self) -> usize {
        self.class_of
            .iter()
            .enumerate()
            .filter(|(w, &c)| *w == c)
            .count()
    }
}

/// Multi-decision model: worlds with two equivalence relations and a
/// valuation giving each world an input instance and exactly one decision.
///
/// The same structure represents quasi-models; [`validate_mdm`] tells which
/// constraints hold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mdm {
    pub sig: Signature,
    pub labels: Vec<InputInstance>,
    pub decisions: Vec<usize>,
    pub rel_i: Partition,
    pub rel_f: Partition,
    /// Optional display names, one per world.
    pub names: Option<Vec<String>>,
}

pub type QuasiMdm = Mdm;

impl Mdm {
    pub fn new(
        sig: Signature,
        labels: Vec<InputInstance>,
        decisions: Vec<usize>,
        rel_i: Partition,
        rel_f: Partition,
    ) -> Result<Mdm> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::Model("a model needs at least one world".into()));
        }
        if decisions.len() != n || rel_i.len() != n || rel_f.len() != n {
            return Err(Error::Model("world count mismatch".into()));
        }
        if labels.iter().any(|&l| l & !sig.full_mask() != 0) {
            return Err(Error::Model("a world uses undeclared atoms".into()));
        }
        if decisions.iter().any(|&d| d >= sig.num_values()) {
            return Err(Error::Model("a world has an undeclared value".into()));
        }
        Ok(Mdm {
            sig,
            labels,
            decisions,
            rel_i,
            rel_f,
            names: None,
        })
    }

    pub fn num_worlds(&self) -> usize {
        self.labels.len()
    }

    pub fn world_name(&self, w: usize) -> String {
        match &self.names {
            Some(n) => n[w].clone(),
            None => format!("w{w}"),
        }
    }

    /// Worlds reachable from `w0` through either relation.
    pub fn component_of(&self, w0: usize) -> Vec<usize> {
        let n = self.num_worlds();
        let mut seen = vec![false; n];
        let mut stack = vec![w0];
        seen[w0] = true;
        while let Some(w) = stack.pop() {
            for v in 0..n {
                if !seen[v] && (self.rel_i.related(w, v) || self.rel_f.related(w, v)) {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        (0..n).filter(|&v| seen[v]).collect()
    }

    pub fn is_connected(&self) -> bool {
        self.component_of(0).len() == self.num_worlds()
    }

    /// The submodel on `worlds` (ascending), with a map from old to new ids.
    pub fn restrict(&self, worlds: &[usize]) -> (Mdm, Vec<Option<usize>>) {
        let mut map = vec![None; self.num_worlds()];
        for (k, &w) in worlds.iter().enumerate() {
            map[w] = Some(k);
        }
        let sub = Mdm {
            sig: self.sig.clone(),
            labels: worlds.iter().map(|&w| self.labels[w]).collect(),
            decisions: worlds.iter().map(|&w| self.decisions[w]).collect(),
            rel_i: Partition::from_key(worlds.len(), |k| self.rel_i.class_of(worlds[k])),
            rel_f: Partition::from_key(worlds.len(), |k| self.rel_f.class_of(worlds[k])),
            names: self
                .names
                .as_ref()
                .map(|n| worlds.iter().map(|&w| n[w].clone()).collect()),
        };
        (sub, map)
    }

    /// The generated submodel of `w0`.
    pub fn generated(&self, w0: usize) -> (Mdm, Vec<Option<usize>>) {
        self.restrict(&self.component_of(w0))
    }
}

/// Outcome of one constraint; `witness` is a violating pair of worlds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintCheck {
    pub name: &'static str,
    pub witness: Option<(usize, usize)>,
}

impl ConstraintCheck {
    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintReport {
    pub checks: Vec<ConstraintCheck>,
}

impl ConstraintReport {
    pub fn get(&self, name: &str) -> &ConstraintCheck {
        self.checks
            .iter()
            .find(|c| c.name == name)
            .expect("known constraint name")
    }

    fn all(&self, names: &[&str]) -> Result<()> {
        for c in &self.checks {
            if names.contains(&c.name) {
                if let Some(witness) = c.witness {
                    return Err(Error::Constraint {
                        constraint: c.name,
                        witness,
                    });
                }
            }
        }
        Ok(())
    }

    /// C1 to C5.
    pub fn require_mdm(&self) -> Result<()> {
        self.all(&["C1", "C2", "C3", "C4", "C5"])
    }

    /// Everything except C2.
    pub fn require_quasi(&self) -> Result<()> {
        self.all(&["C1", "C3", "C4", "C5"])
    }

    pub fn is_mdm(&self) -> bool {
        self.require_mdm().is_ok()
    }

    pub fn is_quasi(&self) -> bool {
        self.require_quasi().is_ok()
    }
}

/// Checks C1 (commutation), C2 (functionality), C3 (F-related worlds share
/// inputs), C4/C5 (exactly one decision, structural here) and C6 (the two
/// relations intersect in the identity).
pub fn validate_mdm(m: &Mdm) -> ConstraintReport {
    let n = m.num_worlds();
    // meets[(i, f)]: the I-class i and the F-class f share a world.
    let mut meets = BTreeSet::new();
    for w in 0..n {
        meets.insert((m.rel_i.class_of(w), m.rel_f.class_of(w)));
    }
    let mut c1 = None;
    let mut c2 = None;
    let mut c3 = None;
    let mut c6 = None;
    'outer: for w in 0..n {
        for v in 0..n {
            let i_then_f = meets.contains(&(m.rel_i.class_of(w), m.rel_f.class_of(v)));
            let f_then_i = meets.contains(&(m.rel_i.class_of(v), m.rel_f.class_of(w)));
            if c1.is_none() && i_then_f != f_then_i {
                c1 = Some((w, v));
            }
            if v <= w {
                continue;
            }
            let same_i = m.rel_i.related(w, v);
            let same_f = m.rel_f.related(w, v);
            if c2.is_none()
                && same_i
                && m.labels[w] == m.labels[v]
                && m.decisions[w] != m.decisions[v]
            {
                c2 = Some((w, v));
            }
            if c3.is_none() && same_f && m.labels[w] != m.labels[v] {
                c3 = Some((w, v));
            }
            if c6.is_none() && same_i && same_f {
                c6 = Some((w, v));
            }
            if c1.is_some() && c2.is_some() && c3.is_some() && c6.is_some() {
                break 'outer;
            }
        }
    }
    let check = |name, witness| ConstraintCheck { name, witness };
    ConstraintReport {
        checks: vec![
            check("C1", c1),
            check("C2", c2),
            check("C3", c3),
            check("C4", None),
            check("C5", None),
            check("C6", c6),
        ],
    }
}

/// World `(s, f)` has index `s * |Φ| + f`.
pub fn mcm_to_mdm(model: &Mcm) -> Mdm {
    let nf = model.num_functions();
    let n = model.num_states() * nf;
    let labels = (0..n).map(|w| model.states()[w / nf]).collect();
    let decisions = (0..n).map(|w| model.value(w % nf, w / nf)).collect();
    Mdm {
        sig: model.sig().clone(),
        labels,
        decisions,
        rel_i: Partition::from_key(n, |w| w % nf),
        rel_f: Partition::from_key(n, |w| w / nf),
        names: None,
    }
}

/// Index of world `(s, f)` in [`mcm_to_mdm`]'s output.
pub fn mdm_world_of(model: &Mcm, p: Point) -> usize {
    p.state * model.num_functions() + p.function
}

/// Reads an MCM off a connected MDM through the two quotients: worlds with
/// equal valuation in one I-class are merged, then I-classes inducing the
/// same function are merged. Returns the model and the image of each world.
pub fn mdm_to_mcm(m: &Mdm) -> Result<(Mcm, Vec<Point>)> {
    validate_mdm(m).require_mdm()?;
    if !m.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = m.num_worlds();

    // First quotient: |v| = worlds I-related to v with the same valuation.
    let bar = Partition::from_key(n, |w| (m.rel_i.class_of(w), m.labels[w], m.decisions[w]));
    let reps: Vec<usize> = bar.classes().into_iter().map(|c| c[0]).collect();
    let rep_index: HashMap<usize, usize> = reps.iter().enumerate().map(|(k, &w)| (w, k)).collect();
    let of = |w: usize| rep_index[&bar.class_of(w)];
    let n1 = reps.len();
    let lift = |rel: &Partition| -> Vec<Vec<bool>> {
        let mut r = vec![vec![false; n1]; n1];
        for a in 0..n {
            for b in 0..n {
                if rel.related(a, b) {
                    r[of(a)][of(b)] = true;
                }
            }
        }
        r
    };
    let i1 = lift(&m.rel_i);
    let f1 = lift(&m.rel_f);
    let i1 = as_partition(&i1).expect("lifted I-relation is an equivalence");
    let f1 = as_partition(&f1).expect("lifted F-relation is an equivalence on a connected model");
    let label1 = |k: usize| m.labels[reps[k]];
    let dec1 = |k: usize| m.decisions[reps[k]];
    // On a connected model the lifted F-relation links exactly the merged
    // worlds sharing an input, which is what lets states be read off labels.
    debug_assert!((0..n1).all(|a| (0..n1).all(|b| f1.related(a, b) == (label1(a) == label1(b)))));

    // Second quotient: τ ≈ τ' when the two I-classes never disagree on a
    // shared input; |v| ≃ |u| when their classes are ≈-related and the
    // inputs coincide.
    let taus = i1.classes();
    let tau_of: Vec<usize> = {
        let mut t = vec![0; n1];
        for (k, tau) in taus.iter().enumerate() {
            for &x in tau {
                t[x] = k;
            }
        }
        t
    };
    let agree = |a: &Vec<usize>, b: &Vec<usize>| {
        a.iter().all(|&x| {
            b.iter()
                .all(|&y| label1(x) != label1(y) || dec1(x) == dec1(y))
        })
    };
    let nt = taus.len();
    let mut approx = vec![vec![false; nt]; nt];
    for a in 0..nt {
        for b in 0..nt {
            approx[a][b] = agree(&taus[a], &taus[b]);
        }
    }
    let approx = as_partition(&approx).expect("≈ is an equivalence on a connected model");
    let sim = Partition::from_key(n1, |k| (approx.class_of(tau_of[k]), label1(k)));

    // Read the MCM: states are the surviving inputs, functions the merged
    // I-classes.
    let states: Vec<u64> = (0..n1).map(label1).collect::<BTreeSet<_>>().into_iter().collect();
    let mut tables: BTreeMap<usize, Vec<Option<usize>>> = BTreeMap::new();
    for k in 0..n1 {
        let col = approx.class_of(tau_of[k]);
        let s = states.binary_search(&label1(k)).expect("label is a state");
        let t = tables.entry(col).or_insert_with(|| vec![None; states.len()]);
        match t[s] {
            Some(v) => assert_eq!(v, dec1(k), "≃ merged worlds with different decisions"),
            None => t[s] = Some(dec1(k)),
        }
    }
    debug_assert_eq!(sim.num_classes(), tables.len() * states.len());
    let mut rows: Vec<(usize, Vec<usize>)> = tables
        .into_iter()
        .map(|(col, t)| {
            let t: Vec<usize> = t
                .into_iter()
                .map(|v| v.expect("every I-class meets every input in a connected model"))
                .collect();
            (col, t)
        })
        .collect();
    rows.sort_by(|a, b| a.1.cmp(&b.1));
    let col_index: HashMap<usize, usize> =
        rows.iter().enumerate().map(|(k, (c, _))| (*c, k)).collect();
    let mcm = Mcm::new(
        m.sig.clone(),
        states.clone(),
        rows.into_iter().map(|(_, t)| ClassifierFn::new(t)).collect(),
    )?;
    let map = (0..n)
        .map(|w| Point {
            state: mcm.state_index(m.labels[w]).expect("label is a state"),
            function: col_index[&approx.class_of(tau_of[of(w)])],
        })
        .collect();
    Ok((mcm, map))
}

/// [`mdm_to_mcm`] on the submodel generated by `w0`; the map covers only the
/// worlds of that submodel.
pub fn mdm_to_mcm_at(m: &Mdm, w0: usize) -> Result<(Mcm, Vec<Option<Point>>)> {
    let (sub, into) = m.generated(w0);
    let (mcm, map) = mdm_to_mcm(&sub)?;
    Ok((mcm, into.into_iter().map(|k| k.map(|k| map[k])).collect()))
}

fn as_partition(rel: &[Vec<bool>]) -> Option<Partition> {
    let n = rel.len();
    let p = Partition::from_key(n, |a| rel[a].clone());
    for a in 0..n {
        for b in 0..n {
            if rel[a][b] != p.related(a, b) {
                return None;
            }
        }
    }
    Some(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new(["p"], ["0", "1"]).unwrap()
    }

    #[test]
    fn singleton_passes_everything() {
        let m = Mdm::new(sig(), vec![1], vec![0], Partition::identity(1), Partition::identity(1))
            .unwrap();
        assert!(validate_mdm(&m).checks.iter().all(ConstraintCheck::holds));
    }

    #[test]
    fn c3_violation_has_witness() {
        let m = Mdm::new(
            sig(),
            vec![0, 1],
            vec![0, 0],
            Partition::identity(2),
            Partition::from_classes(2, &[vec![0, 1]]).unwrap(),
        )
        .unwrap();
        let r = validate_mdm(&m);
        assert_eq!(r.get("C3").witness, Some((0, 1)));
        assert!(r.get("C1").holds());
    }

    #[test]
    fn c1_violation() {
        // I = {0,1}{2}, F = {0}{1,2}: 0 I 1 F 2 but nothing F-related to 0 is
        // I-related to 2.
        let m = Mdm::new(
            sig(),
            vec![0, 0, 0],
            vec![0, 0, 0],
            Partition::from_classes(3, &[vec![0, 1]]).unwrap(),
            Partition::from_classes(3, &[vec![1, 2]]).unwrap(),
        )
        .unwrap();
        assert!(!validate_mdm(&m).get("C1").holds());
    }

    #[test]
    fn duplicated_worlds_are_merged() {
        // Two F-classes with the same input inside one I-class.
        let m = Mdm::new(
            sig(),
            vec![1, 1],
            vec![1, 1],
            Partition::from_classes(2, &[vec![0, 1]]).unwrap(),
            Partition::identity(2),
        )
        .unwrap();
        let (mcm, map) = mdm_to_mcm(&m).unwrap();
        assert_eq!(mcm.num_states(), 1);
        assert_eq!(map[0], map[1]);
    }

    #[test]
    fn duplicated_classifiers_are_merged() {
        // Grid of 2 inputs x 2 identical columns.
        let m = Mdm::new(
            sig(),
            vec![0, 1, 0, 1],
            vec![0, 1, 0, 1],
            Partition::from_classes(4, &[vec![0, 1], vec![2, 3]]).unwrap(),
            Partition::from_classes(4, &[vec![0, 2], vec![1, 3]]).unwrap(),
        )
        .unwrap();
        let (mcm, _) = mdm_to_mcm(&m).unwrap();
        assert_eq!(mcm.num_functions(), 1);
        assert_eq!(mcm.num_states(), 2);
    }

    #[test]
    fn disconnected_needs_a_root() {
        let m = Mdm::new(sig(), vec![0, 1], vec![0, 1], Partition::identity(2), Partition::identity(2))
            .unwrap();
        assert_eq!(mdm_to_mcm(&m).unwrap_err(), Error::Disconnected);
        let (mcm, map) = mdm_to_mcm_at(&m, 1).unwrap();
        assert_eq!(mcm.states(), &[1]);
        assert!(map[0].is_none());
    }
}
