//! Seeded generators for formulas and models, used by property tests, the
//! acceptance suite and the axiom-instance generator.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::formula::Formula;
use crate::models::{all_tables, ClassifierFn, Mcm, Mdm, Partition};
use crate::signature::Signature;

#[derive(Debug, Clone)]
pub struct FormulaShape {
    /// Maximum nesting of announcements; 0 gives static formulas.
    pub dyn_depth: usize,
    pub cp: bool,
    /// Whether `true` may appear as a leaf.
    pub top: bool,
}

impl Default for FormulaShape {
    fn default() -> Self {
        FormulaShape {
            dyn_depth: 0,
            cp: false,
            top: true,
        }
    }
}

fn leaf(rng: &mut impl Rng, sig: &Signature, shape: &FormulaShape) -> Formula {
    let na = sig.num_atoms();
    let nv = sig.num_values();
    let total = na + nv + usize::from(shape.top);
    let k = rng.gen_range(0..total);
    if k < na {
        Formula::atom(sig.atoms()[k].as_str())
    } else if k < na + nv {
        Formula::dec(sig.values()[k - na].as_str())
    } else {
        Formula::Top
    }
}

/// A random formula with exactly `size` nodes.
pub fn random_formula(
    rng: &mut impl Rng,
    sig: &Signature,
    size: usize,
    shape: &FormulaShape,
) -> Formula {
    if size <= 1 {
        return leaf(rng, sig, shape);
    }
    if size == 2 {
        let inner = leaf(rng, sig, shape);
        return unary(rng, sig, inner, shape);
    }
    let use_dyn = shape.dyn_depth > 0 && rng.gen_bool(0.25);
    if rng.gen_bool(0.45) && !use_dyn {
        let inner = random_formula(rng, sig, size - 1, shape);
        return unary(rng, sig, inner, shape);
    }
    let left = rng.gen_range(1..size - 1);
    if use_dyn {
        let inner = FormulaShape {
            dyn_depth: shape.dyn_depth - 1,
            ..shape.clone()
        };
        let chi = random_formula(rng, sig, left, &inner);
        let psi = random_formula(rng, sig, size - 1 - left, &inner);
        return Formula::dynamic(chi, psi);
    }
    let a = random_formula(rng, sig, left, shape);
    let b = random_formula(rng, sig, size - 1 - left, shape);
    Formula::and(a, b)
}

fn unary(rng: &mut impl Rng, sig: &Signature, inner: Formula, shape: &FormulaShape) -> Formula {
    let choices = if shape.cp { 4 } else { 3 };
    match rng.gen_range(0..choices) {
        0 => Formula::not(inner),
        1 => Formula::box_i(inner),
        2 => Formula::box_f(inner),
        _ => {
            let x: BTreeSet<String> = sig
                .atoms()
                .iter()
                .filter(|_| rng.gen_bool(0.5))
                .cloned()
                .collect();
            Formula::Cp(x, Box::new(inner))
        }
    }
}

/// Every formula with at most `max_size` nodes built from `true`, the atoms,
/// the decision atoms, `~`, `&`, the two boxes and (optionally) `[X]` for
/// every `X ⊆ atoms`.
pub fn all_formulas(sig: &Signature, max_size: usize, cp: bool) -> Vec<Formula> {
    let mut by_size: Vec<Vec<Formula>> = vec![Vec::new()];
    let mut leaves = vec![Formula::Top];
    leaves.extend(sig.atoms().iter().map(|a| Formula::atom(a.as_str())));
    leaves.extend(sig.values().iter().map(|v| Formula::dec(v.as_str())));
    let subsets: Vec<BTreeSet<String>> = if cp {
        (0u64..1 << sig.num_atoms())
            .map(|m| sig.names_in(m).into_iter().map(String::from).collect())
            .collect()
    } else {
        Vec::new()
    };
    for n in 1..=max_size {
        let mut here = Vec::new();
        if n == 1 {
            here = leaves.clone();
        } else {
            for f in &by_size[n - 1] {
                here.push(Formula::not(f.clone()));
                here.push(Formula::box_i(f.clone()));
                here.push(Formula::box_f(f.clone()));
                for x in &subsets {
                    here.push(Formula::Cp(x.clone(), Box::new(f.clone())));
                }
            }
            for l in 1..n - 1 {
                for a in &by_size[l] {
                    for b in &by_size[n - 1 - l] {
                        here.push(Formula::and(a.clone(), b.clone()));
                    }
                }
            }
        }
        by_size.push(here);
    }
    by_size.into_iter().flatten().collect()
}

/// A random MCM with `1..=max_states` states and `1..=max_functions`
/// distinct classifiers.
pub fn random_mcm(
    rng: &mut impl Rng,
    sig: &Signature,
    max_states: usize,
    max_functions: usize,
) -> Mcm {
    let mut cube: Vec<u64> = (0..1u64 << sig.num_atoms()).collect();
    cube.shuffle(rng);
    let ns = rng.gen_range(1..=max_states.min(cube.len()));
    let states: Vec<u64> = cube[..ns].to_vec();
    let nv = sig.num_values();
    let cap = (nv as u64).saturating_pow(ns as u32).min(max_functions as u64) as usize;
    let nf = rng.gen_range(1..=cap);
    let mut tables = BTreeSet::new();
    while tables.len() < nf {
        let t: Vec<usize> = (0..ns).map(|_| rng.gen_range(0..nv)).collect();
        tables.insert(t);
    }
    Mcm::new(
        sig.clone(),
        states,
        tables.into_iter().map(ClassifierFn::new).collect(),
    )
    .expect("generated model is well formed")
}

/// Every MCM over `sig` whose state set has at most `max_states` elements
/// and whose function set at most `max_functions`, in canonical order.
pub fn for_each_mcm(
    sig: &Signature,
    max_states: usize,
    max_functions: usize,
    mut visit: impl FnMut(&Mcm) -> bool,
) -> crate::Result<()> {
    let cube = 1u64 << sig.num_atoms();
    for size in 1..=max_states.min(cube as usize) {
        for states in subsets_of_size(cube as usize, size) {
            let states: Vec<u64> = states.into_iter().map(|s| s as u64).collect();
            let tables = all_tables(sig.num_values(), states.len())?;
            for k in 1..=max_functions.min(tables.len()) {
                for pick in subsets_of_size(tables.len(), k) {
                    let fns = pick.iter().map(|&i| ClassifierFn::new(tables[i].clone())).collect();
                    let m = Mcm::new(sig.clone(), states.clone(), fns)?;
                    if !visit(&m) {
                        return Ok(());
                    }
                }
            }
        }
    }
    Ok(())
}

/// `k`-element subsets of `0..n` in lexicographic order.
pub fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

#[derive(Debug, Clone)]
pub struct GridShape {
    pub components: usize,
    pub max_rows: usize,
    pub max_columns: usize,
    /// Worlds per cell, at least one.
    pub max_cell: usize,
    /// Enforce functionality (C2) so the result is a genuine MDM.
    pub functional: bool,
}

/// A random (quasi-)MDM built as a disjoint union of grids: rows are the
/// F-classes (one input each), columns the I-classes, and each cell holds
/// one or more worlds.
pub fn random_grid_mdm(rng: &mut impl Rng, sig: &Signature, shape: &GridShape) -> Mdm {
    let mut labels = Vec::new();
    let mut decisions = Vec::new();
    let mut col_key = Vec::new();
    let mut row_key = Vec::new();
    let nv = sig.num_values();
    let cube = 1u64 << sig.num_atoms();
    for comp in 0..shape.components.max(1) {
        let rows = rng.gen_range(1..=shape.max_rows);
        let cols = rng.gen_range(1..=shape.max_columns);
        let row_labels: Vec<u64> = (0..rows).map(|_| rng.gen_range(0..cube)).collect();
        // For functional models every (column, input) pair has one decision.
        let fixed: Vec<Vec<usize>> = (0..cols)
            .map(|_| (0..cube).map(|_| rng.gen_range(0..nv)).collect())
            .collect();
        for (r, &label) in row_labels.iter().enumerate() {
            for (c, column) in fixed.iter().enumerate() {
                for _ in 0..rng.gen_range(1..=shape.max_cell.max(1)) {
                    labels.push(label);
                    decisions.push(if shape.functional {
                        column[label as usize]
                    } else {
                        rng.gen_range(0..nv)
                    });
                    col_key.push((comp, c));
                    row_key.push((comp, r));
                }
            }
        }
    }
    let n = labels.len();
    Mdm::new(
        sig.clone(),
        labels,
        decisions,
        Partition::from_key(n, |w| col_key[w]),
        Partition::from_key(n, |w| row_key[w]),
    )
    .expect("generated model is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_formula_has_requested_size() {
        let sig = Signature::new(["p", "q"], ["0", "1"]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for size in 1..15 {
            let f = random_formula(&mut rng, &sig, size, &FormulaShape::default());
            assert_eq!(f.size(), size);
        }
    }

    #[test]
    fn formula_corpus_counts() {
        let sig = Signature::new(["p"], ["0", "1"]).unwrap();
        // Leaves: 4. Size 2: 4 * 3 unary.
        assert_eq!(all_formulas(&sig, 1, false).len(), 4);
        assert_eq!(all_formulas(&sig, 2, false).len(), 4 + 12);
        // Size 3: 12 * 3 unary + 16 conjunctions.
        assert_eq!(all_formulas(&sig, 3, false).len(), 16 + 52);
    }

    #[test]
    fn subsets() {
        assert_eq!(subsets_of_size(4, 2).len(), 6);
        assert_eq!(subsets_of_size(3, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn enumerated_mcms_are_distinct() {
        let sig = Signature::new(["p"], ["0", "1"]).unwrap();
        let mut count = 0;
        for_each_mcm(&sig, 2, 4, |_| {
            count += 1;
            true
        })
        .unwrap();
        // |S| = 1: two states, 3 function sets each; |S| = 2: 15 sets.
        assert_eq!(count, 2 * 3 + 15);
    }

    #[test]
    fn grids_satisfy_quasi_constraints() {
        let sig = Signature::new(["p", "q"], ["0", "1"]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for functional in [false, true] {
            let shape = GridShape {
                components: 2,
                max_rows: 3,
                max_columns: 3,
                max_cell: 2,
                functional,
            };
            for _ in 0..20 {
                let m = random_grid_mdm(&mut rng, &sig, &shape);
                let r = crate::models::validate_mdm(&m);
                assert!(r.is_quasi());
                if functional {
                    assert!(r.is_mdm());
                }
            }
        }
    }
}
