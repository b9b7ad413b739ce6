//! Open-vocabulary satisfiability.
//!
//! With atoms to spare, any two states can be told apart by an atom the
//! formula never mentions, so functionality puts no constraint on the part of
//! a model the formula can see. What remains is a grid: rows (states, each
//! with a label over the formula's atoms), columns (classifiers) and a value
//! in every cell.
//!
//! A row type fixes a label and the truth of every `□_F` node along the row;
//! a column type fixes the truth of every `□_I` node down the column. Given a
//! row type and a column type, the cell values compatible with both are
//! determined, and so is everything else. A set of column types `C` admits
//! a largest compatible set of row types `R*(C)`, and the formula is
//! satisfiable iff for some `C` the pair `(R*(C), C)` meets every
//! diamond-style demand on both sides and the root holds in some cell. The
//! search enumerates whichever side has fewer viable types.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::models::{ClassifierFn, Mcm, Mdm, Partition, Point};
use crate::semantics::{check_mcm, check_mdm};
use crate::signature::Signature;
use crate::solver::dag::{require_static, Dag, Node};
use crate::solver::{Budget, Config, Mode, SatOutcome, Witness};

/// Largest number of (row type, column type) pairs tabulated.
const MAX_PAIRS: usize = 1 << 22;

pub fn sat_open(phi: &Formula, values: &[String], config: &Config) -> Result<SatOutcome> {
    require_static(phi)?;
    let atoms: Vec<String> = phi.atoms().into_iter().collect();
    let local = Signature::new(atoms.iter().cloned(), values.iter().cloned())?;
    phi.check_signature(&local)?;
    let expanded = phi.expand_all_cp(&local)?;
    let dag = Dag::compile(&expanded, &|p| local.atom(p), &|v| local.value(v))?;
    let mut budget = Budget::new(config);

    let Some(grid) = Grid::new(&dag, &local, &mut budget) else {
        return Ok(SatOutcome::ResourceOut);
    };
    let outcome = match grid.solve(&mut budget) {
        Search::Found(rows, cols) => build_witness(&grid, &local, &rows, &cols, phi, &expanded)?,
        Search::Exhausted => SatOutcome::Unsat,
        Search::Out => SatOutcome::ResourceOut,
    };
    Ok(outcome)
}

#[derive(Debug, Clone, Copy, Default)]
struct Pair {
    /// Bit `t` set iff value `t` is compatible with both types.
    allowed: u64,
    /// `□_F` nodes whose body fails in this cell for some allowed value.
    row_wit: u64,
    /// `□_I` nodes whose body fails in this cell for some allowed value.
    col_wit: u64,
    /// Allowed values at which the root holds.
    root: u64,
}

struct Grid {
    num_atoms: usize,
    num_rows: usize,
    num_cols: usize,
    row_demand: Vec<u64>,
    col_demand: Vec<u64>,
    pairs: Vec<Pair>,
}

enum Search {
    Found(Vec<usize>, Vec<usize>),
    Exhausted,
    Out,
}

fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl Grid {
    fn new(dag: &Dag, sig: &Signature, budget: &mut Budget) -> Option<Grid> {
        let nv = sig.num_values();
        let a = sig.num_atoms();
        let boxf: Vec<usize> = (0..dag.len())
            .filter(|&i| matches!(dag.nodes[i], Node::BoxF(_)))
            .collect();
        let boxi: Vec<usize> = (0..dag.len())
            .filter(|&i| matches!(dag.nodes[i], Node::BoxI(_)))
            .collect();
        let row_bits = a + boxf.len();
        if nv > 64 || row_bits >= 32 || boxi.len() >= 32 {
            return None;
        }
        let num_rows = 1usize << row_bits;
        let num_cols = 1usize << boxi.len();
        if num_rows.checked_mul(num_cols).is_none_or(|n| n > MAX_PAIRS) {
            return None;
        }
        if !budget.spend((num_rows * num_cols * nv * dag.len()) as u64) {
            return None;
        }
        let fpos: HashMap<usize, usize> = boxf.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let ipos: HashMap<usize, usize> = boxi.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let mut pairs = vec![Pair::default(); num_rows * num_cols];
        let mut val = vec![false; dag.len()];
        for r in 0..num_rows {
            let label = r as u64 & low_mask(a);
            let e = (r >> a) as u64;
            for c in 0..num_cols {
                let d = c as u64;
                let p = &mut pairs[r * num_cols + c];
                for t in 0..nv {
                    for (i, node) in dag.nodes.iter().enumerate() {
                        val[i] = match *node {
                            Node::Top => true,
                            Node::Atom(bit) => label >> bit & 1 == 1,
                            Node::Dec(v) => v == t,
                            Node::Not(x) => !val[x],
                            Node::And(x, y) => val[x] && val[y],
                            Node::BoxF(_) => e >> fpos[&i] & 1 == 1,
                            Node::BoxI(_) => d >> ipos[&i] & 1 == 1,
                        };
                    }
                    let mut ok = true;
                    let mut row_wit = 0;
                    let mut col_wit = 0;
                    for (k, &b) in boxf.iter().enumerate() {
                        let Node::BoxF(body) = dag.nodes[b] else { unreachable!() };
                        if !val[body] {
                            ok &= e >> k & 1 == 0;
                            row_wit |= 1 << k;
                        }
                    }
                    for (k, &b) in boxi.iter().enumerate() {
                        let Node::BoxI(body) = dag.nodes[b] else { unreachable!() };
                        if !val[body] {
                            ok &= d >> k & 1 == 0;
                            col_wit |= 1 << k;
                        }
                    }
                    if ok {
                        p.allowed |= 1 << t;
                        p.row_wit |= row_wit;
                        p.col_wit |= col_wit;
                        if val[dag.root] {
                            p.root |= 1 << t;
                        }
                    }
                }
            }
        }
        let row_demand = (0..num_rows)
            .map(|r| !((r >> a) as u64) & low_mask(boxf.len()))
            .collect();
        let col_demand = (0..num_cols)
            .map(|c| !(c as u64) & low_mask(boxi.len()))
            .collect();
        Some(Grid {
            num_atoms: a,
            num_rows,
            num_cols,
            row_demand,
            col_demand,
            pairs,
        })
    }

    fn pair(&self, r: usize, c: usize) -> &Pair {
        &self.pairs[r * self.num_cols + c]
    }

    /// Drops types that cannot appear next to any surviving type of the
    /// other side, until nothing changes.
    fn viable(&self) -> (Vec<usize>, Vec<usize>) {
        let mut rows: Vec<usize> = (0..self.num_rows).collect();
        let mut cols: Vec<usize> = (0..self.num_cols).collect();
        loop {
            let next_rows: Vec<usize> = rows
                .iter()
                .copied()
                .filter(|&r| {
                    let wit = cols
                        .iter()
                        .filter(|&&c| self.pair(r, c).allowed != 0)
                        .fold(0, |w, &c| w | self.pair(r, c).row_wit);
                    cols.iter().any(|&c| self.pair(r, c).allowed != 0)
                        && self.row_demand[r] & !wit == 0
                })
                .collect();
            let next_cols: Vec<usize> = cols
                .iter()
                .copied()
                .filter(|&c| {
                    let wit = next_rows
                        .iter()
                        .filter(|&&r| self.pair(r, c).allowed != 0)
                        .fold(0, |w, &r| w | self.pair(r, c).col_wit);
                    next_rows.iter().any(|&r| self.pair(r, c).allowed != 0)
                        && self.col_demand[c] & !wit == 0
                })
                .collect();
            if next_rows.len() == rows.len() && next_cols.len() == cols.len() {
                return (rows, cols);
            }
            rows = next_rows;
            cols = next_cols;
        }
    }

    fn solve(&self, budget: &mut Budget) -> Search {
        let (rows, cols) = self.viable();
        if rows.is_empty() || cols.is_empty() {
            return Search::Exhausted;
        }
        let by_cols = cols.len() <= rows.len();
        let (primary, other) = if by_cols { (&cols, &rows) } else { (&rows, &cols) };
        // Oriented view: `a` from the enumerated side, `b` from the other.
        let view = |a: usize, b: usize| -> (u64, u64, u64, u64) {
            if by_cols {
                let p = self.pair(b, a);
                (p.allowed, p.col_wit, p.row_wit, p.root)
            } else {
                let p = self.pair(a, b);
                (p.allowed, p.row_wit, p.col_wit, p.root)
            }
        };
        let demand_a = |a: usize| if by_cols { self.col_demand[a] } else { self.row_demand[a] };
        let demand_b = |b: usize| if by_cols { self.row_demand[b] } else { self.col_demand[b] };

        let mut result = Search::Exhausted;
        for k in 1..=primary.len() {
            let stop = for_each_combination(primary.len(), k, &mut |pick| {
                let chosen: Vec<usize> = pick.iter().map(|&i| primary[i]).collect();
                if !budget.spend((chosen.len() * other.len()) as u64 + 1) {
                    result = Search::Out;
                    return true;
                }
                let partners: Vec<usize> = other
                    .iter()
                    .copied()
                    .filter(|&b| {
                        let mut wit = 0;
                        for &a in &chosen {
                            let (allowed, _, wb, _) = view(a, b);
                            if allowed == 0 {
                                return false;
                            }
                            wit |= wb;
                        }
                        demand_b(b) & !wit == 0
                    })
                    .collect();
                if partners.is_empty() {
                    return false;
                }
                let met = chosen.iter().all(|&a| {
                    let wit = partners.iter().fold(0, |w, &b| w | view(a, b).1);
                    demand_a(a) & !wit == 0
                });
                let root = chosen
                    .iter()
                    .any(|&a| partners.iter().any(|&b| view(a, b).3 != 0));
                if met && root {
                    result = if by_cols {
                        Search::Found(partners, chosen)
                    } else {
                        Search::Found(chosen, partners)
                    };
                    return true;
                }
                false
            });
            if stop {
                break;
            }
        }
        result
    }
}

/// Calls `visit` with every `k`-subset of `0..n` in lexicographic order;
/// stops early when `visit` returns true.
fn for_each_combination(n: usize, k: usize, visit: &mut impl FnMut(&[usize]) -> bool) -> bool {
    if k > n {
        return false;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        if visit(&cur) {
            return true;
        }
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return false;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

fn values_of(mask: u64) -> Vec<usize> {
    (0..64).filter(|&t| mask >> t & 1 == 1).collect()
}

/// Lays out the found types as a concrete grid, merges duplicate rows and
/// columns, separates rows sharing a label with fresh atoms, and checks the
/// result.
fn build_witness(
    grid: &Grid,
    local: &Signature,
    rows: &[usize],
    cols: &[usize],
    phi: &Formula,
    expanded: &Formula,
) -> Result<SatOutcome> {
    let copies = local.num_values();
    let (r0, c0, t0) = rows
        .iter()
        .find_map(|&r| {
            cols.iter().find_map(|&c| {
                let root = grid.pair(r, c).root;
                (root != 0).then(|| (r, c, root.trailing_zeros() as usize))
            })
        })
        .expect("search guarantees a root cell");

    // Every row copy meets every allowed value of every column type, and
    // vice versa, by cycling through the allowed values.
    let row_list: Vec<(usize, usize)> = rows
        .iter()
        .flat_map(|&r| (0..copies).map(move |i| (r, i)))
        .collect();
    let col_list: Vec<(usize, usize)> = cols
        .iter()
        .flat_map(|&c| (0..copies).map(move |j| (c, j)))
        .collect();
    let cell = |(r, i): (usize, usize), (c, j): (usize, usize)| {
        let vals = values_of(grid.pair(r, c).allowed);
        vals[(i + j) % vals.len()]
    };
    let root_row = row_list.iter().position(|&x| x == (r0, 0)).expect("listed");
    let t_idx = values_of(grid.pair(r0, c0).allowed)
        .iter()
        .position(|&t| t == t0)
        .expect("allowed");
    let root_col = col_list.iter().position(|&x| x == (c0, t_idx)).expect("listed");

    let label = |r: usize| r as u64 & low_mask(grid.num_atoms);
    let mut row_keep = Vec::new();
    let mut row_map = vec![0; row_list.len()];
    let mut seen: HashMap<(u64, Vec<usize>), usize> = HashMap::new();
    for (ri, &row) in row_list.iter().enumerate() {
        let key = (label(row.0), col_list.iter().map(|&col| cell(row, col)).collect());
        row_map[ri] = *seen.entry(key).or_insert_with(|| {
            row_keep.push(row);
            row_keep.len() - 1
        });
    }
    let mut col_keep = Vec::new();
    let mut col_map = vec![0; col_list.len()];
    let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
    for (ci, &col) in col_list.iter().enumerate() {
        let key = row_keep.iter().map(|&row| cell(row, col)).collect();
        col_map[ci] = *seen.entry(key).or_insert_with(|| {
            col_keep.push(col);
            col_keep.len() - 1
        });
    }
    let (root_row, root_col) = (row_map[root_row], col_map[root_col]);

    // Quasi-model over the formula's own atoms: one world per cell.
    let nc = col_keep.len();
    let worlds = row_keep.len() * nc;
    let quasi = Mdm::new(
        local.clone(),
        (0..worlds).map(|w| label(row_keep[w / nc].0)).collect(),
        (0..worlds).map(|w| cell(row_keep[w / nc], col_keep[w % nc])).collect(),
        Partition::from_key(worlds, |w| w % nc),
        Partition::from_key(worlds, |w| w / nc),
    )?;
    let root_world = root_row * nc + root_col;
    assert!(
        check_mdm(&quasi, root_world, expanded)?,
        "open-mode quasi-model does not satisfy {phi}"
    );

    // Rows sharing a label get told apart by fresh atoms, in binary.
    let mut rank = vec![0u64; row_keep.len()];
    let mut counts: HashMap<u64, u64> = HashMap::new();
    for (i, &row) in row_keep.iter().enumerate() {
        let n = counts.entry(label(row.0)).or_insert(0);
        rank[i] = *n;
        *n += 1;
    }
    let largest = counts.values().copied().max().unwrap_or(1);
    let fresh_bits = (64 - (largest - 1).leading_zeros()) as usize;
    if grid.num_atoms + fresh_bits > crate::MAX_ATOMS {
        return Ok(SatOutcome::ResourceOut);
    }
    let taken: BTreeSet<&str> = local.atoms().iter().map(String::as_str).collect();
    let mut fresh = Vec::new();
    let mut k = 0;
    while fresh.len() < fresh_bits {
        let name = format!("_w{k}");
        if !taken.contains(name.as_str()) {
            fresh.push(name);
        }
        k += 1;
    }
    let sig = Signature::new(
        local.atoms().iter().cloned().chain(fresh),
        local.values().iter().cloned(),
    )
    .map_err(|e| Error::Model(format!("cannot extend the vocabulary: {e}")))?;
    let states: Vec<u64> = row_keep
        .iter()
        .zip(&rank)
        .map(|(&row, &j)| label(row.0) | j << grid.num_atoms)
        .collect();
    let fns = col_keep
        .iter()
        .map(|&col| ClassifierFn::new(row_keep.iter().map(|&row| cell(row, col)).collect()))
        .collect();
    let root_state = states[root_row];
    let root_table: Vec<usize> = row_keep.iter().map(|&row| cell(row, col_keep[root_col])).collect();
    let row_of: HashMap<u64, usize> = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let model = Mcm::new(sig, states, fns)?;
    let function = model
        .functions()
        .iter()
        .position(|f| {
            model
                .states()
                .iter()
                .zip(&f.table)
                .all(|(s, &v)| root_table[row_of[s]] == v)
        })
        .expect("function kept");
    let point = Point {
        state: model.state_index(root_state).expect("state kept"),
        function,
    };
    assert!(
        check_mcm(&model, point, phi)?,
        "open-mode witness does not satisfy {phi}"
    );
    Ok(SatOutcome::Sat(Box::new(Witness {
        model,
        point,
        mode: Mode::Open,
        quasi: Some((quasi, root_world)),
    })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula_unchecked;

    fn run(text: &str) -> SatOutcome {
        let values = vec!["0".to_string(), "1".to_string()];
        sat_open(&parse_formula_unchecked(text).unwrap(), &values, &Config::default()).unwrap()
    }

    #[test]
    fn same_label_different_decisions() {
        // Unsatisfiable with a single atom `p`, satisfiable once more atoms
        // are available.
        let out = run("p & =1 & diaI (p & =0)");
        let w = out.witness().unwrap();
        assert!(w.model.sig().num_atoms() > 1);
        assert!(w.quasi.is_some());
    }

    #[test]
    fn contradictions() {
        assert_eq!(run("=0 & =1"), SatOutcome::Unsat);
        assert_eq!(run("p & boxF ~p"), SatOutcome::Unsat);
        assert_eq!(run("boxI p & diaI ~p"), SatOutcome::Unsat);
    }

    #[test]
    fn commutation() {
        assert_eq!(run("diaI boxF p & ~boxF diaI p"), SatOutcome::Unsat);
        assert_eq!(run("diaF diaI p & boxI ~p"), SatOutcome::Unsat);
        assert!(run("diaI =0 & diaF =1 & boxI boxF (=0 | =1)").is_sat());
    }

    #[test]
    fn combinations() {
        let mut seen = Vec::new();
        for_each_combination(4, 2, &mut |c| {
            seen.push(c.to_vec());
            false
        });
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[5], vec![2, 3]);
    }
}
