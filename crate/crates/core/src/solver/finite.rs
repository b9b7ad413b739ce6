//! Finite-vocabulary satisfiability.
//!
//! For a fixed state set `S`, truth at `(s, g)` depends on `g`'s own table
//! and on the truth values of the `□_F` subformulas at each state (call that
//! assignment `E`); it does not depend on the rest of `Φ`. Given `E`, the
//! best choice of `Φ` is the set `G(E)` of all tables satisfying every body
//! that `E` marks true: enlarging `Φ` within `G(E)` can only supply more
//! witnesses for the bodies `E` marks false. So a formula is satisfiable over
//! `S` iff some `E` has nonempty `G(E)`, a witness in `G(E)` for every false
//! entry, and a point in `S × G(E)` where the root holds.
//!
//! The search decides `E` one `□_F` node at a time, innermost first. States
//! where every live table satisfies the body are forced true, states where
//! none does are forced false, and only the rest branch. State sets are
//! enumerated up to renaming of atoms the formula does not mention: only the
//! multiset of labels over the formula's atoms matters.

use crate::error::Result;
use crate::formula::Formula;
use crate::models::{all_tables, ClassifierFn, Mcm, Point, MAX_ENUMERATED_FUNCTIONS};
use crate::semantics::check_mcm;
use crate::signature::Signature;
use crate::solver::dag::{require_static, Dag, Node};
use crate::solver::{Budget, Config, Mode, SatOutcome, Witness};

pub fn sat_finite(phi: &Formula, sig: &Signature, config: &Config) -> Result<SatOutcome> {
    require_static(phi)?;
    phi.check_signature(sig)?;
    let expanded = phi.expand_all_cp(sig)?;
    let dag = Dag::compile(&expanded, &|p| sig.atom(p), &|v| sig.value(v))?;
    let amask = sig.mask_of(&expanded.atoms())?;
    let rest = sig.full_mask() & !amask;
    let labels: Vec<u64> = submasks(amask);
    // Copies of one label beyond the number of completions are impossible.
    let cap = if rest.count_ones() >= 20 {
        1usize << 20
    } else {
        1usize << rest.count_ones()
    };
    let max_total = labels.len().saturating_mul(cap);
    let mut budget = Budget::new(config);

    let mut outcome = None;
    for total in 1..=max_total {
        let stop = for_each_multiset(labels.len(), cap, total, &mut |mult| {
            let mut states = Vec::with_capacity(total);
            for (l, &m) in mult.iter().enumerate() {
                for j in 0..m {
                    states.push(labels[l] | deposit(j as u64, rest));
                }
            }
            states.sort_unstable();
            match search(&dag, sig, &states, &mut budget) {
                Step::Found(model, point) => {
                    outcome = Some(SatOutcome::Sat(Box::new(Witness {
                        model,
                        point,
                        mode: Mode::Finite,
                        quasi: None,
                    })));
                    true
                }
                Step::Out => {
                    outcome = Some(SatOutcome::ResourceOut);
                    true
                }
                Step::Exhausted => false,
            }
        });
        if stop {
            break;
        }
    }
    let outcome = outcome.unwrap_or(SatOutcome::Unsat);
    if let SatOutcome::Sat(w) = &outcome {
        assert!(
            check_mcm(&w.model, w.point, phi)?,
            "finite-mode witness does not satisfy {phi}"
        );
    }
    Ok(outcome)
}

/// All submasks of `mask`, ascending.
fn submasks(mask: u64) -> Vec<u64> {
    let k = mask.count_ones();
    (0..1u64 << k).map(|j| deposit(j, mask)).collect()
}

/// Scatters the low bits of `j` onto the set bits of `mask`.
fn deposit(mut j: u64, mask: u64) -> u64 {
    let mut out = 0;
    let mut m = mask;
    while m != 0 && j != 0 {
        let low = m & m.wrapping_neg();
        if j & 1 == 1 {
            out |= low;
        }
        j >>= 1;
        m &= m - 1;
    }
    out
}

/// Calls `visit` with every vector of `len` multiplicities in `0..=cap`
/// summing to `total`, in lexicographic order of the reversed vector;
/// stops early when `visit` returns true.
fn for_each_multiset(
    len: usize,
    cap: usize,
    total: usize,
    visit: &mut impl FnMut(&[usize]) -> bool,
) -> bool {
    fn go(
        i: usize,
        left: usize,
        cap: usize,
        cur: &mut Vec<usize>,
        visit: &mut impl FnMut(&[usize]) -> bool,
    ) -> bool {
        let len = cur.len();
        if i == len {
            return left == 0 && visit(cur);
        }
        let room = (len - i - 1) * cap;
        let lo = left.saturating_sub(room);
        for m in lo..=left.min(cap) {
            cur[i] = m;
            if go(i + 1, left - m, cap, cur, visit) {
                return true;
            }
        }
        cur[i] = 0;
        false
    }
    if total > len.saturating_mul(cap) {
        return false;
    }
    go(0, total, cap, &mut vec![0; len], visit)
}

enum Step {
    Found(Mcm, Point),
    Exhausted,
    Out,
}

struct Search<'a> {
    dag: &'a Dag,
    sig: &'a Signature,
    states: &'a [u64],
    tables: Vec<Vec<usize>>,
    /// Truth per node, indexed `g * |S| + s`.
    vals: Vec<Vec<bool>>,
    boxf: Vec<usize>,
    by_level: Vec<Vec<usize>>,
    /// Pending `(body node, state)` pairs that need a falsifying table.
    demands: Vec<(usize, usize)>,
    budget: &'a mut Budget,
}

fn search(dag: &Dag, sig: &Signature, states: &[u64], budget: &mut Budget) -> Step {
    let ns = states.len();
    let count = (sig.num_values() as u64).checked_pow(ns as u32);
    if count.is_none_or(|c| c > MAX_ENUMERATED_FUNCTIONS) {
        return Step::Out;
    }
    let tables = all_tables(sig.num_values(), ns).expect("within the enumeration cap");
    let boxf: Vec<usize> = (0..dag.len())
        .filter(|&i| matches!(dag.nodes[i], Node::BoxF(_)))
        .collect();
    let mut level = vec![0usize; dag.len()];
    let mut by_level = vec![Vec::new(); boxf.len() + 1];
    for (i, node) in dag.nodes.iter().enumerate() {
        level[i] = match *node {
            Node::Top | Node::Atom(_) | Node::Dec(_) => 0,
            Node::Not(a) | Node::BoxI(a) => level[a],
            Node::And(a, b) => level[a].max(level[b]),
            Node::BoxF(_) => boxf.binary_search(&i).expect("listed") + 1,
        };
        if !matches!(node, Node::BoxF(_)) {
            by_level[level[i]].push(i);
        }
    }
    let ng = tables.len();
    let mut s = Search {
        dag,
        sig,
        states,
        tables,
        vals: vec![vec![false; ng * ns]; dag.len()],
        boxf,
        by_level,
        demands: Vec::new(),
        budget,
    };
    let alive = vec![true; ng];
    s.descend(0, &alive)
}

impl Search<'_> {
    fn ns(&self) -> usize {
        self.states.len()
    }

    fn compute_level(&mut self, k: usize, alive: &[bool]) -> bool {
        let ns = self.ns();
        let live: Vec<usize> = (0..alive.len()).filter(|&g| alive[g]).collect();
        let work = (self.by_level[k].len() * live.len() * ns) as u64;
        if !self.budget.spend(work.max(1)) {
            return false;
        }
        for idx in 0..self.by_level[k].len() {
            let i = self.by_level[k][idx];
            let node = self.dag.nodes[i];
            let mut out = std::mem::take(&mut self.vals[i]);
            for &g in &live {
                let base = g * ns;
                match node {
                    Node::Top => out[base..base + ns].fill(true),
                    Node::Atom(bit) => {
                        for s in 0..ns {
                            out[base + s] = self.states[s] >> bit & 1 == 1;
                        }
                    }
                    Node::Dec(v) => {
                        for s in 0..ns {
                            out[base + s] = self.tables[g][s] == v;
                        }
                    }
                    Node::Not(a) => {
                        for s in 0..ns {
                            out[base + s] = !self.vals[a][base + s];
                        }
                    }
                    Node::And(a, b) => {
                        for s in 0..ns {
                            out[base + s] = self.vals[a][base + s] && self.vals[b][base + s];
                        }
                    }
                    Node::BoxI(a) => {
                        let all = self.vals[a][base..base + ns].iter().all(|&x| x);
                        out[base..base + ns].fill(all);
                    }
                    Node::BoxF(_) => unreachable!("set by the search"),
                }
            }
            self.vals[i] = out;
        }
        true
    }

    fn descend(&mut self, k: usize, alive: &[bool]) -> Step {
        if !self.compute_level(k, alive) {
            return Step::Out;
        }
        let ns = self.ns();
        if k == self.boxf.len() {
            return self.leaf(alive);
        }
        let b = self.boxf[k];
        let Node::BoxF(body) = self.dag.nodes[b] else {
            unreachable!()
        };
        let mut forced = vec![false; ns];
        let mut free = Vec::new();
        for s in 0..ns {
            let mut some_true = false;
            let mut some_false = false;
            for g in (0..alive.len()).filter(|&g| alive[g]) {
                if self.vals[body][g * ns + s] {
                    some_true = true;
                } else {
                    some_false = true;
                }
            }
            if !some_false {
                forced[s] = true;
            } else if some_true {
                free.push(s);
            }
        }
        if free.len() >= 63 {
            return Step::Out;
        }
        for choice in 0u64..1 << free.len() {
            if !self.budget.spend(1) {
                return Step::Out;
            }
            let mut e = forced.clone();
            for (j, &s) in free.iter().enumerate() {
                e[s] = choice >> j & 1 == 1;
            }
            let next: Vec<bool> = (0..alive.len())
                .map(|g| alive[g] && (0..ns).all(|s| !e[s] || self.vals[body][g * ns + s]))
                .collect();
            if !next.iter().any(|&x| x) {
                continue;
            }
            let pushed = self.demands.len();
            self.demands
                .extend((0..ns).filter(|&s| !e[s]).map(|s| (body, s)));
            let witnessed = self.demands.iter().all(|&(d, s)| {
                (0..next.len()).any(|g| next[g] && !self.vals[d][g * ns + s])
            });
            if witnessed {
                let out = &mut self.vals[b];
                for g in 0..next.len() {
                    out[g * ns..(g + 1) * ns].copy_from_slice(&e);
                }
                match self.descend(k + 1, &next) {
                    Step::Exhausted => {}
                    other => return other,
                }
            }
            self.demands.truncate(pushed);
        }
        Step::Exhausted
    }

    fn leaf(&mut self, alive: &[bool]) -> Step {
        let ns = self.ns();
        let root = &self.vals[self.dag.root];
        let found = (0..alive.len())
            .filter(|&g| alive[g])
            .find_map(|g| (0..ns).find(|&s| root[g * ns + s]).map(|s| (g, s)));
        let Some((g0, s0)) = found else {
            return Step::Exhausted;
        };
        let mut chosen = vec![g0];
        for &(d, s) in &self.demands {
            let w = (0..alive.len())
                .find(|&g| alive[g] && !self.vals[d][g * ns + s])
                .expect("demands are witnessed");
            if !chosen.contains(&w) {
                chosen.push(w);
            }
        }
        chosen.sort_unstable();
        let function = chosen.binary_search(&g0).expect("root table kept");
        let fns = chosen
            .iter()
            .map(|&g| ClassifierFn::new(self.tables[g].clone()))
            .collect();
        let model = Mcm::new(self.sig.clone(), self.states.to_vec(), fns)
            .expect("distinct tables over sorted states");
        Step::Found(model, Point { state: s0, function })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn run(text: &str) -> SatOutcome {
        let sig = Signature::new(["p"], ["0", "1"]).unwrap();
        sat_finite(&parse_formula(text, &sig).unwrap(), &sig, &Config::default()).unwrap()
    }

    #[test]
    fn decision_atoms() {
        assert_eq!(run("=0 & =1"), SatOutcome::Unsat);
        assert!(run("=0").is_sat());
    }

    #[test]
    fn needs_two_classifiers() {
        let out = run("diaF =0 & diaF =1");
        assert!(out.witness().unwrap().model.num_functions() >= 2);
    }

    #[test]
    fn independence() {
        assert_eq!(run("p & boxF ~p"), SatOutcome::Unsat);
    }

    #[test]
    fn functionality_holds_on_fixed_atoms() {
        // Two states with the same label cannot exist over {p}.
        assert_eq!(run("p & =1 & diaI (p & =0)"), SatOutcome::Unsat);
        let sig = Signature::new(["p", "q"], ["0", "1"]).unwrap();
        let f = parse_formula("p & =1 & diaI (p & =0)", &sig).unwrap();
        assert!(sat_finite(&f, &sig, &Config::default()).unwrap().is_sat());
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let sig = Signature::new(["p", "q"], ["0", "1"]).unwrap();
        let f = parse_formula("boxI boxF (p | q) & diaF diaI =0 & =1 & ~p & q", &sig).unwrap();
        let tiny = Config { work_budget: 3 };
        assert_eq!(sat_finite(&f, &sig, &tiny).unwrap(), SatOutcome::ResourceOut);
    }

    #[test]
    fn helpers() {
        assert_eq!(deposit(0b11, 0b1010), 0b1010);
        assert_eq!(deposit(0b10, 0b1010), 0b1000);
        assert_eq!(submasks(0b101), vec![0, 1, 4, 5]);
        let mut seen = Vec::new();
        for_each_multiset(2, 2, 2, &mut |m| {
            seen.push(m.to_vec());
            false
        });
        assert_eq!(seen, vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
    }
}
