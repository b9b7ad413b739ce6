//! Exhaustive search over tiny models. Slow and obviously correct; the
//! deciders are tested against it.

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::gen::for_each_mcm;
use crate::models::{Mdm, Partition, Point};
use crate::semantics::{mdm_truth_table, truth_table};
use crate::signature::Signature;
use crate::solver::dag::require_static;
use crate::solver::{Mode, Witness};

/// Models visited before refusing.
const MAX_MODELS: f64 = 5e7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteBounds {
    pub max_states: usize,
    pub max_functions: usize,
}

impl Default for BruteBounds {
    fn default() -> Self {
        BruteBounds {
            max_states: 4,
            max_functions: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BruteOutcome {
    Sat(Box<Witness>),
    UnsatWithinBounds,
}

fn binomial(n: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i as f64) / (i as f64 + 1.0))
}

/// Visits every MCM over `sig` within the bounds and returns the first
/// pointed model satisfying `phi`.
pub fn brute_force_sat(phi: &Formula, sig: &Signature, bounds: &BruteBounds) -> Result<BruteOutcome> {
    require_static(phi)?;
    phi.check_signature(sig)?;
    let cube = 2f64.powi(sig.num_atoms() as i32);
    let mut total = 0.0;
    for s in 1..=bounds.max_states.min(cube as usize) {
        let tables = (sig.num_values() as f64).powi(s as i32);
        let fsets: f64 = (1..=bounds.max_functions)
            .map(|k| binomial(tables, k.min(tables as usize)))
            .sum();
        total += binomial(cube, s) * fsets;
    }
    if total > MAX_MODELS || sig.num_atoms() > 6 {
        return Err(Error::BoundsTooLarge(format!(
            "about {total:.0} models over {} atoms",
            sig.num_atoms()
        )));
    }
    let mut found = None;
    let mut failure = None;
    for_each_mcm(sig, bounds.max_states, bounds.max_functions, |m| {
        match truth_table(m, phi) {
            Ok(t) => {
                if let Some(i) = t.iter().position(|&b| b) {
                    let ns = m.num_states();
                    let point = Point {
                        state: i % ns,
                        function: i / ns,
                    };
                    found = Some(Witness {
                        model: m.clone(),
                        point,
                        mode: Mode::Finite,
                        quasi: None,
                    });
                    return false;
                }
                true
            }
            Err(e) => {
                failure = Some(e);
                false
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(match found {
        Some(w) => BruteOutcome::Sat(Box::new(w)),
        None => BruteOutcome::UnsatWithinBounds,
    })
}

/// Searches grid-shaped quasi-models over the formula's own atoms: up to
/// `max_states` rows and `max_functions` columns, one world per cell, any
/// labels and any values. Returns the model and a world satisfying `phi`.
pub fn brute_force_quasi_sat(
    phi: &Formula,
    values: &[String],
    bounds: &BruteBounds,
) -> Result<Option<(Mdm, usize)>> {
    require_static(phi)?;
    let sig = Signature::new(phi.atoms(), values.iter().cloned())?;
    let expanded = phi.expand_all_cp(&sig)?;
    let nv = sig.num_values() as u64;
    let cube = 1u64 << sig.num_atoms();
    let cells = bounds.max_states * bounds.max_functions;
    let work = (cube as f64).powi(bounds.max_states as i32) * (nv as f64).powi(cells as i32);
    if work > MAX_MODELS || sig.num_atoms() > 6 {
        return Err(Error::BoundsTooLarge(format!(
            "about {work:.0} grids over {} atoms",
            sig.num_atoms()
        )));
    }
    for rows in 1..=bounds.max_states {
        for cols in 1..=bounds.max_functions {
            let n = rows * cols;
            let rel_i = Partition::from_key(n, |w| w % cols);
            let rel_f = Partition::from_key(n, |w| w / cols);
            // Row labels in non-decreasing order: rows are interchangeable.
            let mut labels = vec![0u64; rows];
            loop {
                for code in 0..nv.pow(n as u32) {
                    let decisions: Vec<usize> =
                        (0..n).map(|w| (code / nv.pow(w as u32) % nv) as usize).collect();
                    let m = Mdm::new(
                        sig.clone(),
                        (0..n).map(|w| labels[w / cols]).collect(),
                        decisions,
                        rel_i.clone(),
                        rel_f.clone(),
                    )?;
                    let t = mdm_truth_table(&m, &expanded)?;
                    if let Some(w) = t.iter().position(|&b| b) {
                        return Ok(Some((m, w)));
                    }
                }
                let Some(i) = (0..rows).rev().find(|&i| labels[i] + 1 < cube) else {
                    break;
                };
                labels[i] += 1;
                for j in i + 1..rows {
                    labels[j] = labels[i];
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    #[test]
    fn trivial_cases() {
        let sig = Signature::new(["p"], ["0", "1"]).unwrap();
        let b = BruteBounds::default();
        let BruteOutcome::Sat(w) = brute_force_sat(&Formula::Top, &sig, &b).unwrap() else {
            panic!("true is satisfiable");
        };
        assert_eq!((w.model.num_states(), w.model.num_functions()), (1, 1));
        assert_eq!(
            brute_force_sat(&Formula::bottom(), &sig, &b).unwrap(),
            BruteOutcome::UnsatWithinBounds
        );
    }

    #[test]
    fn quasi_grids_ignore_functionality() {
        let sig = Signature::new(["p"], ["0", "1"]).unwrap();
        let f = parse_formula("p & =1 & diaI (p & =0)", &sig).unwrap();
        let b = BruteBounds {
            max_states: 2,
            max_functions: 2,
        };
        assert_eq!(brute_force_sat(&f, &sig, &b).unwrap(), BruteOutcome::UnsatWithinBounds);
        let values = vec!["0".to_string(), "1".to_string()];
        assert!(brute_force_quasi_sat(&f, &values, &b).unwrap().is_some());
    }

    #[test]
    fn refuses_large_bounds() {
        let sig = Signature::new(["p", "q", "r", "s"], ["0", "1"]).unwrap();
        let b = BruteBounds {
            max_states: 16,
            max_functions: 16,
        };
        assert!(matches!(
            brute_force_sat(&Formula::Top, &sig, &b),
            Err(Error::BoundsTooLarge(_))
        ));
    }
}
