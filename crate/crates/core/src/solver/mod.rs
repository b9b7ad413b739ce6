//! Satisfiability and validity.
//!
//! * [`sat_finite`]: over a fixed finite atom set (every model is an MCM over
//!   the given signature).
//! * [`sat_open`]: over an unbounded supply of atoms, where functionality can
//!   always be broken by atoms the formula does not mention. Witnesses are
//!   built over the formula's atoms plus fresh atoms `_w<k>`.
//! * [`brute_force_sat`]: exhaustive enumeration of tiny MCMs, as a test
//!   oracle.
//!
//! Both deciders count elementary evaluation steps against a budget and
//! answer [`SatOutcome::ResourceOut`] when it runs out.

mod axioms;
mod brute;
pub(crate) mod dag;
mod filtration;
mod finite;
mod open;

pub use axioms::{axiom_instances, AxiomInstance, Schema};
pub use brute::{brute_force_quasi_sat, brute_force_sat, BruteBounds, BruteOutcome};
pub use filtration::{filtrate, Filtration};
pub use finite::sat_finite;
pub use open::sat_open;

use crate::error::Result;
use crate::formula::Formula;
use crate::models::{Mcm, Mdm, Point};
use crate::signature::Signature;

/// Default number of evaluation steps before giving up.
pub const DEFAULT_WORK_BUDGET: u64 = 200_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Config {
    pub work_budget: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            work_budget: DEFAULT_WORK_BUDGET,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Finite,
    Open,
}

/// A pointed model satisfying the queried formula. Open-mode witnesses also
/// carry the quasi-model found by the search, before fresh atoms were added.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub model: Mcm,
    pub point: Point,
    pub mode: Mode,
    pub quasi: Option<(Mdm, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatOutcome {
    Sat(Box<Witness>),
    Unsat,
    ResourceOut,
}

impl SatOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatOutcome::Sat(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            SatOutcome::Sat(w) => Some(w),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validity {
    Valid,
    /// A pointed model falsifying the formula.
    Invalid(Box<Witness>),
    ResourceOut,
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

fn validity(outcome: SatOutcome) -> Validity {
    match outcome {
        SatOutcome::Sat(w) => Validity::Invalid(w),
        SatOutcome::Unsat => Validity::Valid,
        SatOutcome::ResourceOut => Validity::ResourceOut,
    }
}

/// Valid over every MCM of the signature iff the negation is unsatisfiable.
pub fn valid_finite(phi: &Formula, sig: &Signature, config: &Config) -> Result<Validity> {
    Ok(validity(sat_finite(&Formula::not(phi.clone()), sig, config)?))
}

/// Valid under the open-vocabulary semantics.
pub fn valid_open(phi: &Formula, values: &[String], config: &Config) -> Result<Validity> {
    Ok(validity(sat_open(&Formula::not(phi.clone()), values, config)?))
}

/// Counts evaluation steps.
struct Budget {
    left: u64,
}

impl Budget {
    fn new(config: &Config) -> Budget {
        Budget {
            left: config.work_budget,
        }
    }

    /// False once the budget is exhausted.
    fn spend(&mut self, n: u64) -> bool {
        if n > self.left {
            self.left = 0;
            false
        } else {
            self.left -= n;
            true
        }
    }
}
