//! Reasoning about classifiers in a two-dimensional modal logic: one box
//! ranges over input instances, the other over the classifiers an agent
//! considers possible.
//!
//! The crate covers parsing and printing of formulas, model construction,
//! model checking, satisfiability (for a fixed finite atom set and for the
//! open-vocabulary semantics), explanation queries, and the reduction of
//! knowledge-update operators.

pub mod error;
pub mod explain;
pub mod formula;
pub mod gen;
pub mod models;
pub mod rewrite;
pub mod samples;
pub mod semantics;
pub mod signature;
pub mod solver;
pub mod syntax;
pub mod term;

pub use error::{Error, Result};
pub use formula::{conj_term, expand_cp, Formula};
pub use models::{InputInstance, Mcm, Mdm, Point, PointedMcm, QuasiMdm};
pub use signature::{Signature, MAX_ATOMS};
pub use syntax::{parse_formula, render_formula};
pub use term::Term;
