//! Multi-classifier models, multi-decision (Kripke) models, and the
//! transformations between them.

mod file;
mod mcm;
mod mdm;

pub use file::{
    parse_mdm_file, parse_model_file, render_mdm_file, render_model_file, with_auto_names,
    MdmDoc, ModelDoc,
};
pub use mcm::{
    all_tables, build_mcm, update_mcm, ClassifierFn, ExplicitFn, FunctionSpec, InputInstance,
    Knowledge, Mcm, Point, PointedMcm, StateSpec, MAX_ENUMERATED_FUNCTIONS,
};
pub use mdm::{
    mcm_to_mdm, mdm_to_mcm, mdm_to_mcm_at, mdm_world_of, validate_mdm, ConstraintCheck,
    ConstraintReport, Mdm, Partition, QuasiMdm,
};
