//! Orchestration: id registry, experiment plans, decay fits, report files and
//! challenge bundles.

pub mod challenge;
mod plan;
pub mod registry;
mod report;

pub use challenge::{
    candidate_from_text, candidate_to_text, load_bundle, make_challenge, Bundle, BundleMeta,
    ChallengeSpec, Flavour,
};
pub use plan::{fit_decay, Decay, Experiment, ExperimentPlan, Resolved};
pub use report::{json_sibling, reports_json, write_atomic, write_reports};
