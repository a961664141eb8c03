//! Deletion-robust streaming submodular maximization under p-matroid
//! constraints.
//!
//! The library keeps one feasible solution while items stream past, swapping
//! cheap items out for valuable ones (`exchange`). To survive up to `d`
//! adversarial deletions it puts a randomized buffer of capacity
//! `ceil(d / eps)` in front of the stream (`robust`): buffered candidates are
//! re-filtered against the evolving solution and enter it by inverse-marginal
//! sampling, so the coreset `I ∪ C` stays small while the expected solution
//! weight degrades by at most a `(1 + 1/alpha) * eps` fraction under any
//! static deletion set. After deletions, a rebuild pass replays the surviving
//! buffer and returns the surviving solution.
//!
//! Modules:
//! - [`instance`]: ground-set model, JSON instance files, validation, seeded
//!   synthetic generators.
//! - [`submodular`]: modular / coverage / facility-location oracles with
//!   query accounting.
//! - [`matroid`]: uniform, partition, and graphic matroids plus their
//!   intersection.
//! - [`exchange`]: the streaming swap algorithm and its approximation
//!   constant [`exchange::c_alpha`].
//! - [`robust`]: buffered streaming, audited sampling, post-deletion rebuild.
//! - [`adversary`]: static deletion-set constructors.
//! - [`reference`]: brute force, offline greedy, and the unbuffered baseline.
//! - [`harness`]: seeded multi-trial experiments with CSV / JSON-lines
//!   reports.
//!
//! Start with the runnable examples (`cargo run --example streaming_exchange`
//! and friends); each one demonstrates a single capability end to end.

pub mod adversary;
pub mod error;
pub mod exchange;
pub mod harness;
pub mod instance;
pub mod matroid;
pub mod reference;
pub mod robust;
pub mod submodular;

pub use adversary::{make_deletion_set, AdversaryModel};
pub use error::{Error, Result};
pub use exchange::{c_alpha, ExchangeState, StepDecision};
pub use harness::{
    derive_trial_seed, emit_report, run_experiment, run_trial, ExperimentSummary, InstanceSource,
    ReportFormat, StreamOrder, TrialConfig, TrialRecord,
};
pub use instance::{
    generate_synthetic, item_set, load_instance, validate_instance, GenConfig, GenKind, Instance,
    Item, ItemId, ItemSet, ValidationReport,
};
pub use matroid::{verify_axioms, Matroid, PMatroid};
pub use reference::{brute_force_opt, greedy, nonrobust_baseline};
pub use robust::{
    rebuild_after_deletion, Buffer, DeletionSet, DrawRecord, DrawSource, RebuildOutcome,
    RobustOutcome, RobustParams,
};
pub use submodular::{OracleKind, UtilityOracle};
