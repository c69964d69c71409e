//! End-to-end incremental protocol: synthetic task generation, sequential
//! training With harmonization, frame-level AUC evaluation and result
//! persistence.

pub mod auc;
pub mod dataset;
pub mod library;
pub mod protocol;
pub mod report;
pub mod synth;

pub use auc::auc;
pub use library::synthetic_library;
pub use protocol::{run_protocol, ProtocolConfig, ProtocolResult};
pub use synth::{default_task_spec, fixed_masks, gen_synthetic_task, RecipeStep, SyntheticSpec, TaskDataset};
