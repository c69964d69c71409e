//! Replay-free incremental face-forgery detection.
//!
//! The pipeline turns low-level forgery statistics into a fixed library of
//! contrastive text anchors, injects matched anchors into a small vision
//! transformer through gated cross-attention, trains binary + artifact heads
//! under dual supervision with feature distillation, and merges classifier
//! heads across tasks on the unit hypersphere.

pub mod adh;
pub mod anchors;
pub mod encoder;
pub mod error;
pub mod imgstat;
pub mod indicators;
pub mod trainer;

pub use error::{Error, Result};
