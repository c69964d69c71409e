//! A small vision transformer with artifact-probe attention: gated cross-
//! attention against matched anchor embeddings injected into the last M
//! layers. Forward and exact reverse-mode gradients are hand-rolled in f64 so
//! every parameter tensor can be checked against finite differences.

pub mod checkpoint;
mod config;
mod forward;
mod grad;
mod state;

pub use config::{EncoderConfig, GateMode};
pub use forward::{cross_attention, forward, gated_fuse, ForwardTrace};
pub use grad::{backward, gradient_check, GradReport};
pub use state::{ApaParams, EncoderState, LayerParams};
