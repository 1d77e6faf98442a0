//! One-class classification with extreme learning machines.
//!
//! Six classifiers share one training path:
//!
//! | family         | random features | kernel features | online (RLS) |
//! |----------------|-----------------|-----------------|--------------|
//! | boundary       | OCELM           | OCKELM          | OS-OCELM     |
//! | reconstruction | AAELM           | AAKELM          | OS-AAELM     |
//!
//! Boundary models map every training sample to a constant `R` and score the
//! deviation from it; reconstruction models reproduce their input and score
//! the reconstruction error. Offline models solve `(Ω + I/C)β = T` once,
//! online models grow `β` chunk by chunk with recursive least squares.
//! Three threshold criteria ([`threshold`]) turn scores into decisions, and
//! [`modelsel`] picks hyperparameters by consistency-based search.
//!
//! The crate is `no_std` (it needs `alloc`); file formats and the command
//! line live in the `occelm` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod dataset;
pub mod error;
pub mod featuremap;
pub mod linsolve;
pub mod matrix;
pub mod metrics;
pub mod modelsel;
pub mod offline;
pub mod online;
pub mod stats;
pub mod threshold;
pub mod variant;

pub use dataset::{Dataset, Label, SplitPlan, ZScoreStats};
pub use error::{Error, Result};
pub use featuremap::{FeatureMap, HiddenLayer, Kernel, NodeType};
pub use matrix::Matrix;
pub use metrics::{ConfusionCounts, EvalReport};
pub use offline::{Family, OfflineModel};
pub use online::OnlineModel;
pub use threshold::{Decision, ThresholdSpec};
pub use variant::{Hyper, KernelKind, Model, Variant};
