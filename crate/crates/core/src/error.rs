use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: {left} decisions vs {right} labels")]
    LengthMismatch { left: usize, right: usize },

    #[error("too few samples: need at least {needed}, got {found}")]
    TooFewSamples { needed: usize, found: usize },

    #[error("linear system is singular (condition estimate {condition:e})")]
    SingularSystem { condition: f64 },

    #[error("initial hidden-layer matrix is rank deficient (condition estimate {condition:e})")]
    RankDeficient { condition: f64 },

    #[error("initial chunk has {found} samples but the hidden layer has {hidden} nodes")]
    TooFewInitialSamples { found: usize, hidden: usize },

    #[error("cannot fit a threshold on an empty error vector")]
    EmptyErrors,

    #[error("dataset has no labels")]
    MissingLabels,

    #[error("dataset has too few target samples ({found})")]
    NoTargets { found: usize },

    #[error("dataset has no outlier samples")]
    NoOutliers,

    #[error("threshold criterion thr3 needs a reconstruction model")]
    Thr3NotApplicable,

    #[error("online model is already finalized")]
    AlreadyFinalized,

    #[error("online model is not finalized")]
    NotFinalized,

    #[error("all points are identical; no nonzero pairwise distance")]
    AllPointsIdentical,

    #[error("no runs to aggregate")]
    EmptyRuns,

    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
