//! Labeled sample matrices, z-score normalization and the target/outlier
//! train–test protocol.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::stats;

pub mod synthetic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Target,
    Outlier,
}

impl Label {
    /// Maps the accepted label tokens; `None` for anything else.
    pub fn from_token(token: &str) -> Option<Self> {
        match token.trim() {
            "+1" | "1" | "target" => Some(Self::Target),
            "-1" | "0" | "outlier" => Some(Self::Outlier),
            _ => None,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Self::Target => "+1",
            Self::Outlier => "-1",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// N×n samples with optional per-row labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    samples: Matrix,
    labels: Option<Vec<Label>>,
    feature_names: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(samples: Matrix, labels: Option<Vec<Label>>) -> Result<Self> {
        if samples.rows() == 0 {
            return Err(Error::TooFewSamples {
                needed: 1,
                found: 0,
            });
        }
        if samples.cols() == 0 {
            return Err(Error::InvalidParameter("dataset needs at least one feature"));
        }
        if !samples.is_finite() {
            return Err(Error::InvalidParameter("dataset contains non-finite values"));
        }
        if let Some(l) = &labels {
            if l.len() != samples.rows() {
                return Err(Error::LengthMismatch {
                    left: samples.rows(),
                    right: l.len(),
                });
            }
        }
        Ok(Self {
            samples,
            labels,
            feature_names: None,
        })
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.feature_count() {
            return Err(Error::DimensionMismatch {
                expected: self.feature_count(),
                found: names.len(),
            });
        }
        self.feature_names = Some(names);
        Ok(self)
    }

    pub fn samples(&self) -> &Matrix {
        &self.samples
    }

    pub fn labels(&self) -> Option<&[Label]> {
        self.labels.as_deref()
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        self.feature_names.as_deref()
    }

    pub fn sample_count(&self) -> usize {
        self.samples.rows()
    }

    pub fn feature_count(&self) -> usize {
        self.samples.cols()
    }

    pub fn count(&self, label: Label) -> usize {
        self.labels
            .as_ref()
            .map_or(0, |l| l.iter().filter(|&&x| x == label).count())
    }

    /// Rows carrying `label`, without labels. Unlabeled data counts as all
    /// targets.
    pub fn rows_with(&self, label: Label) -> Matrix {
        match &self.labels {
            None if label == Label::Target => self.samples.clone(),
            None => Matrix::zeros(0, self.feature_count()),
            Some(l) => {
                let idx: Vec<usize> = (0..l.len()).filter(|&i| l[i] == label).collect();
                self.samples.select_rows(&idx)
            }
        }
    }

    fn subset(&self, indices: &[usize], keep_labels: bool) -> Self {
        Self {
            samples: self.samples.select_rows(indices),
            labels: if keep_labels {
                self.labels
                    .as_ref()
                    .map(|l| indices.iter().map(|&i| l[i]).collect())
            } else {
                None
            },
            feature_names: self.feature_names.clone(),
        }
    }

    fn map_samples(&self, samples: Matrix) -> Self {
        Self {
            samples,
            labels: self.labels.clone(),
            feature_names: self.feature_names.clone(),
        }
    }
}

/// Per-feature mean and sample standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct ZScoreStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl ZScoreStats {
    pub fn fit(samples: &Matrix) -> Result<Self> {
        if samples.rows() < 2 {
            return Err(Error::TooFewSamples {
                needed: 2,
                found: samples.rows(),
            });
        }
        let (mean, std) = (0..samples.cols())
            .map(|j| stats::mean_std(&samples.col_to_vec(j)))
            .unzip();
        Ok(Self { mean, std })
    }

    /// Identity transform for `n` features.
    pub fn identity(n: usize) -> Self {
        Self {
            mean: alloc::vec![0.0; n],
            std: alloc::vec![1.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }

    /// `(x − mean)/std`, with zero-variance features mapped to 0.
    pub fn apply(&self, samples: &Matrix) -> Result<Matrix> {
        if samples.cols() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: samples.cols(),
            });
        }
        Ok(Matrix::from_fn(samples.rows(), samples.cols(), |i, j| {
            let s = self.std[j];
            if s > 0.0 {
                (samples[(i, j)] - self.mean[j]) / s
            } else {
                0.0
            }
        }))
    }
}

impl ZScoreStats {
    /// Maps standardized values back to the original units, `z·std + mean`.
    pub fn invert(&self, z: &Matrix) -> Result<Matrix> {
        if z.cols() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: z.cols(),
            });
        }
        Ok(Matrix::from_fn(z.rows(), z.cols(), |i, j| z[(i, j)] * self.std[j] + self.mean[j]))
    }
}

pub fn zscore_fit(train: &Dataset) -> Result<ZScoreStats> {
    ZScoreStats::fit(train.samples())
}

pub fn zscore_apply(data: &Dataset, stats: &ZScoreStats) -> Result<Dataset> {
    Ok(data.map_samples(stats.apply(data.samples())?))
}

/// Rescales every feature to [0, 1]; constant features become 0.
pub fn minmax_rescale(data: &Dataset) -> Dataset {
    let x = data.samples();
    let ranges: Vec<(f64, f64)> = (0..x.cols())
        .map(|j| {
            x.row_iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                    (lo.min(r[j]), hi.max(r[j]))
                })
        })
        .collect();
    data.map_samples(Matrix::from_fn(x.rows(), x.cols(), |i, j| {
        let (lo, hi) = ranges[j];
        if hi > lo {
            (x[(i, j)] - lo) / (hi - lo)
        } else {
            0.0
        }
    }))
}

/// Repeated target/outlier split schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitPlan {
    pub run_count: usize,
    pub target_train_fraction: f64,
    pub seed: u64,
}

impl SplitPlan {
    pub fn new(run_count: usize, seed: u64) -> Self {
        Self {
            run_count,
            target_train_fraction: 0.5,
            seed,
        }
    }

    /// Generator for run `run_index`: the plan seed with its own stream.
    pub fn run_rng(&self, run_index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(run_index as u64);
        rng
    }
}

/// Number of training targets: `round(fraction·targets)`, half rounding up,
/// at least one.
pub fn train_target_count(targets: usize, fraction: f64) -> usize {
    (libm::floor(fraction * targets as f64 + 0.5) as usize).clamp(1, targets)
}

/// Splits a labeled dataset: a random share of the targets (labels dropped)
/// for training, the remaining targets plus every outlier for testing.
pub fn occ_split(data: &Dataset, plan: &SplitPlan, run_index: usize) -> Result<(Dataset, Dataset)> {
    let labels = data.labels().ok_or(Error::MissingLabels)?;
    if plan.run_count == 0 || run_index >= plan.run_count {
        return Err(Error::InvalidParameter("run index outside the split plan"));
    }
    let f = plan.target_train_fraction;
    if !(f > 0.0 && f <= 1.0) {
        return Err(Error::InvalidParameter("target fraction must lie in (0, 1]"));
    }
    let mut targets: Vec<usize> = (0..labels.len())
        .filter(|&i| labels[i] == Label::Target)
        .collect();
    if targets.len() < 2 {
        return Err(Error::NoTargets {
            found: targets.len(),
        });
    }
    if targets.len() == labels.len() {
        return Err(Error::NoOutliers);
    }
    let k = train_target_count(targets.len(), f);
    targets.shuffle(&mut plan.run_rng(run_index));
    let mut train_idx = targets[..k].to_vec();
    train_idx.sort_unstable();
    let mut in_train = alloc::vec![false; labels.len()];
    for &i in &train_idx {
        in_train[i] = true;
    }
    let test_idx: Vec<usize> = (0..labels.len()).filter(|&i| !in_train[i]).collect();
    Ok((data.subset(&train_idx, false), data.subset(&test_idx, true)))
}
