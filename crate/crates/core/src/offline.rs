//! Offline one-class ELMs: OCELM / OCKELM (boundary) and AAELM / AAKELM
//! (reconstruction).
//!
//! Training builds the N×N matrix `Ω` (the random kernel `H·Hᵀ` or an
//! explicit kernel Gram matrix), solves `(Ω + I/C)β = T` with `T = R·𝟙` for
//! boundary models and `T = X` for reconstruction models, and fits the
//! threshold on the training outputs `O = Ω·β`. Scoring uses the cross
//! matrix between test and training samples, `K(Y, X)·β`, so the model keeps
//! its training basis.

use alloc::vec::Vec;
use core::fmt;

use crate::dataset::ZScoreStats;
use crate::error::{Error, Result};
use crate::featuremap::{kernel_gram, random_kernel_gram, FeatureMap, HiddenLayer, Kernel, NodeType};
use crate::linsolve::solve_regularized;
use crate::matrix::Matrix;
use crate::threshold::{apply_threshold, thr1_fit, thr2_fit, thr3_decide, Decision, ThresholdSpec};

/// Default boundary target value.
pub const DEFAULT_R: f64 = 1.0;
/// Default hidden width for random feature maps.
pub const DEFAULT_HIDDEN: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// One output node trained towards a constant `R`.
    Boundary,
    /// One output per feature trained to reproduce the input.
    Reconstruction,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Self::Boundary => "boundary",
            Self::Reconstruction => "reconstruction",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "boundary" => Some(Self::Boundary),
            "reconstruction" => Some(Self::Reconstruction),
            _ => None,
        }
    }

    /// Rejects the `Thr3` + boundary combination.
    pub fn check_threshold(self, spec: &ThresholdSpec) -> Result<()> {
        spec.validate()?;
        if self == Self::Boundary && matches!(spec, ThresholdSpec::Thr3 { .. }) {
            return Err(Error::Thr3NotApplicable);
        }
        Ok(())
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Feature map to build at training time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MappingSpec {
    Random {
        node_type: NodeType,
        hidden: usize,
        seed: u64,
    },
    Kernel(Kernel),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OfflineConfig {
    pub family: Family,
    pub mapping: MappingSpec,
    pub c: f64,
    pub threshold: ThresholdSpec,
    pub r: f64,
}

impl OfflineConfig {
    pub fn new(family: Family, mapping: MappingSpec, c: f64, threshold: ThresholdSpec) -> Self {
        Self {
            family,
            mapping,
            c,
            threshold,
            r: DEFAULT_R,
        }
    }
}

/// Per-sample training/scoring error of the boundary and reconstruction
/// families, before thresholding.
///
/// Boundary models use `|o − R|` under `Thr1` and `(o − R)²` under `Thr2`;
/// reconstruction models use the squared reconstruction error.
pub fn sample_errors(
    family: Family,
    threshold: &ThresholdSpec,
    outputs: &Matrix,
    targets: &Matrix,
    r: f64,
) -> Vec<f64> {
    match family {
        Family::Boundary => (0..outputs.rows())
            .map(|i| {
                let d = outputs[(i, 0)] - r;
                match threshold {
                    ThresholdSpec::Thr1 { .. } => d.abs(),
                    _ => d * d,
                }
            })
            .collect(),
        Family::Reconstruction => (0..outputs.rows())
            .map(|i| {
                outputs
                    .row(i)
                    .iter()
                    .zip(targets.row(i))
                    .map(|(o, x)| (x - o) * (x - o))
                    .sum()
            })
            .collect(),
    }
}

/// Fits the scalar threshold from training outputs. `Thr3` has no scalar cut;
/// its `condn2_frac` is returned so decisions carry it.
pub fn fit_threshold(
    family: Family,
    threshold: &ThresholdSpec,
    outputs: &Matrix,
    targets: &Matrix,
    r: f64,
) -> Result<f64> {
    match *threshold {
        ThresholdSpec::Thr1 { fracrej } => thr1_fit(&sample_errors(family, threshold, outputs, targets, r), fracrej),
        ThresholdSpec::Thr2 => thr2_fit(&sample_errors(family, threshold, outputs, targets, r)),
        ThresholdSpec::Thr3 { condn2_frac, .. } => {
            if family == Family::Boundary {
                Err(Error::Thr3NotApplicable)
            } else {
                Ok(condn2_frac)
            }
        }
    }
}

/// Turns outputs into decisions with an already fitted threshold.
///
/// `inputs` are the z-scored rows. `Thr3` compares each feature with its
/// reconstruction in the original units (both mapped back through `zstats`),
/// since relative errors of standardized values blow up near the mean.
pub fn decide(
    family: Family,
    threshold: &ThresholdSpec,
    thresh: f64,
    outputs: &Matrix,
    inputs: &Matrix,
    zstats: &ZScoreStats,
    r: f64,
) -> Result<Vec<Decision>> {
    match *threshold {
        ThresholdSpec::Thr3 {
            condn1,
            condn2_frac,
        } => {
            let actual = zstats.invert(inputs)?;
            let predicted = zstats.invert(outputs)?;
            (0..outputs.rows())
                .map(|i| thr3_decide(actual.row(i), predicted.row(i), condn1, condn2_frac))
                .collect()
        }
        _ => Ok(sample_errors(family, threshold, outputs, inputs, r)
            .into_iter()
            .map(|e| apply_threshold(e, thresh))
            .collect()),
    }
}

/// A trained offline classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct OfflineModel {
    family: Family,
    map: FeatureMap,
    /// Training hidden outputs (random map) or z-scored training samples
    /// (kernel map).
    basis: Matrix,
    beta: Matrix,
    c: f64,
    threshold: ThresholdSpec,
    thresh: f64,
    r: f64,
    zstats: ZScoreStats,
}

impl OfflineModel {
    /// Trains on target samples only (raw, un-normalized rows).
    pub fn train(x: &Matrix, cfg: &OfflineConfig) -> Result<Self> {
        cfg.family.check_threshold(&cfg.threshold)?;
        if x.rows() < 2 {
            return Err(Error::TooFewSamples {
                needed: 2,
                found: x.rows(),
            });
        }
        let zstats = ZScoreStats::fit(x)?;
        let xz = zstats.apply(x)?;
        let (map, basis, omega) = match cfg.mapping {
            MappingSpec::Random {
                node_type,
                hidden,
                seed,
            } => {
                let layer = HiddenLayer::random(node_type, hidden, x.cols(), seed)?;
                let h = layer.apply(&xz)?;
                let omega = random_kernel_gram(&h);
                (FeatureMap::Random(layer), h, omega)
            }
            MappingSpec::Kernel(kernel) => {
                kernel.validate()?;
                let omega = kernel_gram(&kernel, &xz, &xz)?;
                (FeatureMap::Kernel(kernel), xz.clone(), omega)
            }
        };
        let targets = match cfg.family {
            Family::Boundary => Matrix::filled(x.rows(), 1, cfg.r),
            Family::Reconstruction => xz.clone(),
        };
        let beta = solve_regularized(&omega, &targets, cfg.c)?;
        let outputs = omega.matmul(&beta)?;
        let thresh = fit_threshold(cfg.family, &cfg.threshold, &outputs, &xz, cfg.r)?;
        Ok(Self {
            family: cfg.family,
            map,
            basis,
            beta,
            c: cfg.c,
            threshold: cfg.threshold,
            thresh,
            r: cfg.r,
            zstats,
        })
    }

    /// Reassembles a stored model, checking shape invariants.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        family: Family,
        map: FeatureMap,
        basis: Matrix,
        beta: Matrix,
        c: f64,
        threshold: ThresholdSpec,
        thresh: f64,
        r: f64,
        zstats: ZScoreStats,
    ) -> Result<Self> {
        family.check_threshold(&threshold)?;
        if basis.rows() != beta.rows() {
            return Err(Error::DimensionMismatch {
                expected: basis.rows(),
                found: beta.rows(),
            });
        }
        let n = zstats.len();
        let expected_k = match family {
            Family::Boundary => 1,
            Family::Reconstruction => n,
        };
        if beta.cols() != expected_k {
            return Err(Error::DimensionMismatch {
                expected: expected_k,
                found: beta.cols(),
            });
        }
        let basis_cols = match &map {
            FeatureMap::Random(layer) => {
                if layer.inputs() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: layer.inputs(),
                    });
                }
                layer.hidden()
            }
            FeatureMap::Kernel(k) => {
                k.validate()?;
                n
            }
        };
        if basis.cols() != basis_cols {
            return Err(Error::DimensionMismatch {
                expected: basis_cols,
                found: basis.cols(),
            });
        }
        Ok(Self {
            family,
            map,
            basis,
            beta,
            c,
            threshold,
            thresh,
            r,
            zstats,
        })
    }

    /// Cross matrix between z-scored rows and the training basis.
    fn cross(&self, yz: &Matrix) -> Result<Matrix> {
        match &self.map {
            FeatureMap::Random(layer) => layer.apply(yz)?.matmul_t(&self.basis),
            FeatureMap::Kernel(k) => kernel_gram(k, yz, &self.basis),
        }
    }

    /// Model outputs for raw rows, together with their z-scored inputs.
    pub fn outputs(&self, y: &Matrix) -> Result<(Matrix, Matrix)> {
        let yz = self.zstats.apply(y)?;
        let o = self.cross(&yz)?.matmul(&self.beta)?;
        Ok((o, yz))
    }

    /// Per-row errors under this model's error formula (not defined for
    /// `Thr3`, which scores per feature; the squared reconstruction error is
    /// returned there).
    pub fn errors(&self, y: &Matrix) -> Result<Vec<f64>> {
        let (o, yz) = self.outputs(y)?;
        Ok(sample_errors(self.family, &self.threshold, &o, &yz, self.r))
    }

    pub fn score(&self, y: &Matrix) -> Result<Vec<Decision>> {
        let (o, yz) = self.outputs(y)?;
        decide(self.family, &self.threshold, self.thresh, &o, &yz, &self.zstats, self.r)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn feature_map(&self) -> &FeatureMap {
        &self.map
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn beta(&self) -> &Matrix {
        &self.beta
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn threshold(&self) -> &ThresholdSpec {
        &self.threshold
    }

    pub fn thresh(&self) -> f64 {
        self.thresh
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn zstats(&self) -> &ZScoreStats {
        &self.zstats
    }

    pub fn input_dim(&self) -> usize {
        self.zstats.len()
    }
}

/// OCELM / OCKELM.
pub fn train_boundary(x: &Matrix, mapping: MappingSpec, c: f64, threshold: ThresholdSpec) -> Result<OfflineModel> {
    OfflineModel::train(x, &OfflineConfig::new(Family::Boundary, mapping, c, threshold))
}

/// AAELM / AAKELM.
pub fn train_reconstruction(x: &Matrix, mapping: MappingSpec, c: f64, threshold: ThresholdSpec) -> Result<OfflineModel> {
    OfflineModel::train(x, &OfflineConfig::new(Family::Reconstruction, mapping, c, threshold))
}
