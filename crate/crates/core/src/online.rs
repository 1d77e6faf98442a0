//! OS-OCELM and OS-AAELM: online sequential one-class ELMs.
//!
//! The model starts from a batch least-squares solve on an initial chunk of
//! at least `m` rows and absorbs later chunks through recursive least
//! squares. There is no regularization on this path. Thresholds are fitted
//! once, at [`OnlineModel::finalize`].

use alloc::vec::Vec;

use crate::dataset::ZScoreStats;
use crate::error::{Error, Result};
use crate::featuremap::HiddenLayer;
use crate::linsolve::RlsState;
use crate::matrix::Matrix;
use crate::offline::{decide, fit_threshold, Family};
use crate::threshold::{thr1_fit, thr2_fit, Decision, ThresholdSpec};

/// Which β the training errors used for threshold fitting come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ErrorMode {
    /// Keep every training row and recompute all errors with the final β.
    #[default]
    Recompute,
    /// Record each chunk's errors right after its update and drop the rows.
    Streaming,
}

/// `max(m, N/10)`, the default initial-chunk and block size.
pub fn default_chunk(hidden: usize, samples: usize) -> usize {
    hidden.max(samples / 10)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OnlineModel {
    family: Family,
    layer: HiddenLayer,
    rls: RlsState,
    r: f64,
    zstats: ZScoreStats,
    seen_count: usize,
    mode: ErrorMode,
    /// z-scored training rows (recompute mode).
    retained: Matrix,
    /// Boundary: signed residual `o − R`; reconstruction: squared error
    /// (streaming mode).
    streamed: Vec<f64>,
    fitted: Option<(ThresholdSpec, f64)>,
}

impl OnlineModel {
    /// Initialization phase on the first chunk `x0` (raw rows).
    pub fn init(
        family: Family,
        layer: HiddenLayer,
        zstats: ZScoreStats,
        x0: &Matrix,
        r: f64,
        mode: ErrorMode,
    ) -> Result<Self> {
        if x0.cols() != layer.inputs() || zstats.len() != layer.inputs() {
            return Err(Error::DimensionMismatch {
                expected: layer.inputs(),
                found: x0.cols(),
            });
        }
        if x0.rows() < layer.hidden() {
            return Err(Error::TooFewInitialSamples {
                found: x0.rows(),
                hidden: layer.hidden(),
            });
        }
        let xz = zstats.apply(x0)?;
        let h0 = layer.apply(&xz)?;
        let t0 = targets(family, &xz, r);
        let rls = RlsState::init(&h0, &t0)?;
        let mut model = Self {
            family,
            layer,
            rls,
            r,
            zstats,
            seen_count: 0,
            mode,
            retained: Matrix::zeros(0, x0.cols()),
            streamed: Vec::new(),
            fitted: None,
        };
        model.absorb(&xz, &h0)?;
        Ok(model)
    }

    /// Sequential phase: one chunk of one or more raw rows.
    pub fn update(&mut self, xc: &Matrix) -> Result<()> {
        if self.fitted.is_some() {
            return Err(Error::AlreadyFinalized);
        }
        if xc.cols() != self.layer.inputs() {
            return Err(Error::DimensionMismatch {
                expected: self.layer.inputs(),
                found: xc.cols(),
            });
        }
        if xc.rows() == 0 {
            return Ok(());
        }
        let xz = self.zstats.apply(xc)?;
        let hc = self.layer.apply(&xz)?;
        let tc = targets(self.family, &xz, self.r);
        self.rls.update(&hc, &tc)?;
        self.absorb(&xz, &hc)
    }

    fn absorb(&mut self, xz: &Matrix, h: &Matrix) -> Result<()> {
        self.seen_count += xz.rows();
        match self.mode {
            ErrorMode::Recompute => self.retained = self.retained.vstack(xz)?,
            ErrorMode::Streaming => {
                let o = h.matmul(self.rls.beta())?;
                for i in 0..o.rows() {
                    let e = match self.family {
                        Family::Boundary => o[(i, 0)] - self.r,
                        Family::Reconstruction => o
                            .row(i)
                            .iter()
                            .zip(xz.row(i))
                            .map(|(a, b)| (a - b) * (a - b))
                            .sum(),
                    };
                    self.streamed.push(e);
                }
            }
        }
        Ok(())
    }

    /// Fits the threshold and freezes the model.
    pub fn finalize(&mut self, threshold: ThresholdSpec) -> Result<()> {
        if self.fitted.is_some() {
            return Err(Error::AlreadyFinalized);
        }
        self.family.check_threshold(&threshold)?;
        if self.seen_count < 2 {
            return Err(Error::TooFewSamples {
                needed: 2,
                found: self.seen_count,
            });
        }
        let thresh = match self.mode {
            ErrorMode::Recompute => {
                let o = self.layer.apply(&self.retained)?.matmul(self.rls.beta())?;
                fit_threshold(self.family, &threshold, &o, &self.retained, self.r)?
            }
            ErrorMode::Streaming => match threshold {
                ThresholdSpec::Thr1 { fracrej } => thr1_fit(&self.streamed_errors(&threshold), fracrej)?,
                ThresholdSpec::Thr2 => thr2_fit(&self.streamed_errors(&threshold))?,
                ThresholdSpec::Thr3 { condn2_frac, .. } => condn2_frac,
            },
        };
        self.fitted = Some((threshold, thresh));
        Ok(())
    }

    fn streamed_errors(&self, threshold: &ThresholdSpec) -> Vec<f64> {
        match (self.family, threshold) {
            (Family::Boundary, ThresholdSpec::Thr1 { .. }) => self.streamed.iter().map(|e| e.abs()).collect(),
            (Family::Boundary, _) => self.streamed.iter().map(|e| e * e).collect(),
            (Family::Reconstruction, _) => self.streamed.clone(),
        }
    }

    /// Training errors used for the fitted threshold (empty before
    /// finalization and for `Thr3`).
    pub fn training_errors(&self) -> Result<Vec<f64>> {
        let (spec, _) = self.fitted.ok_or(Error::NotFinalized)?;
        if matches!(spec, ThresholdSpec::Thr3 { .. }) {
            return Ok(Vec::new());
        }
        Ok(match self.mode {
            ErrorMode::Recompute => {
                let o = self.layer.apply(&self.retained)?.matmul(self.rls.beta())?;
                crate::offline::sample_errors(self.family, &spec, &o, &self.retained, self.r)
            }
            ErrorMode::Streaming => self.streamed_errors(&spec),
        })
    }

    /// Outputs `H(Y)·β` for raw rows, with the z-scored rows.
    pub fn outputs(&self, y: &Matrix) -> Result<(Matrix, Matrix)> {
        let yz = self.zstats.apply(y)?;
        let o = self.layer.apply(&yz)?.matmul(self.rls.beta())?;
        Ok((o, yz))
    }

    pub fn score(&self, y: &Matrix) -> Result<Vec<Decision>> {
        let (spec, thresh) = self.fitted.ok_or(Error::NotFinalized)?;
        let (o, yz) = self.outputs(y)?;
        decide(self.family, &spec, thresh, &o, &yz, &self.zstats, self.r)
    }

    /// Rebuilds a finalized model from stored state.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        family: Family,
        layer: HiddenLayer,
        rls: RlsState,
        r: f64,
        zstats: ZScoreStats,
        seen_count: usize,
        threshold: ThresholdSpec,
        thresh: f64,
    ) -> Result<Self> {
        family.check_threshold(&threshold)?;
        let n = layer.inputs();
        if zstats.len() != n || rls.hidden_width() != layer.hidden() {
            return Err(Error::DimensionMismatch {
                expected: layer.hidden(),
                found: rls.hidden_width(),
            });
        }
        let k = match family {
            Family::Boundary => 1,
            Family::Reconstruction => n,
        };
        if rls.output_width() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: rls.output_width(),
            });
        }
        Ok(Self {
            family,
            layer,
            rls,
            r,
            zstats,
            seen_count,
            mode: ErrorMode::Recompute,
            retained: Matrix::zeros(0, n),
            streamed: Vec::new(),
            fitted: Some((threshold, thresh)),
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn layer(&self) -> &HiddenLayer {
        &self.layer
    }

    pub fn rls(&self) -> &RlsState {
        &self.rls
    }

    pub fn beta(&self) -> &Matrix {
        self.rls.beta()
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn zstats(&self) -> &ZScoreStats {
        &self.zstats
    }

    pub fn seen_count(&self) -> usize {
        self.seen_count
    }

    pub fn is_finalized(&self) -> bool {
        self.fitted.is_some()
    }

    pub fn threshold(&self) -> Option<ThresholdSpec> {
        self.fitted.map(|f| f.0)
    }

    pub fn thresh(&self) -> Option<f64> {
        self.fitted.map(|f| f.1)
    }

    pub fn input_dim(&self) -> usize {
        self.layer.inputs()
    }
}

fn targets(family: Family, xz: &Matrix, r: f64) -> Matrix {
    match family {
        Family::Boundary => Matrix::filled(xz.rows(), 1, r),
        Family::Reconstruction => xz.clone(),
    }
}

/// Settings for [`train_online`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnlineConfig {
    pub family: Family,
    pub initial: usize,
    pub block: usize,
    pub threshold: ThresholdSpec,
    pub r: f64,
    pub mode: ErrorMode,
}

/// Fits z-score statistics on all of `x`, initializes on the first
/// `initial` rows and feeds the rest in blocks of `block` rows, in order.
pub fn train_online(x: &Matrix, layer: HiddenLayer, cfg: &OnlineConfig) -> Result<OnlineModel> {
    cfg.family.check_threshold(&cfg.threshold)?;
    if cfg.block == 0 {
        return Err(Error::InvalidParameter("block size must be positive"));
    }
    let n = x.rows();
    let initial = cfg.initial.min(n);
    let zstats = ZScoreStats::fit(x)?;
    let idx: Vec<usize> = (0..n).collect();
    let mut model = OnlineModel::init(
        cfg.family,
        layer,
        zstats,
        &x.select_rows(&idx[..initial]),
        cfg.r,
        cfg.mode,
    )?;
    for chunk in idx[initial..].chunks(cfg.block) {
        model.update(&x.select_rows(chunk))?;
    }
    model.finalize(cfg.threshold)?;
    Ok(model)
}
