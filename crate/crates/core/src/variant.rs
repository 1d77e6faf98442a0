//! The thirteen classifier variants, their hyperparameter grids and a single
//! train/score entry point over offline and online models.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::featuremap::{HiddenLayer, Kernel, NodeType};
use crate::matrix::Matrix;
use crate::dataset::ZScoreStats;
use crate::modelsel::{c_grid, distance_range, select, sigma_grid, Selection, SelectionConfig, DEFAULT_SIGMA_COUNT};
use crate::offline::{Family, MappingSpec, OfflineConfig, OfflineModel, DEFAULT_R};
use crate::online::{default_chunk, train_online, ErrorMode, OnlineConfig, OnlineModel};
use crate::threshold::{Decision, ThresholdSpec, DEFAULT_CONDN1, DEFAULT_CONDN2_FRAC};

/// Hidden widths tried for random feature maps, most complex first.
pub const HIDDEN_GRID: [usize; 4] = [200, 100, 50, 20];
/// Polynomial degrees tried, most complex first.
pub const DEGREE_GRID: [u32; 2] = [3, 2];
pub const POLY_OFFSET: f64 = 1.0;
/// Wavelet dilations tried.
pub const WAVELET_DILATIONS: [f64; 3] = [0.5, 1.0, 2.0];
/// Number of distance-scaled values per wavelet length parameter.
pub const WAVELET_SCALE_COUNT: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Learner {
    /// Offline, random hidden layer (OCELM, AAELM).
    Random,
    /// Offline, explicit kernel (OCKELM, AAKELM).
    Kernel,
    /// Online sequential with the given node type (OS-OCELM, OS-AAELM).
    Online(NodeType),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThresholdKind {
    Thr1,
    Thr2,
    Thr3,
}

impl ThresholdKind {
    pub fn spec(self, fracrej: f64) -> ThresholdSpec {
        match self {
            Self::Thr1 => ThresholdSpec::Thr1 { fracrej },
            Self::Thr2 => ThresholdSpec::Thr2,
            Self::Thr3 => ThresholdSpec::Thr3 {
                condn1: DEFAULT_CONDN1,
                condn2_frac: DEFAULT_CONDN2_FRAC,
            },
        }
    }

    fn index(self) -> u8 {
        match self {
            Self::Thr1 => 1,
            Self::Thr2 => 2,
            Self::Thr3 => 3,
        }
    }
}

/// Family × learner × threshold criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Variant {
    family: Family,
    learner: Learner,
    threshold: ThresholdKind,
}

impl Variant {
    pub fn new(family: Family, learner: Learner, threshold: ThresholdKind) -> Result<Self> {
        if family == Family::Boundary && threshold == ThresholdKind::Thr3 {
            return Err(Error::Thr3NotApplicable);
        }
        Ok(Self {
            family,
            learner,
            threshold,
        })
    }

    /// Parses ids such as `aakelm_thr1`, `ocelm_thr2` or `os_aaelm_thr3_rbf`.
    /// Online ids without a node suffix use sigmoid nodes.
    pub fn parse(id: &str) -> Result<Self> {
        let unknown = Error::InvalidParameter("unknown classifier id");
        let id = id.trim().to_ascii_lowercase().replace('-', "_");
        let (online, rest) = match id.strip_prefix("os_") {
            Some(r) => (true, r),
            None => (false, id.as_str()),
        };
        let mut parts = rest.split('_');
        let name = parts.next().ok_or(unknown.clone())?;
        let thr = match parts.next() {
            Some("thr1") => ThresholdKind::Thr1,
            Some("thr2") => ThresholdKind::Thr2,
            Some("thr3") => ThresholdKind::Thr3,
            _ => return Err(unknown),
        };
        let node = parts.next();
        if parts.next().is_some() {
            return Err(unknown);
        }
        let (family, learner) = match (online, name, node) {
            (false, "ocelm", None) => (Family::Boundary, Learner::Random),
            (false, "ockelm", None) => (Family::Boundary, Learner::Kernel),
            (false, "aaelm", None) => (Family::Reconstruction, Learner::Random),
            (false, "aakelm", None) => (Family::Reconstruction, Learner::Kernel),
            (true, "ocelm" | "aaelm", node) => {
                let node = match node {
                    None => NodeType::Sigmoid,
                    Some(s) => NodeType::from_name(s).ok_or(unknown)?,
                };
                let family = if name == "ocelm" {
                    Family::Boundary
                } else {
                    Family::Reconstruction
                };
                (family, Learner::Online(node))
            }
            _ => return Err(unknown),
        };
        Self::new(family, learner, thr)
    }

    /// Every accepted variant (online ones once per node type).
    pub fn all() -> Vec<Self> {
        let mut v = Vec::new();
        let learners = [
            Learner::Random,
            Learner::Kernel,
            Learner::Online(NodeType::Sigmoid),
            Learner::Online(NodeType::Rbf),
        ];
        for family in [Family::Boundary, Family::Reconstruction] {
            for learner in learners {
                for thr in [ThresholdKind::Thr1, ThresholdKind::Thr2, ThresholdKind::Thr3] {
                    if let Ok(x) = Self::new(family, learner, thr) {
                        v.push(x);
                    }
                }
            }
        }
        v
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn learner(&self) -> Learner {
        self.learner
    }

    pub fn threshold_kind(&self) -> ThresholdKind {
        self.threshold
    }

    pub fn threshold_spec(&self, fracrej: f64) -> ThresholdSpec {
        self.threshold.spec(fracrej)
    }

    /// Table name of the classifier, e.g. `AAKELM` or `OS-OCELM`.
    pub fn classifier_name(&self) -> &'static str {
        match (self.family, self.learner) {
            (Family::Boundary, Learner::Random) => "OCELM",
            (Family::Boundary, Learner::Kernel) => "OCKELM",
            (Family::Boundary, Learner::Online(_)) => "OS-OCELM",
            (Family::Reconstruction, Learner::Random) => "AAELM",
            (Family::Reconstruction, Learner::Kernel) => "AAKELM",
            (Family::Reconstruction, Learner::Online(_)) => "OS-AAELM",
        }
    }

    /// Table name of the threshold variant, e.g. `Thr1` or `Thr2(RBF)`.
    pub fn variant_name(&self) -> String {
        let t = self.threshold.index();
        match self.learner {
            Learner::Online(NodeType::Rbf) => format!("Thr{t}(RBF)"),
            Learner::Online(NodeType::Sigmoid) => format!("Thr{t}(Sig)"),
            _ => format!("Thr{t}"),
        }
    }

    pub fn id(&self) -> String {
        let base = self.classifier_name().to_ascii_lowercase().replace('-', "_");
        let t = self.threshold.index();
        match self.learner {
            Learner::Online(node) => format!("{base}_thr{t}_{}", node.name()),
            _ => format!("{base}_thr{t}"),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

/// Kernel family searched for kernel learners.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum KernelKind {
    #[default]
    Rbf,
    Linear,
    Polynomial,
    Wavelet,
}

impl KernelKind {
    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "rbf" => Some(Self::Rbf),
            "linear" | "lin" => Some(Self::Linear),
            "polynomial" | "poly" => Some(Self::Polynomial),
            "wavelet" => Some(Self::Wavelet),
            _ => None,
        }
    }
}

/// Hyperparameters of one candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Hyper {
    Kernel { kernel: Kernel, c: f64 },
    Random { hidden: usize, c: f64 },
    /// Initial-chunk and block sizes; `None` means `max(hidden, N/10)`.
    Online {
        hidden: usize,
        initial: Option<usize>,
        block: Option<usize>,
    },
}

impl fmt::Display for Hyper {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Kernel { kernel, c } => {
                write!(f, "kernel={}", kernel.name())?;
                for p in kernel.params() {
                    write!(f, ":{p}")?;
                }
                write!(f, " c={c:e}")
            }
            Self::Random { hidden, c } => write!(f, "hidden={hidden} c={c:e}"),
            Self::Online { hidden, initial, block } => {
                write!(f, "hidden={hidden}")?;
                match initial {
                    Some(k) => write!(f, " n0={k}")?,
                    None => write!(f, " n0=auto")?,
                }
                match block {
                    Some(k) => write!(f, " block={k}"),
                    None => write!(f, " block=auto"),
                }
            }
        }
    }
}

/// Ordering of the regularization values within one kernel setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum COrder {
    /// Larger `C` (tighter fit, more complex) first.
    #[default]
    Descending,
    /// Smaller `C` first: among consistent candidates at the same kernel
    /// setting the most regularized one wins.
    Ascending,
}

fn ordered_c(order: COrder) -> Vec<f64> {
    let mut c = c_grid();
    if order == COrder::Descending {
        c.reverse();
    }
    c
}

/// Candidate grid for a variant, ordered most complex first.
///
/// `xz` is the z-scored training set (kernel widths derive from its
/// pairwise distances) and `fit_rows` the smallest training-set size a
/// candidate will be fitted on (bounds hidden widths).
pub fn default_grid(
    variant: &Variant,
    kernel: KernelKind,
    xz: &Matrix,
    fit_rows: usize,
    sigma_count: usize,
    c_order: COrder,
) -> Result<Vec<Hyper>> {
    let cs = ordered_c(c_order);
    let widths = || -> Vec<usize> {
        let mut w: Vec<usize> = HIDDEN_GRID.iter().map(|&m| m.min(fit_rows.max(1))).collect();
        w.dedup();
        w
    };
    let mut grid = Vec::new();
    match variant.learner {
        Learner::Kernel => match kernel {
            KernelKind::Rbf => {
                for sigma in sigma_grid(xz, sigma_count)? {
                    for &c in &cs {
                        grid.push(Hyper::Kernel {
                            kernel: Kernel::Rbf { sigma },
                            c,
                        });
                    }
                }
            }
            KernelKind::Linear => {
                grid.extend(cs.iter().map(|&c| Hyper::Kernel {
                    kernel: Kernel::Linear,
                    c,
                }));
            }
            KernelKind::Polynomial => {
                for degree in DEGREE_GRID {
                    for &c in &cs {
                        grid.push(Hyper::Kernel {
                            kernel: Kernel::Polynomial {
                                degree,
                                offset: POLY_OFFSET,
                            },
                            c,
                        });
                    }
                }
            }
            KernelKind::Wavelet => {
                let (lo, hi) = distance_range(xz)?;
                let scales: Vec<f64> = (0..WAVELET_SCALE_COUNT)
                    .map(|i| lo * libm::pow(hi / lo, i as f64 / (WAVELET_SCALE_COUNT - 1) as f64))
                    .collect();
                for &width in &scales {
                    for &shift in &scales {
                        for dilation in WAVELET_DILATIONS.iter().rev() {
                            for &c in &cs {
                                grid.push(Hyper::Kernel {
                                    kernel: Kernel::Wavelet {
                                        dilation: *dilation,
                                        shift,
                                        width: width * width,
                                    },
                                    c,
                                });
                            }
                        }
                    }
                }
            }
        },
        Learner::Random => {
            for hidden in widths() {
                for &c in &cs {
                    grid.push(Hyper::Random { hidden, c });
                }
            }
        }
        Learner::Online(_) => {
            for hidden in widths() {
                grid.push(Hyper::Online {
                    hidden,
                    initial: None,
                    block: None,
                });
            }
        }
    }
    Ok(grid)
}

/// A trained classifier of any variant.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Offline(OfflineModel),
    Online(OnlineModel),
}

impl Model {
    /// Trains `variant` with `hyper` on raw target rows. `seed` drives the
    /// random hidden layer (ignored by kernel models).
    pub fn train(variant: &Variant, hyper: &Hyper, x: &Matrix, fracrej: f64, seed: u64) -> Result<Self> {
        let threshold = variant.threshold_spec(fracrej);
        match (variant.learner, *hyper) {
            (Learner::Kernel, Hyper::Kernel { kernel, c }) => {
                let cfg = OfflineConfig::new(variant.family, MappingSpec::Kernel(kernel), c, threshold);
                OfflineModel::train(x, &cfg).map(Self::Offline)
            }
            (Learner::Random, Hyper::Random { hidden, c }) => {
                let mapping = MappingSpec::Random {
                    node_type: NodeType::Sigmoid,
                    hidden,
                    seed,
                };
                let cfg = OfflineConfig::new(variant.family, mapping, c, threshold);
                OfflineModel::train(x, &cfg).map(Self::Offline)
            }
            (Learner::Online(node), Hyper::Online { hidden, initial, block }) => {
                let layer = HiddenLayer::random(node, hidden, x.cols(), seed)?;
                let auto = default_chunk(hidden, x.rows());
                let cfg = OnlineConfig {
                    family: variant.family,
                    initial: initial.unwrap_or(auto),
                    block: block.unwrap_or(auto),
                    threshold,
                    r: DEFAULT_R,
                    mode: ErrorMode::Recompute,
                };
                train_online(x, layer, &cfg).map(Self::Online)
            }
            _ => Err(Error::InvalidParameter("hyperparameters do not match the classifier")),
        }
    }

    pub fn score(&self, y: &Matrix) -> Result<Vec<Decision>> {
        match self {
            Self::Offline(m) => m.score(y),
            Self::Online(m) => m.score(y),
        }
    }

    pub fn input_dim(&self) -> usize {
        match self {
            Self::Offline(m) => m.input_dim(),
            Self::Online(m) => m.input_dim(),
        }
    }

    pub fn family(&self) -> Family {
        match self {
            Self::Offline(m) => m.family(),
            Self::Online(m) => m.family(),
        }
    }
}

/// How candidate grids are built for [`select_hyper`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSettings {
    pub kernel: KernelKind,
    pub sigma_count: usize,
    pub c_order: COrder,
}

impl Default for GridSettings {
    fn default() -> Self {
        Self {
            kernel: KernelKind::Rbf,
            sigma_count: DEFAULT_SIGMA_COUNT,
            c_order: COrder::default(),
        }
    }
}

/// Consistency-based selection of hyperparameters for `variant` on raw
/// target rows `x`. Random layers inside the search use `cfg.seed`.
pub fn select_hyper(
    variant: &Variant,
    x: &Matrix,
    grid: &GridSettings,
    cfg: &SelectionConfig,
) -> Result<Selection<Hyper>> {
    if cfg.folds < 2 {
        return Err(Error::InvalidParameter("need at least two folds"));
    }
    let xz = ZScoreStats::fit(x)?.apply(x)?;
    let fit_rows = x.rows() - x.rows().div_ceil(cfg.folds);
    let candidates = default_grid(variant, grid.kernel, &xz, fit_rows, grid.sigma_count, grid.c_order)?;
    select(x, &candidates, cfg, |h, train, val| {
        let model = Model::train(variant, h, train, cfg.fracrej, cfg.seed)?;
        Ok(rejection_rate(&model.score(val)?))
    })
}

/// Fraction of rows of `y` a model rejects.
pub fn rejection_rate(decisions: &[Decision]) -> f64 {
    decisions.iter().filter(|d| !d.is_target).count() as f64 / decisions.len().max(1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thirteen_variants_plus_node_types() {
        let all = Variant::all();
        // 2 + 2 + 3 + 3 offline, (2 + 3) online per node type
        assert_eq!(all.len(), 20);
        for v in &all {
            assert_eq!(Variant::parse(&v.id()).unwrap(), *v);
        }
    }

    #[test]
    fn parse_ids() {
        let v = Variant::parse("aakelm_thr3").unwrap();
        assert_eq!(v.classifier_name(), "AAKELM");
        assert_eq!(v.variant_name(), "Thr3");
        let o = Variant::parse("os_aaelm_thr1_rbf").unwrap();
        assert_eq!(o.learner(), Learner::Online(NodeType::Rbf));
        assert_eq!(o.variant_name(), "Thr1(RBF)");
        assert_eq!(Variant::parse("OS-OCELM_thr2").unwrap().variant_name(), "Thr2(Sig)");
        assert_eq!(Variant::parse("ocelm_thr3"), Err(Error::Thr3NotApplicable));
        assert_eq!(Variant::parse("os_ocelm_thr3_rbf"), Err(Error::Thr3NotApplicable));
        assert!(Variant::parse("svdd_thr1").is_err());
        assert!(Variant::parse("aakelm_thr1_rbf").is_err());
        assert!(Variant::parse("aakelm").is_err());
    }

    #[test]
    fn grids_have_expected_sizes() {
        let xz = Matrix::from_fn(30, 2, |i, j| (i as f64 * 0.37 + j as f64 * 1.3).sin());
        let v = Variant::parse("ockelm_thr1").unwrap();
        let g = default_grid(&v, KernelKind::Rbf, &xz, 24, 20, COrder::Descending).unwrap();
        assert_eq!(g.len(), 20 * 17);
        let w = default_grid(&v, KernelKind::Wavelet, &xz, 24, 20, COrder::Descending).unwrap();
        assert_eq!(w.len(), 5 * 5 * 3 * 17);
        let r = default_grid(&Variant::parse("aaelm_thr2").unwrap(), KernelKind::Rbf, &xz, 24, 20, COrder::Descending)
            .unwrap();
        // widths capped at 24 rows: {24, 20}
        assert_eq!(r.len(), 2 * 17);
        let o = default_grid(&Variant::parse("os_aaelm_thr2").unwrap(), KernelKind::Rbf, &xz, 120, 20, COrder::Descending)
            .unwrap();
        let widths: Vec<usize> = o
            .iter()
            .map(|h| match h {
                Hyper::Online {
                    hidden,
                    initial: None,
                    block: None,
                } => *hidden,
                _ => panic!("unexpected candidate {h:?}"),
            })
            .collect();
        assert_eq!(widths, [120, 100, 50, 20]);
    }

    #[test]
    fn mismatched_hyper_rejected() {
        let v = Variant::parse("aakelm_thr1").unwrap();
        let x = Matrix::from_fn(10, 2, |i, j| (i + j) as f64);
        let r = Model::train(&v, &Hyper::Random { hidden: 5, c: 1.0 }, &x, 0.1, 0);
        assert!(r.is_err());
    }
}
