//! The repeated split / select / train / evaluate protocol.

use std::time::{Duration, Instant};

use occelm_core::dataset::{minmax_rescale, occ_split, SplitPlan};
use occelm_core::metrics::{aggregate, confuse, measures, ConfusionCounts, EvalReport};
use occelm_core::modelsel::{Selection, SelectionConfig, DEFAULT_FOLDS, DEFAULT_SIGMA_THR};
use occelm_core::threshold::DEFAULT_FRACREJ;
use occelm_core::variant::{select_hyper, GridSettings, Hyper, Model, Variant};
use occelm_core::{Dataset, Error, Label};

pub const DEFAULT_RUNS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchSpec {
    pub variant: Variant,
    pub runs: usize,
    pub fracrej: f64,
    pub folds: usize,
    pub sigma_thr: f64,
    pub grid: GridSettings,
    /// Fixed hyperparameters; `None` selects them on the first run.
    pub hyper: Option<Hyper>,
    pub seed: u64,
    /// Rescale every feature to [0, 1] before splitting.
    pub minmax: bool,
}

impl BenchSpec {
    pub fn new(variant: Variant, seed: u64) -> Self {
        Self {
            variant,
            runs: DEFAULT_RUNS,
            fracrej: DEFAULT_FRACREJ,
            folds: DEFAULT_FOLDS,
            sigma_thr: DEFAULT_SIGMA_THR,
            grid: GridSettings::default(),
            hyper: None,
            seed,
            minmax: false,
        }
    }

    pub fn selection_config(&self) -> SelectionConfig {
        SelectionConfig {
            folds: self.folds,
            sigma_thr: self.sigma_thr,
            fracrej: self.fracrej,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub run: usize,
    pub hyper: Hyper,
    pub counts: ConfusionCounts,
    pub report: EvalReport,
    /// Wall-clock training time (selection excluded).
    pub train_time: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchOutcome {
    pub runs: Vec<RunRecord>,
    pub aggregate: EvalReport,
    pub selection: Option<Selection<Hyper>>,
}

/// Seed of the random hidden layer in run `run`.
pub fn run_seed(seed: u64, run: usize) -> u64 {
    // splitmix64 finalizer over the pair
    let mut z = seed ^ (run as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn run_benchmark(data: &Dataset, spec: &BenchSpec) -> Result<BenchOutcome, Error> {
    if spec.runs == 0 {
        return Err(Error::InvalidParameter("run count must be positive"));
    }
    let rescaled;
    let data = if spec.minmax {
        rescaled = minmax_rescale(data);
        &rescaled
    } else {
        data
    };
    let plan = SplitPlan::new(spec.runs, spec.seed);
    let mut hyper = spec.hyper;
    let mut selection = None;
    let mut runs = Vec::with_capacity(spec.runs);
    for run in 0..spec.runs {
        let (train, test) = occ_split(data, &plan, run)?;
        let x = train.samples();
        let h = match hyper {
            Some(h) => h,
            None => {
                let sel = select_hyper(&spec.variant, x, &spec.grid, &spec.selection_config())?;
                let h = sel.chosen;
                selection = Some(sel);
                hyper = Some(h);
                h
            }
        };
        let start = Instant::now();
        let model = Model::train(&spec.variant, &h, x, spec.fracrej, run_seed(spec.seed, run))?;
        let train_time = start.elapsed();
        let decisions = model.score(test.samples())?;
        let labels: &[Label] = test.labels().ok_or(Error::MissingLabels)?;
        let counts = confuse(&decisions, labels)?;
        runs.push(RunRecord {
            run,
            hyper: h,
            counts,
            report: measures(&counts),
            train_time,
        });
    }
    let reports: Vec<EvalReport> = runs.iter().map(|r| r.report).collect();
    Ok(BenchOutcome {
        aggregate: aggregate(&reports)?,
        runs,
        selection,
    })
}
