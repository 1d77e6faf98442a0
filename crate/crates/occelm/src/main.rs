use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use occelm::bench::{run_benchmark, BenchSpec, DEFAULT_RUNS};
use occelm::grid::{boundary_grid, write_grid};
use occelm::io::{load_csv, write_csv, LabelColumn};
use occelm::report::{measure, write_report, write_runs, write_selection, ReportRow};
use occelm::modelfile;
use occelm_core::dataset::synthetic::{banana, banana_pair, ring};
use occelm_core::featuremap::Kernel;
use occelm_core::metrics::{confuse, measures};
use occelm_core::modelsel::{SelectionConfig, DEFAULT_FOLDS, DEFAULT_SIGMA_COUNT, DEFAULT_SIGMA_THR};
use occelm_core::offline::DEFAULT_HIDDEN;
use occelm_core::threshold::DEFAULT_FRACREJ;
use occelm_core::variant::{select_hyper, COrder, GridSettings, Hyper, KernelKind, Learner, Model, Variant};
use occelm_core::{Dataset, Label};

#[derive(Parser)]
#[command(name = "occelm", version, about = "One-class classification with extreme learning machines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an artificial 2-D dataset.
    Gen(GenArgs),
    /// Train a classifier on the target rows of a dataset.
    Train(TrainArgs),
    /// Score a dataset with a saved model.
    Score(ScoreArgs),
    /// Run the repeated split/train/evaluate protocol.
    Bench(BenchArgs),
    /// Run consistency-based model selection only.
    Select(SelectArgs),
    /// Score a lattice with a 2-D model, for boundary plots.
    Grid(GridArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Shape {
    Banana,
    /// Two lobes: targets and mirrored outliers.
    BananaPair,
    Ring,
}

#[derive(Clone, Copy, ValueEnum)]
enum COrderArg {
    Desc,
    Asc,
}

#[derive(Args)]
struct GenArgs {
    shape: Shape,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    count: u64,
    /// Noise standard deviation (default 1 for bananas, 0.1 for the ring).
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DataArgs {
    /// CSV dataset.
    #[arg(long)]
    data: PathBuf,
    /// Label column: index, header name, `last`, `auto` or `none`.
    #[arg(long, default_value = "auto")]
    label_col: String,
}

impl DataArgs {
    fn load(&self) -> Result<Dataset> {
        let label = match self.label_col.as_str() {
            "none" => None,
            s => Some(s.parse::<LabelColumn>().expect("infallible")),
        };
        load_csv(&self.data, label.as_ref()).with_context(|| format!("reading {}", self.data.display()))
    }
}

#[derive(Args)]
struct ModelArgs {
    /// Classifier id, e.g. aakelm_thr1, ockelm_thr2, os_aaelm_thr3_rbf.
    #[arg(long)]
    classifier: String,
    #[arg(long, default_value_t = DEFAULT_FRACREJ)]
    fracrej: f64,
    #[arg(long, default_value_t = DEFAULT_FOLDS)]
    folds: usize,
    #[arg(long, default_value_t = DEFAULT_SIGMA_THR)]
    sigma_thr: f64,
    /// Kernel family for kernel classifiers: rbf, linear, polynomial, wavelet.
    #[arg(long, default_value = "rbf")]
    kernel: String,
    /// Kernel parameters, comma separated (rbf: sigma; polynomial: degree,offset;
    /// wavelet: dilation,shift,width).
    #[arg(long, value_delimiter = ',')]
    kern_par: Option<Vec<f64>>,
    /// Regularization C.
    #[arg(long)]
    c_reg: Option<f64>,
    /// Hidden nodes for random-feature and online classifiers.
    #[arg(long)]
    hidden: Option<usize>,
    /// Initial chunk size for online classifiers.
    #[arg(long)]
    n0: Option<usize>,
    /// Block size for online classifiers.
    #[arg(long)]
    block: Option<usize>,
    /// Hidden node type for online classifiers.
    #[arg(long, value_parser = ["sig", "rbf"])]
    node_type: Option<String>,
    /// Order of regularization values within one kernel setting during
    /// selection: `desc` prefers the tightest consistent fit, `asc` the most
    /// regularized one.
    #[arg(long, value_enum, default_value = "desc")]
    c_order: COrderArg,
    /// Number of kernel widths in the selection grid.
    #[arg(long, default_value_t = DEFAULT_SIGMA_COUNT)]
    sigma_count: usize,
    #[arg(long)]
    seed: Option<u64>,
}

impl ModelArgs {
    fn variant(&self) -> Result<Variant> {
        let mut id = self.classifier.to_ascii_lowercase().replace('-', "_");
        if let Some(node) = &self.node_type {
            if !id.starts_with("os_") {
                bail!("--node-type applies to online classifiers only");
            }
            for suffix in ["_sig", "_rbf"] {
                if let Some(stripped) = id.strip_suffix(suffix) {
                    id = stripped.to_string();
                }
            }
            id = format!("{id}_{node}");
        }
        Variant::parse(&id).with_context(|| format!("classifier {:?}", self.classifier))
    }

    fn kernel_kind(&self) -> Result<KernelKind> {
        KernelKind::from_name(&self.kernel).with_context(|| format!("unknown kernel {:?}", self.kernel))
    }

    fn has_fixed_params(&self) -> bool {
        self.kern_par.is_some() || self.c_reg.is_some() || self.hidden.is_some() || self.n0.is_some() || self.block.is_some()
    }

    /// Hyperparameters from flags, with defaults for anything not given.
    fn hyper(&self, variant: &Variant) -> Result<Hyper> {
        let c = self.c_reg.unwrap_or(1.0);
        Ok(match variant.learner() {
            Learner::Kernel => {
                let kind = self.kernel_kind()?;
                let par = self.kern_par.clone().unwrap_or_default();
                let kernel = match (kind, par.as_slice()) {
                    (KernelKind::Rbf, []) => Kernel::Rbf { sigma: 1.0 },
                    (KernelKind::Polynomial, []) => Kernel::Polynomial { degree: 2, offset: 1.0 },
                    (KernelKind::Polynomial, [d]) => Kernel::from_params("polynomial", &[*d, 1.0])?,
                    (KernelKind::Wavelet, []) => Kernel::Wavelet {
                        dilation: 1.0,
                        shift: 1.0,
                        width: 1.0,
                    },
                    (KernelKind::Rbf, p) => Kernel::from_params("rbf", p)?,
                    (KernelKind::Linear, p) => Kernel::from_params("linear", p)?,
                    (KernelKind::Polynomial, p) => Kernel::from_params("polynomial", p)?,
                    (KernelKind::Wavelet, p) => Kernel::from_params("wavelet", p)?,
                };
                Hyper::Kernel { kernel, c }
            }
            Learner::Random => Hyper::Random {
                hidden: self.hidden.unwrap_or(DEFAULT_HIDDEN),
                c,
            },
            Learner::Online(_) => Hyper::Online {
                hidden: self.hidden.unwrap_or(DEFAULT_HIDDEN),
                initial: self.n0,
                block: self.block,
            },
        })
    }

    fn grid(&self) -> Result<GridSettings> {
        Ok(GridSettings {
            kernel: self.kernel_kind()?,
            sigma_count: self.sigma_count,
            c_order: match self.c_order {
                COrderArg::Desc => COrder::Descending,
                COrderArg::Asc => COrder::Ascending,
            },
        })
    }

    fn selection(&self, seed: u64) -> SelectionConfig {
        SelectionConfig {
            folds: self.folds,
            sigma_thr: self.sigma_thr,
            fracrej: self.fracrej,
            seed,
        }
    }
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Choose hyperparameters by consistency-based selection.
    #[arg(long)]
    select: bool,
    /// Write the selection table here.
    #[arg(long)]
    diag_out: Option<PathBuf>,
    /// Model file to write.
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct ScoreArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    model: PathBuf,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Dataset name for the report (default: file stem).
    #[arg(long)]
    name: Option<String>,
    #[arg(long, default_value_t = DEFAULT_RUNS as u64, value_parser = clap::value_parser!(u64).range(1..))]
    runs: u64,
    /// Rescale features to [0, 1] before splitting.
    #[arg(long)]
    minmax: bool,
    /// Force selection even when hyperparameters are given.
    #[arg(long)]
    select: bool,
    /// Per-run table.
    #[arg(long)]
    runs_out: Option<PathBuf>,
    /// Selection table.
    #[arg(long)]
    diag_out: Option<PathBuf>,
    /// Aggregate report.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SelectArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Selection table.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    model: PathBuf,
    /// xmin,xmax,ymin,ymax
    #[arg(long, value_delimiter = ',', num_args = 4, required = true, allow_negative_numbers = true)]
    bounds: Vec<f64>,
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..))]
    resolution: u64,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

fn seed_or_entropy(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random();
        eprintln!("seed: {s}");
        s
    })
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn targets_of(data: &Dataset) -> Result<occelm_core::Matrix> {
    let x = data.rows_with(Label::Target);
    if x.rows() < 2 {
        bail!("need at least two target rows, found {}", x.rows());
    }
    Ok(x)
}

fn gen(a: GenArgs) -> Result<()> {
    let seed = seed_or_entropy(a.seed);
    let count = a.count as usize;
    let data = match a.shape {
        Shape::Banana => banana(count, a.noise.unwrap_or(1.0), seed)?,
        Shape::BananaPair => banana_pair(count, a.noise.unwrap_or(1.0), seed)?,
        Shape::Ring => ring(count, a.radius, a.noise.unwrap_or(0.1), seed)?,
    };
    let mut w = output(a.out.as_deref())?;
    write_csv(&mut w, &data)?;
    w.flush()?;
    Ok(())
}

fn train(a: TrainArgs) -> Result<()> {
    let variant = a.model.variant()?;
    let seed = seed_or_entropy(a.model.seed);
    let data = a.data.load()?;
    let x = targets_of(&data)?;
    let hyper = if a.select {
        let sel = select_hyper(&variant, &x, &a.model.grid()?, &a.model.selection(seed))?;
        if let Some(p) = &a.diag_out {
            write_selection(output(Some(p))?, &sel)?;
        }
        if !sel.consistent {
            eprintln!("warning: no candidate met the rejection bound; using the least-rejecting one");
        }
        println!(
            "selected {} (validation rejection {:.4}, bound {:.4})",
            sel.chosen, sel.rejection, sel.err_thr
        );
        sel.chosen
    } else {
        a.model.hyper(&variant)?
    };
    let model = Model::train(&variant, &hyper, &x, a.model.fracrej, seed)?;
    modelfile::save(&a.out, &model)?;
    println!("trained {variant} with {hyper} on {} target rows", x.rows());
    Ok(())
}

fn score(a: ScoreArgs) -> Result<()> {
    let model = modelfile::load(&a.model).with_context(|| format!("reading {}", a.model.display()))?;
    let data = a.data.load()?;
    let decisions = model.score(data.samples())?;
    let mut w = csv::Writer::from_writer(output(a.out.as_deref())?);
    w.write_record(["row", "score", "thresh", "is_target"])?;
    for (i, d) in decisions.iter().enumerate() {
        w.write_record([
            i.to_string(),
            format!("{:e}", d.score),
            format!("{:e}", d.thresh),
            u8::from(d.is_target).to_string(),
        ])?;
    }
    w.flush()?;
    if let Some(labels) = data.labels() {
        let m = measures(&confuse(&decisions, labels)?);
        eprintln!(
            "F1 {} ACC {} AUC {} (sensitivity {}, specificity {})",
            measure(m.f1),
            measure(m.accuracy),
            measure(m.auc),
            measure(m.recall),
            measure(m.specificity)
        );
    }
    Ok(())
}

fn bench(a: BenchArgs) -> Result<()> {
    let variant = a.model.variant()?;
    let seed = seed_or_entropy(a.model.seed);
    let data = a.data.load()?;
    if data.labels().is_none() {
        bail!("benchmarking needs a labeled dataset");
    }
    let mut spec = BenchSpec::new(variant, seed);
    spec.runs = a.runs as usize;
    spec.fracrej = a.model.fracrej;
    spec.folds = a.model.folds;
    spec.sigma_thr = a.model.sigma_thr;
    spec.grid = a.model.grid()?;
    spec.minmax = a.minmax;
    if a.model.has_fixed_params() && !a.select {
        spec.hyper = Some(a.model.hyper(&variant)?);
    }
    let outcome = run_benchmark(&data, &spec)?;
    if let Some(sel) = &outcome.selection {
        eprintln!(
            "model selection ran once: {} candidates, chose {} (rejection {:.4}, bound {:.4}{})",
            sel.trials.len(),
            sel.chosen,
            sel.rejection,
            sel.err_thr,
            if sel.consistent { "" } else { ", none consistent" }
        );
        if let Some(p) = &a.diag_out {
            write_selection(output(Some(p))?, sel)?;
        }
    }
    let secs: Vec<f64> = outcome.runs.iter().map(|r| r.train_time.as_secs_f64()).collect();
    eprintln!(
        "training time per run: mean {:.4} s, max {:.4} s",
        secs.iter().sum::<f64>() / secs.len() as f64,
        secs.iter().cloned().fold(0.0, f64::max)
    );
    let name = a.name.clone().unwrap_or_else(|| {
        a.data
            .data
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    });
    if let Some(p) = &a.runs_out {
        write_runs(output(Some(p))?, &name, &variant, &outcome.runs)?;
    }
    let row = ReportRow {
        dataset: name,
        variant,
        report: outcome.aggregate,
    };
    write_report(output(a.out.as_deref())?, &[row])?;
    Ok(())
}

fn select(a: SelectArgs) -> Result<()> {
    let variant = a.model.variant()?;
    let seed = seed_or_entropy(a.model.seed);
    let data = a.data.load()?;
    let x = targets_of(&data)?;
    let sel = select_hyper(&variant, &x, &a.model.grid()?, &a.model.selection(seed))?;
    write_selection(output(a.out.as_deref())?, &sel)?;
    eprintln!(
        "chose {} (rejection {:.4}, bound {:.4}{})",
        sel.chosen,
        sel.rejection,
        sel.err_thr,
        if sel.consistent { "" } else { ", none consistent" }
    );
    Ok(())
}

fn grid(a: GridArgs) -> Result<()> {
    let model = modelfile::load(&a.model).with_context(|| format!("reading {}", a.model.display()))?;
    let bounds: [f64; 4] = a.bounds.as_slice().try_into().context("--bounds takes four values")?;
    let points = boundary_grid(&model, bounds, a.resolution as usize)?;
    write_grid(output(a.out.as_deref())?, &points)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Train(a) => train(a),
        Command::Score(a) => score(a),
        Command::Bench(a) => bench(a),
        Command::Select(a) => select(a),
        Command::Grid(a) => grid(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

