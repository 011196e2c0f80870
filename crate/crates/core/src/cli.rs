//! Command-line workflows: `fit`, `transform`, `classify`, `eval`, `synth`.
//!
//! Every command is a pure function of its flags, input files and seed.
//! Machine-readable outputs go to files; progress goes to the log.

use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::classifier::{evaluate, knn_hamming, predict_forest, train_forest, ForestConfig, Metrics};
use crate::clustering::assign_clusters;
use crate::codes::{BitColumn, Hashcode, HashcodeMatrix};
use crate::dataset::{load_dataset, split_pseudo_test, Dataset, Split};
use crate::error::{Error, Result};
use crate::hashfn::hash_all;
use crate::kernels::KernelConfig;
use crate::model::{canonical_json, ModelFile};
use crate::optimizer::{learn, LearnConfig, StepRecord};
use crate::synth::{synth_generate, write_synth, SynthConfig};

#[derive(Debug, Parser)]
#[command(name = "nuhash", version, about = "Nearly unsupervised kernelized hashcode learning")]
pub struct Cli {
    /// Overrides every seed in the configuration (default 13).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; defaults to the machine's parallelism.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Repeat for more detail (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Learn a hash ensemble and write a model file.
    Fit(FitArgs),
    /// Hash a dataset with a learned model.
    Transform(TransformArgs),
    /// Train a classifier on hashcodes and predict an evaluation set.
    Classify(ClassifyArgs),
    /// Score predictions against gold labels.
    Eval(EvalArgs),
    /// Generate a synthetic dataset.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub train: PathBuf,
    /// Test points for transductive learning.
    #[arg(long, conflicts_with = "pseudo_test_fraction")]
    pub test: Option<PathBuf>,
    /// Fraction of training points held out as pseudo-test (inductive learning).
    #[arg(long)]
    pub pseudo_test_fraction: Option<f64>,
    /// JSON object with optional `kernel`, `learn` and `forest` sections.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Writes each point's cluster pattern as JSON lines.
    #[arg(long)]
    pub debug_clusters: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassifierKind {
    Rf,
    Knn,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub eval: PathBuf,
    #[arg(long, value_enum, default_value_t = ClassifierKind::Rf)]
    pub classifier: ClassifierKind,
    /// Neighbours for `knn`.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Same format as `fit --config`; only the `forest` section is read.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Also train on points held out as pseudo-test during an inductive fit.
    #[arg(long)]
    pub include_pseudo_test: bool,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub metrics: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

/// Contents of a `--config` file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitConfig {
    pub kernel: KernelConfig,
    pub learn: LearnConfig,
    pub forest: Option<ForestConfig>,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::config(path.display().to_string(), e.to_string()))
}

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn write_report<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = canonical_json(value)?;
    bytes.push(b'\n');
    write_file(path, bytes)
}

#[derive(Serialize)]
struct CodeRecord<'a> {
    id: &'a str,
    bits: String,
}

/// One `{id, bits}` line per point, bits in ensemble order.
pub fn codes_jsonl<'a>(ids: impl IntoIterator<Item = &'a str>, matrix: &HashcodeMatrix) -> String {
    ids.into_iter()
        .enumerate()
        .map(|(i, id)| {
            let rec = CodeRecord {
                id,
                bits: matrix.row(i).to_string(),
            };
            serde_json::to_string(&rec).expect("code record") + "\n"
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub id: String,
    pub label: u8,
}

fn predictions_jsonl(preds: &[Prediction]) -> String {
    preds
        .iter()
        .map(|p| serde_json::to_string(p).expect("prediction") + "\n")
        .collect()
}

#[derive(Serialize)]
struct ClusterRow {
    pattern: String,
    train: usize,
    test: usize,
    x_entropy: f64,
}

#[derive(Serialize)]
struct ClusterSummary {
    count: usize,
    mean_x_entropy: f64,
    clusters: Vec<ClusterRow>,
}

#[derive(Serialize)]
struct FitReport<'a> {
    mode: &'static str,
    points: usize,
    train_points: usize,
    test_points: usize,
    functions: usize,
    iterations: usize,
    truncation_warning: &'a Option<String>,
    steps: &'a [StepRecord],
    survived_thresholds: &'a [Option<f64>],
    clusters: Option<ClusterSummary>,
    codes_sha256: String,
}

pub fn run(cli: Cli) -> Result<()> {
    let Cli {
        seed, threads, command, ..
    } = cli;
    match threads {
        Some(0) => Err(Error::Usage("--threads must be >= 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Usage(format!("thread pool: {e}")))?;
            pool.install(|| dispatch(command, seed))
        }
        None => dispatch(command, seed),
    }
}

fn dispatch(command: Command, seed: Option<u64>) -> Result<()> {
    match command {
        Command::Fit(a) => cmd_fit(&a, seed),
        Command::Transform(a) => cmd_transform(&a),
        Command::Classify(a) => cmd_classify(&a, seed),
        Command::Eval(a) => cmd_eval(&a),
        Command::Synth(a) => cmd_synth(&a, seed),
    }
}

pub fn cmd_fit(args: &FitArgs, seed: Option<u64>) -> Result<()> {
    let mut config: FitConfig = match &args.config {
        Some(p) => read_json(p)?,
        None => FitConfig::default(),
    };
    if let Some(s) = seed {
        config.learn.seed = s;
        if let Some(f) = config.forest.as_mut() {
            f.seed = s;
        }
    }
    config.kernel.validate()?;
    config.learn.validate()?;
    if let Some(f) = &config.forest {
        f.validate()?;
    }
    let kind = Some(config.kernel.payload_kind());
    let train = load_dataset(&args.train, kind)?;
    let (data, mode, pseudo_test_ids) = match (&args.test, args.pseudo_test_fraction) {
        (Some(test), None) => {
            let test = load_dataset(test, kind)?;
            (Dataset::merge_transductive(train, test)?, "transductive", Vec::new())
        }
        (None, Some(fraction)) => {
            let data = split_pseudo_test(&train, fraction, config.learn.seed)?;
            let ids = data
                .points()
                .iter()
                .filter(|p| p.is_test())
                .map(|p| p.id.clone())
                .collect();
            (data, "inductive", ids)
        }
        (None, None) => return Err(Error::Usage("fit needs --test or --pseudo-test-fraction".into())),
        (Some(_), Some(_)) => {
            return Err(Error::Usage(
                "--test and --pseudo-test-fraction are mutually exclusive".into(),
            ))
        }
    };
    log::info!(
        "{mode} fit on {} points ({} train, {} test)",
        data.len(),
        data.count(Split::Train),
        data.count(Split::Test)
    );

    let outcome = learn(&data, &config.kernel, &config.learn)?;
    let mut model = ModelFile::new(&outcome.ensemble, &config.learn);
    model.truncation_warning = outcome.report.truncation_warning.clone();
    model.pseudo_test_ids = pseudo_test_ids;
    if let Some(fc) = &config.forest {
        let (codes, labels): (Vec<Hashcode>, Vec<u8>) = data
            .points()
            .iter()
            .enumerate()
            .filter(|(_, p)| p.split == Split::Train)
            .filter_map(|(i, p)| p.label.map(|l| (outcome.matrix.row(i), l)))
            .unzip();
        model.forest = Some(train_forest(&codes, &labels, fc)?);
    }
    model.write(&args.out)?;

    let codes = codes_jsonl(data.points().iter().map(|p| p.id.as_str()), &outcome.matrix);
    let is_test = BitColumn::from_fn(data.len(), |i| data.points()[i].is_test());
    let table = if outcome.matrix.cols() >= config.learn.cluster_bits {
        Some(assign_clusters(&outcome.matrix, config.learn.cluster_bits, &is_test)?)
    } else {
        None
    };
    if let Some(path) = &args.debug_clusters {
        let table = table.as_ref().ok_or(Error::TooFewColumns {
            required: config.learn.cluster_bits,
            available: outcome.matrix.cols(),
        })?;
        let lines: String = data
            .points()
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let rec = serde_json::json!({"id": p.id, "cluster": table.pattern(table.cluster_of(i).id)});
                rec.to_string() + "\n"
            })
            .collect();
        write_file(path, lines)?;
    }
    if let Some(path) = &args.report {
        let clusters = table.as_ref().map(|t| ClusterSummary {
            count: t.clusters().len(),
            mean_x_entropy: t.mean_x_entropy(),
            clusters: t
                .clusters()
                .iter()
                .map(|c| ClusterRow {
                    pattern: t.pattern(c.id),
                    train: c.train_count,
                    test: c.test_count,
                    x_entropy: c.x_entropy,
                })
                .collect(),
        });
        let report = FitReport {
            mode,
            points: data.len(),
            train_points: data.count(Split::Train),
            test_points: data.count(Split::Test),
            functions: outcome.ensemble.len(),
            iterations: outcome.report.iterations,
            truncation_warning: &outcome.report.truncation_warning,
            steps: &outcome.report.steps,
            survived_thresholds: &outcome.report.survived_thresholds,
            clusters,
            codes_sha256: hex::encode(Sha256::digest(codes.as_bytes())),
        };
        write_report(path, &report)?;
    }
    log::info!(
        "learned {} functions in {} iterations",
        outcome.ensemble.len(),
        outcome.report.iterations
    );
    Ok(())
}

fn load_model_data(model: &ModelFile, path: &Path) -> Result<(Dataset, HashcodeMatrix)> {
    let ensemble = model.ensemble()?;
    let data = load_dataset(path, Some(model.kernel.payload_kind()))?;
    let matrix = hash_all(&ensemble, &data)?;
    Ok((data, matrix))
}

pub fn cmd_transform(args: &TransformArgs) -> Result<()> {
    let model = ModelFile::read(&args.model)?;
    let (data, matrix) = load_model_data(&model, &args.data)?;
    write_file(
        &args.out,
        codes_jsonl(data.points().iter().map(|p| p.id.as_str()), &matrix),
    )
}

pub fn cmd_classify(args: &ClassifyArgs, seed: Option<u64>) -> Result<()> {
    let model = ModelFile::read(&args.model)?;
    let (train, train_codes) = load_model_data(&model, &args.train)?;
    let held_out: HashSet<&str> = if args.include_pseudo_test {
        HashSet::new()
    } else {
        model.pseudo_test_ids.iter().map(String::as_str).collect()
    };
    let (codes, labels): (Vec<Hashcode>, Vec<u8>) = train
        .points()
        .iter()
        .enumerate()
        .filter(|(_, p)| p.split == Split::Train && !held_out.contains(p.id.as_str()))
        .filter_map(|(i, p)| p.label.map(|l| (train_codes.row(i), l)))
        .unzip();
    if codes.is_empty() {
        return Err(Error::NoLabels);
    }
    log::info!("training {:?} on {} labeled codes", args.classifier, codes.len());

    let (eval, eval_matrix) = load_model_data(&model, &args.eval)?;
    let eval_codes = eval_matrix.to_rows();
    let predicted: Vec<u8> = match args.classifier {
        ClassifierKind::Rf => {
            let mut fc = match &args.config {
                Some(p) => read_json::<FitConfig>(p)?.forest.unwrap_or_default(),
                None => ForestConfig::default(),
            };
            if let Some(s) = seed {
                fc.seed = s;
            }
            let forest = train_forest(&codes, &labels, &fc)?;
            predict_forest(&forest, &eval_codes)?
        }
        ClassifierKind::Knn => eval_codes
            .iter()
            .map(|q| knn_hamming(&codes, &labels, q, args.k))
            .collect::<Result<_>>()?,
    };
    let preds: Vec<Prediction> = eval
        .points()
        .iter()
        .zip(&predicted)
        .map(|(p, &label)| Prediction {
            id: p.id.clone(),
            label,
        })
        .collect();
    write_file(&args.out, predictions_jsonl(&preds))?;

    let (p, g): (Vec<u8>, Vec<u8>) = eval
        .points()
        .iter()
        .zip(&predicted)
        .filter_map(|(pt, &pred)| pt.label.map(|gold| (pred, gold)))
        .unzip();
    if g.is_empty() {
        log::warn!("evaluation set has no gold labels; no metrics computed");
        return Ok(());
    }
    let metrics = evaluate(&p, &g)?;
    log::info!(
        "precision {:.4} recall {:.4} f1 {:.4}",
        metrics.precision,
        metrics.recall,
        metrics.f1
    );
    if let Some(path) = &args.metrics {
        write_report(path, &metrics)?;
    }
    Ok(())
}

#[derive(Deserialize)]
struct LabelRecord {
    id: String,
    #[serde(default)]
    label: Option<u8>,
}

/// Reads `id` and optional `label` from every line, ignoring other fields.
fn read_labels(path: &Path) -> Result<Vec<(String, Option<u8>)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: LabelRecord = serde_json::from_str(line).map_err(|e| Error::MalformedRecord {
            path: path.display().to_string(),
            line: i + 1,
            message: e.to_string(),
        })?;
        if rec.label.is_some_and(|l| l > 1) {
            return Err(Error::MalformedRecord {
                path: path.display().to_string(),
                line: i + 1,
                message: "label must be 0 or 1".into(),
            });
        }
        out.push((rec.id, rec.label));
    }
    Ok(out)
}

/// Metrics over ids present in both files with a label in each.
pub fn eval_files(pred: &Path, gold: &Path) -> Result<Metrics> {
    let gold: HashMap<String, u8> = read_labels(gold)?
        .into_iter()
        .filter_map(|(id, l)| l.map(|l| (id, l)))
        .collect();
    let (p, g): (Vec<u8>, Vec<u8>) = read_labels(pred)?
        .into_iter()
        .filter_map(|(id, l)| Some((l?, *gold.get(&id)?)))
        .unzip();
    if p.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    evaluate(&p, &g)
}

pub fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let metrics = eval_files(&args.pred, &args.gold)?;
    log::info!(
        "precision {:.4} recall {:.4} f1 {:.4}",
        metrics.precision,
        metrics.recall,
        metrics.f1
    );
    match &args.out {
        Some(path) => write_report(path, &metrics),
        None => {
            println!("{}", String::from_utf8(canonical_json(&metrics)?).expect("utf-8 json"));
            Ok(())
        }
    }
}

pub fn cmd_synth(args: &SynthArgs, seed: Option<u64>) -> Result<()> {
    let mut config: SynthConfig = match &args.config {
        Some(p) => read_json(p)?,
        None => SynthConfig::default(),
    };
    if let Some(s) = seed {
        config.seed = s;
    }
    let (data, meta) = synth_generate(&config)?;
    write_synth(&data, &meta, &args.out)?;
    log::info!("wrote {} points to {}", data.len(), args.out.display());
    Ok(())
}
