//! One experiment cell: dataset, split, graph, embedding, interpolator,
//! classifier, diagnostics.

use std::time::Instant;

use supemb::bounds::condition_kappa;
use supemb::classify::{baseline_kernel_regression, baseline_knn, fit_linear, ClassifierModel};
use supemb::dataset::{gen_two_class, load_csv, Dataset};
use supemb::embedding::{fisher_trace_ratio, label_encoding, sup_laplacian, Embedding, EmbeddingMethod};
use supemb::error::Result;
use supemb::graph::{build, HeatScale};
use supemb::interpolate::{fit, gaussian_lipschitz};

use crate::config::{ClassifierRule, DatasetSpec};

/// Scalar settings of a single run cell.
#[derive(Debug, Clone)]
pub struct RunSettings {
    pub dataset: DatasetSpec,
    pub train_fraction: f64,
    pub seed: u64,
    pub k_within: usize,
    pub k_between: usize,
    pub heat: HeatScale,
    pub method: EmbeddingMethod,
    pub dim: usize,
    pub mu: f64,
    pub sigma: f64,
    pub ridge: f64,
    pub rule: ClassifierRule,
}

/// Flattened result of one run cell.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub settings: RunSettings,
    /// Embedding dimension actually used (label encoding forces the class count).
    pub dim_used: usize,
    pub gamma: f64,
    pub kappa: f64,
    pub kappa_finite: bool,
    pub coeff_bound: f64,
    pub kernel_lipschitz: f64,
    pub test_error: f64,
    pub train_error: f64,
    pub unclassifiable: f64,
    pub wall_ms: u128,
}

/// Everything the bounds command needs from a realized run.
pub struct RunArtifacts {
    pub dataset: Dataset,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    pub train: Dataset,
    /// Absent for label encoding, which needs no neighborhood structure.
    pub graph: Option<supemb::graph::SupervisedGraph>,
    pub embedding: Embedding,
    pub interpolator: supemb::interpolate::RbfInterpolator,
    pub model: ClassifierModel,
    pub record: RunRecord,
}

pub fn materialize_dataset(spec: &DatasetSpec, seed: u64) -> Result<Dataset> {
    match spec {
        DatasetSpec::Synthetic { surface, per_class, noise } => gen_two_class(*surface, *per_class, *noise, seed),
        DatasetSpec::Csv { path, label_column } => load_csv(path, label_column),
    }
}

fn classify_row(model: &ClassifierModel, rule: ClassifierRule, y: &[f64]) -> usize {
    match rule {
        ClassifierRule::Linear => model.predict_linear(y).0,
        ClassifierRule::Nn => model.predict_nn(y),
    }
}

/// Runs the full pipeline for one cell: materialize, split, embed the
/// training half, fit the interpolator, classify the mapped test half.
pub fn run_single(settings: &RunSettings) -> Result<RunArtifacts> {
    let started = Instant::now();
    let ds = materialize_dataset(&settings.dataset, settings.seed)?;
    let split = supemb::dataset::split(&ds, settings.train_fraction, settings.seed)?;
    let train = ds.subset(&split.train, format!("{}-train", ds.name()))?;

    let (graph, embedding) = match settings.method {
        EmbeddingMethod::SupLaplacian => {
            let g = build(&train, settings.k_within, settings.k_between, settings.heat)?;
            let emb = sup_laplacian(&g, settings.dim, settings.mu)?;
            (Some(g), emb)
        }
        EmbeddingMethod::Fisher => {
            let g = build(&train, settings.k_within, settings.k_between, settings.heat)?;
            let emb = fisher_trace_ratio(&g, settings.dim, 100, 1e-10)?.embedding;
            (Some(g), emb)
        }
        EmbeddingMethod::LabelEncoding => (None, label_encoding(&train)),
    };
    let dim_used = embedding.dim();

    let interpolator = fit(train.points(), embedding.coords(), settings.sigma, settings.ridge)?;
    let model = fit_linear(&embedding, train.labels())?;

    let gamma = model.margin();
    let coeff_bound = interpolator.coeff_bound();
    let kernel_lipschitz = gaussian_lipschitz(settings.sigma)?;
    let (kappa, kappa_finite) = condition_kappa(dim_used, coeff_bound, settings.sigma, gamma)?;

    // train error over the training embedding itself
    let mut train_wrong = 0usize;
    for i in 0..train.len() {
        if classify_row(&model, settings.rule, embedding.coords().row(i)) != train.labels()[i] {
            train_wrong += 1;
        }
    }
    let train_error = train_wrong as f64 / train.len() as f64;

    // test error over interpolated embeddings; the all-pairs fallback rate
    // is tracked with the linear rule regardless of the chosen classifier
    let mut test_wrong = 0usize;
    let mut fallbacks = 0usize;
    for &i in &split.test {
        let y = interpolator.eval(ds.points().row(i))?;
        if classify_row(&model, settings.rule, &y) != ds.labels()[i] {
            test_wrong += 1;
        }
        if !model.predict_linear(&y).1 {
            fallbacks += 1;
        }
    }
    let n_test = split.test.len();
    let test_error = if n_test == 0 { 0.0 } else { test_wrong as f64 / n_test as f64 };
    let unclassifiable = if n_test == 0 { 0.0 } else { fallbacks as f64 / n_test as f64 };

    let record = RunRecord {
        settings: settings.clone(),
        dim_used,
        gamma,
        kappa,
        kappa_finite,
        coeff_bound,
        kernel_lipschitz,
        test_error,
        train_error,
        unclassifiable,
        wall_ms: started.elapsed().as_millis(),
    };
    Ok(RunArtifacts {
        dataset: ds,
        train_indices: split.train,
        test_indices: split.test,
        train,
        graph,
        embedding,
        interpolator,
        model,
        record,
    })
}

/// Ambient-space baseline error over the test split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Baseline {
    Knn { k: usize },
    KernelRegression,
}

pub struct BaselineOutcome {
    pub test_error: f64,
    pub train_error: f64,
    /// Sigma actually used (kernel regression only).
    pub sigma_used: Option<f64>,
}

pub fn run_baseline(
    spec: &DatasetSpec,
    train_fraction: f64,
    seed: u64,
    baseline: Baseline,
    sigma: f64,
) -> Result<BaselineOutcome> {
    let ds = materialize_dataset(spec, seed)?;
    let split = supemb::dataset::split(&ds, train_fraction, seed)?;
    let train = ds.subset(&split.train, format!("{}-train", ds.name()))?;
    let classify = |x: &[f64]| -> Result<usize> {
        match baseline {
            Baseline::Knn { k } => baseline_knn(&train, k, x),
            Baseline::KernelRegression => Ok(baseline_kernel_regression(&train, sigma, x)?.0),
        }
    };
    let mut train_wrong = 0usize;
    for i in 0..train.len() {
        if classify(train.points().row(i))? != train.labels()[i] {
            train_wrong += 1;
        }
    }
    let mut test_wrong = 0usize;
    for &i in &split.test {
        if classify(ds.points().row(i))? != ds.labels()[i] {
            test_wrong += 1;
        }
    }
    let n_test = split.test.len();
    Ok(BaselineOutcome {
        test_error: if n_test == 0 { 0.0 } else { test_wrong as f64 / n_test as f64 },
        train_error: train_wrong as f64 / train.len() as f64,
        sigma_used: match baseline {
            Baseline::KernelRegression => Some(sigma),
            _ => None,
        },
    })
}

