//! Subcommand implementations and their CSV outputs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;

use supemb::bounds::{
    category_perturbation_bound, condition_kappa, covering_accuracy_bound, covering_number_greedy,
    cubic_coefficients, dimension_scaling_estimate, estimate_density_floor, lipschitz_linear_bound,
    lipschitz_nn_bound, optimal_kernel_scale, origin_distance_bound, rbf_linear_bound, rbf_nn_bound,
    two_class_separation_bound, BoundInputs, SeparabilityReport,
};
use supemb::dataset::write_csv;
use supemb::embedding::EmbeddingMethod;
use supemb::error::Result;
use supemb::graph::{stats, HeatScale};

use crate::config::{DatasetSpec, ExperimentConfig};
use crate::pipeline::{materialize_dataset, run_baseline, run_single, Baseline, RunRecord, RunSettings};

/// Shortest-round-trip decimal form; deterministic across runs.
fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{v}")
    }
}

fn dataset_tag(spec: &DatasetSpec) -> (String, String, String, String) {
    match spec {
        DatasetSpec::Synthetic { surface, per_class, noise } => {
            (surface.to_string(), per_class.to_string(), fmt_f64(*noise), String::new())
        }
        DatasetSpec::Csv { path, label_column } => (
            "csv".to_string(),
            String::new(),
            String::new(),
            format!("{}#{label_column}", path.display()),
        ),
    }
}

fn heat_tag(heat: HeatScale) -> String {
    match heat {
        HeatScale::Auto => "auto".to_string(),
        HeatScale::Fixed(t) => fmt_f64(t),
    }
}

fn settings_from(cfg: &ExperimentConfig, seed: u64) -> RunSettings {
    RunSettings {
        dataset: cfg.dataset.clone(),
        train_fraction: cfg.train_fraction,
        seed,
        k_within: cfg.k_within,
        k_between: cfg.k_between,
        heat: cfg.heat,
        method: cfg.method,
        dim: cfg.dim,
        mu: cfg.mu,
        sigma: cfg.sigma,
        ridge: cfg.ridge,
        rule: cfg.rule,
    }
}

fn ensure_outdir(cfg: &ExperimentConfig) -> Result<()> {
    std::fs::create_dir_all(&cfg.outdir)?;
    Ok(())
}

/// `synth`: materialize the configured dataset and write it as CSV.
pub fn cmd_synth(cfg: &ExperimentConfig) -> Result<PathBuf> {
    ensure_outdir(cfg)?;
    let ds = materialize_dataset(&cfg.dataset, cfg.seeds[0])?;
    let path = cfg.outdir.join("dataset.csv");
    write_csv(&ds, &path, "label")?;
    Ok(path)
}

const RUN_HEADER: &str = "dataset,per_class,noise,csv,train_fraction,seed,k_within,k_between,heat_t,method,dim,mu,sigma,ridge,rule,gamma,kappa,kappa_finite,coeff_bound,kernel_lipschitz,test_error,train_error,unclassifiable,wall_ms";

fn run_row(rec: &RunRecord) -> String {
    let (kind, per_class, noise, csv) = dataset_tag(&rec.settings.dataset);
    let cells = [
        kind,
        per_class,
        noise,
        csv,
        fmt_f64(rec.settings.train_fraction),
        rec.settings.seed.to_string(),
        rec.settings.k_within.to_string(),
        rec.settings.k_between.to_string(),
        heat_tag(rec.settings.heat),
        rec.settings.method.to_string(),
        rec.dim_used.to_string(),
        fmt_f64(rec.settings.mu),
        fmt_f64(rec.settings.sigma),
        fmt_f64(rec.settings.ridge),
        rec.settings.rule.to_string(),
        fmt_f64(rec.gamma),
        fmt_f64(rec.kappa),
        rec.kappa_finite.to_string(),
        fmt_f64(rec.coeff_bound),
        fmt_f64(rec.kernel_lipschitz),
        fmt_f64(rec.test_error),
        fmt_f64(rec.train_error),
        fmt_f64(rec.unclassifiable),
        rec.wall_ms.to_string(),
    ];
    cells.join(",")
}

/// `run`: one pipeline cell on the first seed; writes `runs.csv` plus a
/// per-test-point prediction report.
pub fn cmd_run(cfg: &ExperimentConfig) -> Result<PathBuf> {
    ensure_outdir(cfg)?;
    let art = run_single(&settings_from(cfg, cfg.seeds[0]))?;
    let mut rows = Vec::with_capacity(art.test_indices.len());
    for &i in &art.test_indices {
        let y = art.interpolator.eval(art.dataset.points().row(i))?;
        let (lin, outright) = art.model.predict_linear(&y);
        let predicted = match cfg.rule {
            crate::config::ClassifierRule::Linear => lin,
            crate::config::ClassifierRule::Nn => art.model.predict_nn(&y),
        };
        rows.push(supemb::classify::PredictionRow {
            index: i,
            true_label: art.dataset.labels()[i],
            predicted,
            won_outright: outright,
        });
    }
    supemb::classify::write_prediction_report(&rows, cfg.outdir.join("predictions.csv"))?;
    if let Some(g) = &art.graph {
        supemb::graph::write_edge_list(g, cfg.outdir.join("graph_edges.txt"))?;
    }
    let path = cfg.outdir.join("runs.csv");
    std::fs::write(&path, format!("{RUN_HEADER}\n{}\n", run_row(&art.record)))?;
    Ok(path)
}

const SWEEP_HEADER: &str = "dataset,noise,csv,train_fraction,k_within,k_between,heat_t,method,rule,ridge,per_class,dim,mu,sigma,seed,status,gamma,kappa,coeff_bound,kernel_lipschitz,test_error,train_error,unclassifiable";

struct SweepCell {
    per_class: usize,
    dim: usize,
    mu: f64,
    sigma: f64,
    seed: u64,
}

fn sweep_settings(cfg: &ExperimentConfig, cell: &SweepCell) -> RunSettings {
    let mut settings = settings_from(cfg, cell.seed);
    if let DatasetSpec::Synthetic { surface, noise, .. } = &cfg.dataset {
        settings.dataset = DatasetSpec::Synthetic { surface: *surface, per_class: cell.per_class, noise: *noise };
    }
    settings.dim = cell.dim;
    settings.mu = cell.mu;
    settings.sigma = cell.sigma;
    settings
}

/// `sweep`: the cross product of the four axes times the seed list, one row
/// per cell plus mean/std aggregate rows per axis tuple. Cells run in
/// parallel; rows are emitted in deterministic cell order. Failures are
/// recorded per cell, never aborting the table.
pub fn cmd_sweep(cfg: &ExperimentConfig) -> Result<PathBuf> {
    ensure_outdir(cfg)?;
    let mut cells = Vec::new();
    for &per_class in &cfg.per_class_axis {
        for &dim in &cfg.dim_axis {
            for &mu in &cfg.mu_axis {
                for &sigma in &cfg.sigma_axis {
                    for &seed in &cfg.seeds {
                        cells.push(SweepCell { per_class, dim, mu, sigma, seed });
                    }
                }
            }
        }
    }
    let outcomes: Vec<std::result::Result<RunRecord, String>> = cells
        .par_iter()
        .map(|cell| run_single(&sweep_settings(cfg, cell)).map(|art| art.record).map_err(|e| e.to_string()))
        .collect();

    let (kind, _, noise, csv) = dataset_tag(&cfg.dataset);
    let prefix = |cell: &SweepCell| -> String {
        format!(
            "{kind},{noise},{csv},{},{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(cfg.train_fraction),
            cfg.k_within,
            cfg.k_between,
            heat_tag(cfg.heat),
            cfg.method,
            cfg.rule,
            fmt_f64(cfg.ridge),
            cell.per_class,
            cell.dim,
            fmt_f64(cell.mu),
            fmt_f64(cell.sigma),
        )
    };

    let mut out = String::new();
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    let per_cell = cfg.seeds.len();
    for (tuple_idx, chunk) in outcomes.chunks(per_cell).enumerate() {
        let tuple_cells = &cells[tuple_idx * per_cell..(tuple_idx + 1) * per_cell];
        let mut ok_rows: Vec<&RunRecord> = Vec::new();
        for (cell, outcome) in tuple_cells.iter().zip(chunk) {
            match outcome {
                Ok(rec) => {
                    ok_rows.push(rec);
                    writeln!(
                        out,
                        "{},{},ok,{},{},{},{},{},{},{}",
                        prefix(cell),
                        cell.seed,
                        fmt_f64(rec.gamma),
                        fmt_f64(rec.kappa),
                        fmt_f64(rec.coeff_bound),
                        fmt_f64(rec.kernel_lipschitz),
                        fmt_f64(rec.test_error),
                        fmt_f64(rec.train_error),
                        fmt_f64(rec.unclassifiable),
                    )
                    .expect("string write");
                }
                Err(msg) => {
                    writeln!(out, "{},{},error:{},,,,,,,", prefix(cell), cell.seed, msg.replace(',', ";"))
                        .expect("string write");
                }
            }
        }
        for (tag, reduce) in [("mean", false), ("std", true)] {
            let stat = |get: &dyn Fn(&RunRecord) -> f64| -> String {
                if ok_rows.is_empty() {
                    return String::new();
                }
                let xs: Vec<f64> = ok_rows.iter().map(|r| get(r)).collect();
                let mean = xs.iter().sum::<f64>() / xs.len() as f64;
                if !reduce {
                    return fmt_f64(mean);
                }
                if xs.len() < 2 {
                    return fmt_f64(0.0);
                }
                let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (xs.len() - 1) as f64;
                fmt_f64(var.sqrt())
            };
            writeln!(
                out,
                "{},{tag},aggregate,{},{},{},{},{},{},{}",
                prefix(&tuple_cells[0]),
                stat(&|r| r.gamma),
                stat(&|r| r.kappa),
                stat(&|r| r.coeff_bound),
                stat(&|r| r.kernel_lipschitz),
                stat(&|r| r.test_error),
                stat(&|r| r.train_error),
                stat(&|r| r.unclassifiable),
            )
            .expect("string write");
        }
    }
    let path = cfg.outdir.join("sweep.csv");
    std::fs::write(&path, out)?;
    Ok(path)
}

const BOUNDS_HEADER: &str = "quantity,class,params,value,applicable";

fn push_bound_row(out: &mut String, quantity: &str, class: &str, params: &str, value: f64, applicable: bool) {
    writeln!(out, "{quantity},{class},{params},{},{applicable}", fmt_f64(value)).expect("string write");
}

/// `bounds`: realize one run on the first seed and evaluate every bound on
/// it; writes `bounds.csv` with one row per (quantity, parameter tuple).
pub fn cmd_bounds(cfg: &ExperimentConfig) -> Result<PathBuf> {
    ensure_outdir(cfg)?;
    let art = run_single(&settings_from(cfg, cfg.seeds[0]))?;
    let rec = &art.record;
    let report = separability_report(cfg, &art)?;

    let mut out = String::new();
    out.push_str(BOUNDS_HEADER);
    out.push('\n');
    let base_params = format!(
        "method={};dim={};mu={};sigma={};seed={}",
        cfg.method,
        rec.dim_used,
        fmt_f64(cfg.mu),
        fmt_f64(cfg.sigma),
        cfg.seeds[0]
    );
    push_bound_row(&mut out, "empirical_margin", "", &base_params, report.empirical_margin, true);
    if let Some(z_sep) = report.z_separation {
        push_bound_row(&mut out, "z_separation", "", &base_params, z_sep, true);
    }
    if let Some(tc) = report.two_class {
        push_bound_row(&mut out, "two_class_z_bound", "", &base_params, tc.z_bound, tc.applicable);
        push_bound_row(&mut out, "two_class_y_bound", "", &base_params, tc.y_bound, tc.applicable);
        push_bound_row(&mut out, "mu_max", "", &base_params, tc.mu_max, true);
    }
    if let Some(ob) = report.origin_bound {
        push_bound_row(&mut out, "origin_bound", "", &base_params, ob, true);
    }
    if let Some(cat) = report.category {
        let params = format!("{base_params};categories={}", cfg.categories.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("|"));
        push_bound_row(&mut out, "category_offdiag_norm", "", &params, cat.offdiag_norm, true);
        push_bound_row(&mut out, "category_eigen_gap", "", &params, cat.eigen_gap, true);
        push_bound_row(&mut out, "category_xi", "", &params, cat.xi, cat.applicable);
        push_bound_row(&mut out, "category_zeta", "", &params, cat.zeta, cat.applicable);
        push_bound_row(&mut out, "category_margin", "", &params, cat.category_margin, true);
        push_bound_row(&mut out, "category_predicted_margin", "", &params, cat.predicted_margin, cat.applicable);
    }
    push_bound_row(&mut out, "kappa", "", &base_params, report.kappa, report.kappa_finite);

    // per-class empirical quantities and probability bounds
    let delta = cfg.delta.unwrap_or_else(|| art.graph.as_ref().map_or(1.0, |g| g.heat_scale()));
    let epsilon = cfg.epsilon.unwrap_or(delta / 2.0);
    let reg = art.interpolator.regularity(art.train.points(), art.train.labels(), art.embedding.coords(), 2.0 * delta)?;
    let gamma = rec.gamma;
    // Lipschitz bound for the fitted map on any support: per dimension the
    // kernel sum is C-bounded with slope L_phi, stacked over sqrt(d) axes.
    let lipschitz = (rec.dim_used as f64).sqrt() * reg.coeff_bound * reg.kernel_lipschitz;

    for class in 1..=art.train.class_count() {
        let members = art.train.class_indices(class);
        let n_class = members.len();
        let rows: Vec<Vec<f64>> = members.iter().map(|&i| art.train.points().row(i).to_vec()).collect();
        let class_points = supemb::DenseMatrix::from_rows(&rows)?;
        let cover = covering_number_greedy(&class_points, epsilon / 2.0)?;
        let (cov_value, cov_ok) = covering_accuracy_bound(n_class, cover);
        let class_tag = class.to_string();
        push_bound_row(
            &mut out,
            "covering_number_greedy",
            &class_tag,
            &format!("eps={}", fmt_f64(epsilon / 2.0)),
            cover as f64,
            true,
        );
        push_bound_row(
            &mut out,
            "covering_accuracy_bound",
            &class_tag,
            &format!("eps={};estimate=empirical", fmt_f64(epsilon / 2.0)),
            cov_value,
            cov_ok,
        );
        let eta = estimate_density_floor(&art.train, class, delta)?;
        push_bound_row(
            &mut out,
            "density_floor",
            &class_tag,
            &format!("delta={};estimate=empirical", fmt_f64(delta)),
            eta,
            true,
        );
        let (q, q_tag) = match cfg.q {
            Some(q) => (q, q.to_string()),
            None => (((n_class as f64) * eta / 2.0).floor() as usize, "auto".to_string()),
        };
        let inputs = BoundInputs {
            n_total: art.train.len(),
            n_class,
            q,
            delta,
            epsilon,
            dim: rec.dim_used,
            lipschitz,
            kernel_lipschitz: reg.kernel_lipschitz,
            coeff_bound: reg.coeff_bound,
            gamma,
            gamma_q: gamma,
            density_floor: eta,
            codiameter_2delta: reg.codiameter,
        };
        let params = format!(
            "delta={};epsilon={};q={q_tag};L={};gamma_q=gamma",
            fmt_f64(delta),
            fmt_f64(epsilon),
            fmt_f64(lipschitz)
        );
        for (name, bound) in [
            ("lipschitz_linear_bound", lipschitz_linear_bound(&inputs)?),
            ("lipschitz_nn_bound", lipschitz_nn_bound(&inputs)?),
            ("rbf_linear_bound", rbf_linear_bound(&inputs)?),
            ("rbf_nn_bound", rbf_nn_bound(&inputs)?),
        ] {
            push_bound_row(
                &mut out,
                name,
                &class_tag,
                &format!("{params};condition_ok={}", bound.condition_ok),
                bound.value,
                bound.applicable,
            );
        }
    }

    // kernel-scale optimum from the user-supplied constants
    let (a1, a2) = cubic_coefficients(cfg.beta, art.train.len(), rec.dim_used, delta, epsilon)?;
    let sigma_opt = optimal_kernel_scale(cfg.alpha, a1, a2, art.train.ambient_dim())?;
    let cubic_params = format!("alpha={};beta={};a1={};a2={}", fmt_f64(cfg.alpha), fmt_f64(cfg.beta), fmt_f64(a1), fmt_f64(a2));
    push_bound_row(&mut out, "optimal_sigma", "", &cubic_params, sigma_opt, true);

    // intrinsic-dimension scaling table (order-of-magnitude estimate)
    let theta = cfg.theta.unwrap_or_else(|| data_diameter(&art.train));
    let n_class_min = (1..=art.train.class_count())
        .map(|c| art.train.class_indices(c).len())
        .min()
        .unwrap_or(1);
    for d_intrinsic in 2..=6u32 {
        let value = dimension_scaling_estimate(
            d_intrinsic,
            delta,
            theta,
            n_class_min,
            art.train.len(),
            epsilon,
            reg.kernel_lipschitz,
        )?;
        push_bound_row(
            &mut out,
            "dimension_scaling_estimate",
            "",
            &format!("D={d_intrinsic};theta={};order_of_magnitude=true", fmt_f64(theta)),
            value,
            true,
        );
    }

    let path = cfg.outdir.join("bounds.csv");
    std::fs::write(&path, out)?;
    Ok(path)
}

fn data_diameter(ds: &supemb::dataset::Dataset) -> f64 {
    let mut best = 0.0_f64;
    for i in 0..ds.len() {
        for j in (i + 1)..ds.len() {
            let d: f64 = ds
                .points()
                .row(i)
                .iter()
                .zip(ds.points().row(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            best = best.max(d);
        }
    }
    best.max(f64::MIN_POSITIVE)
}

/// Assembles the separability diagnostics of a realized run.
pub fn separability_report(cfg: &ExperimentConfig, art: &crate::pipeline::RunArtifacts) -> Result<SeparabilityReport> {
    let rec = &art.record;
    let mut z_separation = None;
    let mut two_class = None;
    let mut origin_bound = None;
    if let Some(g) = &art.graph {
        if art.train.class_count() == 2 {
            let st = stats(g)?;
            two_class = Some(two_class_separation_bound(&st, cfg.mu)?);
            if let Some(z) = art.embedding.normalized_view() {
                let col: Vec<f64> = z.col(0);
                let labels = art.train.labels();
                let sep = two_class_z_separation(&col, labels);
                z_separation = Some(sep);
                origin_bound = Some(origin_distance_bound(&st, sep)?);
            }
        }
    }
    let category = if cfg.categories.is_empty() {
        None
    } else {
        let g = art
            .graph
            .as_ref()
            .ok_or_else(|| supemb::Error::BadParam("category bound needs a graph-based embedding".into()))?;
        let mut cat_of: BTreeMap<usize, usize> = BTreeMap::new();
        for (m, &q) in cfg.categories.iter().enumerate() {
            cat_of.insert(m + 1, q);
        }
        let mut dims: BTreeMap<usize, usize> = BTreeMap::new();
        let mut cats: Vec<usize> = cfg.categories.clone();
        cats.sort_unstable();
        cats.dedup();
        if cfg.category_dims.len() != cats.len() {
            return Err(supemb::Error::BadParam(format!(
                "category_dims has {} entries for {} categories",
                cfg.category_dims.len(),
                cats.len()
            )));
        }
        for (q, d) in cats.iter().zip(&cfg.category_dims) {
            dims.insert(*q, *d);
        }
        Some(category_perturbation_bound(g, cfg.mu, &cat_of, &dims)?)
    };
    Ok(SeparabilityReport {
        empirical_margin: rec.gamma,
        z_separation,
        two_class,
        origin_bound,
        category,
        kappa: rec.kappa,
        kappa_finite: rec.kappa_finite,
    })
}

/// Signed separation of the leading normalized coordinate between the two
/// classes, oriented so the class means straddle the origin consistently.
fn two_class_z_separation(col: &[f64], labels: &[usize]) -> f64 {
    let mean = |class: usize| -> f64 {
        let vals: Vec<f64> = labels.iter().zip(col).filter(|(l, _)| **l == class).map(|(_, v)| *v).collect();
        vals.iter().sum::<f64>() / vals.len() as f64
    };
    let sign = if mean(2) >= mean(1) { 1.0 } else { -1.0 };
    let max1 = labels
        .iter()
        .zip(col)
        .filter(|(l, _)| **l == 1)
        .map(|(_, v)| sign * v)
        .fold(f64::NEG_INFINITY, f64::max);
    let min2 = labels
        .iter()
        .zip(col)
        .filter(|(l, _)| **l == 2)
        .map(|(_, v)| sign * v)
        .fold(f64::INFINITY, f64::min);
    min2 - max1
}

const COMPARE_HEADER: &str = "per_class,method,dim,sigma,ridge,classifier,status,seeds_ok,gamma,coeff_bound,kappa,kappa_finite,test_error_mean,test_error_std,train_error_mean,unclassifiable_mean";

/// `compare`: every embedding variant plus the ambient baselines at each
/// training size, with the per-method condition parameter computed from the
/// aggregated margin and coefficient bound.
pub fn cmd_compare(cfg: &ExperimentConfig) -> Result<PathBuf> {
    ensure_outdir(cfg)?;
    let mut out = String::new();
    out.push_str(COMPARE_HEADER);
    out.push('\n');

    for &per_class in &cfg.per_class_axis {
        let spec = match &cfg.dataset {
            DatasetSpec::Synthetic { surface, noise, .. } => {
                DatasetSpec::Synthetic { surface: *surface, per_class, noise: *noise }
            }
            other => other.clone(),
        };
        // embedding methods: (tag, method, sigma, ridge)
        let variants: Vec<(&str, EmbeddingMethod, f64, f64)> = vec![
            ("sup_laplacian", EmbeddingMethod::SupLaplacian, cfg.sigma, 0.0),
            ("sup_laplacian_reg", EmbeddingMethod::SupLaplacian, cfg.sigma, supemb::interpolate::default_ridge()),
            ("fisher", EmbeddingMethod::Fisher, cfg.sigma, 0.0),
            ("label_encoding", EmbeddingMethod::LabelEncoding, cfg.sigma, 0.0),
            ("sup_laplacian_sigma4", EmbeddingMethod::SupLaplacian, 4.0 * cfg.sigma, 0.0),
            ("label_encoding_sigma4", EmbeddingMethod::LabelEncoding, 4.0 * cfg.sigma, 0.0),
        ];
        for (tag, method, sigma, ridge) in variants {
            let mut records = Vec::new();
            let mut first_error: Option<String> = None;
            for &seed in &cfg.seeds {
                let mut settings = settings_from(cfg, seed);
                settings.dataset = spec.clone();
                settings.method = method;
                settings.sigma = sigma;
                settings.ridge = ridge;
                match run_single(&settings) {
                    Ok(art) => records.push(art.record),
                    Err(e) => {
                        if first_error.is_none() {
                            first_error = Some(e.to_string());
                        }
                    }
                }
            }
            if records.is_empty() {
                let msg = first_error.unwrap_or_else(|| "no seeds succeeded".into());
                writeln!(
                    out,
                    "{per_class},{tag},,{},{},{},error:{},0,,,,,,,,",
                    fmt_f64(sigma),
                    fmt_f64(ridge),
                    cfg.rule,
                    msg.replace(',', ";")
                )
                .expect("string write");
                continue;
            }
            let n = records.len() as f64;
            let mean = |get: &dyn Fn(&RunRecord) -> f64| records.iter().map(get).sum::<f64>() / n;
            let gamma = mean(&|r| r.gamma);
            let coeff_bound = mean(&|r| r.coeff_bound);
            let dim_used = records[0].dim_used;
            let (kappa, kappa_finite) = condition_kappa(dim_used, coeff_bound, sigma, gamma)?;
            let test_mean = mean(&|r| r.test_error);
            let test_std = if records.len() < 2 {
                0.0
            } else {
                (records.iter().map(|r| (r.test_error - test_mean) * (r.test_error - test_mean)).sum::<f64>()
                    / (n - 1.0))
                    .sqrt()
            };
            writeln!(
                out,
                "{per_class},{tag},{dim_used},{},{},{},ok,{},{},{},{},{},{},{},{},{}",
                fmt_f64(sigma),
                fmt_f64(ridge),
                cfg.rule,
                records.len(),
                fmt_f64(gamma),
                fmt_f64(coeff_bound),
                fmt_f64(kappa),
                kappa_finite,
                fmt_f64(test_mean),
                fmt_f64(test_std),
                fmt_f64(mean(&|r| r.train_error)),
                fmt_f64(mean(&|r| r.unclassifiable)),
            )
            .expect("string write");
        }

        // ambient baselines; the kernel-regression scale is picked from a
        // small grid by mean test error (best-effort stand-in for tuned
        // baselines)
        let knn_outcomes: Vec<_> = cfg
            .seeds
            .iter()
            .filter_map(|&seed| run_baseline(&spec, cfg.train_fraction, seed, Baseline::Knn { k: 1 }, cfg.sigma).ok())
            .collect();
        write_baseline_row(&mut out, per_class, "knn_k1", &knn_outcomes, None);

        let grid = [0.25, 0.5, 1.0, 2.0, 4.0].map(|m| m * cfg.sigma);
        let mut best: Option<(f64, Vec<crate::pipeline::BaselineOutcome>)> = None;
        for sigma in grid {
            let outcomes: Vec<_> = cfg
                .seeds
                .iter()
                .filter_map(|&seed| {
                    run_baseline(&spec, cfg.train_fraction, seed, Baseline::KernelRegression, sigma).ok()
                })
                .collect();
            if outcomes.is_empty() {
                continue;
            }
            let mean_err = outcomes.iter().map(|o| o.test_error).sum::<f64>() / outcomes.len() as f64;
            if best.as_ref().is_none_or(|(e, _)| mean_err < *e) {
                best = Some((mean_err, outcomes));
            }
        }
        if let Some((_, outcomes)) = best {
            let sigma_used = outcomes[0].sigma_used;
            write_baseline_row(&mut out, per_class, "kernel_regression", &outcomes, sigma_used);
        } else {
            write_baseline_row(&mut out, per_class, "kernel_regression", &[], None);
        }
    }

    let path = cfg.outdir.join("compare.csv");
    std::fs::write(&path, out)?;
    Ok(path)
}

fn write_baseline_row(
    out: &mut String,
    per_class: usize,
    tag: &str,
    outcomes: &[crate::pipeline::BaselineOutcome],
    sigma_used: Option<f64>,
) {
    if outcomes.is_empty() {
        writeln!(out, "{per_class},{tag},,,,ambient,error:no seeds succeeded,0,,,,,,,,").expect("string write");
        return;
    }
    let n = outcomes.len() as f64;
    let test_mean = outcomes.iter().map(|o| o.test_error).sum::<f64>() / n;
    let test_std = if outcomes.len() < 2 {
        0.0
    } else {
        (outcomes.iter().map(|o| (o.test_error - test_mean) * (o.test_error - test_mean)).sum::<f64>() / (n - 1.0))
            .sqrt()
    };
    let train_mean = outcomes.iter().map(|o| o.train_error).sum::<f64>() / n;
    writeln!(
        out,
        "{per_class},{tag},,{},,ambient,ok,{},,,,,{},{},{},",
        sigma_used.map(fmt_f64).unwrap_or_default(),
        outcomes.len(),
        fmt_f64(test_mean),
        fmt_f64(test_std),
        fmt_f64(train_mean),
    )
    .expect("string write");
}
