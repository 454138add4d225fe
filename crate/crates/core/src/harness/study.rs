use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, StudyKind, Truth};
use crate::engine::{apply_threshold, run_abc_batch, AbcMethod, AbcRun, EngineOptions, ModelPrior, RunResolution, ThresholdPolicy};
use crate::error::{AbcError, Result};
use crate::models::toad::{load_toad_csv, MissingnessReport};
use crate::models::{DataShape, Dataset, ModelSpec};
use crate::oracle::{exact_posterior_expo, exact_posterior_normal_known, score_method};
use crate::seed::SeedSpec;

/// Stream of the observed-data generators; truth `t` uses stream `DATA_STREAM + t`.
const DATA_STREAM: u64 = 1 << 40;
/// Stream whose derived seed drives every ABC run of a study.
const RUN_STREAM: u64 = 1 << 41;

/// One observed dataset and what is known about where it came from.
#[derive(Debug, Clone)]
pub struct ObservedSet {
    pub truth: Option<usize>,
    /// 0-based model index of the generator.
    pub true_model: Option<usize>,
    pub index: usize,
    pub data: Dataset,
    /// Exact posterior model probabilities when available.
    pub exact: Option<Vec<f64>>,
}

/// Seed of observed dataset `index` under truth `truth`.
pub fn data_seed(master_seed: u64, truth: usize, index: usize) -> SeedSpec {
    SeedSpec::new(master_seed, DATA_STREAM + truth as u64).derive(index as u64)
}

/// Seed of the shared simulations (or of dataset `j`'s own, when unshared).
pub fn run_seed(master_seed: u64, dataset: Option<usize>) -> SeedSpec {
    let base = SeedSpec::new(master_seed, RUN_STREAM).derive(0);
    match dataset {
        None => base,
        Some(j) => base.derive(j as u64 + 1),
    }
}

pub fn observed_shape(config: &ExperimentConfig) -> DataShape {
    if config.study.is_toad() {
        let (n_days, n_toads) = config.toad_dims();
        DataShape::Matrix { n_days, n_toads, mask: None }
    } else {
        DataShape::Sample { n: config.sample_size() }
    }
}

/// Generates (or loads) every observed dataset of the study, in truth-major order.
pub fn generate_observed(config: &ExperimentConfig, models: &[ModelSpec]) -> Result<(Vec<ObservedSet>, Option<MissingnessReport>)> {
    if config.study == StudyKind::ToadReal {
        let path = config.toad_data.as_ref().ok_or_else(|| AbcError::Config("toad_data missing".into()))?;
        let data = load_toad_csv(path)?;
        let set = ObservedSet {
            truth: None,
            true_model: None,
            index: 0,
            data: Dataset::Locations(data.locations),
            exact: None,
        };
        return Ok((vec![set], Some(data.missingness)));
    }
    let shape = observed_shape(config);
    let mut out = Vec::new();
    for (t, Truth { model, params }) in config.truths().into_iter().enumerate() {
        let k = model - 1;
        for d in 0..config.n_datasets() {
            let mut rng = data_seed(config.master_seed, t, d).rng();
            let data = models[k]
                .model
                .simulate(&params, &shape, &mut rng)
                .map_err(|e| e.context(format!("generating dataset {d} of truth {}", t + 1)))?;
            let exact = exact_probs(config, &data)?;
            out.push(ObservedSet {
                truth: Some(t),
                true_model: Some(k),
                index: d,
                data,
                exact,
            });
        }
    }
    Ok((out, None))
}

fn exact_probs(config: &ExperimentConfig, data: &Dataset) -> Result<Option<Vec<f64>>> {
    Ok(match config.study {
        StudyKind::NormalKnown => Some(
            exact_posterior_normal_known(data.as_sample()?, config.mu_tilde(), config.sigma(), config.c(), config.bayes_factor_form())?
                .model_probs,
        ),
        StudyKind::ExpoFamily => Some(exact_posterior_expo(data.as_sample()?)?.model_probs),
        _ => None,
    })
}

/// Estimated posterior for one (method, quantile, dataset).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetEstimate {
    pub method: String,
    pub quantile: f64,
    pub truth: Option<usize>,
    pub true_model: Option<usize>,
    pub dataset: usize,
    pub epsilon: f64,
    pub probs: Vec<f64>,
    /// Exact or benchmark probabilities used for MAE/MSE.
    pub reference: Option<Vec<f64>>,
}

/// One (method, quantile, truth) cell of a results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub study: String,
    pub method: String,
    pub quantile: f64,
    pub size: String,
    pub true_model: Option<String>,
    pub truth_params: String,
    pub mae: Option<f64>,
    pub mse: Option<f64>,
    pub per: Option<f64>,
    pub n_datasets: usize,
    pub benchmark: String,
}

/// Per-method bookkeeping kept out of the result CSVs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MethodRecord {
    pub label: String,
    pub method: AbcMethod,
    pub resolutions: Vec<RunResolution>,
    pub config_digests: Vec<String>,
    pub retries: usize,
    pub runtime_ms: u128,
    pub n_draws_per_run: usize,
    pub n_runs: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultTable {
    pub study: StudyKind,
    pub model_labels: Vec<String>,
    pub rows: Vec<ResultRow>,
    pub estimates: Vec<DatasetEstimate>,
}

impl ResultTable {
    pub fn empty(study: StudyKind, model_labels: Vec<String>) -> Self {
        Self {
            study,
            model_labels,
            rows: Vec::new(),
            estimates: Vec::new(),
        }
    }

    pub fn row(&self, method: &str, quantile: f64, true_model: Option<&str>) -> Option<&ResultRow> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.quantile == quantile && r.true_model.as_deref() == true_model)
    }
}

#[derive(Debug, Clone)]
pub struct StudyOutput {
    pub config: ExperimentConfig,
    pub table: ResultTable,
    pub methods: Vec<MethodRecord>,
    pub missingness: Option<MissingnessReport>,
    pub runtime_ms: u128,
}

fn runs_for(config: &ExperimentConfig, models: &[ModelSpec], prior: &ModelPrior, sets: &[ObservedSet], method: &AbcMethod, options: EngineOptions) -> Result<Vec<AbcRun>> {
    let data: Vec<Dataset> = sets.iter().map(|s| s.data.clone()).collect();
    if config.share_simulations {
        run_abc_batch(models, prior, &data, method, config.n_draws(), run_seed(config.master_seed, None), options)
    } else {
        data.iter()
            .enumerate()
            .map(|(j, d)| {
                let mut r = run_abc_batch(models, prior, std::slice::from_ref(d), method, config.n_draws(), run_seed(config.master_seed, Some(j)), options)?;
                Ok(r.pop().expect("one run"))
            })
            .collect()
    }
}

fn describe(params: &[f64], names: &[&str]) -> String {
    names
        .iter()
        .zip(params)
        .map(|(n, v)| format!("{n}={v}"))
        .collect::<Vec<_>>()
        .join(";")
}

/// Runs every method on every observed dataset and scores the estimates.
pub fn run_study(config: &ExperimentConfig, options: EngineOptions) -> Result<StudyOutput> {
    config.validate()?;
    let started = Instant::now();
    let models = config.models()?;
    let labels: Vec<String> = models.iter().map(|m| m.label()).collect();
    let prior = ModelPrior::uniform(models.len());
    let (sets, missingness) = generate_observed(config, &models)?;
    let truths = config.truths();
    let quantiles = config.quantiles();
    let mut table = ResultTable::empty(config.study, labels.clone());
    let mut records = Vec::new();

    for method in config.methods() {
        let label = method.label();
        let t0 = Instant::now();
        let runs = runs_for(config, &models, &prior, &sets, &method, options).map_err(|e| e.context(format!("method {label}")))?;
        let runtime_ms = t0.elapsed().as_millis();
        for &q in &quantiles {
            let policy = ThresholdPolicy::new(q)?;
            for (set, run) in sets.iter().zip(&runs) {
                let est = apply_threshold(run, &policy)?;
                table.estimates.push(DatasetEstimate {
                    method: label.clone(),
                    quantile: q,
                    truth: set.truth,
                    true_model: set.true_model,
                    dataset: set.index,
                    epsilon: est.epsilon_realized,
                    probs: est.model_probs,
                    reference: set.exact.clone(),
                });
            }
        }
        records.push(MethodRecord {
            label,
            method: runs[0].method.clone(),
            resolutions: dedup(runs.iter().map(|r| r.resolution.clone())),
            config_digests: dedup(runs.iter().map(|r| r.config_digest.clone())),
            retries: distinct_tables(&runs).map(|t| t.retries.len()).sum(),
            runtime_ms,
            n_draws_per_run: config.n_draws(),
            n_runs: if config.share_simulations { 1 } else { runs.len() },
        });
    }

    let benchmark = match config.study {
        StudyKind::NormalKnown | StudyKind::ExpoFamily => "exact",
        StudyKind::NormalUnknown => "abc-stat",
        StudyKind::Gandk | StudyKind::ToadSim => "label",
        StudyKind::ToadReal => "none",
    };
    if config.study == StudyKind::NormalUnknown {
        attach_stat_benchmark(&mut table, &quantiles);
    }
    let size = match sets[0].data.shape() {
        DataShape::Sample { n } => n.to_string(),
        DataShape::Matrix { n_days, n_toads, .. } => format!("{n_days}x{n_toads}"),
    };
    table.rows = score_rows(config, size, &table, &truths, &models, &quantiles, benchmark)?;
    Ok(StudyOutput {
        config: config.clone(),
        table,
        methods: records,
        missingness,
        runtime_ms: started.elapsed().as_millis(),
    })
}

fn distinct_tables(runs: &[AbcRun]) -> impl Iterator<Item = &Arc<crate::engine::DrawTable>> {
    let mut seen: Vec<&Arc<crate::engine::DrawTable>> = Vec::new();
    for r in runs {
        if !seen.iter().any(|t| Arc::ptr_eq(t, &r.table)) {
            seen.push(&r.table);
        }
    }
    seen.into_iter()
}

fn dedup<T: PartialEq>(items: impl Iterator<Item = T>) -> Vec<T> {
    let mut out: Vec<T> = Vec::new();
    for i in items {
        if !out.contains(&i) {
            out.push(i);
        }
    }
    out
}

/// Uses the summary method's estimate at the smallest quantile as the
/// reference for every method.
fn attach_stat_benchmark(table: &mut ResultTable, quantiles: &[f64]) {
    let q_min = quantiles.iter().copied().fold(f64::INFINITY, f64::min);
    let reference: Vec<((Option<usize>, usize), Vec<f64>)> = table
        .estimates
        .iter()
        .filter(|e| e.method == "stat" && e.quantile == q_min)
        .map(|e| ((e.truth, e.dataset), e.probs.clone()))
        .collect();
    for e in &mut table.estimates {
        e.reference = reference.iter().find(|(k, _)| *k == (e.truth, e.dataset)).map(|(_, p)| p.clone());
    }
}

fn score_rows(config: &ExperimentConfig, size: String, table: &ResultTable, truths: &[Truth], models: &[ModelSpec], quantiles: &[f64], benchmark: &str) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    for method in config.methods().iter().map(AbcMethod::label) {
        for &q in quantiles {
            let cell: Vec<&DatasetEstimate> = table.estimates.iter().filter(|e| e.method == method && e.quantile == q).collect();
            if truths.is_empty() {
                rows.push(ResultRow {
                    study: config.study.name().into(),
                    method: method.clone(),
                    quantile: q,
                    size: size.clone(),
                    true_model: None,
                    truth_params: String::new(),
                    mae: None,
                    mse: None,
                    per: None,
                    n_datasets: cell.len(),
                    benchmark: benchmark.into(),
                });
                continue;
            }
            for (t, truth) in truths.iter().enumerate() {
                let group: Vec<&&DatasetEstimate> = cell.iter().filter(|e| e.truth == Some(t)).collect();
                let estimates: Vec<Vec<f64>> = group.iter().map(|e| e.probs.clone()).collect();
                let labels: Vec<usize> = group.iter().map(|e| e.true_model.unwrap_or(0)).collect();
                let reference: Option<Vec<Vec<f64>>> = group.iter().map(|e| e.reference.clone()).collect();
                // the null model is the reported quantity for the normal studies,
                // the generating model otherwise
                let designated = if config.study.is_normal() { 0 } else { truth.model - 1 };
                let score = score_method(&estimates, &labels, reference.as_deref(), designated)?;
                let names = models[truth.model - 1].model.param_names();
                rows.push(ResultRow {
                    study: config.study.name().into(),
                    method: method.clone(),
                    quantile: q,
                    size: size.clone(),
                    true_model: Some(models[truth.model - 1].label()),
                    truth_params: describe(&truth.params, &names),
                    mae: score.mae,
                    mse: score.mse,
                    per: Some(score.per),
                    n_datasets: score.n_datasets,
                    benchmark: benchmark.into(),
                });
            }
        }
    }
    Ok(rows)
}
