use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::discrepancy::{KernelSpec, SummaryMetric, TiePolicy};
use crate::engine::{AbcMethod, Distance, ThresholdPolicy};
use crate::error::{AbcError, Result};
use crate::models::toad::ToadModel;
use crate::models::{
    expo_family_models, gandk_models, normal_mean_models, ExpFamilyKind, ModelSpec, VarianceModel, VariancePrior,
};
use crate::oracle::BayesFactorForm;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyKind {
    NormalKnown,
    NormalUnknown,
    ExpoFamily,
    Gandk,
    ToadSim,
    ToadReal,
}

impl StudyKind {
    pub fn name(self) -> &'static str {
        match self {
            StudyKind::NormalKnown => "normal_known",
            StudyKind::NormalUnknown => "normal_unknown",
            StudyKind::ExpoFamily => "expo_family",
            StudyKind::Gandk => "gandk",
            StudyKind::ToadSim => "toad_sim",
            StudyKind::ToadReal => "toad_real",
        }
    }

    pub fn is_toad(self) -> bool {
        matches!(self, StudyKind::ToadSim | StudyKind::ToadReal)
    }

    pub fn is_normal(self) -> bool {
        matches!(self, StudyKind::NormalKnown | StudyKind::NormalUnknown)
    }
}

/// The model (1-based) and parameters that generate observed datasets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Truth {
    pub model: usize,
    #[serde(default)]
    pub params: Vec<f64>,
}

impl Truth {
    pub fn new(model: usize, params: Vec<f64>) -> Self {
        Self { model, params }
    }
}

/// A complete, seedable study description. Optional fields take
/// study-specific defaults; fields that do not apply to the study are errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub study: StudyKind,
    /// Sample size for i.i.d. studies.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_days: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_toads: Option<usize>,
    /// Observed datasets per truth.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_datasets: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_draws: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub methods: Option<Vec<AbcMethod>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantiles: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truths: Option<Vec<Truth>>,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_tilde: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bayes_factor_form: Option<BayesFactorForm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variance_prior: Option<VariancePrior>,
    /// Observed location matrix for the real-data toad study.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub toad_data: Option<PathBuf>,
    /// Score every dataset against one shared set of simulations.
    #[serde(default = "yes")]
    pub share_simulations: bool,
    #[serde(default)]
    pub svg: bool,
}

fn yes() -> bool {
    true
}

pub const DESK_DRAWS: usize = 100_000;
pub const DESK_DATASETS: usize = 20;
pub const DESK_TOAD_DRAWS: usize = 10_000;
pub const DESK_TOAD_DATASETS: usize = 10;

fn stat(metric: SummaryMetric) -> AbcMethod {
    AbcMethod::Summary { metric, mad_draws: None }
}

fn disc(distance: Distance, log: bool) -> AbcMethod {
    AbcMethod::Discrepancy { distance, log }
}

fn cvm() -> Distance {
    Distance::Cvm { ties: TiePolicy::AverageRanks }
}

fn mmd() -> Distance {
    Distance::Mmd { kernel: KernelSpec::default() }
}

impl ExperimentConfig {
    /// Desk-scale defaults for `study` with every optional field left unset.
    pub fn new(study: StudyKind) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            study,
            n: None,
            n_days: None,
            n_toads: None,
            n_datasets: None,
            n_draws: None,
            methods: None,
            quantiles: None,
            truths: None,
            master_seed: 0,
            output_dir: None,
            mu_tilde: None,
            sigma: None,
            c: None,
            bayes_factor_form: None,
            variance_prior: None,
            toad_data: None,
            share_simulations: true,
            svg: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| AbcError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; relative `toad_data` and `output_dir` paths are
    /// taken relative to the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| AbcError::io(path, e))?;
        let mut cfg = Self::from_json(&text).map_err(|e| e.context(format!("config {}", path.display())))?;
        if let Some(base) = path.parent() {
            for p in [&mut cfg.toad_data, &mut cfg.output_dir].into_iter().flatten() {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn n_datasets(&self) -> usize {
        self.n_datasets.unwrap_or(if self.study.is_toad() { DESK_TOAD_DATASETS } else { DESK_DATASETS })
    }

    pub fn n_draws(&self) -> usize {
        self.n_draws.unwrap_or(if self.study.is_toad() { DESK_TOAD_DRAWS } else { DESK_DRAWS })
    }

    pub fn sample_size(&self) -> usize {
        self.n.unwrap_or(if self.study.is_normal() { 100 } else { 1000 })
    }

    pub fn toad_dims(&self) -> (usize, usize) {
        (self.n_days.unwrap_or(63), self.n_toads.unwrap_or(66))
    }

    pub fn mu_tilde(&self) -> f64 {
        self.mu_tilde.unwrap_or(3.0)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma.unwrap_or(1.0)
    }

    pub fn c(&self) -> f64 {
        self.c.unwrap_or(100.0)
    }

    pub fn bayes_factor_form(&self) -> BayesFactorForm {
        self.bayes_factor_form.unwrap_or_default()
    }

    pub fn variance_prior(&self) -> VariancePrior {
        self.variance_prior.unwrap_or_default()
    }

    pub fn methods(&self) -> Vec<AbcMethod> {
        if let Some(m) = &self.methods {
            return m.clone();
        }
        match self.study {
            StudyKind::NormalKnown | StudyKind::NormalUnknown => vec![
                stat(SummaryMetric::Euclidean),
                disc(cvm(), false),
                disc(Distance::Wasserstein, false),
                disc(mmd(), false),
            ],
            StudyKind::ExpoFamily => vec![
                stat(SummaryMetric::Euclidean),
                disc(cvm(), false),
                disc(Distance::Wasserstein, true),
                disc(mmd(), true),
            ],
            StudyKind::Gandk => vec![
                stat(SummaryMetric::L1),
                disc(cvm(), false),
                disc(Distance::Wasserstein, false),
                disc(mmd(), false),
            ],
            StudyKind::ToadSim | StudyKind::ToadReal => vec![
                AbcMethod::Summary {
                    metric: SummaryMetric::Euclidean,
                    mad_draws: Some(1000),
                },
                AbcMethod::Combined { omega: 0.2, distance: cvm(), log: false },
                AbcMethod::Combined { omega: 0.2, distance: Distance::Wasserstein, log: false },
                AbcMethod::Combined { omega: 0.2, distance: Distance::Wasserstein, log: true },
            ],
        }
    }

    pub fn quantiles(&self) -> Vec<f64> {
        if let Some(q) = &self.quantiles {
            return q.clone();
        }
        match self.study {
            StudyKind::Gandk => vec![0.01],
            StudyKind::ToadSim | StudyKind::ToadReal => vec![0.1, 0.01],
            _ => vec![0.01, 0.001],
        }
    }

    pub fn truths(&self) -> Vec<Truth> {
        if let Some(t) = &self.truths {
            return t.clone();
        }
        match self.study {
            StudyKind::NormalKnown => vec![
                Truth::new(1, vec![]),
                Truth::new(2, vec![2.0]),
                Truth::new(2, vec![2.75]),
                Truth::new(2, vec![2.9]),
            ],
            StudyKind::NormalUnknown => vec![
                Truth::new(1, vec![1.0]),
                Truth::new(2, vec![2.0, 1.0]),
                Truth::new(2, vec![2.75, 1.0]),
                Truth::new(2, vec![2.9, 1.0]),
            ],
            StudyKind::ExpoFamily => ExpFamilyKind::ALL
                .iter()
                .enumerate()
                .map(|(i, k)| Truth::new(i + 1, vec![k.generating_theta()]))
                .collect(),
            StudyKind::Gandk => vec![Truth::new(1, vec![2.0]), Truth::new(2, vec![1.0, 2.0])],
            StudyKind::ToadSim => vec![
                Truth::new(1, vec![1.7, 34.0, 0.6]),
                Truth::new(2, vec![1.83, 46.0, 0.65]),
                Truth::new(3, vec![1.65, 32.0, 0.43, 758.0]),
            ],
            StudyKind::ToadReal => vec![],
        }
    }

    /// The candidate models of the study.
    pub fn models(&self) -> Result<Vec<ModelSpec>> {
        Ok(match self.study {
            StudyKind::NormalKnown => {
                normal_mean_models(self.mu_tilde(), VarianceModel::Known { sigma: self.sigma() }, self.c())?.to_vec()
            }
            StudyKind::NormalUnknown => {
                let variance = VarianceModel::Unknown {
                    shape: 0.1,
                    rate: 0.1,
                    on: self.variance_prior(),
                };
                normal_mean_models(self.mu_tilde(), variance, self.c())?.to_vec()
            }
            StudyKind::ExpoFamily => expo_family_models().to_vec(),
            StudyKind::Gandk => gandk_models().to_vec(),
            StudyKind::ToadSim | StudyKind::ToadReal => ToadModel::standard_set().to_vec(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(AbcError::Config(m));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        let study = self.study;
        let reject = |present: bool, field: &str| -> Result<()> {
            if present {
                Err(AbcError::Config(format!("{field} does not apply to the {} study", study.name())))
            } else {
                Ok(())
            }
        };
        reject(study.is_toad() && self.n.is_some(), "n")?;
        reject(study != StudyKind::ToadSim && (self.n_days.is_some() || self.n_toads.is_some()), "n_days/n_toads")?;
        reject(!study.is_normal() && (self.mu_tilde.is_some() || self.sigma.is_some() || self.c.is_some()), "mu_tilde/sigma/c")?;
        reject(study != StudyKind::NormalKnown && self.bayes_factor_form.is_some(), "bayes_factor_form")?;
        reject(study != StudyKind::NormalUnknown && self.variance_prior.is_some(), "variance_prior")?;
        reject(study != StudyKind::ToadReal && self.toad_data.is_some(), "toad_data")?;
        reject(study == StudyKind::ToadReal && self.truths.as_ref().is_some_and(|t| !t.is_empty()), "truths")?;
        if study == StudyKind::ToadReal && self.toad_data.is_none() {
            return bad("the toad_real study needs toad_data".into());
        }
        for (name, v) in [("n", self.n), ("n_datasets", self.n_datasets), ("n_draws", self.n_draws), ("n_days", self.n_days), ("n_toads", self.n_toads)] {
            if v == Some(0) {
                return bad(format!("{name} must be at least 1"));
            }
        }
        if self.sample_size() < 2 && !study.is_toad() {
            return bad("sample size must be at least 2".into());
        }
        let quantiles = self.quantiles();
        if quantiles.is_empty() {
            return bad("no quantiles".into());
        }
        for q in &quantiles {
            ThresholdPolicy::new(*q)?.n_keep(self.n_draws())?;
        }
        let methods = self.methods();
        if methods.is_empty() {
            return bad("no methods".into());
        }
        let mut labels = Vec::new();
        for m in &methods {
            m.validate()?;
            let is_toad_method = matches!(m, AbcMethod::Combined { .. });
            if is_toad_method != study.is_toad() && !matches!(m, AbcMethod::Summary { .. }) {
                return bad(format!("method {} does not fit the {} study", m.label(), study.name()));
            }
            if labels.contains(&m.label()) {
                return bad(format!("two methods share the label {}", m.label()));
            }
            labels.push(m.label());
        }
        let models = self.models()?;
        for t in self.truths() {
            let Some(spec) = t.model.checked_sub(1).and_then(|k| models.get(k)) else {
                return bad(format!("truth model {} is not in 1..={}", t.model, models.len()));
            };
            let want = spec.model.param_names().len();
            if t.params.len() != want {
                return bad(format!(
                    "truth for model {} needs {want} parameters {:?}, got {}",
                    t.model,
                    spec.model.param_names(),
                    t.params.len()
                ));
            }
        }
        if study == StudyKind::NormalUnknown && !methods.iter().any(|m| matches!(m, AbcMethod::Summary { .. })) {
            return bad("the normal_unknown study is scored against the summary method, which is missing".into());
        }
        Ok(())
    }
}
