use std::fmt::Write as _;
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::ExperimentConfig;
use super::study::{MethodRecord, ResultTable, StudyOutput};
use crate::error::{AbcError, Result};
use crate::models::toad::MissingnessReport;

pub const SUMMARY_FILE: &str = "summary.csv";
pub const ESTIMATES_FILE: &str = "estimates.csv";
pub const METADATA_FILE: &str = "metadata.json";
pub const PLOT_FILE: &str = "posterior.svg";

#[derive(Debug, Serialize)]
struct Metadata<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a ExperimentConfig,
    model_labels: &'a [String],
    methods: &'a [MethodRecord],
    #[serde(skip_serializing_if = "Option::is_none")]
    missingness: Option<&'a MissingnessReport>,
    total_runtime_ms: u128,
    decisions: BTreeMap<&'static str, String>,
    notes: Vec<String>,
}

fn csv_err(path: &Path, e: csv::Error) -> AbcError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => AbcError::io(path, io),
        other => AbcError::Parse(format!("{}: {other:?}", path.display())),
    }
}

pub const SUMMARY_COLUMNS: [&str; 11] = [
    "study", "method", "quantile", "size", "true_model", "truth_params", "mae", "mse", "per", "n_datasets", "benchmark",
];

pub fn write_summary_csv(table: &ResultTable, path: &Path) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(SUMMARY_COLUMNS).map_err(|e| csv_err(path, e))?;
    for row in &table.rows {
        w.serialize(row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| AbcError::io(path, e))
}

pub fn write_estimates_csv(table: &ResultTable, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    let mut header = vec!["method".to_string(), "quantile".into(), "truth".into(), "true_model".into(), "dataset".into(), "epsilon".into()];
    header.extend(table.model_labels.iter().map(|l| format!("p_{l}")));
    header.extend(table.model_labels.iter().map(|l| format!("ref_{l}")));
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    for e in &table.estimates {
        let mut rec = vec![
            e.method.clone(),
            format!("{:?}", e.quantile),
            e.truth.map(|t| (t + 1).to_string()).unwrap_or_default(),
            e.true_model.map(|m| table.model_labels[m].clone()).unwrap_or_default(),
            (e.dataset + 1).to_string(),
            format!("{:?}", e.epsilon),
        ];
        rec.extend(e.probs.iter().map(|p| format!("{p:?}")));
        match &e.reference {
            Some(r) => rec.extend(r.iter().map(|p| format!("{p:?}"))),
            None => rec.extend(std::iter::repeat_n(String::new(), table.model_labels.len())),
        }
        w.write_record(&rec).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| AbcError::io(path, e))
}

/// Choices an analyst needs to interpret the numbers, keyed by topic.
pub fn decisions(config: &ExperimentConfig) -> BTreeMap<&'static str, String> {
    let mut d = BTreeMap::new();
    d.insert(
        "mmd_bandwidth",
        "median-heuristic bandwidths are resolved once per run from the pooled observed data; the values used are listed per method".to_string(),
    );
    d.insert("quantile_rule", "sample quantiles use linear interpolation between order statistics (type 7)".into());
    d.insert(
        "tie_policy",
        "the ceil(qN) smallest distances are kept, ties broken by draw index; NaN and infinite distances sort last".into(),
    );
    d.insert(
        "seeding",
        format!("master seed {}; draw i of a run uses its own stream, so results do not depend on the worker count", config.master_seed),
    );
    if config.study == super::StudyKind::NormalUnknown {
        let on = match config.variance_prior() {
            crate::models::VariancePrior::Variance => "the variance",
            crate::models::VariancePrior::Precision => "the precision",
        };
        d.insert("variance_prior", format!("Gamma(0.1, 0.1) in shape/rate form placed on {on}"));
    }
    if config.study.is_normal() {
        d.insert("bayes_factor", format!("{:?} closed form", config.bayes_factor_form()));
    }
    if config.study.is_toad() {
        d.insert(
            "toad_summary_statistics",
            "44 statistics: per lag, 10 log differences of the 0, 0.1, ..., 1 non-return quantiles plus the return count (a total of 48 is sometimes quoted; its composition is unstated)".into(),
        );
        d.insert("toad_mad_weights", "weighted Euclidean distance with each difference divided by the prior-predictive MAD of its statistic".into());
    }
    if config.study == super::StudyKind::ToadReal {
        d.insert("toad_missingness", "simulated matrices are masked with the observed missingness pattern before feature extraction".into());
    }
    d
}

fn notes(out: &StudyOutput) -> Vec<String> {
    let mut n = Vec::new();
    if out.config.share_simulations {
        n.push("all datasets and methods share one set of simulated draws".into());
    } else {
        n.push("each dataset has its own simulated draws".into());
    }
    if out.config.study.is_normal() {
        n.push("mae, mse and per refer to the posterior probability of M0".into());
    }
    if out.config.study == super::StudyKind::NormalUnknown {
        n.push("reference probabilities are the stat method at the smallest quantile".into());
    }
    n
}

pub fn write_metadata(out: &StudyOutput, path: &Path) -> Result<()> {
    let meta = Metadata {
        tool: "abcmc",
        version: env!("CARGO_PKG_VERSION"),
        config: &out.config,
        model_labels: &out.table.model_labels,
        methods: &out.methods,
        missingness: out.missingness.as_ref(),
        total_runtime_ms: out.runtime_ms,
        decisions: decisions(&out.config),
        notes: notes(out),
    };
    let text = serde_json::to_string_pretty(&meta).map_err(|e| AbcError::Parse(e.to_string()))?;
    fs::write(path, text).map_err(|e| AbcError::io(path, e))
}

const PALETTE: [&str; 6] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"];

/// Scatter of estimated against reference probabilities when references
/// exist, otherwise strips of the estimated probability of the first model.
pub fn render_svg(table: &ResultTable) -> String {
    let (w, h, pad) = (640.0, 480.0, 50.0);
    let methods: Vec<(String, f64)> = {
        let mut m: Vec<(String, f64)> = Vec::new();
        for e in &table.estimates {
            if !m.iter().any(|(l, q)| *l == e.method && *q == e.quantile) {
                m.push((e.method.clone(), e.quantile));
            }
        }
        m
    };
    let has_ref = table.estimates.iter().all(|e| e.reference.is_some()) && !table.estimates.is_empty();
    let sx = |v: f64| pad + v * (w - 2.0 * pad);
    let sy = |v: f64| h - pad - v * (h - 2.0 * pad);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="11">"#);
    let _ = writeln!(s, r##"<rect x="{pad}" y="{pad}" width="{}" height="{}" fill="none" stroke="#444"/>"##, w - 2.0 * pad, h - 2.0 * pad);
    let first = table.model_labels.first().cloned().unwrap_or_default();
    if has_ref {
        let _ = writeln!(s, r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#bbb"/>"##, sx(0.0), sy(0.0), sx(1.0), sy(1.0));
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">reference P({first})</text>"#, w / 2.0, h - 15.0);
    }
    let _ = writeln!(s, r#"<text x="15" y="{}" transform="rotate(-90 15 {})" text-anchor="middle">estimated P({first})</text>"#, h / 2.0, h / 2.0);
    for (i, (label, q)) in methods.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let _ = writeln!(s, r#"<text x="{}" y="{}" fill="{colour}">{label} q={q}</text>"#, w - pad - 120.0, pad + 15.0 + 14.0 * i as f64);
        let pts = table.estimates.iter().filter(|e| e.method == *label && e.quantile == *q);
        for (j, e) in pts.enumerate() {
            let y = e.probs[0];
            let x = match &e.reference {
                Some(r) if has_ref => r[0],
                _ => (i as f64 + 0.5 + 0.3 * ((j % 7) as f64 / 6.0 - 0.5)) / methods.len() as f64,
            };
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{colour}" fill-opacity="0.7"/>"#, sx(x), sy(y));
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Writes every output file into `dir`, creating it if needed.
pub fn emit_outputs(out: &StudyOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| AbcError::io(dir, e))?;
    let summary = dir.join(SUMMARY_FILE);
    let estimates = dir.join(ESTIMATES_FILE);
    let metadata = dir.join(METADATA_FILE);
    write_summary_csv(&out.table, &summary)?;
    write_estimates_csv(&out.table, &estimates)?;
    write_metadata(out, &metadata)?;
    let mut paths = vec![summary, estimates, metadata];
    if out.config.svg {
        let plot = dir.join(PLOT_FILE);
        fs::write(&plot, render_svg(&out.table)).map_err(|e| AbcError::io(&plot, e))?;
        paths.push(plot);
    }
    Ok(paths)
}
