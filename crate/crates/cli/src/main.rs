use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use abcmc_core::discrepancy::{cvm, mmd2_unbiased, wasserstein1, Bandwidth, EmpiricalSample, KernelSpec};
use abcmc_core::harness::{emit_outputs, run_study, ExperimentConfig};
use abcmc_core::models::toad::{load_toad_csv, simulate_toads, ToadConfig, ToadParams};
use abcmc_core::models::ToadModelKind;
use abcmc_core::oracle::{exact_posterior_expo, exact_posterior_normal_known, BayesFactorForm};
use abcmc_core::samplers::{sample_gandk, sample_stable, sample_standard, GandKParams, StableParams, StandardDist};
use abcmc_core::{EngineOptions, SeedSpec};
use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "abcmc", version, about = "Approximate Bayesian model choice with full-data distances")]
struct Cli {
    /// Master seed; overrides the config's `master_seed` for `run`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads. Results do not depend on this.
    #[arg(long, global = true, env = "ABCMC_WORKERS")]
    workers: Option<usize>,
    /// Output directory for `run`, or output file for `simulate`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a study described by a JSON config and write its result files.
    Run { config: PathBuf },
    /// Draw from a sampler or toad model and print the values.
    Simulate {
        #[arg(value_enum)]
        model: SimModel,
        /// Model parameters, in the order listed by `--help`.
        #[arg(allow_negative_numbers = true)]
        params: Vec<f64>,
        /// Sample size (days for toad models).
        #[arg(short, long, default_value_t = 100)]
        n: usize,
        /// Number of toads for toad models.
        #[arg(long, default_value_t = 66)]
        toads: usize,
    },
    /// Distance between the samples stored in two files.
    Distance {
        #[arg(value_enum)]
        method: DistanceName,
        a: PathBuf,
        b: PathBuf,
        /// Fixed Gaussian kernel scale for `mmd`; median heuristic otherwise.
        #[arg(long)]
        bandwidth: Option<f64>,
        /// Take logs of both samples first.
        #[arg(long)]
        log: bool,
    },
    /// Exact posterior model probabilities for a dataset.
    Oracle {
        #[arg(value_enum)]
        study: OracleStudy,
        data: PathBuf,
        #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
        mu_tilde: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 100.0)]
        c: f64,
        /// Use the `cn / (c + 1)` shrinkage factor instead of the conjugate one.
        #[arg(long)]
        simplified: bool,
    },
    /// Parse a toad location file and report its missingness.
    ToadLoad { csv: PathBuf },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SimModel {
    /// alpha gamma
    Stable,
    /// a b g k (c = 0.8)
    Gandk,
    /// mean sd
    Normal,
    /// rate
    Exponential,
    /// mu sd (of the log)
    Lognormal,
    /// shape rate
    Gamma,
    /// alpha gamma p0
    ToadRandom,
    /// alpha gamma p0
    ToadNearest,
    /// alpha gamma p0 d0
    ToadDistance,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum DistanceName {
    #[value(alias = "wass", alias = "wasserstein")]
    Wasserstein1,
    Cvm,
    Mmd,
    Energy,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
#[value(rename_all = "snake_case")]
enum OracleStudy {
    NormalKnown,
    ExpoFamily,
}

fn expect_params(model: SimModel, params: &[f64], n: usize) -> Result<()> {
    if params.len() != n {
        bail!("{model:?} takes {n} parameters, got {}", params.len());
    }
    Ok(())
}

/// Reads numbers separated by whitespace or commas; `#` starts a comment.
fn read_sample(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        for tok in line.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            let v: f64 = tok
                .parse()
                .with_context(|| format!("{}:{}: not a number: {tok:?}", path.display(), i + 1))?;
            out.push(v);
        }
    }
    if out.is_empty() {
        bail!("{} contains no values", path.display());
    }
    Ok(out)
}

fn simulate(model: SimModel, p: &[f64], n: usize, toads: usize, seed: SeedSpec) -> Result<String> {
    use SimModel::*;
    let values = match model {
        Stable => {
            expect_params(model, p, 2)?;
            sample_stable(&StableParams::new(p[0], p[1])?, n, seed)?
        }
        Gandk => {
            expect_params(model, p, 4)?;
            sample_gandk(&GandKParams::new(p[0], p[1], p[2], p[3])?, n, seed)?
        }
        Normal => {
            expect_params(model, p, 2)?;
            sample_standard(&StandardDist::Normal { mean: p[0], var: p[1] * p[1] }, n, seed)?
        }
        Exponential => {
            expect_params(model, p, 1)?;
            sample_standard(&StandardDist::Exponential { rate: p[0] }, n, seed)?
        }
        Lognormal => {
            expect_params(model, p, 2)?;
            sample_standard(&StandardDist::LogNormal { mu: p[0], var: p[1] * p[1] }, n, seed)?
        }
        Gamma => {
            expect_params(model, p, 2)?;
            sample_standard(&StandardDist::Gamma { shape: p[0], rate: p[1] }, n, seed)?
        }
        ToadRandom | ToadNearest | ToadDistance => {
            let kind = match model {
                ToadRandom => ToadModelKind::RandomReturn,
                ToadNearest => ToadModelKind::NearestReturn,
                _ => ToadModelKind::DistanceReturn,
            };
            let cfg = ToadConfig {
                n_days: n,
                n_toads: toads,
                ..ToadConfig::standard(kind, ToadParams::from_slice(kind, p)?)
            };
            let m = simulate_toads(&cfg, seed)?;
            let mut s = String::new();
            for d in 0..m.n_days() {
                let row: Vec<String> = m.row(d).iter().map(|v| format!("{v:?}")).collect();
                s.push_str(&row.join(","));
                s.push('\n');
            }
            return Ok(s);
        }
    };
    Ok(values.iter().map(|v| format!("{v:?}\n")).collect())
}

fn run(cli: Cli) -> Result<()> {
    let options = EngineOptions { workers: cli.workers };
    if cli.workers == Some(0) {
        bail!("--workers must be at least 1");
    }
    let seed = SeedSpec::new(cli.seed.unwrap_or(0), 0);
    match cli.command {
        Command::Run { config } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = cli.seed {
                cfg.master_seed = s;
            }
            let dir = cli
                .out
                .or_else(|| cfg.output_dir.clone())
                .unwrap_or_else(|| PathBuf::from(format!("abcmc-{}", cfg.study.name())));
            let out = run_study(&cfg, options)?;
            for path in emit_outputs(&out, &dir)? {
                println!("{}", path.display());
            }
        }
        Command::Simulate { model, params, n, toads } => {
            let text = simulate(model, &params, n, toads, seed)?;
            match cli.out {
                Some(path) => fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
        }
        Command::Distance { method, a, b, bandwidth, log } => {
            let mut ya = EmpiricalSample::new(read_sample(&a)?)?;
            let mut yb = EmpiricalSample::new(read_sample(&b)?)?;
            if log {
                ya = ya.log_transformed()?;
                yb = yb.log_transformed()?;
            }
            let d = match method {
                DistanceName::Wasserstein1 => wasserstein1(&ya, &yb)?,
                DistanceName::Cvm => cvm(&ya, &yb)?,
                DistanceName::Mmd => {
                    let bandwidth = bandwidth.map_or(Bandwidth::MedianHeuristic, |sigma| Bandwidth::Fixed { sigma });
                    mmd2_unbiased(&ya, &yb, &KernelSpec::Gaussian { bandwidth })?
                }
                DistanceName::Energy => mmd2_unbiased(&ya, &yb, &KernelSpec::Energy)?,
            };
            println!("{d}");
        }
        Command::Oracle { study, data, mu_tilde, sigma, c, simplified } => {
            let y = read_sample(&data)?;
            let (labels, post) = match study {
                OracleStudy::NormalKnown => {
                    let form = if simplified { BayesFactorForm::Simplified } else { BayesFactorForm::Conjugate };
                    (vec!["M0", "M1"], exact_posterior_normal_known(&y, mu_tilde, sigma, c, form)?)
                }
                OracleStudy::ExpoFamily => (vec!["M1", "M2", "M3"], exact_posterior_expo(&y)?),
            };
            for (l, p) in labels.iter().zip(&post.model_probs) {
                println!("{l} {p}");
            }
        }
        Command::ToadLoad { csv } => {
            let data = load_toad_csv(&csv)?;
            println!("{}", serde_json::to_string_pretty(&data.missingness)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
