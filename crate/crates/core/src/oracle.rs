//! Exact posterior model probabilities where they exist, and the error
//! metrics used to score ABC estimates against them.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{AbcError, Result};
use crate::models::ExpFamilyKind;

/// Which closed form to use for the known-variance normal Bayes factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BayesFactorForm {
    /// Shrinkage `cn / (cn + 1)` in the exponent; agrees with integrating
    /// the alternative's likelihood over its prior.
    #[default]
    Conjugate,
    /// Shrinkage `cn / (c + 1)`; differs from the conjugate form once n > 1.
    Simplified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactPosterior {
    pub model_probs: Vec<f64>,
    /// `B[i][j] = p_i(y) / p_j(y)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bayes_factors: Option<Vec<Vec<f64>>>,
}

impl ExactPosterior {
    /// Posterior under a uniform model prior from log marginal likelihoods.
    pub fn from_log_marginals(log_marginals: &[f64]) -> Result<Self> {
        if log_marginals.is_empty() {
            return Err(AbcError::shape("no models"));
        }
        let top = log_marginals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !top.is_finite() {
            return Err(AbcError::DegenerateNormalization(format!(
                "log marginals are not finite: {log_marginals:?}"
            )));
        }
        let w: Vec<f64> = log_marginals.iter().map(|l| (l - top).exp()).collect();
        let total: f64 = w.iter().sum();
        let bf = log_marginals
            .iter()
            .map(|li| log_marginals.iter().map(|lj| (li - lj).exp()).collect())
            .collect();
        Ok(Self {
            model_probs: w.iter().map(|x| x / total).collect(),
            bayes_factors: Some(bf),
        })
    }
}

fn mean_of(y: &[f64]) -> Result<f64> {
    if y.is_empty() {
        return Err(AbcError::InsufficientSample { needed: 1, got: 0 });
    }
    Ok(y.iter().sum::<f64>() / y.len() as f64)
}

/// `log B01` for `H0: μ = μ̃` against `μ ~ N(μ̃, cσ²)` with σ known.
pub fn log_bayes_factor_normal_known(y: &[f64], mu_tilde: f64, sigma: f64, c: f64, form: BayesFactorForm) -> Result<f64> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(AbcError::param(format!("sigma must be positive, got {sigma}")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(AbcError::param(format!("c must be positive, got {c}")));
    }
    let n = y.len() as f64;
    let ybar = mean_of(y)?;
    let z = (ybar - mu_tilde) / (sigma / n.sqrt());
    let shrink = match form {
        BayesFactorForm::Conjugate => c * n / (c * n + 1.0),
        BayesFactorForm::Simplified => c * n / (c + 1.0),
    };
    Ok(0.5 * (c * n).ln_1p() - 0.5 * shrink * z * z)
}

pub fn bayes_factor_normal_known(y: &[f64], mu_tilde: f64, sigma: f64, c: f64, form: BayesFactorForm) -> Result<f64> {
    log_bayes_factor_normal_known(y, mu_tilde, sigma, c, form).map(f64::exp)
}

/// `(π(M0 | y), π(M1 | y))` under equal prior weights.
pub fn exact_posterior_normal_known(y: &[f64], mu_tilde: f64, sigma: f64, c: f64, form: BayesFactorForm) -> Result<ExactPosterior> {
    let log_b01 = log_bayes_factor_normal_known(y, mu_tilde, sigma, c, form)?;
    ExactPosterior::from_log_marginals(&[log_b01, 0.0])
}

/// Log marginal likelihood of `y` under one of the three positive-data models.
pub fn marginal_likelihood_expo(kind: ExpFamilyKind, y: &[f64]) -> Result<f64> {
    if y.is_empty() {
        return Err(AbcError::InsufficientSample { needed: 1, got: 0 });
    }
    if let Some(bad) = y.iter().find(|&&v| !(v > 0.0 && v.is_finite())) {
        return Err(AbcError::param(format!("data must be positive and finite, got {bad}")));
    }
    let n = y.len() as f64;
    let (mut s, mut sl, mut sl2) = (0.0, 0.0, 0.0);
    for &v in y {
        let l = v.ln();
        s += v;
        sl += l;
        sl2 += l * l;
    }
    Ok(log_marginal_from_stats(kind, n, s, sl, sl2))
}

/// As [`marginal_likelihood_expo`], from `(n, Σy, Σlog y, Σlog² y)`.
pub fn log_marginal_from_stats(kind: ExpFamilyKind, n: f64, s: f64, sl: f64, sl2: f64) -> f64 {
    match kind {
        ExpFamilyKind::Exponential => ln_gamma(n + 1.0) - (n + 1.0) * s.ln_1p(),
        ExpFamilyKind::LogNormal => {
            sl * sl / (2.0 * (n + 1.0)) - 0.5 * sl2 - sl
                - 0.5 * n * (2.0 * std::f64::consts::PI).ln()
                - 0.5 * (n + 1.0).ln()
        }
        ExpFamilyKind::Gamma2 => sl + ln_gamma(2.0 * n + 1.0) - (2.0 * n + 1.0) * s.ln_1p(),
    }
}

pub fn exact_posterior_expo(y: &[f64]) -> Result<ExactPosterior> {
    let logs = ExpFamilyKind::ALL
        .iter()
        .map(|&k| marginal_likelihood_expo(k, y))
        .collect::<Result<Vec<_>>>()?;
    ExactPosterior::from_log_marginals(&logs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodScore {
    /// Absent when no reference probabilities were supplied.
    pub mae: Option<f64>,
    pub mse: Option<f64>,
    pub per: f64,
    pub n_datasets: usize,
}

/// Index of the strict maximum, or `None` on a tie or a non-finite entry.
pub fn strict_argmax(p: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    let mut tied = false;
    for (i, &v) in p.iter().enumerate() {
        if v.is_nan() {
            return None;
        }
        match best {
            None => best = Some(i),
            Some(b) if v > p[b] => {
                best = Some(i);
                tied = false;
            }
            Some(b) if v == p[b] => tied = true,
            _ => {}
        }
    }
    if tied { None } else { best }
}

/// Scores per-dataset probability vectors.
///
/// `labels` holds the 0-based index of the model each dataset was drawn
/// from; a dataset counts as misclassified unless that model has the strict
/// highest estimated probability. When `reference` is given, MAE and MSE
/// are taken on the probability of model `designated`.
pub fn score_method(estimates: &[Vec<f64>], labels: &[usize], reference: Option<&[Vec<f64>]>, designated: usize) -> Result<MethodScore> {
    let n = estimates.len();
    if n == 0 {
        return Err(AbcError::InsufficientSample { needed: 1, got: 0 });
    }
    if labels.len() != n {
        return Err(AbcError::shape(format!("{n} estimates but {} labels", labels.len())));
    }
    let k = estimates[0].len();
    if designated >= k || estimates.iter().any(|e| e.len() != k) || labels.iter().any(|&l| l >= k) {
        return Err(AbcError::shape("estimates, labels and the designated model disagree on the model count"));
    }
    let wrong = estimates
        .iter()
        .zip(labels)
        .filter(|(e, &l)| strict_argmax(e) != Some(l))
        .count();
    let (mae, mse) = match reference {
        None => (None, None),
        Some(r) => {
            if r.len() != n || r.iter().any(|p| p.len() != k) {
                return Err(AbcError::shape("reference probabilities are misaligned with the estimates"));
            }
            let errs: Vec<f64> = estimates.iter().zip(r).map(|(e, t)| e[designated] - t[designated]).collect();
            let mae = errs.iter().map(|d| d.abs()).sum::<f64>() / n as f64;
            let mse = errs.iter().map(|d| d * d).sum::<f64>() / n as f64;
            (Some(mae), Some(mse))
        }
    };
    Ok(MethodScore {
        mae,
        mse,
        per: wrong as f64 / n as f64,
        n_datasets: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bayes_factor_at_null_mean() {
        let y = vec![3.0; 100];
        for form in [BayesFactorForm::Conjugate, BayesFactorForm::Simplified] {
            let b = bayes_factor_normal_known(&y, 3.0, 1.0, 100.0, form).unwrap();
            assert!((b - 10001.0_f64.sqrt()).abs() < 1e-9);
        }
        let p = exact_posterior_normal_known(&y, 3.0, 1.0, 100.0, BayesFactorForm::Conjugate).unwrap();
        let b = 10001.0_f64.sqrt();
        assert!((p.model_probs[0] - b / (1.0 + b)).abs() < 1e-14);
    }

    #[test]
    fn bayes_factor_rejects_bad_input() {
        assert!(bayes_factor_normal_known(&[], 0.0, 1.0, 1.0, BayesFactorForm::Conjugate).is_err());
        assert!(bayes_factor_normal_known(&[1.0], 0.0, 0.0, 1.0, BayesFactorForm::Conjugate).is_err());
        assert!(bayes_factor_normal_known(&[1.0], 0.0, 1.0, -1.0, BayesFactorForm::Conjugate).is_err());
    }

    #[test]
    fn expo_marginals_at_one() {
        let quarter = 0.25_f64.ln();
        assert!((marginal_likelihood_expo(ExpFamilyKind::Exponential, &[1.0]).unwrap() - quarter).abs() < 1e-14);
        assert!((marginal_likelihood_expo(ExpFamilyKind::Gamma2, &[1.0]).unwrap() - quarter).abs() < 1e-14);
        let want = -(2.0 * std::f64::consts::PI.sqrt()).ln();
        assert!((marginal_likelihood_expo(ExpFamilyKind::LogNormal, &[1.0]).unwrap() - want).abs() < 1e-14);
        assert!(marginal_likelihood_expo(ExpFamilyKind::Gamma2, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn softmax_is_shift_invariant() {
        let a = ExactPosterior::from_log_marginals(&[-1.0, -2.0, -3.5]).unwrap();
        let b = ExactPosterior::from_log_marginals(&[-1001.0, -1002.0, -1003.5]).unwrap();
        for (x, y) in a.model_probs.iter().zip(&b.model_probs) {
            assert!((x - y).abs() < 1e-14);
        }
        let eq = ExactPosterior::from_log_marginals(&[-7.0; 3]).unwrap();
        assert!(eq.model_probs.iter().all(|p| (p - 1.0 / 3.0).abs() < 1e-15));
        let bf = a.bayes_factors.unwrap();
        assert!((bf[0][1] - 1.0_f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn large_samples_stay_finite() {
        let y: Vec<f64> = (1..=1000).map(|i| 0.5 + (i as f64) / 400.0).collect();
        let p = exact_posterior_expo(&y).unwrap();
        assert!((p.model_probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.model_probs.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn score_hand_arithmetic() {
        let est = vec![vec![0.6, 0.4], vec![0.2, 0.8]];
        let truth = vec![vec![0.7, 0.3], vec![0.5, 0.5]];
        let s = score_method(&est, &[0, 0], Some(&truth), 0).unwrap();
        assert!((s.mae.unwrap() - 0.2).abs() < 1e-12);
        assert!((s.mse.unwrap() - 0.05).abs() < 1e-12);
        assert_eq!(s.per, 0.5);
        let perfect = score_method(&truth, &[0, 0], Some(&truth), 0).unwrap();
        assert_eq!(perfect.mae, Some(0.0));
        assert_eq!(perfect.mse, Some(0.0));
        // second dataset ties, which counts as an error
        assert_eq!(perfect.per, 0.5);
    }

    #[test]
    fn score_labels_only() {
        let est = vec![vec![0.1, 0.9], vec![0.9, 0.1], vec![0.5, 0.5]];
        let s = score_method(&est, &[1, 0, 0], None, 0).unwrap();
        assert_eq!(s.mae, None);
        assert!((s.per - 1.0 / 3.0).abs() < 1e-15);
        assert!(score_method(&est, &[1, 0], None, 0).is_err());
        assert!(score_method(&est, &[1, 0, 2], None, 0).is_err());
    }
}
