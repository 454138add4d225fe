//! Unbiased squared maximum mean discrepancy for one-dimensional samples.
//!
//! The Gaussian kernel is `g(y, z) = exp(-(y - z)² / (2σ))` with `σ` a raw
//! positive scale (not necessarily a variance). The energy kernel is
//! `g(y, z) = -|y - z|`, which turns the estimator into the unbiased energy
//! distance.

use serde::{Deserialize, Serialize};

use super::gauss_sum::{self_sum_sorted, GaussSum};
use super::sample::{sort_values, EmpiricalSample};
use crate::error::{AbcError, Result};

/// Largest `n * m` evaluated by the plain double loop; larger problems go
/// through the truncated-expansion path.
pub const DIRECT_PAIR_LIMIT: usize = 64 * 64;

/// Points used by the median heuristic.
pub const MEDIAN_SUBSAMPLE: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Bandwidth {
    Fixed { sigma: f64 },
    MedianHeuristic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelSpec {
    Gaussian { bandwidth: Bandwidth },
    Energy,
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec::Gaussian {
            bandwidth: Bandwidth::MedianHeuristic,
        }
    }
}

/// A kernel with every data-dependent choice made.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResolvedKernel {
    Gaussian { sigma: f64 },
    Energy,
}

impl ResolvedKernel {
    #[inline]
    pub fn eval(&self, a: f64, b: f64) -> f64 {
        match *self {
            ResolvedKernel::Gaussian { sigma } => (-(a - b) * (a - b) / (2.0 * sigma)).exp(),
            ResolvedKernel::Energy => -(a - b).abs(),
        }
    }
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        if let KernelSpec::Gaussian {
            bandwidth: Bandwidth::Fixed { sigma },
        } = *self
        {
            if !(sigma > 0.0 && sigma.is_finite()) {
                return Err(AbcError::param(format!("gaussian kernel scale must be positive, got {sigma}")));
            }
        }
        Ok(())
    }

    /// Fixes the bandwidth, using `reference` for the median heuristic.
    pub fn resolve(&self, reference: &[f64]) -> Result<ResolvedKernel> {
        self.validate()?;
        Ok(match *self {
            KernelSpec::Energy => ResolvedKernel::Energy,
            KernelSpec::Gaussian {
                bandwidth: Bandwidth::Fixed { sigma },
            } => ResolvedKernel::Gaussian { sigma },
            KernelSpec::Gaussian {
                bandwidth: Bandwidth::MedianHeuristic,
            } => ResolvedKernel::Gaussian {
                sigma: median_heuristic(reference),
            },
        })
    }
}

/// Median of the squared pairwise gaps of `values`, computed on an evenly
/// strided subsample of at most [`MEDIAN_SUBSAMPLE`] order statistics.
///
/// Falls back to the mean squared gap when the median is zero, and to 1 when
/// every value is equal.
pub fn median_heuristic(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sort_values(&mut sorted);
    let sub: Vec<f64> = if sorted.len() > MEDIAN_SUBSAMPLE {
        let n = sorted.len();
        (0..MEDIAN_SUBSAMPLE).map(|i| sorted[i * n / MEDIAN_SUBSAMPLE]).collect()
    } else {
        sorted
    };
    let mut gaps = Vec::with_capacity(sub.len() * sub.len().saturating_sub(1) / 2);
    for i in 0..sub.len() {
        for j in i + 1..sub.len() {
            let d = sub[i] - sub[j];
            gaps.push(d * d);
        }
    }
    if gaps.is_empty() {
        return 1.0;
    }
    let mid = gaps.len() / 2;
    let (_, upper, _) = gaps.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    let median = if gaps.len() % 2 == 1 {
        upper
    } else {
        let lower = gaps[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    };
    if median > 0.0 {
        return median;
    }
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    if mean > 0.0 {
        mean
    } else {
        1.0
    }
}

/// The unbiased estimator; `kernel` is resolved on the pooled sample.
pub fn mmd2_unbiased(y: &EmpiricalSample, z: &EmpiricalSample, kernel: &KernelSpec) -> Result<f64> {
    if y.len() != z.len() {
        return Err(AbcError::shape(format!(
            "mmd needs equal sample sizes, got {} and {}",
            y.len(),
            z.len()
        )));
    }
    if y.len() < 2 {
        return Err(AbcError::InsufficientSample {
            needed: 2,
            got: y.len(),
        });
    }
    let mut pooled = y.values().to_vec();
    pooled.extend_from_slice(z.values());
    let resolved = kernel.resolve(&pooled)?;
    Ok(mmd2_sorted(y.sorted(), z.sorted(), &resolved))
}

/// Unbiased MMD² for ascending samples (sizes ≥ 2, may differ).
pub fn mmd2_sorted(y: &[f64], z: &[f64], kernel: &ResolvedKernel) -> f64 {
    let (n, m) = (y.len() as f64, z.len() as f64);
    let (syy, szz, syz) = match *kernel {
        ResolvedKernel::Energy => (
            -energy_self_sum(y),
            -energy_self_sum(z),
            -energy_cross_sum(y, z),
        ),
        ResolvedKernel::Gaussian { sigma } => {
            if y.len() * z.len() <= DIRECT_PAIR_LIMIT {
                direct_sums(y, z, kernel)
            } else {
                let h = (2.0 * sigma).sqrt();
                let ys = GaussSum::for_all_targets(y, h);
                (self_sum_sorted(y, h), self_sum_sorted(z, h), ys.eval_sum(z))
            }
        }
    };
    syy / (n * (n - 1.0)) + szz / (m * (m - 1.0)) - 2.0 * syz / (n * m)
}

fn direct_sums(y: &[f64], z: &[f64], kernel: &ResolvedKernel) -> (f64, f64, f64) {
    let within = |x: &[f64]| {
        let mut s = 0.0;
        for i in 0..x.len() {
            for j in i + 1..x.len() {
                s += kernel.eval(x[i], x[j]);
            }
        }
        2.0 * s
    };
    let mut cross = 0.0;
    for &a in y {
        for &b in z {
            cross += kernel.eval(a, b);
        }
    }
    (within(y), within(z), cross)
}

/// `Σ_{i≠j} |x_i − x_j|` for ascending `x`.
pub(crate) fn energy_self_sum(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let s: f64 = x
        .iter()
        .enumerate()
        .map(|(k, &v)| v * (2.0 * k as f64 - n + 1.0))
        .sum();
    2.0 * s
}

/// `Σ_i Σ_j |y_i − z_j|` for ascending inputs.
pub(crate) fn energy_cross_sum(y: &[f64], z: &[f64]) -> f64 {
    let total_y: f64 = y.iter().sum();
    let n = y.len();
    let (mut below_count, mut below_sum) = (0usize, 0.0);
    let mut acc = 0.0;
    for &t in z {
        while below_count < n && y[below_count] <= t {
            below_sum += y[below_count];
            below_count += 1;
        }
        let c = below_count as f64;
        acc += c * t - below_sum + (total_y - below_sum) - (n as f64 - c) * t;
    }
    acc
}

/// Observed-side state reused across many simulated samples of one run.
pub struct MmdObserved {
    kernel: ResolvedKernel,
    n: usize,
    self_term: f64,
    y_sorted: Vec<f64>,
    y_sum: Option<GaussSum>,
}

impl MmdObserved {
    /// `y_sorted` ascending, length ≥ 2.
    pub fn new(y_sorted: &[f64], kernel: ResolvedKernel) -> Self {
        let n = y_sorted.len();
        let nf = n as f64;
        let (self_term, y_sum) = match kernel {
            ResolvedKernel::Energy => (-energy_self_sum(y_sorted) / (nf * (nf - 1.0)), None),
            ResolvedKernel::Gaussian { sigma } => {
                let h = (2.0 * sigma).sqrt();
                if n * n <= DIRECT_PAIR_LIMIT {
                    (direct_sums(y_sorted, &[], &kernel).0 / (nf * (nf - 1.0)), None)
                } else {
                    (
                        self_sum_sorted(y_sorted, h) / (nf * (nf - 1.0)),
                        Some(GaussSum::for_all_targets(y_sorted, h)),
                    )
                }
            }
        };
        Self {
            kernel,
            n,
            self_term,
            y_sorted: y_sorted.to_vec(),
            y_sum,
        }
    }

    pub fn kernel(&self) -> ResolvedKernel {
        self.kernel
    }

    /// The simulated-sample half of the estimator, `Σ_{i≠j} g(z_i, z_j) / (m(m−1))`.
    /// Depends only on `z` and the kernel, so a run computes it once per draw.
    pub fn simulated_self_term(kernel: &ResolvedKernel, z_sorted: &[f64]) -> f64 {
        let m = z_sorted.len() as f64;
        let s = match *kernel {
            ResolvedKernel::Energy => -energy_self_sum(z_sorted),
            ResolvedKernel::Gaussian { sigma } => {
                if z_sorted.len() * z_sorted.len() <= DIRECT_PAIR_LIMIT {
                    direct_sums(z_sorted, &[], kernel).0
                } else {
                    self_sum_sorted(z_sorted, (2.0 * sigma).sqrt())
                }
            }
        };
        s / (m * (m - 1.0))
    }

    /// MMD² against a simulated sample whose self term is already known.
    pub fn distance_with_self_term(&self, z_sorted: &[f64], z_self_term: f64) -> f64 {
        let m = z_sorted.len() as f64;
        let cross = match (&self.kernel, &self.y_sum) {
            (ResolvedKernel::Energy, _) => -energy_cross_sum(&self.y_sorted, z_sorted),
            (_, Some(ys)) if self.n * z_sorted.len() > DIRECT_PAIR_LIMIT => ys.eval_sum(z_sorted),
            (kernel, _) => {
                let mut c = 0.0;
                for &a in &self.y_sorted {
                    for &b in z_sorted {
                        c += kernel.eval(a, b);
                    }
                }
                c
            }
        };
        self.self_term + z_self_term - 2.0 * cross / (self.n as f64 * m)
    }

    pub fn distance(&self, z_sorted: &[f64]) -> f64 {
        let zs = Self::simulated_self_term(&self.kernel, z_sorted);
        self.distance_with_self_term(z_sorted, zs)
    }
}
