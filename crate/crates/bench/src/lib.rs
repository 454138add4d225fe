//! Shared inputs for the benchmarks.

use abcmc_core::samplers::{sample_standard, StandardDist};
use abcmc_core::SeedSpec;

/// Two standard-normal samples of size `n`, shifted apart by a quarter.
pub fn normal_pair(n: usize) -> (Vec<f64>, Vec<f64>) {
    let d = StandardDist::Normal { mean: 0.0, var: 1.0 };
    let y = sample_standard(&d, n, SeedSpec::new(1, 0)).expect("valid sampler");
    let z = sample_standard(&StandardDist::Normal { mean: 0.25, var: 1.0 }, n, SeedSpec::new(1, 1)).expect("valid sampler");
    (y, z)
}
