//! Two-sample distances between empirical distributions and distances
//! between summary vectors.
//!
//! Every equal-size entry point (`wasserstein1`, `cvm`, `mmd2_unbiased`)
//! rejects samples of different lengths. The `*_general_sorted` variants
//! accept unequal sizes and are used where sample sizes legitimately differ
//! (toad non-return displacements).

mod combine;
mod cvm;
mod gauss_sum;
mod mmd;
mod sample;
mod summary;
mod wasserstein;

pub use combine::{combine_distances, combine_flat, DistanceRecord};
pub use cvm::{cvm, cvm_general_sorted, cvm_sorted, cvm_with_ties, TiePolicy};
pub use mmd::{
    median_heuristic, mmd2_sorted, mmd2_unbiased, Bandwidth, KernelSpec, MmdObserved, ResolvedKernel,
    DIRECT_PAIR_LIMIT, MEDIAN_SUBSAMPLE,
};
pub use sample::{quantile_sorted, sort_values, EmpiricalSample};
pub use summary::{summary_distance, SummaryMetric};
pub use wasserstein::{wasserstein1, wasserstein1_general_sorted, wasserstein1_sorted};
