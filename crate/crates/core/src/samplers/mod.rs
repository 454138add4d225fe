//! Random-variate generation for every law the studies simulate from.
//!
//! All public `sample_*` functions take a [`SeedSpec`](crate::seed::SeedSpec)
//! and are pure functions of it.

mod gandk;
mod normal_quantile;
mod stable;
mod standard;

pub use gandk::{gandk_quantile, gandk_variate, sample_gandk, GandKParams, DEFAULT_C};
pub use normal_quantile::normal_quantile;
pub use stable::{sample_stable, StableParams};
pub use standard::{sample_standard, Sampler, StandardDist};
