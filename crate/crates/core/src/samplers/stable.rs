//! Symmetric alpha-stable variates via Chambers–Mallows–Stuck.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{AbcError, Result};
use crate::seed::SeedSpec;

/// Parameters of the symmetric, zero-centred stable law with characteristic
/// function `exp(-|gamma * t|^alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableParams {
    alpha: f64,
    gamma: f64,
}

impl StableParams {
    pub fn new(alpha: f64, gamma: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(AbcError::param(format!("stable alpha must lie in (0, 2], got {alpha}")));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(AbcError::param(format!("stable gamma must be positive, got {gamma}")));
        }
        Ok(Self { alpha, gamma })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `exp(-|gamma t|^alpha)`.
    pub fn characteristic_function(&self, t: f64) -> f64 {
        (-(self.gamma * t).abs().powf(self.alpha)).exp()
    }

    /// One draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // V ~ U(-pi/2, pi/2) on the open interval, W ~ Exp(1)
        let u: f64 = rng.random::<f64>();
        let v = PI * (u - 0.5);
        let v = if v <= -PI / 2.0 { -PI / 2.0 + f64::EPSILON } else { v };
        let w = -(1.0 - rng.random::<f64>()).ln();
        self.gamma * cms_unit(self.alpha, v, w)
    }
}

/// The unit-scale symmetric CMS transform of `(V, W)`.
fn cms_unit(alpha: f64, v: f64, w: f64) -> f64 {
    if alpha == 1.0 {
        return v.tan();
    }
    let cos_v = v.cos();
    let lead = (alpha * v).sin() / cos_v.powf(1.0 / alpha);
    let tail = (((1.0 - alpha) * v).cos() / w).powf((1.0 - alpha) / alpha);
    lead * tail
}

/// `n` i.i.d. stable draws from the stream `seed`.
pub fn sample_stable(params: &StableParams, n: usize, seed: SeedSpec) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(AbcError::param("sample size must be at least 1"));
    }
    let mut rng = seed.rng();
    Ok((0..n).map(|_| params.sample(&mut rng)).collect())
}
