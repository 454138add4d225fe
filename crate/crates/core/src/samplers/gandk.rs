//! The g-and-k distribution, defined through its quantile function.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::normal_quantile::normal_quantile;
use crate::error::{AbcError, Result};
use crate::seed::SeedSpec;

/// Default overall-asymmetry constant.
pub const DEFAULT_C: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GandKParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub g: f64,
    pub k: f64,
}

impl GandKParams {
    /// Validated constructor with `c` fixed at 0.8.
    pub fn new(a: f64, b: f64, g: f64, k: f64) -> Result<Self> {
        Self::with_c(a, b, DEFAULT_C, g, k)
    }

    pub fn with_c(a: f64, b: f64, c: f64, g: f64, k: f64) -> Result<Self> {
        let p = Self { a, b, c, g, k };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.b > 0.0 && self.b.is_finite()) {
            return Err(AbcError::param(format!("g-and-k scale b must be positive, got {}", self.b)));
        }
        if !(self.k > -0.5 && self.k.is_finite()) {
            return Err(AbcError::param(format!("g-and-k kurtosis k must exceed -1/2, got {}", self.k)));
        }
        if !(self.a.is_finite() && self.c.is_finite() && self.g.is_finite()) {
            return Err(AbcError::param("g-and-k parameters must be finite"));
        }
        Ok(())
    }

    /// Quantile at a standard-normal score `z`.
    #[inline]
    pub fn quantile_from_z(&self, z: f64) -> f64 {
        // (1 - e^{-gz}) / (1 + e^{-gz}) == tanh(gz / 2), without the overflow
        let skew = 1.0 + self.c * (0.5 * self.g * z).tanh();
        self.a + self.b * skew * (1.0 + z * z).powf(self.k) * z
    }
}

/// `Q(p; a, b, c, g, k)` for `p` in the open unit interval.
pub fn gandk_quantile(p: f64, params: &GandKParams) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(AbcError::param(format!("probability must lie in (0, 1), got {p}")));
    }
    Ok(params.quantile_from_z(normal_quantile(p)))
}

/// Inverse-CDF draw; the uniform is taken on the open interval.
#[inline]
pub fn gandk_variate<R: Rng + ?Sized>(params: &GandKParams, rng: &mut R) -> f64 {
    let mut u: f64 = rng.random();
    while u == 0.0 {
        u = rng.random();
    }
    params.quantile_from_z(normal_quantile(u))
}

pub fn sample_gandk(params: &GandKParams, n: usize, seed: SeedSpec) -> Result<Vec<f64>> {
    params.validate()?;
    if n == 0 {
        return Err(AbcError::param("sample size must be at least 1"));
    }
    let mut rng = seed.rng();
    Ok((0..n).map(|_| gandk_variate(params, &mut rng)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(g: f64, k: f64) -> GandKParams {
        GandKParams::new(0.0, 1.0, g, k).unwrap()
    }

    #[test]
    fn median_is_location() {
        let p = GandKParams::new(2.5, 3.0, 1.3, 0.7).unwrap();
        assert_eq!(gandk_quantile(0.5, &p).unwrap(), 2.5);
    }

    #[test]
    fn normal_reduction() {
        let p = GandKParams::new(1.0, 2.0, 0.0, 0.0).unwrap();
        for &q in &[0.01, 0.2, 0.7, 0.99] {
            let expected = 1.0 + 2.0 * normal_quantile(q);
            assert!((gandk_quantile(q, &p).unwrap() - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn frozen_value_at_phi_one() {
        // Q(Phi(1)) with g = 1, k = 2 is (1 + 0.8 tanh(1/2)) * 4; the frozen
        // value came from a 50-digit evaluation.
        let p = params(1.0, 2.0);
        let phi1 = 0.841_344_746_068_542_9;
        let q = gandk_quantile(phi1, &p).unwrap();
        assert!((q - 5.478_774_903_232_031).abs() < 1e-9, "q={q}");
    }

    #[test]
    fn rejects_out_of_range() {
        let p = params(1.0, 2.0);
        assert!(gandk_quantile(0.0, &p).is_err());
        assert!(gandk_quantile(1.0, &p).is_err());
        assert!(GandKParams::new(0.0, 0.0, 1.0, 1.0).is_err());
        assert!(GandKParams::new(0.0, 1.0, 1.0, -0.5).is_err());
        assert!(sample_gandk(&p, 0, SeedSpec::new(1, 1)).is_err());
    }

    // with c = 0.8 the quantile function is only guaranteed monotone for
    // k >= 0, or for g = 0 and k > -1/2
    #[test]
    fn strictly_increasing_on_grid() {
        for &(g, k) in &[(0.0, 0.0), (1.0, 2.0), (4.0, 5.0), (0.0, -0.49), (3.0, 0.0)] {
            let p = params(g, k);
            let mut prev = f64::NEG_INFINITY;
            for i in 1..1000 {
                let q = gandk_quantile(i as f64 / 1000.0, &p).unwrap();
                assert!(q > prev, "g={g} k={k} i={i}");
                prev = q;
            }
        }
    }

    #[test]
    fn large_negative_scores_do_not_overflow() {
        let p = params(4.0, 1.0);
        assert!(p.quantile_from_z(-400.0).is_finite());
    }
}
