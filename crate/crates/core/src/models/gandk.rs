//! Symmetric (`g = 0`) against skewed g-and-k models.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{check_theta, sample_len, DataShape, Dataset, Model, ModelSpec, SummaryMap};
use crate::error::Result;
use crate::samplers::{gandk_variate, GandKParams};
use crate::seed::StreamRng;

pub const K_PRIOR: (f64, f64) = (-0.5, 5.0);
pub const G_PRIOR: (f64, f64) = (0.0, 4.0);

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GandKModel {
    /// `false` fixes `g = 0`; parameters are `[k]`. `true` gives `[g, k]`.
    pub skewed: bool,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    summary: SummaryMap,
}

impl GandKModel {
    pub fn new(skewed: bool) -> Self {
        Self {
            skewed,
            a: 0.0,
            b: 1.0,
            c: crate::samplers::DEFAULT_C,
            summary: SummaryMap::Quantiles { levels: vec![0.1, 0.9] },
        }
    }

    pub fn params(&self, theta: &[f64]) -> Result<GandKParams> {
        check_theta(theta, 1 + usize::from(self.skewed), "g-and-k model")?;
        let (g, k) = if self.skewed { (theta[0], theta[1]) } else { (0.0, theta[0]) };
        GandKParams::with_c(self.a, self.b, self.c, g, k)
    }
}

fn open_uniform(rng: &mut StreamRng, (lo, hi): (f64, f64)) -> f64 {
    loop {
        let x = lo + (hi - lo) * rng.random::<f64>();
        if x > lo {
            return x;
        }
    }
}

impl Model for GandKModel {
    fn label(&self) -> String {
        if self.skewed { "M2".into() } else { "M1".into() }
    }

    fn param_names(&self) -> Vec<&'static str> {
        if self.skewed { vec!["g", "k"] } else { vec!["k"] }
    }

    fn sample_prior(&self, rng: &mut StreamRng) -> Vec<f64> {
        if self.skewed {
            let g = open_uniform(rng, G_PRIOR);
            vec![g, open_uniform(rng, K_PRIOR)]
        } else {
            vec![open_uniform(rng, K_PRIOR)]
        }
    }

    fn simulate(&self, theta: &[f64], shape: &DataShape, rng: &mut StreamRng) -> Result<Dataset> {
        let p = self.params(theta)?;
        let n = sample_len(shape)?;
        Ok(Dataset::Sample((0..n).map(|_| gandk_variate(&p, rng)).collect()))
    }

    fn summary_map(&self) -> &SummaryMap {
        &self.summary
    }
}

/// `(M1: g = 0, M2: g ~ U(0, 4))`, both with `k ~ U(-0.5, 5)`.
pub fn gandk_models() -> [ModelSpec; 2] {
    [ModelSpec::new(1, GandKModel::new(false)), ModelSpec::new(2, GandKModel::new(true))]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::sample_gandk;
    use crate::seed::SeedSpec;

    #[test]
    fn simulator_matches_sampler_stream() {
        let [m1, m2] = gandk_models();
        let seed = SeedSpec::new(31, 4);
        let d = m1.model.simulate(&[2.0], &DataShape::Sample { n: 50 }, &mut seed.rng()).unwrap();
        let want = sample_gandk(&GandKParams::new(0.0, 1.0, 0.0, 2.0).unwrap(), 50, seed).unwrap();
        assert_eq!(d.as_sample().unwrap(), &want[..]);
        let d = m2.model.simulate(&[1.0, 2.0], &DataShape::Sample { n: 50 }, &mut seed.rng()).unwrap();
        let want = sample_gandk(&GandKParams::new(0.0, 1.0, 1.0, 2.0).unwrap(), 50, seed).unwrap();
        assert_eq!(d.as_sample().unwrap(), &want[..]);
    }

    #[test]
    fn priors_inside_bounds() {
        let [m1, m2] = gandk_models();
        let mut rng = SeedSpec::new(32, 0).rng();
        for _ in 0..10_000 {
            let k = m1.model.sample_prior(&mut rng)[0];
            assert!(k > -0.5 && k < 5.0);
            let t = m2.model.sample_prior(&mut rng);
            assert!(t[0] > 0.0 && t[0] < 4.0 && t[1] > -0.5 && t[1] < 5.0);
        }
    }
}
