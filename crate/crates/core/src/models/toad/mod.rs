//! Fowler's toad movement models.

mod data;
mod features;
mod sim;

use rand::{Rng, RngCore};

pub use data::{load_toad_csv, parse_toad_csv, MissingnessReport, ToadData};
pub use features::{extract_lag_features, toad_summary_stats, LagFeatures, QUANTILE_GAP_FLOOR, STATS_PER_LAG};
pub use sim::{
    distance_return_probabilities, simulate_toads, toad_step_seed, ToadConfig, ToadModelKind, ToadParams,
};

use super::{DataShape, Dataset, Model, ModelSpec, SummaryMap};
use crate::error::{AbcError, Result};
use crate::seed::{SeedSpec, StreamRng};

pub const ALPHA_PRIOR: (f64, f64) = (1.0, 2.0);
pub const GAMMA_PRIOR: (f64, f64) = (10.0, 100.0);
pub const P0_PRIOR: (f64, f64) = (0.0, 1.0);
pub const D0_PRIOR: (f64, f64) = (20.0, 2000.0);

/// Days × toads positions, stored row-major. `NaN` marks a missing record.
#[derive(Debug, Clone, PartialEq)]
pub struct LocationMatrix {
    n_days: usize,
    n_toads: usize,
    values: Vec<f64>,
}

impl LocationMatrix {
    pub fn new(n_days: usize, n_toads: usize, values: Vec<f64>) -> Result<Self> {
        if n_days == 0 || n_toads == 0 || values.len() != n_days * n_toads {
            return Err(AbcError::shape(format!(
                "{} values do not fill a {n_days} x {n_toads} matrix",
                values.len()
            )));
        }
        if values.iter().any(|v| v.is_infinite()) {
            return Err(AbcError::param("locations must be finite or missing"));
        }
        Ok(Self { n_days, n_toads, values })
    }

    pub fn n_days(&self) -> usize {
        self.n_days
    }

    pub fn n_toads(&self) -> usize {
        self.n_toads
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, day: usize) -> &[f64] {
        &self.values[day * self.n_toads..(day + 1) * self.n_toads]
    }

    pub fn get(&self, day: usize, toad: usize) -> f64 {
        self.values[day * self.n_toads + toad]
    }

    pub fn has_missing(&self) -> bool {
        self.values.iter().any(|v| v.is_nan())
    }

    pub fn missing_mask(&self) -> Vec<bool> {
        self.values.iter().map(|v| v.is_nan()).collect()
    }

    /// Blanks every cell where `mask` is set.
    pub fn apply_mask(&mut self, mask: &[bool]) -> Result<()> {
        if mask.len() != self.values.len() {
            return Err(AbcError::shape(format!(
                "mask has {} cells, matrix has {}",
                mask.len(),
                self.values.len()
            )));
        }
        for (v, &m) in self.values.iter_mut().zip(mask) {
            if m {
                *v = f64::NAN;
            }
        }
        Ok(())
    }
}

/// One of the three movement models as an ABC candidate. Parameters are
/// `[α, γ, p0]`, plus `d0` for the distance-decay model.
#[derive(Debug, Clone)]
pub struct ToadModel {
    kind: ToadModelKind,
    summary: SummaryMap,
}

impl ToadModel {
    pub fn new(kind: ToadModelKind, lags: Vec<usize>, return_radius: f64) -> Self {
        Self {
            kind,
            summary: SummaryMap::ToadLagStats { lags, return_radius },
        }
    }

    pub fn kind(&self) -> ToadModelKind {
        self.kind
    }

    pub fn lags(&self) -> &[usize] {
        match &self.summary {
            SummaryMap::ToadLagStats { lags, .. } => lags,
            _ => unreachable!(),
        }
    }

    pub fn return_radius(&self) -> f64 {
        match self.summary {
            SummaryMap::ToadLagStats { return_radius, .. } => return_radius,
            _ => unreachable!(),
        }
    }

    /// The three candidates with the standard lags and return radius.
    pub fn standard_set() -> [ModelSpec; 3] {
        let lags = vec![1, 2, 4, 8];
        [
            ModelSpec::new(1, ToadModel::new(ToadModelKind::RandomReturn, lags.clone(), 10.0)),
            ModelSpec::new(2, ToadModel::new(ToadModelKind::NearestReturn, lags.clone(), 10.0)),
            ModelSpec::new(3, ToadModel::new(ToadModelKind::DistanceReturn, lags, 10.0)),
        ]
    }
}

fn uniform(rng: &mut StreamRng, (lo, hi): (f64, f64)) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

impl Model for ToadModel {
    fn label(&self) -> String {
        match self.kind {
            ToadModelKind::RandomReturn => "M1".into(),
            ToadModelKind::NearestReturn => "M2".into(),
            ToadModelKind::DistanceReturn => "M3".into(),
        }
    }

    fn param_names(&self) -> Vec<&'static str> {
        let mut v = vec!["alpha", "gamma", "p0"];
        if self.kind == ToadModelKind::DistanceReturn {
            v.push("d0");
        }
        v
    }

    fn sample_prior(&self, rng: &mut StreamRng) -> Vec<f64> {
        let mut theta = vec![
            uniform(rng, ALPHA_PRIOR),
            uniform(rng, GAMMA_PRIOR),
            uniform(rng, P0_PRIOR),
        ];
        if self.kind == ToadModelKind::DistanceReturn {
            theta.push(uniform(rng, D0_PRIOR));
        }
        theta
    }

    fn simulate(&self, theta: &[f64], shape: &DataShape, rng: &mut StreamRng) -> Result<Dataset> {
        let DataShape::Matrix { n_days, n_toads, mask } = shape else {
            return Err(AbcError::shape("toad models simulate location matrices"));
        };
        let config = ToadConfig {
            n_days: *n_days,
            n_toads: *n_toads,
            lags: self.lags().to_vec(),
            return_radius: self.return_radius(),
            model: self.kind,
            params: ToadParams::from_slice(self.kind, theta)?,
        };
        let seed = SeedSpec::new(rng.next_u64(), 0);
        let mut m = simulate_toads(&config, seed)?;
        if let Some(mask) = mask {
            m.apply_mask(mask)?;
        }
        Ok(Dataset::Locations(m))
    }

    fn summary_map(&self) -> &SummaryMap {
        &self.summary
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn simulated_matrices_follow_the_mask() {
        let [m1, _, m3] = ToadModel::standard_set();
        let mut mask = vec![false; 63 * 66];
        mask[66 * 5 + 3] = true;
        mask[66 * 40 + 65] = true;
        let shape = DataShape::Matrix {
            n_days: 63,
            n_toads: 66,
            mask: Some(Arc::new(mask.clone())),
        };
        let mut rng = SeedSpec::new(51, 0).rng();
        for spec in [&m1, &m3] {
            let theta = spec.model.sample_prior(&mut rng);
            let d = spec.model.simulate(&theta, &shape, &mut rng).unwrap();
            let m = d.as_locations().unwrap();
            assert_eq!(m.missing_mask(), mask);
            assert_eq!(d.shape(), shape);
        }
    }

    #[test]
    fn summary_has_44_components() {
        let mut rng = SeedSpec::new(52, 0).rng();
        let shape = DataShape::Matrix {
            n_days: 63,
            n_toads: 66,
            mask: None,
        };
        for spec in ToadModel::standard_set() {
            let theta = spec.model.sample_prior(&mut rng);
            assert_eq!(theta.len(), spec.model.param_names().len());
            let d = spec.model.simulate(&theta, &shape, &mut rng).unwrap();
            let s = spec.model.summarize(&d).unwrap();
            assert_eq!(s.len(), 44);
            assert!(s.iter().all(|v| v.is_finite()));
        }
    }
}
