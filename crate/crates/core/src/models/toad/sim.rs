//! Forward simulation of toad refuge positions along a one-dimensional shoreline.

use serde::{Deserialize, Serialize};

use super::LocationMatrix;
use crate::error::{AbcError, Result};
use crate::samplers::StableParams;
use crate::seed::{SeedSpec, StreamRng};
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToadModelKind {
    /// Return with constant probability to a uniformly chosen earlier refuge.
    RandomReturn,
    /// Return with constant probability to the refuge nearest the foraging point.
    NearestReturn,
    /// Return probability decays with distance to each refuge.
    DistanceReturn,
}

impl ToadModelKind {
    pub const ALL: [ToadModelKind; 3] = [
        ToadModelKind::RandomReturn,
        ToadModelKind::NearestReturn,
        ToadModelKind::DistanceReturn,
    ];

    pub fn n_params(self) -> usize {
        match self {
            ToadModelKind::DistanceReturn => 4,
            _ => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToadParams {
    pub alpha: f64,
    pub gamma: f64,
    pub p0: f64,
    /// Decay distance, used by [`ToadModelKind::DistanceReturn`] only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d0: Option<f64>,
}

impl ToadParams {
    pub fn from_slice(kind: ToadModelKind, theta: &[f64]) -> Result<Self> {
        if theta.len() != kind.n_params() {
            return Err(AbcError::param(format!(
                "{kind:?} takes {} parameters, got {}",
                kind.n_params(),
                theta.len()
            )));
        }
        Ok(Self {
            alpha: theta[0],
            gamma: theta[1],
            p0: theta[2],
            d0: theta.get(3).copied(),
        })
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = vec![self.alpha, self.gamma, self.p0];
        v.extend(self.d0);
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToadConfig {
    pub n_days: usize,
    pub n_toads: usize,
    pub lags: Vec<usize>,
    pub return_radius: f64,
    pub model: ToadModelKind,
    pub params: ToadParams,
}

impl ToadConfig {
    /// 63 days, 66 toads, lags {1, 2, 4, 8}, 10 m return radius.
    pub fn standard(model: ToadModelKind, params: ToadParams) -> Self {
        Self {
            n_days: 63,
            n_toads: 66,
            lags: vec![1, 2, 4, 8],
            return_radius: 10.0,
            model,
            params,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_days < 2 {
            return Err(AbcError::param(format!("need at least 2 days, got {}", self.n_days)));
        }
        if self.n_toads == 0 {
            return Err(AbcError::param("need at least one toad"));
        }
        if self.lags.is_empty() || self.lags.iter().any(|&l| l == 0 || l >= self.n_days) {
            return Err(AbcError::param(format!(
                "lags must lie in 1..{}, got {:?}",
                self.n_days, self.lags
            )));
        }
        if !(self.return_radius > 0.0 && self.return_radius.is_finite()) {
            return Err(AbcError::param(format!("return radius must be positive, got {}", self.return_radius)));
        }
        validate_params(self.model, &self.params)
    }
}

pub(crate) fn validate_params(kind: ToadModelKind, p: &ToadParams) -> Result<()> {
    StableParams::new(p.alpha, p.gamma)?;
    if !(0.0..=1.0).contains(&p.p0) {
        return Err(AbcError::param(format!("return probability p0 must lie in [0, 1], got {}", p.p0)));
    }
    match (kind, p.d0) {
        (ToadModelKind::DistanceReturn, Some(d0)) if d0 > 0.0 && !d0.is_nan() => Ok(()),
        (ToadModelKind::DistanceReturn, d0) => Err(AbcError::param(format!("decay distance d0 must be positive, got {d0:?}"))),
        (_, None) => Ok(()),
        (_, Some(_)) => Err(AbcError::param(format!("{kind:?} takes no decay distance"))),
    }
}

/// Stream for toad `j`'s stable steps; [`crate::samplers::sample_stable`] with
/// this seed reproduces them.
pub fn toad_step_seed(seed: SeedSpec, toad: usize) -> SeedSpec {
    seed.derive(2 * toad as u64)
}

fn toad_choice_seed(seed: SeedSpec, toad: usize) -> SeedSpec {
    seed.derive(2 * toad as u64 + 1)
}

/// Stay probability and per-refuge return probabilities for the
/// distance-decay model at foraging point `x`.
pub fn distance_return_probabilities(x: f64, refuges: &[f64], p0: f64, d0: f64) -> (f64, Vec<f64>) {
    let p_ret: Vec<f64> = refuges.iter().map(|r| p0 * (-(x - r).abs() / d0).exp()).collect();
    let stay: f64 = p_ret.iter().map(|p| 1.0 - p).product();
    let total: f64 = p_ret.iter().sum();
    let probs = if total > 0.0 {
        p_ret.iter().map(|p| p / total * (1.0 - stay)).collect()
    } else {
        vec![0.0; refuges.len()]
    };
    (stay, probs)
}

/// Sorted set of distinct refuge positions.
#[derive(Debug, Default)]
struct RefugeSet(Vec<f64>);

impl RefugeSet {
    fn insert(&mut self, y: f64) {
        if let Err(i) = self.0.binary_search_by(|r| r.total_cmp(&y)) {
            self.0.insert(i, y);
        }
    }

    fn nearest(&self, x: f64) -> f64 {
        let i = self.0.partition_point(|&r| r < x);
        match (i.checked_sub(1).map(|j| self.0[j]), self.0.get(i)) {
            (Some(lo), Some(&hi)) => {
                if x - lo <= hi - x {
                    lo
                } else {
                    hi
                }
            }
            (Some(lo), None) => lo,
            (None, Some(&hi)) => hi,
            (None, None) => unreachable!("refuge set always holds the starting point"),
        }
    }
}

fn simulate_one(kind: ToadModelKind, p: &ToadParams, stable: &StableParams, n_days: usize, steps: &mut StreamRng, choice: &mut StreamRng, out: &mut [f64]) {
    out[0] = 0.0;
    let mut refuges = RefugeSet::default();
    refuges.insert(0.0);
    let mut p_ret = Vec::new();
    for n in 1..n_days {
        let current = out[n - 1];
        let x = current + stable.sample(steps);
        let next = match kind {
            ToadModelKind::RandomReturn => {
                if choice.random::<f64>() < p.p0 {
                    out[choice.random_range(0..n)]
                } else {
                    x
                }
            }
            ToadModelKind::NearestReturn => {
                if choice.random::<f64>() < p.p0 {
                    refuges.nearest(x)
                } else {
                    x
                }
            }
            ToadModelKind::DistanceReturn => {
                let d0 = p.d0.unwrap_or(f64::INFINITY);
                p_ret.clear();
                p_ret.extend(refuges.0.iter().map(|r| p.p0 * (-(x - r).abs() / d0).exp()));
                let stay: f64 = p_ret.iter().map(|q| 1.0 - q).product();
                let u: f64 = choice.random();
                if u < stay {
                    x
                } else {
                    // the remaining mass 1 - stay is split in proportion to p_ret
                    let total: f64 = p_ret.iter().sum();
                    let mut target = (u - stay) / (1.0 - stay) * total;
                    let mut pick = refuges.0.len() - 1;
                    for (i, q) in p_ret.iter().enumerate() {
                        if target < *q {
                            pick = i;
                            break;
                        }
                        target -= q;
                    }
                    refuges.0[pick]
                }
            }
        };
        out[n] = next;
        refuges.insert(next);
    }
}

/// One location matrix (days × toads). Each toad starts at 0 and evolves
/// independently on its own pair of derived streams.
pub fn simulate_toads(config: &ToadConfig, seed: SeedSpec) -> Result<LocationMatrix> {
    config.validate()?;
    let stable = StableParams::new(config.params.alpha, config.params.gamma)?;
    let (nd, nt) = (config.n_days, config.n_toads);
    let mut column = vec![0.0; nd];
    let mut values = vec![0.0; nd * nt];
    for j in 0..nt {
        let mut steps = toad_step_seed(seed, j).rng();
        let mut choice = toad_choice_seed(seed, j).rng();
        simulate_one(config.model, &config.params, &stable, nd, &mut steps, &mut choice, &mut column);
        for (i, &y) in column.iter().enumerate() {
            values[i * nt + j] = y;
        }
    }
    LocationMatrix::new(nd, nt, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::sample_stable;

    fn config(model: ToadModelKind, p0: f64, d0: Option<f64>) -> ToadConfig {
        ToadConfig {
            n_days: 20,
            n_toads: 5,
            lags: vec![1, 2],
            return_radius: 10.0,
            model,
            params: ToadParams {
                alpha: 1.5,
                gamma: 40.0,
                p0,
                d0,
            },
        }
    }

    fn d0_for(kind: ToadModelKind) -> Option<f64> {
        (kind == ToadModelKind::DistanceReturn).then_some(500.0)
    }

    #[test]
    fn no_return_is_a_stable_walk() {
        let seed = SeedSpec::new(41, 3);
        for kind in ToadModelKind::ALL {
            let cfg = config(kind, 0.0, d0_for(kind));
            let m = simulate_toads(&cfg, seed).unwrap();
            let stable = StableParams::new(1.5, 40.0).unwrap();
            for j in 0..cfg.n_toads {
                let steps = sample_stable(&stable, cfg.n_days - 1, toad_step_seed(seed, j)).unwrap();
                for i in 1..cfg.n_days {
                    let diff = m.get(i, j) - m.get(i - 1, j);
                    assert!((diff - steps[i - 1]).abs() <= 1e-9 * (1.0 + steps[i - 1].abs()), "{kind:?}");
                }
            }
        }
    }

    #[test]
    fn certain_random_return_stays_home() {
        let m = simulate_toads(&config(ToadModelKind::RandomReturn, 1.0, None), SeedSpec::new(42, 0)).unwrap();
        assert!(m.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn first_row_is_zero_and_returns_hit_refuges() {
        let seed = SeedSpec::new(43, 1);
        let stable = StableParams::new(1.5, 40.0).unwrap();
        for kind in ToadModelKind::ALL {
            let cfg = config(kind, 0.6, d0_for(kind));
            let m = simulate_toads(&cfg, seed).unwrap();
            let mut returns = 0;
            for j in 0..cfg.n_toads {
                assert_eq!(m.get(0, j), 0.0);
                let steps = sample_stable(&stable, cfg.n_days - 1, toad_step_seed(seed, j)).unwrap();
                for i in 1..cfg.n_days {
                    let y = m.get(i, j);
                    let x = m.get(i - 1, j) + steps[i - 1];
                    if y != x {
                        returns += 1;
                        assert!((0..i).any(|k| m.get(k, j) == y), "{kind:?}: {y} is not a refuge");
                    }
                }
            }
            assert!(returns > 0, "{kind:?} never returned");
        }
    }

    #[test]
    fn distance_probabilities_sum_to_one() {
        let mut rng = SeedSpec::new(44, 0).rng();
        for _ in 0..1000 {
            let k = rng.random_range(1..30);
            let refuges: Vec<f64> = (0..k).map(|_| rng.random_range(-500.0..500.0)).collect();
            let x = rng.random_range(-600.0..600.0);
            let p0 = rng.random::<f64>();
            let d0 = rng.random_range(20.0..2000.0);
            let (stay, probs) = distance_return_probabilities(x, &refuges, p0, d0);
            let total = stay + probs.iter().sum::<f64>();
            assert!((total - 1.0).abs() < 1e-12, "total {total}");
            assert!(probs.iter().all(|&p| p >= 0.0));
        }
    }

    #[test]
    fn huge_decay_distance_gives_constant_probability() {
        let refuges = [-300.0, 0.0, 12.5, 900.0];
        let p_ret: Vec<f64> = refuges.iter().map(|r| 0.3 * (-(40.0_f64 - r).abs() / 1e12).exp()).collect();
        assert!(p_ret.iter().all(|p| (p - 0.3).abs() < 1e-9));
        let (stay, _) = distance_return_probabilities(40.0, &refuges, 0.3, 1e12);
        assert!((stay - 0.7_f64.powi(4)).abs() < 1e-9);
    }

    #[test]
    fn nearest_refuge_lookup() {
        let mut set = RefugeSet::default();
        for r in [0.0, 10.0, -5.0, 10.0, 30.0] {
            set.insert(r);
        }
        assert_eq!(set.0, vec![-5.0, 0.0, 10.0, 30.0]);
        assert_eq!(set.nearest(-100.0), -5.0);
        assert_eq!(set.nearest(4.0), 0.0);
        assert_eq!(set.nearest(6.0), 10.0);
        assert_eq!(set.nearest(25.0), 30.0);
        assert_eq!(set.nearest(1e9), 30.0);
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut c = config(ToadModelKind::RandomReturn, 0.5, None);
        c.params.alpha = 2.5;
        assert!(simulate_toads(&c, SeedSpec::new(0, 0)).is_err());
        let c = config(ToadModelKind::DistanceReturn, 0.5, None);
        assert!(simulate_toads(&c, SeedSpec::new(0, 0)).is_err());
        let mut c = config(ToadModelKind::NearestReturn, 0.5, None);
        c.lags = vec![20];
        assert!(simulate_toads(&c, SeedSpec::new(0, 0)).is_err());
        let mut c = config(ToadModelKind::NearestReturn, 1.5, None);
        c.lags = vec![1];
        assert!(simulate_toads(&c, SeedSpec::new(0, 0)).is_err());
    }
}
