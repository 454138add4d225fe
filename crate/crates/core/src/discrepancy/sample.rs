use std::sync::OnceLock;

use crate::error::{AbcError, Result};

/// A one-dimensional dataset with its ascending order cached on first use.
#[derive(Debug, Clone)]
pub struct EmpiricalSample {
    values: Vec<f64>,
    order: OnceLock<(Vec<usize>, Vec<f64>)>,
}

impl EmpiricalSample {
    /// Rejects empty input and NaN entries.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(AbcError::InsufficientSample { needed: 1, got: 0 });
        }
        if let Some(i) = values.iter().position(|v| v.is_nan()) {
            return Err(AbcError::param(format!("sample contains NaN at index {i}")));
        }
        Ok(Self {
            values,
            order: OnceLock::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn order(&self) -> &(Vec<usize>, Vec<f64>) {
        self.order.get_or_init(|| {
            let mut perm: Vec<usize> = (0..self.values.len()).collect();
            perm.sort_by(|&a, &b| self.values[a].total_cmp(&self.values[b]).then(a.cmp(&b)));
            let sorted = perm.iter().map(|&i| self.values[i]).collect();
            (perm, sorted)
        })
    }

    /// Permutation putting `values` in ascending order (stable on ties).
    pub fn sorted_view(&self) -> &[usize] {
        &self.order().0
    }

    /// The order statistics.
    pub fn sorted(&self) -> &[f64] {
        &self.order().1
    }

    /// Elementwise natural log; every value must be strictly positive.
    pub fn log_transformed(&self) -> Result<Self> {
        if let Some(v) = self.values.iter().find(|&&v| v <= 0.0) {
            return Err(AbcError::param(format!("log transform needs strictly positive data, found {v}")));
        }
        Self::new(self.values.iter().map(|v| v.ln()).collect())
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

impl PartialEq for EmpiricalSample {
    fn eq(&self, other: &Self) -> bool {
        self.values == other.values
    }
}

/// Sorts a buffer in place, NaN-free input assumed.
pub fn sort_values(values: &mut [f64]) {
    values.sort_unstable_by(|a, b| a.total_cmp(b));
}

/// Type-7 empirical quantile of ascending data: linear interpolation between
/// order statistics at position `h = (n - 1) p + 1`.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    debug_assert!((0.0..=1.0).contains(&p));
    let n = sorted.len();
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    if lo + 1 >= n {
        return sorted[n - 1];
    }
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nan_and_empty() {
        assert!(EmpiricalSample::new(vec![]).is_err());
        assert!(EmpiricalSample::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn sorted_view_is_a_sorting_permutation() {
        let s = EmpiricalSample::new(vec![3.0, -1.0, 2.0, 2.0, 0.5]).unwrap();
        let perm = s.sorted_view();
        let mut seen = perm.to_vec();
        seen.sort();
        assert_eq!(seen, vec![0, 1, 2, 3, 4]);
        assert_eq!(perm, &[1, 4, 2, 3, 0]);
        assert_eq!(s.sorted(), &[-1.0, 0.5, 2.0, 2.0, 3.0]);
    }

    #[test]
    fn type7_quantiles() {
        let xs: Vec<f64> = (1..=10).map(f64::from).collect();
        // h = 9 * 0.1 = 0.9 -> 1 + 0.9 * (2 - 1)
        assert!((quantile_sorted(&xs, 0.1) - 1.9).abs() < 1e-12);
        assert!((quantile_sorted(&xs, 0.9) - 9.1).abs() < 1e-12);
        assert_eq!(quantile_sorted(&xs, 0.0), 1.0);
        assert_eq!(quantile_sorted(&xs, 1.0), 10.0);
        assert_eq!(quantile_sorted(&[4.0], 0.3), 4.0);
    }

    #[test]
    fn log_needs_positive_values() {
        let s = EmpiricalSample::new(vec![1.0, 0.0]).unwrap();
        assert!(s.log_transformed().is_err());
        let s = EmpiricalSample::new(vec![1.0, std::f64::consts::E]).unwrap();
        let l = s.log_transformed().unwrap();
        assert!((l.values()[1] - 1.0).abs() < 1e-15);
    }
}
