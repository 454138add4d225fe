//! Two-sample Cramér–von Mises distance computed from pooled ranks.

use serde::{Deserialize, Serialize};

use super::sample::EmpiricalSample;
use crate::error::{AbcError, Result};

/// How ties in the pooled sample receive ranks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TiePolicy {
    /// Tied values share the mean of the ranks they occupy.
    #[default]
    AverageRanks,
    /// Ties keep input order: every `y` value precedes an equal `z` value.
    InputOrder,
}

/// `U / (2n²) − (4n² − 1) / (12n)` for equal-size samples.
pub fn cvm(y: &EmpiricalSample, z: &EmpiricalSample) -> Result<f64> {
    cvm_with_ties(y, z, TiePolicy::default())
}

pub fn cvm_with_ties(y: &EmpiricalSample, z: &EmpiricalSample, ties: TiePolicy) -> Result<f64> {
    if y.len() != z.len() {
        return Err(AbcError::shape(format!(
            "cvm needs equal sample sizes, got {} and {}",
            y.len(),
            z.len()
        )));
    }
    Ok(cvm_sorted(y.sorted(), z.sorted(), ties))
}

/// Ascending inputs of equal length.
pub fn cvm_sorted(y: &[f64], z: &[f64], ties: TiePolicy) -> f64 {
    debug_assert_eq!(y.len(), z.len());
    cvm_general_sorted(y, z, ties)
}

/// Anderson's two-sample statistic for sizes `n = |y|`, `m = |z|`:
///
/// `T = U / (n m (n + m)) − (4 m n − 1) / (6 (m + n))`,
/// `U = n Σ (r_i − i)² + m Σ (s_j − j)²`.
///
/// With `n == m` this is exactly `U' / (2n²) − (4n² − 1) / (12n)` where `U'`
/// is the unweighted rank sum.
pub fn cvm_general_sorted(y: &[f64], z: &[f64], ties: TiePolicy) -> f64 {
    let (n, m) = (y.len(), z.len());
    debug_assert!(n > 0 && m > 0);
    let (sy, sz) = rank_deviation_sums(y, z, ties);
    let (nf, mf) = (n as f64, m as f64);
    let u = nf * sy + mf * sz;
    u / (nf * mf * (nf + mf)) - (4.0 * mf * nf - 1.0) / (6.0 * (mf + nf))
}

/// `(Σ (r_i − i)², Σ (s_j − j)²)` with 1-based pooled ranks.
fn rank_deviation_sums(y: &[f64], z: &[f64], ties: TiePolicy) -> (f64, f64) {
    let (n, m) = (y.len(), z.len());
    let (mut i, mut j) = (0usize, 0usize);
    let (mut sy, mut sz) = (0.0, 0.0);
    // pooled positions consumed so far
    let mut pos = 0usize;
    match ties {
        TiePolicy::InputOrder => {
            while i < n || j < m {
                pos += 1;
                if j == m || (i < n && y[i] <= z[j]) {
                    i += 1;
                    let d = pos as f64 - i as f64;
                    sy += d * d;
                } else {
                    j += 1;
                    let d = pos as f64 - j as f64;
                    sz += d * d;
                }
            }
        }
        TiePolicy::AverageRanks => {
            while i < n || j < m {
                let v = match (y.get(i), z.get(j)) {
                    (Some(&a), Some(&b)) => a.min(b),
                    (Some(&a), None) => a,
                    (None, Some(&b)) => b,
                    (None, None) => unreachable!(),
                };
                let (i0, j0) = (i, j);
                while i < n && y[i] == v {
                    i += 1;
                }
                while j < m && z[j] == v {
                    j += 1;
                }
                let group = (i - i0) + (j - j0);
                // ranks pos+1 ..= pos+group share their mean
                let rank = pos as f64 + (group as f64 + 1.0) / 2.0;
                for k in i0..i {
                    let d = rank - (k + 1) as f64;
                    sy += d * d;
                }
                for k in j0..j {
                    let d = rank - (k + 1) as f64;
                    sz += d * d;
                }
                pos += group;
            }
        }
    }
    (sy, sz)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[f64]) -> EmpiricalSample {
        EmpiricalSample::new(v.to_vec()).unwrap()
    }

    #[test]
    fn hand_example() {
        let v = cvm(&s(&[1.0, 3.0]), &s(&[2.0, 4.0])).unwrap();
        assert!((v - 0.125).abs() < 1e-15, "v={v}");
    }

    #[test]
    fn order_of_input_is_irrelevant() {
        let a = cvm(&s(&[3.0, 1.0]), &s(&[4.0, 2.0])).unwrap();
        assert!((a - 0.125).abs() < 1e-15);
    }

    #[test]
    fn monotone_transform_invariance() {
        let y = [0.1, -1.3, 2.2, 0.7, 1.9];
        let z = [0.4, 0.0, -2.0, 3.1, 1.0];
        let a = cvm(&s(&y), &s(&z)).unwrap();
        let ey: Vec<f64> = y.iter().map(|v| v.exp()).collect();
        let ez: Vec<f64> = z.iter().map(|v| v.exp()).collect();
        let b = cvm(&s(&ey), &s(&ez)).unwrap();
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn identical_samples_with_ties_policies() {
        let y = [1.0, 2.0, 3.0];
        // average ranks: every pair tied, r = (1.5, 3.5, 5.5)
        // U = 3 * 0.25 + 3 * 0.25 ... each deviation is 0.5, 1.5, 2.5
        let avg = cvm(&s(&y), &s(&y)).unwrap();
        let u = 2.0 * (0.25 + 2.25 + 6.25);
        let expected = u / 18.0 - 35.0 / 36.0;
        assert!((avg - expected).abs() < 1e-14, "{avg} vs {expected}");
        let io = cvm_with_ties(&s(&y), &s(&y), TiePolicy::InputOrder).unwrap();
        // y ranks 1,3,5 ; z ranks 2,4,6
        let u = (0.0 + 1.0 + 4.0) + (1.0 + 4.0 + 9.0);
        assert!((io - (u / 18.0 - 35.0 / 36.0)).abs() < 1e-14);
    }

    #[test]
    fn unequal_sizes_rejected_by_strict_form() {
        assert!(cvm(&s(&[1.0, 2.0]), &s(&[1.0])).is_err());
    }

    #[test]
    fn general_form_equals_pooled_ecdf_integral() {
        let y = [0.2, 0.9, 1.4, 3.3];
        let z = [0.5, 1.0, 2.0, 2.5, 4.0, 5.0, -1.0];
        let mut zs = z.to_vec();
        zs.sort_by(f64::total_cmp);
        let t = cvm_general_sorted(&y, &zs, TiePolicy::AverageRanks);
        let ecdf = |xs: &[f64], x: f64| xs.iter().filter(|&&v| v <= x).count() as f64 / xs.len() as f64;
        let pooled: Vec<f64> = y.iter().chain(zs.iter()).copied().collect();
        let integral: f64 = pooled
            .iter()
            .map(|&x| (ecdf(&y, x) - ecdf(&zs, x)).powi(2))
            .sum::<f64>()
            / pooled.len() as f64;
        let (n, m) = (y.len() as f64, zs.len() as f64);
        assert!((t - n * m / (n + m) * integral).abs() < 1e-13);
    }
}
