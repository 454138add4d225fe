use super::sample::EmpiricalSample;
use crate::error::{AbcError, Result};

/// Empirical 1-Wasserstein distance between equal-size samples: the mean
/// absolute gap between matching order statistics.
pub fn wasserstein1(y: &EmpiricalSample, z: &EmpiricalSample) -> Result<f64> {
    if y.len() != z.len() {
        return Err(AbcError::shape(format!(
            "wasserstein1 needs equal sample sizes, got {} and {}",
            y.len(),
            z.len()
        )));
    }
    Ok(wasserstein1_sorted(y.sorted(), z.sorted()))
}

/// Equal-length ascending inputs.
pub fn wasserstein1_sorted(y: &[f64], z: &[f64]) -> f64 {
    debug_assert_eq!(y.len(), z.len());
    let total: f64 = y.iter().zip(z).map(|(a, b)| (a - b).abs()).sum();
    total / y.len() as f64
}

/// `∫_0^1 |F⁻¹(t) − G⁻¹(t)| dt` for ascending samples of any (non-zero)
/// sizes. Coincides with [`wasserstein1_sorted`] when the sizes match.
pub fn wasserstein1_general_sorted(y: &[f64], z: &[f64]) -> f64 {
    let (n, m) = (y.len(), z.len());
    debug_assert!(n > 0 && m > 0);
    if n == m {
        return wasserstein1_sorted(y, z);
    }
    // walk the merged breakpoints i/n and j/m, in integer units of 1/(n m)
    let (n64, m64) = (n as u64, m as u64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut t = 0u64;
    let mut acc = 0.0;
    while i < n && j < m {
        let next_y = (i as u64 + 1) * m64;
        let next_z = (j as u64 + 1) * n64;
        let next = next_y.min(next_z);
        acc += (next - t) as f64 * (y[i] - z[j]).abs();
        t = next;
        if next_y == next {
            i += 1;
        }
        if next_z == next {
            j += 1;
        }
    }
    acc / (n64 * m64) as f64
}
