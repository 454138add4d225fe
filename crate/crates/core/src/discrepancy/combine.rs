//! Normalised weighted combination of return-count and statistical
//! distances, evaluated over a complete run.

use serde::{Deserialize, Serialize};

use crate::error::{AbcError, Result};

/// Per-draw distance components, optionally with a combined value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceRecord {
    pub components: Vec<f64>,
    pub combined: Option<f64>,
}

impl DistanceRecord {
    pub fn new(components: Vec<f64>) -> Self {
        Self {
            components,
            combined: None,
        }
    }
}

/// Combines records whose first half of components are count distances and
/// whose second half are statistical distances (8 components for the
/// four-lag toad plan):
///
/// `D = ω Σ count / max Σ count + (1 − ω) Σ stat / max Σ stat`
///
/// with the maxima taken over the whole run. Records containing a
/// non-finite component take no part in the maxima and combine to `+∞`.
/// A zero maximum is an error unless its weight is zero.
pub fn combine_distances(records: &[DistanceRecord], omega: f64) -> Result<Vec<f64>> {
    let width = records
        .first()
        .map(|r| r.components.len())
        .ok_or(AbcError::InsufficientSample { needed: 1, got: 0 })?;
    let mut flat = Vec::with_capacity(records.len() * width);
    for (i, r) in records.iter().enumerate() {
        if r.components.len() != width {
            return Err(AbcError::shape(format!(
                "record {i} has {} components, expected {width}",
                r.components.len()
            )));
        }
        flat.extend_from_slice(&r.components);
    }
    combine_flat(&flat, width, omega)
}

/// Row-major variant of [`combine_distances`].
pub fn combine_flat(components: &[f64], width: usize, omega: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&omega) {
        return Err(AbcError::param(format!("omega must lie in [0, 1], got {omega}")));
    }
    if width == 0 || width % 2 != 0 {
        return Err(AbcError::shape(format!("combined distances need an even, non-zero component count, got {width}")));
    }
    if components.is_empty() || components.len() % width != 0 {
        return Err(AbcError::shape("component matrix is empty or ragged"));
    }
    let half = width / 2;
    let sums: Vec<Option<(f64, f64)>> = components
        .chunks_exact(width)
        .map(|row| {
            if row.iter().all(|v| v.is_finite()) {
                Some((row[..half].iter().sum(), row[half..].iter().sum()))
            } else {
                None
            }
        })
        .collect();
    let (max_count, max_stat) = sums
        .iter()
        .flatten()
        .fold((0.0f64, 0.0f64), |(a, b), &(c, s)| (a.max(c), b.max(s)));
    if sums.iter().all(Option::is_none) {
        return Err(AbcError::DegenerateNormalization("no record has finite components".into()));
    }
    if omega > 0.0 && max_count <= 0.0 {
        return Err(AbcError::DegenerateNormalization("maximum count-distance sum is zero".into()));
    }
    if omega < 1.0 && max_stat <= 0.0 {
        return Err(AbcError::DegenerateNormalization("maximum statistical-distance sum is zero".into()));
    }
    Ok(sums
        .into_iter()
        .map(|s| match s {
            None => f64::INFINITY,
            Some((c, st)) => {
                let a = if omega > 0.0 { omega * c / max_count } else { 0.0 };
                let b = if omega < 1.0 { (1.0 - omega) * st / max_stat } else { 0.0 };
                a + b
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn recs() -> Vec<DistanceRecord> {
        vec![
            DistanceRecord::new(vec![1.0, 0.0, 2.0, 1.0, 0.1, 0.2, 0.3, 0.4]),
            DistanceRecord::new(vec![3.0, 3.0, 1.0, 1.0, 0.5, 0.5, 0.5, 0.5]),
            DistanceRecord::new(vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.1, 0.0, 0.0]),
        ]
    }

    #[test]
    fn endpoints() {
        let r = recs();
        let d1 = combine_distances(&r, 1.0).unwrap();
        assert_eq!(d1, vec![4.0 / 8.0, 1.0, 0.0]);
        let d0 = combine_distances(&r, 0.0).unwrap();
        assert!((d0[0] - 1.0 / 2.0).abs() < 1e-15);
        assert_eq!(d0[1], 1.0);
        assert!((d0[2] - 0.1 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn joint_maximiser_maps_to_one() {
        let r = recs();
        for &w in &[0.0, 0.2, 0.5, 0.9, 1.0] {
            assert!((combine_distances(&r, w).unwrap()[1] - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn degenerate_and_invalid_inputs() {
        let zeros = vec![DistanceRecord::new(vec![0.0; 8]); 3];
        assert!(matches!(combine_distances(&zeros, 0.5), Err(AbcError::DegenerateNormalization(_))));
        assert!(combine_distances(&recs(), 1.5).is_err());
        assert!(combine_distances(&[], 0.5).is_err());
        let ragged = vec![DistanceRecord::new(vec![1.0; 8]), DistanceRecord::new(vec![1.0; 6])];
        assert!(combine_distances(&ragged, 0.5).is_err());
    }

    #[test]
    fn non_finite_rows_are_excluded() {
        let mut r = recs();
        r.push(DistanceRecord::new(vec![100.0, 0.0, 0.0, 0.0, f64::INFINITY, 0.0, 0.0, 0.0]));
        let d = combine_distances(&r, 0.5).unwrap();
        assert_eq!(d[3], f64::INFINITY);
        assert!((d[1] - 1.0).abs() < 1e-15);
    }
}
