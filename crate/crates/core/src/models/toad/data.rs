//! Reading an observed location matrix from delimited text.

use std::path::Path;

use serde::Serialize;

use super::LocationMatrix;
use crate::error::{AbcError, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MissingnessReport {
    pub n_days: usize,
    pub n_toads: usize,
    pub n_missing: usize,
    pub fraction_missing: f64,
    pub observed_per_toad: Vec<usize>,
    pub observed_per_day: Vec<usize>,
}

impl MissingnessReport {
    pub fn of(m: &LocationMatrix) -> Self {
        let (nd, nt) = (m.n_days(), m.n_toads());
        let mut per_toad = vec![0; nt];
        let mut per_day = vec![0; nd];
        for i in 0..nd {
            for (j, v) in m.row(i).iter().enumerate() {
                if !v.is_nan() {
                    per_toad[j] += 1;
                    per_day[i] += 1;
                }
            }
        }
        let n_missing = nd * nt - per_day.iter().sum::<usize>();
        Self {
            n_days: nd,
            n_toads: nt,
            n_missing,
            fraction_missing: n_missing as f64 / (nd * nt) as f64,
            observed_per_toad: per_toad,
            observed_per_day: per_day,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ToadData {
    pub locations: LocationMatrix,
    pub missingness: MissingnessReport,
}

fn is_missing(cell: &str) -> bool {
    let c = cell.trim();
    c.is_empty() || c.eq_ignore_ascii_case("na") || c.eq_ignore_ascii_case("nan")
}

/// Rows are days, columns are toads. Empty, `NA` and `NaN` cells are missing.
/// A first row with any other non-numeric cell is taken as a header.
pub fn parse_toad_csv(text: &str) -> Result<ToadData> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| AbcError::Parse(format!("line {}: {e}", line + 1)))?;
        if rec.iter().all(|c| c.is_empty()) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, &str> = rec
            .iter()
            .map(|c| {
                if is_missing(c) {
                    Ok(f64::NAN)
                } else {
                    c.parse::<f64>().map_err(|_| c).and_then(|v| if v.is_finite() { Ok(v) } else { Err(c) })
                }
            })
            .collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(_) if line == 0 => continue,
            Err(cell) => return Err(AbcError::Parse(format!("line {}: cannot read {cell:?} as a location", line + 1))),
        }
    }
    let n_days = rows.len();
    if n_days < 2 {
        return Err(AbcError::shape(format!("need at least 2 day rows, found {n_days}")));
    }
    let n_toads = rows[0].len();
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n_toads) {
        return Err(AbcError::shape(format!(
            "day row {} has {} columns, expected {n_toads}",
            i + 1,
            r.len()
        )));
    }
    let locations = LocationMatrix::new(n_days, n_toads, rows.concat())?;
    let missingness = MissingnessReport::of(&locations);
    Ok(ToadData { locations, missingness })
}

pub fn load_toad_csv(path: &Path) -> Result<ToadData> {
    let text = std::fs::read_to_string(path).map_err(|e| AbcError::io(path, e))?;
    parse_toad_csv(&text).map_err(|e| e.context(format!("reading {}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_missing_cells() {
        let text = "t1,t2,t3\n0,0,0\n12.5,,NA\n-3,4,NaN\n";
        let d = parse_toad_csv(text).unwrap();
        assert_eq!((d.locations.n_days(), d.locations.n_toads()), (3, 3));
        assert_eq!(d.missingness.n_missing, 3);
        assert_eq!(d.missingness.observed_per_toad, vec![3, 2, 1]);
        assert_eq!(d.missingness.observed_per_day, vec![3, 1, 2]);
        assert_eq!(d.locations.get(1, 0), 12.5);
    }

    #[test]
    fn headerless_input() {
        let d = parse_toad_csv("0,0\n1,2\n").unwrap();
        assert_eq!(d.locations.n_days(), 2);
        assert_eq!(d.missingness.n_missing, 0);
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(matches!(parse_toad_csv("0,0\n1\n"), Err(AbcError::Shape(_))));
    }

    #[test]
    fn bad_cell_rejected() {
        assert!(matches!(parse_toad_csv("0,0\n1,x\n"), Err(AbcError::Parse(_))));
    }
}
