//! Plain-text dump of a run: one JSON header line, then one CSV row per draw.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::run::AbcRun;
use crate::error::{AbcError, Result};
use crate::seed::SeedSpec;

pub const DUMP_FORMAT: &str = "abcmc-run";
pub const DUMP_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DumpHeader {
    pub format: String,
    pub version: u32,
    pub n_draws: usize,
    pub seed: SeedSpec,
    pub config_digest: String,
    pub model_labels: Vec<String>,
    pub max_params: usize,
    pub component_names: Vec<String>,
    pub has_combined: bool,
}

/// A dump read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct RunDump {
    pub header: DumpHeader,
    /// 1-based model index per draw.
    pub model: Vec<usize>,
    pub theta: Vec<Vec<f64>>,
    pub components: Vec<Vec<f64>>,
    pub combined: Option<Vec<f64>>,
}

pub fn write_run<W: Write>(run: &AbcRun, mut out: W) -> Result<()> {
    let io = |e| AbcError::io("<run dump>", e);
    let max_params = (0..run.n_draws()).map(|i| run.table.theta(i).len()).max().unwrap_or(0);
    let header = DumpHeader {
        format: DUMP_FORMAT.into(),
        version: DUMP_VERSION,
        n_draws: run.n_draws(),
        seed: run.seed,
        config_digest: run.config_digest.clone(),
        model_labels: run.table.model_labels.clone(),
        max_params,
        component_names: run.component_names.clone(),
        has_combined: run.combined.is_some(),
    };
    let json = serde_json::to_string(&header).map_err(|e| AbcError::Parse(e.to_string()))?;
    writeln!(out, "# {json}").map_err(io)?;
    let mut cols = vec!["draw".to_string(), "model".to_string()];
    cols.extend((0..max_params).map(|j| format!("theta{j}")));
    cols.extend(run.component_names.iter().cloned());
    if run.combined.is_some() {
        cols.push("combined".into());
    }
    writeln!(out, "{}", cols.join(",")).map_err(io)?;
    let mut line = String::new();
    for i in 0..run.n_draws() {
        use std::fmt::Write as _;
        line.clear();
        let _ = write!(line, "{},{}", i, run.table.model_index[i] + 1);
        let theta = run.table.theta(i);
        for j in 0..max_params {
            line.push(',');
            if let Some(t) = theta.get(j) {
                let _ = write!(line, "{t:?}");
            }
        }
        for c in run.components_of(i) {
            let _ = write!(line, ",{c:?}");
        }
        if let Some(c) = &run.combined {
            let _ = write!(line, ",{:?}", c[i]);
        }
        writeln!(out, "{line}").map_err(io)?;
    }
    Ok(())
}

fn parse_f64(cell: &str) -> Result<f64> {
    match cell {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => cell.parse().map_err(|_| AbcError::Parse(format!("bad number {cell:?}"))),
    }
}

pub fn read_run<R: BufRead>(input: R) -> Result<RunDump> {
    let mut lines = input.lines();
    let mut next = || -> Result<Option<String>> { lines.next().transpose().map_err(|e| AbcError::io("<run dump>", e)) };
    let first = next()?.ok_or_else(|| AbcError::Parse("empty dump".into()))?;
    let json = first
        .strip_prefix("# ")
        .ok_or_else(|| AbcError::Parse("dump does not start with a header line".into()))?;
    let header: DumpHeader = serde_json::from_str(json).map_err(|e| AbcError::Parse(e.to_string()))?;
    if header.format != DUMP_FORMAT || header.version != DUMP_VERSION {
        return Err(AbcError::Parse(format!(
            "unsupported dump format {} v{}",
            header.format, header.version
        )));
    }
    next()?.ok_or_else(|| AbcError::Parse("missing column line".into()))?;
    let w = header.component_names.len();
    let (mut model, mut theta, mut components) = (Vec::new(), Vec::new(), Vec::new());
    let mut combined = header.has_combined.then(Vec::new);
    while let Some(line) = next()? {
        let cells: Vec<&str> = line.split(',').collect();
        let expected = 2 + header.max_params + w + usize::from(header.has_combined);
        if cells.len() != expected {
            return Err(AbcError::Parse(format!("row has {} cells, expected {expected}", cells.len())));
        }
        model.push(cells[1].parse().map_err(|_| AbcError::Parse(format!("bad model index {:?}", cells[1])))?);
        theta.push(
            cells[2..2 + header.max_params]
                .iter()
                .filter(|c| !c.is_empty())
                .map(|c| parse_f64(c))
                .collect::<Result<Vec<_>>>()?,
        );
        let start = 2 + header.max_params;
        components.push(cells[start..start + w].iter().map(|c| parse_f64(c)).collect::<Result<Vec<_>>>()?);
        if let Some(c) = combined.as_mut() {
            c.push(parse_f64(cells[start + w])?);
        }
    }
    if model.len() != header.n_draws {
        return Err(AbcError::Parse(format!("header promises {} draws, found {}", header.n_draws, model.len())));
    }
    Ok(RunDump {
        header,
        model,
        theta,
        components,
        combined,
    })
}
