//! Trace CSV files and the JSON side files for bounds and weights.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use stlkit::{Trace, VarBounds, WeightTable};

use crate::error::CliError;

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read_text(path)?).map_err(|e| CliError::io(path, e))
}

pub fn bounds_from_map(map: &BTreeMap<String, [f64; 2]>) -> Result<VarBounds, CliError> {
    let mut b = VarBounds::new();
    for (name, [lo, hi]) in map {
        b.insert(name.clone(), *lo, *hi)?;
    }
    Ok(b)
}

pub fn weights_from_map(map: BTreeMap<String, Vec<f64>>) -> Result<WeightTable, CliError> {
    Ok(WeightTable::try_from(map)?)
}

/// Reads a `time,<signal>,…` CSV whose time column counts 0, 1, 2, … without gaps.
pub fn read_trace(path: &Path) -> Result<Trace, CliError> {
    let bad = |msg: String| CliError::io(path, msg);
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::io(path, e))?;
    let header = reader.headers().map_err(|e| CliError::io(path, e))?.clone();
    if header.get(0).map(str::trim) != Some("time") {
        return Err(bad("first column must be `time`".into()));
    }
    let names: Vec<String> = header.iter().skip(1).map(|h| h.trim().to_string()).collect();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::io(path, e))?;
        let num = |i: usize| -> Result<f64, CliError> {
            let cell = record.get(i).map(str::trim).unwrap_or("");
            cell.parse::<f64>().map_err(|_| bad(format!("row {}: `{cell}` is not a number", k + 1)))
        };
        if num(0)? != k as f64 {
            return Err(bad(format!("row {}: time must be {k}", k + 1)));
        }
        for (i, col) in cols.iter_mut().enumerate() {
            col.push(num(i + 1)?);
        }
    }
    Ok(Trace::new(names.into_iter().zip(cols).collect())?)
}

/// Writes the columns of `traces` side by side after a time column.
pub fn write_trace(path: &Path, traces: &[&Trace]) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))?;
    let columns: Vec<(&str, &[f64])> = traces.iter().flat_map(|t| t.iter()).collect();
    let len = columns.iter().map(|(_, c)| c.len()).max().unwrap_or(0);
    let mut header = vec!["time".to_string()];
    header.extend(columns.iter().map(|(n, _)| n.to_string()));
    writer.write_record(&header).map_err(|e| CliError::io(path, e))?;
    for k in 0..len {
        let mut row = vec![k.to_string()];
        row.extend(columns.iter().map(|(_, c)| c.get(k).map_or(String::new(), |v| v.to_string())));
        writer.write_record(&row).map_err(|e| CliError::io(path, e))?;
    }
    writer.flush().map_err(|e| CliError::io(path, e))
}
