//! Decision-matrix and feature CSVs, run configs and fusion manifests.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::anyhow;
use evidential_magdm::fusion::{FeatureSet, FusionConfig};
use evidential_magdm::linguistic::DecisionMatrix;
use evidential_magdm::Matrix;
use serde::de::DeserializeOwned;
use serde_json::Value;

use crate::failure::{CliResult, Failure};

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn reader(path: &Path) -> CliResult<csv::Reader<fs::File>> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Failure::input(anyhow!("{}: {e}", path.display())))
}

/// Rows of a CSV with their 1-based line numbers; the first row is the header.
fn records(path: &Path) -> CliResult<(csv::StringRecord, Vec<(u64, csv::StringRecord)>)> {
    let mut rdr = reader(path)?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Failure::input(anyhow!("{}: {e}", path.display())))?;
        let line = rec.position().map_or(0, |p| p.line());
        rows.push((line, rec));
    }
    if rows.is_empty() {
        return Err(Failure::input(anyhow!("{}: file is empty", path.display())));
    }
    let (_, header) = rows.remove(0);
    for (line, rec) in &rows {
        if rec.len() != header.len() {
            return Err(Failure::input(anyhow!(
                "{}:{line}: expected {} fields like the header, found {}",
                path.display(),
                header.len(),
                rec.len()
            )));
        }
    }
    Ok((header, rows))
}

fn number(path: &Path, line: u64, column: usize, name: &str, cell: &str) -> CliResult<f64> {
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Failure::input(anyhow!(
            "{}:{line}:{column}: `{cell}` is not a finite number (column `{name}`)",
            path.display()
        ))),
    }
}

/// First row holds attribute names, first column alternative names. The
/// expert id is the file stem.
pub fn read_decision_matrix(path: &Path) -> CliResult<DecisionMatrix> {
    let (header, rows) = records(path)?;
    if header.len() < 2 {
        return Err(Failure::input(anyhow!(
            "{}: header needs an alternative column and at least one attribute",
            path.display()
        )));
    }
    let attributes: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
    let mut alternatives = Vec::with_capacity(rows.len());
    let mut values = Vec::with_capacity(rows.len() * attributes.len());
    for (line, rec) in &rows {
        alternatives.push(rec[0].to_owned());
        for (j, cell) in rec.iter().enumerate().skip(1) {
            values.push(number(path, *line, j + 1, &header[j], cell)?);
        }
    }
    let m = Matrix::from_row_major(rows.len(), attributes.len(), values)?;
    DecisionMatrix::new(stem(path), alternatives, attributes, m)
        .map_err(|e| Failure::input(e).context(path.display().to_string()))
}

/// Columns are feature dimensions; a final column named `label` holds
/// integer class ids.
pub fn read_features(path: &Path) -> CliResult<(FeatureSet, Vec<String>)> {
    let (header, rows) = records(path)?;
    let labelled = header.iter().next_back() == Some("label");
    let dims = header.len() - usize::from(labelled);
    if dims == 0 {
        return Err(Failure::input(anyhow!("{}: no feature columns", path.display())));
    }
    let mut values = Vec::with_capacity(rows.len() * dims);
    let mut labels = Vec::new();
    for (line, rec) in &rows {
        for (j, cell) in rec.iter().take(dims).enumerate() {
            values.push(number(path, *line, j + 1, &header[j], cell)?);
        }
        if labelled {
            let cell = &rec[dims];
            let label = cell.parse::<usize>().map_err(|_| {
                Failure::input(anyhow!(
                    "{}:{line}:{}: `{cell}` is not a class id (column `label`)",
                    path.display(),
                    dims + 1
                ))
            })?;
            labels.push(label);
        }
    }
    let m = Matrix::from_row_major(rows.len(), dims, values)?;
    let names = header.iter().take(dims).map(str::to_owned).collect();
    let set = FeatureSet::new(stem(path), m, labelled.then_some(labels))
        .map_err(|e| Failure::input(e).context(path.display().to_string()))?;
    Ok((set, names))
}

/// Reads a JSON config; unknown keys and bad values exit with the config code.
pub fn load_config<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| Failure::config(anyhow!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::config(anyhow!("{}: {e}", path.display())))
}

#[derive(Debug)]
pub struct Manifest {
    /// Source CSVs, resolved against the manifest's directory.
    pub sources: Vec<PathBuf>,
    pub config: Option<FusionConfig>,
}

/// `{"sources": ["a.csv", ...], "config": {...}}`; `config` is optional.
pub fn read_manifest(path: &Path) -> CliResult<Manifest> {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(anyhow!("{}: {e}", path.display())))?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| Failure::input(anyhow!("{}: {e}", path.display())))?;
    let Value::Object(mut fields) = value else {
        return Err(Failure::input(anyhow!("{}: manifest must be a JSON object", path.display())));
    };
    let base = path.parent().unwrap_or(Path::new("."));
    let sources = match fields.remove("sources") {
        Some(Value::Array(items)) => items
            .into_iter()
            .map(|v| match v {
                Value::String(s) => Ok(base.join(s)),
                other => Err(Failure::input(anyhow!(
                    "{}: source entries must be paths, got {other}",
                    path.display()
                ))),
            })
            .collect::<CliResult<Vec<_>>>()?,
        _ => {
            return Err(Failure::input(anyhow!(
                "{}: manifest needs a `sources` array of CSV paths",
                path.display()
            )))
        }
    };
    let config = fields
        .remove("config")
        .map(|v| serde_json::from_value(v).map_err(|e| Failure::config(anyhow!("{}: config: {e}", path.display()))))
        .transpose()?;
    if let Some(key) = fields.keys().next() {
        return Err(Failure::config(anyhow!("{}: unknown manifest key `{key}`", path.display())));
    }
    Ok(Manifest { sources, config })
}
