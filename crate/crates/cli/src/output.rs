//! Atomic file writes, sorted-key JSON, CSV tables and markdown helpers.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::anyhow;
use evidential_magdm::Matrix;
use serde::Serialize;
use serde_json::Value;

use crate::failure::{CliResult, Failure};

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> CliResult<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let io = |e: std::io::Error| Failure::input(anyhow!("writing {}: {e}", path.display()));
    fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    log::info!("wrote {}", path.display());
    Ok(())
}

/// serde_json's map type is ordered, so going through `Value` sorts keys.
pub fn to_value(v: &impl Serialize) -> CliResult<Value> {
    serde_json::to_value(v).map_err(|e| Failure::input(anyhow!("serialising report: {e}")))
}

pub fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("Value always serialises");
    s.push('\n');
    s
}

pub fn f6(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.6}")
    } else {
        v.to_string()
    }
}

/// CSV with a label column; values keep full precision so they re-parse exactly.
pub fn matrix_csv(corner: &str, row_labels: &[String], col_labels: &[String], m: &Matrix) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<&str> = std::iter::once(corner).chain(col_labels.iter().map(String::as_str)).collect();
    w.write_record(&header).expect("in-memory write");
    for (i, label) in row_labels.iter().enumerate() {
        let cells: Vec<String> = std::iter::once(label.clone())
            .chain(m.row(i).iter().map(|v| v.to_string()))
            .collect();
        w.write_record(&cells).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

/// One row per (alternative, attribute, term) cell of a p × (q·l) matrix.
pub fn term_csv(alternatives: &[String], attributes: &[String], terms: usize, m: &Matrix) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["alt", "attr", "term", "value"]).expect("in-memory write");
    for (i, alt) in alternatives.iter().enumerate() {
        for (j, attr) in attributes.iter().enumerate() {
            for t in 0..terms {
                let v = m[(i, j * terms + t)].to_string();
                w.write_record([alt.as_str(), attr, &(t + 1).to_string(), &v]).expect("in-memory write");
            }
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

pub fn md_table(out: &mut String, header: &[String], rows: &[Vec<String>]) {
    out.push_str(&format!("| {} |\n", header.join(" | ")));
    out.push_str(&format!("|{}\n", "---|".repeat(header.len())));
    for r in rows {
        out.push_str(&format!("| {} |\n", r.join(" | ")));
    }
    out.push('\n');
}

pub fn md_matrix(out: &mut String, corner: &str, row_labels: &[String], col_labels: &[String], m: &Matrix) {
    let header: Vec<String> = std::iter::once(corner.to_owned()).chain(col_labels.iter().cloned()).collect();
    let rows: Vec<Vec<String>> = row_labels
        .iter()
        .enumerate()
        .map(|(i, l)| std::iter::once(l.clone()).chain(m.row(i).iter().map(|&v| f6(v))).collect())
        .collect();
    md_table(out, &header, &rows);
}

pub fn md_json(out: &mut String, v: &Value) {
    out.push_str("```json\n");
    out.push_str(&json_text(v));
    out.push_str("```\n\n");
}
