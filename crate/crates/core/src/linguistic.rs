//! Decision matrices, linguistic partitions of each attribute's observed
//! range, membership degrees and the column-normalised BPA tensor.
//!
//! Memberships and BPAs are stored as p × (q·l) matrices blocked by
//! attribute: column `j * l + f` holds term `f + 1` of attribute `j`.

use serde::{Deserialize, Serialize};
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// One expert's scores: alternatives in rows, attributes in columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecisionMatrix {
    expert_id: String,
    alternatives: Vec<String>,
    attributes: Vec<String>,
    values: Matrix,
}

impl DecisionMatrix {
    pub fn new(
        expert_id: impl Into<String>,
        alternatives: Vec<String>,
        attributes: Vec<String>,
        values: Matrix,
    ) -> Result<Self> {
        let expert_id = expert_id.into();
        let invalid = |reason: String| Error::InvalidMatrix {
            expert: expert_id.clone(),
            reason,
        };
        let (p, q) = values.shape();
        if p < 2 {
            return Err(invalid(format!("need at least 2 alternatives, got {p}")));
        }
        if q < 1 {
            return Err(invalid("need at least 1 attribute".into()));
        }
        if alternatives.len() != p || attributes.len() != q {
            return Err(invalid(format!(
                "{} alternative and {} attribute labels for a {p}×{q} matrix",
                alternatives.len(),
                attributes.len()
            )));
        }
        for i in 0..p {
            for j in 0..q {
                let v = values[(i, j)];
                if !v.is_finite() {
                    return Err(invalid(format!(
                        "non-finite value {v} at ({}, {})",
                        alternatives[i], attributes[j]
                    )));
                }
            }
        }
        Ok(Self {
            expert_id,
            alternatives,
            attributes,
            values,
        })
    }

    /// Labels alternatives `A1..Ap` and attributes `t1..tq`.
    pub fn with_default_labels(expert_id: impl Into<String>, values: Matrix) -> Result<Self> {
        let alternatives = (1..=values.rows()).map(|i| format!("A{i}")).collect();
        let attributes = (1..=values.cols()).map(|j| format!("t{j}")).collect();
        Self::new(expert_id, alternatives, attributes, values)
    }

    pub fn expert_id(&self) -> &str {
        &self.expert_id
    }

    pub fn alternatives(&self) -> &[String] {
        &self.alternatives
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn num_alternatives(&self) -> usize {
        self.values.rows()
    }

    pub fn num_attributes(&self) -> usize {
        self.values.cols()
    }

    fn with_values(&self, values: Matrix) -> Self {
        Self {
            expert_id: self.expert_id.clone(),
            alternatives: self.alternatives.clone(),
            attributes: self.attributes.clone(),
            values,
        }
    }
}

/// Divides every column by its Euclidean norm (benefit attributes only).
pub fn normalize_decision_matrix(m: &DecisionMatrix) -> Result<DecisionMatrix> {
    let mut out = m.values.clone();
    for j in 0..m.num_attributes() {
        let norm = m.values.column(j).iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::DegenerateAttribute {
                expert: m.expert_id.clone(),
                attribute: m.attributes[j].clone(),
            });
        }
        for i in 0..m.num_alternatives() {
            out[(i, j)] /= norm;
        }
    }
    Ok(m.with_values(out))
}

/// Linguistic term settings shared by every attribute.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinguisticConfig {
    /// Number of terms l = H + 1.
    pub terms: usize,
    /// Permit any l ≥ 3 instead of 5..=9.
    pub allow_any_term_count: bool,
    /// Constant columns get memberships 1/l instead of an error.
    pub uniform_on_degenerate: bool,
    /// Clamp values outside [c, d] into the domain instead of failing.
    pub clamp_out_of_domain: bool,
}

impl Default for LinguisticConfig {
    fn default() -> Self {
        Self {
            terms: 5,
            allow_any_term_count: false,
            uniform_on_degenerate: false,
            clamp_out_of_domain: false,
        }
    }
}

impl LinguisticConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = if self.allow_any_term_count {
            self.terms >= 3
        } else {
            (5..=9).contains(&self.terms)
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "term count {} not allowed (5..=9, or ≥ 3 with allow_any_term_count)",
                self.terms
            )))
        }
    }

    /// H, the number of partition steps.
    pub fn steps(&self) -> usize {
        self.terms - 1
    }
}

/// Partition of [c, d] into H + 1 terms with step α = (d − c) / H.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinguisticPartition {
    lower: f64,
    upper: f64,
    steps: usize,
}

impl LinguisticPartition {
    pub fn new(lower: f64, upper: f64, steps: usize) -> Result<Self> {
        if steps < 2 {
            return Err(Error::InvalidParameter(format!("H must be at least 2, got {steps}")));
        }
        if !(lower.is_finite() && upper.is_finite() && lower < upper) {
            return Err(Error::InvalidParameter(format!(
                "partition bounds must satisfy c < d, got [{lower}, {upper}]"
            )));
        }
        Ok(Self { lower, upper, steps })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn alpha(&self) -> f64 {
        (self.upper - self.lower) / self.steps as f64
    }

    pub fn term_count(&self) -> usize {
        self.steps + 1
    }
}

/// Partition from a column's observed extremes. A constant column yields
/// `DegenerateDomain` with empty expert/attribute labels.
pub fn build_partition(values: &[f64], steps: usize) -> Result<LinguisticPartition> {
    let lower = values.iter().copied().fold(f64::INFINITY, f64::min);
    let upper = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if values.is_empty() || lower == upper {
        return Err(Error::DegenerateDomain {
            expert: String::new(),
            attribute: String::new(),
            value: lower,
        });
    }
    LinguisticPartition::new(lower, upper, steps)
}

/// Membership of `y` in term `term` (1-based, up to H + 1).
pub fn membership(y: f64, term: usize, part: &LinguisticPartition) -> Result<f64> {
    let (c, d, steps) = (part.lower, part.upper, part.steps);
    if term == 0 || term > steps + 1 {
        return Err(Error::InvalidParameter(format!(
            "term index {term} outside 1..={}",
            steps + 1
        )));
    }
    if !(c..=d).contains(&y) {
        return Err(Error::OutOfDomain {
            value: y,
            lower: c,
            upper: d,
        });
    }
    let mu = if term == 1 {
        1.0 - (y - c) / (d - c)
    } else if term == steps + 1 {
        1.0 - (d - y) / (d - c)
    } else {
        let h = (term - 1) as f64;
        let peak = c + h * part.alpha();
        if y <= peak {
            1.0 - (peak - y) / (h * part.alpha())
        } else {
            1.0 - (y - peak) / (d - peak)
        }
    };
    Ok(mu.clamp(0.0, 1.0))
}

/// Membership degrees of one expert, p × (q·l).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipMatrix {
    expert_id: String,
    alternatives: Vec<String>,
    attributes: Vec<String>,
    terms: usize,
    /// `None` for a constant column mapped to uniform memberships.
    partitions: Vec<Option<LinguisticPartition>>,
    values: Matrix,
}

impl MembershipMatrix {
    pub fn expert_id(&self) -> &str {
        &self.expert_id
    }

    pub fn terms(&self) -> usize {
        self.terms
    }

    pub fn partitions(&self) -> &[Option<LinguisticPartition>] {
        &self.partitions
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    /// Memberships of alternative `i` in the terms of attribute `j`.
    pub fn cell(&self, i: usize, j: usize) -> &[f64] {
        &self.values.row(i)[j * self.terms..(j + 1) * self.terms]
    }
}

pub fn membership_matrix(m: &DecisionMatrix, cfg: &LinguisticConfig) -> Result<MembershipMatrix> {
    cfg.validate()?;
    let l = cfg.terms;
    let (p, q) = m.values.shape();
    let mut values = Matrix::zeros(p, q * l);
    let mut partitions = Vec::with_capacity(q);
    for j in 0..q {
        let column = m.values.column(j);
        let part = match build_partition(&column, cfg.steps()) {
            Ok(part) => Some(part),
            Err(Error::DegenerateDomain { value, .. }) if cfg.uniform_on_degenerate => {
                log::warn!(
                    "expert `{}`, attribute `{}`: constant column ({value}); using uniform memberships",
                    m.expert_id,
                    m.attributes[j]
                );
                None
            }
            Err(Error::DegenerateDomain { value, .. }) => {
                return Err(Error::DegenerateDomain {
                    expert: m.expert_id.clone(),
                    attribute: m.attributes[j].clone(),
                    value,
                })
            }
            Err(e) => return Err(e),
        };
        for (i, &y) in column.iter().enumerate() {
            for f in 0..l {
                values[(i, j * l + f)] = match &part {
                    None => 1.0 / l as f64,
                    Some(part) => {
                        let y = if cfg.clamp_out_of_domain {
                            y.clamp(part.lower, part.upper)
                        } else {
                            y
                        };
                        membership(y, f + 1, part)?
                    }
                };
            }
        }
        partitions.push(part);
    }
    Ok(MembershipMatrix {
        expert_id: m.expert_id.clone(),
        alternatives: m.alternatives.clone(),
        attributes: m.attributes.clone(),
        terms: l,
        partitions,
        values,
    })
}

/// Column-normalised masses of one expert, laid out like [`MembershipMatrix`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BpaTensor {
    expert_id: String,
    alternatives: Vec<String>,
    attributes: Vec<String>,
    terms: usize,
    values: Matrix,
    /// (attribute, term) columns, 0-based, whose memberships summed to zero.
    zero_columns: Vec<(usize, usize)>,
}

impl BpaTensor {
    pub fn expert_id(&self) -> &str {
        &self.expert_id
    }

    pub fn alternatives(&self) -> &[String] {
        &self.alternatives
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn terms(&self) -> usize {
        self.terms
    }

    pub fn num_alternatives(&self) -> usize {
        self.values.rows()
    }

    pub fn num_attributes(&self) -> usize {
        self.attributes.len()
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn zero_columns(&self) -> &[(usize, usize)] {
        &self.zero_columns
    }

    /// Masses of alternative `i` over the terms of attribute `j`.
    pub fn cell(&self, i: usize, j: usize) -> &[f64] {
        &self.values.row(i)[j * self.terms..(j + 1) * self.terms]
    }

    /// Long-format dump: one `alt,attr,term,value` line per entry, terms 1-based.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "alt,attr,term,value")?;
        for (i, alt) in self.alternatives.iter().enumerate() {
            for (j, attr) in self.attributes.iter().enumerate() {
                for (f, v) in self.cell(i, j).iter().enumerate() {
                    writeln!(out, "{},{},{},{v}", csv_field(alt), csv_field(attr), f + 1)?;
                }
            }
        }
        Ok(())
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn bpa_tensor(r: &MembershipMatrix) -> BpaTensor {
    let mut values = r.values.clone();
    let mut zero_columns = Vec::new();
    let (p, width) = values.shape();
    for col in 0..width {
        let sum: f64 = (0..p).map(|i| values[(i, col)]).sum();
        if sum > 0.0 {
            for i in 0..p {
                values[(i, col)] /= sum;
            }
        } else {
            let (j, f) = (col / r.terms, col % r.terms);
            log::warn!(
                "expert `{}`, attribute `{}`, term {}: memberships sum to zero; masses set to 0",
                r.expert_id,
                r.attributes[j],
                f + 1
            );
            for i in 0..p {
                values[(i, col)] = 0.0;
            }
            zero_columns.push((j, f));
        }
    }
    BpaTensor {
        expert_id: r.expert_id.clone(),
        alternatives: r.alternatives.clone(),
        attributes: r.attributes.clone(),
        terms: r.terms,
        values,
        zero_columns,
    }
}
