//! Checks of the pipeline against the published recruitment case, and the
//! grid search used to choose the default OWA scheme and log base.

use serde::Serialize;

use crate::divergence::LogBase;
use crate::error::Result;
use crate::linguistic::{bpa_tensor, membership_matrix, normalize_decision_matrix};
use crate::matrix::Matrix;
use crate::pipeline::{assess_experts, fuse, rank, OwaScheme, PipelineConfig};
use crate::recruitment as rc;

/// OWA schemes × log bases searched when calibrating against the published
/// pairwise divergences.
pub fn candidate_grid() -> Vec<(OwaScheme, LogBase)> {
    let schemes = [
        OwaScheme::Uniform,
        OwaScheme::LinearDescending,
        OwaScheme::Orness { theta: 0.6 },
        OwaScheme::Orness { theta: 0.7 },
        OwaScheme::Orness { theta: 0.8 },
    ];
    schemes
        .iter()
        .flat_map(|&s| [LogBase::Two, LogBase::E].map(|b| (s, b)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationScore {
    pub owa: OwaScheme,
    pub log_base: LogBase,
    /// Mean absolute error over the 17 × 6 pairwise table.
    pub mae: f64,
    /// Largest deviation of a per-pair average.
    pub max_average_deviation: f64,
    pub pair_averages: Vec<f64>,
    /// Pair averages ordered compatibly with the published averages.
    pub ordinal_match: bool,
}

/// True when sorting `computed` descending never puts a pair with a smaller
/// published value ahead of one with a larger published value. Equal
/// published values may appear in either order.
pub fn ordinal_match(computed: &[f64], published: &[f64]) -> bool {
    let mut idx: Vec<usize> = (0..computed.len()).collect();
    idx.sort_by(|&a, &b| computed[b].total_cmp(&computed[a]));
    idx.windows(2).all(|w| published[w[0]] >= published[w[1]])
}

fn published_pairwise() -> Matrix {
    Matrix::from_rows(&rc::PAIR_DIVERGENCE).expect("17×6 table")
}

/// Scores one configuration against the published pairwise divergences.
pub fn score(cfg: &PipelineConfig) -> Result<CalibrationScore> {
    let a = assess_experts(&rc::decision_matrices()?, cfg)?;
    let computed = &a.divergence.pairwise;
    let published = published_pairwise();
    let n = (computed.rows() * computed.cols()) as f64;
    let mae = computed
        .as_slice()
        .iter()
        .zip(published.as_slice())
        .map(|(x, y)| (x - y).abs())
        .sum::<f64>()
        / n;
    let averages = a.divergence.pair_aggregates.clone();
    let max_average_deviation = averages
        .iter()
        .zip(rc::PAIR_AVERAGE)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    Ok(CalibrationScore {
        owa: cfg.owa,
        log_base: cfg.log_base,
        mae,
        max_average_deviation,
        ordinal_match: ordinal_match(&averages, &rc::PAIR_AVERAGE),
        pair_averages: averages,
    })
}

/// Scores every grid member on top of `base`, best MAE first.
pub fn calibrate(base: &PipelineConfig, grid: &[(OwaScheme, LogBase)]) -> Result<Vec<CalibrationScore>> {
    let mut scores = grid
        .iter()
        .map(|&(owa, log_base)| {
            score(&PipelineConfig {
                owa,
                log_base,
                ..base.clone()
            })
        })
        .collect::<Result<Vec<_>>>()?;
    scores.sort_by(|a, b| a.mae.total_cmp(&b.mae));
    Ok(scores)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Largest deviation from the published values, where meaningful.
    pub max_deviation: Option<f64>,
    pub tolerance: Option<f64>,
    pub detail: String,
}

impl Check {
    fn within(name: &'static str, deviation: f64, tolerance: f64, detail: String) -> Self {
        Self {
            name,
            passed: deviation <= tolerance,
            max_deviation: Some(deviation),
            tolerance: Some(tolerance),
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verification {
    pub config: PipelineConfig,
    pub checks: Vec<Check>,
    pub calibration: CalibrationScore,
    /// Computed RW score vs the printed "Weights" column, per candidate.
    pub scores_vs_printed: Vec<(f64, f64)>,
}

impl Verification {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn max_dev<'a>(a: impl IntoIterator<Item = &'a f64>, b: impl IntoIterator<Item = &'a f64>) -> (f64, usize) {
    a.into_iter()
        .zip(b)
        .enumerate()
        .map(|(i, (x, y))| ((x - y).abs(), i))
        .fold((0.0, 0), |acc, v| if v.0 > acc.0 { v } else { acc })
}

fn fmt4(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.4}")).collect();
    format!("({})", parts.join(", "))
}

/// Runs every recruitment check with `cfg`.
pub fn verify(cfg: &PipelineConfig) -> Result<Verification> {
    let matrices = rc::decision_matrices()?;
    let mut checks = Vec::new();

    let u1 = normalize_decision_matrix(&matrices[0])?;
    let r = membership_matrix(&u1, &cfg.linguistic)?;
    let published = Matrix::from_rows(&rc::U1_MEMBERSHIP)?;
    let (dev, at) = max_dev(r.values().as_slice(), published.as_slice());
    checks.push(Check::within(
        "memberships (u1)",
        dev,
        1e-4,
        format!("worst cell: candidate {}, column {}", at / 10 + 1, at % 10 + 1),
    ));

    let b = bpa_tensor(&r);
    let published = Matrix::from_rows(&rc::U1_BPA)?;
    let (dev, at) = max_dev(b.values().as_slice(), published.as_slice());
    checks.push(Check::within(
        "masses (u1)",
        dev,
        1e-4,
        format!(
            "candidate 1 panel term 1 = {:.4}; worst cell: candidate {}, column {}",
            b.cell(0, 0)[0],
            at / 10 + 1,
            at % 10 + 1
        ),
    ));

    let calibration = score(cfg)?;
    checks.push(Check {
        name: "pairwise divergences",
        passed: calibration.mae <= 5e-4 && calibration.max_average_deviation <= 2e-4,
        max_deviation: Some(calibration.mae),
        tolerance: Some(5e-4),
        detail: format!(
            "MAE {:.2e}; worst pair-average deviation {:.2e} (≤ 2e-4); pair averages {}; ordinal match {}",
            calibration.mae,
            calibration.max_average_deviation,
            fmt4(&calibration.pair_averages),
            calibration.ordinal_match
        ),
    });

    let a = assess_experts(&matrices, cfg)?;
    let w = &a.weights;
    let (dev_avg, _) = max_dev(&w.averages, &rc::EXPERT_AVERAGE);
    let support_rel = w
        .supports
        .iter()
        .zip(rc::EXPERT_SUPPORT)
        .map(|(s, p)| (s / p - 1.0).abs())
        .fold(0.0, f64::max);
    checks.push(Check {
        name: "expert averages and supports",
        passed: dev_avg <= 1e-4 && support_rel <= 0.02,
        max_deviation: Some(dev_avg),
        tolerance: Some(1e-4),
        detail: format!(
            "averages {}; supports {}; worst relative support deviation {:.1}% (≤ 2%)",
            fmt4(&w.averages),
            fmt4(&w.supports),
            support_rel * 100.0
        ),
    });

    let (dev_w, _) = max_dev(&w.weights, &rc::EXPERT_WEIGHT);
    let order = w.order();
    let order_ok = order == rc::EXPERT_ORDER;
    checks.push(Check {
        name: "expert weights and order",
        passed: dev_w <= 0.02 && order_ok,
        max_deviation: Some(dev_w),
        tolerance: Some(0.02),
        detail: format!(
            "weights {}; order {}",
            fmt4(&w.weights),
            order.iter().map(|k| rc::EXPERTS[*k]).collect::<Vec<_>>().join(" > ")
        ),
    });

    let fused = fuse(&a.normalized, &rc::EXPERT_WEIGHT)?;
    let published = Matrix::from_rows(&rc::FUSED)?;
    let ranking = rank(&fused)?;
    let (dev_f, _) = max_dev(fused.as_slice(), published.as_slice());
    let (dev_i, _) = max_dev(&ranking.ideal, &rc::IDEAL);
    checks.push(Check::within(
        "fusion with published weights",
        dev_f.max(dev_i),
        1e-3,
        format!(
            "candidate 1 = ({:.4}, {:.4}); ideal = ({:.4}, {:.4})",
            fused[(0, 0)],
            fused[(0, 1)],
            ranking.ideal[0],
            ranking.ideal[1]
        ),
    ));

    let own = rank(&crate::pipeline::fuse(&a.normalized, &w.weights)?)?;
    let labels = |o: &[usize]| o.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(" ");
    checks.push(Check {
        name: "ranking",
        passed: ranking.order == rc::ORDER,
        max_deviation: None,
        tolerance: None,
        detail: format!(
            "order with published weights: {}; with computed weights: {}",
            labels(&ranking.order),
            labels(&own.order)
        ),
    });

    let scores_vs_printed = ranking
        .scores
        .iter()
        .copied()
        .zip(rc::PRINTED_SCORES)
        .collect();

    Ok(Verification {
        config: cfg.clone(),
        checks,
        calibration,
        scores_vs_printed,
    })
}
