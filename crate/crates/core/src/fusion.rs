//! Multi-source feature fusion: each source plays an expert, feature
//! dimensions play attributes and samples play alternatives. Includes a
//! nearest-centroid reference classifier, confusion-matrix metrics and a
//! seeded synthetic benchmark.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linguistic::DecisionMatrix;
use crate::matrix::Matrix;
use crate::pipeline::{assess_experts, ExpertWeights, PipelineConfig, ZeroDivergencePolicy};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureSet {
    source_id: String,
    features: Matrix,
    labels: Option<Vec<usize>>,
}

impl FeatureSet {
    pub fn new(source_id: impl Into<String>, features: Matrix, labels: Option<Vec<usize>>) -> Result<Self> {
        let source_id = source_id.into();
        if let Some(l) = &labels {
            if l.len() != features.rows() {
                return Err(Error::ShapeMismatch(format!(
                    "source `{source_id}`: {} labels for {} samples",
                    l.len(),
                    features.rows()
                )));
            }
        }
        if let Some(pos) = features.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(Error::DegenerateFeature {
                source_id,
                dim: pos % features.cols().max(1),
                reason: "non-finite value".into(),
            });
        }
        Ok(Self {
            source_id,
            features,
            labels,
        })
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn num_samples(&self) -> usize {
        self.features.rows()
    }

    pub fn num_dims(&self) -> usize {
        self.features.cols()
    }
}

fn check_sources(sources: &[FeatureSet]) -> Result<()> {
    if sources.len() < 2 {
        return Err(Error::TooFewExperts(sources.len()));
    }
    let first = &sources[0];
    for s in &sources[1..] {
        if s.features.shape() != first.features.shape() {
            return Err(Error::ShapeMismatch(format!(
                "source `{}` is {:?}, source `{}` is {:?}",
                s.source_id,
                s.features.shape(),
                first.source_id,
                first.features.shape()
            )));
        }
        if s.labels.is_some() && first.labels.is_some() && s.labels != first.labels {
            return Err(Error::ShapeMismatch(format!(
                "source `{}` labels differ from source `{}`",
                s.source_id, first.source_id
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FusionConfig {
    /// Feature dimensions per pipeline run.
    pub block_size: usize,
    /// Most samples used as alternatives when estimating weights.
    pub sample_cap: usize,
    pub seed: u64,
    /// Share of each class held out for evaluation.
    pub test_fraction: f64,
    pub pipeline: PipelineConfig,
}

impl Default for FusionConfig {
    fn default() -> Self {
        Self {
            block_size: 8,
            sample_cap: 64,
            seed: 0,
            test_fraction: 0.2,
            pipeline: PipelineConfig {
                zero_divergence: ZeroDivergencePolicy::Concentrate,
                ..PipelineConfig::default()
            },
        }
    }
}

impl FusionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.block_size == 0 {
            return Err(Error::InvalidParameter("block_size must be at least 1".into()));
        }
        if self.sample_cap < 2 {
            return Err(Error::InvalidParameter("sample_cap must be at least 2".into()));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "test_fraction must lie in (0, 1), got {}",
                self.test_fraction
            )));
        }
        self.pipeline.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockWeights {
    pub first_dim: usize,
    pub dims: usize,
    pub weights: ExpertWeights,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FusionPlan {
    pub sources: Vec<String>,
    /// Block weights averaged and renormalised.
    pub weights: Vec<f64>,
    pub blocks: Vec<BlockWeights>,
    pub block_size: usize,
    pub sample_cap: usize,
    /// Sample indices used as alternatives, ascending.
    pub rows_used: Vec<usize>,
}

fn subsample(n: usize, cap: usize, seed: u64) -> Vec<usize> {
    if n <= cap {
        return (0..n).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = rand::seq::index::sample(&mut rng, n, cap).into_vec();
    rows.sort_unstable();
    rows
}

fn feature_error(source_id: &str, attribute: &str, reason: String) -> Error {
    Error::DegenerateFeature {
        source_id: source_id.to_string(),
        dim: attribute.parse().unwrap_or(usize::MAX),
        reason,
    }
}

pub fn estimate_fusion_weights(sources: &[FeatureSet], cfg: &FusionConfig) -> Result<FusionPlan> {
    check_sources(sources)?;
    cfg.validate()?;
    let (n, dims) = sources[0].features.shape();
    if n < 2 || dims == 0 {
        return Err(Error::ShapeMismatch(format!("need at least 2 samples and 1 dimension, got {n}×{dims}")));
    }
    let rows_used = subsample(n, cfg.sample_cap, cfg.seed);
    let alternatives: Vec<String> = rows_used.iter().map(|r| r.to_string()).collect();

    let mut blocks = Vec::new();
    for first_dim in (0..dims).step_by(cfg.block_size) {
        let width = cfg.block_size.min(dims - first_dim);
        let attributes: Vec<String> = (first_dim..first_dim + width).map(|d| d.to_string()).collect();
        let matrices = sources
            .iter()
            .map(|s| {
                let rows: Vec<&[f64]> = rows_used
                    .iter()
                    .map(|&r| &s.features.row(r)[first_dim..first_dim + width])
                    .collect();
                DecisionMatrix::new(
                    s.source_id.clone(),
                    alternatives.clone(),
                    attributes.clone(),
                    Matrix::from_rows(&rows)?,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let assessment = assess_experts(&matrices, &cfg.pipeline).map_err(|e| match e {
            Error::DegenerateDomain { expert, attribute, value } => {
                feature_error(&expert, &attribute, format!("constant value {value} over the sampled rows"))
            }
            Error::DegenerateAttribute { expert, attribute } => {
                feature_error(&expert, &attribute, "all sampled values are zero".into())
            }
            other => other,
        })?;
        blocks.push(BlockWeights {
            first_dim,
            dims: width,
            weights: assessment.weights,
        });
    }

    let k = sources.len();
    let mut weights = vec![0.0; k];
    for b in &blocks {
        for (w, bw) in weights.iter_mut().zip(&b.weights.weights) {
            *w += bw / blocks.len() as f64;
        }
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);

    Ok(FusionPlan {
        sources: sources.iter().map(|s| s.source_id.clone()).collect(),
        weights,
        blocks,
        block_size: cfg.block_size,
        sample_cap: cfg.sample_cap,
        rows_used,
    })
}

/// Divides each column by its Euclidean norm.
pub fn normalize_features(source: &FeatureSet) -> Result<Matrix> {
    let mut out = source.features.clone();
    for j in 0..out.cols() {
        let norm = out.column(j).iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::DegenerateFeature {
                source_id: source.source_id.clone(),
                dim: j,
                reason: "column has zero Euclidean norm".into(),
            });
        }
        for i in 0..out.rows() {
            out[(i, j)] /= norm;
        }
    }
    Ok(out)
}

/// Weighted combination of the column-normalised sources, named "fused".
pub fn fuse_features(sources: &[FeatureSet], weights: &[f64]) -> Result<FeatureSet> {
    check_sources(sources)?;
    let normalized = sources.iter().map(normalize_features).collect::<Result<Vec<_>>>()?;
    let fused = crate::pipeline::fuse(&normalized, weights)?;
    let labels = sources.iter().find_map(|s| s.labels.clone());
    FeatureSet::new("fused", fused, labels)
}

/// Per-class mean vectors; prediction picks the nearest in Euclidean distance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NearestCentroid {
    centroids: Vec<Vec<f64>>,
}

impl NearestCentroid {
    /// Classes are 0..=max(labels); each needs at least one sample.
    pub fn fit(features: &Matrix, labels: &[usize]) -> Result<Self> {
        if labels.len() != features.rows() {
            return Err(Error::LengthMismatch {
                what: "labels vs samples",
                expected: features.rows(),
                actual: labels.len(),
            });
        }
        let classes = labels.iter().max().map_or(0, |m| m + 1);
        let mut sums = vec![vec![0.0; features.cols()]; classes];
        let mut counts = vec![0usize; classes];
        for (i, &c) in labels.iter().enumerate() {
            counts[c] += 1;
            for (s, v) in sums[c].iter_mut().zip(features.row(i)) {
                *s += v;
            }
        }
        if let Some(c) = counts.iter().position(|&n| n == 0) {
            return Err(Error::EmptyClass(c));
        }
        if classes == 0 {
            return Err(Error::EmptyClass(0));
        }
        for (s, &n) in sums.iter_mut().zip(&counts) {
            s.iter_mut().for_each(|v| *v /= n as f64);
        }
        Ok(Self { centroids: sums })
    }

    pub fn centroids(&self) -> &[Vec<f64>] {
        &self.centroids
    }

    pub fn predict_one(&self, x: &[f64]) -> usize {
        let mut best = (0, f64::INFINITY);
        for (c, centroid) in self.centroids.iter().enumerate() {
            let d: f64 = centroid.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
            if d < best.1 {
                best = (c, d);
            }
        }
        best.0
    }

    pub fn predict(&self, features: &Matrix) -> Vec<usize> {
        (0..features.rows()).map(|i| self.predict_one(features.row(i))).collect()
    }
}

/// Rows are true classes, columns predicted classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new(classes: usize) -> Self {
        Self {
            counts: vec![vec![0; classes]; classes],
        }
    }

    pub fn from_counts(counts: Vec<Vec<u64>>) -> Result<Self> {
        let c = counts.len();
        if let Some(r) = counts.iter().find(|r| r.len() != c) {
            return Err(Error::LengthMismatch {
                what: "confusion matrix row",
                expected: c,
                actual: r.len(),
            });
        }
        Ok(Self { counts })
    }

    pub fn from_predictions(truth: &[usize], predicted: &[usize], classes: usize) -> Result<Self> {
        if truth.len() != predicted.len() {
            return Err(Error::LengthMismatch {
                what: "predictions vs truth",
                expected: truth.len(),
                actual: predicted.len(),
            });
        }
        let mut cm = Self::new(classes);
        for (&t, &p) in truth.iter().zip(predicted) {
            if t >= classes || p >= classes {
                return Err(Error::InvalidParameter(format!(
                    "class id {} outside 0..{classes}",
                    t.max(p)
                )));
            }
            cm.counts[t][p] += 1;
        }
        Ok(cm)
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn classes(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }
}

/// A ratio that may be undefined (zero denominator). Serialises as a
/// number or the string "undefined".
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metric(pub Option<f64>);

impl Metric {
    fn ratio(num: f64, den: f64) -> Self {
        Self((den > 0.0).then(|| num / den))
    }

    pub fn value(self) -> Option<f64> {
        self.0
    }
}

impl Serialize for Metric {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0 {
            Some(v) => s.serialize_f64(v),
            None => s.serialize_str("undefined"),
        }
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.0 {
            Some(v) => write!(f, "{v:.6}"),
            None => f.write_str("undefined"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassMetrics {
    pub class: usize,
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub accuracy: Metric,
    pub sensitivity: Metric,
    pub specificity: Metric,
    pub precision: Metric,
    pub f1: Metric,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MacroMetrics {
    pub accuracy: Metric,
    pub sensitivity: Metric,
    pub specificity: Metric,
    pub precision: Metric,
    pub f1: Metric,
    /// True when some per-class value was undefined and left out.
    pub undefined_excluded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub confusion: ConfusionMatrix,
    pub per_class: Vec<ClassMetrics>,
    #[serde(rename = "macro")]
    pub macro_avg: MacroMetrics,
    /// Share of samples on the diagonal.
    pub overall_accuracy: f64,
    pub kappa: Metric,
}

pub fn score(cm: &ConfusionMatrix) -> Result<MetricsReport> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::EmptyConfusion);
    }
    let n = total as f64;
    let c = cm.classes();
    let row = |k: usize| cm.counts[k].iter().sum::<u64>();
    let col = |k: usize| cm.counts.iter().map(|r| r[k]).sum::<u64>();

    let per_class: Vec<ClassMetrics> = (0..c)
        .map(|k| {
            let tp = cm.counts[k][k];
            let fn_ = row(k) - tp;
            let fp = col(k) - tp;
            let tn = total - tp - fn_ - fp;
            let (tpf, tnf, fpf, fnf) = (tp as f64, tn as f64, fp as f64, fn_ as f64);
            let precision = Metric::ratio(tpf, tpf + fpf);
            let sensitivity = Metric::ratio(tpf, tpf + fnf);
            let f1 = match (precision.0, sensitivity.0) {
                (Some(p), Some(r)) => Metric::ratio(2.0 * p * r, p + r),
                _ => Metric(None),
            };
            ClassMetrics {
                class: k,
                tp,
                tn,
                fp,
                fn_,
                accuracy: Metric::ratio(tpf + tnf, n),
                sensitivity,
                specificity: Metric::ratio(tnf, tnf + fpf),
                precision,
                f1,
            }
        })
        .collect();

    let mut undefined_excluded = false;
    let mut mean = |get: fn(&ClassMetrics) -> Metric| {
        let defined: Vec<f64> = per_class.iter().filter_map(|m| get(m).0).collect();
        if defined.len() < per_class.len() {
            undefined_excluded = true;
        }
        Metric((!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64))
    };
    let macro_avg = MacroMetrics {
        accuracy: mean(|m| m.accuracy),
        sensitivity: mean(|m| m.sensitivity),
        specificity: mean(|m| m.specificity),
        precision: mean(|m| m.precision),
        f1: mean(|m| m.f1),
        undefined_excluded,
    };

    let observed = (0..c).map(|k| cm.counts[k][k]).sum::<u64>() as f64 / n;
    let chance: f64 = (0..c).map(|k| row(k) as f64 / n * col(k) as f64 / n).sum();
    let kappa = if chance < 1.0 {
        Metric(Some((observed - chance) / (1.0 - chance)))
    } else {
        Metric(None)
    };

    Ok(MetricsReport {
        confusion: cm.clone(),
        per_class,
        macro_avg,
        overall_accuracy: observed,
        kappa,
    })
}

/// Stratified split: in each class, `round(fraction · count)` samples go to
/// the test side, keeping at least one training sample per class.
pub fn train_test_split(labels: &[usize], test_fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let classes = labels.iter().max().map_or(0, |m| m + 1);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for c in 0..classes {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c).collect();
        idx.shuffle(&mut rng);
        let n_test = ((test_fraction * idx.len() as f64).round() as usize).min(idx.len().saturating_sub(1));
        test.extend_from_slice(&idx[..n_test]);
        train.extend_from_slice(&idx[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

fn select_rows(m: &Matrix, rows: &[usize]) -> Matrix {
    let data: Vec<&[f64]> = rows.iter().map(|&r| m.row(r)).collect();
    Matrix::from_rows(&data).expect("rows of one matrix")
}

/// Fits nearest-centroid on `train` and scores it on `test`.
pub fn evaluate(set: &FeatureSet, train: &[usize], test: &[usize]) -> Result<MetricsReport> {
    let labels = set.labels().ok_or_else(|| {
        Error::InvalidParameter(format!("source `{}` has no labels to evaluate against", set.source_id))
    })?;
    let classes = labels.iter().max().map_or(0, |m| m + 1);
    let pick = |rows: &[usize]| rows.iter().map(|&r| labels[r]).collect::<Vec<_>>();
    let model = NearestCentroid::fit(&select_rows(&set.features, train), &pick(train))?;
    let predicted = model.predict(&select_rows(&set.features, test));
    score(&ConfusionMatrix::from_predictions(&pick(test), &predicted, classes)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SourceMetrics {
    pub source_id: String,
    pub metrics: MetricsReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FusionReport {
    pub config: FusionConfig,
    pub plan: FusionPlan,
    pub train_samples: usize,
    pub test_samples: usize,
    /// Absent when the sources carry no labels.
    pub fused_metrics: Option<MetricsReport>,
    /// Each source alone, normalised, under the same split.
    pub source_metrics: Vec<SourceMetrics>,
    #[serde(skip)]
    pub fused: FeatureSet,
}

/// Weights, fused features and, with labels, evaluation on a seeded split.
pub fn run_fusion(sources: &[FeatureSet], cfg: &FusionConfig) -> Result<FusionReport> {
    let plan = estimate_fusion_weights(sources, cfg)?;
    let fused = fuse_features(sources, &plan.weights)?;
    let (mut train_samples, mut test_samples) = (0, 0);
    let mut fused_metrics = None;
    let mut source_metrics = Vec::new();
    if let Some(labels) = fused.labels() {
        let (train, test) = train_test_split(labels, cfg.test_fraction, cfg.seed);
        train_samples = train.len();
        test_samples = test.len();
        if !test.is_empty() {
            fused_metrics = Some(evaluate(&fused, &train, &test)?);
            for s in sources {
                let alone = FeatureSet::new(s.source_id.clone(), normalize_features(s)?, Some(labels.to_vec()))?;
                source_metrics.push(SourceMetrics {
                    source_id: s.source_id.clone(),
                    metrics: evaluate(&alone, &train, &test)?,
                });
            }
        }
    }
    Ok(FusionReport {
        config: cfg.clone(),
        plan,
        train_samples,
        test_samples,
        fused_metrics,
        source_metrics,
        fused,
    })
}

/// Three-source benchmark: an informative source, a noisy copy of it with
/// sparse outliers, and pure noise with matching column scales.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SyntheticConfig {
    pub samples: usize,
    pub dims: usize,
    pub classes: usize,
    /// Standard deviation of the class centroids.
    pub centroid_scale: f64,
    /// Dense noise added to the copy.
    pub copy_noise: f64,
    /// Share of the copy's cells that receive an outlier.
    pub outlier_fraction: f64,
    pub outlier_scale: f64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            samples: 240,
            dims: 16,
            classes: 3,
            centroid_scale: 1.0,
            copy_noise: 0.2,
            outlier_fraction: 0.1,
            outlier_scale: 3.0,
        }
    }
}

pub const SYNTHETIC_SOURCES: [&str; 3] = ["informative", "noisy_copy", "pure_noise"];

pub fn synthetic_sources(cfg: &SyntheticConfig, seed: u64) -> Result<Vec<FeatureSet>> {
    if cfg.classes < 2 || cfg.samples < cfg.classes || cfg.dims == 0 {
        return Err(Error::InvalidParameter(format!(
            "synthetic benchmark needs ≥ 2 classes, ≥ 1 sample per class and ≥ 1 dimension, got {cfg:?}"
        )));
    }
    let normal = |sd: f64| Normal::new(0.0, sd).map_err(|e| Error::InvalidParameter(e.to_string()));
    let (unit, centroid, copy, outlier) = (
        normal(1.0)?,
        normal(cfg.centroid_scale)?,
        normal(cfg.copy_noise)?,
        normal(cfg.outlier_scale)?,
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, d) = (cfg.samples, cfg.dims);

    // every class appears at least once, the rest uniformly at random
    let mut labels: Vec<usize> = (0..n).map(|i| if i < cfg.classes { i } else { rng.gen_range(0..cfg.classes) }).collect();
    labels.shuffle(&mut rng);
    let centroids: Vec<Vec<f64>> = (0..cfg.classes)
        .map(|_| (0..d).map(|_| centroid.sample(&mut rng)).collect())
        .collect();

    let mut informative = Matrix::zeros(n, d);
    for i in 0..n {
        for j in 0..d {
            informative[(i, j)] = centroids[labels[i]][j] + unit.sample(&mut rng);
        }
    }
    let mut noisy = informative.clone();
    for v in noisy.as_mut_slice() {
        *v += copy.sample(&mut rng);
        if rng.gen::<f64>() < cfg.outlier_fraction {
            *v += outlier.sample(&mut rng);
        }
    }
    let mut noise = Matrix::zeros(n, d);
    for j in 0..d {
        let col = informative.column(j);
        let mean = col.iter().sum::<f64>() / n as f64;
        let sd = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
        for i in 0..n {
            noise[(i, j)] = unit.sample(&mut rng) * sd;
        }
    }

    [informative, noisy, noise]
        .into_iter()
        .zip(SYNTHETIC_SOURCES)
        .map(|(m, id)| FeatureSet::new(id, m, Some(labels.clone())))
        .collect()
}
