//! Group decision pipeline: ordered weighted belief and plausibility,
//! pairwise expert divergences, expert weights, fusion and ranking.

use serde::{Deserialize, Serialize};

use crate::divergence::{weighted_div_terms, LogBase, WeightAttachment, WeightVector};
use crate::error::{Error, Result};
use crate::linguistic::{bpa_tensor, membership_matrix, normalize_decision_matrix, BpaTensor, DecisionMatrix, LinguisticConfig};
use crate::matrix::Matrix;

/// How OWA weights over the l sorted term masses are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "kebab-case", deny_unknown_fields)]
pub enum OwaScheme {
    Uniform,
    /// w_f = 2(l − f + 1) / (l(l + 1)).
    LinearDescending,
    /// Maximum-entropy weights with orness θ ∈ (0, 1).
    Orness { theta: f64 },
}

impl std::fmt::Display for OwaScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OwaScheme::Uniform => f.write_str("uniform"),
            OwaScheme::LinearDescending => f.write_str("linear-descending"),
            OwaScheme::Orness { theta } => write!(f, "orness({theta})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OwaWeights {
    pub scheme: OwaScheme,
    pub values: Vec<f64>,
}

/// Σᵢ ((l − i) / (l − 1)) wᵢ, i = 1..l.
pub fn orness(w: &[f64]) -> f64 {
    let l = w.len();
    if l < 2 {
        return 0.5;
    }
    w.iter()
        .enumerate()
        .map(|(i, wi)| (l - 1 - i) as f64 / (l - 1) as f64 * wi)
        .sum()
}

/// wᵢ ∝ exp(λ (l − i) / (l − 1)), shifted to avoid overflow.
fn exponential_weights(lambda: f64, l: usize) -> Vec<f64> {
    let x: Vec<f64> = (0..l).map(|i| lambda * (l - 1 - i) as f64 / (l - 1) as f64).collect();
    let top = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = x.iter().map(|v| (v - top).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

pub fn owa_weights(l: usize, scheme: OwaScheme) -> Result<OwaWeights> {
    if l == 0 {
        return Err(Error::InvalidParameter("OWA needs at least one weight".into()));
    }
    let values = match scheme {
        OwaScheme::Uniform => vec![1.0 / l as f64; l],
        OwaScheme::LinearDescending => {
            let denom = (l * (l + 1)) as f64;
            (1..=l).map(|f| 2.0 * (l - f + 1) as f64 / denom).collect()
        }
        OwaScheme::Orness { theta } => {
            if !(theta > 0.0 && theta < 1.0) {
                return Err(Error::InvalidParameter(format!("orness θ must lie in (0, 1), got {theta}")));
            }
            if l == 1 {
                vec![1.0]
            } else {
                // orness of the exponential family is increasing in λ
                let (mut lo, mut hi) = (-1.0, 1.0);
                while orness(&exponential_weights(lo, l)) > theta {
                    lo *= 2.0;
                }
                while orness(&exponential_weights(hi, l)) < theta {
                    hi *= 2.0;
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if orness(&exponential_weights(mid, l)) < theta {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo <= 1e-15 * hi.abs().max(1.0) {
                        break;
                    }
                }
                exponential_weights(0.5 * (lo + hi), l)
            }
        }
    };
    Ok(OwaWeights { scheme, values })
}

/// OWA of each (alternative, attribute) row of l masses: sort descending
/// (ties by term index) and dot with the weights. Result is p × q.
pub fn ordered_weighted_belief(b: &BpaTensor, w: &OwaWeights) -> Result<Matrix> {
    if w.values.len() != b.terms() {
        return Err(Error::LengthMismatch {
            what: "OWA weights vs term count",
            expected: b.terms(),
            actual: w.values.len(),
        });
    }
    let (p, q) = (b.num_alternatives(), b.num_attributes());
    let mut out = Matrix::zeros(p, q);
    let mut sorted = Vec::with_capacity(b.terms());
    for i in 0..p {
        for j in 0..q {
            sorted.clear();
            sorted.extend_from_slice(b.cell(i, j));
            sorted.sort_by(|x, y| y.total_cmp(x));
            out[(i, j)] = sorted.iter().zip(&w.values).map(|(m, wf)| m * wf).sum();
        }
    }
    Ok(out)
}

fn check_conformable(ms: &[Matrix], what: &str) -> Result<(usize, usize)> {
    let shape = ms.first().map_or((0, 0), Matrix::shape);
    if let Some((k, m)) = ms.iter().enumerate().find(|(_, m)| m.shape() != shape) {
        return Err(Error::ShapeMismatch(format!(
            "{what} {k} is {:?}, expected {:?}",
            m.shape(),
            shape
        )));
    }
    Ok(shape)
}

/// Pl_k = Bel_k / Σ_experts Bel at every cell.
pub fn ordered_weighted_plausibility(bels: &[Matrix]) -> Result<Vec<Matrix>> {
    if bels.len() < 2 {
        return Err(Error::TooFewExperts(bels.len()));
    }
    let (p, q) = check_conformable(bels, "belief matrix")?;
    let mut pls = vec![Matrix::zeros(p, q); bels.len()];
    for i in 0..p {
        for j in 0..q {
            let total: f64 = bels.iter().map(|b| b[(i, j)]).sum();
            if total <= 0.0 {
                return Err(Error::DegenerateCell {
                    alternative: i,
                    attribute: j,
                });
            }
            for (pl, bel) in pls.iter_mut().zip(bels) {
                pl[(i, j)] = bel[(i, j)] / total;
            }
        }
    }
    Ok(pls)
}

/// Which index the WPBl distributions run over.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WpblAxis {
    /// One distribution per alternative, over the attributes; an
    /// alternative's pair divergence is the divergence of its two rows.
    #[default]
    Attributes,
    /// One distribution per attribute, over the alternatives; an
    /// alternative's pair divergence sums its own summands across attributes.
    Alternatives,
}

/// WPBl of one expert: (Bel + Pl) normalised along `axis`. Rows sum to one
/// for [`WpblAxis::Attributes`], columns for [`WpblAxis::Alternatives`].
pub fn expert_wpbl(bel: &Matrix, pl: &Matrix, axis: WpblAxis, expert: usize) -> Result<Matrix> {
    if bel.shape() != pl.shape() {
        return Err(Error::ShapeMismatch(format!(
            "belief {:?} vs plausibility {:?}",
            bel.shape(),
            pl.shape()
        )));
    }
    let (p, q) = bel.shape();
    let mut s = Matrix::zeros(p, q);
    for i in 0..p {
        for j in 0..q {
            s[(i, j)] = bel[(i, j)] + pl[(i, j)];
        }
    }
    match axis {
        WpblAxis::Attributes => {
            for i in 0..p {
                let total: f64 = s.row(i).iter().sum();
                if total <= 0.0 {
                    return Err(Error::DegenerateWpbl { expert, index: i });
                }
                s.row_mut(i).iter_mut().for_each(|v| *v /= total);
            }
        }
        WpblAxis::Alternatives => {
            for j in 0..q {
                let total: f64 = s.column(j).iter().sum();
                if total <= 0.0 {
                    return Err(Error::DegenerateWpbl { expert, index: j });
                }
                for i in 0..p {
                    s[(i, j)] /= total;
                }
            }
        }
    }
    Ok(s)
}

/// Per-alternative divergence between two experts' WPBl matrices.
pub fn pairwise_divergence(
    a: &Matrix,
    b: &Matrix,
    axis: WpblAxis,
    pair_weights: &WeightVector,
    base: LogBase,
) -> Result<Vec<f64>> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch(format!("WPBl {:?} vs {:?}", a.shape(), b.shape())));
    }
    let (p, q) = a.shape();
    match axis {
        WpblAxis::Attributes => (0..p)
            .map(|i| {
                let terms = weighted_div_terms(a.row(i), b.row(i), pair_weights, WeightAttachment::ByRank, base)?;
                Ok(terms.iter().sum::<f64>().max(0.0))
            })
            .collect(),
        WpblAxis::Alternatives => {
            let mut out = vec![0.0; p];
            for j in 0..q {
                let terms = weighted_div_terms(&a.column(j), &b.column(j), pair_weights, WeightAttachment::ByRank, base)?;
                for (o, t) in out.iter_mut().zip(terms) {
                    *o += t;
                }
            }
            Ok(out.into_iter().map(|v| v.max(0.0)).collect())
        }
    }
}

/// Expert pairs (k₁ < k₂) in lexicographic order.
pub fn expert_pairs(k: usize) -> Vec<(usize, usize)> {
    (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).collect()
}

/// How per-alternative pair divergences are aggregated into D_MM.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairAggregation {
    #[default]
    Mean,
    Sum,
}

/// How a D_MM row becomes an expert's average divergence.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpertAveraging {
    /// Row sum divided by the number of experts k.
    #[default]
    DivideByK,
    Sum,
}

/// What to do when an expert's average divergence is zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroDivergencePolicy {
    #[default]
    Error,
    /// Share the whole weight equally among the zero-divergence experts.
    Concentrate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceMatrix {
    pub pairs: Vec<(usize, usize)>,
    /// p × (number of pairs).
    pub pairwise: Matrix,
    /// Per-pair aggregate, in `pairs` order.
    pub pair_aggregates: Vec<f64>,
    /// k × k, symmetric with zero diagonal.
    pub aggregate: Matrix,
}

/// Builds D_MM from per-alternative pair columns laid out as `expert_pairs(k)`.
pub fn divergence_matrix(pairwise: Matrix, k: usize, aggregation: PairAggregation) -> Result<DivergenceMatrix> {
    let pairs = expert_pairs(k);
    if pairwise.cols() != pairs.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} pair columns for {k} experts, expected {}",
            pairwise.cols(),
            pairs.len()
        )));
    }
    let p = pairwise.rows();
    let mut aggregate = Matrix::zeros(k, k);
    let mut pair_aggregates = Vec::with_capacity(pairs.len());
    for (c, &(a, b)) in pairs.iter().enumerate() {
        let sum: f64 = pairwise.column(c).iter().sum();
        let v = match aggregation {
            PairAggregation::Mean if p > 0 => sum / p as f64,
            _ => sum,
        };
        aggregate[(a, b)] = v;
        aggregate[(b, a)] = v;
        pair_aggregates.push(v);
    }
    Ok(DivergenceMatrix {
        pairs,
        pairwise,
        pair_aggregates,
        aggregate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpertWeights {
    /// Average divergence d̃ per expert.
    pub averages: Vec<f64>,
    /// Support 1 / d̃; infinite (serialised as null) when d̃ = 0.
    pub supports: Vec<f64>,
    pub weights: Vec<f64>,
    /// Set when zero-divergence experts took all the weight.
    pub concentrated: bool,
}

impl ExpertWeights {
    /// Expert indices from highest to lowest weight, ties by index.
    pub fn order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.weights.len()).collect();
        idx.sort_by(|&a, &b| self.weights[b].total_cmp(&self.weights[a]));
        idx
    }
}

pub fn expert_weights(dmm: &Matrix, averaging: ExpertAveraging, policy: ZeroDivergencePolicy) -> Result<ExpertWeights> {
    let k = dmm.rows();
    if dmm.cols() != k {
        return Err(Error::ShapeMismatch(format!("D_MM is {:?}, expected square", dmm.shape())));
    }
    if k < 2 {
        return Err(Error::TooFewExperts(k));
    }
    let averages: Vec<f64> = (0..k)
        .map(|i| {
            let s: f64 = dmm.row(i).iter().sum();
            match averaging {
                ExpertAveraging::DivideByK => s / k as f64,
                ExpertAveraging::Sum => s,
            }
        })
        .collect();
    let supports: Vec<f64> = averages
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d } else { f64::INFINITY })
        .collect();
    let zeros: Vec<usize> = (0..k).filter(|&i| averages[i] <= 0.0).collect();
    if let Some(&first) = zeros.first() {
        return match policy {
            ZeroDivergencePolicy::Error => Err(Error::ZeroAverageDivergence { expert: first }),
            ZeroDivergencePolicy::Concentrate => {
                let share = 1.0 / zeros.len() as f64;
                let mut weights = vec![0.0; k];
                for &i in &zeros {
                    weights[i] = share;
                }
                log::warn!("experts {zeros:?} have zero average divergence; weight concentrated on them");
                Ok(ExpertWeights {
                    averages,
                    supports,
                    weights,
                    concentrated: true,
                })
            }
        };
    }
    let total: f64 = supports.iter().sum();
    let weights = supports.iter().map(|s| s / total).collect();
    Ok(ExpertWeights {
        averages,
        supports,
        weights,
        concentrated: false,
    })
}

/// Y = Σ_k W_k Y_k.
pub fn fuse(matrices: &[Matrix], weights: &[f64]) -> Result<Matrix> {
    if matrices.len() != weights.len() {
        return Err(Error::LengthMismatch {
            what: "fusion weights vs matrices",
            expected: matrices.len(),
            actual: weights.len(),
        });
    }
    let (p, q) = check_conformable(matrices, "matrix")?;
    let mut out = Matrix::zeros(p, q);
    for (m, &w) in matrices.iter().zip(weights) {
        for i in 0..p {
            for (o, v) in out.row_mut(i).iter_mut().zip(m.row(i)) {
                *o += w * v;
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingResult {
    pub fused: Matrix,
    /// Column maxima of the fused matrix.
    pub ideal: Vec<f64>,
    /// (yᵢ · x⁺) / ‖x⁺‖.
    pub scores: Vec<f64>,
    /// Alternatives best first, ties by index.
    pub order: Vec<usize>,
}

pub fn rank(fused: &Matrix) -> Result<RankingResult> {
    let (p, q) = fused.shape();
    if p == 0 || q == 0 {
        return Err(Error::ShapeMismatch(format!("cannot rank a {p}×{q} matrix")));
    }
    let ideal: Vec<f64> = (0..q)
        .map(|j| fused.column(j).into_iter().fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let norm = ideal.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::DegenerateRanking);
    }
    let scores: Vec<f64> = (0..p)
        .map(|i| fused.row(i).iter().zip(&ideal).map(|(y, x)| y * x).sum::<f64>() / norm)
        .collect();
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    Ok(RankingResult {
        fused: fused.clone(),
        ideal,
        scores,
        order,
    })
}

/// Every tunable of the pipeline. The default is the configuration
/// calibrated on the recruitment case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub linguistic: LinguisticConfig,
    pub owa: OwaScheme,
    pub log_base: LogBase,
    pub pair_weights: WeightVector,
    pub wpbl_axis: WpblAxis,
    pub pair_aggregation: PairAggregation,
    pub expert_averaging: ExpertAveraging,
    pub zero_divergence: ZeroDivergencePolicy,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            linguistic: LinguisticConfig::default(),
            owa: OwaScheme::Orness { theta: 0.95 },
            log_base: LogBase::Two,
            pair_weights: WeightVector::uniform(2),
            wpbl_axis: WpblAxis::Attributes,
            pair_aggregation: PairAggregation::Mean,
            expert_averaging: ExpertAveraging::DivideByK,
            zero_divergence: ZeroDivergencePolicy::Error,
        }
    }
}

impl PipelineConfig {
    /// Rejects settings that would only fail once a run reaches them.
    pub fn validate(&self) -> Result<()> {
        self.linguistic.validate()?;
        owa_weights(self.linguistic.terms, self.owa)?;
        if self.pair_weights.len() != 2 {
            return Err(Error::InvalidParameter(format!(
                "pair_weights needs exactly 2 entries, got {}",
                self.pair_weights.len()
            )));
        }
        Ok(())
    }
}

/// Stages up to and including the expert weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpertAssessment {
    pub experts: Vec<String>,
    pub alternatives: Vec<String>,
    pub attributes: Vec<String>,
    pub normalized: Vec<Matrix>,
    pub memberships: Vec<Matrix>,
    pub bpas: Vec<Matrix>,
    /// Per expert, (attribute, term) columns whose masses were all zero.
    pub zero_bpa_columns: Vec<Vec<(usize, usize)>>,
    pub owa: OwaWeights,
    pub beliefs: Vec<Matrix>,
    pub plausibilities: Vec<Matrix>,
    pub wpbl: Vec<Matrix>,
    pub divergence: DivergenceMatrix,
    pub weights: ExpertWeights,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineReport {
    pub config: PipelineConfig,
    #[serde(flatten)]
    pub assessment: ExpertAssessment,
    pub ranking: RankingResult,
}

fn check_experts(matrices: &[DecisionMatrix]) -> Result<()> {
    if matrices.len() < 2 {
        return Err(Error::TooFewExperts(matrices.len()));
    }
    let first = &matrices[0];
    for m in &matrices[1..] {
        if m.values().shape() != first.values().shape() {
            return Err(Error::ShapeMismatch(format!(
                "expert `{}` is {:?}, expert `{}` is {:?}",
                m.expert_id(),
                m.values().shape(),
                first.expert_id(),
                first.values().shape()
            )));
        }
        if m.alternatives() != first.alternatives() || m.attributes() != first.attributes() {
            return Err(Error::ShapeMismatch(format!(
                "expert `{}` labels differ from expert `{}`",
                m.expert_id(),
                first.expert_id()
            )));
        }
    }
    let mut ids: Vec<&str> = matrices.iter().map(|m| m.expert_id()).collect();
    ids.sort_unstable();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::ShapeMismatch(format!("duplicate expert id `{}`", w[0])));
    }
    Ok(())
}

/// Normalisation through expert weights.
pub fn assess_experts(matrices: &[DecisionMatrix], cfg: &PipelineConfig) -> Result<ExpertAssessment> {
    check_experts(matrices)?;
    cfg.linguistic.validate()?;
    let owa = owa_weights(cfg.linguistic.terms, cfg.owa)?;

    let normalized = matrices
        .iter()
        .map(normalize_decision_matrix)
        .collect::<Result<Vec<_>>>()?;
    let mut memberships = Vec::with_capacity(matrices.len());
    let mut tensors = Vec::with_capacity(matrices.len());
    for m in &normalized {
        let r = membership_matrix(m, &cfg.linguistic)?;
        tensors.push(bpa_tensor(&r));
        memberships.push(r.values().clone());
    }
    let beliefs = tensors
        .iter()
        .map(|b| ordered_weighted_belief(b, &owa))
        .collect::<Result<Vec<_>>>()?;
    let plausibilities = ordered_weighted_plausibility(&beliefs)?;
    let wpbl = beliefs
        .iter()
        .zip(&plausibilities)
        .enumerate()
        .map(|(k, (b, pl))| expert_wpbl(b, pl, cfg.wpbl_axis, k))
        .collect::<Result<Vec<_>>>()?;

    let k = matrices.len();
    let p = matrices[0].num_alternatives();
    let pairs = expert_pairs(k);
    let mut pairwise = Matrix::zeros(p, pairs.len());
    for (c, &(a, b)) in pairs.iter().enumerate() {
        let col = pairwise_divergence(&wpbl[a], &wpbl[b], cfg.wpbl_axis, &cfg.pair_weights, cfg.log_base)?;
        for (i, v) in col.into_iter().enumerate() {
            pairwise[(i, c)] = v;
        }
    }
    let divergence = divergence_matrix(pairwise, k, cfg.pair_aggregation)?;
    let weights = expert_weights(&divergence.aggregate, cfg.expert_averaging, cfg.zero_divergence)?;

    Ok(ExpertAssessment {
        experts: matrices.iter().map(|m| m.expert_id().to_string()).collect(),
        alternatives: matrices[0].alternatives().to_vec(),
        attributes: matrices[0].attributes().to_vec(),
        normalized: normalized.into_iter().map(|m| m.values().clone()).collect(),
        memberships,
        zero_bpa_columns: tensors.iter().map(|t| t.zero_columns().to_vec()).collect(),
        bpas: tensors.iter().map(|t| t.values().clone()).collect(),
        owa,
        beliefs,
        plausibilities,
        wpbl,
        divergence,
        weights,
    })
}

/// The full pipeline: expert weights, fusion of the normalised matrices and ranking.
pub fn run(matrices: &[DecisionMatrix], cfg: &PipelineConfig) -> Result<PipelineReport> {
    let assessment = assess_experts(matrices, cfg)?;
    let fused = fuse(&assessment.normalized, &assessment.weights.weights)?;
    let ranking = rank(&fused)?;
    Ok(PipelineReport {
        config: cfg.clone(),
        assessment,
        ranking,
    })
}
