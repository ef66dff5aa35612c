//! Divergence measures: Kullback–Leibler, Jensen–Shannon and its weighted
//! generalisation, the belief JS divergence between mass functions, and the
//! ordered weighted belief divergences built on WPBl distributions.
//!
//! Conventions: `0 · log(0 / x) = 0`, and a proposition where every WPBl value
//! is zero contributes nothing.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};
use crate::evidence::{wpbl, MassFunction, Subset};

const SUM_TOLERANCE: f64 = 1e-9;

/// Logarithm base used by every divergence in a computation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "e")]
    E,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Two => x.log2(),
            LogBase::E => x.ln(),
        }
    }

    /// log(x / m), computed as log1p((x − m) / m) to keep precision when the
    /// ratio is close to one.
    fn log_ratio(self, x: f64, m: f64) -> f64 {
        let nats = ((x - m) / m).ln_1p();
        match self {
            LogBase::Two => nats / std::f64::consts::LN_2,
            LogBase::E => nats,
        }
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LogBase::Two => "2",
            LogBase::E => "e",
        })
    }
}

fn check_simplex(values: &[f64], what: &str) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidDistribution(format!("{what} is empty")));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::InvalidDistribution(format!("{what} has entry {v}")));
    }
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::InvalidDistribution(format!("{what} sums to {sum}")));
    }
    Ok(())
}

/// Nonnegative vector summing to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_simplex(&values, "probability vector")?;
        Ok(Self(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_simplex(&values, "weight vector")?;
        Ok(Self(values))
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<f64>> for WeightVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<WeightVector> for Vec<f64> {
    fn from(w: WeightVector) -> Self {
        w.0
    }
}

fn same_len(what: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::LengthMismatch {
            what,
            expected,
            actual,
        });
    }
    Ok(())
}

/// Kullback–Leibler divergence I(a, b). Requires b\[i\] = 0 ⇒ a\[i\] = 0.
pub fn kl(a: &ProbabilityVector, b: &ProbabilityVector, base: LogBase) -> Result<f64> {
    same_len("kl operands", a.len(), b.len())?;
    let mut total = 0.0;
    for (i, (&ai, &bi)) in a.0.iter().zip(&b.0).enumerate() {
        if ai == 0.0 {
            continue;
        }
        if bi == 0.0 {
            return Err(Error::DivergenceUndefined { index: i });
        }
        total += ai * base.log(ai / bi);
    }
    Ok(total.max(0.0))
}

/// Jensen–Shannon divergence, as the mean KL of each side to the midpoint.
pub fn js(a: &ProbabilityVector, b: &ProbabilityVector, base: LogBase) -> Result<f64> {
    same_len("js operands", a.len(), b.len())?;
    let mid: Vec<f64> = a.0.iter().zip(&b.0).map(|(x, y)| 0.5 * (x + y)).collect();
    let mid = ProbabilityVector(mid);
    Ok(0.5 * (kl(a, &mid, base)? + kl(b, &mid, base)?))
}

/// Shannon entropy with 0 log 0 = 0.
pub fn entropy(p: &[f64], base: LogBase) -> f64 {
    -p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * base.log(x))
        .sum::<f64>()
}

/// Weighted JS divergence of p distributions: H(Σ wᵢAᵢ) − Σ wᵢ H(Aᵢ).
pub fn generalized_js(dists: &[ProbabilityVector], w: &WeightVector, base: LogBase) -> Result<f64> {
    same_len("distributions vs weights", w.len(), dists.len())?;
    let n = dists.first().map_or(0, |d| d.len());
    for d in dists {
        same_len("distribution", n, d.len())?;
    }
    let mut mix = vec![0.0; n];
    for (d, &wi) in dists.iter().zip(&w.0) {
        for (m, &x) in mix.iter_mut().zip(&d.0) {
            *m += wi * x;
        }
    }
    let inner: f64 = dists
        .iter()
        .zip(&w.0)
        .map(|(d, &wi)| wi * entropy(&d.0, base))
        .sum();
    Ok((entropy(&mix, base) - inner).max(0.0))
}

fn wpbl_vector<M: MassFunction + ?Sized>(m: &M, propositions: &[Subset]) -> Result<ProbabilityVector> {
    Ok(ProbabilityVector(wpbl(m, propositions)?.into_values()))
}

/// Belief Jensen–Shannon divergence: JS between the two WPBl distributions.
pub fn bjs<M1, M2>(m1: &M1, m2: &M2, propositions: &[Subset], base: LogBase) -> Result<f64>
where
    M1: MassFunction + ?Sized,
    M2: MassFunction + ?Sized,
{
    if m1.frame() != m2.frame() {
        return Err(Error::FrameMismatch);
    }
    js(&wpbl_vector(m1, propositions)?, &wpbl_vector(m2, propositions)?, base)
}

/// How the weights of the ordered divergences attach to the inputs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightAttachment {
    /// wᵢ multiplies the i-th largest value at each proposition (σ is taken
    /// per proposition, descending, ties by input index).
    #[default]
    ByRank,
    /// wᵢ multiplies the i-th input distribution throughout.
    BySource,
}

/// Per-proposition summands of the two-distribution weighted divergence.
///
/// Entry j is `Σᵢ wᵢ xᵢⱼ log(xᵢⱼ / (w₁x₁ⱼ + w₂x₂ⱼ))`, with x ordered per
/// [`WeightAttachment`].
pub fn weighted_div_terms(
    a: &[f64],
    b: &[f64],
    w: &WeightVector,
    attachment: WeightAttachment,
    base: LogBase,
) -> Result<Vec<f64>> {
    same_len("pair weights", 2, w.len())?;
    same_len("weighted divergence operands", a.len(), b.len())?;
    let (w1, w2) = (w.0[0], w.0[1]);
    Ok(a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let (first, second) = match attachment {
                WeightAttachment::ByRank if y > x => (y, x),
                _ => (x, y),
            };
            let mix = w1 * first + w2 * second;
            let mut term = 0.0;
            if mix > 0.0 {
                if first > 0.0 {
                    term += w1 * first * base.log_ratio(first, mix);
                }
                if second > 0.0 {
                    term += w2 * second * base.log_ratio(second, mix);
                }
            }
            term
        })
        .collect())
}

/// Two-distribution weighted divergence on raw WPBl vectors: the sum of
/// [`weighted_div_terms`]. With w = (½, ½) this is the JS divergence.
pub fn weighted_div_raw(
    a: &[f64],
    b: &[f64],
    w: &WeightVector,
    attachment: WeightAttachment,
    base: LogBase,
) -> Result<f64> {
    Ok(weighted_div_terms(a, b, w, attachment, base)?
        .iter()
        .sum::<f64>()
        .max(0.0))
}

/// Generalised ordered weighted divergence on raw WPBl vectors, with each
/// proposition's contribution divided by its cardinality.
pub fn generalized_weighted_div_raw(
    dists: &[&[f64]],
    cardinalities: &[usize],
    w: &WeightVector,
    attachment: WeightAttachment,
    base: LogBase,
) -> Result<f64> {
    if dists.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "generalised divergence needs at least 2 distributions, got {}",
            dists.len()
        )));
    }
    same_len("distributions vs weights", w.len(), dists.len())?;
    let n = cardinalities.len();
    for d in dists {
        same_len("distribution", n, d.len())?;
    }
    let mut column = Vec::with_capacity(dists.len());
    let mut total = 0.0;
    for (j, &card) in cardinalities.iter().enumerate() {
        column.clear();
        column.extend(dists.iter().map(|d| d[j]));
        if attachment == WeightAttachment::ByRank {
            // stable sort keeps input order among ties
            column.sort_by(|x, y| y.total_cmp(x));
        }
        let mix: f64 = column.iter().zip(&w.0).map(|(x, wi)| wi * x).sum();
        if mix <= 0.0 {
            continue;
        }
        let term: f64 = column
            .iter()
            .zip(&w.0)
            .filter(|(&x, _)| x > 0.0)
            .map(|(&x, &wi)| wi * x * base.log_ratio(x, mix))
            .sum();
        total += term / card as f64;
    }
    Ok(total.max(0.0))
}

/// Weighted belief divergence between two mass functions.
pub fn weighted_div<M1, M2>(
    m1: &M1,
    m2: &M2,
    propositions: &[Subset],
    w: &WeightVector,
    base: LogBase,
) -> Result<f64>
where
    M1: MassFunction + ?Sized,
    M2: MassFunction + ?Sized,
{
    if m1.frame() != m2.frame() {
        return Err(Error::FrameMismatch);
    }
    let a = wpbl(m1, propositions)?;
    let b = wpbl(m2, propositions)?;
    weighted_div_raw(a.values(), b.values(), w, WeightAttachment::ByRank, base)
}

/// Generalised ordered weighted belief divergence of p ≥ 2 mass functions.
pub fn generalized_weighted_div<M: MassFunction>(
    ms: &[M],
    propositions: &[Subset],
    w: &WeightVector,
    base: LogBase,
) -> Result<f64> {
    generalized_weighted_div_with(ms, propositions, w, WeightAttachment::ByRank, base)
}

/// As [`generalized_weighted_div`] with an explicit weight attachment.
pub fn generalized_weighted_div_with<M: MassFunction>(
    ms: &[M],
    propositions: &[Subset],
    w: &WeightVector,
    attachment: WeightAttachment,
    base: LogBase,
) -> Result<f64> {
    if let Some(first) = ms.first() {
        if ms.iter().any(|m| m.frame() != first.frame()) {
            return Err(Error::FrameMismatch);
        }
    }
    let wpbls = ms
        .iter()
        .map(|m| wpbl(m, propositions).map(|d| d.into_values()))
        .collect::<Result<Vec<_>>>()?;
    let views: Vec<&[f64]> = wpbls.iter().map(Vec::as_slice).collect();
    let cards: Vec<usize> = propositions.iter().map(Subset::len).collect();
    generalized_weighted_div_raw(&views, &cards, w, attachment, base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evidence::{Bpa, FrameOfDiscernment, PseudoBpa};
    use approx::assert_abs_diff_eq;
    use std::sync::Arc;

    fn pv(v: &[f64]) -> ProbabilityVector {
        ProbabilityVector::new(v.to_vec()).unwrap()
    }

    fn ab() -> Arc<FrameOfDiscernment> {
        Arc::new(FrameOfDiscernment::new(["a", "b"]).unwrap())
    }

    #[test]
    fn kl_examples() {
        assert_eq!(kl(&pv(&[0.5, 0.5]), &pv(&[0.5, 0.5]), LogBase::Two).unwrap(), 0.0);
        assert_abs_diff_eq!(kl(&pv(&[1.0, 0.0]), &pv(&[0.5, 0.5]), LogBase::Two).unwrap(), 1.0);
        let direct = 0.7 * 1.4f64.log2() + 0.3 * 0.6f64.log2();
        assert_abs_diff_eq!(
            kl(&pv(&[0.7, 0.3]), &pv(&[0.5, 0.5]), LogBase::Two).unwrap(),
            direct,
            epsilon = 1e-15
        );
    }

    #[test]
    fn kl_support_violation() {
        assert_eq!(
            kl(&pv(&[0.5, 0.5]), &pv(&[1.0, 0.0]), LogBase::E).unwrap_err(),
            Error::DivergenceUndefined { index: 1 }
        );
    }

    #[test]
    fn js_examples() {
        let a = pv(&[0.3, 0.7]);
        assert_eq!(js(&a, &a, LogBase::Two).unwrap(), 0.0);
        assert_abs_diff_eq!(js(&pv(&[1.0, 0.0]), &pv(&[0.0, 1.0]), LogBase::Two).unwrap(), 1.0);
        let (x, y) = (pv(&[0.8, 0.2]), pv(&[0.2, 0.8]));
        let m = pv(&[0.5, 0.5]);
        let oracle = 0.5 * (kl(&x, &m, LogBase::Two).unwrap() + kl(&y, &m, LogBase::Two).unwrap());
        assert_abs_diff_eq!(js(&x, &y, LogBase::Two).unwrap(), oracle, epsilon = 1e-15);
        assert_abs_diff_eq!(js(&y, &x, LogBase::Two).unwrap(), oracle, epsilon = 1e-15);
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(
            js(&pv(&[1.0]), &pv(&[0.5, 0.5]), LogBase::Two),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(ProbabilityVector::new(vec![0.5, 0.6]).is_err());
        assert!(WeightVector::new(vec![-0.5, 1.5]).is_err());
    }

    #[test]
    fn generalized_js_examples() {
        let a = pv(&[0.2, 0.3, 0.5]);
        let w = WeightVector::uniform(3);
        assert_abs_diff_eq!(
            generalized_js(&[a.clone(), a.clone(), a], &w, LogBase::Two).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            generalized_js(&[pv(&[1.0, 0.0]), pv(&[0.0, 1.0])], &WeightVector::uniform(2), LogBase::Two).unwrap(),
            1.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn generalized_js_matches_kl_decomposition() {
        // JS_w = Σ wᵢ KL(Aᵢ ‖ M): an oracle that never evaluates an entropy
        let d = [pv(&[0.1, 0.6, 0.3]), pv(&[0.5, 0.25, 0.25]), pv(&[0.3, 0.3, 0.4])];
        let w = WeightVector::new(vec![0.2, 0.5, 0.3]).unwrap();
        let mix: Vec<f64> = (0..3)
            .map(|j| d.iter().zip(w.as_slice()).map(|(x, wi)| wi * x.as_slice()[j]).sum())
            .collect();
        let mix = pv(&mix);
        let oracle: f64 = d
            .iter()
            .zip(w.as_slice())
            .map(|(x, wi)| wi * kl(x, &mix, LogBase::E).unwrap())
            .sum();
        assert_abs_diff_eq!(generalized_js(&d, &w, LogBase::E).unwrap(), oracle, epsilon = 1e-14);
    }

    #[test]
    fn bjs_examples() {
        let f = ab();
        let props = f.singletons();
        let m = Bpa::from_labels(f.clone(), &[(&["a"], 0.3), (&["b"], 0.2), (&["a", "b"], 0.5)]).unwrap();
        assert_eq!(bjs(&m, &m, &props, LogBase::Two).unwrap(), 0.0);

        let a = Bpa::from_labels(f.clone(), &[(&["a"], 1.0)]).unwrap();
        let b = Bpa::from_labels(f.clone(), &[(&["b"], 1.0)]).unwrap();
        assert_abs_diff_eq!(bjs(&a, &b, &props, LogBase::Two).unwrap(), 1.0, epsilon = 1e-15);

        let even = Bpa::from_labels(f, &[(&["a"], 0.5), (&["b"], 0.5)]).unwrap();
        let oracle = js(&pv(&[0.55, 0.45]), &pv(&[0.5, 0.5]), LogBase::Two).unwrap();
        assert_abs_diff_eq!(bjs(&m, &even, &props, LogBase::Two).unwrap(), oracle, epsilon = 1e-15);
    }

    #[test]
    fn weighted_div_examples() {
        let f = ab();
        let props = f.singletons();
        let m = Bpa::from_labels(f.clone(), &[(&["a"], 0.3), (&["b"], 0.2), (&["a", "b"], 0.5)]).unwrap();
        let even = Bpa::from_labels(f, &[(&["a"], 0.5), (&["b"], 0.5)]).unwrap();
        let w73 = WeightVector::new(vec![0.7, 0.3]).unwrap();
        assert_eq!(weighted_div(&m, &m, &props, &w73, LogBase::Two).unwrap(), 0.0);

        let half = WeightVector::uniform(2);
        assert_abs_diff_eq!(
            weighted_div(&m, &even, &props, &half, LogBase::Two).unwrap(),
            bjs(&m, &even, &props, LogBase::Two).unwrap(),
            epsilon = 1e-15
        );

        // term-by-term: WPBl (0.55, 0.45) vs (0.5, 0.5); w1 goes to the larger value
        let mut oracle = 0.0;
        for (hi, lo) in [(0.55f64, 0.5f64), (0.5, 0.45)] {
            let mix = 0.7 * hi + 0.3 * lo;
            oracle += 0.7 * hi * (hi / mix).log2() + 0.3 * lo * (lo / mix).log2();
        }
        assert_abs_diff_eq!(
            weighted_div(&m, &even, &props, &w73, LogBase::Two).unwrap(),
            oracle,
            epsilon = 1e-15
        );
    }

    #[test]
    fn generalized_weighted_div_examples() {
        let f = Arc::new(FrameOfDiscernment::new(["x", "y", "z"]).unwrap());
        let props = f.singletons();
        let m = |v: &[f64]| PseudoBpa::from_singletons(f.clone(), v).unwrap();
        let same = [m(&[0.1, 0.2, 0.3]), m(&[0.1, 0.2, 0.3]), m(&[0.1, 0.2, 0.3])];
        assert!(generalized_weighted_div(&same, &props, &WeightVector::uniform(3), LogBase::Two).unwrap() < 1e-12);

        let ms = [m(&[0.12, 0.05, 0.31]), m(&[0.02, 0.22, 0.09]), m(&[0.2, 0.2, 0.1])];
        let w = WeightVector::uniform(3);
        // direct summation oracle: WPBl for singletons of a pseudo-BPA is 2m/Σ2m = m/Σm
        let wp: Vec<Vec<f64>> = ms
            .iter()
            .map(|b| {
                let v: Vec<f64> = (0..3).map(|i| b.mass(&Subset::singleton(i))).collect();
                let s: f64 = v.iter().sum();
                v.into_iter().map(|x| x / s).collect()
            })
            .collect();
        let mut oracle = 0.0;
        for j in 0..3 {
            let mix: f64 = wp.iter().map(|d| d[j] / 3.0).sum();
            for d in &wp {
                oracle += d[j] / 3.0 * (d[j] / mix).log2();
            }
        }
        assert_abs_diff_eq!(
            generalized_weighted_div(&ms, &props, &w, LogBase::Two).unwrap(),
            oracle,
            epsilon = 1e-14
        );
    }

    #[test]
    fn cardinality_divides_contribution() {
        let f = ab();
        let m1 = Bpa::from_labels(f.clone(), &[(&["a"], 0.9), (&["b"], 0.1)]).unwrap();
        let m2 = Bpa::from_labels(f.clone(), &[(&["a"], 0.2), (&["b"], 0.8)]).unwrap();
        let w = WeightVector::uniform(2);
        let singles = generalized_weighted_div(&[m1.clone(), m2.clone()], &f.singletons(), &w, LogBase::Two).unwrap();
        // Ω has Bel = Pl = 1 for both; it only rescales the WPBl of the singletons
        let with_frame = {
            let props = [Subset::singleton(0), Subset::singleton(1), f.full()];
            generalized_weighted_div(&[m1, m2], &props, &w, LogBase::Two).unwrap()
        };
        assert!(singles > 0.0 && with_frame > 0.0);
        assert!(with_frame < singles);
    }

    #[test]
    fn too_few_distributions() {
        let w = WeightVector::uniform(1);
        assert!(matches!(
            generalized_weighted_div_raw(&[&[1.0]], &[1], &w, WeightAttachment::ByRank, LogBase::Two),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn zero_columns_contribute_nothing() {
        let w = WeightVector::uniform(2);
        let v = weighted_div_raw(&[0.0, 1.0], &[0.0, 1.0], &w, WeightAttachment::ByRank, LogBase::E).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn log_base_serde_names() {
        assert_eq!(LogBase::Two.to_string(), "2");
        assert_eq!(LogBase::E.to_string(), "e");
    }
}
