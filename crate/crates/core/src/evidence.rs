//! Dempster–Shafer primitives: frames of discernment, mass functions,
//! belief / plausibility, Dempster's rule and the normalised
//! belief-plus-plausibility distribution (WPBl) consumed by the belief
//! divergences.
//!
//! Focal elements are [`Subset`]s of an indexed frame, stored as a bitset so
//! that cardinality and inclusion tests are word operations.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Tolerance used when checking that a mass function sums to one.
pub const MASS_SUM_TOLERANCE: f64 = 1e-9;

/// Ordered set of mutually exclusive hypotheses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameOfDiscernment {
    elements: Vec<String>,
}

impl FrameOfDiscernment {
    pub fn new<I, S>(elements: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let elements: Vec<String> = elements.into_iter().map(Into::into).collect();
        if elements.is_empty() {
            return Err(Error::EmptyFrame);
        }
        let mut seen = HashSet::with_capacity(elements.len());
        for e in &elements {
            if !seen.insert(e.as_str()) {
                return Err(Error::DuplicateElement(e.clone()));
            }
        }
        Ok(Self { elements })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == label)
    }

    /// The proposition made of the named elements.
    pub fn subset<S: AsRef<str>>(&self, labels: &[S]) -> Result<Subset> {
        labels
            .iter()
            .map(|l| {
                self.index_of(l.as_ref())
                    .ok_or_else(|| Error::UnknownElement(l.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>>>()
            .map(Subset::from_indices)
    }

    /// Ω itself.
    pub fn full(&self) -> Subset {
        Subset::full(self.len())
    }

    /// Every singleton proposition, in frame order.
    pub fn singletons(&self) -> Vec<Subset> {
        (0..self.len()).map(Subset::singleton).collect()
    }

    fn check(&self, u: &Subset) -> Result<()> {
        match u.max_index() {
            Some(index) if index >= self.len() => Err(Error::OutsideFrame {
                index,
                size: self.len(),
            }),
            _ => Ok(()),
        }
    }
}

/// A subset of an indexed frame, encoded as a bitset.
///
/// Trailing zero words are trimmed so equal sets compare equal.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset {
    words: Vec<u64>,
}

impl Subset {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn singleton(index: usize) -> Self {
        Self::from_indices([index])
    }

    pub fn full(n: usize) -> Self {
        Self::from_indices(0..n)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        let mut words = Vec::new();
        for i in indices {
            let (w, b) = (i / 64, i % 64);
            if words.len() <= w {
                words.resize(w + 1, 0);
            }
            words[w] |= 1u64 << b;
        }
        let mut s = Self { words };
        s.trim();
        s
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn contains(&self, index: usize) -> bool {
        self.words
            .get(index / 64)
            .is_some_and(|w| w & (1u64 << (index % 64)) != 0)
    }

    /// Cardinality |A|.
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(i, w)| w & !other.words.get(i).copied().unwrap_or(0) == 0)
    }

    pub fn intersection(&self, other: &Subset) -> Subset {
        let mut s = Subset {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        };
        s.trim();
        s
    }

    pub fn intersects(&self, other: &Subset) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    /// Complement with respect to a frame of `n` elements.
    pub fn complement(&self, n: usize) -> Subset {
        Subset::from_indices((0..n).filter(|&i| !self.contains(i)))
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &bits)| {
            (0..64)
                .filter(move |b| bits & (1u64 << b) != 0)
                .map(move |b| w * 64 + b)
        })
    }

    pub fn max_index(&self) -> Option<usize> {
        self.words
            .last()
            .map(|w| (self.words.len() - 1) * 64 + 63 - w.leading_zeros() as usize)
    }
}

/// Read access shared by proper and relaxed mass functions.
pub trait MassFunction {
    fn frame(&self) -> &FrameOfDiscernment;

    /// Focal elements with their (positive) masses.
    fn masses(&self) -> &BTreeMap<Subset, f64>;

    fn mass(&self, u: &Subset) -> f64 {
        self.masses().get(u).copied().unwrap_or(0.0)
    }

    /// Bel(U): total mass of focal elements contained in `u`.
    fn belief(&self, u: &Subset) -> Result<f64> {
        self.frame().check(u)?;
        Ok(self
            .masses()
            .iter()
            .filter(|(a, _)| a.is_subset_of(u))
            .map(|(_, m)| m)
            .sum())
    }

    /// Pl(U): total mass of focal elements meeting `u`.
    fn plausibility(&self, u: &Subset) -> Result<f64> {
        self.frame().check(u)?;
        Ok(self
            .masses()
            .iter()
            .filter(|(a, _)| a.intersects(u))
            .map(|(_, m)| m)
            .sum())
    }
}

fn collect_masses<I>(frame: &FrameOfDiscernment, entries: I) -> Result<BTreeMap<Subset, f64>>
where
    I: IntoIterator<Item = (Subset, f64)>,
{
    let mut masses = BTreeMap::new();
    for (focal, mass) in entries {
        if focal.is_empty() {
            if mass == 0.0 {
                continue;
            }
            return Err(Error::EmptyFocalElement);
        }
        frame.check(&focal)?;
        if !(0.0..=1.0).contains(&mass) {
            return Err(Error::MassOutOfRange { mass });
        }
        if mass > 0.0 {
            *masses.entry(focal).or_insert(0.0) += mass;
        }
    }
    if let Some((_, &m)) = masses.iter().find(|(_, &m)| m > 1.0 + MASS_SUM_TOLERANCE) {
        return Err(Error::MassOutOfRange { mass: m });
    }
    Ok(masses)
}

/// Basic probability assignment: m(∅) = 0 and the masses sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Bpa {
    frame: Arc<FrameOfDiscernment>,
    masses: BTreeMap<Subset, f64>,
}

impl Bpa {
    pub fn new<I>(frame: Arc<FrameOfDiscernment>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Subset, f64)>,
    {
        let masses = collect_masses(&frame, entries)?;
        let sum: f64 = masses.values().sum();
        if (sum - 1.0).abs() > MASS_SUM_TOLERANCE {
            return Err(Error::MassSum {
                sum,
                tolerance: MASS_SUM_TOLERANCE,
            });
        }
        Ok(Self { frame, masses })
    }

    /// Convenience constructor from element labels.
    pub fn from_labels(frame: Arc<FrameOfDiscernment>, entries: &[(&[&str], f64)]) -> Result<Self> {
        let entries = entries
            .iter()
            .map(|(labels, m)| Ok((frame.subset(labels)?, *m)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(frame, entries)
    }

    pub fn frame_arc(&self) -> &Arc<FrameOfDiscernment> {
        &self.frame
    }
}

impl MassFunction for Bpa {
    fn frame(&self) -> &FrameOfDiscernment {
        &self.frame
    }

    fn masses(&self) -> &BTreeMap<Subset, f64> {
        &self.masses
    }
}

/// Mass function whose masses lie in [0, 1] but need not sum to one.
///
/// The per-alternative rows of a column-normalised BPA tensor are of this
/// kind; Bel, Pl and WPBl are applied to them verbatim.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoBpa {
    frame: Arc<FrameOfDiscernment>,
    masses: BTreeMap<Subset, f64>,
}

impl PseudoBpa {
    pub fn new<I>(frame: Arc<FrameOfDiscernment>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Subset, f64)>,
    {
        let masses = collect_masses(&frame, entries)?;
        Ok(Self { frame, masses })
    }

    /// Masses on the singletons of `frame`, in frame order.
    pub fn from_singletons(frame: Arc<FrameOfDiscernment>, masses: &[f64]) -> Result<Self> {
        if masses.len() != frame.len() {
            return Err(Error::LengthMismatch {
                what: "singleton masses",
                expected: frame.len(),
                actual: masses.len(),
            });
        }
        let entries: Vec<_> = masses
            .iter()
            .enumerate()
            .map(|(i, &m)| (Subset::singleton(i), m))
            .collect();
        Self::new(frame, entries)
    }
}

impl From<Bpa> for PseudoBpa {
    fn from(b: Bpa) -> Self {
        Self {
            frame: b.frame,
            masses: b.masses,
        }
    }
}

impl MassFunction for PseudoBpa {
    fn frame(&self) -> &FrameOfDiscernment {
        &self.frame
    }

    fn masses(&self) -> &BTreeMap<Subset, f64> {
        &self.masses
    }
}

fn render(frame: &FrameOfDiscernment, masses: &BTreeMap<Subset, f64>, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let mut focal: Vec<_> = masses.iter().collect();
    focal.sort_by_key(|(s, _)| (s.len(), s.indices().collect::<Vec<_>>()));
    for (s, m) in focal {
        let names: Vec<&str> = s.indices().map(|i| frame.elements()[i].as_str()).collect();
        writeln!(f, "{{{}}}: {:.6}", names.join(","), m)?;
    }
    Ok(())
}

/// One focal element per line, `{a,b}: 0.400000`, sorted by cardinality then
/// element index.
impl fmt::Display for Bpa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render(&self.frame, &self.masses, f)
    }
}

impl fmt::Display for PseudoBpa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render(&self.frame, &self.masses, f)
    }
}

/// Result of Dempster's rule together with the conflict coefficient K.
#[derive(Debug, Clone, PartialEq)]
pub struct Combination {
    pub bpa: Bpa,
    pub conflict: f64,
}

/// Normalised conjunctive combination m1 ⊕ m2.
pub fn dempster_combine(b1: &Bpa, b2: &Bpa) -> Result<Combination> {
    if b1.frame != b2.frame {
        return Err(Error::FrameMismatch);
    }
    let mut joint: BTreeMap<Subset, f64> = BTreeMap::new();
    let mut conflict = 0.0;
    for (a1, m1) in &b1.masses {
        for (a2, m2) in &b2.masses {
            let meet = a1.intersection(a2);
            if meet.is_empty() {
                conflict += m1 * m2;
            } else {
                *joint.entry(meet).or_insert(0.0) += m1 * m2;
            }
        }
    }
    let agreement = 1.0 - conflict;
    if agreement <= 1e-12 {
        return Err(Error::TotalConflict);
    }
    for m in joint.values_mut() {
        *m /= agreement;
    }
    Ok(Combination {
        bpa: Bpa {
            frame: Arc::clone(&b1.frame),
            masses: joint,
        },
        conflict,
    })
}

/// Normalised (Bel + Pl) over an ordered proposition list.
#[derive(Debug, Clone, PartialEq)]
pub struct WpblDistribution {
    values: Vec<f64>,
}

impl WpblDistribution {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// WPBl(A_i) = (Bel(A_i) + Pl(A_i)) / Σ_j (Bel(A_j) + Pl(A_j)).
pub fn wpbl<M: MassFunction + ?Sized>(m: &M, propositions: &[Subset]) -> Result<WpblDistribution> {
    if propositions.is_empty() {
        return Err(Error::NoPropositions);
    }
    let raw = propositions
        .iter()
        .map(|a| Ok(m.belief(a)? + m.plausibility(a)?))
        .collect::<Result<Vec<f64>>>()?;
    let total: f64 = raw.iter().sum();
    if total <= 0.0 {
        return Err(Error::DegenerateEvidence);
    }
    Ok(WpblDistribution {
        values: raw.into_iter().map(|v| v / total).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ab() -> Arc<FrameOfDiscernment> {
        Arc::new(FrameOfDiscernment::new(["a", "b"]).unwrap())
    }

    #[test]
    fn frame_rejects_duplicates_and_empty() {
        assert_eq!(
            FrameOfDiscernment::new(["x", "y", "x"]).unwrap_err(),
            Error::DuplicateElement("x".into())
        );
        assert_eq!(
            FrameOfDiscernment::new(Vec::<String>::new()).unwrap_err(),
            Error::EmptyFrame
        );
    }

    #[test]
    fn subset_bitset_ops_beyond_one_word() {
        let s = Subset::from_indices([3, 70, 130]);
        assert_eq!(s.len(), 3);
        assert!(s.contains(70) && !s.contains(71));
        assert_eq!(s.max_index(), Some(130));
        assert_eq!(s.indices().collect::<Vec<_>>(), vec![3, 70, 130]);
        let t = Subset::from_indices([70, 200]);
        assert_eq!(s.intersection(&t), Subset::singleton(70));
        assert!(Subset::singleton(130).is_subset_of(&s));
        assert!(!t.is_subset_of(&s));
        assert_eq!(s.complement(131).len(), 128);
        // canonical form: an intersection that empties the high words trims them
        assert_eq!(Subset::from_indices([130]).intersection(&Subset::singleton(3)), Subset::empty());
    }

    #[test]
    fn belief_examples() {
        let f = ab();
        let b = Bpa::from_labels(f.clone(), &[(&["a"], 0.6), (&["a", "b"], 0.4)]).unwrap();
        assert_abs_diff_eq!(b.belief(&f.subset(&["a"]).unwrap()).unwrap(), 0.6);
        assert_abs_diff_eq!(b.belief(&f.full()).unwrap(), 1.0);
        let c = Bpa::from_labels(f.clone(), &[(&["a"], 0.3), (&["b"], 0.2), (&["a", "b"], 0.5)]).unwrap();
        assert_abs_diff_eq!(c.belief(&f.subset(&["b"]).unwrap()).unwrap(), 0.2);
    }

    #[test]
    fn plausibility_examples() {
        let f = ab();
        let b = Bpa::from_labels(f.clone(), &[(&["a"], 0.6), (&["a", "b"], 0.4)]).unwrap();
        assert_abs_diff_eq!(b.plausibility(&f.subset(&["a"]).unwrap()).unwrap(), 1.0);
        let c = Bpa::from_labels(f.clone(), &[(&["a"], 0.3), (&["b"], 0.2), (&["a", "b"], 0.5)]).unwrap();
        assert_abs_diff_eq!(c.plausibility(&f.subset(&["b"]).unwrap()).unwrap(), 0.7, epsilon = 1e-12);
        assert_abs_diff_eq!(c.plausibility(&f.full()).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn belief_outside_frame_is_domain_error() {
        let f = ab();
        let b = Bpa::from_labels(f.clone(), &[(&["a"], 1.0)]).unwrap();
        assert_eq!(
            b.belief(&Subset::singleton(5)).unwrap_err(),
            Error::OutsideFrame { index: 5, size: 2 }
        );
        assert_eq!(f.subset(&["z"]).unwrap_err(), Error::UnknownElement("z".into()));
    }

    #[test]
    fn bpa_construction_invariants() {
        let f = ab();
        assert!(matches!(
            Bpa::from_labels(f.clone(), &[(&["a"], 0.5)]),
            Err(Error::MassSum { .. })
        ));
        assert!(matches!(
            Bpa::new(f.clone(), [(Subset::empty(), 0.2), (f.full(), 0.8)]),
            Err(Error::EmptyFocalElement)
        ));
        assert!(matches!(
            PseudoBpa::new(f.clone(), [(f.full(), 1.5)]),
            Err(Error::MassOutOfRange { .. })
        ));
        // the relaxed type accepts partial mass
        let p = PseudoBpa::from_singletons(f, &[0.1, 0.2]).unwrap();
        assert_abs_diff_eq!(p.masses().values().sum::<f64>(), 0.3, epsilon = 1e-15);
    }

    #[test]
    fn dempster_identical_certain_evidence() {
        let f = ab();
        let m = Bpa::from_labels(f.clone(), &[(&["a"], 1.0)]).unwrap();
        let c = dempster_combine(&m, &m).unwrap();
        assert_eq!(c.conflict, 0.0);
        assert_abs_diff_eq!(c.bpa.mass(&f.subset(&["a"]).unwrap()), 1.0);
    }

    #[test]
    fn dempster_symmetric_halves() {
        let f = ab();
        let m = Bpa::from_labels(f.clone(), &[(&["a"], 0.5), (&["b"], 0.5)]).unwrap();
        let c = dempster_combine(&m, &m).unwrap();
        assert_abs_diff_eq!(c.conflict, 0.5);
        assert_abs_diff_eq!(c.bpa.mass(&f.subset(&["a"]).unwrap()), 0.5);
        assert_abs_diff_eq!(c.bpa.mass(&f.subset(&["b"]).unwrap()), 0.5);
    }

    #[test]
    fn dempster_against_enumeration() {
        let f = ab();
        let (a, b, ab_) = (Subset::singleton(0), Subset::singleton(1), f.full());
        let m1 = Bpa::new(f.clone(), [(a.clone(), 0.8), (ab_.clone(), 0.2)]).unwrap();
        let m2 = Bpa::new(f.clone(), [(b.clone(), 0.6), (ab_.clone(), 0.4)]).unwrap();
        // the four products: {a}∩{b}=∅ 0.48, {a}∩Ω={a} 0.32, Ω∩{b}={b} 0.12, Ω∩Ω=Ω 0.08
        let k = 0.8 * 0.6;
        let c = dempster_combine(&m1, &m2).unwrap();
        assert_abs_diff_eq!(c.conflict, k, epsilon = 1e-15);
        assert_abs_diff_eq!(c.bpa.mass(&a), 0.8 * 0.4 / (1.0 - k), epsilon = 1e-12);
        assert_abs_diff_eq!(c.bpa.mass(&b), 0.2 * 0.6 / (1.0 - k), epsilon = 1e-12);
        assert_abs_diff_eq!(c.bpa.mass(&ab_), 0.2 * 0.4 / (1.0 - k), epsilon = 1e-12);
    }

    #[test]
    fn dempster_total_conflict() {
        let f = ab();
        let m1 = Bpa::from_labels(f.clone(), &[(&["a"], 1.0)]).unwrap();
        let m2 = Bpa::from_labels(f, &[(&["b"], 1.0)]).unwrap();
        assert_eq!(dempster_combine(&m1, &m2).unwrap_err(), Error::TotalConflict);
    }

    #[test]
    fn dempster_frame_mismatch() {
        let m1 = Bpa::from_labels(ab(), &[(&["a"], 1.0)]).unwrap();
        let other = Arc::new(FrameOfDiscernment::new(["a", "c"]).unwrap());
        let m2 = Bpa::from_labels(other, &[(&["a"], 1.0)]).unwrap();
        assert_eq!(dempster_combine(&m1, &m2).unwrap_err(), Error::FrameMismatch);
    }

    #[test]
    fn wpbl_examples() {
        let f = ab();
        let props = f.singletons();
        let certain = Bpa::from_labels(f.clone(), &[(&["a"], 1.0)]).unwrap();
        assert_eq!(wpbl(&certain, &props).unwrap().values(), &[1.0, 0.0]);
        let vacuous = Bpa::from_labels(f.clone(), &[(&["a", "b"], 1.0)]).unwrap();
        assert_eq!(wpbl(&vacuous, &props).unwrap().values(), &[0.5, 0.5]);
        let mixed = Bpa::from_labels(f, &[(&["a"], 0.3), (&["b"], 0.2), (&["a", "b"], 0.5)]).unwrap();
        let w = wpbl(&mixed, &props).unwrap();
        assert_abs_diff_eq!(w.values()[0], 0.55, epsilon = 1e-12);
        assert_abs_diff_eq!(w.values()[1], 0.45, epsilon = 1e-12);
    }

    #[test]
    fn wpbl_degenerate_and_empty() {
        let f = ab();
        let zero = PseudoBpa::from_singletons(f.clone(), &[0.0, 0.0]).unwrap();
        assert_eq!(wpbl(&zero, &f.singletons()).unwrap_err(), Error::DegenerateEvidence);
        assert_eq!(wpbl(&zero, &[]).unwrap_err(), Error::NoPropositions);
    }

    #[test]
    fn display_is_sorted() {
        let f = ab();
        let b = Bpa::from_labels(f, &[(&["a", "b"], 0.4), (&["b"], 0.35), (&["a"], 0.25)]).unwrap();
        assert_eq!(b.to_string(), "{a}: 0.250000\n{b}: 0.350000\n{a,b}: 0.400000\n");
    }
}
