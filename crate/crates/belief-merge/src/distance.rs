//! Distance metrics between interpretations and the weighted merge of two bases.

use std::collections::HashSet;
use std::fmt;

use crate::error::MergeError;
use crate::logic::{model_masks, Formula, Interpretation, VariableUniverse};

/// Distance metric between interpretations over a shared universe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    /// 0 when equal, 1 otherwise.
    Drastic,
    /// Number of variables on which the interpretations differ.
    Hamming,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Drastic => write!(f, "drastic"),
            Metric::Hamming => write!(f, "hamming"),
        }
    }
}

impl Metric {
    /// Largest distance the metric can realize over `u`.
    pub fn max_distance(&self, u: &VariableUniverse) -> u64 {
        match self {
            Metric::Drastic => 1,
            Metric::Hamming => u.len() as u64,
        }
    }

    pub(crate) fn mask_distance(&self, a: u64, b: u64) -> u64 {
        match self {
            Metric::Drastic => u64::from(a != b),
            Metric::Hamming => (a ^ b).count_ones() as u64,
        }
    }
}

/// Distance between two interpretations of the same universe.
pub fn model_distance(
    metric: Metric,
    i: &Interpretation,
    j: &Interpretation,
) -> Result<u64, MergeError> {
    if i.universe() != j.universe() {
        return Err(MergeError::Precondition(
            "model_distance requires a shared universe".to_string(),
        ));
    }
    Ok(metric.mask_distance(i.mask(), j.mask()))
}

/// Distance from an interpretation to a base: the minimum distance to any of
/// the base's models within the interpretation's universe.
pub fn base_distance(
    metric: Metric,
    i: &Interpretation,
    base: &Formula,
) -> Result<u64, MergeError> {
    let masks = model_masks(base, i.universe())?;
    if masks.is_empty() {
        return Err(MergeError::Precondition(
            "base_distance requires a satisfiable base".to_string(),
        ));
    }
    let m = i.mask();
    Ok(masks
        .iter()
        .map(|&b| metric.mask_distance(m, b))
        .min()
        .expect("non-empty model list"))
}

/// Pair of positive integer weights for the two bases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WeightPair {
    w1: u64,
    w2: u64,
}

impl WeightPair {
    pub fn new(w1: u64, w2: u64) -> Result<WeightPair, MergeError> {
        if w1 == 0 || w2 == 0 {
            return Err(MergeError::Precondition(
                "weights must be positive".to_string(),
            ));
        }
        Ok(WeightPair { w1, w2 })
    }

    pub fn w1(&self) -> u64 {
        self.w1
    }

    pub fn w2(&self) -> u64 {
        self.w2
    }
}

impl fmt::Display for WeightPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.w1, self.w2)
    }
}

/// Pair of distances from one interpretation to the two bases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DistanceVector {
    pub d1: u64,
    pub d2: u64,
}

impl DistanceVector {
    pub fn new(d1: u64, d2: u64) -> DistanceVector {
        DistanceVector { d1, d2 }
    }
}

impl fmt::Display for DistanceVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.d1, self.d2)
    }
}

/// Weighted sum of a distance vector.
pub fn weighted_distance(w: WeightPair, d: DistanceVector) -> u64 {
    w.w1 * d.d1 + w.w2 * d.d2
}

/// Per-interpretation distance pairs to two bases over a universe, used by the
/// forward merge and by the inverse-weight machinery.
pub(crate) fn distance_table(
    k1: &Formula,
    k2: &Formula,
    metric: Metric,
    u: &VariableUniverse,
) -> Result<Vec<DistanceVector>, MergeError> {
    u.check_enumerable()?;
    let m1 = model_masks(k1, u)?;
    let m2 = model_masks(k2, u)?;
    if m1.is_empty() || m2.is_empty() {
        return Err(MergeError::Precondition(
            "merge requires satisfiable bases".to_string(),
        ));
    }
    let (s1, s2): (HashSet<u64>, HashSet<u64>) =
        (m1.iter().copied().collect(), m2.iter().copied().collect());
    let n = u.len();
    let mut out = Vec::with_capacity(1usize << n);
    for mask in 0..(1u64 << n) {
        let d1 = match metric {
            Metric::Drastic => u64::from(!s1.contains(&mask)),
            Metric::Hamming => m1
                .iter()
                .map(|&b| (mask ^ b).count_ones() as u64)
                .min()
                .unwrap(),
        };
        let d2 = match metric {
            Metric::Drastic => u64::from(!s2.contains(&mask)),
            Metric::Hamming => m2
                .iter()
                .map(|&b| (mask ^ b).count_ones() as u64)
                .min()
                .unwrap(),
        };
        out.push(DistanceVector::new(d1, d2));
    }
    Ok(out)
}

/// Weighted merge of two bases: the interpretations minimizing
/// `w1*d(I,K1) + w2*d(I,K2)`, in lexicographic value-vector order.
///
/// The result is never empty: both bases are satisfiable, so the minimum is
/// attained.
pub fn merge_weighted(
    k1: &Formula,
    k2: &Formula,
    weights: WeightPair,
    metric: Metric,
    u: &VariableUniverse,
) -> Result<Vec<Interpretation>, MergeError> {
    let table = distance_table(k1, k2, metric, u)?;
    let costs: Vec<u64> = table.iter().map(|&d| weighted_distance(weights, d)).collect();
    let best = *costs.iter().min().expect("universe has at least one interpretation");
    Ok(costs
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c == best)
        .map(|(mask, _)| Interpretation::from_mask(u, mask as u64))
        .collect())
}

/// Convenience: masks of the weighted merge result.
pub(crate) fn merge_weighted_masks(
    table: &[DistanceVector],
    weights: WeightPair,
) -> Vec<u64> {
    let costs: Vec<u64> = table.iter().map(|&d| weighted_distance(weights, d)).collect();
    let best = *costs.iter().min().expect("non-empty distance table");
    costs
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c == best)
        .map(|(mask, _)| mask as u64)
        .collect()
}

/// Do the merged models of `(k1, k2, weights, metric)` coincide with the
/// models of `target` over `u`?
pub fn merge_equals(
    k1: &Formula,
    k2: &Formula,
    weights: WeightPair,
    metric: Metric,
    u: &VariableUniverse,
    target: &Formula,
) -> Result<bool, MergeError> {
    let table = distance_table(k1, k2, metric, u)?;
    let merged = merge_weighted_masks(&table, weights);
    let want = model_masks(target, u)?;
    Ok(merged == want)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{models, parse};

    fn setup(k1: &str, k2: &str) -> (Formula, Formula, VariableUniverse) {
        let a = parse(k1).unwrap();
        let b = parse(k2).unwrap();
        let u = VariableUniverse::from_formulas([&a, &b]);
        (a, b, u)
    }

    #[test]
    fn metric_distances() {
        let u = VariableUniverse::new(vec!["a".into(), "b".into(), "c".into()]).unwrap();
        let i = Interpretation::from_mask(&u, 0b101);
        let j = Interpretation::from_mask(&u, 0b011);
        assert_eq!(model_distance(Metric::Hamming, &i, &j).unwrap(), 2);
        assert_eq!(model_distance(Metric::Drastic, &i, &j).unwrap(), 1);
        assert_eq!(model_distance(Metric::Drastic, &i, &i).unwrap(), 0);
        assert_eq!(Metric::Hamming.max_distance(&u), 3);
        assert_eq!(Metric::Drastic.max_distance(&u), 1);
    }

    #[test]
    fn base_distance_is_min_over_models() {
        let (k1, _, u) = setup("a & b", "a");
        let i = Interpretation::from_mask(&u, 0b00);
        assert_eq!(base_distance(Metric::Hamming, &i, &k1).unwrap(), 2);
        let j = Interpretation::from_mask(&u, 0b10);
        assert_eq!(base_distance(Metric::Hamming, &j, &k1).unwrap(), 1);
        assert_eq!(base_distance(Metric::Drastic, &j, &k1).unwrap(), 1);
        let unsat = parse("a & !a").unwrap();
        assert!(base_distance(Metric::Hamming, &i, &unsat).is_err());
    }

    #[test]
    fn weights_must_be_positive() {
        assert!(WeightPair::new(0, 1).is_err());
        assert!(WeightPair::new(1, 0).is_err());
        assert!(WeightPair::new(1, 1).is_ok());
    }

    #[test]
    fn drastic_merge_follows_heavier_base() {
        let (k1, k2, u) = setup("a", "!a & b");
        let w = WeightPair::new(1, 2).unwrap();
        let merged = merge_weighted(&k1, &k2, w, Metric::Drastic, &u).unwrap();
        let expect = models(&k2, &u).unwrap();
        assert_eq!(merged, expect);

        let w = WeightPair::new(2, 1).unwrap();
        let merged = merge_weighted(&k1, &k2, w, Metric::Drastic, &u).unwrap();
        let expect = models(&k1, &u).unwrap();
        assert_eq!(merged, expect);
    }

    #[test]
    fn hamming_merge_balances_bases() {
        let (k1, k2, u) = setup("a", "!a & b");
        let w = WeightPair::new(1, 1).unwrap();
        let merged = merge_weighted(&k1, &k2, w, Metric::Hamming, &u).unwrap();
        let expect = models(&parse("b").unwrap(), &u).unwrap();
        assert_eq!(merged, expect);
    }

    #[test]
    fn scaling_invariance() {
        let (k1, k2, u) = setup("a & b", "!b | c");
        for (w1, w2) in [(1, 1), (1, 2), (3, 2), (5, 1)] {
            let w = WeightPair::new(w1, w2).unwrap();
            let scaled = WeightPair::new(3 * w1, 3 * w2).unwrap();
            for metric in [Metric::Drastic, Metric::Hamming] {
                let a = merge_weighted(&k1, &k2, w, metric, &u).unwrap();
                let b = merge_weighted(&k1, &k2, scaled, metric, &u).unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn consistent_bases_merge_to_their_conjunction() {
        let (k1, k2, u) = setup("a | b", "!a");
        let conj = Formula::and(k1.clone(), k2.clone());
        let expect = models(&conj, &u).unwrap();
        for (w1, w2) in [(1, 1), (1, 4), (7, 2)] {
            let w = WeightPair::new(w1, w2).unwrap();
            for metric in [Metric::Drastic, Metric::Hamming] {
                let merged = merge_weighted(&k1, &k2, w, metric, &u).unwrap();
                assert_eq!(merged, expect);
            }
        }
    }

    #[test]
    fn merge_is_never_empty() {
        let (k1, k2, u) = setup("a & b", "!a & !b");
        let w = WeightPair::new(1, 1).unwrap();
        let merged = merge_weighted(&k1, &k2, w, Metric::Hamming, &u).unwrap();
        assert!(!merged.is_empty());
    }
}
