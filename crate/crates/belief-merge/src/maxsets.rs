//! Maximal consistent subsets (maxsets) of a profile of bases, the building
//! blocks of prioritized merging: which subsets of sources can be jointly
//! satisfied, which interpretations witness them, and how to manufacture a
//! profile realizing a prescribed maxset family.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::MergeError;
use crate::logic::{
    compile, eval_mask, is_satisfiable, model_masks, Formula, Interpretation, VariableUniverse,
};

/// A set of base indices (0-based) that are jointly satisfiable and maximal
/// with that property.
pub type Maxset = BTreeSet<usize>;

/// The maxsets of a profile, in canonical (lexicographic) order, together
/// with the interpretations realizing each.
#[derive(Debug, Clone)]
pub struct MaxsetFamily {
    sets: Vec<Maxset>,
    witnesses: Vec<Interpretation>,
    model_masks: Vec<Vec<u64>>,
}

impl MaxsetFamily {
    pub fn sets(&self) -> &[Maxset] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// First interpretation (in enumeration order) whose satisfied set is
    /// exactly the maxset at `idx`.
    pub fn witnesses(&self) -> &[Interpretation] {
        &self.witnesses
    }

    /// All interpretation masks whose satisfied set is exactly the maxset at
    /// `idx`; ascending. These are precisely the models of the maxset's
    /// conjunction.
    pub fn model_masks(&self, idx: usize) -> &[u64] {
        &self.model_masks[idx]
    }

    /// Position of a maxset in canonical order.
    pub fn position(&self, m: &Maxset) -> Option<usize> {
        self.sets.binary_search(m).ok()
    }
}

fn validate_bases(bases: &[Formula], u: &VariableUniverse) -> Result<Vec<crate::logic::Compiled>, MergeError> {
    if bases.is_empty() {
        return Err(MergeError::Precondition(
            "a profile needs at least one base".to_string(),
        ));
    }
    u.check_enumerable()?;
    let mut compiled = Vec::with_capacity(bases.len());
    for (i, k) in bases.iter().enumerate() {
        if !is_satisfiable(k)? {
            return Err(MergeError::Precondition(format!(
                "base {} is unsatisfiable",
                i + 1
            )));
        }
        compiled.push(compile(k, u)?);
    }
    Ok(compiled)
}

fn satisfied_set(compiled: &[crate::logic::Compiled], n: usize, mask: u64) -> Maxset {
    compiled
        .iter()
        .enumerate()
        .filter(|(_, c)| eval_mask(c, n, mask))
        .map(|(i, _)| i)
        .collect()
}

/// Computes the maxsets of `bases` by scanning every interpretation of `u`:
/// a subset of bases is jointly satisfiable exactly when it is contained in
/// the satisfied set of some interpretation, so the maximal satisfied sets
/// are the maxsets, and the models of a maxset's conjunction are exactly the
/// interpretations whose satisfied set equals it.
pub fn maxset_family(
    bases: &[Formula],
    u: &VariableUniverse,
) -> Result<MaxsetFamily, MergeError> {
    let compiled = validate_bases(bases, u)?;
    let n = u.len();
    let mut classes: BTreeMap<Maxset, Vec<u64>> = BTreeMap::new();
    for mask in 0..u.interpretation_count()? {
        classes.entry(satisfied_set(&compiled, n, mask)).or_default().push(mask);
    }
    let keys: Vec<&Maxset> = classes.keys().collect();
    let mut sets = Vec::new();
    let mut witnesses = Vec::new();
    let mut model_masks = Vec::new();
    for s in &keys {
        let maximal = !keys.iter().any(|t| s.is_subset(t) && *s != *t);
        if maximal {
            let masks = classes[*s].clone();
            witnesses.push(Interpretation::from_mask(u, masks[0]));
            sets.push((*s).clone());
            model_masks.push(masks);
        }
    }
    Ok(MaxsetFamily {
        sets,
        witnesses,
        model_masks,
    })
}

/// Independent maxset oracle: walks the whole subset lattice, testing each
/// subset's conjunction for satisfiability and keeping the maximal
/// satisfiable ones. Exponential in the number of bases; intended for
/// cross-checking [`maxset_family`] at test scale.
pub fn maxsets_lattice(
    bases: &[Formula],
    u: &VariableUniverse,
) -> Result<Vec<Maxset>, MergeError> {
    validate_bases(bases, u)?;
    let m = bases.len();
    if m > 20 {
        return Err(MergeError::Precondition(format!(
            "lattice oracle limited to 20 bases, got {m}"
        )));
    }
    let mut consistent: Vec<Maxset> = Vec::new();
    for bits in 0u32..(1u32 << m) {
        let subset: Maxset = (0..m).filter(|i| bits >> i & 1 == 1).collect();
        let conj = conj_of(bases, &subset);
        if is_satisfiable(&conj)? {
            consistent.push(subset);
        }
    }
    let mut maximal: Vec<Maxset> = consistent
        .iter()
        .filter(|s| !consistent.iter().any(|t| s.is_subset(t) && *s != t))
        .cloned()
        .collect();
    maximal.sort();
    Ok(maximal)
}

/// Conjunction of the bases selected by a maxset (true for the empty set).
pub fn conj_of(bases: &[Formula], m: &Maxset) -> Formula {
    Formula::and_all(m.iter().map(|&i| bases[i].clone()))
}

/// Whether a target is equivalent to a disjunction of maxset conjunctions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrCheck {
    /// Yes; `selected` are the canonical-order indices of the disjuncts.
    OrOfMaxsets { selected: Vec<usize> },
    /// No; a model of the target violating one of the conditions.
    NotOrOfMaxsets { counterexample: Interpretation },
}

/// Decides whether `r` is equivalent to a disjunction of maxsets of `bases`.
///
/// This holds exactly when every model I of `r` (a) satisfies at least one
/// base, (b) has a satisfied set that is maximal, and (c) every
/// interpretation with the same satisfied set is also a model of `r`. The
/// first model failing any condition (in enumeration order) is returned as
/// the counterexample. An unsatisfiable target is the empty disjunction.
pub fn check_or(
    r: &Formula,
    bases: &[Formula],
    u: &VariableUniverse,
) -> Result<OrCheck, MergeError> {
    let family = maxset_family(bases, u)?;
    let compiled = validate_bases(bases, u)?;
    let n = u.len();
    let r_masks = model_masks(r, u)?;
    let r_set: BTreeSet<u64> = r_masks.iter().copied().collect();
    let mut selected: BTreeSet<usize> = BTreeSet::new();
    for &mask in &r_masks {
        let s = satisfied_set(&compiled, n, mask);
        let pos = if s.is_empty() { None } else { family.position(&s) };
        let Some(pos) = pos else {
            return Ok(OrCheck::NotOrOfMaxsets {
                counterexample: Interpretation::from_mask(u, mask),
            });
        };
        if !selected.contains(&pos) {
            if family.model_masks(pos).iter().any(|m| !r_set.contains(m)) {
                return Ok(OrCheck::NotOrOfMaxsets {
                    counterexample: Interpretation::from_mask(u, mask),
                });
            }
            selected.insert(pos);
        }
    }
    Ok(OrCheck::OrOfMaxsets {
        selected: selected.into_iter().collect(),
    })
}

/// Splits a maxset family into the indices whose conjunction is consistent
/// with `r` (selected) and the rest (excluded).
pub fn split_selected(
    family: &MaxsetFamily,
    r: &Formula,
    u: &VariableUniverse,
) -> Result<(Vec<usize>, Vec<usize>), MergeError> {
    let r_set: BTreeSet<u64> = model_masks(r, u)?.into_iter().collect();
    let mut selected = Vec::new();
    let mut excluded = Vec::new();
    for idx in 0..family.len() {
        if family.model_masks(idx).iter().any(|m| r_set.contains(m)) {
            selected.push(idx);
        } else {
            excluded.push(idx);
        }
    }
    Ok((selected, excluded))
}

fn fresh_var_name(i: usize) -> String {
    match i {
        0 => "x".to_string(),
        1 => "y".to_string(),
        2 => "z".to_string(),
        _ => format!("x{}", i + 1),
    }
}

/// Builds a profile of bases, one per letter, whose maxset family is exactly
/// the given antichain of letter sets.
///
/// With n sets and k = ⌈log₂ n⌉ fresh variables, the i-th set (1-indexed) is
/// assigned the value-(2^k − i) minterm over the fresh variables, and each
/// letter's base is the disjunction of the minterms of the sets containing
/// it. An interpretation equal to the i-th minterm then satisfies exactly
/// the letters of the i-th set, and every other interpretation satisfies no
/// base at all, so the maximal satisfied sets are exactly the input sets.
/// The construction re-derives the maxsets of its output and fails rather
/// than return a profile violating that postcondition.
///
/// Returns (letter, base) pairs, letters in first-occurrence order.
pub fn synthesize(sets: &[Vec<String>]) -> Result<Vec<(String, Formula)>, MergeError> {
    if sets.is_empty() {
        return Err(MergeError::Precondition(
            "synthesize needs at least one set".to_string(),
        ));
    }
    let mut letters: Vec<String> = Vec::new();
    for set in sets {
        if set.is_empty() {
            return Err(MergeError::Precondition(
                "synthesize sets must be non-empty".to_string(),
            ));
        }
        let distinct: BTreeSet<&String> = set.iter().collect();
        if distinct.len() != set.len() {
            return Err(MergeError::Precondition(
                "a synthesize set mentions a letter twice".to_string(),
            ));
        }
        for l in set {
            if !letters.contains(l) {
                letters.push(l.clone());
            }
        }
    }
    let as_sets: Vec<BTreeSet<&String>> = sets.iter().map(|s| s.iter().collect()).collect();
    for i in 0..sets.len() {
        for j in 0..sets.len() {
            if i != j && as_sets[i].is_subset(&as_sets[j]) {
                return Err(MergeError::Precondition(format!(
                    "sets must form an antichain: set {} is contained in set {}",
                    i + 1,
                    j + 1
                )));
            }
        }
    }

    let n = sets.len();
    let k = usize::BITS as usize - (n - 1).leading_zeros() as usize;
    let vars: Vec<String> = (0..k).map(fresh_var_name).collect();
    let minterm = |i: usize| {
        let value = (1u64 << k) - 1 - i as u64;
        Formula::and_all(
            (0..k).map(|j| Formula::literal(vars[j].clone(), value >> (k - 1 - j) & 1 == 1)),
        )
    };
    let formulas: Vec<Formula> = letters
        .iter()
        .map(|l| {
            Formula::or_all(
                sets.iter()
                    .enumerate()
                    .filter(|(_, s)| s.contains(l))
                    .map(|(i, _)| minterm(i)),
            )
        })
        .collect();

    // Postcondition: the produced profile's maxsets are the input sets.
    let u = VariableUniverse::new(vars)?;
    let family = maxset_family(&formulas, &u)?;
    let derived: BTreeSet<BTreeSet<&String>> = family
        .sets()
        .iter()
        .map(|s| s.iter().map(|&i| &letters[i]).collect())
        .collect();
    let wanted: BTreeSet<BTreeSet<&String>> = as_sets.into_iter().collect();
    if derived != wanted {
        return Err(MergeError::Internal(
            "synthesized profile does not realize the requested maxsets".to_string(),
        ));
    }

    Ok(letters.into_iter().zip(formulas).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{equivalent, parse};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn triangle() -> (Vec<Formula>, VariableUniverse) {
        let bases = vec![
            parse("x").unwrap(),
            parse("y").unwrap(),
            parse("!(x <-> y)").unwrap(),
        ];
        let u = VariableUniverse::from_formulas(&bases);
        (bases, u)
    }

    fn ms(indices: &[usize]) -> Maxset {
        indices.iter().copied().collect()
    }

    #[test]
    fn triangle_maxsets() {
        let (bases, u) = triangle();
        let family = maxset_family(&bases, &u).unwrap();
        assert_eq!(family.sets(), &[ms(&[0, 1]), ms(&[0, 2]), ms(&[1, 2])]);
        // Witnesses: x=1,y=1 / x=1,y=0 / x=0,y=1.
        let w: Vec<u64> = family.witnesses().iter().map(|i| i.mask()).collect();
        assert_eq!(w, vec![0b11, 0b10, 0b01]);
        assert_eq!(family.model_masks(0), &[0b11]);
        assert_eq!(maxsets_lattice(&bases, &u).unwrap(), family.sets());
    }

    #[test]
    fn nested_bases_collapse_to_one_maxset() {
        let bases = vec![parse("a").unwrap(), parse("a | b").unwrap()];
        let u = VariableUniverse::from_formulas(&bases);
        let family = maxset_family(&bases, &u).unwrap();
        assert_eq!(family.sets(), &[ms(&[0, 1])]);
    }

    #[test]
    fn contradictory_pair_splits() {
        let bases = vec![parse("a").unwrap(), parse("!a").unwrap()];
        let u = VariableUniverse::from_formulas(&bases);
        let family = maxset_family(&bases, &u).unwrap();
        assert_eq!(family.sets(), &[ms(&[0]), ms(&[1])]);
    }

    #[test]
    fn unsatisfiable_base_is_rejected() {
        let bases = vec![parse("a & !a").unwrap()];
        let u = VariableUniverse::from_formulas(&bases);
        assert!(maxset_family(&bases, &u).is_err());
    }

    #[test]
    fn family_matches_lattice_on_random_profiles() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let vars = ["a", "b", "c"];
        for _ in 0..200 {
            let m = rng.gen_range(1..=4);
            let mut bases = Vec::new();
            while bases.len() < m {
                let f = random_formula(&mut rng, &vars, 3);
                if is_satisfiable(&f).unwrap() {
                    bases.push(f);
                }
            }
            let u = VariableUniverse::from_formulas(bases.iter());
            let family = maxset_family(&bases, &u).unwrap();
            assert_eq!(family.sets(), maxsets_lattice(&bases, &u).unwrap());
        }
    }

    fn random_formula(rng: &mut ChaCha8Rng, vars: &[&str], depth: usize) -> Formula {
        if depth == 0 || rng.gen_bool(0.3) {
            return Formula::literal(vars[rng.gen_range(0..vars.len())], rng.gen_bool(0.5));
        }
        match rng.gen_range(0..4) {
            0 => Formula::and(
                random_formula(rng, vars, depth - 1),
                random_formula(rng, vars, depth - 1),
            ),
            1 => Formula::or(
                random_formula(rng, vars, depth - 1),
                random_formula(rng, vars, depth - 1),
            ),
            2 => Formula::not(random_formula(rng, vars, depth - 1)),
            _ => Formula::implies(
                random_formula(rng, vars, depth - 1),
                random_formula(rng, vars, depth - 1),
            ),
        }
    }

    #[test]
    fn check_or_accepts_maxset_disjunctions() {
        let (bases, u) = triangle();
        match check_or(&parse("x").unwrap(), &bases, &u).unwrap() {
            OrCheck::OrOfMaxsets { selected } => assert_eq!(selected, vec![0, 1]),
            other => panic!("expected or-of-maxsets, got {other:?}"),
        }
        match check_or(&parse("x & y").unwrap(), &bases, &u).unwrap() {
            OrCheck::OrOfMaxsets { selected } => assert_eq!(selected, vec![0]),
            other => panic!("expected or-of-maxsets, got {other:?}"),
        }
    }

    #[test]
    fn check_or_rejects_with_counterexample() {
        let (bases, u) = triangle();
        match check_or(&parse("!x & !y").unwrap(), &bases, &u).unwrap() {
            OrCheck::NotOrOfMaxsets { counterexample } => {
                assert_eq!(counterexample.mask(), 0b00);
            }
            other => panic!("expected rejection, got {other:?}"),
        }
        // A strict subset of a maxset's models is rejected too.
        let bases = vec![parse("a").unwrap(), parse("a | b").unwrap()];
        let u = VariableUniverse::from_formulas(&bases);
        match check_or(&parse("a & b").unwrap(), &bases, &u).unwrap() {
            OrCheck::NotOrOfMaxsets { counterexample } => {
                assert_eq!(counterexample.mask(), 0b11);
            }
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn split_selected_partitions_the_family() {
        let (bases, u) = triangle();
        let family = maxset_family(&bases, &u).unwrap();
        let (sel, exc) = split_selected(&family, &parse("x").unwrap(), &u).unwrap();
        assert_eq!(sel, vec![0, 1]);
        assert_eq!(exc, vec![2]);
    }

    #[test]
    fn synthesize_triangle() {
        let sets = vec![
            vec!["A".to_string(), "B".to_string()],
            vec!["A".to_string(), "C".to_string()],
            vec!["B".to_string(), "C".to_string()],
        ];
        let profile = synthesize(&sets).unwrap();
        let names: Vec<&str> = profile.iter().map(|(l, _)| l.as_str()).collect();
        assert_eq!(names, vec!["A", "B", "C"]);
        assert!(equivalent(&profile[0].1, &parse("x").unwrap()).unwrap());
        assert!(equivalent(&profile[1].1, &parse("y").unwrap()).unwrap());
        assert!(equivalent(&profile[2].1, &parse("!(x <-> y)").unwrap()).unwrap());
    }

    #[test]
    fn synthesize_single_set_gives_tautologies() {
        let sets = vec![vec!["A".to_string(), "B".to_string()]];
        let profile = synthesize(&sets).unwrap();
        for (_, f) in &profile {
            assert!(equivalent(f, &Formula::True).unwrap());
        }
    }

    #[test]
    fn synthesize_rejects_non_antichains() {
        let sets = vec![
            vec!["A".to_string()],
            vec!["A".to_string(), "B".to_string()],
        ];
        assert!(synthesize(&sets).is_err());
        let sets = vec![vec!["A".to_string()], vec!["A".to_string()]];
        assert!(synthesize(&sets).is_err());
    }

    #[test]
    fn conj_of_folds_left() {
        let bases = vec![parse("a").unwrap(), parse("b").unwrap(), parse("c").unwrap()];
        assert_eq!(conj_of(&bases, &ms(&[0, 2])).to_string(), "a & c");
        assert_eq!(conj_of(&bases, &ms(&[])), Formula::True);
    }
}
