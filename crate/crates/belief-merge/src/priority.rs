//! Prioritized merging: bases arranged in priority classes, maxsets compared
//! classwise by containment, and the inverse problem of finding a priority
//! ordering that makes a target the merge result.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::MergeError;
use crate::logic::{entails, is_satisfiable, model_masks, Formula, Interpretation, VariableUniverse};
use crate::maxsets::{conj_of, maxset_family, Maxset, MaxsetFamily};

/// Largest number of bases the brute-force enumeration accepts by default.
pub const BRUTEFORCE_BASE_CAP: usize = 7;

/// An ordered partition of the bases into priority classes; class 1 is the
/// most important.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriorityPartition {
    classes: Vec<BTreeSet<usize>>,
    num_bases: usize,
}

impl PriorityPartition {
    /// Validates that `classes` are non-empty, disjoint, and cover exactly
    /// the base indices `0..num_bases`.
    pub fn new(
        classes: Vec<BTreeSet<usize>>,
        num_bases: usize,
    ) -> Result<PriorityPartition, MergeError> {
        if classes.is_empty() {
            return Err(MergeError::Precondition(
                "a priority partition needs at least one class".to_string(),
            ));
        }
        let mut seen: BTreeSet<usize> = BTreeSet::new();
        for (c, class) in classes.iter().enumerate() {
            if class.is_empty() {
                return Err(MergeError::Precondition(format!(
                    "priority class {} is empty",
                    c + 1
                )));
            }
            for &i in class {
                if i >= num_bases {
                    return Err(MergeError::Precondition(format!(
                        "priority class {} mentions base {} but there are only {}",
                        c + 1,
                        i + 1,
                        num_bases
                    )));
                }
                if !seen.insert(i) {
                    return Err(MergeError::Precondition(format!(
                        "base {} appears in two priority classes",
                        i + 1
                    )));
                }
            }
        }
        if seen.len() != num_bases {
            return Err(MergeError::Precondition(
                "every base must appear in exactly one priority class".to_string(),
            ));
        }
        Ok(PriorityPartition { classes, num_bases })
    }

    /// One class containing every base: no priorities at all.
    pub fn single_class(num_bases: usize) -> Result<PriorityPartition, MergeError> {
        PriorityPartition::new(vec![(0..num_bases).collect()], num_bases)
    }

    pub fn classes(&self) -> &[BTreeSet<usize>] {
        &self.classes
    }

    pub fn num_bases(&self) -> usize {
        self.num_bases
    }

    /// 1-based class number of a base.
    pub fn class_of(&self, base: usize) -> Option<usize> {
        self.classes
            .iter()
            .position(|c| c.contains(&base))
            .map(|p| p + 1)
    }

    /// Classwise-containment comparison of two maxsets: at the first class
    /// where the restrictions differ, the one containing the other is
    /// preferred ([`MaxsetOrder::Less`]); incomparable restrictions make the
    /// maxsets incomparable.
    pub fn compare(&self, l: &Maxset, n: &Maxset) -> MaxsetOrder {
        for class in &self.classes {
            let li: BTreeSet<usize> = l.intersection(class).copied().collect();
            let ni: BTreeSet<usize> = n.intersection(class).copied().collect();
            if li == ni {
                continue;
            }
            return if ni.is_subset(&li) {
                MaxsetOrder::Less
            } else if li.is_subset(&ni) {
                MaxsetOrder::Greater
            } else {
                MaxsetOrder::Incomparable
            };
        }
        MaxsetOrder::Equal
    }
}

impl fmt::Display for PriorityPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, class) in self.classes.iter().enumerate() {
            if c > 0 {
                write!(f, ";")?;
            }
            write!(f, "{}:", c + 1)?;
            for (i, base) in class.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{base}")?;
            }
        }
        Ok(())
    }
}

/// Result of comparing two maxsets under a priority partition. `Less` means
/// the left maxset is preferred.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxsetOrder {
    Less,
    Greater,
    Equal,
    Incomparable,
}

/// Indices of the non-dominated maxsets in `sets`: those no other maxset
/// strictly precedes.
pub fn minimal_maxsets(sets: &[Maxset], partition: &PriorityPartition) -> Vec<usize> {
    (0..sets.len())
        .filter(|&i| {
            !sets
                .iter()
                .any(|other| partition.compare(other, &sets[i]) == MaxsetOrder::Less)
        })
        .collect()
}

/// Model masks of the prioritized merge: the union of the model classes of
/// the minimal maxsets, ascending.
pub fn merge_priority_masks(family: &MaxsetFamily, partition: &PriorityPartition) -> Vec<u64> {
    let minimal = minimal_maxsets(family.sets(), partition);
    let mut masks: Vec<u64> = minimal
        .into_iter()
        .flat_map(|i| family.model_masks(i).iter().copied())
        .collect();
    masks.sort_unstable();
    masks
}

/// Prioritized merge of the bases: the models of the most preferred maxsets'
/// conjunctions. Never empty.
pub fn merge_priority(
    bases: &[Formula],
    partition: &PriorityPartition,
    u: &VariableUniverse,
) -> Result<Vec<Interpretation>, MergeError> {
    if partition.num_bases() != bases.len() {
        return Err(MergeError::Precondition(format!(
            "partition covers {} bases but the profile has {}",
            partition.num_bases(),
            bases.len()
        )));
    }
    let family = maxset_family(bases, u)?;
    Ok(merge_priority_masks(&family, partition)
        .into_iter()
        .map(|m| Interpretation::from_mask(u, m))
        .collect())
}

/// All priority partitions of `m` bases: for each class count k = 1..=m,
/// every surjective labeling onto {1..k} in lexicographic order of the label
/// vector.
pub fn enumerate_partitions(m: usize) -> Result<PartitionIter, MergeError> {
    if m == 0 {
        return Err(MergeError::Precondition(
            "cannot partition zero bases".to_string(),
        ));
    }
    if m > 8 {
        return Err(MergeError::Precondition(format!(
            "partition enumeration limited to 8 bases, got {m}"
        )));
    }
    Ok(PartitionIter {
        m,
        k: 1,
        labels: vec![1; m],
        exhausted: false,
    })
}

/// Iterator over all priority partitions of `m` bases.
pub struct PartitionIter {
    m: usize,
    k: usize,
    labels: Vec<usize>,
    exhausted: bool,
}

impl PartitionIter {
    fn advance(&mut self) {
        // Lexicographic odometer over label vectors with digits 1..=k.
        for i in (0..self.m).rev() {
            if self.labels[i] < self.k {
                self.labels[i] += 1;
                for l in &mut self.labels[i + 1..] {
                    *l = 1;
                }
                return;
            }
        }
        self.k += 1;
        if self.k > self.m {
            self.exhausted = true;
        } else {
            self.labels = vec![1; self.m];
        }
    }
}

impl Iterator for PartitionIter {
    type Item = PriorityPartition;

    fn next(&mut self) -> Option<PriorityPartition> {
        while !self.exhausted {
            let surjective = (1..=self.k).all(|c| self.labels.contains(&c));
            if surjective {
                let classes: Vec<BTreeSet<usize>> = (1..=self.k)
                    .map(|c| {
                        (0..self.m)
                            .filter(|&i| self.labels[i] == c)
                            .collect::<BTreeSet<usize>>()
                    })
                    .collect();
                self.advance();
                return Some(PriorityPartition {
                    classes,
                    num_bases: self.m,
                });
            }
            self.advance();
        }
        None
    }
}

fn check_bruteforce_cap(m: usize, cap: usize) -> Result<(), MergeError> {
    if m > cap {
        return Err(MergeError::Precondition(format!(
            "brute force limited to {cap} bases, got {m}"
        )));
    }
    Ok(())
}

/// First priority partition (in enumeration order) whose merge is equivalent
/// to `r`, or `None` when no partition works.
pub fn invert_priority_bruteforce(
    r: &Formula,
    bases: &[Formula],
    u: &VariableUniverse,
    cap: usize,
) -> Result<Option<PriorityPartition>, MergeError> {
    check_bruteforce_cap(bases.len(), cap)?;
    let family = maxset_family(bases, u)?;
    let want = model_masks(r, u)?;
    for partition in enumerate_partitions(bases.len())? {
        if merge_priority_masks(&family, &partition) == want {
            return Ok(Some(partition));
        }
    }
    Ok(None)
}

/// Every priority partition whose merge is equivalent to `r`, in enumeration
/// order.
pub fn orderings_for(
    r: &Formula,
    bases: &[Formula],
    u: &VariableUniverse,
    cap: usize,
) -> Result<Vec<PriorityPartition>, MergeError> {
    check_bruteforce_cap(bases.len(), cap)?;
    let family = maxset_family(bases, u)?;
    let want = model_masks(r, u)?;
    Ok(enumerate_partitions(bases.len())?
        .filter(|partition| merge_priority_masks(&family, partition) == want)
        .collect())
}

/// First priority partition making exactly `selected` the minimal maxsets
/// among `selected ∪ excluded`, over bases `0..m`.
pub fn obtain_pair(
    selected: &[Maxset],
    excluded: &[Maxset],
    m: usize,
    cap: usize,
) -> Result<Option<PriorityPartition>, MergeError> {
    check_bruteforce_cap(m, cap)?;
    if selected.is_empty() {
        return Err(MergeError::Precondition(
            "at least one maxset must be selected".to_string(),
        ));
    }
    let sel_set: BTreeSet<&Maxset> = selected.iter().collect();
    for e in excluded {
        if sel_set.contains(e) {
            return Err(MergeError::Precondition(
                "a maxset cannot be both selected and excluded".to_string(),
            ));
        }
    }
    let mut all: Vec<Maxset> = Vec::new();
    for s in selected.iter().chain(excluded) {
        if s.iter().any(|&i| i >= m) {
            return Err(MergeError::Precondition(format!(
                "maxset mentions a base outside 0..{m}"
            )));
        }
        if !all.contains(s) {
            all.push(s.clone());
        }
    }
    let wanted: BTreeSet<&Maxset> = selected.iter().collect();
    for partition in enumerate_partitions(m)? {
        let minimal: BTreeSet<&Maxset> = minimal_maxsets(&all, &partition)
            .into_iter()
            .map(|i| &all[i])
            .collect();
        if minimal == wanted {
            return Ok(Some(partition));
        }
    }
    Ok(None)
}

/// Fallback when no ordering yields `r` exactly: the first maxset (in
/// canonical order) consistent with `r`, promoted to a class of its own above
/// everything else, so the merge is that maxset's conjunction — a result
/// consistent with `r`. `None` when every maxset contradicts `r`.
pub fn relax_consistent(
    r: &Formula,
    bases: &[Formula],
    u: &VariableUniverse,
) -> Result<Option<PriorityPartition>, MergeError> {
    let family = maxset_family(bases, u)?;
    let r_set: BTreeSet<u64> = model_masks(r, u)?.into_iter().collect();
    for idx in 0..family.len() {
        if family.model_masks(idx).iter().any(|m| r_set.contains(m)) {
            let top = family.sets()[idx].clone();
            let rest: BTreeSet<usize> = (0..bases.len()).filter(|i| !top.contains(i)).collect();
            let mut classes = vec![top];
            if !rest.is_empty() {
                classes.push(rest);
            }
            let partition = PriorityPartition::new(classes, bases.len())?;
            let minimal = minimal_maxsets(family.sets(), &partition);
            if minimal != vec![idx] {
                return Err(MergeError::Internal(
                    "promoted maxset is not the unique minimal one".to_string(),
                ));
            }
            return Ok(Some(partition));
        }
    }
    Ok(None)
}

/// Fallback accepting any prioritized result: when `r` entails the
/// disjunction of all maxsets, the single-class partition merges to that
/// disjunction, which `r` entails. `None` when some model of `r` lies outside
/// every maxset's models.
pub fn relax_entailed(
    r: &Formula,
    bases: &[Formula],
    u: &VariableUniverse,
) -> Result<Option<PriorityPartition>, MergeError> {
    let family = maxset_family(bases, u)?;
    let covered: BTreeSet<u64> = (0..family.len())
        .flat_map(|i| family.model_masks(i).iter().copied())
        .collect();
    let entails = model_masks(r, u)?.iter().all(|m| covered.contains(m));
    if entails {
        Ok(Some(PriorityPartition::single_class(bases.len())?))
    } else {
        Ok(None)
    }
}

/// Checks that the merge under `partition` is equivalent to `r` — the final
/// verification every obtainable verdict goes through.
pub fn verify_partition(
    r: &Formula,
    bases: &[Formula],
    partition: &PriorityPartition,
    u: &VariableUniverse,
) -> Result<bool, MergeError> {
    let family = maxset_family(bases, u)?;
    Ok(merge_priority_masks(&family, partition) == model_masks(r, u)?)
}

/// The merge as a formula-friendly list plus the maxsets it came from; used
/// by callers that need both.
pub fn merge_with_family(
    bases: &[Formula],
    partition: &PriorityPartition,
    u: &VariableUniverse,
) -> Result<(Vec<Interpretation>, MaxsetFamily, Vec<usize>), MergeError> {
    if partition.num_bases() != bases.len() {
        return Err(MergeError::Precondition(format!(
            "partition covers {} bases but the profile has {}",
            partition.num_bases(),
            bases.len()
        )));
    }
    let family = maxset_family(bases, u)?;
    let minimal = minimal_maxsets(family.sets(), partition);
    let mut masks: Vec<u64> = minimal
        .iter()
        .flat_map(|&i| family.model_masks(i).iter().copied())
        .collect();
    masks.sort_unstable();
    let models = masks
        .into_iter()
        .map(|m| Interpretation::from_mask(u, m))
        .collect();
    Ok((models, family, minimal))
}

/// Conjunction of one maxset of the family — the relaxed merge result for
/// [`relax_consistent`].
pub fn maxset_conjunction(bases: &[Formula], m: &Maxset) -> Formula {
    conj_of(bases, m)
}

// ---------------------------------------------------------------------------
// Berge-acyclicity and the labeling algorithm
// ---------------------------------------------------------------------------

/// Whether the maxset family is a Berge-acyclic hypergraph: its bipartite
/// incidence graph between bases and maxsets is a forest. Checked by
/// union-find with cycle detection on the incidence edges.
pub fn is_berge_acyclic(family: &MaxsetFamily) -> bool {
    let base_span = family
        .sets()
        .iter()
        .flat_map(|s| s.iter().copied())
        .max()
        .map_or(0, |x| x + 1);
    let mut parent: Vec<usize> = (0..base_span + family.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (i, s) in family.sets().iter().enumerate() {
        for &b in s {
            let rb = find(&mut parent, b);
            let rs = find(&mut parent, base_span + i);
            if rb == rs {
                return false;
            }
            parent[rb] = rs;
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Label {
    /// The label "1,n": class one, tied to group n.
    ClassOne(u32),
    /// The label "n": class n.
    Plain(u32),
}

/// The iterative labeling algorithm: discovers maxsets one at a time,
/// growing each from a labeled/unlabeled seed pair, and labels the members
/// of every new maxset from the one label it already carries. Guaranteed to
/// succeed when the maxsets are Berge-acyclic and `r` is an obtainable
/// or-of-maxsets, and may still succeed otherwise. Returns `None` when the
/// labeling reaches a maxset with two labels (the not-acyclic exit) or when
/// the final check — the merge under the produced partition must be exactly
/// `r` — fails; that check always runs.
pub fn label_acyclic(
    r: &Formula,
    bases: &[Formula],
    u: &VariableUniverse,
) -> Result<Option<PriorityPartition>, MergeError> {
    let m = bases.len();
    if m == 0 {
        return Err(MergeError::Precondition(
            "at least one base is required".to_string(),
        ));
    }
    for (i, k) in bases.iter().enumerate() {
        if !is_satisfiable(k)? {
            return Err(MergeError::Precondition(format!(
                "base {i} is unsatisfiable"
            )));
        }
    }
    if !is_satisfiable(r)? {
        return Err(MergeError::Precondition(
            "the target formula is unsatisfiable".to_string(),
        ));
    }

    // Pairwise consistency table.
    let mut pairwise = vec![vec![false; m]; m];
    for i in 0..m {
        pairwise[i][i] = true;
        for j in i + 1..m {
            let both = Formula::and(bases[i].clone(), bases[j].clone());
            let sat = is_satisfiable(&both)?;
            pairwise[i][j] = sat;
            pairwise[j][i] = sat;
        }
    }

    let mut labels: Vec<Option<Label>> = vec![None; m];
    let in_l = |labels: &[Option<Label>], i: usize| labels[i].is_some();

    while labels.iter().any(|l| l.is_none()) {
        // Seed a new maxset: the smallest consistent pair of a labeled and
        // an unlabeled base, else the smallest unlabeled base alone.
        let mut mset: Maxset = BTreeSet::new();
        'seed: for i in 0..m {
            if !in_l(&labels, i) {
                continue;
            }
            for j in 0..m {
                if !in_l(&labels, j) && pairwise[i][j] {
                    mset.insert(i);
                    mset.insert(j);
                    break 'seed;
                }
            }
        }
        if mset.is_empty() {
            let j = (0..m).find(|&j| !in_l(&labels, j)).expect("one unlabeled");
            mset.insert(j);
        }
        // Enlarge to a maxset: any base pairwise-consistent with all of M
        // whose addition keeps the conjunction satisfiable joins; repeat
        // until a full pass adds nothing.
        loop {
            let mut added = false;
            for j in 0..m {
                if mset.contains(&j) || mset.iter().any(|&i| !pairwise[i][j]) {
                    continue;
                }
                let mut widened = mset.clone();
                widened.insert(j);
                if is_satisfiable(&conj_of(bases, &widened))? {
                    mset = widened;
                    added = true;
                }
            }
            if !added {
                break;
            }
        }

        let selected = entails(&conj_of(bases, &mset), r)?;
        let already: Vec<usize> = mset
            .iter()
            .copied()
            .filter(|&i| labels[i].is_some())
            .collect();
        let unlabeled: Vec<usize> = mset
            .iter()
            .copied()
            .filter(|&i| labels[i].is_none())
            .collect();
        match (selected, already.as_slice()) {
            (true, []) => {
                labels[unlabeled[0]] = Some(Label::ClassOne(2));
                for &i in &unlabeled[1..] {
                    labels[i] = Some(Label::Plain(2));
                }
            }
            (true, [one]) => match labels[*one].expect("labeled") {
                Label::ClassOne(n) => {
                    for &i in &unlabeled {
                        labels[i] = Some(Label::Plain(n));
                    }
                }
                Label::Plain(n) => {
                    if unlabeled.is_empty() {
                        return Ok(None);
                    }
                    labels[unlabeled[0]] = Some(Label::ClassOne(n));
                    for &i in &unlabeled[1..] {
                        labels[i] = Some(Label::Plain(n));
                    }
                }
            },
            (false, []) => {
                for &i in &unlabeled {
                    labels[i] = Some(Label::Plain(2));
                }
            }
            (false, [one]) => match labels[*one].expect("labeled") {
                Label::ClassOne(n) => {
                    for &i in &unlabeled {
                        labels[i] = Some(Label::Plain(n + 1));
                    }
                }
                Label::Plain(n) => {
                    for &i in &unlabeled {
                        labels[i] = Some(Label::Plain(n));
                    }
                }
            },
            // Two or more labels in a newly found maxset: not acyclic.
            _ => return Ok(None),
        }
    }

    // Labels to classes: "1,n" means class 1, "n" means class n; compress
    // the used class numbers to a contiguous range preserving order.
    let class_nums: Vec<u32> = labels
        .iter()
        .map(|l| match l.expect("all labeled") {
            Label::ClassOne(_) => 1,
            Label::Plain(n) => n,
        })
        .collect();
    let used: Vec<u32> = class_nums.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let mut classes = vec![BTreeSet::new(); used.len()];
    for (i, &c) in class_nums.iter().enumerate() {
        let rank = used.binary_search(&c).expect("present");
        classes[rank].insert(i);
    }
    let partition = PriorityPartition::new(classes, m)?;
    if verify_partition(r, bases, &partition, u)? {
        Ok(Some(partition))
    } else {
        Ok(None)
    }
}
