//! Inverse weighted merging: given two bases and a desired result, decide
//! whether positive integer weights produce exactly that result, and find
//! such weights when they exist.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::distance::{
    distance_table, merge_weighted_masks, DistanceVector, Metric, WeightPair,
};
use crate::error::MergeError;
use crate::logic::{
    classify, cnf_clauses, compile, conjuncts, distributed_cnf, equivalent, eval_mask,
    is_satisfiable, model_masks, Compiled, Formula, VariableUniverse,
};

/// Exact ratio of weights `w1/w2`.
pub type Ratio = Rational64;

/// The ratio relating two distance vectors:
/// `p(I,J) = (d(J,K2) − d(I,K2)) / (d(I,K1) − d(J,K1))`.
///
/// `None` (undefined) when the denominator `d(I,K1) − d(J,K1)` is zero.
/// The value is symmetric: `p(I,J) = p(J,I)`.
pub fn p_ratio(vi: DistanceVector, vj: DistanceVector) -> Option<Ratio> {
    let den = vi.d1 as i64 - vj.d1 as i64;
    if den == 0 {
        return None;
    }
    let num = vj.d2 as i64 - vi.d2 as i64;
    Some(Ratio::new(num, den))
}

/// One interpretation's distance vector, flagged by membership in the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProfileEntry {
    pub vector: DistanceVector,
    pub in_result: bool,
}

/// The inverse-weight problem instance, reduced to distance vectors: every
/// interpretation contributes its distance pair to the two bases and whether
/// it must be a model of the desired result.
#[derive(Debug, Clone)]
pub struct DistanceProfile {
    entries: Vec<ProfileEntry>,
    max_distance: u64,
}

impl DistanceProfile {
    /// Profile of all interpretations of `u` for the bases `k1`, `k2` and
    /// target `r` under `metric`.
    pub fn from_formulas(
        k1: &Formula,
        k2: &Formula,
        r: &Formula,
        metric: Metric,
        u: &VariableUniverse,
    ) -> Result<DistanceProfile, MergeError> {
        let table = distance_table(k1, k2, metric, u)?;
        let r_masks: BTreeSet<u64> = model_masks(r, u)?.into_iter().collect();
        let entries: Vec<ProfileEntry> = table
            .iter()
            .enumerate()
            .map(|(mask, &vector)| ProfileEntry {
                vector,
                in_result: r_masks.contains(&(mask as u64)),
            })
            .collect();
        DistanceProfile::new(entries, metric.max_distance(u))
    }

    /// Profile from explicit vectors. The distance bound used by the weight
    /// construction is the largest component mentioned.
    pub fn from_vectors(
        in_result: &[DistanceVector],
        out_result: &[DistanceVector],
    ) -> Result<DistanceProfile, MergeError> {
        let max_distance = in_result
            .iter()
            .chain(out_result)
            .flat_map(|v| [v.d1, v.d2])
            .max()
            .unwrap_or(1);
        let entries = in_result
            .iter()
            .map(|&vector| ProfileEntry {
                vector,
                in_result: true,
            })
            .chain(out_result.iter().map(|&vector| ProfileEntry {
                vector,
                in_result: false,
            }))
            .collect();
        DistanceProfile::new(entries, max_distance)
    }

    fn new(entries: Vec<ProfileEntry>, max_distance: u64) -> Result<DistanceProfile, MergeError> {
        if !entries.iter().any(|e| e.in_result) {
            return Err(MergeError::Precondition(
                "the desired result must be satisfiable (at least one in-result entry)"
                    .to_string(),
            ));
        }
        Ok(DistanceProfile {
            entries,
            max_distance,
        })
    }

    pub fn entries(&self) -> &[ProfileEntry] {
        &self.entries
    }

    /// Largest distance any vector component can take.
    pub fn max_distance(&self) -> u64 {
        self.max_distance
    }

    /// Distinct in-result vectors, ascending.
    pub fn in_vectors(&self) -> Vec<DistanceVector> {
        let set: BTreeSet<DistanceVector> = self
            .entries
            .iter()
            .filter(|e| e.in_result)
            .map(|e| e.vector)
            .collect();
        set.into_iter().collect()
    }

    /// Distinct out-of-result vectors, ascending.
    pub fn out_vectors(&self) -> Vec<DistanceVector> {
        let set: BTreeSet<DistanceVector> = self
            .entries
            .iter()
            .filter(|e| !e.in_result)
            .map(|e| e.vector)
            .collect();
        set.into_iter().collect()
    }

    /// Do the given weights make exactly the in-result entries minimal?
    pub fn verify_weights(&self, w: WeightPair) -> bool {
        let costs: Vec<u64> = self
            .entries
            .iter()
            .map(|e| w.w1() * e.vector.d1 + w.w2() * e.vector.d2)
            .collect();
        let best = *costs.iter().min().expect("profile is never empty");
        self.entries
            .iter()
            .zip(&costs)
            .all(|(e, &c)| (c == best) == e.in_result)
    }
}

/// A failed obtainability condition, with the vectors witnessing the failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Condition number, 1 through 6.
    pub condition: u8,
    pub witnesses: Vec<DistanceVector>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "condition {} violated by", self.condition)?;
        for w in &self.witnesses {
            write!(f, " {w}")?;
        }
        Ok(())
    }
}

/// Checks the six obtainability conditions; `None` means all hold (the
/// profile is obtainable by some positive weights).
///
/// Conditions, over in-result vectors I, J, L and out-of-result vectors M, N:
/// 1. distinct I, J never satisfy both d1(I) ≥ d1(J) and d2(I) ≥ d2(J);
/// 2. if d1(I) ≥ d1(M) then d2(I) < d2(M);
/// 3. p(I,J) = p(I,L) whenever both are defined;
/// 4. p(I,J) < p(I,M) whenever p(I,J) is defined and d1(I) > d1(M);
/// 5. p(I,J) > p(I,M) whenever p(I,J) is defined and d1(I) < d1(M);
/// 6. p(I,N) < p(I,M) whenever d1(I) > d1(M) and d1(I) < d1(N).
///
/// Condition 1 here is strict on both coordinates together: two distinct
/// in-result vectors ordered componentwise can never share the minimal
/// weighted cost under positive weights, including when they differ in one
/// coordinate only. Scans are lexicographic, so the first violation in this
/// order is reported deterministically.
pub fn check_conditions(p: &DistanceProfile) -> Option<Violation> {
    let inv = p.in_vectors();
    let outv = p.out_vectors();

    // Condition 1: ordered pairs of distinct in-result vectors.
    for &i in &inv {
        for &j in &inv {
            if i != j && i.d1 >= j.d1 && i.d2 >= j.d2 {
                return Some(Violation {
                    condition: 1,
                    witnesses: vec![i, j],
                });
            }
        }
    }

    // Condition 2: in-result vs out-of-result.
    for &i in &inv {
        for &m in &outv {
            if i.d1 >= m.d1 && i.d2 >= m.d2 {
                return Some(Violation {
                    condition: 2,
                    witnesses: vec![i, m],
                });
            }
        }
    }

    // Condition 3: a common anchor sees one ratio across in-result vectors.
    for &i in &inv {
        for (jx, &j) in inv.iter().enumerate() {
            let Some(pij) = p_ratio(i, j) else { continue };
            for &l in &inv[jx + 1..] {
                let Some(pil) = p_ratio(i, l) else { continue };
                if pij != pil {
                    return Some(Violation {
                        condition: 3,
                        witnesses: vec![i, j, l],
                    });
                }
            }
        }
    }

    // Conditions 4 and 5: the pinned ratio respects out-of-result bounds.
    for &i in &inv {
        for &j in &inv {
            let Some(pij) = p_ratio(i, j) else { continue };
            for &m in &outv {
                if i.d1 > m.d1 {
                    let pim = p_ratio(i, m).expect("nonzero denominator");
                    if pij >= pim {
                        return Some(Violation {
                            condition: 4,
                            witnesses: vec![i, j, m],
                        });
                    }
                }
            }
        }
    }
    for &i in &inv {
        for &j in &inv {
            let Some(pij) = p_ratio(i, j) else { continue };
            for &m in &outv {
                if i.d1 < m.d1 {
                    let pim = p_ratio(i, m).expect("nonzero denominator");
                    if pij <= pim {
                        return Some(Violation {
                            condition: 5,
                            witnesses: vec![i, j, m],
                        });
                    }
                }
            }
        }
    }

    // Condition 6: lower bounds stay below upper bounds.
    for &i in &inv {
        for &m in &outv {
            if i.d1 <= m.d1 {
                continue;
            }
            let pim = p_ratio(i, m).expect("nonzero denominator");
            for &n in &outv {
                if i.d1 >= n.d1 {
                    continue;
                }
                let pin = p_ratio(i, n).expect("nonzero denominator");
                if pin >= pim {
                    return Some(Violation {
                        condition: 6,
                        witnesses: vec![i, m, n],
                    });
                }
            }
        }
    }

    None
}

fn ratio_to_weights(r: Ratio) -> Result<WeightPair, MergeError> {
    if r <= Ratio::zero() {
        return Err(MergeError::Internal(format!(
            "weight ratio must be positive, got {r}"
        )));
    }
    WeightPair::new(*r.numer() as u64, *r.denom() as u64)
}

/// Constructs witnessing weights for a profile on which [`check_conditions`]
/// reported no violation.
///
/// Case A (two in-result vectors with different first distances): the ratio is
/// pinned, `w1 = |d2(J) − d2(I)|`, `w2 = |d1(I) − d1(J)|`. Case B (a single
/// distinct in-result vector I): the ratio must lie strictly between the best
/// lower bound `max p(I,N)` over out-vectors with d1(N) > d1(I) (0 when none)
/// and the best upper bound `min p(I,M)` over out-vectors with d1(M) < d1(I)
/// (n+1 when none, n the largest distance); a nonpositive lower bound yields
/// ratio `1/(n+1)`, otherwise the midpoint of the bounds.
///
/// The result is re-verified against the profile; failure to verify is an
/// internal-inconsistency error, never a silent wrong answer.
pub fn extract_weights(p: &DistanceProfile) -> Result<WeightPair, MergeError> {
    if let Some(v) = check_conditions(p) {
        return Err(MergeError::Precondition(format!(
            "extract_weights requires an obtainable profile ({v})"
        )));
    }
    let inv = p.in_vectors();
    let outv = p.out_vectors();
    let n = p.max_distance() as i64;

    let w = if inv.len() >= 2 {
        // With the conditions satisfied, distinct in-result vectors differ in
        // both coordinates, so any pair pins the ratio; take the two smallest.
        let (i, j) = (inv[0], inv[1]);
        let w1 = (j.d2 as i64 - i.d2 as i64).unsigned_abs();
        let w2 = (i.d1 as i64 - j.d1 as i64).unsigned_abs();
        WeightPair::new(w1, w2)?
    } else {
        let i = inv[0];
        let upper = outv
            .iter()
            .filter(|m| i.d1 > m.d1)
            .filter_map(|&m| p_ratio(i, m))
            .min()
            .unwrap_or_else(|| Ratio::from_integer(n + 1));
        let lower = outv
            .iter()
            .filter(|m| i.d1 < m.d1)
            .filter_map(|&m| p_ratio(i, m))
            .max()
            .unwrap_or_else(Ratio::zero);
        let ratio = if lower <= Ratio::zero() {
            Ratio::new(1, n + 1)
        } else {
            (lower + upper) / 2
        };
        ratio_to_weights(ratio)?
    };

    if !p.verify_weights(w) {
        return Err(MergeError::Internal(format!(
            "extracted weights {w} do not reproduce the profile"
        )));
    }
    Ok(w)
}

/// Outcome of the inverse weighted problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeightVerdict {
    Obtainable(WeightPair),
    Unobtainable(Violation),
}

/// Decides the inverse weighted problem by the condition check and, on
/// success, synthesizes verified weights.
pub fn invert_weights(p: &DistanceProfile) -> Result<WeightVerdict, MergeError> {
    match check_conditions(p) {
        Some(v) => Ok(WeightVerdict::Unobtainable(v)),
        None => Ok(WeightVerdict::Obtainable(extract_weights(p)?)),
    }
}

/// Independent ground-truth decision by sweeping candidate ratios.
///
/// The merge result is piecewise-constant in the ratio `w1/w2`, changing only
/// where some pair of vectors swaps cost order — exactly at the finite
/// p-values. Sweeping every positive p-value, the midpoints of consecutive
/// ones, half the smallest, one past the largest, and 1 therefore covers
/// every possible merge result. Candidates are tried in ascending order; the
/// first pair that reproduces the profile is returned.
pub fn oracle_weights(p: &DistanceProfile) -> Option<WeightPair> {
    let vectors: BTreeSet<DistanceVector> = p.entries().iter().map(|e| e.vector).collect();
    let vectors: Vec<DistanceVector> = vectors.into_iter().collect();
    let mut breakpoints: BTreeSet<Ratio> = BTreeSet::new();
    for (ix, &vi) in vectors.iter().enumerate() {
        for &vj in &vectors[ix + 1..] {
            if let Some(r) = p_ratio(vi, vj) {
                breakpoints.insert(r);
            }
        }
    }
    let positives: Vec<Ratio> = breakpoints
        .into_iter()
        .filter(|r| *r > Ratio::zero())
        .collect();
    let mut candidates: BTreeSet<Ratio> = BTreeSet::new();
    candidates.insert(Ratio::one());
    for &r in &positives {
        candidates.insert(r);
    }
    for pair in positives.windows(2) {
        candidates.insert((pair[0] + pair[1]) / 2);
    }
    if let Some(&smallest) = positives.first() {
        candidates.insert(smallest / 2);
    }
    if let Some(&largest) = positives.last() {
        candidates.insert(largest + Ratio::one());
    }
    for r in candidates {
        let w = WeightPair::new(*r.numer() as u64, *r.denom() as u64)
            .expect("candidates are positive reduced fractions");
        if p.verify_weights(w) {
            return Some(w);
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Local search
// ---------------------------------------------------------------------------

/// Parameters of the local-search procedure.
#[derive(Debug, Clone, Copy)]
pub struct SearchParams {
    pub seed: u64,
    pub max_iters: u64,
    pub restart_interval: u64,
    pub walk_probability: f64,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            seed: 0,
            max_iters: 10_000,
            restart_interval: 100,
            walk_probability: 0.1,
        }
    }
}

/// Result of the local search for a weight ratio.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    /// A candidate ratio derived from two result models; the caller verifies
    /// it by forward merging.
    Ratio(Ratio),
    /// The search proved no ratio can work (contradictory bounds or a
    /// nonpositive pinned ratio).
    Unobtainable,
    /// Iteration budget exhausted; the ratio, if any, lies in `(b, a)` and
    /// `midpoint` is `(a+b)/2`.
    Unknown { a: Ratio, b: Ratio, midpoint: Ratio },
}

enum MoveScorer {
    /// CNF clauses as (variable index, positive) literals.
    Clauses(Vec<Vec<(usize, bool)>>),
    /// Fallback: count falsified top-level conjuncts.
    Units(Vec<Compiled>),
}

impl MoveScorer {
    fn new(r: &Formula, u: &VariableUniverse) -> Result<MoveScorer, MergeError> {
        let clauses = cnf_clauses(r).or_else(|| distributed_cnf(r, 512));
        if let Some(clauses) = clauses {
            let mut compiled = Vec::with_capacity(clauses.len());
            for clause in clauses {
                let mut lits = Vec::with_capacity(clause.len());
                for lit in clause {
                    let idx = u.index_of(&lit.var).ok_or_else(|| {
                        MergeError::Precondition(format!(
                            "variable `{}` not in universe",
                            lit.var
                        ))
                    })?;
                    lits.push((idx, lit.positive));
                }
                compiled.push(lits);
            }
            Ok(MoveScorer::Clauses(compiled))
        } else {
            let units = conjuncts(r)
                .into_iter()
                .map(|c| compile(c, u))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(MoveScorer::Units(units))
        }
    }

    fn falsified(&self, mask: u64, n: usize) -> usize {
        match self {
            MoveScorer::Clauses(clauses) => clauses
                .iter()
                .filter(|clause| {
                    clause
                        .iter()
                        .all(|&(v, pos)| ((mask >> (n - 1 - v)) & 1 == 1) != pos)
                })
                .count(),
            MoveScorer::Units(units) => {
                units.iter().filter(|u| !eval_mask(u, n, mask)).count()
            }
        }
    }
}

/// Stochastic local search for the weight ratio making `r` the merge of
/// `k1` and `k2`.
///
/// Maintains an upper bound `a` (initially n+1) and lower bound `b`
/// (initially −n−1) on the ratio, n being the metric's largest distance. The
/// first result model found anchors `I`. Visiting another result model `O`
/// with a defined `p(I,O)` pins the ratio: it is returned if positive and
/// strictly inside `(b, a)`, otherwise the instance is unobtainable. Visiting
/// a non-result model tightens `a` or `b` according to the sign of
/// `d(I,K1) − d(O,K1)`; crossed bounds (`a < 0` or `a ≤ b`) prove
/// unobtainability. When the iteration budget runs out the midpoint of the
/// bounds is returned as [`SearchOutcome::Unknown`].
///
/// One iteration makes one move: with `walk_probability` a uniformly random
/// variable flip, otherwise the flip minimizing the number of falsified
/// clauses of `r` (its CNF when syntactic or small after distribution, its
/// top-level conjuncts otherwise). The search restarts from a random model
/// every `restart_interval` iterations. Deterministic given the seed. A
/// returned ratio is a candidate only; verifying it by forward merging is the
/// caller's contract.
pub fn local_search_weights(
    r: &Formula,
    k1: &Formula,
    k2: &Formula,
    metric: Metric,
    u: &VariableUniverse,
    params: SearchParams,
) -> Result<SearchOutcome, MergeError> {
    if params.max_iters == 0 || params.restart_interval == 0 {
        return Err(MergeError::Precondition(
            "max_iters and restart_interval must be positive".to_string(),
        ));
    }
    if !(0.0..=1.0).contains(&params.walk_probability) {
        return Err(MergeError::Precondition(
            "walk_probability must lie in [0, 1]".to_string(),
        ));
    }
    u.check_enumerable()?;
    let table = distance_table(k1, k2, metric, u)?;
    let r_compiled = compile(r, u)?;
    let n_vars = u.len();
    let n = metric.max_distance(u) as i64;
    let scorer = MoveScorer::new(r, u)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let mut a = Ratio::from_integer(n + 1);
    let mut b = Ratio::from_integer(-n - 1);
    let mut anchor: Option<u64> = None;
    let mut o: u64 = 0;
    let mut iter: u64 = 0;

    loop {
        if iter % params.restart_interval == 0 {
            o = rng.gen_range(0..(1u64 << n_vars));
        }
        // One local-search move toward a model of r.
        if n_vars > 0 {
            if rng.gen_bool(params.walk_probability) {
                o ^= 1 << rng.gen_range(0..n_vars);
            } else {
                let mut best_flip = 0usize;
                let mut best_score = usize::MAX;
                for v in 0..n_vars {
                    let score = scorer.falsified(o ^ (1 << (n_vars - 1 - v)), n_vars);
                    if score < best_score {
                        best_score = score;
                        best_flip = v;
                    }
                }
                o ^= 1 << (n_vars - 1 - best_flip);
            }
        }

        let sat = eval_mask(&r_compiled, n_vars, o);
        if sat && anchor.is_none() {
            anchor = Some(o);
        }
        if let Some(i) = anchor {
            let (vi, vo) = (table[i as usize], table[o as usize]);
            if sat {
                if let Some(p) = p_ratio(vi, vo) {
                    return Ok(if p > Ratio::zero() && b < p && p < a {
                        SearchOutcome::Ratio(p)
                    } else {
                        SearchOutcome::Unobtainable
                    });
                }
            } else if vi.d1 > vo.d1 {
                let p = p_ratio(vi, vo).expect("nonzero denominator");
                a = a.min(p);
            } else if vi.d1 < vo.d1 {
                let p = p_ratio(vi, vo).expect("nonzero denominator");
                b = b.max(p);
            }
        }
        if a < Ratio::zero() || a <= b {
            return Ok(SearchOutcome::Unobtainable);
        }
        iter += 1;
        if iter >= params.max_iters {
            break;
        }
    }
    Ok(SearchOutcome::Unknown {
        a,
        b,
        midpoint: (a + b) / 2,
    })
}

/// Verifies a search-produced ratio by forward merging.
pub fn verify_search_ratio(
    ratio: Ratio,
    r: &Formula,
    k1: &Formula,
    k2: &Formula,
    metric: Metric,
    u: &VariableUniverse,
) -> Result<Option<WeightPair>, MergeError> {
    if ratio <= Ratio::zero() {
        return Ok(None);
    }
    let w = WeightPair::new(*ratio.numer() as u64, *ratio.denom() as u64)?;
    let table = distance_table(k1, k2, metric, u)?;
    let merged = merge_weighted_masks(&table, w);
    let want = model_masks(r, u)?;
    Ok(if merged == want { Some(w) } else { None })
}

// ---------------------------------------------------------------------------
// Tractable case: literal-conjunction bases, Horn or Krom target
// ---------------------------------------------------------------------------

/// Which weight relation makes the target the Hamming merge of two
/// literal-conjunction bases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TractableOutcome {
    /// Obtainable with equal weights (and only then).
    EqualWeights,
    /// Obtainable whenever `w1 > w2`.
    FirstHeavier,
    /// Obtainable whenever `w1 < w2`.
    SecondHeavier,
    Unobtainable,
}

fn literal_map(k: &Formula) -> Option<BTreeMap<String, bool>> {
    let clauses = cnf_clauses(k)?;
    let mut map = BTreeMap::new();
    for clause in clauses {
        if clause.len() != 1 {
            return None;
        }
        let lit = &clause[0];
        if let Some(&prev) = map.get(&lit.var) {
            if prev != lit.positive {
                return None; // contradictory literals; callers reject earlier
            }
        }
        map.insert(lit.var.clone(), lit.positive);
    }
    Some(map)
}

/// Polynomial decision of the inverse weighted problem under the Hamming
/// metric when both bases are satisfiable literal conjunctions and the target
/// is Horn or Krom.
///
/// The merge of two literal conjunctions keeps every literal the bases agree
/// on or mention alone; on variables where the bases conflict it keeps the
/// heavier base's literal, or drops the variable entirely under equal
/// weights. The three possible results are compared against `r` in the order
/// equal / first-heavier / second-heavier.
pub fn tractable_invert(
    r: &Formula,
    k1: &Formula,
    k2: &Formula,
) -> Result<TractableOutcome, MergeError> {
    for (name, k) in [("first", k1), ("second", k2)] {
        if !classify(k).literal_conjunction {
            return Err(MergeError::Precondition(format!(
                "{name} base must be a literal conjunction"
            )));
        }
        if !is_satisfiable(k)? {
            return Err(MergeError::Precondition(format!(
                "{name} base must be satisfiable"
            )));
        }
    }
    let rc = classify(r);
    if !(rc.horn || rc.krom) {
        return Err(MergeError::Precondition(
            "target must be a Horn or Krom clausal formula".to_string(),
        ));
    }
    let lits1 = literal_map(k1).expect("checked literal conjunction");
    let lits2 = literal_map(k2).expect("checked literal conjunction");

    let mut conflicts: BTreeSet<String> = BTreeSet::new();
    for (v, s) in &lits1 {
        if lits2.get(v).is_some_and(|s2| s2 != s) {
            conflicts.insert(v.clone());
        }
    }

    let mut shared: BTreeMap<String, bool> = BTreeMap::new();
    for (v, s) in lits1.iter().chain(lits2.iter()) {
        if !conflicts.contains(v) {
            shared.insert(v.clone(), *s);
        }
    }

    let mut conflict1: BTreeMap<String, bool> = BTreeMap::new();
    let mut conflict2: BTreeMap<String, bool> = BTreeMap::new();
    for v in &conflicts {
        conflict1.insert(v.clone(), lits1[v]);
        conflict2.insert(v.clone(), lits2[v]);
    }

    let build = |extra: &BTreeMap<String, bool>| {
        let mut all = shared.clone();
        for (v, s) in extra {
            all.insert(v.clone(), *s);
        }
        Formula::and_all(all.into_iter().map(|(v, s)| Formula::literal(v, s)))
    };

    let empty = BTreeMap::new();
    let candidates = [
        (TractableOutcome::EqualWeights, &empty),
        (TractableOutcome::FirstHeavier, &conflict1),
        (TractableOutcome::SecondHeavier, &conflict2),
    ];
    for (tag, extra) in candidates {
        if equivalent(&build(extra), r)? {
            return Ok(tag);
        }
    }
    Ok(TractableOutcome::Unobtainable)
}
