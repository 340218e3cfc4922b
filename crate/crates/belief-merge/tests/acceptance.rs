//! Acceptance suite: one test per numbered criterion, each printing a
//! `criterion N: pass/FAIL` line (visible with `--nocapture`) and enforcing
//! its time budget. Randomized criteria use fixed seeds, and every verdict a
//! criterion checks is validated against an independent oracle — exhaustive
//! weight sweeps, exhaustive assignment search, or brute-force enumeration of
//! priority partitions.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::AssertUnwindSafe;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use belief_merge::distance::{merge_equals, DistanceVector, Metric, WeightPair};
use belief_merge::logic::{is_satisfiable, models, parse, Formula, VariableUniverse};
use belief_merge::maxsets::{conj_of, maxset_family, split_selected, synthesize, Maxset};
use belief_merge::priority::{
    enumerate_partitions, invert_priority_bruteforce, is_berge_acyclic, label_acyclic,
    merge_priority_masks, minimal_maxsets, orderings_for, relax_consistent, relax_entailed,
    verify_partition, BRUTEFORCE_BASE_CAP,
};
use belief_merge::segraph::{
    assign_values, build_se_graph, evaluate_assignment, find_alternating_cycle,
    full_disconnection, gen_levels_graph, is_obtainable_graph, oracle_assignment, reduce,
    remove_tails, validate_cycle, zigzag_fold, EdgeMark, SeGraph, StepOutcome,
};
use belief_merge::weights::{
    check_conditions, invert_weights, oracle_weights, tractable_invert, DistanceProfile,
    TractableOutcome, WeightVerdict,
};

// ---------------------------------------------------------------------------
// Harness
// ---------------------------------------------------------------------------

fn run_criterion(n: u32, budget_secs: u64, body: impl FnOnce()) {
    let start = Instant::now();
    let outcome = std::panic::catch_unwind(AssertUnwindSafe(body));
    let secs = start.elapsed().as_secs_f64();
    match outcome {
        Ok(()) if secs <= budget_secs as f64 => println!("criterion {n}: pass ({secs:.2}s)"),
        Ok(()) => {
            println!("criterion {n}: FAIL ({secs:.2}s, budget {budget_secs}s)");
            panic!("criterion {n} exceeded its {budget_secs}s budget ({secs:.2}s)");
        }
        Err(payload) => {
            println!("criterion {n}: FAIL ({secs:.2}s)");
            std::panic::resume_unwind(payload);
        }
    }
}

fn universe_of(formulas: &[&Formula]) -> VariableUniverse {
    VariableUniverse::from_formulas(formulas.iter().copied())
}

fn mask_set(f: &Formula, u: &VariableUniverse) -> BTreeSet<u64> {
    models(f, u).expect("enumerable").iter().map(|i| i.mask()).collect()
}

// ---------------------------------------------------------------------------
// Random generators (fixed seeds per criterion)
// ---------------------------------------------------------------------------

fn random_formula(rng: &mut ChaCha8Rng, vars: &[&str], depth: usize) -> Formula {
    if depth == 0 || rng.gen_range(0..10) < 3 {
        return match rng.gen_range(0..10) {
            0 => Formula::True,
            1 => Formula::False,
            _ => Formula::literal(vars[rng.gen_range(0..vars.len())], rng.gen_bool(0.5)),
        };
    }
    match rng.gen_range(0..5) {
        0 => Formula::not(random_formula(rng, vars, depth - 1)),
        1 => Formula::and(
            random_formula(rng, vars, depth - 1),
            random_formula(rng, vars, depth - 1),
        ),
        2 => Formula::or(
            random_formula(rng, vars, depth - 1),
            random_formula(rng, vars, depth - 1),
        ),
        3 => Formula::implies(
            random_formula(rng, vars, depth - 1),
            random_formula(rng, vars, depth - 1),
        ),
        _ => Formula::iff(
            random_formula(rng, vars, depth - 1),
            random_formula(rng, vars, depth - 1),
        ),
    }
}

fn random_sat_formula(rng: &mut ChaCha8Rng, vars: &[&str], depth: usize) -> Formula {
    loop {
        let f = random_formula(rng, vars, depth);
        if is_satisfiable(&f).expect("small universe") {
            return f;
        }
    }
}

/// A satisfiable literal conjunction as a sign map plus its formula.
fn random_literal_map(rng: &mut ChaCha8Rng, vars: &[&str]) -> BTreeMap<String, bool> {
    let size = rng.gen_range(1..=vars.len().min(4));
    let mut picked: Vec<&str> = vars.to_vec();
    for i in (1..picked.len()).rev() {
        picked.swap(i, rng.gen_range(0..=i));
    }
    picked[..size]
        .iter()
        .map(|v| (v.to_string(), rng.gen_bool(0.5)))
        .collect()
}

fn conjunction_of(map: &BTreeMap<String, bool>) -> Formula {
    Formula::and_all(map.iter().map(|(v, &s)| Formula::literal(v.clone(), s)))
}

// ---------------------------------------------------------------------------
// Criterion 1 — weighted drastic fixture
// ---------------------------------------------------------------------------

#[test]
fn criterion_01_weighted_drastic_fixture() {
    run_criterion(1, 1, || {
        let k1 = parse("a").unwrap();
        let k2 = parse("!a & b").unwrap();
        let r = parse("!a & b").unwrap();
        let u = universe_of(&[&k1, &k2, &r]);

        let w12 = WeightPair::new(1, 2).unwrap();
        assert!(
            merge_equals(&k1, &k2, w12, Metric::Drastic, &u, &r).unwrap(),
            "weights (1,2) must merge to the second base"
        );

        let prof = DistanceProfile::from_formulas(&k1, &k2, &r, Metric::Drastic, &u).unwrap();
        match invert_weights(&prof).unwrap() {
            WeightVerdict::Obtainable(w) => {
                assert!(prof.verify_weights(w), "returned weights must verify");
                assert!(w.w1() < w.w2(), "the verified ratio lies below one");
            }
            WeightVerdict::Unobtainable(v) => panic!("expected obtainable, got {v}"),
        }

        let r2 = parse("a | b").unwrap();
        let prof2 = DistanceProfile::from_formulas(&k1, &k2, &r2, Metric::Drastic, &u).unwrap();
        match invert_weights(&prof2).unwrap() {
            WeightVerdict::Obtainable(w) => {
                assert!(prof2.verify_weights(w));
                assert_eq!(w.w1(), w.w2(), "the disjunction needs ratio exactly one");
            }
            WeightVerdict::Unobtainable(v) => panic!("expected obtainable, got {v}"),
        }
    });
}

// ---------------------------------------------------------------------------
// Criterion 2 — explicit vector profile and condition 6
// ---------------------------------------------------------------------------

#[test]
fn criterion_02_vector_profile_condition_six() {
    run_criterion(2, 1, || {
        let dv = DistanceVector::new;
        let inr = [dv(4, 4)];
        let out = [dv(1, 8), dv(8, 1)];
        let prof = DistanceProfile::from_vectors(&inr, &out).unwrap();
        assert!(check_conditions(&prof).is_none(), "the base profile is obtainable");
        assert!(
            prof.verify_weights(WeightPair::new(1, 1).unwrap()),
            "(1,1) realizes the base profile"
        );
        match invert_weights(&prof).unwrap() {
            WeightVerdict::Obtainable(w) => assert!(prof.verify_weights(w)),
            WeightVerdict::Unobtainable(v) => panic!("expected obtainable, got {v}"),
        }

        let out2 = [dv(1, 8), dv(8, 1), dv(1, 5), dv(5, 1)];
        let prof2 = DistanceProfile::from_vectors(&inr, &out2).unwrap();
        let violation = check_conditions(&prof2).expect("extended profile is unobtainable");
        assert_eq!(violation.condition, 6);
        assert_eq!(violation.witnesses, vec![dv(4, 4), dv(1, 5), dv(5, 1)]);
        assert!(oracle_weights(&prof2).is_none(), "oracle agrees");
    });
}

// ---------------------------------------------------------------------------
// Criterion 3 — three-way agreement on random weighted profiles
// ---------------------------------------------------------------------------

#[test]
fn criterion_03_random_weighted_agreement() {
    run_criterion(3, 120, || {
        let mut rng = ChaCha8Rng::seed_from_u64(0xC3);
        let vars = ["a", "b", "c", "d"];
        for case in 0..1000 {
            let k1 = random_sat_formula(&mut rng, &vars, 3);
            let k2 = random_sat_formula(&mut rng, &vars, 3);
            let r = random_sat_formula(&mut rng, &vars, 3);
            let u = universe_of(&[&k1, &k2, &r]);
            for metric in [Metric::Drastic, Metric::Hamming] {
                let prof =
                    DistanceProfile::from_formulas(&k1, &k2, &r, metric, &u).unwrap();
                let by_check = check_conditions(&prof).is_none();
                let by_oracle = oracle_weights(&prof);

                let bound = prof.max_distance() + 1;
                let mut by_sweep = None;
                'sweep: for w1 in 1..=bound {
                    for w2 in 1..=bound {
                        let w = WeightPair::new(w1, w2).unwrap();
                        if prof.verify_weights(w) {
                            by_sweep = Some(w);
                            break 'sweep;
                        }
                    }
                }

                let context = format!("case {case}: {k1} / {k2} -> {r} ({metric:?})");
                assert_eq!(by_check, by_oracle.is_some(), "check vs oracle, {context}");
                assert_eq!(by_check, by_sweep.is_some(), "check vs sweep, {context}");
                match invert_weights(&prof).unwrap() {
                    WeightVerdict::Obtainable(w) => {
                        assert!(by_check, "inversion vs check, {context}");
                        assert!(prof.verify_weights(w), "weights re-verify, {context}");
                    }
                    WeightVerdict::Unobtainable(_) => {
                        assert!(!by_check, "inversion vs check, {context}")
                    }
                }
            }
        }
    });
}

// ---------------------------------------------------------------------------
// Criterion 4 — tractable case agrees with the oracle
// ---------------------------------------------------------------------------

#[test]
fn criterion_04_tractable_agreement() {
    run_criterion(4, 60, || {
        let mut rng = ChaCha8Rng::seed_from_u64(0xC4);
        let vars = ["a", "b", "c", "d", "e", "f"];
        for case in 0..500 {
            let m1 = random_literal_map(&mut rng, &vars);
            let m2 = random_literal_map(&mut rng, &vars);
            let k1 = conjunction_of(&m1);
            let k2 = conjunction_of(&m2);
            let r = random_tractable_target(&mut rng, &vars, &m1, &m2);

            let u = universe_of(&[&k1, &k2, &r]);
            let outcome = tractable_invert(&r, &k1, &k2).unwrap();
            let prof =
                DistanceProfile::from_formulas(&k1, &k2, &r, Metric::Hamming, &u).unwrap();
            let oracle = oracle_weights(&prof);

            let context = format!("case {case}: {k1} / {k2} -> {r}");
            assert_eq!(
                outcome != TractableOutcome::Unobtainable,
                oracle.is_some(),
                "tractable vs oracle, {context}"
            );
            let canonical = match outcome {
                TractableOutcome::EqualWeights => Some((1, 1)),
                TractableOutcome::FirstHeavier => Some((2, 1)),
                TractableOutcome::SecondHeavier => Some((1, 2)),
                TractableOutcome::Unobtainable => None,
            };
            if let Some((w1, w2)) = canonical {
                let w = WeightPair::new(w1, w2).unwrap();
                assert!(prof.verify_weights(w), "canonical weights verify, {context}");
            }
        }
    });
}

/// Target mix for the tractable case: the three candidate merges of the two
/// literal conjunctions, plus random satisfiable Horn and Krom clause sets.
fn random_tractable_target(
    rng: &mut ChaCha8Rng,
    vars: &[&str],
    m1: &BTreeMap<String, bool>,
    m2: &BTreeMap<String, bool>,
) -> Formula {
    loop {
        let f = match rng.gen_range(0..4) {
            0 | 1 => {
                let mut merged: BTreeMap<String, bool> = BTreeMap::new();
                for (v, &s) in m1.iter().chain(m2.iter()) {
                    if m1.get(v).is_none()
                        || m2.get(v).is_none()
                        || m1.get(v) == m2.get(v)
                    {
                        merged.insert(v.clone(), s);
                    }
                }
                match rng.gen_range(0..3) {
                    0 => {}
                    1 => {
                        for (v, &s) in m1 {
                            if m2.get(v).is_some_and(|&t| t != s) {
                                merged.insert(v.clone(), s);
                            }
                        }
                    }
                    _ => {
                        for (v, &s) in m2 {
                            if m1.get(v).is_some_and(|&t| t != s) {
                                merged.insert(v.clone(), s);
                            }
                        }
                    }
                }
                conjunction_of(&merged)
            }
            2 => random_clausal(rng, vars, true),
            _ => random_clausal(rng, vars, false),
        };
        if is_satisfiable(&f).expect("small universe") {
            return f;
        }
    }
}

/// Random clause set: Horn (at most one positive literal per clause) or Krom
/// (at most two literals per clause).
fn random_clausal(rng: &mut ChaCha8Rng, vars: &[&str], horn: bool) -> Formula {
    let clauses = rng.gen_range(1..=3);
    Formula::and_all((0..clauses).map(|_| {
        let size = if horn { rng.gen_range(1..=3) } else { rng.gen_range(1..=2) };
        let mut picked: Vec<&str> = vars.to_vec();
        for i in (1..picked.len()).rev() {
            picked.swap(i, rng.gen_range(0..=i));
        }
        let positives = if horn { rng.gen_range(0..=1) } else { size };
        Formula::or_all(picked[..size].iter().enumerate().map(|(i, v)| {
            let positive = if horn { i < positives } else { rng.gen_bool(0.5) };
            Formula::literal(*v, positive)
        }))
    }))
}

// ---------------------------------------------------------------------------
// Criterion 5 — the four-cycle family is unobtainable with a certificate
// ---------------------------------------------------------------------------

#[test]
fn criterion_05_four_cycle_certificate() {
    run_criterion(5, 1, || {
        let a = parse("(x & y) | (!x & !y)").unwrap();
        let b = parse("(x & y) | (x & !y)").unwrap();
        let c = parse("(x & !y) | (!x & y)").unwrap();
        let d = parse("(!x & y) | (!x & !y)").unwrap();
        let bases = [a.clone(), b.clone(), c.clone(), d.clone()];
        let u = universe_of(&[&a, &b, &c, &d]);

        let family = maxset_family(&bases, &u).unwrap();
        let got: BTreeSet<Maxset> = family.sets().iter().cloned().collect();
        let want: BTreeSet<Maxset> = [
            BTreeSet::from([0, 1]),
            BTreeSet::from([1, 2]),
            BTreeSet::from([2, 3]),
            BTreeSet::from([0, 3]),
        ]
        .into_iter()
        .collect();
        assert_eq!(got, want, "the four pairwise maxsets");

        let r = Formula::or(
            Formula::and(a.clone(), b.clone()),
            Formula::and(c.clone(), d.clone()),
        );
        assert_eq!(enumerate_partitions(4).unwrap().count(), 75);
        assert!(
            orderings_for(&r, &bases, &u, BRUTEFORCE_BASE_CAP).unwrap().is_empty(),
            "none of the 75 orderings reaches the target"
        );

        let (selected, excluded) = split_selected(&family, &r, &u).unwrap();
        let (graph, report) = build_se_graph(&family, &selected, &excluded).unwrap();
        assert!(report.selected.is_empty() && report.excluded.is_empty());
        assert!(!is_obtainable_graph(&graph).unwrap());
        let cycle = find_alternating_cycle(&graph).unwrap().expect("certificate");
        assert!(validate_cycle(&graph, &cycle));
        assert_eq!(cycle.edge_ids.len(), 4, "the alternating cycle spans the square");
    });
}

// ---------------------------------------------------------------------------
// Criterion 6 — synthesized antichains make every maxset union obtainable
// ---------------------------------------------------------------------------

#[test]
fn criterion_06_synthesized_unions_obtainable() {
    run_criterion(6, 60, || {
        let mut rng = ChaCha8Rng::seed_from_u64(0xC6);
        let pool = ["A", "B", "C", "D", "E", "F"];
        let mut done = 0;
        while done < 200 {
            let n_sets = rng.gen_range(1..=3);
            let mut sets: Vec<BTreeSet<&str>> = Vec::new();
            for _ in 0..n_sets {
                let size = rng.gen_range(1..=3);
                let mut picked: Vec<&str> = pool.to_vec();
                for i in (1..picked.len()).rev() {
                    picked.swap(i, rng.gen_range(0..=i));
                }
                sets.push(picked[..size].iter().copied().collect());
            }
            let antichain = sets.iter().enumerate().all(|(i, s)| {
                sets.iter()
                    .enumerate()
                    .all(|(j, t)| i == j || (!s.is_subset(t) && !t.is_subset(s)))
            });
            if !antichain {
                continue;
            }

            let lists: Vec<Vec<String>> = sets
                .iter()
                .map(|s| s.iter().map(|n| n.to_string()).collect())
                .collect();
            let named = synthesize(&lists).unwrap();
            let bases: Vec<Formula> = named.iter().map(|(_, f)| f.clone()).collect();
            let u = VariableUniverse::from_formulas(bases.iter());
            let family = maxset_family(&bases, &u).unwrap();
            assert_eq!(family.len(), sets.len(), "synthesis hits the requested family");

            for mask in 1u32..(1 << family.len()) {
                let r = Formula::or_all(
                    (0..family.len())
                        .filter(|i| mask & (1 << i) != 0)
                        .map(|i| conj_of(&bases, &family.sets()[i])),
                );
                let partition =
                    invert_priority_bruteforce(&r, &bases, &u, BRUTEFORCE_BASE_CAP)
                        .unwrap()
                        .unwrap_or_else(||

                            panic!("union of maxsets {mask:b} must be obtainable")
                        );
                assert!(verify_partition(&r, &bases, &partition, &u).unwrap());
            }
            done += 1;
        }
    });
}

// ---------------------------------------------------------------------------
// Criterion 7 — graph calculus agrees with the exhaustive oracle
// ---------------------------------------------------------------------------

#[test]
fn criterion_07_graph_calculus_oracle_agreement() {
    run_criterion(7, 300, || {
        let mut rng = ChaCha8Rng::seed_from_u64(0xC7);
        let sizes = [2, 2, 3, 3, 3, 4, 4, 4, 5, 5, 6, 6, 7, 8];
        type Step = fn(&SeGraph) -> StepOutcome;
        let steps: [(&str, Step); 3] = [
            ("full_disconnection", full_disconnection),
            ("remove_tails", remove_tails),
            ("zigzag_fold", zigzag_fold),
        ];
        for case in 0..2000 {
            let n: u32 = sizes[rng.gen_range(0..sizes.len())];
            let max_e = (n * (n - 1) / 2 + 3).min(10);
            let e = rng.gen_range(1..=max_e);
            let mut edges = Vec::new();
            for _ in 0..e {
                let a = rng.gen_range(0..n);
                let mut b = rng.gen_range(0..n);
                while b == a {
                    b = rng.gen_range(0..n);
                }
                let mark = if rng.gen_bool(0.5) {
                    EdgeMark::Selected
                } else {
                    EdgeMark::Excluded
                };
                edges.push((a.min(b), a.max(b), mark));
            }
            let g = SeGraph::new(edges);

            let obtainable = oracle_assignment(&g).unwrap().is_some();
            let red = reduce(&g).unwrap();
            assert_eq!(red.obtainable(), obtainable, "case {case}: reduce vs oracle");

            let cycle = find_alternating_cycle(&g).unwrap();
            assert_eq!(cycle.is_none(), obtainable, "case {case}: cycle vs oracle");
            if let Some(c) = &cycle {
                assert!(validate_cycle(&g, c), "case {case}: certificate validates");
            }

            let assigned = assign_values(&g).unwrap();
            assert_eq!(assigned.is_some(), obtainable, "case {case}: assign vs oracle");
            if let Some(vals) = &assigned {
                assert_eq!(
                    evaluate_assignment(&g, vals).unwrap(),
                    g.selected_ids(),
                    "case {case}: witness evaluates to the selected edges"
                );
            }

            for (name, step) in steps {
                match step(&g) {
                    StepOutcome::Changed(h) => {
                        if h.nodes().len() <= 9 && h.edges().len() <= 64 {
                            assert_eq!(
                                oracle_assignment(&h).unwrap().is_some(),
                                obtainable,
                                "case {case}: {name} changed the verdict"
                            );
                        }
                    }
                    StepOutcome::Conflict(_, _) => {
                        assert!(!obtainable, "case {case}: {name} conflicted while obtainable")
                    }
                    StepOutcome::Unchanged => {}
                }
            }
        }
    });
}

// ---------------------------------------------------------------------------
// Criterion 8 — the levels family needs ever more priority classes
// ---------------------------------------------------------------------------

#[test]
fn criterion_08_levels_need_many_classes() {
    run_criterion(8, 120, || {
        for n in 1..=3usize {
            let g = gen_levels_graph(n).unwrap();
            assert!(is_obtainable_graph(&g).unwrap(), "levels({n}) is obtainable");
            let witness = oracle_assignment(&g)
                .unwrap()
                .unwrap_or_else(|| panic!("levels({n}) has a witness"));
            let distinct = witness.values().copied().collect::<BTreeSet<u32>>().len();
            assert!(
                distinct >= n,
                "levels({n}) admits no witness below {n} distinct values"
            );
            assert_eq!(distinct, n + 1, "the minimum for levels({n}) is n+1");

            let fast = assign_values(&g)
                .unwrap()
                .unwrap_or_else(|| panic!("levels({n}) assignment"));
            let fast_distinct = fast.values().copied().collect::<BTreeSet<u32>>().len();
            assert_eq!(fast_distinct, n + 1, "backtracking search is minimal too");
        }
    });
}

// ---------------------------------------------------------------------------
// Criterion 9 — labeling matches brute force on tree-shaped families
// ---------------------------------------------------------------------------

#[test]
fn criterion_09_acyclic_labeling_matches_bruteforce() {
    run_criterion(9, 120, || {
        let mut rng = ChaCha8Rng::seed_from_u64(0xC9);
        let letters = ["A", "B", "C", "D", "E", "F"];
        for case in 0..100 {
            let b = rng.gen_range(3..=6usize);
            let lists: Vec<Vec<String>> = (1..b)
                .map(|i| {
                    let p = rng.gen_range(0..i);
                    vec![letters[p].to_string(), letters[i].to_string()]
                })
                .collect();
            let named = synthesize(&lists).unwrap();
            let bases: Vec<Formula> = named.iter().map(|(_, f)| f.clone()).collect();
            let u = VariableUniverse::from_formulas(bases.iter());
            let family = maxset_family(&bases, &u).unwrap();
            assert!(is_berge_acyclic(&family), "case {case}: trees are acyclic");
            assert_eq!(family.len(), b - 1);

            let check = |r: &Formula| {
                let labeled = label_acyclic(r, &bases, &u).unwrap();
                let brute =
                    invert_priority_bruteforce(r, &bases, &u, BRUTEFORCE_BASE_CAP).unwrap();
                assert_eq!(
                    labeled.is_some(),
                    brute.is_some(),
                    "case {case}: labeling vs brute force on {r}"
                );
                if let Some(p) = &labeled {
                    assert!(
                        verify_partition(r, &bases, p, &u).unwrap(),
                        "case {case}: labeled partition merges to {r}"
                    );
                }
            };

            for mask in 1u32..(1 << family.len()) {
                let r = Formula::or_all(
                    (0..family.len())
                        .filter(|i| mask & (1 << i) != 0)
                        .map(|i| conj_of(&bases, &family.sets()[i])),
                );
                check(&r);
            }
            let names: Vec<&str> = u.names().iter().map(String::as_str).collect();
            if !names.is_empty() {
                for _ in 0..2 {
                    let r = random_sat_formula(&mut rng, &names, 3);
                    check(&r);
                }
            }
        }
    });
}

// ---------------------------------------------------------------------------
// Criterion 10 — witness multiplicity and uniqueness
// ---------------------------------------------------------------------------

#[test]
fn criterion_10_witness_uniqueness_fixture() {
    run_criterion(10, 1, || {
        let build = |filler: &str| -> Vec<Formula> {
            vec![
                parse("(x & !y) | (!x & !y)").unwrap(),
                parse(&format!("(x & !y) | (x & y & {filler})")).unwrap(),
                parse(&format!("(!x & !y) | (x & y & {filler})")).unwrap(),
            ]
        };
        let r = parse("!y").unwrap();

        let bases = build("false");
        let u = universe_of(&[&bases[0], &bases[1], &bases[2], &r]);
        let all = orderings_for(&r, &bases, &u, BRUTEFORCE_BASE_CAP).unwrap();
        let distinct: BTreeSet<String> = all.iter().map(|p| p.to_string()).collect();
        assert!(
            distinct.len() >= 2,
            "with the empty filler there are at least two essentially different witnesses, got {distinct:?}"
        );

        let bases = build("true");
        let u = universe_of(&[&bases[0], &bases[1], &bases[2], &r]);
        let all = orderings_for(&r, &bases, &u, BRUTEFORCE_BASE_CAP).unwrap();
        assert!(!all.is_empty(), "the full filler still reaches the target");
        for p in &all {
            assert_eq!(
                p.classes()[0],
                BTreeSet::from([0usize]),
                "every witness puts the first base alone on top, got {p}"
            );
        }
    });
}

// ---------------------------------------------------------------------------
// Criterion 11 — relaxation fallbacks
// ---------------------------------------------------------------------------

#[test]
fn criterion_11_relaxation_fallbacks() {
    run_criterion(11, 1, || {
        let k = parse("!x").unwrap();
        let bases = vec![k.clone(), k];
        let r = parse("x").unwrap();
        let u = universe_of(&[&bases[0], &bases[1], &r]);
        assert!(
            relax_consistent(&r, &bases, &u).unwrap().is_none(),
            "no maxset is consistent with the target"
        );
        assert!(
            relax_entailed(&r, &bases, &u).unwrap().is_none(),
            "the target is not entailed by any maxset union"
        );

        let tri = vec![
            parse("x").unwrap(),
            parse("y").unwrap(),
            parse("!(x <-> y)").unwrap(),
        ];
        let r = parse("x").unwrap();
        let u = universe_of(&[&tri[0], &tri[1], &tri[2]]);
        let partition = relax_consistent(&r, &tri, &u)
            .unwrap()
            .expect("the triangle offers a consistent fallback");
        let family = maxset_family(&tri, &u).unwrap();
        let minimal = minimal_maxsets(family.sets(), &partition);
        assert_eq!(minimal.len(), 1, "exactly one maxset is promoted");
        let merged: BTreeSet<u64> =
            merge_priority_masks(&family, &partition).into_iter().collect();
        let want = mask_set(&r, &u);
        assert!(
            merged.iter().any(|m| want.contains(m)),
            "the fallback merge is consistent with the target"
        );
    });
}
