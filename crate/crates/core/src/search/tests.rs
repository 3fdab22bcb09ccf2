use super::*;
use crate::relational::model_valid;
use crate::syntax::parse_formula;

fn formula(theory: Theory, s: &str) -> Formula {
    parse_formula(s, &theory.signature()).unwrap()
}

fn names(f: &Formula) -> (Vec<String>, Vec<String>) {
    let (p, g) = f.variables_of();
    (p.into_iter().collect(), g.into_iter().collect())
}

/// Validity by evaluating the formula in every enumerated model.
fn brute_valid(theory: Theory, f: &Formula, n: usize, k: usize) -> bool {
    let (props, groups) = names(f);
    enumerate_models(theory, n, k, &props, &groups, &Caps::default())
        .unwrap()
        .iter()
        .all(|m| model_valid(m, f).unwrap())
}

fn bounds(n: usize, k: usize, workers: usize, symmetry: bool) -> SearchBounds {
    SearchBounds {
        max_worlds: n,
        max_relations: k,
        workers,
        symmetry,
        time_limit: None,
    }
}

#[test]
fn enumeration_counts() {
    let caps = Caps::default();
    let p = vec!["p".to_string()];
    let a = vec!["a".to_string()];
    assert_eq!(enumerate_models_exact(Theory::Sl, 1, 0, &p, &[], &caps).unwrap().count(), 2);
    assert_eq!(enumerate_models_exact(Theory::Sl, 2, 1, &p, &a, &caps).unwrap().count(), 256);
    assert_eq!(count_models_exact(Theory::Sl, 2, 1, 1, 1), 256);
    // reflexive images at two worlds: 2 per world
    assert_eq!(enumerate_models_exact(Theory::Csl, 2, 1, &[], &[], &caps).unwrap().count(), 4);
    let all = enumerate_models(Theory::Sl, 2, 1, &p, &a, &caps).unwrap();
    assert_eq!(all.len(), 2 + 2 * 2 * 2 + 4 + 256);
    assert!(enumerate_models_exact(Theory::Sl, 3, 3, &p, &a, &Caps { models: 10, ..caps })
        .err()
        .unwrap()
        .is_cap());
}

const CASES: &[(Theory, &str)] = &[
    (Theory::Empty, "[a]p -> <a>p"),
    (Theory::Empty, "<a>p -> [a]p"),
    (Theory::Empty, "[a]p -> p"),
    (Theory::Empty, "<a>(p & q) -> <a>p & <a>q"),
    (Theory::Empty, "[a]<a>p -> <a>[a]p"),
    (Theory::Sl, "[a+b]p <-> [a]p & [b]p"),
    (Theory::Sl, "<a+b>p -> <a>p"),
    (Theory::Sl, "[0]p & ~<0>p"),
    (Theory::Sl, "[a]([b]p) -> [b]p"),
    (Theory::Rum, "[a . b]p -> [a][b]p"),
    (Theory::Rum, "[a][b]p -> [a . b]p"),
    (Theory::Rum, "<a . b>p -> <a><b>p"),
    (Theory::Rum, "[1]p <-> p"),
    (Theory::Rum, "[a . 1]p <-> [a]p"),
    (Theory::Csl, "<a>p -> p"),
    (Theory::Csl, "[a]p -> p"),
    (Theory::Csl, "<a^>p -> <a>p"),
    (Theory::Csl, "[a^]p -> [a]p"),
    (Theory::Csl, "<a + b>p -> <a>p | <b>p"),
    (Theory::Ba, "[-a]p -> [a]p"),
    (Theory::Ba, "[a * b]p -> [a]p"),
    (Theory::Ba, "[a]p & [-a]p -> [a + -a]p"),
    (Theory::Ba, "<a>p -> <a + b>p"),
    (Theory::Ba, "[-(-a)]p <-> [a]p"),
];

#[test]
fn search_agrees_with_brute_force() {
    let caps = Caps::default();
    for &(theory, s) in CASES {
        let f = formula(theory, s);
        let (_, groups) = names(&f);
        let (n, k) = if groups.len() > 1 { (2, 1) } else { (2, 2) };
        let expected = brute_valid(theory, &f, n, k);
        for (workers, symmetry) in [(1, false), (1, true), (3, true)] {
            let out = find_countermodel(theory, &f, &bounds(n, k, workers, symmetry), &caps).unwrap();
            assert_eq!(out.countermodel().is_none(), expected, "{theory} {s} workers={workers}");
            if let Some(r) = out.countermodel() {
                assert!(!crate::relational::satisfies(&r.model, r.world, &f).unwrap());
                assert!(r.model.world_count() <= n);
                assert!(r.model.frame.relations.len() <= k);
            }
        }
    }
}

#[test]
fn countermodels_are_smallest_and_deterministic() {
    let caps = Caps::default();
    let f = formula(Theory::Rum, "[a]p -> [a][a]p");
    let one = find_countermodel(Theory::Rum, &f, &bounds(3, 2, 1, false), &caps).unwrap();
    let many = find_countermodel(Theory::Rum, &f, &bounds(3, 2, 4, true), &caps).unwrap();
    assert_eq!(one, many);
    let r = one.countermodel().expect("not transitive");
    assert_eq!(r.model.world_count(), 2);
    assert!(find_countermodel(Theory::Rum, &f, &bounds(r.model.world_count() - 1, 2, 1, false), &caps)
        .unwrap()
        .countermodel()
        .is_none());
    assert!(r.trace.iter().any(|(g, _)| g == &f));
}

#[test]
fn batch_matches_single_searches() {
    let caps = Caps::default();
    let fs: Vec<Formula> = ["[a]p -> p", "[a](p -> q) -> [a]p -> [a]q", "<a . b>p -> <a>p", "[a . b]true", "p"]
        .iter()
        .map(|s| formula(Theory::Rum, s))
        .collect();
    let b = bounds(2, 2, 2, true);
    let batch = find_countermodels(Theory::Rum, &fs, &b, &caps).unwrap();
    for (f, r) in fs.iter().zip(&batch) {
        let single = find_countermodel(Theory::Rum, f, &b, &caps).unwrap();
        assert_eq!(single.countermodel().is_some(), r.is_some(), "{f:?}");
        if let Some(r) = r {
            assert_eq!(r.model.world_count(), single.countermodel().unwrap().model.world_count());
        }
    }
}

#[test]
fn many_propositions_spill_out_of_the_lane_word() {
    let caps = Caps::default();
    let f = formula(Theory::Sl, "[a](p & q & s) -> [a]p & [a]q & [a]s");
    assert!(find_countermodel(Theory::Sl, &f, &bounds(3, 1, 1, true), &caps).unwrap().countermodel().is_none());
    let g = formula(Theory::Sl, "<a>(p | q | s) -> <a>p | <a>q | <a>s");
    let r = find_countermodel(Theory::Sl, &g, &bounds(3, 1, 1, true), &caps).unwrap();
    assert!(r.countermodel().is_some());
}

#[test]
fn operators_outside_the_theory_are_rejected() {
    let f = formula(Theory::Rum, "[a . b]p");
    assert!(find_countermodel(Theory::Sl, &f, &SearchBounds::new(1, 1), &Caps::default()).is_err());
}

#[test]
fn literal_reflexive_axiom_fails() {
    let caps = Caps::default();
    let b = bounds(2, 2, 1, true);
    let literal = formula(Theory::Csl, "[a]p -> p");
    let r = find_countermodel(Theory::Csl, &literal, &b, &caps).unwrap();
    // a world with no relation in a satisfies [a]⊥
    let r = r.countermodel().unwrap();
    assert!(r.model.group_val["a"].0[r.world].is_empty());
    let read = formula(Theory::Csl, "<a>p -> p");
    assert!(find_countermodel(Theory::Csl, &read, &b, &caps).unwrap().countermodel().is_none());
}

#[test]
fn harness_on_small_bounds() {
    let caps = Caps::default();
    for theory in Theory::ALL {
        let report = soundness_harness(theory, &bounds(2, 1, 1, true), &caps).unwrap();
        assert!(report.passed(), "{theory}: {} failures", report.failures());
        assert!(!report.axioms.is_empty());
        // Nec with a tautological premise
        assert!(report.rules.iter().any(|r| r.premises_hold));
    }
}

#[test]
fn time_limit_is_reported() {
    let f = formula(Theory::Rum, "[a . b][a]p -> [a][b . a]p | [b]p");
    let b = SearchBounds {
        time_limit: Some(Duration::from_nanos(1)),
        ..bounds(3, 2, 1, false)
    };
    match find_countermodel(Theory::Rum, &f, &b, &Caps::default()) {
        Err(e) => assert!(e.is_cap()),
        Ok(o) => assert!(o.countermodel().is_some()),
    }
}
