//! Acceptance suite. Every criterion prints one PASS/FAIL line with its
//! timing. Criteria known to fail are listed in `KNOWN_RED` together with the
//! reason; the test fails on any other failure and on a stale entry.
//!
//! Run with `cargo test -p intensio --test acceptance -- --nocapture`.
//! `ACCEPTANCE_ONLY=1,5` restricts the run to the listed criteria.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::{Duration, Instant};

use intensio::duality::{canonical_morphism_check, check_sigma_frame, complex_algebra};
use intensio::neighborhood::{
    box_nbhd, dia_nbhd, distinguishing_depth, greatest_bisimulation, n_eval_term, nbhd_to_rel, rel_to_nbhd,
    NeighborhoodFrame, NeighborhoodModel, Neighborhoods,
};
use intensio::random::{random_formula, random_model, random_neighborhood_model, random_sigma_frame};
use intensio::relational::{
    all_intensions, box_plus, dia_plus, satisfies, Evaluator, Intension, RelSet, RelationalFrame, RelationalModel,
    Relations,
};
use intensio::search::{find_countermodel, soundness_harness, SearchBounds};
use intensio::theories::{rum_compose, Family};
use intensio::{parse_formula, parse_term, render_formula, Caps, GroupTerm, Theory, WorldSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `(criterion, part)` pairs expected to fail, with the reason.
const KNOWN_RED: &[(u32, &str, &str)] = &[
    (4, "ba random", BA_M2),
    (4, "ba complex", BA_M2),
];

const BA_M2: &str = "G(a) depends only on the [a] and <a> rows of a, and under the Boolean \
    signature two elements with equal rows can have complements with different rows, so the \
    lifted complement is not well defined and (m2) fails";

#[derive(Default)]
struct Report {
    notes: Vec<String>,
    /// `(part, message)`; a criterion passes when this is empty.
    failures: Vec<(String, String)>,
}

impl Report {
    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn fail(&mut self, part: impl Into<String>, msg: impl Into<String>) {
        self.failures.push((part.into(), msg.into()));
    }
}

struct Row {
    id: u32,
    failures: Vec<(String, String)>,
}

fn selected(id: u32) -> bool {
    match std::env::var("ACCEPTANCE_ONLY") {
        Ok(list) => list.split(',').any(|s| s.trim().parse() == Ok(id)),
        Err(_) => true,
    }
}

fn criterion(id: u32, name: &str, budget: Duration, body: impl FnOnce(&mut Report)) -> Option<Row> {
    if !selected(id) {
        return None;
    }
    let start = Instant::now();
    let mut report = Report::default();
    body(&mut report);
    let elapsed = start.elapsed();
    if elapsed > budget {
        report.fail("time", format!("took {:.1}s, budget {}s", elapsed.as_secs_f64(), budget.as_secs()));
    }
    let verdict = if report.failures.is_empty() { "PASS" } else { "FAIL" };
    println!(
        "{verdict} {id} {name} ({:.2}s of {}s): {}",
        elapsed.as_secs_f64(),
        budget.as_secs(),
        report.notes.join("; ")
    );
    for (part, msg) in &report.failures {
        println!("    [{part}] {msg}");
    }
    Some(Row {
        id,
        failures: report.failures,
    })
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn names(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ws(worlds: &[usize]) -> WorldSet {
    WorldSet::from_worlds(worlds.iter().copied())
}

/// Every subset of `0..n` with at most two members.
fn small_families(n: usize, admits: impl Fn(WorldSet) -> bool) -> Vec<Family> {
    let sets: Vec<WorldSet> = (0..1u64 << n).map(WorldSet).filter(|&x| admits(x)).collect();
    let mut out = vec![Family::new()];
    for (i, &x) in sets.iter().enumerate() {
        out.push(Family::from([x]));
        for &y in &sets[i + 1..] {
            out.push(Family::from([x, y]));
        }
    }
    out
}

/// All vectors picking one option per position.
fn product<T: Clone>(options: &[Vec<T>]) -> Vec<Vec<T>> {
    options.iter().fold(vec![vec![]], |acc, opts| {
        acc.into_iter()
            .flat_map(|v| {
                opts.iter().map(move |o| {
                    let mut next = v.clone();
                    next.push(o.clone());
                    next
                })
            })
            .collect()
    })
}

/// Frames on `n` worlds with at most `k` pairwise distinct relations, taken
/// as sets: relation order and duplicates do not change any semantics here.
fn frames(theory: Theory, n: usize, k: usize) -> Vec<RelationalFrame> {
    let images: Vec<Vec<WorldSet>> = (0..n)
        .map(|w| (0..1u64 << n).map(WorldSet).filter(|&x| theory.admits_image(w, x)).collect())
        .collect();
    let relations = product(&images);
    let mut chosen: Vec<Vec<usize>> = vec![vec![]];
    let mut out = vec![];
    while let Some(ids) = chosen.pop() {
        let rels = Relations::from_images(n, ids.iter().map(|&i| relations[i].clone()).collect()).unwrap();
        out.push(RelationalFrame::unlabeled(theory, rels).unwrap());
        if ids.len() < k {
            let from = ids.last().map_or(0, |&i| i + 1);
            for i in from..relations.len() {
                let mut next = ids.clone();
                next.push(i);
                chosen.push(next);
            }
        }
    }
    out
}

fn composition_model() -> RelationalModel {
    let rels = Relations::from_images(
        3,
        vec![
            vec![ws(&[1, 2]), WorldSet::EMPTY, WorldSet::EMPTY],
            vec![WorldSet::EMPTY, ws(&[1]), WorldSet::EMPTY],
        ],
    )
    .unwrap();
    let frame = RelationalFrame::new(Theory::Rum, names(&["w", "u", "v"]), names(&["r", "q"]), rels).unwrap();
    let a = Intension(vec![RelSet::from([0]), RelSet::new(), RelSet::new()]);
    let b = Intension(vec![RelSet::new(), RelSet::from([1]), RelSet::new()]);
    RelationalModel::new(
        frame,
        BTreeMap::from([("p".to_string(), ws(&[1]))]),
        BTreeMap::from([("a".to_string(), a), ("b".to_string(), b)]),
    )
    .unwrap()
}

fn c1_composition(r: &mut Report) {
    let m = composition_model();
    let sig = Theory::Rum.signature();
    for (text, expected) in [
        ("<a . b>p", true),
        ("<a><b>p", false),
        ("<a>([b]false | <b>p)", true),
    ] {
        let got = satisfies(&m, 0, &parse_formula(text, &sig).unwrap()).unwrap();
        if got != expected {
            r.fail("model", format!("w satisfies {text}: {got}, expected {expected}"));
        }
    }
    r.note("three truth values at w as expected");
    let f = parse_formula("<a . b>p -> <a><b>p", &sig).unwrap();
    match find_countermodel(Theory::Rum, &f, &SearchBounds::new(3, 2), &Caps::default()).unwrap().countermodel() {
        Some(c) => {
            if satisfies(&c.model, c.world, &f).unwrap() {
                r.fail("search", "reported countermodel satisfies the formula");
            }
            r.note(format!("search found a {}-world countermodel", c.model.world_count()));
        }
        None => r.fail("search", "no countermodel within (3, 2)"),
    }
}

fn c2_soundness(r: &mut Report) {
    // formulas whose truth at w depends on w's configuration alone are
    // decided world by world, so only RUM scans whole models
    let bounds = SearchBounds::new(3, 2);
    for theory in Theory::ALL {
        let start = Instant::now();
        let rep = soundness_harness(theory, &bounds, &Caps::default()).unwrap();
        r.note(format!(
            "{theory}: {} axiom + {} rule instances, {} whole models scanned, {:.1}s",
            rep.axioms.len(),
            rep.rules.len(),
            rep.models_visited,
            start.elapsed().as_secs_f64()
        ));
        for a in rep.axioms.iter().filter(|a| a.counter.is_some()) {
            r.fail(theory.name(), format!("axiom {} fails", render_formula(&a.formula)));
        }
        for x in rep.rules.iter().filter(|x| x.counter.is_some()) {
            r.fail(theory.name(), format!("rule fails: {}", render_formula(&x.conclusion)));
        }
    }
}

fn c3_non_theorems(r: &mut Report) {
    let bounds = SearchBounds::new(3, 2);
    for (theory, text) in [
        (Theory::Sl, "[a]p -> <a>p"),
        (Theory::Rum, "<a . b>p -> <a><b>p"),
        (Theory::Empty, "<a>p & <a>q -> <a>(p & q)"),
        (Theory::Csl, "<a^>p -> <a>p"),
    ] {
        let f = parse_formula(text, &theory.signature()).unwrap();
        match find_countermodel(theory, &f, &bounds, &Caps::default()).unwrap().countermodel() {
            Some(c) if !satisfies(&c.model, c.world, &f).unwrap() => {
                r.note(format!("{theory} {text}: {} worlds", c.model.world_count()))
            }
            Some(_) => r.fail(theory.name(), format!("{text}: reported countermodel satisfies it")),
            None => r.fail(theory.name(), format!("{text}: no countermodel")),
        }
    }
}

fn c4_canonical(r: &mut Report) {
    for theory in Theory::ALL {
        let mut g = rng(4);
        let mut failed = 0;
        let mut first = None;
        for i in 0..100 {
            let sf = random_sigma_frame(&mut g, theory, 3, 4);
            if let Some(v) = check_sigma_frame(&sf) {
                r.fail(format!("{theory} random"), format!("sample {i} is not a valid frame: {v}"));
                continue;
            }
            if let Some(v) = canonical_morphism_check(&sf).unwrap().violation {
                failed += 1;
                first.get_or_insert(format!("sample {i}: {v}"));
            }
        }
        if let Some(first) = first {
            r.fail(format!("{theory} random"), format!("{failed} of 100 frames fail, first {first}"));
        }
    }
    r.note("100 random frames per theory");

    let caps = Caps {
        carrier: 1 << 16,
        ..Caps::default()
    };
    for theory in Theory::ALL {
        let mut count = 0;
        let mut largest = 0;
        let mut failed = 0;
        let mut first = None;
        for n in 1..=2 {
            for fr in frames(theory, n, 2) {
                let seeds = all_intensions(&fr);
                let ca = complex_algebra(&fr, &seeds, &caps).unwrap();
                count += 1;
                largest = largest.max(ca.sigma.group_elements.len());
                let bad = match check_sigma_frame(&ca.sigma) {
                    Some(v) => Some(format!("not a valid frame: {v}")),
                    None => canonical_morphism_check(&ca.sigma).unwrap().violation.map(|v| v.to_string()),
                };
                if let Some(v) = bad {
                    failed += 1;
                    first.get_or_insert(format!("{:?}: {v}", fr.relations));
                }
            }
        }
        r.note(format!("{theory}: {count} complex algebras, up to {largest} elements"));
        if let Some(first) = first {
            r.fail(format!("{theory} complex"), format!("{failed} of {count} fail, first {first}"));
        }
    }
}

/// Terms over the single group variable `a` with at most two operators.
fn probe_terms(theory: Theory) -> Vec<GroupTerm> {
    let texts: &[&str] = match theory {
        Theory::Empty | Theory::Ba => &["a"],
        Theory::Sl => &["a", "0", "a + 0"],
        Theory::Rum => &["a", "1", "a . a", "a . (a . a)"],
        Theory::Csl => &["a", "0", "a^", "a + a^", "(a + 0)^"],
    };
    texts
        .iter()
        .map(|t| parse_term(t, &theory.signature()).unwrap())
        .collect()
}

fn c5_round_trips(r: &mut Report) {
    // ν round trip over every family of at most two neighborhoods per world
    for theory in Theory::ALL {
        let mut count = 0;
        for n in 1..=3 {
            let options: Vec<Vec<Family>> = (0..n)
                .map(|w| small_families(n, |x| theory.admits_image(w, x)))
                .collect();
            for nu in product(&options) {
                let m = NeighborhoodModel::unlabeled(
                    theory,
                    n,
                    BTreeMap::from([("a".to_string(), Neighborhoods(nu))]),
                    BTreeMap::new(),
                )
                .unwrap();
                count += 1;
                if rel_to_nbhd(&nbhd_to_rel(&m).unwrap()).group_val != m.group_val {
                    r.fail(format!("{theory} nu"), format!("{:?} changes", m.group_val["a"]));
                }
            }
        }
        r.note(format!("{theory}: ν kept on {count} models"));
    }

    // Truth agreement. With one proposition and one group variable every
    // formula's truth set is built from p, the Boolean connectives and the
    // set maps S ↦ [t]S, S ↦ ⟨t⟩S. Equal maps on every S ⊆ W in all three
    // models give equal truth sets for every formula over the probed terms,
    // whatever the valuation of p, so one pass per (frame, a) covers all
    // models on that frame. The translated side depends only on the images
    // of a, so it is computed once per image family.
    for theory in Theory::ALL {
        let start = Instant::now();
        let terms = probe_terms(theory);
        let mut models = 0u64;
        for n in 1..=3 {
            let mut translated: HashMap<u32, Vec<Vec<(WorldSet, WorldSet)>>> = HashMap::new();
            for fr in frames(theory, n, 2) {
                let mut intensions = all_intensions(&fr).into_iter();
                let first = intensions.next().expect("at least the empty intension");
                let mut m = RelationalModel::new(
                    fr.clone(),
                    BTreeMap::new(),
                    BTreeMap::from([("a".to_string(), first.clone())]),
                )
                .unwrap();
                for a in std::iter::once(first).chain(intensions) {
                    models += 1;
                    // image family of a at each world, one byte per world
                    let key = (0..n).fold(0u32, |k, w| {
                        let fam = fr.relations.images_of(&a, w);
                        k | fam.iter().fold(0u32, |m, x| m | 1 << x.bits()) << (8 * w)
                    });
                    *m.group_val.get_mut("a").unwrap() = a;
                    let expected = translated.entry(key).or_insert_with(|| {
                        let nm = rel_to_nbhd(&m);
                        let back = nbhd_to_rel(&nm).unwrap();
                        let mut e = Evaluator::new(&back);
                        terms
                            .iter()
                            .map(|t| {
                                let nu = n_eval_term(&nm, t).unwrap();
                                let i = e.eval_term(t).unwrap();
                                let via_nbhd = modal_table(n, |s| (box_nbhd(&nu, s), dia_nbhd(&nu, s)));
                                let via_back =
                                    modal_table(n, |s| (box_plus(e.relations(), &i, s), dia_plus(e.relations(), &i, s)));
                                if via_nbhd != via_back {
                                    r.fail(format!("{theory} truth"), format!("{t:?}: nbhd_to_rel changes {:?}", nm.group_val["a"]));
                                }
                                via_nbhd
                            })
                            .collect()
                    });
                    let mut e = Evaluator::new(&m);
                    for (t, want) in terms.iter().zip(expected.iter()) {
                        let i = e.eval_term(t).unwrap();
                        let agrees = want.iter().enumerate().all(|(s, &(b, d))| {
                            let s = WorldSet(s as u64);
                            box_plus(e.relations(), &i, s) == b && dia_plus(e.relations(), &i, s) == d
                        });
                        if !agrees {
                            r.fail(
                                format!("{theory} truth"),
                                format!("{t:?} disagrees with rel_to_nbhd on {:?}, a = {:?}", fr.relations, m.group_val["a"]),
                            );
                        }
                    }
                }
            }
        }
        r.note(format!(
            "{theory}: truth agrees on {models} models, {} terms, {:.0}s",
            terms.len(),
            start.elapsed().as_secs_f64()
        ));
    }
}

/// `S ↦ ([t]S, ⟨t⟩S)` over every `S ⊆ W`.
fn modal_table(n: usize, f: impl Fn(WorldSet) -> (WorldSet, WorldSet)) -> Vec<(WorldSet, WorldSet)> {
    (0..1u64 << n).map(|s| f(WorldSet(s))).collect()
}

/// Composition by enumerating variants of `g`: one image per world, or ∅
/// where `g` has none, unioned along each image of `f` at `w`.
fn compose_oracle(f_images: &Family, g: &[Family]) -> Family {
    let options: Vec<Vec<WorldSet>> = g
        .iter()
        .map(|fam| if fam.is_empty() { vec![WorldSet::EMPTY] } else { fam.iter().copied().collect() })
        .collect();
    let variants = product(&options);
    f_images
        .iter()
        .flat_map(|x| {
            variants
                .iter()
                .map(move |v| x.iter().fold(WorldSet::EMPTY, |acc, u| acc.union(v[u])))
        })
        .collect()
}

/// Relations realizing one family per world, each image on its own relation
/// (empty elsewhere), and the intension collecting them.
fn realize(rels: &mut Relations, families: &[Family], caps: &Caps) -> Intension {
    let n = families.len();
    Intension(
        families
            .iter()
            .enumerate()
            .map(|(w, fam)| {
                fam.iter()
                    .map(|&x| {
                        let mut r = vec![WorldSet::EMPTY; n];
                        r[w] = x;
                        rels.materialize(r, caps).unwrap()
                    })
                    .collect()
            })
            .collect(),
    )
}

fn c6_compose(r: &mut Report) {
    let caps = Caps::default();
    let mut checked = 0u64;
    let mut check = |f: &[Family], g: &[Family], r: &mut Report| {
        let n = f.len();
        let mut rels = Relations::new(n);
        let fi = realize(&mut rels, f, &caps);
        let gi = realize(&mut rels, g, &caps);
        let comp = rum_compose(&mut rels, &fi, &gi, &caps).unwrap();
        for w in 0..n {
            let expected = compose_oracle(&f[w], g);
            if rels.images_of(&comp, w) != expected {
                r.fail("compose", format!("f {f:?}, g {g:?}, world {w}"));
            }
        }
        checked += 1;
    };
    for n in 1..=2 {
        let all = product(&vec![small_families(n, |_| true); n]);
        for f in &all {
            for g in &all {
                check(f, g, r);
            }
        }
    }
    // on three worlds the composite at w depends on f only through f(w), so
    // f ranges over families supported at a single world
    let fams = small_families(3, |_| true);
    let gs = product(&vec![fams.clone(); 3]);
    for w in 0..3 {
        for fw in &fams {
            let mut f = vec![Family::new(); 3];
            f[w] = fw.clone();
            for g in &gs {
                check(&f, g, r);
            }
        }
    }
    r.note(format!("{checked} (f, g) pairs"));
}

fn c7_bisimulation(r: &mut Report) {
    let mut g = rng(7);
    let p = names(&["p"]);
    let a = names(&["a"]);
    let pairs = [(GroupTerm::var("a"), GroupTerm::var("a"))];
    let mut related = 0;
    let mut separated = 0;
    let draw = |g: &mut ChaCha8Rng, theory: Theory| -> NeighborhoodModel {
        let n = g.gen_range(1..=3);
        if g.gen_bool(0.5) {
            let k = g.gen_range(0..=2);
            rel_to_nbhd(&random_model(g, theory, n, k, &p, &a))
        } else {
            random_neighborhood_model(g, theory, n, 2, &p, &a)
        }
    };
    for i in 0..200 {
        let theory = Theory::ALL[i % Theory::ALL.len()];
        let m1 = draw(&mut g, theory);
        let m2 = draw(&mut g, theory);
        let b = greatest_bisimulation(&m1, &m2, &pairs).unwrap();
        let (n1, n2) = (m1.world_count(), m2.world_count());
        for w1 in 0..n1 {
            for w2 in 0..n2 {
                if b.contains(&(w1, w2)) {
                    related += 1;
                    if let Some(d) = distinguishing_depth(&m1, w1, &m2, w2, 3, &p, &a).unwrap() {
                        r.fail("related", format!("pair {i} ({w1}, {w2}) separated at depth {d}"));
                    }
                } else if distinguishing_depth(&m1, w1, &m2, w2, n1 * n2, &p, &a).unwrap().is_some() {
                    separated += 1;
                } else {
                    r.fail(
                        "unrelated",
                        format!(
                            "pair {i} ({w1}, {w2}) not separated up to depth {}: {:?} / {:?}",
                            n1 * n2,
                            m1.group_val["a"],
                            m2.group_val["a"]
                        ),
                    );
                }
            }
        }
    }
    r.note(format!("200 pairs, {related} related world pairs, {separated} unrelated and separated"));
}

fn c8_a8(r: &mut Report) {
    let caps = Caps::default();
    let a8 = parse_formula("<a + b>p <-> <a>p | <b>p", &Theory::Sl.signature()).unwrap();
    let mut count = 0;
    let mut closed = 0;
    let mut run = |nu: Vec<Neighborhoods>, r: &mut Report| {
        let fr = NeighborhoodFrame::free_semilattice(nu[0].0.len(), 2, nu).unwrap();
        let valid = fr.frame_valid(&a8, &caps).unwrap().is_none();
        let condition = fr.join_closure_violation().unwrap().is_none();
        count += 1;
        closed += condition as usize;
        if valid != condition {
            r.fail("a8", format!("valid {valid}, condition {condition} on {:?}", fr.nu));
        }
    };
    // one world: every ν for 0, a, b, a+b
    let fams = small_families(1, |_| true);
    for choice in product(&vec![fams.clone(); 4]) {
        run(choice.into_iter().map(|f| Neighborhoods(vec![f])).collect(), r);
    }
    // two worlds: ν_0 = ∅ as a5 and a6 require
    let fams = small_families(2, |_| true);
    for choice in product(&vec![fams.clone(); 6]) {
        let mut nu = vec![Neighborhoods::empty(2)];
        nu.extend(choice.chunks(2).map(|c| Neighborhoods(c.to_vec())));
        run(nu, r);
    }
    r.note(format!("{count} frames, {closed} satisfy the closure condition"));
}

fn c9_syntax(r: &mut Report) {
    let mut g = rng(9);
    let props = names(&["p", "q", "r"]);
    let groups = names(&["a", "b", "c"]);
    let mut sizes = 0;
    for i in 0..10_000 {
        let theory = Theory::ALL[i % Theory::ALL.len()];
        let depth = g.gen_range(0..=6);
        let f = random_formula(&mut g, theory, depth, &props, &groups);
        sizes += f.size();
        let text = render_formula(&f);
        match parse_formula(&text, &theory.signature()) {
            Ok(back) if back == f => {}
            Ok(_) => r.fail(theory.name(), format!("{text} parses to a different tree")),
            Err(e) => r.fail(theory.name(), format!("{text}: {e}")),
        }
    }
    r.note(format!("10000 formulas, {sizes} nodes"));
}

#[test]
fn acceptance() {
    let rows: Vec<Row> = [
        criterion(1, "composition example", secs(5), c1_composition),
        criterion(2, "soundness suites at (3, 2)", secs(600), c2_soundness),
        criterion(3, "non-theorem countermodels", secs(120), c3_non_theorems),
        criterion(4, "canonical morphism", secs(300), c4_canonical),
        criterion(5, "translation round trips", secs(300), c5_round_trips),
        criterion(6, "composition oracle", secs(120), c6_compose),
        criterion(7, "bisimulation and modal equivalence", secs(300), c7_bisimulation),
        criterion(8, "a8 correspondence", secs(120), c8_a8),
        criterion(9, "syntax round trip", secs(30), c9_syntax),
    ]
    .into_iter()
    .flatten()
    .collect();

    let known: BTreeSet<(u32, &str)> = KNOWN_RED
        .iter()
        .filter(|&&(c, _, _)| selected(c))
        .map(|&(c, p, _)| (c, p))
        .collect();
    let mut seen = BTreeSet::new();
    let mut unexpected = vec![];
    for row in &rows {
        for (part, msg) in &row.failures {
            match known.get(&(row.id, part.as_str())) {
                Some(&k) => {
                    seen.insert(k);
                }
                None => unexpected.push(format!("{} [{part}] {msg}", row.id)),
            }
        }
    }
    for &(c, p, why) in KNOWN_RED {
        if seen.contains(&(c, p)) {
            println!("known red {c} [{p}]: {why}");
        }
    }
    let stale: Vec<_> = known.difference(&seen).collect();
    assert!(unexpected.is_empty(), "unexpected failures:\n{}", unexpected.join("\n"));
    assert!(stale.is_empty(), "known red entries that now pass: {stale:?}");
}
