use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use intensio::document::{neighborhood_to_json, model_to_json, sigma_frame_to_json, CountermodelDoc, ModelDoc};
use intensio::duality::{canonical_morphism_check, check_sigma_frame, complex_algebra, ultrafilter_frame};
use intensio::neighborhood::{distinguishing_depth, greatest_bisimulation, nbhd_to_rel, NeighborhoodEvaluator, NeighborhoodModel};
use intensio::relational::{Evaluator, Intension, RelationalModel};
use intensio::search::{find_countermodel, SearchBounds, SearchOutcome};
use intensio::theories::lcs_closure_set;
use intensio::{parse_formula, parse_term, render_formula, render_term, Caps, Formula, GroupTerm, Theory, WorldSet};
use serde_json::{json, Value};

use crate::input::{self, Loaded};
use crate::{Failure, Format, Outcome, Target};

fn names(labels: &[String], s: WorldSet) -> Vec<String> {
    s.iter().map(|w| labels[w].clone()).collect()
}

fn braces(labels: &[String], s: WorldSet) -> String {
    format!("{{{}}}", names(labels, s).join(", "))
}

fn world_index(labels: &[String], name: &str) -> Result<usize, Failure> {
    labels
        .iter()
        .position(|l| l == name)
        .ok_or_else(|| Failure::Invalid(format!("unknown world '{name}'")))
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("values serialize"));
}

pub fn parse(fmt: Format, theory: Theory, term: bool, text: &str) -> Outcome {
    let sig = theory.signature();
    if term {
        let t = parse_term(text, &sig)?;
        match fmt {
            Format::Human => println!("{}", render_term(&t)),
            Format::Json => print_json(&json!({
                "term": render_term(&t),
                "size": t.size(),
                "groups": t.variables(),
            })),
        }
    } else {
        let f = parse_formula(text, &sig)?;
        let (props, groups) = f.variables_of();
        match fmt {
            Format::Human => println!("{}", render_formula(&f)),
            Format::Json => print_json(&json!({
                "formula": render_formula(&f),
                "size": f.size(),
                "modal_depth": f.modal_depth(),
                "props": props,
                "groups": groups,
            })),
        }
    }
    Ok(true)
}

/// A model formulas can be evaluated on.
enum Subject {
    Rel(RelationalModel),
    Nbhd(NeighborhoodModel),
}

impl Subject {
    fn labels(&self) -> &[String] {
        match self {
            Subject::Rel(m) => &m.frame.labels,
            Subject::Nbhd(m) => &m.labels,
        }
    }

    fn theory(&self) -> Theory {
        match self {
            Subject::Rel(m) => m.theory(),
            Subject::Nbhd(m) => m.theory,
        }
    }

    /// Truth sets of `f` and, when asked, of each subformula.
    fn eval(&self, f: &Formula, trace: bool, caps: &Caps) -> Result<(WorldSet, Vec<(Formula, WorldSet)>), Failure> {
        match self {
            Subject::Rel(m) => {
                let mut ev = Evaluator::with_caps(m, *caps);
                let truth = ev.eval_formula(f)?;
                let lines = if trace { ev.trace(f)? } else { vec![] };
                Ok((truth, lines))
            }
            Subject::Nbhd(m) => {
                let mut ev = NeighborhoodEvaluator::new(m);
                let truth = ev.eval_formula(f)?;
                let mut lines = vec![];
                if trace {
                    for g in f.subformulas() {
                        lines.push((g.clone(), ev.eval_formula(g)?));
                    }
                }
                Ok((truth, lines))
            }
        }
    }
}

pub fn check(fmt: Format, file: &Path, formulas: &[String], world: Option<&str>, trace: bool, caps: &Caps) -> Outcome {
    let (subject, default_world) = match input::load(file)? {
        Loaded::Sigma(_) => return Err(Failure::Invalid("check expects a model, got a two-sorted frame".into())),
        Loaded::Countermodel { model, formula, world: w } if formulas.is_empty() => {
            return recheck(fmt, &model, &formula, world.unwrap_or(&w), caps);
        }
        Loaded::Countermodel { model, world: w, .. } => (Subject::Rel(model), Some(w)),
        Loaded::Relational(m) => (Subject::Rel(m), None),
        Loaded::Neighborhood(m) => (Subject::Nbhd(m), None),
    };
    if formulas.is_empty() {
        return Err(Failure::Invalid("no formula given".into()));
    }
    let labels = subject.labels().to_vec();
    let at = world
        .map(str::to_string)
        .or(default_world)
        .map(|w| world_index(&labels, &w))
        .transpose()?;
    let sig = subject.theory().signature();
    let mut ok = true;
    let mut results = vec![];
    for text in formulas {
        let f = parse_formula(text, &sig)?;
        let (truth, lines) = subject.eval(&f, trace, caps)?;
        let holds = at.map(|w| truth.contains(w));
        ok &= holds.unwrap_or(true);
        match fmt {
            Format::Human => {
                println!("{}: {}", render_formula(&f), braces(&labels, truth));
                if let (Some(w), Some(h)) = (at, holds) {
                    println!("  {} at {}", if h { "holds" } else { "fails" }, labels[w]);
                }
                for (g, s) in &lines {
                    println!("  {}: {}", render_formula(g), braces(&labels, *s));
                }
            }
            Format::Json => {
                let mut r = json!({ "formula": render_formula(&f), "worlds": names(&labels, truth) });
                if let (Some(w), Some(h)) = (at, holds) {
                    r["world"] = json!(labels[w]);
                    r["holds"] = json!(h);
                }
                if trace {
                    r["trace"] = lines
                        .iter()
                        .map(|(g, s)| json!({ "formula": render_formula(g), "worlds": names(&labels, *s) }))
                        .collect();
                }
                results.push(r);
            }
        }
    }
    if fmt == Format::Json {
        print_json(&json!({ "results": results }));
    }
    Ok(ok)
}

/// Re-evaluates a countermodel's own formula; succeeds when it still fails at its world.
fn recheck(fmt: Format, model: &RelationalModel, formula: &str, world: &str, caps: &Caps) -> Outcome {
    let labels = &model.frame.labels;
    let w = world_index(labels, world)?;
    let f = parse_formula(formula, &model.theory().signature())?;
    let truth = Evaluator::with_caps(model, *caps).eval_formula(&f)?;
    let holds = truth.contains(w);
    match fmt {
        Format::Human => {
            if holds {
                println!("{} holds at {}: not a countermodel", render_formula(&f), world);
            } else {
                println!("{} fails at {}: countermodel confirmed", render_formula(&f), world);
            }
        }
        Format::Json => print_json(&json!({
            "formula": render_formula(&f),
            "world": world,
            "holds": holds,
            "countermodel_confirmed": !holds,
        })),
    }
    Ok(!holds)
}

fn describe_model(m: &RelationalModel) -> Vec<String> {
    let fr = &m.frame;
    let labels = &fr.labels;
    let mut out = vec![format!("worlds: {}", labels.join(", "))];
    for (r, name) in fr.relation_names.iter().enumerate() {
        let edges: Vec<String> = (0..fr.world_count())
            .filter(|&w| !fr.relations.image(r, w).is_empty())
            .map(|w| format!("{} -> {}", labels[w], braces(labels, fr.relations.image(r, w))))
            .collect();
        out.push(format!("relation {name}: {}", if edges.is_empty() { "empty".into() } else { edges.join("; ") }));
    }
    for (g, f) in &m.group_val {
        let ext: Vec<String> = f
            .0
            .iter()
            .enumerate()
            .filter(|(_, e)| !e.is_empty())
            .map(|(w, e)| {
                let rs: Vec<&str> = e.iter().map(|&r| fr.relation_names[r].as_str()).collect();
                format!("{}: {{{}}}", labels[w], rs.join(", "))
            })
            .collect();
        out.push(format!("group {g}: {}", if ext.is_empty() { "empty".into() } else { ext.join("; ") }));
    }
    for (p, s) in &m.prop_val {
        out.push(format!("prop {p}: {}", braces(labels, *s)));
    }
    out
}

pub fn search(fmt: Format, theory: Theory, text: &str, bounds: &SearchBounds, expect: Option<bool>, caps: &Caps) -> Outcome {
    let f = parse_formula(text, &theory.signature())?;
    let start = Instant::now();
    let out = find_countermodel(theory, &f, bounds, caps)?;
    let elapsed = start.elapsed();
    let found = out.countermodel().is_some();
    match fmt {
        Format::Human => match &out {
            SearchOutcome::Countermodel(r) => {
                let m = &r.model;
                println!(
                    "countermodel: {} fails at {} ({} worlds, {} relations)",
                    render_formula(&f),
                    m.frame.labels[r.world],
                    m.world_count(),
                    m.frame.relations.len()
                );
                for line in describe_model(m) {
                    println!("  {line}");
                }
                println!("trace:");
                for (g, s) in &r.trace {
                    println!("  {}: {}", render_formula(g), braces(&m.frame.labels, *s));
                }
            }
            SearchOutcome::NoneWithinBounds { models_visited } => println!(
                "no countermodel with at most {} worlds and {} relations ({} models visited)",
                bounds.max_worlds, bounds.max_relations, models_visited
            ),
        },
        Format::Json => {
            let (verdict, visited, counter) = match &out {
                SearchOutcome::Countermodel(r) => (
                    "countermodel",
                    Value::Null,
                    serde_json::to_value(CountermodelDoc::from_report(r)).expect("documents serialize"),
                ),
                SearchOutcome::NoneWithinBounds { models_visited } => {
                    ("none_within_bounds", json!(u64::try_from(*models_visited).unwrap_or(u64::MAX)), Value::Null)
                }
            };
            print_json(&json!({
                "theory": theory.name(),
                "formula": render_formula(&f),
                "max_worlds": bounds.max_worlds,
                "max_rels": bounds.max_relations,
                "verdict": verdict,
                "models_visited": visited,
                "elapsed_ms": elapsed.as_millis() as u64,
                "countermodel": counter,
            }));
        }
    }
    match expect {
        Some(e) if e != found => {
            eprintln!(
                "expected {}",
                if e { "a countermodel" } else { "no countermodel" }
            );
            Ok(false)
        }
        _ => Ok(true),
    }
}

pub fn translate(file: &Path, to: Target) -> Outcome {
    let loaded = input::load(file)?;
    match to {
        Target::Nbhd => {
            let m = loaded.relational()?;
            println!("{}", neighborhood_to_json(&intensio::neighborhood::rel_to_nbhd(&m)));
        }
        Target::Rel => match loaded {
            Loaded::Neighborhood(m) => println!("{}", model_to_json(&nbhd_to_rel(&m)?)),
            other => {
                return Err(Failure::Invalid(format!(
                    "expected a neighborhood model, got a {}",
                    other.kind()
                )))
            }
        },
    }
    Ok(true)
}

/// Position of `f` in the carrier, up to the identification the algebra uses.
fn element_of(model: &RelationalModel, rels: &intensio::relational::Relations, carrier: &[Intension], f: &Intension) -> Option<usize> {
    let n = model.world_count();
    carrier.iter().position(|c| {
        if model.theory().image_level() {
            (0..n).all(|w| rels.images_of(c, w) == rels.images_of(f, w))
        } else {
            c == f
        }
    })
}

pub fn dual_complex(fmt: Format, file: &Path, caps: &Caps) -> Outcome {
    let m = input::load(file)?.relational()?;
    let seeds: Vec<Intension> = m.group_val.values().cloned().collect();
    let mut ca = complex_algebra(&m.frame, &seeds, caps)?;
    let mut named: BTreeMap<usize, &str> = BTreeMap::new();
    for (g, f) in &m.group_val {
        if let Some(i) = element_of(&m, &ca.frame.relations, &ca.carrier, f) {
            named.entry(i).or_insert(g);
        }
    }
    for (&i, &g) in &named {
        ca.sigma.group_elements[i] = g.to_string();
    }
    let equations = check_sigma_frame(&ca.sigma);
    match fmt {
        Format::Json => println!("{}", sigma_frame_to_json(&ca.sigma)),
        Format::Human => {
            println!(
                "complex algebra over {} worlds: {} propositions, {} group elements",
                m.world_count(),
                ca.sigma.props.size(),
                ca.sigma.group_count()
            );
            println!("group elements: {}", ca.sigma.group_elements.join(", "));
            match &equations {
                None => println!("equations: hold"),
                Some(v) => println!("equations: {v}"),
            }
        }
    }
    Ok(equations.is_none())
}

pub fn dual_ultrafilter(fmt: Format, file: &Path) -> Outcome {
    let sf = match input::load(file)? {
        Loaded::Sigma(sf) => sf,
        other => {
            return Err(Failure::Invalid(format!(
                "expected a two-sorted frame, got a {}",
                other.kind()
            )))
        }
    };
    if let Some(v) = check_sigma_frame(&sf) {
        match fmt {
            Format::Human => println!("not a frame of its theory: {v}"),
            Format::Json => print_json(&json!({ "equations": v.to_string() })),
        }
        return Ok(false);
    }
    let report = canonical_morphism_check(&sf)?;
    let uf = ultrafilter_frame(&sf)?;
    let groups = sf.group_elements.iter().cloned().zip(uf.group_map.iter().cloned()).collect();
    let model = RelationalModel::new(uf.frame.clone(), BTreeMap::new(), groups)?;
    let violation = report.violation.as_ref().map(|v| v.to_string());
    match fmt {
        Format::Human => {
            println!(
                "ultrafilter frame: {} worlds, {} relations, {} group images",
                report.ultrafilters, report.relations, report.group_images
            );
            for line in describe_model(&model) {
                println!("  {line}");
            }
            match &violation {
                None => println!("canonical morphism: quasi-embedding"),
                Some(v) => println!("canonical morphism: {v}"),
            }
        }
        Format::Json => print_json(&json!({
            "equations": "hold",
            "ultrafilters": report.ultrafilters,
            "relations": report.relations,
            "group_images": report.group_images,
            "canonical_morphism": violation,
            "frame": serde_json::to_value(ModelDoc::from_model(&model)).expect("documents serialize"),
        })),
    }
    Ok(report.passed())
}

pub fn bisim(fmt: Format, first: &Path, second: &Path, pair: Option<&[String]>, depth: Option<usize>) -> Outcome {
    let m1 = input::load(first)?.neighborhood()?;
    let m2 = input::load(second)?.neighborhood()?;
    let groups: Vec<String> = m1.group_val.keys().filter(|g| m2.group_val.contains_key(*g)).cloned().collect();
    let props: Vec<String> = m1.prop_val.keys().filter(|p| m2.prop_val.contains_key(*p)).cloned().collect();
    let pairs: Vec<(GroupTerm, GroupTerm)> = groups.iter().map(|g| (GroupTerm::var(g.clone()), GroupTerm::var(g.clone()))).collect();
    let b = greatest_bisimulation(&m1, &m2, &pairs)?;
    let related: Vec<(String, String)> = b.iter().map(|&(u, v)| (m1.labels[u].clone(), m2.labels[v].clone())).collect();
    let compared = match pair {
        Some([w1, w2]) => {
            let (i1, i2) = (world_index(&m1.labels, w1)?, world_index(&m2.labels, w2)?);
            let max = depth.unwrap_or(m1.world_count() * m2.world_count());
            let d = distinguishing_depth(&m1, i1, &m2, i2, max, &props, &groups)?;
            Some((w1.clone(), w2.clone(), b.contains(&(i1, i2)), max, d))
        }
        _ => None,
    };
    match fmt {
        Format::Human => {
            if related.is_empty() {
                println!("greatest bisimulation: empty");
            } else {
                let shown: Vec<String> = related.iter().map(|(u, v)| format!("({u}, {v})")).collect();
                println!("greatest bisimulation: {}", shown.join(", "));
            }
            if let Some((w1, w2, bisimilar, max, d)) = &compared {
                println!("{w1} and {w2} are {}bisimilar", if *bisimilar { "" } else { "not " });
                match d {
                    Some(d) => println!("separated by a formula of modal depth {d}"),
                    None => println!("no formula of modal depth at most {max} separates them"),
                }
            }
        }
        Format::Json => {
            let mut v = json!({ "groups": groups, "bisimulation": related });
            if let Some((w1, w2, bisimilar, max, d)) = compared {
                v["pair"] = json!({
                    "first": w1,
                    "second": w2,
                    "bisimilar": bisimilar,
                    "max_depth": max,
                    "separating_depth": d,
                });
            }
            print_json(&v);
        }
    }
    Ok(true)
}

pub fn closure(fmt: Format, theory: Theory, text: &str) -> Outcome {
    let f = parse_formula(text, &theory.signature())?;
    let set = lcs_closure_set(&f);
    let rendered: Vec<String> = set.iter().map(render_formula).collect();
    match fmt {
        Format::Human => rendered.iter().for_each(|s| println!("{s}")),
        Format::Json => print_json(&json!({ "formula": render_formula(&f), "closure": rendered })),
    }
    Ok(true)
}
