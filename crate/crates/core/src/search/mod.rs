//! Bounded countermodel search, model enumeration and soundness harnesses.

mod engine;
mod space;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;
use std::time::{Duration, Instant};

use engine::{Dag, RunOptions, RunStats, Witness};
pub use space::{Config, Space, MAX_SEARCH_WORLDS};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::relational::{Evaluator, Intension, RelSet, RelationalFrame, RelationalModel, Relations};
use crate::syntax::Formula;
use crate::theories::{InstantiationSets, SchemaInstance, Theory};
use crate::worldset::{all_subsets, WorldSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBounds {
    pub max_worlds: usize,
    pub max_relations: usize,
    /// Worker threads; results do not depend on this.
    pub workers: usize,
    /// Skip models that are not least under world permutations.
    pub symmetry: bool,
    pub time_limit: Option<Duration>,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            max_worlds: 3,
            max_relations: 2,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            symmetry: true,
            time_limit: None,
        }
    }
}

impl SearchBounds {
    pub fn new(max_worlds: usize, max_relations: usize) -> Self {
        SearchBounds {
            max_worlds,
            max_relations,
            ..SearchBounds::default()
        }
    }
}

/// A model falsifying a formula, with the subformula truth sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountermodelReport {
    pub formula: Formula,
    pub model: RelationalModel,
    pub world: usize,
    pub trace: Vec<(Formula, WorldSet)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Countermodel(Box<CountermodelReport>),
    NoneWithinBounds { models_visited: u128 },
}

impl SearchOutcome {
    pub fn countermodel(&self) -> Option<&CountermodelReport> {
        match self {
            SearchOutcome::Countermodel(r) => Some(r),
            SearchOutcome::NoneWithinBounds { .. } => None,
        }
    }
}

struct Ctx {
    theory: Theory,
    caps: Caps,
    opts: RunOptions,
    stats: RunStats,
}

impl Ctx {
    fn new(theory: Theory, bounds: &SearchBounds, caps: &Caps) -> Result<Ctx> {
        if bounds.max_worlds == 0 || bounds.max_worlds > MAX_SEARCH_WORLDS {
            return Err(Error::Infeasible(format!(
                "max worlds must be between 1 and {MAX_SEARCH_WORLDS}"
            )));
        }
        Ok(Ctx {
            theory,
            caps: *caps,
            opts: RunOptions {
                workers: bounds.workers,
                symmetry: bounds.symmetry,
                deadline: bounds.time_limit.map(|l| (Instant::now() + l, l)),
            },
            stats: RunStats::default(),
        })
    }

    /// First failing point of each formula over all models with exactly
    /// `n` worlds and per-world configurations bounded by `k`.
    fn run(&mut self, formulas: &[Formula], n: usize, k: usize) -> Result<Vec<Option<(Arc<Space>, Witness)>>> {
        let mut out: Vec<Option<(Arc<Space>, Witness)>> = vec![None; formulas.len()];
        // one batch per set of group variables keeps configuration spaces small
        let mut batches: BTreeMap<BTreeSet<String>, Vec<usize>> = BTreeMap::new();
        for (i, f) in formulas.iter().enumerate() {
            batches.entry(f.variables_of().1).or_default().push(i);
        }
        for idx in batches.values() {
            let fs: Vec<Formula> = idx.iter().map(|&i| formulas[i].clone()).collect();
            let dag = Dag::build(&fs)?;
            let valuations = 1u128 << (n * dag.props.len()).min(127);
            if valuations > self.caps.valuations as u128 {
                return Err(Error::cap("valuation", valuations, self.caps.valuations as u128));
            }
            let space = Arc::new(Space::new(self.theory, n, k, dag.groups.len())?);
            if dag.has_global_root() && space.model_count() > self.caps.models as u128 {
                return Err(Error::cap("model", space.model_count(), self.caps.models as u128));
            }
            let found = engine::run(&dag, &space, self.opts, &mut self.stats)?;
            for (&i, w) in idx.iter().zip(found) {
                out[i] = w.map(|w| (space.clone(), w));
            }
        }
        Ok(out)
    }

    /// Relation bounds to try for `n` worlds; every model with at most
    /// `max` relations is covered by one of them.
    fn relation_bounds(&self, max: usize) -> Vec<usize> {
        if self.theory.image_level() || max == 0 {
            vec![max]
        } else {
            vec![0, max]
        }
    }

    fn report(&self, f: &Formula, space: &Space, w: &Witness) -> Result<CountermodelReport> {
        let groups: Vec<String> = f.variables_of().1.into_iter().collect();
        let model = space.realize(&w.configs, &groups, &w.props)?;
        let mut ev = Evaluator::with_caps(&model, self.caps);
        let truth = ev.eval_formula(f)?;
        if truth.contains(w.world) {
            return Err(Error::InvalidModel(format!(
                "search and evaluator disagree on {} at world {}",
                crate::syntax::render_formula(f),
                w.world
            )));
        }
        let trace = ev.trace(f)?;
        Ok(CountermodelReport {
            formula: f.clone(),
            model,
            world: w.world,
            trace,
        })
    }
}

fn check_theory(theory: Theory, formulas: &[Formula]) -> Result<()> {
    let sig = theory.signature();
    formulas.iter().try_for_each(|f| f.check(&sig))
}

/// Smallest countermodel: fewest worlds first, then fewest relations.
/// Every reported model is re-checked with the relational evaluator.
pub fn find_countermodel(theory: Theory, f: &Formula, bounds: &SearchBounds, caps: &Caps) -> Result<SearchOutcome> {
    check_theory(theory, std::slice::from_ref(f))?;
    let mut ctx = Ctx::new(theory, bounds, caps)?;
    let fs = std::slice::from_ref(f);
    let has_groups = !f.variables_of().1.is_empty();
    for n in 1..=bounds.max_worlds {
        for k in 0..=bounds.max_relations {
            if k > 0 && !has_groups && theory.image_level() {
                break;
            }
            if let Some((space, w)) = ctx.run(fs, n, k)?.pop().flatten() {
                return Ok(SearchOutcome::Countermodel(Box::new(ctx.report(f, &space, &w)?)));
            }
        }
    }
    Ok(SearchOutcome::NoneWithinBounds {
        models_visited: ctx.stats.models_visited,
    })
}

/// Countermodels for many formulas at once, sharing evaluation work. Each
/// countermodel has the fewest worlds possible; `None` means the formula
/// holds in every model within the bounds.
pub fn find_countermodels(
    theory: Theory,
    formulas: &[Formula],
    bounds: &SearchBounds,
    caps: &Caps,
) -> Result<Vec<Option<CountermodelReport>>> {
    check_theory(theory, formulas)?;
    let mut ctx = Ctx::new(theory, bounds, caps)?;
    let found = first_failures(&mut ctx, formulas, bounds)?;
    found
        .into_iter()
        .zip(formulas)
        .map(|(w, f)| w.map(|(space, w)| ctx.report(f, &space, &w)).transpose())
        .collect()
}

fn first_failures(
    ctx: &mut Ctx,
    formulas: &[Formula],
    bounds: &SearchBounds,
) -> Result<Vec<Option<(Arc<Space>, Witness)>>> {
    let mut found: Vec<Option<(Arc<Space>, Witness)>> = vec![None; formulas.len()];
    for n in 1..=bounds.max_worlds {
        for k in ctx.relation_bounds(bounds.max_relations) {
            let open: Vec<usize> = (0..formulas.len()).filter(|&i| found[i].is_none()).collect();
            if open.is_empty() {
                return Ok(found);
            }
            let fs: Vec<Formula> = open.iter().map(|&i| formulas[i].clone()).collect();
            for (i, w) in open.into_iter().zip(ctx.run(&fs, n, k)?) {
                found[i] = w;
            }
        }
    }
    Ok(found)
}

/// One axiom instance and its countermodel, if any.
#[derive(Debug, Clone)]
pub struct AxiomResult {
    pub instance: SchemaInstance,
    pub formula: Formula,
    pub counter: Option<CountermodelReport>,
}

/// One rule instance. It fails when every premise holds within the bounds
/// but the conclusion has a countermodel.
#[derive(Debug, Clone)]
pub struct RuleResult {
    pub instance: SchemaInstance,
    pub premises: Vec<Formula>,
    pub conclusion: Formula,
    pub premises_hold: bool,
    pub counter: Option<CountermodelReport>,
}

#[derive(Debug, Clone)]
pub struct SoundnessReport {
    pub theory: Theory,
    pub bounds: SearchBounds,
    pub axioms: Vec<AxiomResult>,
    pub rules: Vec<RuleResult>,
    pub models_visited: u128,
    pub elapsed: Duration,
}

impl SoundnessReport {
    pub fn failures(&self) -> usize {
        self.axioms.iter().filter(|a| a.counter.is_some()).count()
            + self.rules.iter().filter(|r| r.counter.is_some()).count()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }
}

/// Searches every axiom and rule instance of the theory's suite for a
/// countermodel within the bounds.
pub fn soundness_harness(theory: Theory, bounds: &SearchBounds, caps: &Caps) -> Result<SoundnessReport> {
    let start = Instant::now();
    let mut ctx = Ctx::new(theory, bounds, caps)?;

    let sets = InstantiationSets::for_theory(theory);
    let mut instances = Vec::new();
    for schema in theory.axiom_suite() {
        instances.extend(schema.instances(theory, &sets)?);
    }
    let formulas: Vec<Formula> = instances.iter().map(|(_, f)| f.clone()).collect();
    let found = first_failures(&mut ctx, &formulas, bounds)?;
    let mut axioms = Vec::with_capacity(instances.len());
    for ((instance, formula), w) in instances.into_iter().zip(found) {
        let counter = w.map(|(s, w)| ctx.report(&formula, &s, &w)).transpose()?;
        axioms.push(AxiomResult {
            instance,
            formula,
            counter,
        });
    }

    let rule_sets = InstantiationSets::for_rules(theory);
    let mut rule_instances = Vec::new();
    for rule in theory.rule_suite() {
        rule_instances.extend(rule.instances(theory, &rule_sets)?);
    }
    let premises: Vec<Formula> = rule_instances
        .iter()
        .flat_map(|(_, ps, _)| ps.iter().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let premise_fails = first_failures(&mut ctx, &premises, bounds)?;
    let holds: BTreeMap<&Formula, bool> = premises.iter().zip(&premise_fails).map(|(p, w)| (p, w.is_none())).collect();
    let premises_hold: Vec<bool> = rule_instances
        .iter()
        .map(|(_, ps, _)| ps.iter().all(|p| holds[p]))
        .collect();
    let conclusions: Vec<Formula> = rule_instances
        .iter()
        .zip(&premises_hold)
        .filter(|(_, &h)| h)
        .map(|((_, _, c), _)| c.clone())
        .collect();
    let mut conclusion_fails = first_failures(&mut ctx, &conclusions, bounds)?.into_iter();
    let mut rules = Vec::with_capacity(rule_instances.len());
    for ((instance, premises, conclusion), hold) in rule_instances.into_iter().zip(premises_hold) {
        let counter = if hold {
            conclusion_fails
                .next()
                .expect("one result per conclusion")
                .map(|(s, w)| ctx.report(&conclusion, &s, &w))
                .transpose()?
        } else {
            None
        };
        rules.push(RuleResult {
            instance,
            premises,
            conclusion,
            premises_hold: hold,
            counter,
        });
    }
    Ok(SoundnessReport {
        theory,
        bounds: *bounds,
        axioms,
        rules,
        models_visited: ctx.stats.models_visited,
        elapsed: start.elapsed(),
    })
}

/// Number of models [`enumerate_models_exact`] yields.
pub fn count_models_exact(theory: Theory, worlds: usize, relations: usize, props: usize, groups: usize) -> u128 {
    let images: u128 = (0..worlds)
        .map(|w| all_subsets(worlds).filter(|&x| theory.admits_image(w, x)).count() as u128)
        .product();
    let frames = images.saturating_pow(relations as u32);
    let val = (1u128 << worlds).saturating_pow(props as u32);
    let ext = (1u128 << relations).saturating_pow((worlds * groups) as u32);
    frames.saturating_mul(val).saturating_mul(ext)
}

/// Every model with exactly `worlds` worlds, `relations` relations
/// conforming to the theory, and valuations of `props` and `groups`.
pub fn enumerate_models_exact(
    theory: Theory,
    worlds: usize,
    relations: usize,
    props: &[String],
    groups: &[String],
    caps: &Caps,
) -> Result<impl Iterator<Item = RelationalModel>> {
    if worlds == 0 || worlds > crate::worldset::MAX_WORLDS {
        return Err(Error::Infeasible("world count out of range".into()));
    }
    let total = count_models_exact(theory, worlds, relations, props.len(), groups.len());
    if total > caps.models as u128 {
        return Err(Error::cap("model", total, caps.models as u128));
    }
    if relations > 64 {
        return Err(Error::cap("relation", relations as u128, 64));
    }
    let images: Vec<Vec<WorldSet>> = (0..worlds)
        .map(|w| all_subsets(worlds).filter(|&x| theory.admits_image(w, x)).collect())
        .collect();
    // digits: relation images, then proposition sets, then group extents
    let mut radix = Vec::new();
    for _ in 0..relations {
        radix.extend(images.iter().map(Vec::len));
    }
    radix.extend(std::iter::repeat_n(1usize << worlds, props.len()));
    radix.extend(std::iter::repeat_n(1usize << relations, groups.len() * worlds));
    let props = props.to_vec();
    let groups = groups.to_vec();
    let mut digits = vec![0usize; radix.len()];
    let mut done = false;
    Ok(std::iter::from_fn(move || {
        if done {
            return None;
        }
        let mut d = digits.iter().copied();
        let rels: Vec<Vec<WorldSet>> = (0..relations)
            .map(|_| (0..worlds).map(|w| images[w][d.next().unwrap()]).collect())
            .collect();
        let prop_val: BTreeMap<String, WorldSet> =
            props.iter().map(|p| (p.clone(), WorldSet(d.next().unwrap() as u64))).collect();
        let group_val: BTreeMap<String, Intension> = groups
            .iter()
            .map(|g| {
                let ext = (0..worlds)
                    .map(|_| {
                        let m = d.next().unwrap();
                        (0..relations).filter(|r| m >> r & 1 == 1).collect::<RelSet>()
                    })
                    .collect();
                (g.clone(), Intension(ext))
            })
            .collect();
        let rels = Relations::from_images(worlds, rels).expect("images fit the world count");
        let frame = RelationalFrame::unlabeled(theory, rels).expect("images conform to the theory");
        let model = RelationalModel::new(frame, prop_val, group_val).expect("valuations fit the frame");
        done = !advance_mixed(&mut digits, &radix);
        Some(model)
    }))
}

fn advance_mixed(digits: &mut [usize], radix: &[usize]) -> bool {
    for (d, &r) in digits.iter_mut().zip(radix).rev() {
        *d += 1;
        if *d < r {
            return true;
        }
        *d = 0;
    }
    false
}

/// Every model with `1..=max_worlds` worlds and `0..=max_relations` relations.
pub fn enumerate_models(
    theory: Theory,
    max_worlds: usize,
    max_relations: usize,
    props: &[String],
    groups: &[String],
    caps: &Caps,
) -> Result<Vec<RelationalModel>> {
    let total: u128 = (1..=max_worlds)
        .flat_map(|n| (0..=max_relations).map(move |k| (n, k)))
        .map(|(n, k)| count_models_exact(theory, n, k, props.len(), groups.len()))
        .fold(0u128, u128::saturating_add);
    if total > caps.models.min(1 << 24) as u128 {
        return Err(Error::cap("model", total, caps.models.min(1 << 24) as u128));
    }
    let mut out = Vec::with_capacity(total as usize);
    for n in 1..=max_worlds {
        for k in 0..=max_relations {
            out.extend(enumerate_models_exact(theory, n, k, props, groups, caps)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
