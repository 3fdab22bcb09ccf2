use std::collections::{BTreeMap, HashMap};

use super::frame::{Intension, RelationalFrame, RelationalModel, Relations};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::syntax::{Formula, GroupTerm};
use crate::worldset::{all_subsets, WorldSet};

/// `{w | ∀r ∈ f(w): r(w) ⊆ P}`.
pub fn box_plus(rels: &Relations, f: &Intension, p: WorldSet) -> WorldSet {
    (0..rels.world_count())
        .filter(|&w| f.extent(w).iter().all(|&r| rels.image(r, w).is_subset(p)))
        .collect()
}

/// `{w | ∃r ∈ f(w): r(w) ⊆ P}`.
pub fn dia_plus(rels: &Relations, f: &Intension, p: WorldSet) -> WorldSet {
    (0..rels.world_count())
        .filter(|&w| f.extent(w).iter().any(|&r| rels.image(r, w).is_subset(p)))
        .collect()
}

/// Evaluates terms and formulas in one model. Relations materialized by
/// group operations live in the evaluator's own copy of the relation table.
pub struct Evaluator<'m> {
    model: &'m RelationalModel,
    rels: Relations,
    caps: Caps,
    terms: HashMap<GroupTerm, Intension>,
}

impl<'m> Evaluator<'m> {
    pub fn new(model: &'m RelationalModel) -> Self {
        Evaluator::with_caps(model, Caps::default())
    }

    pub fn with_caps(model: &'m RelationalModel, caps: Caps) -> Self {
        Evaluator {
            model,
            rels: model.frame.relations.clone(),
            caps,
            terms: HashMap::new(),
        }
    }

    /// The frame's relations plus everything materialized so far.
    pub fn relations(&self) -> &Relations {
        &self.rels
    }

    pub fn eval_term(&mut self, t: &GroupTerm) -> Result<Intension> {
        if let GroupTerm::Var(g) = t {
            return self
                .model
                .group_val
                .get(g)
                .cloned()
                .ok_or_else(|| Error::UnboundGroup(g.clone()));
        }
        if let Some(v) = self.terms.get(t) {
            return Ok(v.clone());
        }
        let v = match t {
            GroupTerm::Var(_) => unreachable!("variables are read directly"),
            GroupTerm::Op(op, args) => {
                if args.len() != op.arity() {
                    return Err(Error::Arity {
                        symbol: op.symbol().into(),
                        expected: op.arity(),
                        found: args.len(),
                    });
                }
                let vals = args.iter().map(|a| self.eval_term(a)).collect::<Result<Vec<_>>>()?;
                self.model.theory().apply(*op, &mut self.rels, &vals, &self.caps)?
            }
        };
        self.terms.insert(t.clone(), v.clone());
        Ok(v)
    }

    pub fn eval_formula(&mut self, f: &Formula) -> Result<WorldSet> {
        let n = self.model.world_count();
        Ok(match f {
            Formula::Top => WorldSet::full(n),
            Formula::Prop(p) => *self
                .model
                .prop_val
                .get(p)
                .ok_or_else(|| Error::UnboundProp(p.clone()))?,
            Formula::Not(g) => self.eval_formula(g)?.complement(n),
            Formula::And(a, b) => self.eval_formula(a)?.intersection(self.eval_formula(b)?),
            Formula::Box(t, g) => {
                let p = self.eval_formula(g)?;
                let v = self.eval_term(t)?;
                box_plus(&self.rels, &v, p)
            }
            Formula::Dia(t, g) => {
                let p = self.eval_formula(g)?;
                let v = self.eval_term(t)?;
                dia_plus(&self.rels, &v, p)
            }
        })
    }

    /// Truth set of every subformula, innermost first.
    pub fn trace(&mut self, f: &Formula) -> Result<Vec<(Formula, WorldSet)>> {
        f.subformulas()
            .into_iter()
            .map(|g| Ok((g.clone(), self.eval_formula(g)?)))
            .collect()
    }
}

pub fn eval_term(m: &RelationalModel, t: &GroupTerm) -> Result<Intension> {
    Evaluator::new(m).eval_term(t)
}

pub fn eval_formula(m: &RelationalModel, f: &Formula) -> Result<WorldSet> {
    Evaluator::new(m).eval_formula(f)
}

pub fn satisfies(m: &RelationalModel, w: usize, f: &Formula) -> Result<bool> {
    Ok(eval_formula(m, f)?.contains(w))
}

pub fn model_valid(m: &RelationalModel, f: &Formula) -> Result<bool> {
    Ok(eval_formula(m, f)? == m.frame.full())
}

/// A valuation of a formula's variables and a world where it fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterValuation {
    pub props: BTreeMap<String, WorldSet>,
    pub groups: BTreeMap<String, Intension>,
    pub world: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FrameVerdict {
    Valid,
    Counter(CounterValuation),
}

impl FrameVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, FrameVerdict::Valid)
    }
}

/// All intensions `(2^R)^W` of a frame, in mixed-radix order.
pub fn all_intensions(fr: &RelationalFrame) -> Vec<Intension> {
    let n = fr.world_count();
    let k = fr.relations.len();
    let per_world = 1usize << k;
    let total = per_world.pow(n as u32);
    (0..total)
        .map(|mut i| {
            Intension(
                (0..n)
                    .map(|_| {
                        let mask = i % per_world;
                        i /= per_world;
                        (0..k).filter(|r| mask >> r & 1 == 1).collect()
                    })
                    .collect(),
            )
        })
        .collect()
}

/// Frame validity with group variables ranging over all intensions.
pub fn frame_valid(fr: &RelationalFrame, f: &Formula, caps: &Caps) -> Result<FrameVerdict> {
    let bits = (fr.world_count() * fr.relations.len()) as u32;
    let (_, groups) = f.variables_of();
    if !groups.is_empty() && bits > caps.frame_bits {
        return Err(Error::cap("intension choice bit", bits as u128, caps.frame_bits as u128));
    }
    let domain = if groups.is_empty() { vec![] } else { all_intensions(fr) };
    frame_valid_over(fr, f, &domain, caps)
}

/// Frame validity with group variables ranging over `domain`.
pub fn frame_valid_over(fr: &RelationalFrame, f: &Formula, domain: &[Intension], caps: &Caps) -> Result<FrameVerdict> {
    let n = fr.world_count();
    let (props, groups) = f.variables_of();
    let props: Vec<String> = props.into_iter().collect();
    let groups: Vec<String> = groups.into_iter().collect();
    if !groups.is_empty() && domain.is_empty() {
        return Ok(FrameVerdict::Valid);
    }
    let prop_choices = 1u128 << (n * props.len()).min(127);
    let total = (domain.len() as u128)
        .checked_pow(groups.len() as u32)
        .unwrap_or(u128::MAX)
        .saturating_mul(prop_choices);
    if total > caps.valuations as u128 {
        return Err(Error::cap("valuation", total, caps.valuations as u128));
    }
    let subsets: Vec<WorldSet> = all_subsets(n).collect();
    let mut gidx = vec![0usize; groups.len()];
    loop {
        let group_val: BTreeMap<String, Intension> = groups
            .iter()
            .zip(&gidx)
            .map(|(g, &i)| (g.clone(), domain[i].clone()))
            .collect();
        let mut pidx = vec![0usize; props.len()];
        loop {
            let prop_val: BTreeMap<String, WorldSet> =
                props.iter().zip(&pidx).map(|(p, &i)| (p.clone(), subsets[i])).collect();
            let model = RelationalModel {
                frame: fr.clone(),
                prop_val: prop_val.clone(),
                group_val: group_val.clone(),
            };
            let truth = Evaluator::with_caps(&model, *caps).eval_formula(f)?;
            if let Some(world) = truth.complement(n).iter().next() {
                return Ok(FrameVerdict::Counter(CounterValuation {
                    props: prop_val,
                    groups: group_val,
                    world,
                }));
            }
            if !advance(&mut pidx, subsets.len()) {
                break;
            }
        }
        if domain.is_empty() || !advance(&mut gidx, domain.len()) {
            break;
        }
    }
    Ok(FrameVerdict::Valid)
}

/// Odometer step, last position fastest; false once it wraps around.
fn advance(idx: &mut [usize], radix: usize) -> bool {
    for i in (0..idx.len()).rev() {
        idx[i] += 1;
        if idx[i] < radix {
            return true;
        }
        idx[i] = 0;
    }
    false
}
