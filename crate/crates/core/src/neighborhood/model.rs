use std::collections::{BTreeMap, HashMap};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::relational::{Evaluator, Intension, RelSet, RelationalFrame, RelationalModel, Relations};
use crate::syntax::{Formula, GroupTerm};
use crate::theories::{Family, Theory};
use crate::worldset::{WorldSet, MAX_WORLDS};

/// Core neighborhood sets `ν(w)`, one family per world.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Neighborhoods(pub Vec<Family>);

impl Neighborhoods {
    pub fn empty(world_count: usize) -> Self {
        Neighborhoods(vec![Family::new(); world_count])
    }

    pub fn at(&self, w: usize) -> &Family {
        &self.0[w]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborhoodModel {
    pub theory: Theory,
    pub labels: Vec<String>,
    pub group_val: BTreeMap<String, Neighborhoods>,
    pub prop_val: BTreeMap<String, WorldSet>,
}

impl NeighborhoodModel {
    pub fn new(
        theory: Theory,
        labels: Vec<String>,
        group_val: BTreeMap<String, Neighborhoods>,
        prop_val: BTreeMap<String, WorldSet>,
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 || n > MAX_WORLDS {
            return Err(Error::InvalidModel(format!("a model needs between 1 and {MAX_WORLDS} worlds")));
        }
        for (g, nu) in &group_val {
            if nu.0.len() != n || nu.0.iter().flatten().any(|x| !x.within(n)) {
                return Err(Error::InvalidModel(format!("neighborhoods of '{g}' do not fit the worlds")));
            }
        }
        for (p, s) in &prop_val {
            if !s.within(n) {
                return Err(Error::InvalidModel(format!("proposition '{p}' names a world outside the model")));
            }
        }
        Ok(NeighborhoodModel {
            theory,
            labels,
            group_val,
            prop_val,
        })
    }

    pub fn unlabeled(
        theory: Theory,
        world_count: usize,
        group_val: BTreeMap<String, Neighborhoods>,
        prop_val: BTreeMap<String, WorldSet>,
    ) -> Result<Self> {
        let labels = (0..world_count).map(|w| format!("w{w}")).collect();
        NeighborhoodModel::new(theory, labels, group_val, prop_val)
    }

    pub fn world_count(&self) -> usize {
        self.labels.len()
    }
}

/// Term values and formula truth sets over a neighborhood model.
pub struct NeighborhoodEvaluator<'m> {
    model: &'m NeighborhoodModel,
    terms: HashMap<GroupTerm, Neighborhoods>,
    relational: Option<RelationalModel>,
}

impl<'m> NeighborhoodEvaluator<'m> {
    pub fn new(model: &'m NeighborhoodModel) -> Self {
        NeighborhoodEvaluator {
            model,
            terms: HashMap::new(),
            relational: None,
        }
    }

    pub fn eval_term(&mut self, t: &GroupTerm) -> Result<Neighborhoods> {
        if let Some(v) = self.terms.get(t) {
            return Ok(v.clone());
        }
        let n = self.model.world_count();
        let theory = self.model.theory;
        let v = match t {
            GroupTerm::Var(g) => self
                .model
                .group_val
                .get(g)
                .cloned()
                .ok_or_else(|| Error::UnboundGroup(g.clone()))?,
            GroupTerm::Op(..) if !theory.image_level() => {
                // Boolean operations need relation identities: evaluate in the
                // relational counterpart and read the images back.
                if self.relational.is_none() {
                    self.relational = Some(nbhd_to_rel(self.model)?);
                }
                let rm = self.relational.as_ref().unwrap();
                let mut ev = Evaluator::new(rm);
                let value = ev.eval_term(t)?;
                Neighborhoods((0..n).map(|w| ev.relations().images_of(&value, w)).collect())
            }
            GroupTerm::Op(op, args) => {
                let vals = args
                    .iter()
                    .map(|a| Ok(self.eval_term(a)?.0))
                    .collect::<Result<Vec<_>>>()?;
                Neighborhoods(theory.apply_images(*op, n, &vals)?)
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
                let nu = self.eval_term(t)?;
                box_nbhd(&nu, p)
            }
            Formula::Dia(t, g) => {
                let p = self.eval_formula(g)?;
                let nu = self.eval_term(t)?;
                dia_nbhd(&nu, p)
            }
        })
    }
}

/// `{w | ∀X ∈ ν(w): X ⊆ P}`.
pub fn box_nbhd(nu: &Neighborhoods, p: WorldSet) -> WorldSet {
    (0..nu.0.len())
        .filter(|&w| nu.0[w].iter().all(|x| x.is_subset(p)))
        .collect()
}

/// `{w | ∃X ∈ ν(w): X ⊆ P}`.
pub fn dia_nbhd(nu: &Neighborhoods, p: WorldSet) -> WorldSet {
    (0..nu.0.len())
        .filter(|&w| nu.0[w].iter().any(|x| x.is_subset(p)))
        .collect()
}

pub fn n_eval(m: &NeighborhoodModel, f: &Formula) -> Result<WorldSet> {
    NeighborhoodEvaluator::new(m).eval_formula(f)
}

pub fn n_eval_term(m: &NeighborhoodModel, t: &GroupTerm) -> Result<Neighborhoods> {
    NeighborhoodEvaluator::new(m).eval_term(t)
}

/// `ν_a(w) = {r(w) | r ∈ a(w)}` for every group variable.
pub fn rel_to_nbhd(m: &RelationalModel) -> NeighborhoodModel {
    let n = m.world_count();
    let rels = &m.frame.relations;
    NeighborhoodModel {
        theory: m.theory(),
        labels: m.frame.labels.clone(),
        group_val: m
            .group_val
            .iter()
            .map(|(g, f)| (g.clone(), Neighborhoods((0..n).map(|w| rels.images_of(f, w)).collect())))
            .collect(),
        prop_val: m.prop_val.clone(),
    }
}

/// One relation per neighborhood `X ∈ ν_a(w)` (image `X` at `w`, empty
/// elsewhere, or `{v}` at each other `v` for the reflexive theory), shared
/// between equal relations; `a(w)` collects every relation whose image at
/// `w` lies in `ν_a(w)`.
pub fn nbhd_to_rel(m: &NeighborhoodModel) -> Result<RelationalModel> {
    let n = m.world_count();
    let caps = Caps {
        relations: usize::MAX,
        ..Caps::default()
    };
    let reflexive = m.theory == Theory::Csl;
    let mut rels = Relations::new(n);
    for nu in m.group_val.values() {
        for (w, family) in nu.0.iter().enumerate() {
            for &x in family {
                if reflexive && !x.contains(w) {
                    return Err(Error::InvalidModel(format!(
                        "neighborhood {x:?} at world {w} cannot be realized by a reflexive relation"
                    )));
                }
                let mut r: Vec<WorldSet> = if reflexive {
                    (0..n).map(WorldSet::singleton).collect()
                } else {
                    vec![WorldSet::EMPTY; n]
                };
                r[w] = x;
                rels.materialize(r, &caps)?;
            }
        }
    }
    let group_val = m
        .group_val
        .iter()
        .map(|(g, nu)| {
            let extent = (0..n)
                .map(|w| {
                    (0..rels.len())
                        .filter(|&r| nu.0[w].contains(&rels.image(r, w)))
                        .collect::<RelSet>()
                })
                .collect();
            (g.clone(), Intension(extent))
        })
        .collect();
    let frame = RelationalFrame::unlabeled(m.theory, rels)?;
    let frame = RelationalFrame {
        labels: m.labels.clone(),
        ..frame
    };
    RelationalModel::new(frame, m.prop_val.clone(), group_val)
}
