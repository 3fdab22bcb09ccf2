use std::fmt;

use super::model::{NeighborhoodEvaluator, NeighborhoodModel, Neighborhoods};
use crate::error::{Error, Result};
use crate::syntax::{GroupTerm, Op};
use crate::worldset::WorldSet;

/// A world map together with a group map given on finitely many values:
/// each pair says the value of the source term goes to the value of the
/// target term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphismCandidate {
    pub world_map: Vec<usize>,
    pub group_pairs: Vec<(GroupTerm, GroupTerm)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MorphismViolation {
    /// Two pairs send the same source value to different target values.
    NotFunctional { first: GroupTerm, second: GroupTerm },
    /// `op` applied to covered values disagrees with the map.
    NotHomomorphic { op: Op, source: GroupTerm, target: GroupTerm },
    /// `X ∈ ν_a(w)` but `f[X] ∉ ν'_{g(a)}(f(w))`.
    There { world: usize, group: GroupTerm, neighborhood: WorldSet },
    /// `Y ∈ ν'_{g(a)}(f(w))` has no preimage in `ν_a(w)`.
    Back { world: usize, group: GroupTerm, neighborhood: WorldSet },
}

impl fmt::Display for MorphismViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MorphismViolation::NotFunctional { first, second } => {
                write!(f, "group map is not functional: {first} and {second} have equal values")
            }
            MorphismViolation::NotHomomorphic { op, source, target } => {
                write!(f, "group map does not commute with '{op}': {source} vs {target}")
            }
            MorphismViolation::There { world, group, neighborhood } => {
                write!(f, "(there) fails at world {world} for {group}, neighborhood {neighborhood:?}")
            }
            MorphismViolation::Back { world, group, neighborhood } => {
                write!(f, "(back) fails at world {world} for {group}, neighborhood {neighborhood:?}")
            }
        }
    }
}

/// Checks the group map and the (there)/(back) conditions; returns the first
/// violation found.
pub fn check_morphism(
    src: &NeighborhoodModel,
    dst: &NeighborhoodModel,
    cand: &MorphismCandidate,
) -> Result<Option<MorphismViolation>> {
    let n = src.world_count();
    if cand.world_map.len() != n || cand.world_map.iter().any(|&v| v >= dst.world_count()) {
        return Err(Error::InvalidModel("world map is not a total map into the target".into()));
    }
    let mut es = NeighborhoodEvaluator::new(src);
    let mut ed = NeighborhoodEvaluator::new(dst);
    let mut pairs: Vec<(Neighborhoods, Neighborhoods)> = Vec::new();
    for (s, d) in &cand.group_pairs {
        pairs.push((es.eval_term(s)?, ed.eval_term(d)?));
    }

    // The group map must be a function on values.
    for i in 0..pairs.len() {
        for j in 0..i {
            if pairs[i].0 == pairs[j].0 && pairs[i].1 != pairs[j].1 {
                return Ok(Some(MorphismViolation::NotFunctional {
                    first: cand.group_pairs[j].0.clone(),
                    second: cand.group_pairs[i].0.clone(),
                }));
            }
        }
    }

    // Homomorphism on covered values: for each operator and covered
    // arguments whose result is covered, the images must agree.
    let image_of = |v: &Neighborhoods| pairs.iter().find(|(s, _)| s == v).map(|(_, d)| d.clone());
    for &op in src.theory.signature().ops() {
        let k = op.arity();
        let mut idx = vec![0usize; k];
        loop {
            if k == 0 || idx.iter().all(|&i| i < pairs.len()) {
                let s_term = GroupTerm::Op(op, idx.iter().map(|&i| cand.group_pairs[i].0.clone()).collect());
                let d_term = GroupTerm::Op(op, idx.iter().map(|&i| cand.group_pairs[i].1.clone()).collect());
                let s_val = es.eval_term(&s_term)?;
                if let Some(expected) = image_of(&s_val) {
                    if ed.eval_term(&d_term)? != expected {
                        return Ok(Some(MorphismViolation::NotHomomorphic {
                            op,
                            source: s_term,
                            target: d_term,
                        }));
                    }
                }
            }
            if k == 0 || !super::advance(&mut idx, pairs.len()) {
                break;
            }
        }
    }

    for (i, (s_nu, d_nu)) in pairs.iter().enumerate() {
        let group = &cand.group_pairs[i].0;
        for w in 0..n {
            let fw = cand.world_map[w];
            for &x in s_nu.at(w) {
                let image = x.map(&cand.world_map);
                if !d_nu.at(fw).contains(&image) {
                    return Ok(Some(MorphismViolation::There {
                        world: w,
                        group: group.clone(),
                        neighborhood: x,
                    }));
                }
            }
            for &y in d_nu.at(fw) {
                if !s_nu.at(w).iter().any(|x| x.map(&cand.world_map) == y) {
                    return Ok(Some(MorphismViolation::Back {
                        world: w,
                        group: group.clone(),
                        neighborhood: y,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Whether every proposition of `src` is reflected by the world map:
/// `w ∈ ⟦p⟧₁` iff `f(w) ∈ ⟦p⟧₂`.
pub fn valuations_compatible(src: &NeighborhoodModel, dst: &NeighborhoodModel, world_map: &[usize]) -> bool {
    src.prop_val.iter().all(|(p, s)| match dst.prop_val.get(p) {
        Some(d) => (0..src.world_count()).all(|w| s.contains(w) == d.contains(world_map[w])),
        None => false,
    })
}
