use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::model::{NeighborhoodEvaluator, NeighborhoodModel, Neighborhoods};
use crate::error::{Error, Result};
use crate::syntax::GroupTerm;
use crate::worldset::WorldSet;

/// A group relation `≅` (pairs of terms, compared by value) and a world
/// relation `B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BisimulationCandidate {
    pub group_pairs: Vec<(GroupTerm, GroupTerm)>,
    pub world_pairs: BTreeSet<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BisimulationViolation {
    /// A group variable of both models whose values are not related.
    Group { name: String },
    /// Related worlds disagree on a proposition.
    Atomic { w1: usize, w2: usize, prop: String },
    /// A neighborhood at `w1` with no lifted match at `w2`.
    Forth { w1: usize, w2: usize, group: GroupTerm, neighborhood: WorldSet },
    /// A neighborhood at `w2` with no lifted match at `w1`.
    Back { w1: usize, w2: usize, group: GroupTerm, neighborhood: WorldSet },
}

impl fmt::Display for BisimulationViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BisimulationViolation::Group { name } => write!(f, "values of group '{name}' are not related"),
            BisimulationViolation::Atomic { w1, w2, prop } => {
                write!(f, "worlds {w1} and {w2} disagree on '{prop}'")
            }
            BisimulationViolation::Forth { w1, w2, group, neighborhood } => write!(
                f,
                "forth clause fails at ({w1}, {w2}) for {group}: {neighborhood:?} has no match"
            ),
            BisimulationViolation::Back { w1, w2, group, neighborhood } => write!(
                f,
                "back clause fails at ({w1}, {w2}) for {group}: {neighborhood:?} has no match"
            ),
        }
    }
}

/// `X B̄ Y`: every member of `X` is related to some member of `Y` and vice versa.
pub fn lifted(b: &BTreeSet<(usize, usize)>, x: WorldSet, y: WorldSet) -> bool {
    x.iter().all(|u| y.iter().any(|v| b.contains(&(u, v)))) && y.iter().all(|v| x.iter().any(|u| b.contains(&(u, v))))
}

fn shared_props<'a>(m1: &'a NeighborhoodModel, m2: &NeighborhoodModel) -> Vec<&'a String> {
    m1.prop_val.keys().filter(|p| m2.prop_val.contains_key(*p)).collect()
}

fn related_values(
    m1: &NeighborhoodModel,
    m2: &NeighborhoodModel,
    pairs: &[(GroupTerm, GroupTerm)],
) -> Result<Vec<(Neighborhoods, Neighborhoods)>> {
    let mut e1 = NeighborhoodEvaluator::new(m1);
    let mut e2 = NeighborhoodEvaluator::new(m2);
    pairs
        .iter()
        .map(|(a, b)| Ok((e1.eval_term(a)?, e2.eval_term(b)?)))
        .collect()
}

fn transfer(
    b: &BTreeSet<(usize, usize)>,
    w1: usize,
    w2: usize,
    group: &GroupTerm,
    nu1: &Neighborhoods,
    nu2: &Neighborhoods,
) -> Option<BisimulationViolation> {
    for &x in nu1.at(w1) {
        if !nu2.at(w2).iter().any(|&y| lifted(b, x, y)) {
            return Some(BisimulationViolation::Forth {
                w1,
                w2,
                group: group.clone(),
                neighborhood: x,
            });
        }
    }
    for &y in nu2.at(w2) {
        if !nu1.at(w1).iter().any(|&x| lifted(b, x, y)) {
            return Some(BisimulationViolation::Back {
                w1,
                w2,
                group: group.clone(),
                neighborhood: y,
            });
        }
    }
    None
}

pub fn check_bisimulation(
    m1: &NeighborhoodModel,
    m2: &NeighborhoodModel,
    cand: &BisimulationCandidate,
) -> Result<Option<BisimulationViolation>> {
    let values = related_values(m1, m2, &cand.group_pairs)?;
    for (g, v1) in &m1.group_val {
        if let Some(v2) = m2.group_val.get(g) {
            if !values.iter().any(|(a, b)| a == v1 && b == v2) {
                return Ok(Some(BisimulationViolation::Group { name: g.clone() }));
            }
        }
    }
    let props = shared_props(m1, m2);
    for &(w1, w2) in &cand.world_pairs {
        if w1 >= m1.world_count() || w2 >= m2.world_count() {
            return Err(Error::InvalidModel(format!("world pair ({w1}, {w2}) is out of range")));
        }
        for p in &props {
            if m1.prop_val[*p].contains(w1) != m2.prop_val[*p].contains(w2) {
                return Ok(Some(BisimulationViolation::Atomic {
                    w1,
                    w2,
                    prop: (*p).clone(),
                }));
            }
        }
        for (i, (nu1, nu2)) in values.iter().enumerate() {
            if let Some(v) = transfer(&cand.world_pairs, w1, w2, &cand.group_pairs[i].0, nu1, nu2) {
                return Ok(Some(v));
            }
        }
    }
    Ok(None)
}

/// Largest world relation `B` such that `(≅, B)` is a bisimulation, by
/// refinement from the pairs that agree on shared propositions.
pub fn greatest_bisimulation(
    m1: &NeighborhoodModel,
    m2: &NeighborhoodModel,
    group_pairs: &[(GroupTerm, GroupTerm)],
) -> Result<BTreeSet<(usize, usize)>> {
    let values = related_values(m1, m2, group_pairs)?;
    let props = shared_props(m1, m2);
    let mut b: BTreeSet<(usize, usize)> = (0..m1.world_count())
        .flat_map(|w1| (0..m2.world_count()).map(move |w2| (w1, w2)))
        .filter(|&(w1, w2)| {
            props
                .iter()
                .all(|p| m1.prop_val[*p].contains(w1) == m2.prop_val[*p].contains(w2))
        })
        .collect();
    loop {
        let keep: BTreeSet<(usize, usize)> = b
            .iter()
            .copied()
            .filter(|&(w1, w2)| {
                values
                    .iter()
                    .zip(group_pairs)
                    .all(|((nu1, nu2), (g, _))| transfer(&b, w1, w2, g, nu1, nu2).is_none())
            })
            .collect();
        if keep.len() == b.len() {
            return Ok(b);
        }
        b = keep;
    }
}

/// Worlds of two models side by side; indices `0..n1` are the first model's.
struct Union<'a> {
    models: [&'a NeighborhoodModel; 2],
    values: Vec<[Neighborhoods; 2]>,
    props: Vec<[WorldSet; 2]>,
}

impl Union<'_> {
    fn worlds(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..2).flat_map(move |side| (0..self.models[side].world_count()).map(move |w| (side, w)))
    }
}

/// Partition of the disjoint union after each refinement round: element
/// `d` gives block ids for depth `d`, first model's worlds then the second's.
fn refine(u: &Union<'_>, max_depth: usize) -> Vec<Vec<usize>> {
    let worlds: Vec<(usize, usize)> = u.worlds().collect();
    let canon = |sigs: Vec<Vec<u128>>| -> Vec<usize> {
        let mut ids: BTreeMap<Vec<u128>, usize> = BTreeMap::new();
        for s in &sigs {
            let next = ids.len();
            ids.entry(s.clone()).or_insert(next);
        }
        sigs.iter().map(|s| ids[s]).collect()
    };
    let atoms: Vec<Vec<u128>> = worlds
        .iter()
        .map(|&(side, w)| u.props.iter().map(|p| p[side].contains(w) as u128).collect())
        .collect();
    let mut rounds = vec![canon(atoms)];
    let offset = u.models[0].world_count();
    for _ in 0..max_depth {
        let prev = rounds.last().unwrap();
        let block = |side: usize, v: usize| prev[side * offset + v];
        let closure = |side: usize, x: WorldSet| x.iter().fold(0u128, |acc, v| acc | 1u128 << block(side, v));
        let sigs: Vec<Vec<u128>> = worlds
            .iter()
            .enumerate()
            .map(|(i, &(side, w))| {
                let mut sig = vec![prev[i] as u128];
                for val in &u.values {
                    let cls: BTreeSet<u128> = val[side].at(w).iter().map(|&x| closure(side, x)).collect();
                    // Diamonds see the upward closure: keep its minimal elements.
                    let minimal: Vec<u128> = cls
                        .iter()
                        .copied()
                        .filter(|&c| !cls.iter().any(|&d| d != c && d & !c == 0))
                        .collect();
                    sig.push(minimal.len() as u128);
                    sig.extend(minimal);
                    // Boxes see the union.
                    sig.push(cls.iter().fold(0, |acc, &c| acc | c));
                }
                sig
            })
            .collect();
        let next = canon(sigs);
        let stable = next.iter().max() == prev.iter().max();
        rounds.push(next);
        if stable {
            break;
        }
    }
    rounds
}

fn union<'a>(
    m1: &'a NeighborhoodModel,
    m2: &'a NeighborhoodModel,
    props: &[String],
    groups: &[String],
) -> Result<Union<'a>> {
    if m1.world_count() + m2.world_count() > 128 {
        return Err(Error::cap("world", (m1.world_count() + m2.world_count()) as u128, 128));
    }
    let prop = |m: &NeighborhoodModel, p: &String| {
        m.prop_val.get(p).copied().ok_or_else(|| Error::UnboundProp(p.clone()))
    };
    let group = |m: &NeighborhoodModel, g: &String| {
        m.group_val.get(g).cloned().ok_or_else(|| Error::UnboundGroup(g.clone()))
    };
    Ok(Union {
        models: [m1, m2],
        values: groups
            .iter()
            .map(|g| Ok([group(m1, g)?, group(m2, g)?]))
            .collect::<Result<_>>()?,
        props: props
            .iter()
            .map(|p| Ok([prop(m1, p)?, prop(m2, p)?]))
            .collect::<Result<_>>()?,
    })
}

/// Whether `(m1, w1)` and `(m2, w2)` satisfy the same formulas of modal depth
/// at most `depth` built from `props` and modalities indexed by `groups`.
///
/// Formulas of depth `d` define exactly the unions of depth-`d` blocks of the
/// refined partition of the disjoint union, so agreement on blocks is
/// agreement on all such formulas.
pub fn modal_equiv_up_to_depth(
    m1: &NeighborhoodModel,
    w1: usize,
    m2: &NeighborhoodModel,
    w2: usize,
    depth: usize,
    props: &[String],
    groups: &[String],
) -> Result<bool> {
    Ok(distinguishing_depth(m1, w1, m2, w2, depth, props, groups)?.is_none())
}

/// Least modal depth `≤ max_depth` at which some formula separates the two
/// pointed models, if any.
pub fn distinguishing_depth(
    m1: &NeighborhoodModel,
    w1: usize,
    m2: &NeighborhoodModel,
    w2: usize,
    max_depth: usize,
    props: &[String],
    groups: &[String],
) -> Result<Option<usize>> {
    let u = union(m1, m2, props, groups)?;
    let rounds = refine(&u, max_depth);
    let i2 = m1.world_count() + w2;
    Ok(rounds.iter().position(|blocks| blocks[w1] != blocks[i2]))
}
