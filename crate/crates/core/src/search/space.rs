//! Per-world configurations of bounded models.
//!
//! Truth in a model depends on each world's relations only through the
//! pairs `(r(w), {g | r ∈ g(w)})`. For theories whose operations act on
//! images, only pairs with a nonempty membership matter and no two of them
//! need share an image; Boolean complement also sees relations outside every
//! group, so its pairs are kept raw.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::relational::{Intension, RelSet, RelationalFrame, RelationalModel, Relations};
use crate::theories::Theory;
use crate::worldset::WorldSet;

/// Largest world count the search handles (families are 64-bit masks over subsets).
pub const MAX_SEARCH_WORLDS: usize = 6;

/// Largest per-world configuration count before the enumeration refuses.
const MAX_CONFIGS: u128 = 1 << 22;

/// The pairs at one world, sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Config(pub Vec<(WorldSet, u32)>);

#[derive(Debug, Clone)]
pub struct Space {
    pub theory: Theory,
    pub world_count: usize,
    pub max_relations: usize,
    pub group_count: usize,
    pub raw: bool,
    pub per_world: Vec<Vec<Config>>,
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize, mut emit: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        emit(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

impl Space {
    /// Configurations realizable with at most `max_relations` relations
    /// (for Boolean group terms: exactly `max_relations`, which covers every
    /// smaller positive count).
    pub fn new(theory: Theory, world_count: usize, max_relations: usize, group_count: usize) -> Result<Space> {
        if world_count == 0 || world_count > MAX_SEARCH_WORLDS {
            return Err(Error::Infeasible(format!(
                "search needs between 1 and {MAX_SEARCH_WORLDS} worlds"
            )));
        }
        if group_count > 5 {
            return Err(Error::cap("group variable", group_count as u128, 5));
        }
        let raw = !theory.image_level();
        let masks = 1u32 << group_count;
        let mut per_world = Vec::with_capacity(world_count);
        for w in 0..world_count {
            let images: Vec<WorldSet> = crate::worldset::all_subsets(world_count)
                .filter(|x| theory.admits_image(w, *x))
                .collect();
            let mut configs = Vec::new();
            if raw {
                let pairs: Vec<(WorldSet, u32)> = images
                    .iter()
                    .flat_map(|&x| (0..masks).map(move |m| (x, m)))
                    .collect();
                if max_relations == 0 {
                    configs.push(Config(vec![]));
                } else {
                    let total: u128 = (1..=max_relations as u128).map(|s| binomial(pairs.len() as u128, s)).sum();
                    if total > MAX_CONFIGS {
                        return Err(Error::cap("world configuration", total, MAX_CONFIGS));
                    }
                    for size in 1..=max_relations {
                        combinations(pairs.len(), size, |c| configs.push(Config(c.iter().map(|&i| pairs[i]).collect())));
                    }
                }
            } else {
                let choices = masks as u128 - 1;
                let max = if group_count == 0 { 0 } else { max_relations };
                let total: u128 = (0..=max as u128)
                    .map(|s| binomial(images.len() as u128, s).saturating_mul(choices.saturating_pow(s as u32)))
                    .sum();
                if total > MAX_CONFIGS {
                    return Err(Error::cap("world configuration", total, MAX_CONFIGS));
                }
                for size in 0..=max.min(images.len()) {
                    combinations(images.len(), size, |c| {
                        let mut assign = vec![1u32; size];
                        loop {
                            configs.push(Config(c.iter().zip(&assign).map(|(&i, &m)| (images[i], m)).collect()));
                            let mut j = 0;
                            loop {
                                if j == size {
                                    return;
                                }
                                assign[j] += 1;
                                if assign[j] < masks {
                                    break;
                                }
                                assign[j] = 1;
                                j += 1;
                            }
                        }
                    });
                }
            }
            per_world.push(configs);
        }
        Ok(Space {
            theory,
            world_count,
            max_relations,
            group_count,
            raw,
            per_world,
        })
    }

    pub fn model_count(&self) -> u128 {
        self.per_world
            .iter()
            .fold(1u128, |acc, c| acc.saturating_mul(c.len() as u128))
    }

    /// For every world permutation: `map[w][c]` is the index at `π(w)` of the
    /// configuration `c` at `w` with `π` applied to its images.
    pub fn permutation_maps(&self) -> Vec<(Vec<usize>, Vec<Vec<usize>>)> {
        let n = self.world_count;
        let index: Vec<HashMap<&Config, usize>> = self
            .per_world
            .iter()
            .map(|cs| cs.iter().enumerate().map(|(i, c)| (c, i)).collect())
            .collect();
        let mut out = Vec::new();
        let mut perm: Vec<usize> = (0..n).collect();
        permutations(&mut perm, 0, &mut |pi| {
            if pi.iter().enumerate().all(|(i, &p)| i == p) {
                return;
            }
            let maps = (0..n)
                .map(|w| {
                    self.per_world[w]
                        .iter()
                        .map(|c| {
                            let mut pairs: Vec<(WorldSet, u32)> = c.0.iter().map(|&(x, m)| (x.map(pi), m)).collect();
                            pairs.sort();
                            index[pi[w]][&Config(pairs)]
                        })
                        .collect()
                })
                .collect();
            out.push((pi.to_vec(), maps));
        });
        out
    }

    /// A relational model with the given configuration at each world.
    pub fn realize(
        &self,
        configs: &[usize],
        groups: &[String],
        props: &BTreeMap<String, WorldSet>,
    ) -> Result<RelationalModel> {
        let n = self.world_count;
        let at: Vec<&Config> = configs.iter().enumerate().map(|(w, &c)| &self.per_world[w][c]).collect();
        let k = at.iter().map(|c| c.0.len()).max().unwrap_or(0);
        let reflexive = self.theory == Theory::Csl;
        let mut images = vec![vec![WorldSet::EMPTY; n]; k];
        let mut extents = vec![vec![RelSet::new(); n]; groups.len()];
        for (w, c) in at.iter().enumerate() {
            for i in 0..k {
                let (image, mask) = if i < c.0.len() {
                    c.0[i]
                } else if self.raw {
                    // repeating a pair leaves the set of pairs unchanged
                    c.0[c.0.len() - 1]
                } else if reflexive {
                    (WorldSet::singleton(w), 0)
                } else {
                    (WorldSet::EMPTY, 0)
                };
                images[i][w] = image;
                for (g, ext) in extents.iter_mut().enumerate() {
                    if mask >> g & 1 == 1 {
                        ext[w].insert(i);
                    }
                }
            }
        }
        let rels = Relations::from_images(n, images)?;
        let frame = RelationalFrame::unlabeled(self.theory, rels)?;
        let group_val = groups
            .iter()
            .cloned()
            .zip(extents.into_iter().map(Intension))
            .collect();
        RelationalModel::new(frame, props.clone(), group_val)
    }
}

fn permutations(v: &mut Vec<usize>, i: usize, f: &mut impl FnMut(&[usize])) {
    if i == v.len() {
        f(v);
        return;
    }
    for j in i..v.len() {
        v.swap(i, j);
        permutations(v, i + 1, f);
        v.swap(i, j);
    }
}
