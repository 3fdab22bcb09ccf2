use std::collections::BTreeMap;

use super::model::{box_nbhd, dia_nbhd, Neighborhoods};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::syntax::{Formula, GroupTerm, Op};
use crate::theories::{Family, Theory};
use crate::worldset::{WorldSet, MAX_WORLDS};

/// A neighborhood frame with an explicit finite group algebra: elements,
/// one operation table per operator, and a neighborhood function per element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborhoodFrame {
    pub theory: Theory,
    pub world_count: usize,
    pub elements: Vec<String>,
    /// Table for an operator of arity `k`, indexed by `Σ args[i]·m^i`.
    pub ops: BTreeMap<Op, Vec<usize>>,
    pub nu: Vec<Neighborhoods>,
}

/// Valuation under which a formula fails on an explicit frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitCounter {
    pub props: BTreeMap<String, WorldSet>,
    pub groups: BTreeMap<String, usize>,
    pub world: usize,
}

impl NeighborhoodFrame {
    pub fn new(
        theory: Theory,
        world_count: usize,
        elements: Vec<String>,
        ops: BTreeMap<Op, Vec<usize>>,
        nu: Vec<Neighborhoods>,
    ) -> Result<Self> {
        let m = elements.len();
        if world_count == 0 || world_count > MAX_WORLDS {
            return Err(Error::InvalidModel(format!("a frame needs between 1 and {MAX_WORLDS} worlds")));
        }
        if m == 0 {
            return Err(Error::InvalidModel("the group algebra is empty".into()));
        }
        let sig = theory.signature();
        for &op in sig.ops() {
            let table = ops
                .get(&op)
                .ok_or_else(|| Error::InvalidModel(format!("missing table for '{op}'")))?;
            if table.len() != m.pow(op.arity() as u32) || table.iter().any(|&e| e >= m) {
                return Err(Error::InvalidModel(format!("table for '{op}' has the wrong shape")));
            }
        }
        if ops.keys().any(|op| !sig.ops().contains(op)) {
            return Err(Error::InvalidModel(format!("table for an operator outside '{theory}'")));
        }
        if nu.len() != m
            || nu
                .iter()
                .any(|v| v.0.len() != world_count || v.0.iter().flatten().any(|x| !x.within(world_count)))
        {
            return Err(Error::InvalidModel("neighborhood functions do not fit the frame".into()));
        }
        Ok(NeighborhoodFrame {
            theory,
            world_count,
            elements,
            ops,
            nu,
        })
    }

    /// The free join-semilattice with zero on `generators` letters: elements
    /// are letter sets, `+` is union. Element `i` is the set with bit mask `i`.
    pub fn free_semilattice(world_count: usize, generators: usize, nu: Vec<Neighborhoods>) -> Result<Self> {
        if generators > 6 {
            return Err(Error::cap("generator", generators as u128, 6));
        }
        let m = 1usize << generators;
        let elements = (0..m)
            .map(|e| {
                if e == 0 {
                    "0".to_string()
                } else {
                    (0..generators)
                        .filter(|i| e >> i & 1 == 1)
                        .map(|i| ((b'a' + i as u8) as char).to_string())
                        .collect::<Vec<_>>()
                        .join("+")
                }
            })
            .collect();
        let plus = (0..m * m).map(|i| (i % m) | (i / m)).collect();
        let ops = BTreeMap::from([(Op::Zero, vec![0]), (Op::Plus, plus)]);
        NeighborhoodFrame::new(Theory::Sl, world_count, elements, ops, nu)
    }

    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    pub fn apply(&self, op: Op, args: &[usize]) -> usize {
        let m = self.element_count();
        let idx = args.iter().rev().fold(0, |acc, &a| acc * m + a);
        self.ops[&op][idx]
    }

    pub fn eval_term(&self, t: &GroupTerm, groups: &BTreeMap<String, usize>) -> Result<usize> {
        match t {
            GroupTerm::Var(g) => groups.get(g).copied().ok_or_else(|| Error::UnboundGroup(g.clone())),
            GroupTerm::Op(op, args) => {
                if !self.ops.contains_key(op) {
                    return Err(Error::OperatorNotInTheory {
                        symbol: op.symbol().into(),
                        theory: self.theory.name().into(),
                    });
                }
                let vals = args
                    .iter()
                    .map(|a| self.eval_term(a, groups))
                    .collect::<Result<Vec<_>>>()?;
                Ok(self.apply(*op, &vals))
            }
        }
    }

    pub fn eval_formula(
        &self,
        f: &Formula,
        props: &BTreeMap<String, WorldSet>,
        groups: &BTreeMap<String, usize>,
    ) -> Result<WorldSet> {
        let n = self.world_count;
        Ok(match f {
            Formula::Top => WorldSet::full(n),
            Formula::Prop(p) => *props.get(p).ok_or_else(|| Error::UnboundProp(p.clone()))?,
            Formula::Not(g) => self.eval_formula(g, props, groups)?.complement(n),
            Formula::And(a, b) => self
                .eval_formula(a, props, groups)?
                .intersection(self.eval_formula(b, props, groups)?),
            Formula::Box(t, g) => box_nbhd(&self.nu[self.eval_term(t, groups)?], self.eval_formula(g, props, groups)?),
            Formula::Dia(t, g) => dia_nbhd(&self.nu[self.eval_term(t, groups)?], self.eval_formula(g, props, groups)?),
        })
    }

    /// Truth at every world under every valuation of the formula's variables
    /// (propositions over all world sets, groups over all elements).
    pub fn frame_valid(&self, f: &Formula, caps: &Caps) -> Result<Option<ExplicitCounter>> {
        let (ps, gs) = f.variables_of();
        let ps: Vec<String> = ps.into_iter().collect();
        let gs: Vec<String> = gs.into_iter().collect();
        let n = self.world_count;
        let m = self.element_count();
        let bits = (n * ps.len()) as u32;
        let space = 2u128
            .checked_pow(bits)
            .and_then(|p| p.checked_mul((m as u128).pow(gs.len() as u32)))
            .unwrap_or(u128::MAX);
        if space > caps.valuations as u128 {
            return Err(Error::cap("valuation", space, caps.valuations as u128));
        }
        let mut pidx = vec![0usize; ps.len()];
        loop {
            let props: BTreeMap<String, WorldSet> = ps
                .iter()
                .zip(&pidx)
                .map(|(p, &b)| (p.clone(), WorldSet(b as u64)))
                .collect();
            let mut gidx = vec![0usize; gs.len()];
            loop {
                let groups: BTreeMap<String, usize> = gs.iter().cloned().zip(gidx.iter().copied()).collect();
                let truth = self.eval_formula(f, &props, &groups)?;
                if let Some(world) = truth.complement(n).iter().next() {
                    return Ok(Some(ExplicitCounter { props, groups, world }));
                }
                if !super::advance(&mut gidx, m) {
                    break;
                }
            }
            if !super::advance(&mut pidx, 1 << n) {
                break;
            }
        }
        Ok(None)
    }

    /// First `(x, y, w)` with `up(ν_{x+y}(w)) ≠ up(ν_x(w)) ∪ up(ν_y(w))`.
    pub fn join_closure_violation(&self) -> Result<Option<(usize, usize, usize)>> {
        if !self.ops.contains_key(&Op::Plus) {
            return Err(Error::OperatorNotInTheory {
                symbol: "+".into(),
                theory: self.theory.name().into(),
            });
        }
        let n = self.world_count;
        let m = self.element_count();
        let ups: Vec<Vec<u64>> = self
            .nu
            .iter()
            .map(|v| v.0.iter().map(|fam| up_mask(fam, n)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        for x in 0..m {
            for y in 0..m {
                let s = self.apply(Op::Plus, &[x, y]);
                for w in 0..n {
                    if ups[s][w] != ups[x][w] | ups[y][w] {
                        return Ok(Some((x, y, w)));
                    }
                }
            }
        }
        Ok(None)
    }
}

/// Upward closure `{Y ⊆ W | ∃X ∈ N, X ⊆ Y}` as a bit mask over the `2^n`
/// subsets (bit `Y` for subset `Y`).
pub fn up_mask(family: &Family, n: usize) -> Result<u64> {
    if n > 6 {
        return Err(Error::cap("world", n as u128, 6));
    }
    let mut out = 0u64;
    for y in 0..1u64 << n {
        if family.iter().any(|x| x.bits() & !y == 0) {
            out |= 1 << y;
        }
    }
    Ok(out)
}

/// Upward closure as a family.
pub fn upward_closure(family: &Family, n: usize) -> Family {
    crate::worldset::all_subsets(n)
        .filter(|y| family.iter().any(|x| x.is_subset(*y)))
        .collect()
}
