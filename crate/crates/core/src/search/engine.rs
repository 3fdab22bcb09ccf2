//! Bit-parallel evaluation of a batch of formulas over every model of a
//! [`Space`].
//!
//! Valuations are packed into the lanes of a `u64`: for each world, bit `i`
//! of a node value is the node's truth under valuation `i`. Formula nodes are
//! classified by what their value at `w` depends on:
//!
//! * `Const`: nothing but the valuation;
//! * `Local`: the configuration at `w` only;
//! * `Global`: configurations at other worlds too.
//!
//! Local values are tabulated once per (world, configuration); only global
//! nodes are evaluated per model, and a formula whose root is local is
//! checked without enumerating models at all.

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Instant;

use super::space::{Space, MAX_SEARCH_WORLDS};
use crate::error::{Error, Result};
use crate::syntax::{Formula, GroupTerm, Op};
use crate::worldset::WorldSet;

const MAXN: usize = MAX_SEARCH_WORLDS;
/// World-valuation bits that fit in one lane word.
const LANE_BITS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum TNode {
    Var(usize),
    Op0(Op),
    Op1(Op, usize),
    Op2(Op, usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum FNode {
    Top,
    Prop(usize),
    Not(usize),
    And(usize, usize),
    Box(usize, usize),
    Dia(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Dep {
    Const,
    Local,
    Global,
}

/// Hash-consed formulas sharing subterms across the batch.
#[derive(Debug, Clone)]
pub(crate) struct Dag {
    pub groups: Vec<String>,
    pub props: Vec<String>,
    terms: Vec<TNode>,
    tdep: Vec<Dep>,
    /// For Boolean terms: the set of membership masks the term accepts.
    truth: Vec<u32>,
    formulas: Vec<FNode>,
    fdep: Vec<Dep>,
    pub roots: Vec<usize>,
    tindex: HashMap<TNode, usize>,
    findex: HashMap<FNode, usize>,
}

impl Dag {
    pub fn build(formulas: &[Formula]) -> Result<Dag> {
        let mut groups = std::collections::BTreeSet::new();
        let mut props = std::collections::BTreeSet::new();
        for f in formulas {
            let (p, g) = f.variables_of();
            props.extend(p);
            groups.extend(g);
        }
        let mut dag = Dag {
            groups: groups.into_iter().collect(),
            props: props.into_iter().collect(),
            terms: vec![],
            tdep: vec![],
            truth: vec![],
            formulas: vec![],
            fdep: vec![],
            roots: vec![],
            tindex: HashMap::new(),
            findex: HashMap::new(),
        };
        if dag.groups.len() > 5 {
            return Err(Error::cap("group variable", dag.groups.len() as u128, 5));
        }
        for f in formulas {
            let r = dag.formula(f);
            dag.roots.push(r);
        }
        Ok(dag)
    }

    fn term(&mut self, t: &GroupTerm) -> usize {
        let node = match t {
            GroupTerm::Var(v) => TNode::Var(self.groups.binary_search(v).expect("collected")),
            GroupTerm::Op(op, args) => match args.len() {
                0 => TNode::Op0(*op),
                1 => TNode::Op1(*op, self.term(&args[0])),
                _ => {
                    let a = self.term(&args[0]);
                    let b = self.term(&args[1]);
                    TNode::Op2(*op, a, b)
                }
            },
        };
        if let Some(&i) = self.tindex.get(&node) {
            return i;
        }
        let all = (1u64 << (1u32 << self.groups.len())) - 1;
        let (dep, truth) = match node {
            TNode::Var(j) => {
                let t = (0..1u32 << self.groups.len())
                    .filter(|m| m >> j & 1 == 1)
                    .fold(0u32, |acc, m| acc | 1 << m);
                (Dep::Local, t)
            }
            TNode::Op0(_) => (Dep::Local, 0),
            TNode::Op1(op, a) => {
                let t = if op == Op::Complement { !self.truth[a] & all as u32 } else { 0 };
                (self.tdep[a], t)
            }
            TNode::Op2(op, a, b) => {
                let t = match op {
                    Op::Meet => self.truth[a] & self.truth[b],
                    _ => self.truth[a] | self.truth[b],
                };
                let dep = if op == Op::Compose { Dep::Global } else { self.tdep[a].max(self.tdep[b]) };
                (dep, t)
            }
        };
        self.terms.push(node);
        self.tdep.push(dep);
        self.truth.push(truth);
        self.tindex.insert(node, self.terms.len() - 1);
        self.terms.len() - 1
    }

    fn formula(&mut self, f: &Formula) -> usize {
        let node = match f {
            Formula::Top => FNode::Top,
            Formula::Prop(p) => FNode::Prop(self.props.binary_search(p).expect("collected")),
            Formula::Not(a) => FNode::Not(self.formula(a)),
            Formula::And(a, b) => {
                let a = self.formula(a);
                FNode::And(a, self.formula(b))
            }
            Formula::Box(t, a) => {
                let t = self.term(t);
                FNode::Box(t, self.formula(a))
            }
            Formula::Dia(t, a) => {
                let t = self.term(t);
                FNode::Dia(t, self.formula(a))
            }
        };
        if let Some(&i) = self.findex.get(&node) {
            return i;
        }
        let dep = match node {
            FNode::Top | FNode::Prop(_) => Dep::Const,
            FNode::Not(a) => self.fdep[a],
            FNode::And(a, b) => self.fdep[a].max(self.fdep[b]),
            FNode::Box(t, a) | FNode::Dia(t, a) => {
                if self.tdep[t] == Dep::Local && self.fdep[a] == Dep::Const {
                    Dep::Local
                } else {
                    Dep::Global
                }
            }
        };
        self.formulas.push(node);
        self.fdep.push(dep);
        self.findex.insert(node, self.formulas.len() - 1);
        self.formulas.len() - 1
    }

    /// Whether checking some root needs a pass over models.
    pub fn has_global_root(&self) -> bool {
        self.roots.iter().any(|&r| self.fdep[r] == Dep::Global)
    }
}

/// A failing point: configuration index per world, a world, and a valuation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Witness {
    pub configs: Vec<usize>,
    pub world: usize,
    pub props: BTreeMap<String, WorldSet>,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct RunOptions {
    pub workers: usize,
    pub symmetry: bool,
    pub deadline: Option<(Instant, std::time::Duration)>,
}

#[inline]
fn bit_of(x: u64) -> u64 {
    1u64 << x
}

#[inline]
fn bits(mut x: u64) -> impl Iterator<Item = u64> {
    std::iter::from_fn(move || {
        if x == 0 {
            None
        } else {
            let b = x.trailing_zeros() as u64;
            x &= x - 1;
            Some(b)
        }
    })
}

/// `{ s ∪ v | s ∈ a, v ∈ b }` on families of subsets.
#[inline]
fn union_product(a: u64, b: u64) -> u64 {
    let mut out = 0;
    for s in bits(a) {
        for v in bits(b) {
            out |= bit_of(s | v);
        }
    }
    out
}

fn compose_family(first: u64, second: &[u64]) -> u64 {
    let mut out = 0;
    for x in bits(first) {
        let mut acc = 1u64;
        for u in bits(x) {
            let v = if second[u as usize] == 0 { 1 } else { second[u as usize] };
            acc = union_product(acc, v);
        }
        out |= acc;
    }
    out
}

fn cap_family(f: u64) -> u64 {
    let mut out = 0u64;
    for x in bits(f) {
        let mut more = 0;
        for y in bits(out) {
            more |= bit_of(y & x);
        }
        out |= bit_of(x) | more;
    }
    out
}

/// Everyone / someone over a family, given the child's lanes at every world.
#[inline]
fn modal(family: u64, child: &[u64], n: usize, everyone: bool, full: u64) -> u64 {
    let mut sub = [0u64; 1 << MAXN];
    sub[0] = full;
    for x in 1..1usize << n {
        sub[x] = sub[x & (x - 1)] & child[x.trailing_zeros() as usize];
    }
    if everyone {
        bits(family).fold(full, |acc, x| acc & sub[x as usize])
    } else {
        bits(family).fold(0, |acc, x| acc | sub[x as usize])
    }
}

struct Tables<'a> {
    dag: &'a Dag,
    space: &'a Space,
    n: usize,
    full: u64,
    /// Const formula values per world.
    cf: Vec<[u64; MAXN]>,
    /// Slot of each local node in the per-(world, config) rows.
    lslot_t: Vec<usize>,
    lslot_f: Vec<usize>,
    nlt: usize,
    nlf: usize,
    /// `lt[w][c * nlt + slot]`, `lf[w][c * nlf + slot]`.
    lt: Vec<Vec<u64>>,
    lf: Vec<Vec<u64>>,
}

impl<'a> Tables<'a> {
    fn new(dag: &'a Dag, space: &'a Space, lane_props: usize, outer: u64) -> Tables<'a> {
        let n = space.world_count;
        let lanes = 1usize << (n * lane_props);
        let full = if lanes == 64 { !0 } else { (1u64 << lanes) - 1 };
        let mut cf = vec![[0u64; MAXN]; dag.formulas.len()];
        for (i, node) in dag.formulas.iter().enumerate() {
            if dag.fdep[i] != Dep::Const {
                continue;
            }
            for v in 0..n {
                cf[i][v] = match *node {
                    FNode::Top => full,
                    FNode::Prop(j) if j < lane_props => {
                        let b = j * n + v;
                        (0..lanes).filter(|i| i >> b & 1 == 1).fold(0, |acc, i| acc | 1 << i)
                    }
                    FNode::Prop(j) => {
                        if outer >> ((j - lane_props) * n + v) & 1 == 1 {
                            full
                        } else {
                            0
                        }
                    }
                    FNode::Not(a) => !cf[a][v] & full,
                    FNode::And(a, b) => cf[a][v] & cf[b][v],
                    _ => unreachable!("modal nodes are never constant"),
                };
            }
        }
        let mut lslot_t = vec![usize::MAX; dag.terms.len()];
        let mut nlt = 0;
        for (i, d) in dag.tdep.iter().enumerate() {
            if *d == Dep::Local {
                lslot_t[i] = nlt;
                nlt += 1;
            }
        }
        let mut lslot_f = vec![usize::MAX; dag.formulas.len()];
        let mut nlf = 0;
        for (i, d) in dag.fdep.iter().enumerate() {
            if *d == Dep::Local {
                lslot_f[i] = nlf;
                nlf += 1;
            }
        }
        let mut t = Tables {
            dag,
            space,
            n,
            full,
            cf,
            lslot_t,
            lslot_f,
            nlt,
            nlf,
            lt: vec![],
            lf: vec![],
        };
        t.fill_local();
        t
    }

    fn fill_local(&mut self) {
        let (dag, space, n, full) = (self.dag, self.space, self.n, self.full);
        for w in 0..n {
            let configs = &space.per_world[w];
            let mut lt = vec![0u64; configs.len() * self.nlt];
            let mut lf = vec![0u64; configs.len() * self.nlf];
            for (c, config) in configs.iter().enumerate() {
                let rt = &mut lt[c * self.nlt..(c + 1) * self.nlt];
                for (i, node) in dag.terms.iter().enumerate() {
                    if dag.tdep[i] != Dep::Local {
                        continue;
                    }
                    let val = if space.raw {
                        let truth = dag.truth[i];
                        config
                            .0
                            .iter()
                            .filter(|(_, m)| truth >> m & 1 == 1)
                            .fold(0, |acc, (x, _)| acc | bit_of(x.bits()))
                    } else {
                        match *node {
                            TNode::Var(j) => config
                                .0
                                .iter()
                                .filter(|(_, m)| m >> j & 1 == 1)
                                .fold(0, |acc, (x, _)| acc | bit_of(x.bits())),
                            TNode::Op0(Op::One) => bit_of(1 << w),
                            TNode::Op0(_) => 0,
                            TNode::Op1(Op::Cap, a) => cap_family(rt[self.lslot_t[a]]),
                            TNode::Op1(_, a) => rt[self.lslot_t[a]],
                            TNode::Op2(_, a, b) => rt[self.lslot_t[a]] | rt[self.lslot_t[b]],
                        }
                    };
                    rt[self.lslot_t[i]] = val;
                }
                let rf = &mut lf[c * self.nlf..(c + 1) * self.nlf];
                for (i, node) in dag.formulas.iter().enumerate() {
                    if dag.fdep[i] != Dep::Local {
                        continue;
                    }
                    let get = |a: usize, rf: &[u64]| {
                        if dag.fdep[a] == Dep::Const {
                            self.cf[a][w]
                        } else {
                            rf[self.lslot_f[a]]
                        }
                    };
                    let val = match *node {
                        FNode::Not(a) => !get(a, rf) & full,
                        FNode::And(a, b) => get(a, rf) & get(b, rf),
                        FNode::Box(t, a) => modal(rt[self.lslot_t[t]], &self.cf[a], n, true, full),
                        FNode::Dia(t, a) => modal(rt[self.lslot_t[t]], &self.cf[a], n, false, full),
                        _ => unreachable!("leaves are constant"),
                    };
                    rf[self.lslot_f[i]] = val;
                }
            }
            self.lt.push(lt);
            self.lf.push(lf);
        }
    }

    fn witness(&self, configs: Vec<usize>, world: usize, lane: u64, lane_props: usize, outer: u64) -> Witness {
        let n = self.n;
        let props = self
            .dag
            .props
            .iter()
            .enumerate()
            .map(|(j, p)| {
                let s: WorldSet = (0..n)
                    .filter(|&v| {
                        if j < lane_props {
                            lane >> (j * n + v) & 1 == 1
                        } else {
                            outer >> ((j - lane_props) * n + v) & 1 == 1
                        }
                    })
                    .collect();
                (p.clone(), s)
            })
            .collect();
        Witness { configs, world, props }
    }
}

/// Per-model evaluator for global nodes.
struct ModelEval<'t, 'a> {
    t: &'t Tables<'a>,
    gt: Vec<[u64; MAXN]>,
    gf: Vec<[u64; MAXN]>,
    /// Global nodes still needed, in evaluation order.
    need_t: Vec<usize>,
    need_f: Vec<usize>,
}

impl<'t, 'a> ModelEval<'t, 'a> {
    fn new(t: &'t Tables<'a>, alive: &[usize]) -> Self {
        let mut e = ModelEval {
            t,
            gt: vec![[0; MAXN]; t.dag.terms.len()],
            gf: vec![[0; MAXN]; t.dag.formulas.len()],
            need_t: vec![],
            need_f: vec![],
        };
        e.plan(alive);
        e
    }

    fn plan(&mut self, alive: &[usize]) {
        let dag = self.t.dag;
        let mut nf = vec![false; dag.formulas.len()];
        let mut nt = vec![false; dag.terms.len()];
        for &r in alive {
            nf[dag.roots[r]] = true;
        }
        for i in (0..dag.formulas.len()).rev() {
            if !nf[i] || dag.fdep[i] != Dep::Global {
                nf[i] = false;
                continue;
            }
            match dag.formulas[i] {
                FNode::Not(a) => nf[a] = true,
                FNode::And(a, b) => {
                    nf[a] = true;
                    nf[b] = true;
                }
                FNode::Box(t, a) | FNode::Dia(t, a) => {
                    nf[a] = true;
                    nt[t] = true;
                }
                _ => {}
            }
        }
        for i in (0..dag.terms.len()).rev() {
            if !nt[i] || dag.tdep[i] != Dep::Global {
                nt[i] = false;
                continue;
            }
            match dag.terms[i] {
                TNode::Op1(_, a) => nt[a] = true,
                TNode::Op2(_, a, b) => {
                    nt[a] = true;
                    nt[b] = true;
                }
                _ => {}
            }
        }
        self.need_t = (0..dag.terms.len()).filter(|&i| nt[i]).collect();
        self.need_f = (0..dag.formulas.len()).filter(|&i| nf[i]).collect();
    }

    #[inline]
    fn term_at(&self, i: usize, w: usize, cs: &[usize]) -> u64 {
        if self.t.dag.tdep[i] == Dep::Global {
            self.gt[i][w]
        } else {
            self.t.lt[w][cs[w] * self.t.nlt + self.t.lslot_t[i]]
        }
    }

    #[inline]
    fn formula_at(&self, i: usize, w: usize, cs: &[usize]) -> u64 {
        match self.t.dag.fdep[i] {
            Dep::Const => self.t.cf[i][w],
            Dep::Local => self.t.lf[w][cs[w] * self.t.nlf + self.t.lslot_f[i]],
            Dep::Global => self.gf[i][w],
        }
    }

    fn eval(&mut self, cs: &[usize]) {
        let n = self.t.n;
        let full = self.t.full;
        for k in 0..self.need_t.len() {
            let i = self.need_t[k];
            let mut out = [0u64; MAXN];
            match self.t.dag.terms[i] {
                TNode::Op2(Op::Compose, a, b) => {
                    let mut second = [0u64; MAXN];
                    for (u, s) in second.iter_mut().enumerate().take(n) {
                        *s = self.term_at(b, u, cs);
                    }
                    for (w, o) in out.iter_mut().enumerate().take(n) {
                        *o = compose_family(self.term_at(a, w, cs), &second[..n]);
                    }
                }
                TNode::Op2(_, a, b) => {
                    for (w, o) in out.iter_mut().enumerate().take(n) {
                        *o = self.term_at(a, w, cs) | self.term_at(b, w, cs);
                    }
                }
                TNode::Op1(Op::Cap, a) => {
                    for (w, o) in out.iter_mut().enumerate().take(n) {
                        *o = cap_family(self.term_at(a, w, cs));
                    }
                }
                TNode::Op1(_, a) => {
                    for (w, o) in out.iter_mut().enumerate().take(n) {
                        *o = self.term_at(a, w, cs);
                    }
                }
                _ => unreachable!("leaves are local"),
            }
            self.gt[i] = out;
        }
        for k in 0..self.need_f.len() {
            let i = self.need_f[k];
            let mut out = [0u64; MAXN];
            match self.t.dag.formulas[i] {
                FNode::Not(a) => {
                    for (w, o) in out.iter_mut().enumerate().take(n) {
                        *o = !self.formula_at(a, w, cs) & full;
                    }
                }
                FNode::And(a, b) => {
                    for (w, o) in out.iter_mut().enumerate().take(n) {
                        *o = self.formula_at(a, w, cs) & self.formula_at(b, w, cs);
                    }
                }
                FNode::Box(t, a) | FNode::Dia(t, a) => {
                    let everyone = matches!(self.t.dag.formulas[i], FNode::Box(..));
                    let mut child = [0u64; MAXN];
                    for (v, c) in child.iter_mut().enumerate().take(n) {
                        *c = self.formula_at(a, v, cs);
                    }
                    for (w, o) in out.iter_mut().enumerate().take(n) {
                        *o = modal(self.term_at(t, w, cs), &child[..n], n, everyone, full);
                    }
                }
                _ => unreachable!("leaves are constant"),
            }
            self.gf[i] = out;
        }
    }
}

/// Whether `cs` is lexicographically least among its images under the
/// world permutations.
fn canonical(cs: &[usize], perms: &[(Vec<usize>, Vec<Vec<usize>>)], image: &mut [usize]) -> bool {
    for (pi, maps) in perms {
        for (w, &c) in cs.iter().enumerate() {
            image[pi[w]] = maps[w][c];
        }
        if &*image < cs {
            return false;
        }
    }
    true
}

/// Statistics of one run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub(crate) struct RunStats {
    pub models_visited: u128,
}

/// First failing point of every root over all models of `space`, or `None`
/// where the root holds everywhere. Failing points are the least model in
/// the order where world 0's configuration is most significant.
pub(crate) fn run(dag: &Dag, space: &Space, opts: RunOptions, stats: &mut RunStats) -> Result<Vec<Option<Witness>>> {
    let n = space.world_count;
    let p = dag.props.len();
    let lane_props = p.min(LANE_BITS / n);
    let outer_bits = (p - lane_props) * n;
    if outer_bits >= 40 {
        return Err(Error::cap("valuation bit", (p * n) as u128, 40));
    }
    let mut result: Vec<Option<Witness>> = vec![None; dag.roots.len()];
    let perms = if opts.symmetry { space.permutation_maps() } else { vec![] };
    for outer in 0..1u64 << outer_bits {
        let open: Vec<usize> = (0..dag.roots.len()).filter(|&r| result[r].is_none()).collect();
        if open.is_empty() {
            break;
        }
        let t = Tables::new(dag, space, lane_props, outer);
        let mut global = vec![];
        for r in open {
            let root = dag.roots[r];
            match dag.fdep[root] {
                Dep::Const => {
                    if let Some(w) = (0..n).find(|&w| t.cf[root][w] != t.full) {
                        let lane = (!t.cf[root][w] & t.full).trailing_zeros() as u64;
                        result[r] = Some(t.witness(vec![0; n], w, lane, lane_props, outer));
                    }
                }
                Dep::Local => {
                    let slot = t.lslot_f[root];
                    let mut best: Option<(Vec<usize>, usize, u64)> = None;
                    for w in 0..n {
                        let first = (0..space.per_world[w].len()).find(|&c| t.lf[w][c * t.nlf + slot] != t.full);
                        if let Some(c) = first {
                            let mut cs = vec![0; n];
                            cs[w] = c;
                            if best.as_ref().is_none_or(|b| cs < b.0) {
                                let lane = (!t.lf[w][c * t.nlf + slot] & t.full).trailing_zeros() as u64;
                                best = Some((cs, w, lane));
                            }
                        }
                    }
                    if let Some((cs, w, lane)) = best {
                        result[r] = Some(t.witness(cs, w, lane, lane_props, outer));
                    }
                }
                Dep::Global => global.push(r),
            }
        }
        if global.is_empty() {
            continue;
        }
        let found = scan_models(&t, &global, &perms, opts, stats)?;
        for (r, wit) in global.into_iter().zip(found) {
            if let Some((cs, w, lane)) = wit {
                result[r] = Some(t.witness(cs, w, lane, lane_props, outer));
            }
        }
    }
    Ok(result)
}

type Found = Option<(Vec<usize>, usize, u64)>;

fn scan_models(
    t: &Tables<'_>,
    roots: &[usize],
    perms: &[(Vec<usize>, Vec<Vec<usize>>)],
    opts: RunOptions,
    stats: &mut RunStats,
) -> Result<Vec<Found>> {
    let first_count = t.space.per_world[0].len();
    let workers = opts.workers.max(1).min(first_count);
    let timed_out = AtomicBool::new(false);
    let chunk = first_count.div_ceil(workers);
    let outcomes: Vec<(Vec<Found>, u128)> = if workers == 1 {
        vec![scan_range(t, roots, perms, 0..first_count, opts, &timed_out)]
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..workers)
                .map(|k| {
                    let range = k * chunk..((k + 1) * chunk).min(first_count);
                    let timed_out = &timed_out;
                    s.spawn(move || scan_range(t, roots, perms, range, opts, timed_out))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("search worker panicked")).collect()
        })
    };
    if timed_out.load(Ordering::Relaxed) {
        let limit = opts.deadline.map(|(_, l)| l).unwrap_or_default();
        return Err(Error::Timeout(limit));
    }
    let mut merged: Vec<Found> = vec![None; roots.len()];
    for (found, visited) in outcomes {
        stats.models_visited += visited;
        for (m, f) in merged.iter_mut().zip(found) {
            if let Some(f) = f {
                if m.as_ref().is_none_or(|cur| f.0 < cur.0) {
                    *m = Some(f);
                }
            }
        }
    }
    Ok(merged)
}

fn scan_range(
    t: &Tables<'_>,
    roots: &[usize],
    perms: &[(Vec<usize>, Vec<Vec<usize>>)],
    range: std::ops::Range<usize>,
    opts: RunOptions,
    timed_out: &AtomicBool,
) -> (Vec<Found>, u128) {
    let n = t.n;
    let sizes: Vec<usize> = t.space.per_world.iter().map(Vec::len).collect();
    let mut found: Vec<Found> = vec![None; roots.len()];
    let mut alive: Vec<usize> = (0..roots.len()).collect();
    let mut eval = ModelEval::new(t, &alive.iter().map(|&i| roots[i]).collect::<Vec<_>>());
    let mut visited: u128 = 0;
    if range.is_empty() {
        return (found, 0);
    }
    let mut cs = vec![0usize; n];
    cs[0] = range.start;
    let mut image = vec![0usize; n];
    let mut tick: u32 = 0;
    loop {
        tick = tick.wrapping_add(1);
        if tick & 0xfff == 0 {
            if timed_out.load(Ordering::Relaxed) {
                break;
            }
            if opts.deadline.is_some_and(|(d, _)| Instant::now() > d) {
                timed_out.store(true, Ordering::Relaxed);
                break;
            }
        }
        if perms.is_empty() || canonical(&cs, perms, &mut image) {
            visited += 1;
            eval.eval(&cs);
            let before = alive.len();
            alive.retain(|&k| {
                let root = t.dag.roots[roots[k]];
                for w in 0..n {
                    let v = eval.formula_at(root, w, &cs);
                    if v != t.full {
                        let lane = (!v & t.full).trailing_zeros() as u64;
                        found[k] = Some((cs.clone(), w, lane));
                        return false;
                    }
                }
                true
            });
            if alive.is_empty() {
                break;
            }
            if alive.len() != before {
                eval.plan(&alive.iter().map(|&i| roots[i]).collect::<Vec<_>>());
            }
        }
        // odometer with world 0 most significant
        let mut w = n;
        loop {
            if w == 0 {
                return (found, visited);
            }
            w -= 1;
            cs[w] += 1;
            let limit = if w == 0 { range.end } else { sizes[w] };
            if cs[w] < limit {
                break;
            }
            if w == 0 {
                return (found, visited);
            }
            cs[w] = 0;
        }
    }
    (found, visited)
}
