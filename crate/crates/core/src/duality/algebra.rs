use std::collections::BTreeMap;
use std::fmt;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::syntax::{Formula, GroupTerm, Op};
use crate::theories::Theory;

/// Largest atom count of a [`FiniteBooleanAlgebra`].
pub const MAX_ATOMS: usize = 16;

/// The powerset algebra over `atoms` atoms. Elements are atom sets encoded as
/// bit masks, so element `x` is also its own index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FiniteBooleanAlgebra {
    pub atoms: usize,
}

impl FiniteBooleanAlgebra {
    pub fn new(atoms: usize) -> Result<Self> {
        if atoms == 0 || atoms > MAX_ATOMS {
            return Err(Error::InvalidModel(format!("atom count must be between 1 and {MAX_ATOMS}")));
        }
        Ok(FiniteBooleanAlgebra { atoms })
    }

    pub fn size(self) -> usize {
        1 << self.atoms
    }

    pub fn top(self) -> u64 {
        (1u64 << self.atoms) - 1
    }

    pub fn bottom(self) -> u64 {
        0
    }

    pub fn meet(self, x: u64, y: u64) -> u64 {
        x & y
    }

    pub fn join(self, x: u64, y: u64) -> u64 {
        x | y
    }

    pub fn neg(self, x: u64) -> u64 {
        !x & self.top()
    }

    pub fn leq(self, x: u64, y: u64) -> bool {
        x & !y == 0
    }

    pub fn elements(self) -> impl Iterator<Item = u64> {
        0..1u64 << self.atoms
    }

    pub fn is_atom(self, x: u64) -> bool {
        x.count_ones() == 1
    }
}

/// A finite two-sorted frame: a powerset Boolean algebra, a finite group
/// algebra given by operation tables, and the two modal operators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaFrame {
    pub theory: Theory,
    pub props: FiniteBooleanAlgebra,
    pub group_elements: Vec<String>,
    /// Table for an operator of arity `k`, indexed by `Σ args[i]·m^i`.
    pub ops: BTreeMap<Op, Vec<usize>>,
    /// `boxes[a * 2^atoms + x]`.
    pub boxes: Vec<u64>,
    pub dias: Vec<u64>,
}

/// A failed equation with the group and proposition elements witnessing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquationViolation {
    pub equation: &'static str,
    pub groups: Vec<usize>,
    pub props: Vec<u64>,
}

impl fmt::Display for EquationViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "equation '{}' fails at groups {:?}, props {:?}", self.equation, self.groups, self.props)
    }
}

/// Evaluation under which two formulas differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaCounter {
    pub props: BTreeMap<String, u64>,
    pub groups: BTreeMap<String, usize>,
    pub lhs: u64,
    pub rhs: u64,
}

impl SigmaFrame {
    pub fn new(
        theory: Theory,
        atoms: usize,
        group_elements: Vec<String>,
        ops: BTreeMap<Op, Vec<usize>>,
        boxes: Vec<u64>,
        dias: Vec<u64>,
    ) -> Result<Self> {
        let props = FiniteBooleanAlgebra::new(atoms)?;
        let m = group_elements.len();
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
        let cells = m * props.size();
        for table in [&boxes, &dias] {
            if table.len() != cells || table.iter().any(|&x| x & !props.top() != 0) {
                return Err(Error::InvalidModel("modal tables have the wrong shape".into()));
            }
        }
        Ok(SigmaFrame {
            theory,
            props,
            group_elements,
            ops,
            boxes,
            dias,
        })
    }

    pub fn group_count(&self) -> usize {
        self.group_elements.len()
    }

    #[inline]
    pub fn boxed(&self, a: usize, x: u64) -> u64 {
        self.boxes[(a << self.props.atoms) | x as usize]
    }

    #[inline]
    pub fn dia(&self, a: usize, x: u64) -> u64 {
        self.dias[(a << self.props.atoms) | x as usize]
    }

    pub fn apply(&self, op: Op, args: &[usize]) -> usize {
        let m = self.group_count();
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

    /// `e(f)` for the evaluation given by `props` and `groups`.
    pub fn eval_formula(&self, f: &Formula, props: &BTreeMap<String, u64>, groups: &BTreeMap<String, usize>) -> Result<u64> {
        let b = self.props;
        Ok(match f {
            Formula::Top => b.top(),
            Formula::Prop(p) => *props.get(p).ok_or_else(|| Error::UnboundProp(p.clone()))?,
            Formula::Not(g) => b.neg(self.eval_formula(g, props, groups)?),
            Formula::And(x, y) => self.eval_formula(x, props, groups)? & self.eval_formula(y, props, groups)?,
            Formula::Box(t, g) => self.boxed(self.eval_term(t, groups)?, self.eval_formula(g, props, groups)?),
            Formula::Dia(t, g) => self.dia(self.eval_term(t, groups)?, self.eval_formula(g, props, groups)?),
        })
    }
}

/// Exhaustive check of the frame conditions and of the theory's equations,
/// including the algebra laws of the group sort. Returns the first failure.
pub fn check_sigma_frame(sf: &SigmaFrame) -> Option<EquationViolation> {
    let b = sf.props;
    let m = sf.group_count();
    let xs: Vec<u64> = b.elements().collect();
    let fail = |equation, groups: &[usize], props: &[u64]| {
        Some(EquationViolation {
            equation,
            groups: groups.to_vec(),
            props: props.to_vec(),
        })
    };

    for a in 0..m {
        if sf.boxed(a, b.top()) != b.top() {
            return fail("box-top", &[a], &[]);
        }
        if !b.leq(b.neg(sf.boxed(a, 0)), sf.dia(a, b.top())) {
            return fail("nonempty", &[a], &[]);
        }
        for &x in &xs {
            for &y in &xs {
                if sf.boxed(a, x & y) != sf.boxed(a, x) & sf.boxed(a, y) {
                    return fail("box-meet", &[a], &[x, y]);
                }
                if !b.leq(sf.dia(a, x) & sf.boxed(a, y), sf.dia(a, x & y)) {
                    return fail("someone-and", &[a], &[x, y]);
                }
                if b.leq(x, y) && !b.leq(sf.dia(a, x), sf.dia(a, y)) {
                    return fail("dia-monotone", &[a], &[x, y]);
                }
            }
        }
    }

    let has = |op| sf.ops.contains_key(&op);
    let op = |o, args: &[usize]| sf.apply(o, args);

    if has(Op::Plus) {
        let zero = op(Op::Zero, &[]);
        for a in 0..m {
            if op(Op::Plus, &[a, a]) != a {
                return fail("plus-idempotent", &[a], &[]);
            }
            if op(Op::Plus, &[a, zero]) != a {
                return fail("zero-unit", &[a], &[]);
            }
            for c in 0..m {
                if op(Op::Plus, &[a, c]) != op(Op::Plus, &[c, a]) {
                    return fail("plus-commutative", &[a, c], &[]);
                }
                for d in 0..m {
                    if op(Op::Plus, &[op(Op::Plus, &[a, c]), d]) != op(Op::Plus, &[a, op(Op::Plus, &[c, d])]) {
                        return fail("plus-associative", &[a, c, d], &[]);
                    }
                }
            }
        }
        for &x in &xs {
            if sf.boxed(zero, x) != b.top() {
                return fail("box-zero", &[zero], &[x]);
            }
            if sf.dia(zero, x) != 0 {
                return fail("dia-zero", &[zero], &[x]);
            }
            for a in 0..m {
                for c in 0..m {
                    let s = op(Op::Plus, &[a, c]);
                    if sf.boxed(s, x) != sf.boxed(a, x) & sf.boxed(c, x) {
                        return fail("box-plus", &[a, c], &[x]);
                    }
                    if sf.dia(s, x) != sf.dia(a, x) | sf.dia(c, x) {
                        return fail("dia-plus", &[a, c], &[x]);
                    }
                }
            }
        }
    }

    if has(Op::Compose) {
        let one = op(Op::One, &[]);
        for a in 0..m {
            if op(Op::Compose, &[a, one]) != a {
                return fail("one-right-unit", &[a], &[]);
            }
        }
        for &x in &xs {
            if sf.boxed(one, x) != x {
                return fail("box-one", &[one], &[x]);
            }
            if sf.dia(one, x) != x {
                return fail("dia-one", &[one], &[x]);
            }
            for a in 0..m {
                for c in 0..m {
                    let s = op(Op::Compose, &[a, c]);
                    if sf.boxed(s, x) != sf.boxed(a, sf.boxed(c, x)) {
                        return fail("box-compose", &[a, c], &[x]);
                    }
                    if sf.dia(s, x) != sf.dia(a, sf.boxed(c, 0) | sf.dia(c, x)) {
                        return fail("dia-compose", &[a, c], &[x]);
                    }
                }
            }
        }
    }

    if has(Op::Cap) {
        let zero = op(Op::Zero, &[]);
        let leq = |a: usize, c: usize| op(Op::Plus, &[a, c]) == c;
        if op(Op::Cap, &[zero]) != zero {
            return fail("cap-zero", &[zero], &[]);
        }
        for a in 0..m {
            let ca = op(Op::Cap, &[a]);
            if !leq(a, ca) {
                return fail("cap-extensive", &[a], &[]);
            }
            if op(Op::Cap, &[ca]) != ca {
                return fail("cap-idempotent", &[a], &[]);
            }
            for c in 0..m {
                if leq(a, c) && !leq(ca, op(Op::Cap, &[c])) {
                    return fail("cap-monotone", &[a, c], &[]);
                }
            }
            for &x in &xs {
                if !b.leq(sf.dia(a, x), x) {
                    return fail("dia-reflexive", &[a], &[x]);
                }
                if sf.boxed(ca, x) != sf.boxed(a, x) {
                    return fail("box-cap", &[a], &[x]);
                }
                if !b.leq(sf.dia(ca, x), sf.dia(a, b.top())) {
                    return fail("cap-nonempty", &[a], &[x]);
                }
                for &y in &xs {
                    if !b.leq(sf.dia(ca, x) & sf.dia(ca, y), sf.dia(ca, x & y)) {
                        return fail("cap-and", &[a], &[x, y]);
                    }
                }
            }
        }
    }

    if has(Op::Complement) {
        let meet = |a, c| op(Op::Meet, &[a, c]);
        let join = |a, c| op(Op::Join, &[a, c]);
        let neg = |a| op(Op::Complement, &[a]);
        let top = join(0, neg(0));
        let bottom = meet(0, neg(0));
        for a in 0..m {
            if neg(neg(a)) != a {
                return fail("complement-involutive", &[a], &[]);
            }
            if join(a, neg(a)) != top || meet(a, neg(a)) != bottom {
                return fail("complement", &[a], &[]);
            }
            for c in 0..m {
                if meet(a, c) != meet(c, a) || join(a, c) != join(c, a) {
                    return fail("commutative", &[a, c], &[]);
                }
                if meet(a, join(a, c)) != a || join(a, meet(a, c)) != a {
                    return fail("absorption", &[a, c], &[]);
                }
                for d in 0..m {
                    if meet(a, meet(c, d)) != meet(meet(a, c), d) || join(a, join(c, d)) != join(join(a, c), d) {
                        return fail("associative", &[a, c, d], &[]);
                    }
                    if meet(a, join(c, d)) != join(meet(a, c), meet(a, d)) {
                        return fail("distributive", &[a, c, d], &[]);
                    }
                }
            }
        }
    }
    None
}

/// Whether `lhs ≈ rhs` holds under every evaluation of the occurring variables.
pub fn equation_valid(sf: &SigmaFrame, lhs: &Formula, rhs: &Formula, caps: &Caps) -> Result<Option<SigmaCounter>> {
    let (mut ps, mut gs) = lhs.variables_of();
    let (ps2, gs2) = rhs.variables_of();
    ps.extend(ps2);
    gs.extend(gs2);
    let ps: Vec<String> = ps.into_iter().collect();
    let gs: Vec<String> = gs.into_iter().collect();
    let size = sf.props.size();
    let m = sf.group_count();
    let space = (size as u128)
        .checked_pow(ps.len() as u32)
        .and_then(|p| p.checked_mul((m as u128).checked_pow(gs.len() as u32)?))
        .unwrap_or(u128::MAX);
    if space > caps.valuations as u128 {
        return Err(Error::cap("evaluation", space, caps.valuations as u128));
    }
    let mut pidx = vec![0usize; ps.len()];
    loop {
        let props: BTreeMap<String, u64> = ps.iter().cloned().zip(pidx.iter().map(|&x| x as u64)).collect();
        let mut gidx = vec![0usize; gs.len()];
        loop {
            let groups: BTreeMap<String, usize> = gs.iter().cloned().zip(gidx.iter().copied()).collect();
            let l = sf.eval_formula(lhs, &props, &groups)?;
            let r = sf.eval_formula(rhs, &props, &groups)?;
            if l != r {
                return Ok(Some(SigmaCounter {
                    props,
                    groups,
                    lhs: l,
                    rhs: r,
                }));
            }
            if !crate::neighborhood::advance(&mut gidx, m) {
                break;
            }
        }
        if !crate::neighborhood::advance(&mut pidx, size) {
            break;
        }
    }
    Ok(None)
}
