use std::collections::{BTreeMap, BTreeSet};

use super::signature::{Op, Signature};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupTerm {
    Var(String),
    Op(Op, Vec<GroupTerm>),
}

/// Formulas over the primitive connectives. `Top` is the only constant;
/// `false` is `Not(Top)` and all other connectives are desugared away.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Top,
    Prop(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    /// Everyone in the group believes.
    Box(GroupTerm, Box<Formula>),
    /// Someone in the group believes.
    Dia(GroupTerm, Box<Formula>),
}

impl GroupTerm {
    pub fn var(name: impl Into<String>) -> Self {
        GroupTerm::Var(name.into())
    }

    pub fn op(op: Op, args: Vec<GroupTerm>) -> Self {
        GroupTerm::Op(op, args)
    }

    pub fn constant(op: Op) -> Self {
        GroupTerm::Op(op, vec![])
    }

    pub fn unary(op: Op, a: GroupTerm) -> Self {
        GroupTerm::Op(op, vec![a])
    }

    pub fn binary(op: Op, a: GroupTerm, b: GroupTerm) -> Self {
        GroupTerm::Op(op, vec![a, b])
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            GroupTerm::Var(v) => {
                out.insert(v.clone());
            }
            GroupTerm::Op(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Arity and membership check against a signature.
    pub fn check(&self, sig: &Signature) -> Result<()> {
        match self {
            GroupTerm::Var(_) => Ok(()),
            GroupTerm::Op(op, args) => {
                if !sig.contains(*op) {
                    return Err(Error::OperatorNotInTheory {
                        symbol: op.symbol().into(),
                        theory: sig.name().into(),
                    });
                }
                if args.len() != op.arity() {
                    return Err(Error::Arity {
                        symbol: op.symbol().into(),
                        expected: op.arity(),
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|a| a.check(sig))
            }
        }
    }

    pub fn substitute(&self, map: &BTreeMap<String, GroupTerm>) -> GroupTerm {
        match self {
            GroupTerm::Var(v) => map.get(v).cloned().unwrap_or_else(|| self.clone()),
            GroupTerm::Op(op, args) => {
                GroupTerm::Op(*op, args.iter().map(|a| a.substitute(map)).collect())
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            GroupTerm::Var(_) => 1,
            GroupTerm::Op(_, args) => 1 + args.iter().map(GroupTerm::size).sum::<usize>(),
        }
    }
}

impl Formula {
    pub fn prop(name: impl Into<String>) -> Self {
        Formula::Prop(name.into())
    }

    pub fn bot() -> Self {
        Formula::Top.not()
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, other: Formula) -> Self {
        Formula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Formula) -> Self {
        self.not().and(other.not()).not()
    }

    pub fn implies(self, other: Formula) -> Self {
        self.and(other.not()).not()
    }

    pub fn iff(self, other: Formula) -> Self {
        let back = other.clone().implies(self.clone());
        self.implies(other).and(back)
    }

    pub fn boxed(t: GroupTerm, f: Formula) -> Self {
        Formula::Box(t, Box::new(f))
    }

    pub fn dia(t: GroupTerm, f: Formula) -> Self {
        Formula::Dia(t, Box::new(f))
    }

    /// `(proposition variables, group variables)`.
    pub fn variables_of(&self) -> (BTreeSet<String>, BTreeSet<String>) {
        let mut props = BTreeSet::new();
        let mut groups = BTreeSet::new();
        self.collect_vars(&mut props, &mut groups);
        (props, groups)
    }

    fn collect_vars(&self, props: &mut BTreeSet<String>, groups: &mut BTreeSet<String>) {
        match self {
            Formula::Top => {}
            Formula::Prop(p) => {
                props.insert(p.clone());
            }
            Formula::Not(f) => f.collect_vars(props, groups),
            Formula::And(a, b) => {
                a.collect_vars(props, groups);
                b.collect_vars(props, groups);
            }
            Formula::Box(t, f) | Formula::Dia(t, f) => {
                t.collect_vars(groups);
                f.collect_vars(props, groups);
            }
        }
    }

    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Top | Formula::Prop(_) => 0,
            Formula::Not(f) => f.modal_depth(),
            Formula::And(a, b) => a.modal_depth().max(b.modal_depth()),
            Formula::Box(_, f) | Formula::Dia(_, f) => 1 + f.modal_depth(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Top | Formula::Prop(_) => 1,
            Formula::Not(f) => 1 + f.size(),
            Formula::And(a, b) => 1 + a.size() + b.size(),
            Formula::Box(t, f) | Formula::Dia(t, f) => 1 + t.size() + f.size(),
        }
    }

    pub fn check(&self, sig: &Signature) -> Result<()> {
        match self {
            Formula::Top | Formula::Prop(_) => Ok(()),
            Formula::Not(f) => f.check(sig),
            Formula::And(a, b) => a.check(sig).and_then(|_| b.check(sig)),
            Formula::Box(t, f) | Formula::Dia(t, f) => t.check(sig).and_then(|_| f.check(sig)),
        }
    }

    /// Simultaneous substitution of proposition and group variables.
    pub fn substitute(
        &self,
        props: &BTreeMap<String, Formula>,
        groups: &BTreeMap<String, GroupTerm>,
    ) -> Formula {
        match self {
            Formula::Top => Formula::Top,
            Formula::Prop(p) => props.get(p).cloned().unwrap_or_else(|| self.clone()),
            Formula::Not(f) => f.substitute(props, groups).not(),
            Formula::And(a, b) => a.substitute(props, groups).and(b.substitute(props, groups)),
            Formula::Box(t, f) => Formula::boxed(t.substitute(groups), f.substitute(props, groups)),
            Formula::Dia(t, f) => Formula::dia(t.substitute(groups), f.substitute(props, groups)),
        }
    }

    /// Immediate subformulas.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Top | Formula::Prop(_) => vec![],
            Formula::Not(f) | Formula::Box(_, f) | Formula::Dia(_, f) => vec![f],
            Formula::And(a, b) => vec![a, b],
        }
    }

    /// All subformulas, including `self`, in post-order without duplicates.
    pub fn subformulas(&self) -> Vec<&Formula> {
        let mut out: Vec<&Formula> = Vec::new();
        self.collect_subformulas(&mut out);
        out
    }

    fn collect_subformulas<'a>(&'a self, out: &mut Vec<&'a Formula>) {
        for c in self.children() {
            c.collect_subformulas(out);
        }
        if !out.contains(&self) {
            out.push(self);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn variables_and_depth() {
        let a = GroupTerm::var("a");
        let b = GroupTerm::var("b");
        let f = Formula::boxed(a.clone(), Formula::prop("p"))
            .and(Formula::dia(b.clone(), Formula::prop("q")));
        assert_eq!(f.variables_of(), (set(&["p", "q"]), set(&["a", "b"])));
        assert_eq!(f.modal_depth(), 1);
        let g = Formula::boxed(a, Formula::boxed(b, Formula::prop("p")));
        assert_eq!(g.modal_depth(), 2);
        assert_eq!(Formula::prop("p").variables_of(), (set(&["p"]), set(&[])));
    }

    #[test]
    fn arity_is_checked() {
        let bad = GroupTerm::Op(Op::Plus, vec![GroupTerm::var("a")]);
        assert!(matches!(bad.check(&Signature::sl()), Err(Error::Arity { .. })));
        let foreign = GroupTerm::constant(Op::One);
        assert!(matches!(
            foreign.check(&Signature::sl()),
            Err(Error::OperatorNotInTheory { .. })
        ));
    }

    #[test]
    fn subformulas_deduplicate() {
        let p = Formula::prop("p");
        let f = p.clone().and(p.clone());
        assert_eq!(f.subformulas(), vec![&p, &f]);
    }
}
