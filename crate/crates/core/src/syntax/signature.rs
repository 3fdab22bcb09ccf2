use std::fmt;

use crate::error::{Error, Result};

/// Group operators known to the built-in signatures.
///
/// `Plus` (semilattice join) and `Join` (Boolean join) share the concrete
/// symbol `+`; no built-in signature contains both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Op {
    Zero,
    Plus,
    One,
    Compose,
    Cap,
    Complement,
    Meet,
    Join,
}

impl Op {
    pub const ALL: [Op; 8] = [
        Op::Zero,
        Op::Plus,
        Op::One,
        Op::Compose,
        Op::Cap,
        Op::Complement,
        Op::Meet,
        Op::Join,
    ];

    /// Concrete-syntax symbol.
    pub fn symbol(self) -> &'static str {
        match self {
            Op::Zero => "0",
            Op::Plus | Op::Join => "+",
            Op::One => "1",
            Op::Compose => ".",
            Op::Cap => "^",
            Op::Complement => "-",
            Op::Meet => "*",
        }
    }

    /// Stable identifier used in documents; unlike `symbol` it is unique.
    pub fn name(self) -> &'static str {
        match self {
            Op::Zero => "zero",
            Op::Plus => "plus",
            Op::One => "one",
            Op::Compose => "compose",
            Op::Cap => "cap",
            Op::Complement => "complement",
            Op::Meet => "meet",
            Op::Join => "join",
        }
    }

    pub fn from_name(name: &str) -> Option<Op> {
        Op::ALL.into_iter().find(|op| op.name() == name)
    }

    pub fn arity(self) -> usize {
        match self {
            Op::Zero | Op::One => 0,
            Op::Cap | Op::Complement => 1,
            Op::Plus | Op::Compose | Op::Meet | Op::Join => 2,
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    name: String,
    operators: Vec<Op>,
}

impl Signature {
    /// Fails if two operators share a concrete symbol.
    pub fn new(name: impl Into<String>, operators: Vec<Op>) -> Result<Self> {
        for (i, a) in operators.iter().enumerate() {
            if operators[..i].iter().any(|b| b.symbol() == a.symbol()) {
                return Err(Error::Document(format!(
                    "signature has two operators with symbol '{}'",
                    a.symbol()
                )));
            }
        }
        Ok(Signature {
            name: name.into(),
            operators,
        })
    }

    pub fn empty() -> Self {
        Signature::new("empty", vec![]).unwrap()
    }

    pub fn sl() -> Self {
        Signature::new("sl", vec![Op::Plus, Op::Zero]).unwrap()
    }

    pub fn rum() -> Self {
        Signature::new("rum", vec![Op::Compose, Op::One]).unwrap()
    }

    pub fn csl() -> Self {
        Signature::new("csl", vec![Op::Plus, Op::Zero, Op::Cap]).unwrap()
    }

    pub fn ba() -> Self {
        Signature::new("ba", vec![Op::Complement, Op::Meet, Op::Join]).unwrap()
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "empty" => Some(Signature::empty()),
            "sl" => Some(Signature::sl()),
            "rum" => Some(Signature::rum()),
            "csl" => Some(Signature::csl()),
            "ba" => Some(Signature::ba()),
            _ => None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ops(&self) -> &[Op] {
        &self.operators
    }

    /// `(symbol, arity)` pairs.
    pub fn operators(&self) -> impl Iterator<Item = (&'static str, usize)> + '_ {
        self.operators.iter().map(|op| (op.symbol(), op.arity()))
    }

    pub fn contains(&self, op: Op) -> bool {
        self.operators.contains(&op)
    }

    pub fn lookup(&self, symbol: &str) -> Option<Op> {
        self.operators.iter().copied().find(|op| op.symbol() == symbol)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_tables() {
        let arities = |s: Signature| {
            let mut v: Vec<_> = s.operators().collect();
            v.sort();
            v
        };
        assert!(arities(Signature::empty()).is_empty());
        assert_eq!(arities(Signature::sl()), vec![("+", 2), ("0", 0)]);
        assert_eq!(arities(Signature::rum()), vec![(".", 2), ("1", 0)]);
        assert_eq!(arities(Signature::csl()), vec![("+", 2), ("0", 0), ("^", 1)]);
        assert_eq!(arities(Signature::ba()), vec![("*", 2), ("+", 2), ("-", 1)]);
    }

    #[test]
    fn duplicate_symbols_rejected() {
        assert!(Signature::new("bad", vec![Op::Plus, Op::Join]).is_err());
    }

    #[test]
    fn names_round_trip() {
        for op in Op::ALL {
            assert_eq!(Op::from_name(op.name()), Some(op));
        }
    }
}
