//! Minimal-parenthesis printing. The output parses back to the same AST.

use std::fmt;

use super::ast::{Formula, GroupTerm};
use super::signature::Op;

// Term binding levels, loosest first.
const SUM: u8 = 0;
const COMP: u8 = 1;
const PRE: u8 = 2;
const POST: u8 = 3;

fn term_level(t: &GroupTerm) -> u8 {
    match t {
        GroupTerm::Var(_) => POST,
        GroupTerm::Op(op, _) => match op {
            Op::Plus | Op::Join => SUM,
            Op::Compose | Op::Meet => COMP,
            Op::Complement => PRE,
            Op::Cap | Op::Zero | Op::One => POST,
        },
    }
}

fn write_term(out: &mut String, t: &GroupTerm, min: u8) {
    // Postfix operands need an atom or another postfix term.
    let paren = term_level(t) < min;
    if paren {
        out.push('(');
    }
    match t {
        GroupTerm::Var(v) => out.push_str(v),
        GroupTerm::Op(op, args) => match op.arity() {
            0 => out.push_str(op.symbol()),
            1 if *op == Op::Complement => {
                out.push('-');
                write_term(out, &args[0], PRE);
            }
            1 => {
                write_term(out, &args[0], POST);
                out.push_str(op.symbol());
            }
            _ => {
                let level = term_level(t);
                write_term(out, &args[0], level);
                out.push(' ');
                out.push_str(op.symbol());
                out.push(' ');
                write_term(out, &args[1], level + 1);
            }
        },
    }
    if paren {
        out.push(')');
    }
}

pub fn render_term(t: &GroupTerm) -> String {
    let mut out = String::new();
    write_term(&mut out, t, SUM);
    out
}

fn write_formula(out: &mut String, f: &Formula, top: bool) {
    match f {
        Formula::Top => out.push_str("true"),
        Formula::Not(g) if **g == Formula::Top => out.push_str("false"),
        Formula::Prop(p) => out.push_str(p),
        Formula::Not(g) => {
            out.push('~');
            write_formula(out, g, false);
        }
        Formula::Box(t, g) => {
            out.push('[');
            write_term(out, t, SUM);
            out.push(']');
            write_formula(out, g, false);
        }
        Formula::Dia(t, g) => {
            out.push('<');
            write_term(out, t, SUM);
            out.push('>');
            write_formula(out, g, false);
        }
        Formula::And(a, b) => {
            if !top {
                out.push('(');
            }
            write_formula(out, a, true);
            out.push_str(" & ");
            // & is left associative: a right-nested conjunction keeps its parens.
            write_formula(out, b, false);
            if !top {
                out.push(')');
            }
        }
    }
}

pub fn render_formula(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(&mut out, f, true);
    out
}

impl fmt::Display for GroupTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_term(self))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_formula(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_term, Signature};

    #[test]
    fn renders_minimally() {
        let a = GroupTerm::var("a");
        let b = GroupTerm::var("b");
        assert_eq!(render_term(&GroupTerm::binary(Op::Plus, a.clone(), b.clone())), "a + b");
        let p = Formula::prop("p");
        assert_eq!(render_formula(&Formula::boxed(a.clone(), p.clone())), "[a]p");
        assert_eq!(render_formula(&p.clone().and(Formula::prop("q")).not()), "~(p & q)");
        assert_eq!(render_formula(&Formula::bot()), "false");
    }

    #[test]
    fn examples_round_trip() {
        let cases = [
            ("csl", "(a + b)^ + a^^"),
            ("rum", "a . (b . 1)"),
            ("ba", "-(a + b) * --c"),
            ("sl", "a + (b + 0)"),
        ];
        for (sig, text) in cases {
            let sig = Signature::builtin(sig).unwrap();
            let t = parse_term(text, &sig).unwrap();
            assert_eq!(render_term(&t), text);
        }
        let sig = Signature::sl();
        for text in ["p & (q & r)", "~~p", "[a + b]<a>~true", "(p & q) & r"] {
            let f = parse_formula(text, &sig).unwrap();
            assert_eq!(parse_formula(&render_formula(&f), &sig).unwrap(), f);
        }
        assert_eq!(
            render_formula(&parse_formula("(p & q) & r", &sig).unwrap()),
            "p & q & r"
        );
    }
}
