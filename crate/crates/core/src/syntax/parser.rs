//! Lexer and recursive-descent parser for terms and formulas.

use std::collections::BTreeMap;

use super::ast::{Formula, GroupTerm};
use super::signature::{Op, Signature};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Zero,
    One,
    Plus,
    Dot,
    Star,
    Minus,
    Caret,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Lt,
    Gt,
    RBrace,
    Tilde,
    Amp,
    Bar,
    Arrow,
    Iff,
    True,
    False,
    Eof,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("identifier '{s}'"),
        Tok::Eof => "end of input".into(),
        other => {
            let s = match other {
                Tok::Zero => "0",
                Tok::One => "1",
                Tok::Plus => "+",
                Tok::Dot => ".",
                Tok::Star => "*",
                Tok::Minus => "-",
                Tok::Caret => "^",
                Tok::LParen => "(",
                Tok::RParen => ")",
                Tok::LBrack => "[",
                Tok::RBrack => "]",
                Tok::Lt => "<",
                Tok::Gt => ">",
                Tok::RBrace => "}",
                Tok::Tilde => "~",
                Tok::Amp => "&",
                Tok::Bar => "|",
                Tok::Arrow => "->",
                Tok::Iff => "<->",
                Tok::True => "true",
                _ => "false",
            };
            format!("'{s}'")
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        if c.is_ascii_lowercase() {
            while i < bytes.len()
                && (bytes[i].is_ascii_lowercase() || bytes[i].is_ascii_digit() || bytes[i] == b'_')
            {
                i += 1;
            }
            let word = &text[start..i];
            let tok = match word {
                "true" => Tok::True,
                "false" => Tok::False,
                _ => Tok::Ident(word.to_string()),
            };
            out.push((tok, start));
            continue;
        }
        let rest = &bytes[i..];
        let (tok, len) = if rest.starts_with(b"<->") {
            (Tok::Iff, 3)
        } else if rest.starts_with(b"->") {
            (Tok::Arrow, 2)
        } else {
            let tok = match c {
                b'0' => Tok::Zero,
                b'1' => Tok::One,
                b'+' => Tok::Plus,
                b'.' => Tok::Dot,
                b'*' => Tok::Star,
                b'-' => Tok::Minus,
                b'^' => Tok::Caret,
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b'[' => Tok::LBrack,
                b']' => Tok::RBrack,
                b'<' => Tok::Lt,
                b'>' => Tok::Gt,
                b'}' => Tok::RBrace,
                b'~' => Tok::Tilde,
                b'&' => Tok::Amp,
                b'|' => Tok::Bar,
                _ => {
                    let ch = text[i..].chars().next().unwrap();
                    return Err(Error::syntax(start, format!("unexpected character '{ch}'")));
                }
            };
            (tok, 1)
        };
        if matches!(tok, Tok::Zero | Tok::One)
            && bytes.get(i + 1).is_some_and(|b| b.is_ascii_alphanumeric())
        {
            return Err(Error::syntax(start, "identifiers must start with a lowercase letter"));
        }
        out.push((tok, start));
        i += len;
    }
    out.push((Tok::Eof, text.len()));
    Ok(out)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Sort {
    Group,
    Prop,
}

struct Parser<'s> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    sig: &'s Signature,
    sorts: BTreeMap<String, Sort>,
}

impl<'s> Parser<'s> {
    fn new(text: &str, sig: &'s Signature) -> Result<Self> {
        Ok(Parser {
            toks: lex(text)?,
            at: 0,
            sig,
            sorts: BTreeMap::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if t != Tok::Eof {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> Result<()> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("expected {}", describe(t))))
        }
    }

    fn unexpected(&self, what: &str) -> Error {
        Error::syntax(self.pos(), format!("{what}, found {}", describe(self.peek())))
    }

    fn finish(&self) -> Result<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("expected end of input"))
        }
    }

    fn declare(&mut self, name: &str, sort: Sort, pos: usize) -> Result<()> {
        match self.sorts.get(name) {
            Some(s) if *s != sort => Err(Error::SortClash {
                name: name.to_string(),
                pos,
            }),
            _ => {
                self.sorts.insert(name.to_string(), sort);
                Ok(())
            }
        }
    }

    fn operator(&self, symbol: &str, pos: usize) -> Result<Op> {
        self.sig.lookup(symbol).ok_or_else(|| Error::UnknownOperator {
            symbol: symbol.to_string(),
            pos,
            signature: self.sig.name().to_string(),
        })
    }

    // term := sum; sum := comp ("+" comp)*
    fn term(&mut self) -> Result<GroupTerm> {
        let mut lhs = self.comp()?;
        while *self.peek() == Tok::Plus {
            let pos = self.pos();
            self.bump();
            let op = self.operator("+", pos)?;
            let rhs = self.comp()?;
            lhs = GroupTerm::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    // comp := pre (("." | "*") pre)*
    fn comp(&mut self) -> Result<GroupTerm> {
        let mut lhs = self.pre()?;
        loop {
            let symbol = match self.peek() {
                Tok::Dot => ".",
                Tok::Star => "*",
                _ => return Ok(lhs),
            };
            let pos = self.pos();
            self.bump();
            let op = self.operator(symbol, pos)?;
            let rhs = self.pre()?;
            lhs = GroupTerm::binary(op, lhs, rhs);
        }
    }

    // pre := "-" pre | post
    fn pre(&mut self) -> Result<GroupTerm> {
        if *self.peek() == Tok::Minus {
            let pos = self.pos();
            self.bump();
            let op = self.operator("-", pos)?;
            return Ok(GroupTerm::unary(op, self.pre()?));
        }
        self.post()
    }

    // post := atom "^"*
    fn post(&mut self) -> Result<GroupTerm> {
        let mut t = self.atom()?;
        while *self.peek() == Tok::Caret {
            let pos = self.pos();
            self.bump();
            let op = self.operator("^", pos)?;
            t = GroupTerm::unary(op, t);
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<GroupTerm> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                self.declare(&name, Sort::Group, pos)?;
                Ok(GroupTerm::Var(name))
            }
            Tok::Zero => {
                self.bump();
                Ok(GroupTerm::constant(self.operator("0", pos)?))
            }
            Tok::One => {
                self.bump();
                Ok(GroupTerm::constant(self.operator("1", pos)?))
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(&Tok::RParen)?;
                Ok(t)
            }
            _ => Err(self.unexpected("expected a group term")),
        }
    }

    // iff := imp ("<->" imp)*
    fn iff(&mut self) -> Result<Formula> {
        let mut lhs = self.imp()?;
        while self.eat(&Tok::Iff) {
            let rhs = self.imp()?;
            lhs = lhs.iff(rhs);
        }
        Ok(lhs)
    }

    // imp := or ("->" imp)?
    fn imp(&mut self) -> Result<Formula> {
        let lhs = self.or()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.imp()?;
            return Ok(lhs.implies(rhs));
        }
        Ok(lhs)
    }

    // or := and ("|" and)*
    fn or(&mut self) -> Result<Formula> {
        let mut lhs = self.and()?;
        while self.eat(&Tok::Bar) {
            let rhs = self.and()?;
            lhs = lhs.or(rhs);
        }
        Ok(lhs)
    }

    // and := unary ("&" unary)*
    fn and(&mut self) -> Result<Formula> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::Amp) {
            let rhs = self.unary()?;
            lhs = lhs.and(rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(self.unary()?.not())
            }
            Tok::LBrack => {
                self.bump();
                let t = self.term()?;
                if self.eat(&Tok::RBrack) {
                    Ok(Formula::boxed(t, self.unary()?))
                } else if self.eat(&Tok::RBrace) {
                    // [t}f abbreviates ~<t>~f
                    Ok(Formula::dia(t, self.unary()?.not()).not())
                } else {
                    Err(self.unexpected("expected ']' or '}'"))
                }
            }
            Tok::Lt => {
                self.bump();
                let t = self.term()?;
                if self.eat(&Tok::Gt) {
                    Ok(Formula::dia(t, self.unary()?))
                } else if self.eat(&Tok::RBrace) {
                    // <t}f abbreviates ~[t]~f
                    Ok(Formula::boxed(t, self.unary()?.not()).not())
                } else {
                    Err(self.unexpected("expected '>' or '}'"))
                }
            }
            Tok::True => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::bot())
            }
            Tok::Ident(name) => {
                self.bump();
                self.declare(&name, Sort::Prop, pos)?;
                Ok(Formula::Prop(name))
            }
            Tok::LParen => {
                self.bump();
                let f = self.iff()?;
                self.expect(&Tok::RParen)?;
                Ok(f)
            }
            _ => Err(self.unexpected("expected a formula")),
        }
    }
}

pub fn parse_term(text: &str, sig: &Signature) -> Result<GroupTerm> {
    let mut p = Parser::new(text, sig)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula> {
    let mut p = Parser::new(text, sig)?;
    let f = p.iff()?;
    p.finish()?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> GroupTerm {
        GroupTerm::var(s)
    }

    fn p(s: &str) -> Formula {
        Formula::prop(s)
    }

    #[test]
    fn terms() {
        let sl = Signature::sl();
        assert_eq!(
            parse_term("a + 0", &sl).unwrap(),
            GroupTerm::binary(Op::Plus, v("a"), GroupTerm::constant(Op::Zero))
        );
        let rum = Signature::rum();
        assert_eq!(
            parse_term("(a . b) . 1", &rum).unwrap(),
            GroupTerm::binary(
                Op::Compose,
                GroupTerm::binary(Op::Compose, v("a"), v("b")),
                GroupTerm::constant(Op::One)
            )
        );
        assert_eq!(
            parse_term("a^", &Signature::csl()).unwrap(),
            GroupTerm::unary(Op::Cap, v("a"))
        );
        assert_eq!(
            parse_term("-a * b + c", &Signature::ba()).unwrap(),
            GroupTerm::binary(
                Op::Join,
                GroupTerm::binary(Op::Meet, GroupTerm::unary(Op::Complement, v("a")), v("b")),
                v("c")
            )
        );
    }

    #[test]
    fn term_precedence() {
        let csl = Signature::csl();
        assert_eq!(
            parse_term("a + b^^", &csl).unwrap(),
            GroupTerm::binary(
                Op::Plus,
                v("a"),
                GroupTerm::unary(Op::Cap, GroupTerm::unary(Op::Cap, v("b")))
            )
        );
        let rum = Signature::rum();
        assert_eq!(
            parse_term("a . b . c", &rum).unwrap(),
            GroupTerm::binary(Op::Compose, GroupTerm::binary(Op::Compose, v("a"), v("b")), v("c"))
        );
    }

    #[test]
    fn formulas_desugar() {
        let sl = Signature::sl();
        assert_eq!(
            parse_formula("[a](p -> q)", &sl).unwrap(),
            Formula::boxed(v("a"), p("p").and(p("q").not()).not())
        );
        assert_eq!(
            parse_formula("<a+b>p", &sl).unwrap(),
            Formula::dia(GroupTerm::binary(Op::Plus, v("a"), v("b")), p("p"))
        );
        assert_eq!(
            parse_formula("<a}p", &sl).unwrap(),
            Formula::boxed(v("a"), p("p").not()).not()
        );
        assert_eq!(
            parse_formula("[a}p", &sl).unwrap(),
            Formula::dia(v("a"), p("p").not()).not()
        );
        assert_eq!(parse_formula("false", &sl).unwrap(), Formula::Top.not());
        assert_eq!(
            parse_formula("p | q", &sl).unwrap(),
            p("p").not().and(p("q").not()).not()
        );
    }

    #[test]
    fn formula_precedence() {
        let sl = Signature::sl();
        // -> is right associative
        assert_eq!(
            parse_formula("p -> q -> r", &sl).unwrap(),
            p("p").implies(p("q").implies(p("r")))
        );
        // & binds tighter than |, modal prefixes tighter than &
        assert_eq!(
            parse_formula("[a]p & q | r", &sl).unwrap(),
            Formula::boxed(v("a"), p("p")).and(p("q")).or(p("r"))
        );
        assert_eq!(
            parse_formula("~[a]p <-> p", &sl).unwrap(),
            Formula::boxed(v("a"), p("p")).not().iff(p("p"))
        );
        assert_eq!(
            parse_formula("  [a] # comment\n p", &sl).unwrap(),
            Formula::boxed(v("a"), p("p"))
        );
        assert_eq!(
            parse_formula("<a>p<->q", &sl).unwrap(),
            Formula::dia(v("a"), p("p")).iff(p("q"))
        );
    }

    #[test]
    fn errors_have_positions() {
        let sl = Signature::sl();
        match parse_formula("[a]p &", &sl) {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 6),
            other => panic!("{other:?}"),
        }
        match parse_formula("[a . b]p", &sl) {
            Err(Error::UnknownOperator { symbol, pos, .. }) => {
                assert_eq!(symbol, ".");
                assert_eq!(pos, 3);
            }
            other => panic!("{other:?}"),
        }
        match parse_formula("[p]p", &sl) {
            Err(Error::SortClash { name, pos }) => {
                assert_eq!(name, "p");
                assert_eq!(pos, 3);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_formula("[p & q]r", &sl), Err(Error::Syntax { pos: 3, .. })));
        assert!(matches!(parse_formula("p $ q", &sl), Err(Error::Syntax { pos: 2, .. })));
        assert!(matches!(parse_formula("[a]P", &sl), Err(Error::Syntax { pos: 3, .. })));
        assert!(matches!(parse_term("a b", &sl), Err(Error::Syntax { pos: 2, .. })));
        assert!(matches!(parse_term("01", &sl), Err(Error::Syntax { pos: 0, .. })));
    }
}
