//! Signatures, the two-sorted abstract syntax, and its concrete grammar.

mod ast;
mod parser;
mod render;
mod signature;

pub use ast::{Formula, GroupTerm};
pub use parser::{parse_formula, parse_term};
pub use render::{render_formula, render_term};
pub use signature::{Op, Signature};
