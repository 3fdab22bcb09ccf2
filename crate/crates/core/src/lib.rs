//! Model checking, duality, and bounded countermodel search for epistemic
//! logics whose groups are given by structured intensional terms.

pub mod caps;
pub mod document;
pub mod duality;
pub mod error;
pub mod neighborhood;
pub mod random;
pub mod relational;
pub mod search;
pub mod syntax;
pub mod theories;
pub mod worldset;

pub use caps::Caps;
pub use error::{Error, Result};
pub use syntax::{parse_formula, parse_term, render_formula, render_term, Formula, GroupTerm, Op, Signature};
pub use worldset::WorldSet;
pub use theories::Theory;
