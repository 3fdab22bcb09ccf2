//! Built-in theories: group operations, frame constraints, axiom and rule
//! schemata, and the finite closure set used for distributed knowledge.

mod closure;
mod ops;
mod schema;

use std::fmt;
use std::str::FromStr;

pub use closure::lcs_closure_set;
pub use ops::{
    ba_complement, ba_join, ba_meet, cap_images, compose_choices, compose_images, cs_closure, rum_compose,
    rum_one, sl_plus, sl_zero, variant_family, variant_images, Family,
};
pub use schema::{InstantiationSets, RuleSchema, Schema, SchemaInstance};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::relational::{Intension, Relations};
use crate::syntax::{Op, Signature};
use crate::worldset::WorldSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Theory {
    /// No group operators; groups are plain names.
    Empty,
    /// Join semilattice with zero.
    Sl,
    /// Right-unital magma: intensional composition with unit.
    Rum,
    /// Closure semilattice over reflexive frames.
    Csl,
    /// Boolean operations on group extents.
    Ba,
}

impl Theory {
    pub const ALL: [Theory; 5] = [Theory::Empty, Theory::Sl, Theory::Rum, Theory::Csl, Theory::Ba];

    pub fn name(self) -> &'static str {
        match self {
            Theory::Empty => "empty",
            Theory::Sl => "sl",
            Theory::Rum => "rum",
            Theory::Csl => "csl",
            Theory::Ba => "ba",
        }
    }

    pub fn signature(self) -> Signature {
        Signature::builtin(self.name()).expect("built-in signature")
    }

    /// Whether group terms can be evaluated from image families alone.
    /// Boolean complement depends on relation identities, so `Ba` cannot.
    pub fn image_level(self) -> bool {
        self != Theory::Ba
    }

    /// Frame constraint check; `None` when the relations conform.
    pub fn frame_violation(self, rels: &Relations) -> Option<String> {
        if self == Theory::Csl {
            for r in 0..rels.len() {
                if let Some(w) = (0..rels.world_count()).find(|&w| !rels.image(r, w).contains(w)) {
                    return Some(format!("relation {r} is not reflexive at world {w}"));
                }
            }
        }
        None
    }

    /// Whether a single relation image `x` at world `w` is admissible.
    pub fn admits_image(self, w: usize, x: WorldSet) -> bool {
        self != Theory::Csl || x.contains(w)
    }

    fn require(self, op: Op) -> Result<()> {
        if self.signature().contains(op) {
            Ok(())
        } else {
            Err(Error::OperatorNotInTheory {
                symbol: op.symbol().into(),
                theory: self.name().into(),
            })
        }
    }

    /// Interprets `op` on intensions over `rels`, materializing relations as needed.
    pub fn apply(self, op: Op, rels: &mut Relations, args: &[Intension], caps: &Caps) -> Result<Intension> {
        self.require(op)?;
        Ok(match op {
            Op::Zero => sl_zero(rels),
            Op::Plus | Op::Join => sl_plus(&args[0], &args[1]),
            Op::One => rum_one(rels, caps)?,
            Op::Compose => rum_compose(rels, &args[0], &args[1], caps)?,
            Op::Cap => cs_closure(rels, &args[0], caps)?,
            Op::Complement => ba_complement(rels, &args[0]),
            Op::Meet => ba_meet(&args[0], &args[1]),
        })
    }

    /// Interprets `op` on image families. `args[i][w]` is the family of the
    /// i-th argument at world `w`; the result has one family per world.
    pub fn apply_images(self, op: Op, world_count: usize, args: &[Vec<Family>]) -> Result<Vec<Family>> {
        self.require(op)?;
        let n = world_count;
        Ok(match op {
            Op::Zero => vec![Family::new(); n],
            Op::Plus => (0..n).map(|w| &args[0][w] | &args[1][w]).collect(),
            Op::One => (0..n).map(|w| Family::from([WorldSet::singleton(w)])).collect(),
            Op::Compose => {
                let variants: Vec<Family> = args[1].iter().map(variant_family).collect();
                (0..n).map(|w| compose_images(&args[0][w], &variants)).collect()
            }
            Op::Cap => args[0].iter().map(cap_images).collect(),
            Op::Complement | Op::Meet | Op::Join => {
                return Err(Error::InvalidModel(format!(
                    "operator '{}' depends on relation identities and has no image-level form",
                    op.symbol()
                )))
            }
        })
    }

    /// Axioms shared by every theory.
    pub fn base_axioms() -> Vec<Schema> {
        schema::base_axioms()
    }

    /// Rules shared by every theory.
    pub fn base_rules() -> Vec<RuleSchema> {
        schema::base_rules()
    }

    /// Axioms that the theory adds on top of the base logic.
    pub fn specific_axioms(self) -> Vec<Schema> {
        schema::specific_axioms(self)
    }

    pub fn specific_rules(self) -> Vec<RuleSchema> {
        schema::specific_rules(self)
    }

    /// Base axioms followed by the theory-specific ones.
    pub fn axiom_suite(self) -> Vec<Schema> {
        let mut all = Theory::base_axioms();
        all.extend(self.specific_axioms());
        all
    }

    pub fn rule_suite(self) -> Vec<RuleSchema> {
        let mut all = Theory::base_rules();
        all.extend(self.specific_rules());
        all
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Theory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Theory::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Document(format!("unknown theory '{s}' (expected empty, sl, rum, csl or ba)")))
    }
}
