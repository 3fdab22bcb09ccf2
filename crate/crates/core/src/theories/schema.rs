use std::collections::BTreeMap;
use std::fmt;

use super::Theory;
use crate::error::Result;
use crate::syntax::{parse_formula, parse_term, render_formula, render_term, Formula, GroupTerm};

/// Proposition metavariables that schemata may use.
pub const FORMULA_METAS: [&str; 5] = ["phi", "psi", "chi", "psi1", "psi2"];
/// Group metavariables that schemata may use.
pub const TERM_METAS: [&str; 2] = ["alpha", "beta"];

/// A named axiom schema in concrete syntax over the metavariables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Schema {
    pub name: &'static str,
    pub text: &'static str,
}

/// A named rule: premise schemata over conclusion schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSchema {
    pub name: &'static str,
    pub premises: Vec<&'static str>,
    pub conclusion: &'static str,
}

/// Sort-correct substitution for the metavariables of a schema.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SchemaInstance {
    pub schema: String,
    pub formulas: BTreeMap<String, Formula>,
    pub terms: BTreeMap<String, GroupTerm>,
}

impl fmt::Display for SchemaInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[", self.schema)?;
        let mut first = true;
        for (k, v) in &self.formulas {
            write!(f, "{}{k} := {}", if first { "" } else { ", " }, render_formula(v))?;
            first = false;
        }
        for (k, v) in &self.terms {
            write!(f, "{}{k} := {}", if first { "" } else { ", " }, render_term(v))?;
            first = false;
        }
        write!(f, "]")
    }
}

/// Values substituted for metavariables when generating instances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstantiationSets {
    pub formulas: Vec<Formula>,
    pub terms: Vec<GroupTerm>,
}

impl InstantiationSets {
    /// `φ, ψ ∈ {p, q, p&q, ~p}` and the theory's term set over `a, b`.
    pub fn for_theory(theory: Theory) -> Self {
        let sig = theory.signature();
        let formulas = ["p", "q", "p & q", "~p"]
            .iter()
            .map(|s| parse_formula(s, &sig).unwrap())
            .collect();
        let terms: &[&str] = match theory {
            Theory::Empty => &["a", "b"],
            Theory::Sl => &["a", "b", "a + b"],
            Theory::Rum => &["a", "b", "a . b"],
            Theory::Csl => &["a", "b", "a + b", "a^"],
            Theory::Ba => &["a", "b", "-a", "a * b", "a + b"],
        };
        InstantiationSets {
            formulas,
            terms: terms.iter().map(|s| parse_term(s, &sig).unwrap()).collect(),
        }
    }

    /// The axiom sets plus the tautology `p | ~p`, so that rule premises can hold.
    pub fn for_rules(theory: Theory) -> Self {
        let mut sets = InstantiationSets::for_theory(theory);
        sets.formulas.push(parse_formula("p | ~p", &theory.signature()).unwrap());
        sets
    }
}

fn metas_in(formulas: &[Formula]) -> (Vec<&'static str>, Vec<&'static str>) {
    let mut props = std::collections::BTreeSet::new();
    let mut groups = std::collections::BTreeSet::new();
    for f in formulas {
        let (p, g) = f.variables_of();
        props.extend(p);
        groups.extend(g);
    }
    (
        FORMULA_METAS.iter().copied().filter(|m| props.contains(*m)).collect(),
        TERM_METAS.iter().copied().filter(|m| groups.contains(*m)).collect(),
    )
}

/// All substitutions of the given metavariables, in lexicographic order of
/// the instantiation sets.
fn substitutions(
    schema: &str,
    fmetas: &[&str],
    tmetas: &[&str],
    sets: &InstantiationSets,
) -> Vec<SchemaInstance> {
    let mut out = vec![SchemaInstance {
        schema: schema.to_string(),
        formulas: BTreeMap::new(),
        terms: BTreeMap::new(),
    }];
    for m in fmetas {
        out = out
            .into_iter()
            .flat_map(|inst| {
                sets.formulas.iter().map(move |f| {
                    let mut next = inst.clone();
                    next.formulas.insert(m.to_string(), f.clone());
                    next
                })
            })
            .collect();
    }
    for m in tmetas {
        out = out
            .into_iter()
            .flat_map(|inst| {
                sets.terms.iter().map(move |t| {
                    let mut next = inst.clone();
                    next.terms.insert(m.to_string(), t.clone());
                    next
                })
            })
            .collect();
    }
    out
}

impl Schema {
    pub fn formula(&self, theory: Theory) -> Result<Formula> {
        parse_formula(self.text, &theory.signature())
    }

    pub fn instantiate(&self, theory: Theory, inst: &SchemaInstance) -> Result<Formula> {
        Ok(self.formula(theory)?.substitute(&inst.formulas, &inst.terms))
    }

    pub fn instances(&self, theory: Theory, sets: &InstantiationSets) -> Result<Vec<(SchemaInstance, Formula)>> {
        let schema = self.formula(theory)?;
        let (fm, tm) = metas_in(std::slice::from_ref(&schema));
        Ok(substitutions(self.name, &fm, &tm, sets)
            .into_iter()
            .map(|inst| {
                let f = schema.substitute(&inst.formulas, &inst.terms);
                (inst, f)
            })
            .collect())
    }
}

/// A rule instance: `(substitution, premises, conclusion)`.
pub type RuleInstance = (SchemaInstance, Vec<Formula>, Formula);

impl RuleSchema {
    pub fn instances(&self, theory: Theory, sets: &InstantiationSets) -> Result<Vec<RuleInstance>> {
        let sig = theory.signature();
        let premises = self
            .premises
            .iter()
            .map(|p| parse_formula(p, &sig))
            .collect::<Result<Vec<_>>>()?;
        let conclusion = parse_formula(self.conclusion, &sig)?;
        let mut all = premises.clone();
        all.push(conclusion.clone());
        let (fm, tm) = metas_in(&all);
        Ok(substitutions(self.name, &fm, &tm, sets)
            .into_iter()
            .map(|inst| {
                let ps = premises.iter().map(|p| p.substitute(&inst.formulas, &inst.terms)).collect();
                let c = conclusion.substitute(&inst.formulas, &inst.terms);
                (inst, ps, c)
            })
            .collect())
    }
}

pub(super) fn base_axioms() -> Vec<Schema> {
    vec![
        Schema {
            name: "K",
            text: "[alpha](phi -> psi) -> [alpha]phi -> [alpha]psi",
        },
        Schema {
            name: "nonempty",
            text: "~[alpha]false -> <alpha>true",
        },
        Schema {
            name: "someone-and",
            text: "<alpha>phi & [alpha]psi -> <alpha>(phi & psi)",
        },
        Schema {
            name: "box-top",
            text: "[alpha]true <-> true",
        },
        Schema {
            name: "box-and",
            text: "[alpha](phi & psi) <-> [alpha]phi & [alpha]psi",
        },
    ]
}

pub(super) fn base_rules() -> Vec<RuleSchema> {
    vec![
        RuleSchema {
            name: "Nec",
            premises: vec!["phi"],
            conclusion: "[alpha]phi",
        },
        RuleSchema {
            name: "someone-mono0",
            premises: vec!["phi -> chi"],
            conclusion: "<alpha>phi -> <alpha>chi",
        },
        RuleSchema {
            name: "someone-mono1",
            premises: vec!["phi & psi1 -> chi"],
            conclusion: "<alpha>phi & [alpha]psi1 -> <alpha>chi",
        },
        RuleSchema {
            name: "someone-mono2",
            premises: vec!["phi & psi1 & psi2 -> chi"],
            conclusion: "<alpha>phi & [alpha]psi1 & [alpha]psi2 -> <alpha>chi",
        },
    ]
}

fn sl_axioms() -> Vec<Schema> {
    vec![
        Schema {
            name: "a5",
            text: "true -> [0]phi",
        },
        Schema {
            name: "a6",
            text: "<0>phi -> false",
        },
        Schema {
            name: "a7",
            text: "[alpha + beta]phi <-> [alpha]phi & [beta]phi",
        },
        Schema {
            name: "a8",
            text: "<alpha + beta>phi <-> <alpha>phi | <beta>phi",
        },
    ]
}

pub(super) fn specific_axioms(theory: Theory) -> Vec<Schema> {
    match theory {
        Theory::Empty | Theory::Ba => vec![],
        Theory::Sl => sl_axioms(),
        Theory::Rum => vec![
            Schema {
                name: "a13",
                text: "[1]phi <-> phi",
            },
            Schema {
                name: "a14",
                text: "<1>phi <-> phi",
            },
            Schema {
                name: "a15",
                text: "[alpha . beta]phi <-> [alpha][beta]phi",
            },
            Schema {
                name: "a16",
                text: "<alpha . beta>phi <-> <alpha>([beta]false | <beta>phi)",
            },
        ],
        Theory::Csl => {
            let mut all = sl_axioms();
            all.extend([
                // Read with the someone-modality; see the crate README.
                Schema {
                    name: "a21",
                    text: "<alpha>phi -> phi",
                },
                Schema {
                    name: "a22",
                    text: "<alpha^>phi & <alpha^>psi -> <alpha^>(phi & psi)",
                },
                Schema {
                    name: "a23",
                    text: "<alpha>phi -> <alpha^>phi",
                },
                Schema {
                    name: "a24",
                    text: "[alpha^]phi <-> [alpha]phi",
                },
                Schema {
                    name: "a25",
                    text: "<alpha^>phi -> <alpha>true",
                },
                Schema {
                    name: "a26",
                    text: "<alpha^^>phi -> <alpha^>phi",
                },
            ]);
            all
        }
    }
}

pub(super) fn specific_rules(theory: Theory) -> Vec<RuleSchema> {
    match theory {
        Theory::Csl => vec![RuleSchema {
            name: "cap-mono",
            premises: vec!["<alpha>phi -> <beta>phi"],
            conclusion: "<alpha^>phi -> <beta^>phi",
        }],
        _ => vec![],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_parse_in_their_theory() {
        for t in Theory::ALL {
            for s in t.axiom_suite() {
                s.formula(t).unwrap();
            }
            for r in t.rule_suite() {
                r.instances(t, &InstantiationSets::for_rules(t)).unwrap();
            }
        }
    }

    #[test]
    fn sl_has_four_specific_axioms() {
        assert_eq!(Theory::Sl.specific_axioms().len(), 4);
        assert_eq!(Theory::Csl.specific_axioms().len(), 10);
        assert_eq!(Theory::Rum.specific_axioms().len(), 4);
    }

    #[test]
    fn suites_contain_expected_schemata() {
        let sig = Theory::Rum.signature();
        let a16 = parse_formula("<alpha . beta>phi <-> <alpha>([beta]false | <beta>phi)", &sig).unwrap();
        assert!(Theory::Rum
            .axiom_suite()
            .iter()
            .any(|s| s.formula(Theory::Rum).unwrap() == a16));
        let a24 = parse_formula("[alpha^]phi <-> [alpha]phi", &Theory::Csl.signature()).unwrap();
        assert!(Theory::Csl
            .axiom_suite()
            .iter()
            .any(|s| s.formula(Theory::Csl).unwrap() == a24));
    }

    #[test]
    fn instance_counts() {
        let sets = InstantiationSets::for_theory(Theory::Sl);
        let a7 = Theory::Sl.specific_axioms()[2];
        // phi: 4 choices, alpha and beta: 3 each
        assert_eq!(a7.instances(Theory::Sl, &sets).unwrap().len(), 36);
        let k = Theory::base_axioms()[0];
        let inst = k.instances(Theory::Sl, &sets).unwrap();
        assert_eq!(inst.len(), 48);
        let (first, f) = &inst[0];
        assert_eq!(render_formula(f), "~([a]~(p & ~p) & ~~([a]p & ~[a]p))");
        assert_eq!(first.to_string(), "K[phi := p, psi := p, alpha := a]");
    }
}
