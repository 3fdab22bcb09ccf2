use std::collections::BTreeSet;

use crate::syntax::{Formula, GroupTerm, Op};

/// Smallest set containing `f` and `true`, closed under subformulas and the
/// closure-semilattice conditions on boxes and diamonds.
pub fn lcs_closure_set(f: &Formula) -> BTreeSet<Formula> {
    let mut set = BTreeSet::new();
    let mut work = vec![f.clone(), Formula::Top];
    while let Some(g) = work.pop() {
        if set.contains(&g) {
            continue;
        }
        work.extend(g.children().into_iter().cloned());
        match &g {
            Formula::Box(t, chi) => {
                work.push(Formula::Dia(t.clone(), chi.clone()));
                match t {
                    GroupTerm::Op(Op::Plus, args) => {
                        work.push(Formula::Box(args[0].clone(), chi.clone()));
                        work.push(Formula::Box(args[1].clone(), chi.clone()));
                    }
                    GroupTerm::Op(Op::Cap, args) => {
                        work.push(Formula::Box(args[0].clone(), chi.clone()));
                    }
                    _ => {}
                }
            }
            Formula::Dia(t, chi) => {
                work.push(Formula::Box(t.clone(), chi.clone()));
                match t {
                    GroupTerm::Op(Op::Plus, args) => {
                        let (a, b) = (&args[0], &args[1]);
                        let guard = Formula::dia(b.clone(), Formula::Top)
                            .not()
                            .or(Formula::Dia(b.clone(), chi.clone()));
                        work.push(Formula::dia(a.clone(), guard));
                    }
                    GroupTerm::Op(Op::Cap, args) => {
                        work.push(Formula::dia(args[0].clone(), Formula::Top));
                    }
                    _ => {}
                }
            }
            _ => {}
        }
        set.insert(g);
    }
    set
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, Signature};

    fn parse(s: &str) -> Formula {
        parse_formula(s, &Signature::csl()).unwrap()
    }

    fn set(xs: &[&str]) -> BTreeSet<Formula> {
        xs.iter().map(|s| parse(s)).collect()
    }

    #[test]
    fn propositional() {
        assert_eq!(lcs_closure_set(&parse("p")), set(&["p", "true"]));
    }

    #[test]
    fn closure_of_cap_box() {
        // Worked by hand from the closure conditions.
        let expected = set(&["[a^]p", "<a^>p", "[a]p", "<a>p", "<a>true", "[a]true", "p", "true"]);
        assert_eq!(lcs_closure_set(&parse("[a^]p")), expected);
    }

    #[test]
    fn closure_of_sum_diamond() {
        let g = lcs_closure_set(&parse("<a+b>p"));
        let guarded = parse("<a>(~<b>true | <b>p)");
        assert!(g.contains(&guarded));
        for sub in guarded.subformulas() {
            assert!(g.contains(sub));
        }
        assert!(g.contains(&parse("[a+b]p")));
        assert!(g.contains(&parse("[a]p")));
        assert!(g.contains(&parse("[b]p")));
    }
}
