use std::collections::{BTreeMap, HashMap};
use std::fmt;

use super::algebra::SigmaFrame;
use super::complex::{complex_algebra, complex_algebra_with_ops, ComplexAlgebra};
use crate::caps::Caps;
use crate::error::Result;
use crate::relational::{box_plus, dia_plus, Intension, RelSet, RelationalFrame, Relations};
use crate::syntax::Op;
use crate::theories::Theory;
use crate::worldset::WorldSet;

/// The ultrafilter frame of a finite frame. Ultrafilters are identified with
/// atoms: world `u` is the ultrafilter generated by atom `u`, so `x̂` has the
/// same bit mask as `x`.
#[derive(Debug, Clone)]
pub struct UltrafilterFrame {
    /// Worlds and the deduplicated relations `r_{a,x}`. It carries no
    /// operations of its own; see `group_map` and [`lift_operations`].
    pub frame: RelationalFrame,
    /// `G(a)` for every group element `a` of the source frame.
    pub group_map: Vec<Intension>,
    /// Relation id of `r_{a,x}`, indexed `a * 2^atoms + x`.
    pub relation_of: Vec<usize>,
}

/// `⋂{y | u ∈ [a]y}` for every atom `u`.
fn supports(sf: &SigmaFrame, a: usize) -> Vec<u64> {
    let b = sf.props;
    (0..b.atoms)
        .map(|u| {
            b.elements()
                .filter(|&y| sf.boxed(a, y) >> u & 1 == 1)
                .fold(b.top(), |acc, y| acc & y)
        })
        .collect()
}

pub fn ultrafilter_frame(sf: &SigmaFrame) -> Result<UltrafilterFrame> {
    let b = sf.props;
    let n = b.atoms;
    let caps = Caps {
        relations: usize::MAX,
        ..Caps::default()
    };
    let mut rels = Relations::new(n);
    let mut relation_of = Vec::with_capacity(sf.group_count() * b.size());
    let mut group_map = Vec::with_capacity(sf.group_count());
    for a in 0..sf.group_count() {
        let support = supports(sf, a);
        for x in b.elements() {
            let r = support.iter().map(|&s| WorldSet(s & x)).collect();
            relation_of.push(rels.materialize(r, &caps)?);
        }
        let base = a << n;
        group_map.push(Intension(
            (0..n)
                .map(|u| {
                    b.elements()
                        .filter(|&x| sf.dia(a, x) >> u & 1 == 1)
                        .map(|x| relation_of[base | x as usize])
                        .collect::<RelSet>()
                })
                .collect(),
        ));
    }
    let labels = (0..n).map(|u| format!("u{u}")).collect();
    let mut names = vec![String::new(); rels.len()];
    for a in 0..sf.group_count() {
        for x in b.elements() {
            let r = relation_of[(a << n) | x as usize];
            if names[r].is_empty() {
                names[r] = format!("r[{},{}]", sf.group_elements[a], x);
            }
        }
    }
    let frame = RelationalFrame::new(Theory::Empty, labels, names, rels)?;
    Ok(UltrafilterFrame {
        frame,
        group_map,
        relation_of,
    })
}

/// The algebra `G₊`: distinct values of `G`, with `o₊(G(a₁),…) = G(o(a₁,…))`.
#[derive(Debug, Clone)]
pub struct LiftedAlgebra {
    pub carrier: Vec<Intension>,
    /// Index into `carrier` of `G(a)` for each source element `a`.
    pub class_of: Vec<usize>,
    pub ops: BTreeMap<Op, Vec<usize>>,
}

/// Source arguments with equal `G` values whose results under `op` differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IllDefined {
    pub op: Op,
    pub first: Vec<usize>,
    pub second: Vec<usize>,
}

pub fn lift_operations(sf: &SigmaFrame, uf: &UltrafilterFrame) -> std::result::Result<LiftedAlgebra, IllDefined> {
    let mut carrier: Vec<Intension> = Vec::new();
    let mut index: HashMap<&Intension, usize> = HashMap::new();
    let mut class_of = Vec::with_capacity(uf.group_map.len());
    for g in &uf.group_map {
        let next = carrier.len();
        let c = *index.entry(g).or_insert(next);
        if c == next {
            carrier.push(g.clone());
        }
        class_of.push(c);
    }
    let m = sf.group_count();
    let k_classes = carrier.len();
    let mut ops = BTreeMap::new();
    for &op in sf.ops.keys() {
        let k = op.arity();
        let mut table: Vec<Option<(usize, Vec<usize>)>> = vec![None; k_classes.pow(k as u32)];
        let mut args = vec![0usize; k];
        loop {
            let code = args.iter().rev().fold(0, |acc, &a| acc * k_classes + class_of[a]);
            let result = class_of[sf.apply(op, &args)];
            match &table[code] {
                Some((r, first)) if *r != result => {
                    return Err(IllDefined {
                        op,
                        first: first.clone(),
                        second: args.clone(),
                    })
                }
                Some(_) => {}
                None => table[code] = Some((result, args.clone())),
            }
            if k == 0 || !crate::neighborhood::advance(&mut args, m) {
                break;
            }
        }
        ops.insert(op, table.into_iter().map(|e| e.expect("every class has a member").0).collect());
    }
    Ok(LiftedAlgebra {
        carrier,
        class_of,
        ops,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CanonicalViolation {
    /// The map on propositions is not a Boolean homomorphism.
    M1 { x: u64, y: u64 },
    /// The lifted group operations are not well defined.
    M2(IllDefined),
    M3 { group: usize, x: u64 },
    M4 { group: usize, x: u64 },
    NotInjective { x: u64, y: u64 },
}

impl fmt::Display for CanonicalViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CanonicalViolation::M1 { x, y } => write!(f, "(m1) fails at {x:#b}, {y:#b}"),
            CanonicalViolation::M2(e) => write!(
                f,
                "(m2) fails: '{}' sends {:?} and {:?} to different classes",
                e.op, e.first, e.second
            ),
            CanonicalViolation::M3 { group, x } => write!(f, "(m3) fails at group {group}, element {x:#b}"),
            CanonicalViolation::M4 { group, x } => write!(f, "(m4) fails at group {group}, element {x:#b}"),
            CanonicalViolation::NotInjective { x, y } => write!(f, "{x:#b} and {y:#b} have the same image"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CanonicalReport {
    pub ultrafilters: usize,
    pub relations: usize,
    pub group_images: usize,
    /// The canonical embedding algebra, when the lifted operations are well defined.
    pub embedding_algebra: Option<SigmaFrame>,
    pub violation: Option<CanonicalViolation>,
}

impl CanonicalReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Builds the canonical embedding algebra and checks that `x ↦ x̂`,
/// `a ↦ G(a)` is a quasi-embedding.
pub fn canonical_morphism_check(sf: &SigmaFrame) -> Result<CanonicalReport> {
    let uf = ultrafilter_frame(sf)?;
    let b = sf.props;
    let n = b.atoms;
    let mut report = CanonicalReport {
        ultrafilters: n,
        relations: uf.frame.relations.len(),
        group_images: 0,
        embedding_algebra: None,
        violation: None,
    };
    // x̂ = {u | x ∈ ↑u}
    let hat = |x: u64| -> WorldSet { (0..n).filter(|&u| x >> u & 1 == 1).collect() };
    let full = WorldSet::full(n);

    let mut seen: HashMap<WorldSet, u64> = HashMap::new();
    for x in b.elements() {
        if let Some(&y) = seen.get(&hat(x)) {
            report.violation = Some(CanonicalViolation::NotInjective { x: y, y: x });
            return Ok(report);
        }
        seen.insert(hat(x), x);
        if hat(b.neg(x)) != hat(x).complement(n) {
            report.violation = Some(CanonicalViolation::M1 { x, y: x });
            return Ok(report);
        }
        for y in b.elements() {
            if hat(x & y) != hat(x).intersection(hat(y)) || hat(x | y) != hat(x).union(hat(y)) {
                report.violation = Some(CanonicalViolation::M1 { x, y });
                return Ok(report);
            }
        }
    }
    if hat(b.top()) != full || !hat(b.bottom()).is_empty() {
        report.violation = Some(CanonicalViolation::M1 { x: b.top(), y: b.bottom() });
        return Ok(report);
    }

    let lifted = match lift_operations(sf, &uf) {
        Ok(l) => l,
        Err(e) => {
            report.violation = Some(CanonicalViolation::M2(e));
            return Ok(report);
        }
    };
    report.group_images = lifted.carrier.len();

    let rels = &uf.frame.relations;
    for a in 0..sf.group_count() {
        let g = &uf.group_map[a];
        for x in b.elements() {
            if hat(sf.boxed(a, x)) != box_plus(rels, g, hat(x)) {
                report.violation = Some(CanonicalViolation::M3 { group: a, x });
                return Ok(report);
            }
            if hat(sf.dia(a, x)) != dia_plus(rels, g, hat(x)) {
                report.violation = Some(CanonicalViolation::M4 { group: a, x });
                return Ok(report);
            }
        }
    }
    report.embedding_algebra = Some(complex_algebra_with_ops(
        sf.theory,
        &uf.frame,
        &lifted.carrier,
        lifted.ops,
    )?);
    Ok(report)
}

/// `(𝔉⁺)₊` for the complex algebra over the closure of `seeds`.
pub fn ultrafilter_extension(fr: &RelationalFrame, seeds: &[Intension], caps: &Caps) -> Result<(ComplexAlgebra, UltrafilterFrame)> {
    let ca = complex_algebra(fr, seeds, caps)?;
    let uf = ultrafilter_frame(&ca.sigma)?;
    Ok((ca, uf))
}

/// First `(a, b, u)` where the lifted join is not the pointwise union of
/// relation sets: `G(a+b)(u) ≠ G(a)(u) ∪ G(b)(u)`.
pub fn pointwise_join_violation(sf: &SigmaFrame, uf: &UltrafilterFrame) -> Option<(usize, usize, usize)> {
    sf.ops.get(&Op::Plus)?;
    let m = sf.group_count();
    for a in 0..m {
        for c in 0..m {
            let s = sf.apply(Op::Plus, &[a, c]);
            for u in 0..sf.props.atoms {
                let union: RelSet = uf.group_map[a].0[u].union(&uf.group_map[c].0[u]).copied().collect();
                if uf.group_map[s].0[u] != union {
                    return Some((a, c, u));
                }
            }
        }
    }
    None
}
