use std::collections::{BTreeMap, HashMap};

use super::algebra::SigmaFrame;
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::relational::{box_plus, dia_plus, Intension, RelationalFrame};
use crate::syntax::Op;
use crate::theories::{Family, Theory};
use crate::worldset::all_subsets;

/// A complex algebra together with the frame it was computed on (extended by
/// any relations the group operations materialized) and the intension
/// standing for each group element.
#[derive(Debug, Clone)]
pub struct ComplexAlgebra {
    pub sigma: SigmaFrame,
    pub frame: RelationalFrame,
    pub carrier: Vec<Intension>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Key {
    Images(Vec<Family>),
    Extent(Intension),
}

/// Closes `seeds` under the frame theory's operations and builds the complex
/// algebra over the closure.
///
/// For theories whose operations act on image families, intensions with the
/// same images at every world are identified: they have identical modal
/// rows and the operations respect the identification. Boolean operations
/// see relation identities, so there the carrier consists of intensions.
pub fn complex_algebra(fr: &RelationalFrame, seeds: &[Intension], caps: &Caps) -> Result<ComplexAlgebra> {
    let theory = fr.theory;
    let n = fr.world_count();
    let mut rels = fr.relations.clone();
    for s in seeds {
        if s.world_count() != n || s.0.iter().flatten().any(|&r| r >= rels.len()) {
            return Err(Error::InvalidModel("seed intension does not fit the frame".into()));
        }
    }
    let key = |rels: &crate::relational::Relations, f: &Intension| {
        if theory.image_level() {
            Key::Images((0..n).map(|w| rels.images_of(f, w)).collect())
        } else {
            Key::Extent(f.clone())
        }
    };
    let mut carrier: Vec<Intension> = Vec::new();
    let mut index: HashMap<Key, usize> = HashMap::new();
    let mut insert = |rels: &crate::relational::Relations, f: Intension, carrier: &mut Vec<Intension>| -> Result<usize> {
        let k = key(rels, &f);
        if let Some(&i) = index.get(&k) {
            return Ok(i);
        }
        if carrier.len() >= caps.carrier {
            return Err(Error::cap("carrier element", carrier.len() as u128 + 1, caps.carrier as u128));
        }
        index.insert(k, carrier.len());
        carrier.push(f);
        Ok(carrier.len() - 1)
    };
    for s in seeds {
        insert(&rels, s.clone(), &mut carrier)?;
    }

    let ops: Vec<Op> = theory.signature().ops().to_vec();
    let mut memo: HashMap<(Op, Vec<usize>), usize> = HashMap::new();
    loop {
        let before = carrier.len();
        for &op in &ops {
            let k = op.arity();
            let mut idx = vec![0usize; k];
            loop {
                if k == 0 || before > 0 {
                    if let std::collections::hash_map::Entry::Vacant(e) = memo.entry((op, idx.clone())) {
                        let args: Vec<Intension> = idx.iter().map(|&i| carrier[i].clone()).collect();
                        let v = theory.apply(op, &mut rels, &args, caps)?;
                        let i = insert(&rels, v, &mut carrier)?;
                        e.insert(i);
                    }
                }
                if k == 0 || !crate::neighborhood::advance(&mut idx, before) {
                    break;
                }
            }
        }
        if carrier.len() == before {
            break;
        }
    }
    if carrier.is_empty() {
        return Err(Error::InvalidModel("the group carrier is empty".into()));
    }

    let m = carrier.len();
    let tables: BTreeMap<Op, Vec<usize>> = ops
        .iter()
        .map(|&op| {
            let k = op.arity();
            let table = (0..m.pow(k as u32))
                .map(|mut code| {
                    let args: Vec<usize> = (0..k)
                        .map(|_| {
                            let a = code % m;
                            code /= m;
                            a
                        })
                        .collect();
                    memo[&(op, args)]
                })
                .collect();
            (op, table)
        })
        .collect();

    let mut names = fr.relation_names.clone();
    names.extend((names.len()..rels.len()).map(|r| format!("r{r}")));
    let frame = RelationalFrame::new(theory, fr.labels.clone(), names, rels)?;
    let sigma = tabulate(theory, &frame, &carrier, tables)?;
    Ok(ComplexAlgebra { sigma, frame, carrier })
}

/// The complex algebra of a frame whose group elements are `carrier` with the
/// given operation tables.
pub fn complex_algebra_with_ops(
    theory: Theory,
    frame: &RelationalFrame,
    carrier: &[Intension],
    ops: BTreeMap<Op, Vec<usize>>,
) -> Result<SigmaFrame> {
    tabulate(theory, frame, carrier, ops)
}

fn tabulate(theory: Theory, frame: &RelationalFrame, carrier: &[Intension], ops: BTreeMap<Op, Vec<usize>>) -> Result<SigmaFrame> {
    let n = frame.world_count();
    if n > super::MAX_ATOMS {
        return Err(Error::cap("world", n as u128, super::MAX_ATOMS as u128));
    }
    let rels = &frame.relations;
    let mut boxes = Vec::with_capacity(carrier.len() << n);
    let mut dias = Vec::with_capacity(carrier.len() << n);
    for f in carrier {
        for x in all_subsets(n) {
            boxes.push(box_plus(rels, f, x).bits());
            dias.push(dia_plus(rels, f, x).bits());
        }
    }
    let names = (0..carrier.len()).map(|i| format!("e{i}")).collect();
    SigmaFrame::new(theory, n, names, ops, boxes, dias)
}
