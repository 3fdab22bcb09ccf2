//! Group operations on intensions over a host relation table, and the same
//! operations computed on image families alone.

use std::collections::BTreeSet;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::relational::{Intension, RelSet, Relations};
use crate::worldset::WorldSet;

/// A family of world sets, e.g. the images `{r(w) | r ∈ f(w)}` at one world.
pub type Family = BTreeSet<WorldSet>;

pub fn sl_zero(rels: &Relations) -> Intension {
    Intension::empty(rels.world_count())
}

pub fn sl_plus(f: &Intension, g: &Intension) -> Intension {
    Intension(f.0.iter().zip(&g.0).map(|(a, b)| a | b).collect())
}

/// Images at `w` of the variants of `g`.
pub fn variant_images(rels: &Relations, g: &Intension, w: usize) -> Family {
    if g.extent(w).is_empty() {
        Family::from([WorldSet::EMPTY])
    } else {
        rels.images_of(g, w)
    }
}

pub fn rum_one(rels: &mut Relations, caps: &Caps) -> Result<Intension> {
    let id = rels.materialize(rels.identity(), caps)?;
    Ok(Intension::constant(rels.world_count(), RelSet::from([id])))
}

/// Number of per-world choice combinations `Σ_{r∈f(w)} Π_{u∈r(w)} |variants(g,u)|`.
pub fn compose_choices(rels: &Relations, f: &Intension, g: &Intension, w: usize) -> u128 {
    let options: Vec<u128> = (0..rels.world_count())
        .map(|u| variant_images(rels, g, u).len() as u128)
        .collect();
    choices_at(rels, f, &options, w)
}

fn choices_at(rels: &Relations, f: &Intension, options: &[u128], w: usize) -> u128 {
    f.extent(w)
        .iter()
        .map(|&r| {
            rels.image(r, w)
                .iter()
                .fold(1u128, |acc, u| acc.saturating_mul(options[u]))
        })
        .fold(0u128, u128::saturating_add)
}

/// Intensional composition. Each distinct image at `w` is realized by a
/// relation with that image at `w` and the empty image elsewhere.
pub fn rum_compose(rels: &mut Relations, f: &Intension, g: &Intension, caps: &Caps) -> Result<Intension> {
    let n = rels.world_count();
    let variants: Vec<Family> = (0..n).map(|u| variant_images(rels, g, u)).collect();
    let options: Vec<u128> = variants.iter().map(|v| v.len() as u128).collect();
    let mut out = Vec::with_capacity(n);
    for w in 0..n {
        let choices = choices_at(rels, f, &options, w);
        if choices > caps.compose as u128 {
            return Err(Error::cap("composition choice", choices, caps.compose as u128));
        }
        let family = compose_images(&rels.images_of(f, w), &variants);
        let mut extent = RelSet::new();
        for image in family {
            let mut r = vec![WorldSet::EMPTY; n];
            r[w] = image;
            extent.insert(rels.materialize(r, caps)?);
        }
        out.push(extent);
    }
    Ok(Intension(out))
}

/// Closure under nonempty intersections. Missing images are realized by
/// reflexive relations (the given image at `w`, `{v}` at every other `v`).
pub fn cs_closure(rels: &mut Relations, f: &Intension, caps: &Caps) -> Result<Intension> {
    let n = rels.world_count();
    let needed: Vec<Family> = (0..n).map(|w| cap_images(&rels.images_of(f, w))).collect();
    for (w, family) in needed.iter().enumerate() {
        for &image in family {
            if (0..rels.len()).all(|r| rels.image(r, w) != image) {
                let mut r: Vec<WorldSet> = (0..n).map(WorldSet::singleton).collect();
                r[w] = image;
                rels.materialize(r, caps)?;
            }
        }
    }
    Ok(Intension(
        needed
            .iter()
            .enumerate()
            .map(|(w, family)| {
                (0..rels.len())
                    .filter(|&r| family.contains(&rels.image(r, w)))
                    .collect()
            })
            .collect(),
    ))
}

/// Complement in the relation set `R` of the table.
pub fn ba_complement(rels: &Relations, f: &Intension) -> Intension {
    let all = rels.all_ids();
    Intension(f.0.iter().map(|a| &all - a).collect())
}

pub fn ba_meet(f: &Intension, g: &Intension) -> Intension {
    Intension(f.0.iter().zip(&g.0).map(|(a, b)| a & b).collect())
}

pub fn ba_join(f: &Intension, g: &Intension) -> Intension {
    sl_plus(f, g)
}

/// `{ ⋃_{u∈X} c(u) : X ∈ f_images, c(u) ∈ variants[u] }`.
pub fn compose_images(f_images: &Family, variants: &[Family]) -> Family {
    if variants.len() <= 6 {
        return compose_masks(f_images, variants);
    }
    let mut out = Family::new();
    for &x in f_images {
        let mut acc = Family::from([WorldSet::EMPTY]);
        for u in x.iter() {
            acc = acc
                .iter()
                .flat_map(|&s| variants[u].iter().map(move |&v| s.union(v)))
                .collect();
        }
        out.extend(acc);
    }
    out
}

/// Same, with families over at most six worlds held as 64-bit masks.
fn compose_masks(f_images: &Family, variants: &[Family]) -> Family {
    let mask = |fam: &Family| fam.iter().fold(0u64, |m, x| m | 1 << x.bits());
    let vs: Vec<u64> = variants.iter().map(mask).collect();
    let mut out = 0u64;
    for &x in f_images {
        let mut acc = 1u64;
        for u in x.iter() {
            let mut next = 0u64;
            for s in bits(acc) {
                for v in bits(vs[u]) {
                    next |= 1 << (s | v);
                }
            }
            acc = next;
        }
        out |= acc;
    }
    bits(out).map(|s| WorldSet(s as u64)).collect()
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            i
        })
    })
}

/// `{ ⋂ X : ∅ ≠ X ⊆ family }`.
pub fn cap_images(family: &Family) -> Family {
    let mut out = Family::new();
    for &x in family {
        let more: Vec<WorldSet> = out.iter().map(|&y: &WorldSet| y.intersection(x)).collect();
        out.insert(x);
        out.extend(more);
    }
    out
}

/// Variant images of a family: the family itself, or `{∅}` when empty.
pub fn variant_family(family: &Family) -> Family {
    if family.is_empty() {
        Family::from([WorldSet::EMPTY])
    } else {
        family.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ws(xs: &[usize]) -> WorldSet {
        WorldSet::from_worlds(xs.iter().copied())
    }

    fn int(xs: &[&[usize]]) -> Intension {
        Intension(xs.iter().map(|e| e.iter().copied().collect()).collect())
    }

    #[test]
    fn semilattice_ops() {
        let rels = Relations::from_images(1, vec![vec![ws(&[0])], vec![WorldSet::EMPTY]]).unwrap();
        let f = int(&[&[0]]);
        let g = int(&[&[0, 1]]);
        assert_eq!(sl_plus(&f, &g), g);
        assert_eq!(sl_plus(&f, &sl_zero(&rels)), f);
        assert_eq!(sl_plus(&f, &g), sl_plus(&g, &f));
    }

    #[test]
    fn variants() {
        // worlds 0 = w, 1 = u, 2 = v
        let rels = Relations::from_images(
            3,
            vec![
                vec![ws(&[1]), WorldSet::EMPTY, WorldSet::EMPTY],
                vec![ws(&[1, 2]), WorldSet::EMPTY, WorldSet::EMPTY],
            ],
        )
        .unwrap();
        assert_eq!(variant_images(&rels, &int(&[&[], &[], &[]]), 0), Family::from([WorldSet::EMPTY]));
        assert_eq!(variant_images(&rels, &int(&[&[0], &[], &[]]), 0), Family::from([ws(&[1])]));
        assert_eq!(
            variant_images(&rels, &int(&[&[0, 1], &[], &[]]), 0),
            Family::from([ws(&[1]), ws(&[1, 2])])
        );
    }

    #[test]
    fn closure_images() {
        // reflexive r1(w)={w,u}, r2(w)={w,v}
        let fam = Family::from([ws(&[0, 1]), ws(&[0, 2])]);
        assert_eq!(cap_images(&fam), Family::from([ws(&[0, 1]), ws(&[0, 2]), ws(&[0])]));
        assert!(cap_images(&Family::new()).is_empty());
    }

    #[test]
    fn closure_materializes_reflexive_relations() {
        let caps = Caps::default();
        let mut rels = Relations::from_images(
            3,
            vec![
                vec![ws(&[0, 1]), ws(&[1]), ws(&[2])],
                vec![ws(&[0, 2]), ws(&[1]), ws(&[2])],
            ],
        )
        .unwrap();
        let f = int(&[&[0, 1], &[], &[]]);
        let c = cs_closure(&mut rels, &f, &caps).unwrap();
        assert_eq!(rels.len(), 3);
        assert!((0..3).all(|r| rels.is_reflexive(r)));
        assert_eq!(rels.images_of(&c, 0), Family::from([ws(&[0, 1]), ws(&[0, 2]), ws(&[0])]));
        assert!(c.extent(1).is_empty());
        let zero = sl_zero(&rels);
        assert_eq!(cs_closure(&mut rels, &zero, &caps).unwrap(), zero);
    }

    #[test]
    fn boolean_ops() {
        let rels = Relations::from_images(2, vec![vec![WorldSet::EMPTY; 2]; 3]).unwrap();
        let f = int(&[&[0], &[1, 2]]);
        assert_eq!(ba_meet(&f, &ba_complement(&rels, &f)), Intension::empty(2));
        assert_eq!(ba_complement(&rels, &ba_complement(&rels, &f)), f);
        assert_eq!(ba_join(&f, &ba_complement(&rels, &f)), Intension::constant(2, rels.all_ids()));
    }

    #[test]
    fn composition_cap_is_hard() {
        let caps = Caps {
            compose: 1,
            ..Caps::default()
        };
        let mut rels = Relations::from_images(
            2,
            vec![vec![ws(&[0, 1]), ws(&[0, 1])], vec![ws(&[0]), ws(&[1])]],
        )
        .unwrap();
        let f = int(&[&[0], &[0]]);
        let g = int(&[&[0, 1], &[0, 1]]);
        let err = rum_compose(&mut rels, &f, &g, &caps).unwrap_err();
        assert!(err.is_cap());
    }
}
