//! Random generators for models, neighborhood models, two-sorted frames and
//! syntax trees.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::caps::Caps;
use crate::duality::{complex_algebra, SigmaFrame};
use crate::neighborhood::{NeighborhoodModel, Neighborhoods};
use crate::relational::{Intension, RelSet, RelationalFrame, RelationalModel, Relations};
use crate::syntax::{Formula, GroupTerm, Op};
use crate::theories::{Family, Theory};
use crate::worldset::WorldSet;

fn random_set<R: Rng>(rng: &mut R, n: usize) -> WorldSet {
    WorldSet(rng.gen_range(0..1u64 << n))
}

/// A random image at `w` admissible for the theory.
fn random_image<R: Rng>(rng: &mut R, theory: Theory, n: usize, w: usize) -> WorldSet {
    let x = random_set(rng, n);
    if theory.admits_image(w, x) {
        x
    } else {
        x.with(w)
    }
}

pub fn random_frame<R: Rng>(rng: &mut R, theory: Theory, worlds: usize, relations: usize) -> RelationalFrame {
    let images = (0..relations)
        .map(|_| (0..worlds).map(|w| random_image(rng, theory, worlds, w)).collect())
        .collect();
    let rels = Relations::from_images(worlds, images).expect("images fit");
    RelationalFrame::unlabeled(theory, rels).expect("images conform")
}

pub fn random_intension<R: Rng>(rng: &mut R, worlds: usize, relations: usize) -> Intension {
    Intension(
        (0..worlds)
            .map(|_| (0..relations).filter(|_| rng.gen_bool(0.5)).collect::<RelSet>())
            .collect(),
    )
}

pub fn random_model<R: Rng>(
    rng: &mut R,
    theory: Theory,
    worlds: usize,
    relations: usize,
    props: &[String],
    groups: &[String],
) -> RelationalModel {
    let frame = random_frame(rng, theory, worlds, relations);
    let prop_val = props.iter().map(|p| (p.clone(), random_set(rng, worlds))).collect();
    let group_val = groups
        .iter()
        .map(|g| (g.clone(), random_intension(rng, worlds, relations)))
        .collect();
    RelationalModel::new(frame, prop_val, group_val).expect("valuations fit")
}

/// Up to `max_neighborhoods` core neighborhoods per world and group.
pub fn random_neighborhood_model<R: Rng>(
    rng: &mut R,
    theory: Theory,
    worlds: usize,
    max_neighborhoods: usize,
    props: &[String],
    groups: &[String],
) -> NeighborhoodModel {
    let group_val = groups
        .iter()
        .map(|g| {
            let nu = (0..worlds)
                .map(|w| {
                    let k = rng.gen_range(0..=max_neighborhoods);
                    (0..k).map(|_| random_image(rng, theory, worlds, w)).collect::<Family>()
                })
                .collect();
            (g.clone(), Neighborhoods(nu))
        })
        .collect();
    let prop_val = props.iter().map(|p| (p.clone(), random_set(rng, worlds))).collect();
    NeighborhoodModel::unlabeled(theory, worlds, group_val, prop_val).expect("neighborhoods fit")
}

/// The complex algebra of a random frame, closed over one or two random
/// seed intensions, with at most `max_atoms` atoms and `max_elements`
/// group elements. Draws again until the closure fits.
pub fn random_sigma_frame<R: Rng>(rng: &mut R, theory: Theory, max_atoms: usize, max_elements: usize) -> SigmaFrame {
    let caps = Caps {
        carrier: max_elements,
        ..Caps::default()
    };
    loop {
        let n = rng.gen_range(1..=max_atoms);
        let k = rng.gen_range(0..=2);
        let fr = random_frame(rng, theory, n, k);
        let seeds: Vec<Intension> = (0..rng.gen_range(1..=2)).map(|_| random_intension(rng, n, k)).collect();
        match complex_algebra(&fr, &seeds, &caps) {
            Ok(ca) => return ca.sigma,
            Err(e) if e.is_cap() => continue,
            Err(e) => panic!("complex algebra of a conforming frame: {e}"),
        }
    }
}

/// A two-sorted frame without group operations whose `[a]` rows come from
/// random supports and whose `⟨a⟩` rows are random unions of them. Every
/// such frame satisfies the base equations.
pub fn random_plain_sigma_frame<R: Rng>(rng: &mut R, atoms: usize, elements: usize) -> SigmaFrame {
    let size = 1usize << atoms;
    let mut boxes = Vec::with_capacity(elements * size);
    let mut dias = Vec::with_capacity(elements * size);
    for _ in 0..elements {
        // each atom u sees some supports; [a]x holds at u when every one
        // lies below x, ⟨a⟩x when some does
        let supports: Vec<Vec<u64>> = (0..atoms)
            .map(|_| (0..rng.gen_range(0..=2)).map(|_| rng.gen_range(0..size as u64)).collect())
            .collect();
        for x in 0..size as u64 {
            let mut b = 0;
            let mut d = 0;
            for (u, s) in supports.iter().enumerate() {
                if s.iter().all(|&y| y & !x == 0) {
                    b |= 1 << u;
                }
                if s.iter().any(|&y| y & !x == 0) {
                    d |= 1 << u;
                }
            }
            boxes.push(b);
            dias.push(d);
        }
    }
    let names = (0..elements).map(|i| format!("e{i}")).collect();
    SigmaFrame::new(Theory::Empty, atoms, names, BTreeMap::new(), boxes, dias).expect("rows fit")
}

pub fn random_term<R: Rng>(rng: &mut R, theory: Theory, depth: usize, groups: &[String]) -> GroupTerm {
    let ops = theory.signature().ops().to_vec();
    let leaf = |rng: &mut R| {
        let consts: Vec<Op> = ops.iter().copied().filter(|o| o.arity() == 0).collect();
        if !consts.is_empty() && rng.gen_bool(0.2) {
            GroupTerm::constant(*consts.choose(rng).unwrap())
        } else {
            GroupTerm::var(groups.choose(rng).expect("a group variable").clone())
        }
    };
    let compound: Vec<Op> = ops.iter().copied().filter(|o| o.arity() > 0).collect();
    if depth == 0 || compound.is_empty() || rng.gen_bool(0.4) {
        return leaf(rng);
    }
    let op = *compound.choose(rng).unwrap();
    let args = (0..op.arity()).map(|_| random_term(rng, theory, depth - 1, groups)).collect();
    GroupTerm::op(op, args)
}

/// A formula over the primitive connectives with at most `depth` nested
/// constructors.
pub fn random_formula<R: Rng>(rng: &mut R, theory: Theory, depth: usize, props: &[String], groups: &[String]) -> Formula {
    if depth == 0 || rng.gen_bool(0.2) {
        return if rng.gen_bool(0.15) {
            Formula::Top
        } else {
            Formula::Prop(props.choose(rng).expect("a proposition").clone())
        };
    }
    let sub = |rng: &mut R| Box::new(random_formula(rng, theory, depth - 1, props, groups));
    match rng.gen_range(0..4) {
        0 => Formula::Not(sub(rng)),
        1 => Formula::And(sub(rng), sub(rng)),
        k => {
            let t = random_term(rng, theory, (depth - 1).min(3), groups);
            if k == 2 {
                Formula::Box(t, sub(rng))
            } else {
                Formula::Dia(t, sub(rng))
            }
        }
    }
}
