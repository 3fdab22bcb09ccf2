//! Neighborhood semantics, the translations to and from relational models,
//! morphisms and bisimulations.

mod bisim;
mod explicit;
mod model;
mod morphism;


pub use bisim::{
    check_bisimulation, distinguishing_depth, greatest_bisimulation, lifted, modal_equiv_up_to_depth,
    BisimulationCandidate, BisimulationViolation,
};
pub use explicit::{up_mask, upward_closure, ExplicitCounter, NeighborhoodFrame};
pub use model::{
    box_nbhd, dia_nbhd, n_eval, n_eval_term, nbhd_to_rel, rel_to_nbhd, NeighborhoodEvaluator, NeighborhoodModel,
    Neighborhoods,
};
pub use morphism::{check_morphism, valuations_compatible, MorphismCandidate, MorphismViolation};

/// Odometer step over `idx` with every digit below `radix`; false on wrap-around.
pub(crate) fn advance(idx: &mut [usize], radix: usize) -> bool {
    for d in idx.iter_mut() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}
