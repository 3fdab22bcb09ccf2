//! Finite two-sorted frames, complex algebras of relational frames,
//! ultrafilter frames, and the canonical morphism between them.

mod algebra;
mod complex;
mod ultrafilter;


pub use algebra::{
    check_sigma_frame, equation_valid, EquationViolation, FiniteBooleanAlgebra, SigmaCounter, SigmaFrame, MAX_ATOMS,
};
pub use complex::{complex_algebra, complex_algebra_with_ops, ComplexAlgebra};
pub use ultrafilter::{
    canonical_morphism_check, lift_operations, pointwise_join_violation, ultrafilter_extension, ultrafilter_frame,
    CanonicalReport, CanonicalViolation, IllDefined, LiftedAlgebra, UltrafilterFrame,
};
