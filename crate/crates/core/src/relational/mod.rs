//! Finite relational frames and models, and their model checker.

mod eval;
mod frame;

pub use eval::{
    all_intensions, box_plus, dia_plus, eval_formula, eval_term, frame_valid, frame_valid_over, model_valid,
    satisfies, CounterValuation, Evaluator, FrameVerdict,
};
pub use frame::{Intension, RelSet, RelationalFrame, RelationalModel, Relations};
