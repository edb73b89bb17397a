//! Universal sentences over ordered structures with added operations: syntax, evaluation,
//! flattening, and a decision procedure for universal consequences with a brute-force oracle.

mod config;
mod decide;
mod eval;
mod syntax;

pub use decide::{
    brute_force_decide, certify_countermodel, decide_universal, generator_cap, Countermodel, DecisionOutcome,
    TheoryProfile, Verdict, DL_FALLBACK_VALUATIONS,
};
pub use eval::{check_signature, eval_formula, eval_term, evaluate, flatten, flatten_parts, Evaluation, Flattened, Premise};
pub use syntax::{parse_sentence, Formula, Sentence, Signature, Term};
