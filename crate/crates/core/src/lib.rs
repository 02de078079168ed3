//! Finite groups, first-order formulas over the group signature, a model
//! checker, and generators for sentences that pin down a group up to
//! isomorphism within a family.

pub mod arith;
pub mod eval;
pub mod formula;
pub mod gen;
pub mod group;
pub mod iso;
pub mod presentation;
pub mod syntax;

pub use eval::{
    cost_estimate, definable_set, eval, eval_sentence, eval_sentence_grounded, eval_with, relation, relation_with_cap,
    Env, EvalError, EvalOptions, EvalStats, GroundedOutcome, Mode, Relation,
};
pub use formula::{bigand, bigor, macro_commutator, EmptyFold, Formula, Term};
pub use group::{build_group, build_group_capped, load_cayley, Family, FiniteGroup, GroupError, Subset};
pub use presentation::{Presentation, PresentationError, Word};
pub use syntax::{parse_formula, parse_term, print_formula, ParseError};
