//! Regex synthesis from examples and natural language.
//!
//! A description is parsed into hierarchical sketches ([`nlp`]), and each
//! sketch guides a top-down search over partial regexes ([`synthesis`]).
//! The search prunes with over/under approximations checked by [`automaton`]
//! and infers integer constants with a small length-constraint solver
//! ([`solver`]).

pub mod automaton;
pub mod nlp;
pub mod regex;
pub mod sketch;
pub mod solver;
pub mod synthesis;
