//! Exact symbolic calculus of variations on infinite jet spaces.

pub mod commands;
pub mod corpus;
pub mod equation;
pub mod error;
pub mod expr;
pub mod form;
pub mod jet;
pub mod lagrangian;
pub mod multi_index;
pub mod parse;
pub mod problem;
pub mod report;
pub mod sample;
pub mod variational;

pub use error::{Error, ParseError, Result};
pub use expr::{rat, Expr, Monomial, Rational};
pub use form::{Covector, DForm, EvolutionaryField};
pub use jet::{AuxFamily, JetSpace, JetVar};
pub use multi_index::MultiIndex;
pub use parse::{parse_expr, parse_form};
