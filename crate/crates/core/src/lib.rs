//! Stream reasoning with windowed temporal formulas: entailment, model and
//! fixpoint operators, answer streams and level mappings.

pub mod answer;
pub mod cli;
pub mod entailment;
pub mod error;
pub mod lang;
pub mod levelmap;
pub mod operators;
pub mod stream;

pub use entailment::{entails, entails3, entails_fixed, Context, Limits};
pub use error::{Error, Result};
pub use lang::{parse_formula, parse_program, Formula, Program, Rule};
pub use stream::{Atom, AtomSet, ExtNat, Interval, Stream, ThreeValuedStream, TimePoint};
