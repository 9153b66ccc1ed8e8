//! Formulas, rules and programs: syntax tree, parser, printer and the
//! syntactic head checks.

mod ast;
mod consistency;
mod parser;

pub use ast::{Classification, Formula, Program, Rule};
pub use consistency::{check_t_consistent, validate_heads, HeadIssue, HeadReport};
pub use parser::{parse_formula, parse_program, print_program};
