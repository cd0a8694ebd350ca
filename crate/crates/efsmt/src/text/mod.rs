//! Text front-end: the s-expression problem format, its canonical printer,
//! and the preset registry.

mod parse;
mod print;
pub mod sexp;

pub use parse::{parse_problem, ParseError, ParsedProblem, PresetInvocation};
pub use print::print_problem;
