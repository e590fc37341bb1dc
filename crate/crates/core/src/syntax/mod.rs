//! Formula syntax: tokens, AST, parser and printer for STL, MTL, and weighted STL.

mod ast;
mod error;
mod lexer;
mod parser;
mod printer;

pub use ast::{Cmp, Formula, FormulaKind, Interval, Logic, Predicate, Span};
pub use error::SyntaxError;
pub use lexer::{tokenize, Tok, Token};
pub use parser::{parse, parse_mtl, parse_stl, parse_wstl, validate_weights};
pub use printer::{print_formula, tree_string};
