//! Analytic curve definitions: a small expression language in the parameter
//! `s` and fourth-order jet evaluation for exact derivatives.

mod expr;
mod jet;
mod parser;

pub use expr::{EvalError, Expr, Func};
pub use jet::{Jet4, JET_ORDER};
pub use parser::{parse_expr, ParseError};
