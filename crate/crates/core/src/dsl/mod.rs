//! The network description language and the query language.

pub mod ast;
pub mod lexer;
pub mod lower;
pub mod parser;
pub mod pretty;

pub use crate::diag::{Diagnostic, Severity, Span};
pub use ast::{FormulaAst, NetworkAst, QueryAst, StripSpans, TemporalOp};
pub use lower::lower;
pub use parser::{parse_formula, parse_network, parse_query};
pub use pretty::{pretty_formula, pretty_network, pretty_query};

use crate::model::Network;

/// Parses and lowers a network file in one step. Parse errors are returned
/// alone; otherwise the lowering diagnostics (warnings included) are.
pub fn load_network(text: &str) -> Result<(Network, Vec<Diagnostic>), Vec<Diagnostic>> {
    let ast = parse_network(text)?;
    match lower(&ast) {
        (Some(net), diags) => Ok((net, diags)),
        (None, diags) => Err(diags),
    }
}
