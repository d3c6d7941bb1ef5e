//! qasm-forge: an optimizing ahead-of-time compiler for gate-based
//! OpenQASM 3 with C-like extensions and the compute-action pattern.
//!
//! The pipeline is: parse -> SSA quantum IR -> optimization passes ->
//! branch-based low-level IR of QIR-style runtime calls -> execution on a
//! statevector simulator or a gate-counting resource estimator.

pub mod ast;
pub mod diag;
pub mod driver;
pub mod fixtures;
pub mod gates;
pub mod ir;
pub mod lexer;
pub mod lower;
pub mod parser;
pub mod passes;
pub mod runtime;
pub mod symtab;

pub use diag::{Diagnostic, SourceLocation};

/// Convenience: lex + parse + build the IR for a source string.
pub fn frontend(source: &str) -> Result<ir::IrModule, Vec<Diagnostic>> {
    let tokens = lexer::tokenize(source).map_err(|d| vec![d])?;
    let program = parser::parse(tokens)?;
    ir::build::build_module(&program)
}
