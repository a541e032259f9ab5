//! Front end for the λQC choreographic calculus: source files, diagnostics
//! and the `qc` commands.

pub mod commands;
pub mod diag;
pub mod lexer;
pub mod parser;
pub mod source;
pub mod suites;
pub mod trace;

pub use diag::{Diagnostic, Severity, Span};
pub use parser::{parse_chor, parse_chor_type, parse_file, SourceFile};
