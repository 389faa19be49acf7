//! A small specification language for finite G-systems.
//!
//! A `.gsys` document defines magmas, function tables, systems, teams,
//! covers and classical agent-environment models, and names queries over
//! them. [`parse`] produces a spanned syntax tree, [`validate`] builds a
//! [`Workspace`], and [`run_query`] evaluates one query to a JSON-ready
//! [`QueryResult`].

pub mod ast;
pub mod error;
mod lexer;
pub mod parser;
pub mod pretty;
pub mod query;
pub mod validate;

pub use ast::{Document, Span};
pub use error::{LangError, ParseError, QueryError, ValidationError, ValidationErrorKind};
pub use parser::parse;
pub use pretty::pretty_print;
pub use query::{query_kind, query_kinds, run_all, run_query, Outcome, QueryKind, QueryResult, RunOptions};
pub use validate::{validate, validate_with, Workspace};

/// Parses and validates `src` in one step.
pub fn load(src: &str) -> Result<Workspace, LangError> {
    Ok(validate(&parse(src)?)?)
}
