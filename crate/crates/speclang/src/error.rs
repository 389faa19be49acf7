use std::fmt;

use thiserror::Error;

use crate::ast::Span;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {message}{}", expected_suffix(.expected))]
pub struct ParseError {
    pub message: String,
    pub span: Span,
    pub expected: Vec<String>,
}

fn expected_suffix(expected: &[String]) -> String {
    if expected.is_empty() {
        String::new()
    } else {
        format!(" (expected {})", expected.join(" or "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationErrorKind {
    UnknownName,
    DuplicateName,
    ArityMismatch,
    UnboundVariable,
    DomainNotClosed,
    VarSetMismatch,
    MagmaMismatch,
    /// A query argument of the wrong shape, or a bad literal.
    TypeMismatch,
    /// Any other failure while building a definition.
    InvalidDefinition,
}

impl fmt::Display for ValidationErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ValidationErrorKind::UnknownName => "unknown name",
            ValidationErrorKind::DuplicateName => "duplicate name",
            ValidationErrorKind::ArityMismatch => "arity mismatch",
            ValidationErrorKind::UnboundVariable => "unbound variable",
            ValidationErrorKind::DomainNotClosed => "domain not closed",
            ValidationErrorKind::VarSetMismatch => "variable set mismatch",
            ValidationErrorKind::MagmaMismatch => "magma mismatch",
            ValidationErrorKind::TypeMismatch => "type mismatch",
            ValidationErrorKind::InvalidDefinition => "invalid definition",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {kind}: {message}")]
pub struct ValidationError {
    pub kind: ValidationErrorKind,
    pub message: String,
    pub span: Span,
}

impl ValidationError {
    pub fn new(kind: ValidationErrorKind, span: Span, message: impl Into<String>) -> Self {
        ValidationError {
            kind,
            message: message.into(),
            span,
        }
    }

    /// Classifies a library error raised while building the item at `span`.
    pub fn from_core(err: gsys_core::Error, span: Span) -> Self {
        use gsys_core::Error as E;
        let kind = match &err {
            E::DomainNotClosed { .. } => ValidationErrorKind::DomainNotClosed,
            E::VarSetMismatch(_) | E::ClosureViolation { .. } => ValidationErrorKind::VarSetMismatch,
            E::UnknownVariable(_) | E::UnboundVariable(_) => ValidationErrorKind::UnboundVariable,
            E::ArityMismatch(_) => ValidationErrorKind::ArityMismatch,
            E::MagmaMismatch => ValidationErrorKind::MagmaMismatch,
            _ => ValidationErrorKind::InvalidDefinition,
        };
        ValidationError::new(kind, span, err.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("no query named `{0}`")]
    UnknownQuery(String),
    #[error("query `{query}` failed: {source}")]
    Failed {
        query: String,
        #[source]
        source: gsys_core::Error,
    },
}

/// Anything that can go wrong between source text and a query result.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LangError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("validation error at {0}")]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Query(#[from] QueryError),
}

impl LangError {
    pub fn span(&self) -> Option<Span> {
        match self {
            LangError::Parse(e) => Some(e.span),
            LangError::Validation(e) => Some(e.span),
            LangError::Query(_) => None,
        }
    }
}
