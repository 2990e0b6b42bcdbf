//! Positioned, coded diagnostics shared by the frontend and the checker.

use std::fmt;

use crate::span::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Error => write!(f, "error"),
            Severity::Warning => write!(f, "warning"),
        }
    }
}

/// Stable diagnostic codes. These strings are part of the tool's interface;
/// tests and downstream consumers match on them.
pub mod codes {
    pub const LEX: &str = "E-LEX";
    pub const PARSE: &str = "E-PARSE";
    pub const UNBOUND: &str = "E-UNBOUND";
    pub const ARITY: &str = "E-ARITY";
    pub const MISMATCH: &str = "E-MISMATCH";
    pub const NOT_FUNCTION: &str = "E-NOTFN";
    pub const NOT_PAIR: &str = "E-NOTPAIR";
    pub const UNIVERSE: &str = "E-UNIVERSE";
    pub const NO_INFER: &str = "E-NOINFER";
    pub const DUPLICATE: &str = "E-DUP";
    pub const ASSERT: &str = "E-ASSERT";
}

#[derive(Debug, Clone)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
    pub span: Span,
}

impl Diagnostic {
    pub fn error(code: &'static str, message: impl Into<String>, span: Span) -> Diagnostic {
        Diagnostic {
            severity: Severity::Error,
            code,
            message: message.into(),
            span,
        }
    }

    /// Replace a synthetic span with `span`; keeps an existing source span.
    pub fn or_span(mut self, span: Span) -> Diagnostic {
        if self.span.is_synth() {
            self.span = span;
        }
        self
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}[{}]: {} at {}",
            self.severity, self.code, self.message, self.span
        )
    }
}

pub type DiagResult<T> = Result<T, Diagnostic>;
