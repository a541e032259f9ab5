use std::fmt;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    /// 1-based position of `start`.
    pub line: usize,
    pub col: usize,
}

impl Span {
    pub fn new(src: &str, start: usize, end: usize) -> Self {
        let before = &src[..start.min(src.len())];
        let line = before.matches('\n').count() + 1;
        let col = before.rfind('\n').map_or(before.chars().count(), |i| before[i + 1..].chars().count()) + 1;
        Span { start, end, line, col }
    }

    pub fn join(self, other: Span) -> Span {
        Span { end: other.end, ..self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub span: Span,
    /// The check or typing rule that failed.
    pub rule: String,
    pub message: String,
}

impl Diagnostic {
    pub fn error(span: Span, rule: &str, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Error, span, rule: rule.into(), message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {sev}[{}]: {}", self.span.line, self.span.col, self.rule, self.message)
    }
}
