use std::fmt;

/// A region of the source text. `line` and `column` are 1-based and refer
/// to `start`; offsets are byte offsets.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub column: u32,
}

impl Span {
    pub fn to(self, other: Span) -> Span {
        Span {
            end: other.end.max(self.end),
            ..self
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DiagnosticKind {
    SyntaxError,
    UnknownChannel,
    UnknownSet,
    ArityMismatch,
    ValueOutOfDomain,
    UnboundReference,
    UnguardedRecursion,
    DuplicateDeclaration,
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiagnosticKind::SyntaxError => "syntax error",
            DiagnosticKind::UnknownChannel => "unknown channel",
            DiagnosticKind::UnknownSet => "unknown set",
            DiagnosticKind::ArityMismatch => "arity mismatch",
            DiagnosticKind::ValueOutOfDomain => "value out of domain",
            DiagnosticKind::UnboundReference => "unbound reference",
            DiagnosticKind::UnguardedRecursion => "unguarded recursion",
            DiagnosticKind::DuplicateDeclaration => "duplicate declaration",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub span: Span,
    pub message: String,
}

impl Diagnostic {
    pub fn new(kind: DiagnosticKind, span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            kind,
            span,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {}: {}",
            self.span.line, self.span.column, self.kind, self.message
        )
    }
}

/// All diagnostics from one parse, in source order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostics(pub Vec<Diagnostic>);

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl std::error::Error for Diagnostics {}
