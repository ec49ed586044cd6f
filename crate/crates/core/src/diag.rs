//! Source positions and diagnostics shared by the parsers, the lowering pass
//! and network validation.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A 1-based line/column position plus a length in characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub line: u32,
    pub column: u32,
    pub length: u32,
}

impl Span {
    pub fn new(line: u32, column: u32, length: u32) -> Self {
        debug_assert!(line >= 1 && column >= 1);
        Self {
            line,
            column,
            length,
        }
    }

    /// Span running from the start of `self` to the end of `other`.
    ///
    /// Both spans must lie on the same line for the length to be exact; across
    /// lines the result keeps the start and covers the rest of the first line.
    pub fn to(self, other: Span) -> Span {
        if other.line == self.line && other.column + other.length >= self.column {
            Span::new(self.line, self.column, other.column + other.length - self.column)
        } else {
            self
        }
    }

    /// Whether `inner` is contained in `self` (single-line spans only).
    pub fn contains(&self, inner: &Span) -> bool {
        inner.line == self.line
            && inner.column >= self.column
            && inner.column + inner.length <= self.column + self.length
    }
}

impl Default for Span {
    fn default() -> Self {
        Span::new(1, 1, 0)
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// Diagnostic codes. `E*` codes are errors, `W*` codes are warnings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Code {
    /// Syntax error.
    E001,
    /// Unknown gene.
    E002,
    /// Level, threshold or constant out of range.
    E003,
    /// Duplicate (or missing) gene, edge, rule or init assignment.
    E004,
    /// Rule references a gene that has no declared edge into the rule's gene.
    E005,
    /// Declared edge never referenced by the target's rule.
    W001,
    /// Comparison constant differs from the declared edge threshold.
    W002,
}

impl Code {
    pub fn severity(self) -> Severity {
        match self {
            Code::W001 | Code::W002 => Severity::Warning,
            _ => Severity::Error,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Code::E001 => "E001",
            Code::E002 => "E002",
            Code::E003 => "E003",
            Code::E004 => "E004",
            Code::E005 => "E005",
            Code::W001 => "W001",
            Code::W002 => "W002",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    pub message: String,
    pub span: Span,
}

impl Diagnostic {
    /// Builds a diagnostic whose severity follows from its code.
    pub fn new(code: Code, message: impl Into<String>, span: Span) -> Self {
        Self {
            severity: code.severity(),
            code,
            message: message.into(),
            span,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}: {}[{}]: {}", self.span, sev, self.code, self.message)
    }
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn severity_follows_code_class() {
        assert_eq!(Code::E005.severity(), Severity::Error);
        assert_eq!(Code::W002.severity(), Severity::Warning);
        let d = Diagnostic::new(Code::W001, "unused edge", Span::new(3, 1, 4));
        assert!(!d.is_error());
        assert_eq!(d.to_string(), "3:1: warning[W001]: unused edge");
    }

    #[test]
    fn span_join_and_contains() {
        let a = Span::new(2, 5, 1);
        let b = Span::new(2, 10, 3);
        let j = a.to(b);
        assert_eq!(j, Span::new(2, 5, 8));
        assert!(j.contains(&a) && j.contains(&b));
        assert!(!a.contains(&b));
    }
}
