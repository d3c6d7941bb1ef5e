//! Source locations and compiler diagnostics.

use std::fmt;

/// A position in the input source. Lines are 1-based, columns 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SourceLocation {
    pub line: u32,
    pub column: u32,
    pub offset: usize,
}

impl SourceLocation {
    pub fn new(line: u32, column: u32, offset: usize) -> Self {
        Self {
            line,
            column,
            offset,
        }
    }
}

impl fmt::Display for SourceLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// A located compiler message. Errors abort compilation with a nonzero exit.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub loc: Option<SourceLocation>,
}

impl Diagnostic {
    pub fn error(message: impl Into<String>, loc: SourceLocation) -> Self {
        Self {
            severity: Severity::Error,
            message: message.into(),
            loc: Some(loc),
        }
    }

    /// An error with no useful source position (internal or module-level).
    pub fn error_nowhere(message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            message: message.into(),
            loc: None,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// Render as `<line>:<col>: error: <message>`; the driver prefixes the file name.
    pub fn render(&self) -> String {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        match self.loc {
            Some(loc) => format!("{}: {}: {}", loc, sev, self.message),
            None => format!("{}: {}", sev, self.message),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

pub type DiagResult<T> = Result<T, Vec<Diagnostic>>;

pub fn single_err<T>(message: impl Into<String>, loc: SourceLocation) -> DiagResult<T> {
    Err(vec![Diagnostic::error(message, loc)])
}
