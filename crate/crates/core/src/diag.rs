//! Diagnostics shared by the slope validator, the picture linter and the
//! SVG importer.

use std::fmt;

/// Byte range into the source text a diagnostic refers to.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Span {
    /// Byte offset of the first byte (inclusive).
    pub start: usize,
    /// Byte offset past the last byte (exclusive).
    pub end: usize,
}

impl Span {
    pub const fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn is_empty(&self) -> bool {
        self.start >= self.end
    }

    /// The source slice this span covers.
    pub fn slice<'a>(&self, text: &'a str) -> &'a str {
        &text[self.start.min(text.len())..self.end.min(text.len())]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// Lint and parse rules. `E`-rules are errors, `W`-rules warnings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    /// E01: slope pair component exceeds the magnitude bound.
    SlopeBound,
    /// E02: slope pair components share a divisor greater than 1.
    CommonDivisor,
    /// E03: slope pair is (0,0).
    ZeroSlope,
    /// E04: malformed or unrecognized command.
    Syntax,
    /// W01: put anchor lies outside the declared picture box.
    OutsideBox,
    /// W02: non-integer slope or length argument.
    NonIntegerArg,
    /// W03: unsupported input element skipped.
    Unsupported,
}

impl Rule {
    pub fn id(self) -> &'static str {
        match self {
            Rule::SlopeBound => "E01",
            Rule::CommonDivisor => "E02",
            Rule::ZeroSlope => "E03",
            Rule::Syntax => "E04",
            Rule::OutsideBox => "W01",
            Rule::NonIntegerArg => "W02",
            Rule::Unsupported => "W03",
        }
    }

    pub fn severity(self) -> Severity {
        match self {
            Rule::SlopeBound | Rule::CommonDivisor | Rule::ZeroSlope | Rule::Syntax => {
                Severity::Error
            }
            Rule::OutsideBox | Rule::NonIntegerArg | Rule::Unsupported => Severity::Warning,
        }
    }
}

/// A single lint or parse finding.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostic {
    pub rule: Rule,
    pub span: Span,
    pub message: String,
}

impl Diagnostic {
    pub fn new(rule: Rule, message: impl Into<String>) -> Self {
        Diagnostic {
            rule,
            span: Span::default(),
            message: message.into(),
        }
    }

    pub fn with_span(mut self, span: Span) -> Self {
        self.span = span;
        self
    }

    pub fn severity(&self) -> Severity {
        self.rule.severity()
    }

    pub fn is_error(&self) -> bool {
        self.severity() == Severity::Error
    }

    /// Renders as `E02 3:5 message`, resolving the span start against
    /// `source` as a 1-based line:column pair.
    pub fn render(&self, source: &str) -> String {
        let (line, col) = line_col(source, self.span.start);
        format!("{} {}:{} {}", self.rule.id(), line, col, self.message)
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.rule.id(), self.message)
    }
}

/// 1-based line and column of a byte offset.
pub fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let mut line = 1;
    let mut col = 1;
    for b in text.as_bytes()[..offset].iter() {
        if *b == b'\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    (line, col)
}
