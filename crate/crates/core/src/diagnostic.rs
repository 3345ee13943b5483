use std::fmt::Write as _;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// A located message about the submitted text.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Diagnostic {
    pub severity: Severity,
    /// 1-based.
    pub line: u32,
    /// 1-based, counted in characters.
    pub column: u32,
    /// The source line containing the error, trimmed.
    pub offending_text: String,
    /// One-line summary, e.g. `Type mismatch with argument of had`.
    pub message: String,
    /// The detailed block shown under "Detailed diagnostics".
    pub detail: Vec<String>,
    /// The parse tree as far as the parser got, for syntax errors inside
    /// formulae.
    pub partial_tree: Option<String>,
    pub hints: Vec<String>,
    /// Index of the constraint concerned, when there is one.
    pub constraint: Option<usize>,
}

impl Diagnostic {
    pub fn error(line: u32, column: u32, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            line,
            column,
            offending_text: String::new(),
            message: message.into(),
            detail: Vec::new(),
            partial_tree: None,
            hints: Vec::new(),
            constraint: None,
        }
    }

    pub fn warning(line: u32, column: u32, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Warning, ..Diagnostic::error(line, column, message) }
    }

    /// Fills `offending_text` from the source line this diagnostic points at.
    pub fn with_source(mut self, source: &str) -> Self {
        if self.line >= 1 {
            if let Some(l) = source.lines().nth(self.line as usize - 1) {
                self.offending_text = l.trim().to_string();
            }
        }
        self
    }

    pub fn with_hints(mut self, hints: &[&str]) -> Self {
        self.hints = hints.iter().map(|h| h.to_string()).collect();
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// Plain-text rendering in the site's message format.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let head = match self.severity {
            Severity::Error => "Input error",
            Severity::Warning => "Warning",
        };
        if self.offending_text.is_empty() {
            let _ = writeln!(out, "{head} on line {}:", self.line);
        } else {
            let _ = writeln!(out, "{head} on line {}:   {}", self.line, self.offending_text);
        }
        let _ = writeln!(out, "{}", self.message);
        if !self.detail.is_empty() {
            out.push_str("\nDetailed diagnostics: ");
            for line in &self.detail {
                let _ = writeln!(out, "{line}");
            }
        }
        if let Some(tree) = &self.partial_tree {
            out.push_str("\nParse tree as far as the parser got:\n");
            for line in tree.lines() {
                let _ = writeln!(out, "    {line}");
            }
        }
        if !self.hints.is_empty() {
            out.push('\n');
            for h in &self.hints {
                let _ = writeln!(out, "Hint: {h}");
            }
        }
        out
    }
}

pub fn render_all(diags: &[Diagnostic]) -> String {
    diags.iter().map(Diagnostic::render).collect::<Vec<_>>().join("\n")
}
