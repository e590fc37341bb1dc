use thiserror::Error;

use super::ast::Span;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SyntaxError {
    #[error("unrecognized character `{found}` at offset {offset}")]
    Lex { offset: usize, found: char },
    #[error("{message}")]
    Parse { span: Span, message: String, expected: Vec<String> },
    #[error("temporal operator needs an explicit interval")]
    MissingInterval { span: Span },
    #[error("unknown weight `{name}`")]
    UnknownWeight { name: String, span: Span },
    #[error("weight `{name}` has {got} entries, expected {expected}")]
    WeightArityMismatch { name: String, expected: usize, got: usize, span: Span },
}

impl SyntaxError {
    pub fn span(&self) -> Span {
        match self {
            SyntaxError::Lex { offset, found } => Span::new(*offset, offset + found.len_utf8()),
            SyntaxError::Parse { span, .. }
            | SyntaxError::MissingInterval { span }
            | SyntaxError::UnknownWeight { span, .. }
            | SyntaxError::WeightArityMismatch { span, .. } => *span,
        }
    }

    /// Lexing and grammar errors, as opposed to weight-table mismatches.
    pub fn is_grammar(&self) -> bool {
        matches!(self, SyntaxError::Lex { .. } | SyntaxError::Parse { .. } | SyntaxError::MissingInterval { .. })
    }

    /// Renders the message with the offending source line and a caret under the error.
    pub fn render(&self, source: &str) -> String {
        let span = self.span();
        let start = span.start.min(source.len());
        let width = source[..start].chars().count();
        let len = source.get(start..span.end.min(source.len())).map_or(1, |s| s.chars().count().max(1));
        let mut out = format!("error: {self}");
        if let SyntaxError::Parse { expected, .. } = self {
            if !expected.is_empty() {
                out.push_str(&format!(" (expected {})", expected.join(", ")));
            }
        }
        out.push_str(&format!("\n  {source}\n  {}{}", " ".repeat(width), "^".repeat(len)));
        out
    }
}
