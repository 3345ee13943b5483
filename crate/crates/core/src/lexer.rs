//! Tokeniser. `%` starts a comment running to the end of the line;
//! identifiers are case-sensitive. Unicode connectives are normalised to
//! their ASCII tokens.

use crate::diagnostic::Diagnostic;
use crate::lang::Span;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Int(i64),
    Period,
    DotDot,
    Comma,
    Colon,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Forall,
    Exists,
    True,
    False,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Int(n) => format!("integer `{n}`"),
            other => format!("`{}`", other.text()),
        }
    }

    pub fn text(&self) -> String {
        match self {
            TokenKind::Ident(s) => s.clone(),
            TokenKind::Int(n) => n.to_string(),
            TokenKind::Period => ".".into(),
            TokenKind::DotDot => "..".into(),
            TokenKind::Comma => ",".into(),
            TokenKind::Colon => ":".into(),
            TokenKind::LParen => "(".into(),
            TokenKind::RParen => ")".into(),
            TokenKind::LBrace => "{".into(),
            TokenKind::RBrace => "}".into(),
            TokenKind::Eq => "=".into(),
            TokenKind::Neq => "/=".into(),
            TokenKind::Lt => "<".into(),
            TokenKind::Le => "<=".into(),
            TokenKind::Gt => ">".into(),
            TokenKind::Ge => ">=".into(),
            TokenKind::Plus => "+".into(),
            TokenKind::Minus => "-".into(),
            TokenKind::Star => "*".into(),
            TokenKind::Not => "~".into(),
            TokenKind::And => "&".into(),
            TokenKind::Or => "|".into(),
            TokenKind::Implies => "->".into(),
            TokenKind::Iff => "<->".into(),
            TokenKind::Forall => "ALL".into(),
            TokenKind::Exists => "SOME".into(),
            TokenKind::True => "true".into(),
            TokenKind::False => "false".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: u32,
    column: u32,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.text[self.pos..].starts_with(s) {
            for _ in s.chars() {
                self.bump();
            }
            true
        } else {
            false
        }
    }
}

/// Splits `text` into tokens, or reports the first illegal character.
pub fn tokenize(text: &str) -> Result<Vec<Token>, Diagnostic> {
    let (tokens, mut errors) = tokenize_lossy(text);
    if errors.is_empty() {
        Ok(tokens)
    } else {
        Err(errors.swap_remove(0))
    }
}

/// Tokenises everything it can, skipping and reporting illegal characters.
pub fn tokenize_lossy(text: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut cur = Cursor { text, pos: 0, line: 1, column: 1 };
    let mut tokens = Vec::new();
    let mut errors = Vec::new();
    while let Some(c) = cur.peek() {
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '%' {
            while let Some(c) = cur.peek() {
                if c == '\n' {
                    break;
                }
                cur.bump();
            }
            continue;
        }
        let (start, line, column) = (cur.pos, cur.line, cur.column);
        let kind = if c.is_ascii_alphabetic() {
            while cur.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
                cur.bump();
            }
            match &text[start..cur.pos] {
                "ALL" => TokenKind::Forall,
                "SOME" => TokenKind::Exists,
                "true" => TokenKind::True,
                "false" => TokenKind::False,
                id => TokenKind::Ident(id.to_string()),
            }
        } else if c.is_ascii_digit() {
            while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                cur.bump();
            }
            match text[start..cur.pos].parse::<i64>() {
                Ok(n) => TokenKind::Int(n),
                Err(_) => {
                    errors.push(Diagnostic::error(line, column, "integer literal out of range").with_source(text));
                    continue;
                }
            }
        } else if cur.eat("<->") {
            TokenKind::Iff
        } else if cur.eat("->") {
            TokenKind::Implies
        } else if cur.eat("<=") {
            TokenKind::Le
        } else if cur.eat(">=") {
            TokenKind::Ge
        } else if cur.eat("/=") {
            TokenKind::Neq
        } else if cur.eat("..") {
            TokenKind::DotDot
        } else {
            cur.bump();
            match c {
                '.' => TokenKind::Period,
                ',' => TokenKind::Comma,
                ':' => TokenKind::Colon,
                '(' => TokenKind::LParen,
                ')' => TokenKind::RParen,
                '{' => TokenKind::LBrace,
                '}' => TokenKind::RBrace,
                '=' => TokenKind::Eq,
                '<' => TokenKind::Lt,
                '>' => TokenKind::Gt,
                '+' => TokenKind::Plus,
                '-' => TokenKind::Minus,
                '*' => TokenKind::Star,
                '~' | '¬' => TokenKind::Not,
                '&' | '∧' => TokenKind::And,
                '|' | '∨' => TokenKind::Or,
                '→' => TokenKind::Implies,
                '↔' => TokenKind::Iff,
                '∀' => TokenKind::Forall,
                '∃' => TokenKind::Exists,
                '≠' => TokenKind::Neq,
                '≤' => TokenKind::Le,
                '≥' => TokenKind::Ge,
                other => {
                    errors.push(
                        Diagnostic::error(line, column, format!("illegal character `{}`", other.escape_default()))
                            .with_source(text),
                    );
                    continue;
                }
            }
        };
        tokens.push(Token { kind, span: Span { start, end: cur.pos, line, column } });
    }
    (tokens, errors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use TokenKind::*;

    fn kinds(text: &str) -> Vec<TokenKind> {
        tokenize(text).unwrap().into_iter().map(|t| t.kind).collect()
    }

    fn id(s: &str) -> TokenKind {
        Ident(s.into())
    }

    #[test]
    fn comment_is_skipped() {
        assert_eq!(kinds("lamb(x). % note: case-sensitive"), vec![id("lamb"), LParen, id("x"), RParen, Period]);
    }

    #[test]
    fn empty_input() {
        assert!(kinds("").is_empty());
    }

    #[test]
    fn underscore_identifiers() {
        assert_eq!(kinds("hue_of_snow = white"), vec![id("hue_of_snow"), Eq, id("white")]);
    }

    #[test]
    fn case_sensitive() {
        assert_eq!(kinds("Went went"), vec![id("Went"), id("went")]);
    }

    #[test]
    fn operators_longest_match() {
        assert_eq!(
            kinds("<-> -> <= < >= > /= = - .. ."),
            vec![Iff, Implies, Le, Lt, Ge, Gt, Neq, Eq, Minus, DotDot, Period]
        );
        assert_eq!(kinds("1..3."), vec![Int(1), DotDot, Int(3), Period]);
    }

    #[test]
    fn unicode_connectives() {
        assert_eq!(kinds("∀∃∧∨→↔¬≠"), vec![Forall, Exists, And, Or, Implies, Iff, Not, Neq]);
    }

    #[test]
    fn spans_track_lines_and_columns() {
        let toks = tokenize("a\n  bb").unwrap();
        assert_eq!(toks[1].span, Span { start: 4, end: 6, line: 2, column: 3 });
    }

    #[test]
    fn illegal_character() {
        let d = tokenize("p(x) $ q").unwrap_err();
        assert_eq!((d.line, d.column), (1, 6));
        assert!(d.message.contains("illegal character"));
        let (toks, errs) = tokenize_lossy("a # b @");
        assert_eq!(toks.len(), 2);
        assert_eq!(errs.len(), 2);
    }

    #[test]
    fn huge_integer_is_reported() {
        assert!(tokenize("99999999999999999999").is_err());
    }
}
