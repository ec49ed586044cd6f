//! Tokenizer shared by the network and query languages.
//!
//! Newlines are significant (they terminate declarations), other whitespace
//! and `#` comments are skipped. All keywords of both languages are reserved.

use std::fmt;

use crate::diag::{Code, Diagnostic, Span};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Int(u32),
    Keyword(Keyword),
    DotDot,
    Arrow,
    Bar,
    Colon,
    Comma,
    LParen,
    RParen,
    Ge,
    Le,
    Eq,
    Gt,
    Lt,
    Newline,
    Eof,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Keyword {
    Network,
    Gene,
    Levels,
    Threshold,
    Rule,
    When,
    Default,
    Init,
    And,
    Or,
    Not,
    Check,
    Stable,
    Where,
    Count,
    Reachable,
    Deadlock,
    EX,
    EF,
    EG,
    AX,
    AF,
    AG,
}

impl Keyword {
    pub const ALL: [Keyword; 23] = [
        Keyword::Network,
        Keyword::Gene,
        Keyword::Levels,
        Keyword::Threshold,
        Keyword::Rule,
        Keyword::When,
        Keyword::Default,
        Keyword::Init,
        Keyword::And,
        Keyword::Or,
        Keyword::Not,
        Keyword::Check,
        Keyword::Stable,
        Keyword::Where,
        Keyword::Count,
        Keyword::Reachable,
        Keyword::Deadlock,
        Keyword::EX,
        Keyword::EF,
        Keyword::EG,
        Keyword::AX,
        Keyword::AF,
        Keyword::AG,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Network => "network",
            Keyword::Gene => "gene",
            Keyword::Levels => "levels",
            Keyword::Threshold => "threshold",
            Keyword::Rule => "rule",
            Keyword::When => "when",
            Keyword::Default => "default",
            Keyword::Init => "init",
            Keyword::And => "and",
            Keyword::Or => "or",
            Keyword::Not => "not",
            Keyword::Check => "check",
            Keyword::Stable => "stable",
            Keyword::Where => "where",
            Keyword::Count => "count",
            Keyword::Reachable => "reachable",
            Keyword::Deadlock => "deadlock",
            Keyword::EX => "EX",
            Keyword::EF => "EF",
            Keyword::EG => "EG",
            Keyword::AX => "AX",
            Keyword::AF => "AF",
            Keyword::AG => "AG",
        }
    }

    pub fn lookup(s: &str) -> Option<Keyword> {
        Keyword::ALL.iter().copied().find(|k| k.as_str() == s)
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident(s) => write!(f, "identifier `{s}`"),
            TokenKind::Int(n) => write!(f, "integer `{n}`"),
            TokenKind::Keyword(k) => write!(f, "`{}`", k.as_str()),
            TokenKind::DotDot => f.write_str("`..`"),
            TokenKind::Arrow => f.write_str("`->`"),
            TokenKind::Bar => f.write_str("`-|`"),
            TokenKind::Colon => f.write_str("`:`"),
            TokenKind::Comma => f.write_str("`,`"),
            TokenKind::LParen => f.write_str("`(`"),
            TokenKind::RParen => f.write_str("`)`"),
            TokenKind::Ge => f.write_str("`>=`"),
            TokenKind::Le => f.write_str("`<=`"),
            TokenKind::Eq => f.write_str("`=`"),
            TokenKind::Gt => f.write_str("`>`"),
            TokenKind::Lt => f.write_str("`<`"),
            TokenKind::Newline => f.write_str("end of line"),
            TokenKind::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

/// Tokenizes `text`. Invalid characters produce E001 diagnostics and are
/// skipped; the token stream always ends with [`TokenKind::Eof`].
pub fn tokenize(text: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut tokens = Vec::new();
    let mut diags = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut line = 1u32;
    let mut col = 1u32;

    while i < chars.len() {
        let c = chars[i];
        let start = Span::new(line, col, 1);
        match c {
            '\n' => {
                tokens.push(Token {
                    kind: TokenKind::Newline,
                    span: start,
                });
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            ' ' | '\t' | '\r' => {
                i += 1;
                col += 1;
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                    col += 1;
                }
                continue;
            }
            _ => {}
        }

        let next = chars.get(i + 1).copied();
        let (kind, len) = match c {
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                let kind = match Keyword::lookup(&word) {
                    Some(k) => TokenKind::Keyword(k),
                    None => TokenKind::Ident(word),
                };
                (Some(kind), j - i)
            }
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let digits: String = chars[i..j].iter().collect();
                match digits.parse::<u32>() {
                    Ok(n) => (Some(TokenKind::Int(n)), j - i),
                    Err(_) => {
                        diags.push(Diagnostic::new(
                            Code::E001,
                            format!("integer `{digits}` is too large"),
                            Span::new(line, col, (j - i) as u32),
                        ));
                        (Some(TokenKind::Int(u32::MAX)), j - i)
                    }
                }
            }
            '.' if next == Some('.') => (Some(TokenKind::DotDot), 2),
            '-' if next == Some('>') => (Some(TokenKind::Arrow), 2),
            '-' if next == Some('|') => (Some(TokenKind::Bar), 2),
            '>' if next == Some('=') => (Some(TokenKind::Ge), 2),
            '<' if next == Some('=') => (Some(TokenKind::Le), 2),
            '>' => (Some(TokenKind::Gt), 1),
            '<' => (Some(TokenKind::Lt), 1),
            '=' => (Some(TokenKind::Eq), 1),
            ':' => (Some(TokenKind::Colon), 1),
            ',' => (Some(TokenKind::Comma), 1),
            '(' => (Some(TokenKind::LParen), 1),
            ')' => (Some(TokenKind::RParen), 1),
            other => {
                diags.push(Diagnostic::new(
                    Code::E001,
                    format!("unexpected character `{}`", other.escape_default()),
                    start,
                ));
                (None, 1)
            }
        };
        if let Some(kind) = kind {
            tokens.push(Token {
                kind,
                span: Span::new(line, col, len as u32),
            });
        }
        i += len;
        col += len as u32;
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        span: Span::new(line, col, 0),
    });
    (tokens, diags)
}
