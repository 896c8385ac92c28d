//! Word/separator tokenization.
//!
//! A word token is a maximal run of Unicode letters, optionally joined by
//! single hyphens that have a letter on both sides. Everything else falls
//! into separator tokens. Concatenating token texts reproduces the input
//! exactly, so normalization can rewrite words in place without touching
//! punctuation or whitespace.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenKind {
    Word,
    Separator,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Token {
    pub text: String,
    pub kind: TokenKind,
    /// Half-open [start, end) character offsets into the source string.
    pub span: (usize, usize),
}

impl Token {
    pub fn is_word(&self) -> bool {
        self.kind == TokenKind::Word
    }
}

pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let n = chars.len();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < n {
        let start = i;
        let kind = if chars[i].is_alphabetic() {
            i += 1;
            loop {
                if i < n && chars[i].is_alphabetic() {
                    i += 1;
                } else if i < n
                    && chars[i] == '-'
                    && chars[i - 1].is_alphabetic()
                    && i + 1 < n
                    && chars[i + 1].is_alphabetic()
                {
                    // Hyphen counts as word-internal only with letters on both sides.
                    i += 1;
                } else {
                    break;
                }
            }
            TokenKind::Word
        } else {
            while i < n && !chars[i].is_alphabetic() {
                i += 1;
            }
            TokenKind::Separator
        };
        tokens.push(Token {
            text: chars[start..i].iter().collect(),
            kind,
            span: (start, i),
        });
    }
    tokens
}

/// Word-token texts only, in order. Used by word-level metrics.
pub fn words(text: &str) -> Vec<String> {
    tokenize(text)
        .into_iter()
        .filter(Token::is_word)
        .map(|t| t.text)
        .collect()
}
