//! Rewrite-pattern dialect.
//!
//! Rule patterns are written in a restricted regex dialect: character
//! classes, alternation, optionality and repetition, capture groups, the
//! anchors `\A` (token start), `\Z` (token end) and `\b`, and
//! bounded-length negative lookbehind `(?<!...)`. Backreferences,
//! lookahead, positive lookbehind, named groups and inline flags are
//! rejected up front so every shipped pattern stays mechanically
//! analyzable. Internally `\Z` is rewritten to the engine's `\z`.

use fancy_regex::Regex;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{message} (offset {offset})")]
pub struct PatternError {
    pub offset: usize,
    pub message: String,
}

fn err<T>(offset: usize, message: impl Into<String>) -> Result<T, PatternError> {
    Err(PatternError {
        offset,
        message: message.into(),
    })
}

/// A compiled token-rewrite pattern.
#[derive(Debug, Clone)]
pub struct RewritePattern {
    source: String,
    regex: Regex,
    group_count: usize,
}

/// Translate dialect syntax to engine syntax, validating the dialect
/// subset and counting capture groups.
fn translate(source: &str) -> Result<(String, usize), PatternError> {
    let chars: Vec<char> = source.chars().collect();
    let n = chars.len();
    let mut out = String::with_capacity(source.len() + 4);
    let mut groups = 0usize;
    let mut in_class = false;
    let mut class_start = 0usize;
    let mut i = 0usize;
    while i < n {
        let c = chars[i];
        match c {
            '\\' => {
                if i + 1 >= n {
                    return err(i, "dangling escape");
                }
                let d = chars[i + 1];
                if d.is_ascii_digit() {
                    return err(i, "backreferences are not supported");
                }
                if d == 'Z' && !in_class {
                    out.push_str("\\z");
                } else {
                    out.push('\\');
                    out.push(d);
                }
                i += 2;
                continue;
            }
            '[' if !in_class => {
                in_class = true;
                class_start = i;
                out.push('[');
                i += 1;
                if i < n && chars[i] == '^' {
                    out.push('^');
                    i += 1;
                }
                // A ']' directly after '[' or '[^' is a literal.
                if i < n && chars[i] == ']' {
                    out.push(']');
                    i += 1;
                }
                continue;
            }
            ']' if in_class => {
                in_class = false;
                out.push(']');
            }
            '(' if !in_class => {
                if i + 1 < n && chars[i + 1] == '?' {
                    let rest: String = chars[i..n.min(i + 4)].iter().collect();
                    if rest.starts_with("(?:") {
                        out.push_str("(?:");
                        i += 3;
                        continue;
                    }
                    if rest.starts_with("(?<!") {
                        out.push_str("(?<!");
                        i += 4;
                        continue;
                    }
                    if rest.starts_with("(?<=") {
                        return err(i, "positive lookbehind is not supported");
                    }
                    if rest.starts_with("(?=") || rest.starts_with("(?!") {
                        return err(i, "lookahead is not supported");
                    }
                    if rest.starts_with("(?<") || rest.starts_with("(?P") {
                        return err(i, "named groups are not supported");
                    }
                    return err(i, "inline flags are not supported");
                }
                groups += 1;
                out.push('(');
            }
            _ => out.push(c),
        }
        i += 1;
    }
    if in_class {
        return err(class_start, "unterminated character class");
    }
    Ok((out, groups))
}

impl RewritePattern {
    pub fn new(source: &str) -> Result<Self, PatternError> {
        let (engine, group_count) = translate(source)?;
        let regex = Regex::new(&engine).map_err(|e| PatternError {
            offset: 0,
            message: format!("invalid pattern: {e}"),
        })?;
        Ok(RewritePattern {
            source: source.to_string(),
            regex,
            group_count,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn group_count(&self) -> usize {
        self.group_count
    }

    pub fn is_match(&self, text: &str) -> bool {
        self.regex.is_match(text).unwrap_or(false)
    }

    /// Byte spans of all non-overlapping matches, leftmost first.
    pub fn match_spans(&self, text: &str) -> Vec<(usize, usize)> {
        self.regex
            .find_iter(text)
            .flatten()
            .map(|m| (m.start(), m.end()))
            .collect()
    }

    /// Rewrite every non-overlapping match left to right in one pass.
    /// Lookbehinds consult the original input, not earlier rewrites.
    pub fn apply(&self, text: &str, template: &ReplacementTemplate) -> String {
        let mut out = String::with_capacity(text.len());
        let mut last = 0usize;
        for caps in self.regex.captures_iter(text).flatten() {
            let m = caps.get(0).expect("match has group 0");
            out.push_str(&text[last..m.start()]);
            template.expand(&caps, &mut out);
            last = m.end();
        }
        out.push_str(&text[last..]);
        out
    }

    /// One output per match position, each with only that match rewritten.
    pub fn single_applications(&self, text: &str, template: &ReplacementTemplate) -> Vec<String> {
        let mut results = Vec::new();
        for caps in self.regex.captures_iter(text).flatten() {
            let m = caps.get(0).expect("match has group 0");
            let mut out = String::with_capacity(text.len());
            out.push_str(&text[..m.start()]);
            template.expand(&caps, &mut out);
            out.push_str(&text[m.end()..]);
            results.push(out);
        }
        results
    }

    /// Structural decomposition used for mechanical inversion, or `None`
    /// when the top level contains anything but anchors, literals and
    /// capture groups (classes, quantifiers, alternation at top level all
    /// lose information).
    pub fn invertible_pieces(&self) -> Option<Vec<PatternPiece>> {
        segment(&self.source)
    }
}

/// A top-level structural element of a pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternPiece {
    /// `\A`, `\Z` or `\b`, stored in dialect syntax.
    Anchor(String),
    /// Literal text, unescaped.
    Literal(String),
    /// Capture group with its full source, parentheses included.
    Group { index: usize, source: String },
}

fn segment(source: &str) -> Option<Vec<PatternPiece>> {
    let chars: Vec<char> = source.chars().collect();
    let n = chars.len();
    let mut pieces: Vec<PatternPiece> = Vec::new();
    let mut literal = String::new();
    let mut groups = 0usize;
    let mut i = 0usize;
    let flush = |literal: &mut String, pieces: &mut Vec<PatternPiece>| {
        if !literal.is_empty() {
            pieces.push(PatternPiece::Literal(std::mem::take(literal)));
        }
    };
    while i < n {
        match chars[i] {
            '\\' => {
                let d = *chars.get(i + 1)?;
                match d {
                    'A' | 'Z' | 'b' => {
                        flush(&mut literal, &mut pieces);
                        pieces.push(PatternPiece::Anchor(format!("\\{d}")));
                    }
                    'B' | 'w' | 'W' | 'd' | 'D' | 's' | 'S' => return None,
                    _ => literal.push(d),
                }
                i += 2;
            }
            '(' => {
                if chars.get(i + 1) == Some(&'?') {
                    return None;
                }
                let end = matching_paren(&chars, i)?;
                let inner: String = chars[i..=end].iter().collect();
                if has_capture_group(&chars[i + 1..end]) {
                    return None;
                }
                groups += 1;
                flush(&mut literal, &mut pieces);
                pieces.push(PatternPiece::Group {
                    index: groups,
                    source: inner,
                });
                i = end + 1;
            }
            '[' | '?' | '*' | '+' | '{' | '|' | ')' | '.' | '^' | '$' => return None,
            c => {
                literal.push(c);
                i += 1;
            }
        }
    }
    flush(&mut literal, &mut pieces);
    Some(pieces)
}

/// Index of the ')' matching the '(' at `open`, escape- and class-aware.
fn matching_paren(chars: &[char], open: usize) -> Option<usize> {
    let mut depth = 0usize;
    let mut in_class = false;
    let mut i = open;
    while i < chars.len() {
        match chars[i] {
            '\\' => i += 1,
            '[' if !in_class => in_class = true,
            ']' if in_class => in_class = false,
            '(' if !in_class => depth += 1,
            ')' if !in_class => {
                depth -= 1;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
        i += 1;
    }
    None
}

/// True when the slice contains a capture group of its own.
fn has_capture_group(chars: &[char]) -> bool {
    let mut in_class = false;
    let mut i = 0usize;
    while i < chars.len() {
        match chars[i] {
            '\\' => i += 1,
            '[' if !in_class => in_class = true,
            ']' if in_class => in_class = false,
            '(' if !in_class => {
                if chars.get(i + 1) != Some(&'?') {
                    return true;
                }
            }
            _ => {}
        }
        i += 1;
    }
    false
}

/// A parsed replacement template: literal text interleaved with `$n` or
/// `${n}` group references. `$$` escapes a dollar sign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplacementTemplate {
    source: String,
    parts: Vec<TemplatePart>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TemplatePart {
    Literal(String),
    Group(usize),
}

impl ReplacementTemplate {
    pub fn parse(source: &str) -> Result<Self, PatternError> {
        let chars: Vec<char> = source.chars().collect();
        let n = chars.len();
        let mut parts: Vec<TemplatePart> = Vec::new();
        let mut literal = String::new();
        let mut i = 0usize;
        while i < n {
            if chars[i] != '$' {
                literal.push(chars[i]);
                i += 1;
                continue;
            }
            match chars.get(i + 1) {
                Some('$') => {
                    literal.push('$');
                    i += 2;
                }
                Some('{') => {
                    let close = chars[i + 2..].iter().position(|&c| c == '}').map(|p| p + i + 2);
                    let close = match close {
                        Some(c) if c > i + 2 => c,
                        _ => return err(i, "malformed group reference"),
                    };
                    let digits: String = chars[i + 2..close].iter().collect();
                    let idx: usize = digits
                        .parse()
                        .map_err(|_| PatternError {
                            offset: i,
                            message: "malformed group reference".into(),
                        })?;
                    if !literal.is_empty() {
                        parts.push(TemplatePart::Literal(std::mem::take(&mut literal)));
                    }
                    parts.push(TemplatePart::Group(idx));
                    i = close + 1;
                }
                Some(c) if c.is_ascii_digit() => {
                    let mut j = i + 1;
                    while j < n && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    let digits: String = chars[i + 1..j].iter().collect();
                    let idx: usize = digits.parse().map_err(|_| PatternError {
                        offset: i,
                        message: "malformed group reference".into(),
                    })?;
                    if !literal.is_empty() {
                        parts.push(TemplatePart::Literal(std::mem::take(&mut literal)));
                    }
                    parts.push(TemplatePart::Group(idx));
                    i = j;
                }
                _ => return err(i, "dangling '$' in replacement (use '$$' for a literal)"),
            }
        }
        if !literal.is_empty() {
            parts.push(TemplatePart::Literal(literal));
        }
        Ok(ReplacementTemplate {
            source: source.to_string(),
            parts,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn parts(&self) -> &[TemplatePart] {
        &self.parts
    }

    /// Highest group index referenced, 0 when none.
    pub fn max_group(&self) -> usize {
        self.parts
            .iter()
            .map(|p| match p {
                TemplatePart::Group(n) => *n,
                TemplatePart::Literal(_) => 0,
            })
            .max()
            .unwrap_or(0)
    }

    fn expand(&self, caps: &fancy_regex::Captures<'_>, out: &mut String) {
        for part in &self.parts {
            match part {
                TemplatePart::Literal(s) => out.push_str(s),
                TemplatePart::Group(n) => {
                    if let Some(m) = caps.get(*n) {
                        out.push_str(m.as_str());
                    }
                }
            }
        }
    }
}
