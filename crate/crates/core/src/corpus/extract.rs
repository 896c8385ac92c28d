//! Paragraph extraction from the three source document formats.
//!
//! Plain text splits on blank lines. XML collects character data inside
//! paragraph-level elements. MediaWiki strips markup in two passes: a
//! scanner over the original text removes comments, templates, tables,
//! references and resolves wiki links (reporting unterminated constructs
//! with their location), then quote markup, external links and HTML tags
//! are folded away before blank-line splitting.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DocumentFormat {
    MediaWiki,
    Xml,
    Plain,
}

impl FromStr for DocumentFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mediawiki" | "wiki" => Ok(DocumentFormat::MediaWiki),
            "xml" => Ok(DocumentFormat::Xml),
            "plain" | "text" | "txt" => Ok(DocumentFormat::Plain),
            other => Err(format!("unknown document format {other:?}")),
        }
    }
}

impl fmt::Display for DocumentFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            DocumentFormat::MediaWiki => "mediawiki",
            DocumentFormat::Xml => "xml",
            DocumentFormat::Plain => "plain",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("{message} at line {line}, column {column}")]
pub struct ExtractError {
    pub message: String,
    pub line: usize,
    pub column: usize,
}

fn error_at(text: &str, byte: usize, message: impl Into<String>) -> ExtractError {
    let prefix = &text[..byte.min(text.len())];
    let line = 1 + prefix.matches('\n').count();
    let column = 1 + prefix
        .rfind('\n')
        .map_or(prefix, |i| &prefix[i + 1..])
        .chars()
        .count();
    ExtractError { message: message.into(), line, column }
}

pub fn extract_paragraphs(
    document: &str,
    format: DocumentFormat,
) -> Result<Vec<String>, ExtractError> {
    match format {
        DocumentFormat::Plain => Ok(split_blocks(document)),
        DocumentFormat::Xml => extract_xml(document),
        DocumentFormat::MediaWiki => extract_mediawiki(document),
    }
}

/// Blank-line separated blocks, each block's lines joined with a space.
fn split_blocks(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut block: Vec<&str> = Vec::new();
    for line in text.lines().chain(std::iter::once("")) {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            if !block.is_empty() {
                out.push(block.join(" "));
                block.clear();
            }
        } else {
            block.push(trimmed);
        }
    }
    out
}

fn unescape_entities(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        let tail = &rest[amp..];
        let semi = match tail.find(';') {
            Some(i) if i <= 10 => i,
            _ => {
                out.push('&');
                rest = &tail[1..];
                continue;
            }
        };
        let name = &tail[1..semi];
        let replacement = match name {
            "amp" => Some('&'),
            "lt" => Some('<'),
            "gt" => Some('>'),
            "quot" => Some('"'),
            "apos" => Some('\''),
            _ => name
                .strip_prefix('#')
                .and_then(|num| {
                    if let Some(hex) = num.strip_prefix('x').or(num.strip_prefix('X')) {
                        u32::from_str_radix(hex, 16).ok()
                    } else {
                        num.parse().ok()
                    }
                })
                .and_then(char::from_u32),
        };
        match replacement {
            Some(c) => out.push(c),
            None => out.push_str(&tail[..semi + 1]),
        }
        rest = &tail[semi + 1..];
    }
    out.push_str(rest);
    out
}

const PARAGRAPH_TAGS: [&str; 5] = ["p", "akap", "akap_dialog", "akap_cd", "para"];

/// Scan an XML tag starting at `open` (the byte of '<'); returns
/// (name, self_closing, end byte past '>'). Quote-aware.
fn scan_tag(text: &str, open: usize) -> Result<(String, bool, usize), ExtractError> {
    let bytes = text.as_bytes();
    let mut i = open + 1;
    if bytes.get(i) == Some(&b'/') {
        i += 1;
    }
    let name_start = i;
    while i < bytes.len()
        && (bytes[i].is_ascii_alphanumeric() || matches!(bytes[i], b'_' | b'-' | b':' | b'.'))
    {
        i += 1;
    }
    let name = text[name_start..i].to_ascii_lowercase();
    let mut quote: Option<u8> = None;
    let mut last_meaningful = 0u8;
    while i < bytes.len() {
        let b = bytes[i];
        match quote {
            Some(q) => {
                if b == q {
                    quote = None;
                }
            }
            None => match b {
                b'"' | b'\'' => quote = Some(b),
                b'>' => {
                    return Ok((name, last_meaningful == b'/', i + 1));
                }
                _ => {
                    if !b.is_ascii_whitespace() {
                        last_meaningful = b;
                    }
                }
            },
        }
        i += 1;
    }
    Err(error_at(text, open, "unterminated tag"))
}

fn extract_xml(document: &str) -> Result<Vec<String>, ExtractError> {
    let bytes = document.as_bytes();
    let mut paragraphs = Vec::new();
    let mut buffer = String::new();
    let mut depth = 0usize;
    let mut saw_paragraph_tag = false;
    let mut fallback = String::new();
    let mut pos = 0usize;

    while pos < bytes.len() {
        let next = match document[pos..].find('<') {
            Some(off) => pos + off,
            None => document.len(),
        };
        let data = &document[pos..next];
        if !data.is_empty() {
            let text = unescape_entities(data);
            if depth > 0 {
                buffer.push_str(&text);
            }
            fallback.push_str(&text);
        }
        if next >= document.len() {
            break;
        }
        let tail = &document[next..];
        if tail.starts_with("<!--") {
            match document[next + 4..].find("-->") {
                Some(off) => pos = next + 4 + off + 3,
                None => return Err(error_at(document, next, "unterminated comment")),
            }
        } else if tail.starts_with("<![CDATA[") {
            match document[next + 9..].find("]]>") {
                Some(off) => {
                    let data = &document[next + 9..next + 9 + off];
                    if depth > 0 {
                        buffer.push_str(data);
                    }
                    fallback.push_str(data);
                    pos = next + 9 + off + 3;
                }
                None => return Err(error_at(document, next, "unterminated CDATA section")),
            }
        } else if tail.starts_with("<!") || tail.starts_with("<?") {
            match document[next..].find('>') {
                Some(off) => pos = next + off + 1,
                None => return Err(error_at(document, next, "unterminated declaration")),
            }
        } else {
            let closing = tail.starts_with("</");
            let (name, self_closing, end) = scan_tag(document, next)?;
            let is_paragraph = PARAGRAPH_TAGS.contains(&name.as_str());
            if is_paragraph {
                saw_paragraph_tag = true;
            }
            if closing {
                if is_paragraph && depth > 0 {
                    depth -= 1;
                    if depth == 0 {
                        flush_paragraph(&mut buffer, &mut paragraphs);
                    }
                }
            } else if is_paragraph && !self_closing {
                if depth == 0 {
                    buffer.clear();
                }
                depth += 1;
            } else if name == "br" {
                if depth > 0 {
                    buffer.push(' ');
                }
                fallback.push('\n');
            }
            if !closing && !is_paragraph && depth == 0 {
                // Block-level boundary for the tagless fallback.
                fallback.push('\n');
                if matches!(name.as_str(), "div" | "section" | "body" | "text") {
                    fallback.push('\n');
                }
            }
            pos = end;
        }
    }

    if saw_paragraph_tag {
        Ok(paragraphs)
    } else {
        Ok(split_blocks(&fallback))
    }
}

fn flush_paragraph(buffer: &mut String, paragraphs: &mut Vec<String>) {
    let joined = buffer.split_whitespace().collect::<Vec<_>>().join(" ");
    if !joined.is_empty() {
        paragraphs.push(joined);
    }
    buffer.clear();
}

/// Namespace prefixes whose links are dropped entirely.
const DROPPED_LINK_PREFIXES: [&str; 7] = [
    "file:", "image:", "plik:", "grafika:", "kategoria:", "category:", "media:",
];

/// Pass 1 over the original wikitext: removes comments, templates,
/// tables, references and nowiki wrappers, and resolves [[wiki links]].
/// All unterminated-construct errors are raised here, so their locations
/// refer to the original document.
fn strip_wiki_constructs(doc: &str) -> Result<String, ExtractError> {
    let mut out = String::with_capacity(doc.len());
    let mut pos = 0usize;
    while pos < doc.len() {
        let tail = &doc[pos..];
        if tail.starts_with("<!--") {
            match doc[pos + 4..].find("-->") {
                Some(off) => pos = pos + 4 + off + 3,
                None => return Err(error_at(doc, pos, "unterminated comment")),
            }
        } else if tail.starts_with("{{") {
            pos = skip_balanced(doc, pos, "{{", "}}", "unterminated template")?;
        } else if tail.starts_with("{|") {
            pos = skip_balanced(doc, pos, "{|", "|}", "unterminated table")?;
        } else if has_tag_prefix(tail, "ref") {
            let (_, self_closing, end) = scan_tag(doc, pos)?;
            if self_closing {
                pos = end;
            } else {
                match find_case_insensitive(&doc[end..], "</ref") {
                    Some(off) => {
                        let close_at = end + off;
                        let (_, _, close_end) = scan_tag(doc, close_at)?;
                        pos = close_end;
                    }
                    None => return Err(error_at(doc, pos, "unterminated reference")),
                }
            }
        } else if has_tag_prefix(tail, "nowiki") {
            let (_, self_closing, end) = scan_tag(doc, pos)?;
            if self_closing {
                pos = end;
            } else {
                match find_case_insensitive(&doc[end..], "</nowiki") {
                    Some(off) => {
                        let close_at = end + off;
                        out.push_str(&doc[end..close_at]);
                        let (_, _, close_end) = scan_tag(doc, close_at)?;
                        pos = close_end;
                    }
                    None => return Err(error_at(doc, pos, "unterminated nowiki section")),
                }
            }
        } else if tail.starts_with("[[") {
            let (inner_start, inner_end, end) =
                match balanced_span(doc, pos, "[[", "]]") {
                    Some(span) => span,
                    None => return Err(error_at(doc, pos, "unterminated link")),
                };
            let inner = &doc[inner_start..inner_end];
            let target = inner.split('|').next().unwrap_or("").trim().to_lowercase();
            if !DROPPED_LINK_PREFIXES.iter().any(|p| target.starts_with(p)) {
                let label = match top_level_pipe_rsplit(inner) {
                    Some(label) if !label.trim().is_empty() => label.trim(),
                    Some(_) => inner.split('|').next().unwrap_or("").trim(),
                    None => inner.trim(),
                };
                out.push_str(label);
            }
            pos = end;
        } else {
            let c = tail.chars().next().unwrap();
            out.push(c);
            pos += c.len_utf8();
        }
    }
    Ok(out)
}

fn has_tag_prefix(tail: &str, name: &str) -> bool {
    if !tail.starts_with('<') || tail.len() < 1 + name.len() {
        return false;
    }
    if !tail[1..].to_ascii_lowercase().starts_with(name) {
        return false;
    }
    matches!(
        tail.as_bytes().get(1 + name.len()),
        Some(b'>') | Some(b'/') | Some(b' ') | Some(b'\t') | Some(b'\n') | Some(b'\r')
    )
}

fn find_case_insensitive(haystack: &str, needle: &str) -> Option<usize> {
    let lower = haystack.to_ascii_lowercase();
    lower.find(&needle.to_ascii_lowercase())
}

/// Skip a nested open/close pair starting at `start`; returns the byte
/// past the matching closer.
fn skip_balanced(
    doc: &str,
    start: usize,
    open: &str,
    close: &str,
    message: &str,
) -> Result<usize, ExtractError> {
    let mut depth = 0usize;
    let mut pos = start;
    while pos < doc.len() {
        let tail = &doc[pos..];
        if tail.starts_with(open) {
            depth += 1;
            pos += open.len();
        } else if tail.starts_with(close) {
            depth -= 1;
            pos += close.len();
            if depth == 0 {
                return Ok(pos);
            }
        } else {
            pos += tail.chars().next().unwrap().len_utf8();
        }
    }
    Err(error_at(doc, start, message))
}

/// Inner span and end position of a balanced [[...]] construct.
fn balanced_span(doc: &str, start: usize, open: &str, close: &str) -> Option<(usize, usize, usize)> {
    let mut depth = 0usize;
    let mut pos = start;
    while pos < doc.len() {
        let tail = &doc[pos..];
        if tail.starts_with(open) {
            depth += 1;
            pos += open.len();
        } else if tail.starts_with(close) {
            depth -= 1;
            if depth == 0 {
                return Some((start + open.len(), pos, pos + close.len()));
            }
            pos += close.len();
        } else {
            pos += tail.chars().next()?.len_utf8();
        }
    }
    None
}

/// Label after the last pipe that sits at nesting depth zero, or None
/// when the link has no pipe.
fn top_level_pipe_rsplit(inner: &str) -> Option<&str> {
    let mut depth = 0usize;
    let mut last_pipe = None;
    let mut pos = 0usize;
    while pos < inner.len() {
        let tail = &inner[pos..];
        if tail.starts_with("[[") {
            depth += 1;
            pos += 2;
        } else if tail.starts_with("]]") {
            depth = depth.saturating_sub(1);
            pos += 2;
        } else {
            if depth == 0 && tail.starts_with('|') {
                last_pipe = Some(pos);
            }
            pos += tail.chars().next().unwrap().len_utf8();
        }
    }
    last_pipe.map(|p| &inner[p + 1..])
}

const URL_SCHEMES: [&str; 4] = ["http://", "https://", "ftp://", "//"];

/// Pass 2: external links, quote markup, magic words, generic HTML tags.
/// Nothing here can fail; stray brackets and tags are kept literal.
fn strip_inline_markup(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut pos = 0usize;
    while pos < text.len() {
        let tail = &text[pos..];
        if tail.starts_with('[') && !tail.starts_with("[[") {
            let body = &tail[1..];
            if URL_SCHEMES.iter().any(|s| body.starts_with(s)) {
                if let Some(close) = body.find(']') {
                    let inner = &body[..close];
                    if let Some(space) = inner.find(char::is_whitespace) {
                        out.push_str(inner[space..].trim());
                    }
                    pos += 1 + close + 1;
                    continue;
                }
            }
            out.push('[');
            pos += 1;
        } else if tail.starts_with("'''''") {
            pos += 5;
        } else if tail.starts_with("'''") {
            pos += 3;
        } else if tail.starts_with("''") {
            pos += 2;
        } else if tail.starts_with('<')
            && tail.len() > 1
            && (tail.as_bytes()[1].is_ascii_alphabetic() || tail.as_bytes()[1] == b'/')
        {
            match scan_tag(text, pos) {
                Ok((name, _, end)) => {
                    if name == "br" {
                        out.push(' ');
                    }
                    pos = end;
                }
                Err(_) => {
                    out.push('<');
                    pos += 1;
                }
            }
        } else if tail.starts_with("__") {
            if let Some(rest) = tail[2..].find("__") {
                let word = &tail[2..2 + rest];
                if !word.is_empty() && word.bytes().all(|b| b.is_ascii_uppercase()) {
                    pos += 2 + rest + 2;
                    continue;
                }
            }
            out.push_str("__");
            pos += 2;
        } else {
            let c = tail.chars().next().unwrap();
            out.push(c);
            pos += c.len_utf8();
        }
    }
    out
}

fn extract_mediawiki(document: &str) -> Result<Vec<String>, ExtractError> {
    let stripped = strip_wiki_constructs(document)?;
    let inline = strip_inline_markup(&stripped);

    let mut paragraphs: Vec<String> = Vec::new();
    let mut block: Vec<&str> = Vec::new();
    let flush = |block: &mut Vec<&str>, paragraphs: &mut Vec<String>| {
        if !block.is_empty() {
            paragraphs.push(block.join(" "));
            block.clear();
        }
    };

    for line in inline.lines() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            flush(&mut block, &mut paragraphs);
            continue;
        }
        if trimmed.len() >= 4 && trimmed.bytes().all(|b| b == b'-') {
            flush(&mut block, &mut paragraphs);
            continue;
        }
        if trimmed.starts_with('|') || trimmed.starts_with('!') {
            flush(&mut block, &mut paragraphs);
            continue;
        }
        if trimmed.starts_with('=') && trimmed.ends_with('=') && trimmed.len() >= 3 {
            flush(&mut block, &mut paragraphs);
            let heading = trimmed.trim_matches('=').trim();
            if !heading.is_empty() {
                paragraphs.push(heading.to_string());
            }
            continue;
        }
        if trimmed.starts_with(['*', '#', ':', ';']) {
            flush(&mut block, &mut paragraphs);
            let item = trimmed.trim_start_matches(['*', '#', ':', ';', ' ', '\t']);
            if !item.is_empty() {
                paragraphs.push(item.to_string());
            }
            continue;
        }
        block.push(trimmed);
    }
    flush(&mut block, &mut paragraphs);

    Ok(paragraphs
        .into_iter()
        .map(|p| {
            unescape_entities(&p)
                .split_whitespace()
                .collect::<Vec<_>>()
                .join(" ")
        })
        .filter(|p| !p.is_empty())
        .collect())
}
