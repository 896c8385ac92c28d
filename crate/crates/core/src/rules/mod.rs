//! Deterministic diachronic normalization.
//!
//! A [`RuleSet`] bundles three mechanisms, applied per word token in this
//! order: an exception list of tokens that must never change, a word map
//! of irregular whole-word transformations (the replacement may contain
//! spaces, splitting one historical word into several contemporary ones),
//! and an ordered list of rewrite rules. A word-map hit returns
//! immediately; otherwise every rule runs exactly once, in file order,
//! the output of each feeding the next, and each rule rewrites all of
//! its non-overlapping matches left to right.
//!
//! Matching is case-sensitive. An initial-capital token is additionally
//! looked up in the exception list and word map with its first letter
//! lowercased; on a word-map hit the replacement's first letter is
//! re-capitalized.

pub mod lint;
pub mod pattern;
pub mod tokenize;

pub use lint::{lint_ruleset, LintDiagnostic};
pub use pattern::{PatternError, PatternPiece, ReplacementTemplate, RewritePattern, TemplatePart};
pub use tokenize::{tokenize, words, Token, TokenKind};

use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Default ruleset shipped with the crate: ordered rewrite rules for
/// pre-1936 Polish orthography plus a small irregular-form dictionary.
pub const BUILTIN_RULESET_SOURCE: &str = include_str!("../../data/pl-diachronic.rules");

#[derive(Debug, Clone)]
pub struct Rule {
    pub id: String,
    pub pattern: RewritePattern,
    pub template: ReplacementTemplate,
    pub invertible: bool,
    pub comment: Option<String>,
}

#[derive(Debug, Clone)]
pub struct RuleSet {
    pub name: String,
    pub version: String,
    pub rules: Vec<Rule>,
    pub word_map: BTreeMap<String, String>,
    pub exceptions: BTreeSet<String>,
}

#[derive(Debug, Error)]
pub enum RulesetError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: rule '{id}': {source}")]
    Pattern {
        line: usize,
        id: String,
        source: PatternError,
    },
    #[error("line {line}: duplicate rule id '{id}'")]
    DuplicateRuleId { line: usize, id: String },
    #[error("line {line}: duplicate word-map token '{token}'")]
    DuplicateMapToken { line: usize, token: String },
    #[error("line {line}: token '{token}' is both a word-map key and an exception")]
    KeyCollision { line: usize, token: String },
}

/// One recorded normalization step. `action` is a rule id, `"word_map"`
/// or `"exception-skip"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub action: String,
    pub before: String,
    pub after: String,
}

/// Steps applied to one word token of a document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TokenTrace {
    /// Index into the full token stream, separators included.
    pub index: usize,
    pub span: (usize, usize),
    pub source: String,
    pub output: String,
    pub steps: Vec<TraceStep>,
}

/// Trace of one `normalize_text` run: only tokens that changed (or were
/// skipped by exception) appear.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormalizationTrace {
    pub ruleset: String,
    pub version: String,
    pub tokens: Vec<TokenTrace>,
}

fn syntax(line: usize, message: impl Into<String>) -> RulesetError {
    RulesetError::Syntax {
        line,
        message: message.into(),
    }
}

pub fn parse_ruleset(source: &str) -> Result<RuleSet, RulesetError> {
    let mut ruleset = RuleSet {
        name: "unnamed".to_string(),
        version: "0".to_string(),
        rules: Vec::new(),
        word_map: BTreeMap::new(),
        exceptions: BTreeSet::new(),
    };
    let mut map_lines: BTreeMap<String, usize> = BTreeMap::new();
    let mut except_lines: BTreeMap<String, usize> = BTreeMap::new();
    let mut seen_header = false;
    let mut pending_comment: Option<String> = None;

    for (idx, raw) in source.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            pending_comment = None;
            continue;
        }
        if let Some(text) = line.strip_prefix('#') {
            // A comment line directly above a RULE is attached to it.
            pending_comment = Some(text.trim().to_string());
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        match fields[0] {
            "HEADER" => {
                if seen_header {
                    return Err(syntax(lineno, "duplicate HEADER line"));
                }
                if fields.len() != 3 {
                    return Err(syntax(lineno, "HEADER expects name and version"));
                }
                seen_header = true;
                ruleset.name = fields[1].to_string();
                ruleset.version = fields[2].to_string();
            }
            "RULE" => {
                if fields.len() < 4 || fields.len() > 5 {
                    return Err(syntax(
                        lineno,
                        "RULE expects id, pattern, replacement and optional INVERTIBLE",
                    ));
                }
                let id = fields[1].to_string();
                if id.is_empty() {
                    return Err(syntax(lineno, "empty rule id"));
                }
                if ruleset.rules.iter().any(|r| r.id == id) {
                    return Err(RulesetError::DuplicateRuleId { line: lineno, id });
                }
                let invertible = match fields.get(4) {
                    None => false,
                    Some(&"INVERTIBLE") => true,
                    Some(other) => {
                        return Err(syntax(lineno, format!("unexpected field '{other}'")))
                    }
                };
                let pattern =
                    RewritePattern::new(fields[2]).map_err(|source| RulesetError::Pattern {
                        line: lineno,
                        id: id.clone(),
                        source,
                    })?;
                let template = ReplacementTemplate::parse(fields[3]).map_err(|source| {
                    RulesetError::Pattern {
                        line: lineno,
                        id: id.clone(),
                        source,
                    }
                })?;
                ruleset.rules.push(Rule {
                    id,
                    pattern,
                    template,
                    invertible,
                    comment: pending_comment.take(),
                });
            }
            "MAP" => {
                if fields.len() != 3 {
                    return Err(syntax(lineno, "MAP expects token and replacement"));
                }
                let token = fields[1].to_string();
                if map_lines.contains_key(&token) {
                    return Err(RulesetError::DuplicateMapToken {
                        line: lineno,
                        token,
                    });
                }
                if except_lines.contains_key(&token) {
                    return Err(RulesetError::KeyCollision {
                        line: lineno,
                        token,
                    });
                }
                map_lines.insert(token.clone(), lineno);
                ruleset.word_map.insert(token, fields[2].to_string());
            }
            "EXCEPT" => {
                if fields.len() != 2 {
                    return Err(syntax(lineno, "EXCEPT expects a single token"));
                }
                let token = fields[1].to_string();
                if map_lines.contains_key(&token) {
                    return Err(RulesetError::KeyCollision {
                        line: lineno,
                        token,
                    });
                }
                except_lines.entry(token.clone()).or_insert(lineno);
                ruleset.exceptions.insert(token);
            }
            other => {
                return Err(syntax(lineno, format!("unknown keyword '{other}'")));
            }
        }
        if fields[0] != "RULE" {
            pending_comment = None;
        }
    }
    Ok(ruleset)
}

/// The token's lowercase-initial form, or `None` when it does not start
/// with an uppercase letter.
pub(crate) fn decapitalized(token: &str) -> Option<String> {
    let first = token.chars().next()?;
    if !first.is_uppercase() {
        return None;
    }
    let mut out = String::with_capacity(token.len());
    out.extend(first.to_lowercase());
    out.push_str(&token[first.len_utf8()..]);
    Some(out)
}

pub(crate) fn capitalized(token: &str) -> String {
    match token.chars().next() {
        None => String::new(),
        Some(first) => {
            let mut out = String::with_capacity(token.len());
            out.extend(first.to_uppercase());
            out.push_str(&token[first.len_utf8()..]);
            out
        }
    }
}

impl RuleSet {
    pub fn parse(source: &str) -> Result<Self, RulesetError> {
        parse_ruleset(source)
    }

    /// The embedded default ruleset.
    pub fn builtin() -> Self {
        parse_ruleset(BUILTIN_RULESET_SOURCE).expect("builtin ruleset parses")
    }

    pub fn rule(&self, id: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.id == id)
    }

    fn exception_hit(&self, token: &str) -> bool {
        if self.exceptions.contains(token) {
            return true;
        }
        decapitalized(token)
            .map(|d| self.exceptions.contains(&d))
            .unwrap_or(false)
    }

    fn word_map_hit(&self, token: &str) -> Option<String> {
        if let Some(repl) = self.word_map.get(token) {
            return Some(repl.clone());
        }
        let decap = decapitalized(token)?;
        self.word_map.get(&decap).map(|repl| capitalized(repl))
    }

    /// Normalize a single word token, returning the output string and the
    /// steps taken. The output may contain spaces when a word-map entry
    /// splits the word.
    pub fn normalize_token(&self, token: &str) -> (String, Vec<TraceStep>) {
        if self.exception_hit(token) {
            let step = TraceStep {
                action: "exception-skip".to_string(),
                before: token.to_string(),
                after: token.to_string(),
            };
            return (token.to_string(), vec![step]);
        }
        if let Some(replacement) = self.word_map_hit(token) {
            let step = TraceStep {
                action: "word_map".to_string(),
                before: token.to_string(),
                after: replacement.clone(),
            };
            return (replacement, vec![step]);
        }
        let mut current = token.to_string();
        let mut steps = Vec::new();
        for rule in &self.rules {
            let next = rule.pattern.apply(&current, &rule.template);
            if next != current {
                steps.push(TraceStep {
                    action: rule.id.clone(),
                    before: current,
                    after: next.clone(),
                });
                current = next;
            }
        }
        (current, steps)
    }

    /// Normalize a document: word tokens are rewritten, separators pass
    /// through untouched.
    pub fn normalize_text(&self, text: &str) -> (String, NormalizationTrace) {
        let mut output = String::with_capacity(text.len());
        let mut trace = NormalizationTrace {
            ruleset: self.name.clone(),
            version: self.version.clone(),
            tokens: Vec::new(),
        };
        for (index, token) in tokenize(text).into_iter().enumerate() {
            if !token.is_word() {
                output.push_str(&token.text);
                continue;
            }
            let (normalized, steps) = self.normalize_token(&token.text);
            output.push_str(&normalized);
            if !steps.is_empty() {
                trace.tokens.push(TokenTrace {
                    index,
                    span: token.span,
                    source: token.text,
                    output: normalized,
                    steps,
                });
            }
        }
        (output, trace)
    }

    /// `normalize_text` without the trace.
    pub fn normalize(&self, text: &str) -> String {
        self.normalize_text(text).0
    }
}
