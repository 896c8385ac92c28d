//! Reference systems for the evaluation harness: an identity copy and a
//! normalizer that memorizes training pairs.
//!
//! Training aligns each pair's word tokens by minimal edit script and
//! records matches, substitutions and substitution+insertion splits
//! (a one-to-two rewrite like "niema" to "nie ma"). Lone insertions and
//! deletions carry no source token and are ignored. Each source token
//! then maps to its most frequent replacement, ties broken toward the
//! lexicographically smaller one.

use std::collections::BTreeMap;

use crate::corpus::formats::{escape_field, unescape_field, FormatError};
use crate::corpus::ParagraphPair;
use crate::metrics::{edit_script, EditOp};
use crate::rules::{tokenize, words};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MemorizationTable {
    entries: BTreeMap<String, (String, u64)>,
}

impl MemorizationTable {
    pub fn get(&self, token: &str) -> Option<(&str, u64)> {
        self.entries
            .get(token)
            .map(|(replacement, count)| (replacement.as_str(), *count))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, u64)> {
        self.entries
            .iter()
            .map(|(token, (replacement, count))| (token.as_str(), replacement.as_str(), *count))
    }

    pub const TSV_HEADER: &'static str = "token\treplacement\tcount";

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        out.push_str(Self::TSV_HEADER);
        out.push('\n');
        for (token, replacement, count) in self.iter() {
            out.push_str(&escape_field(token));
            out.push('\t');
            out.push_str(&escape_field(replacement));
            out.push('\t');
            out.push_str(&count.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self, FormatError> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, header)) if header == Self::TSV_HEADER => {}
            _ => {
                return Err(FormatError::Line {
                    line: 1,
                    message: "expected memorization table header".to_string(),
                });
            }
        }
        let mut entries = BTreeMap::new();
        for (index, line) in lines {
            if line.is_empty() {
                continue;
            }
            let number = index + 1;
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(FormatError::Line {
                    line: number,
                    message: format!("expected 3 fields, found {}", fields.len()),
                });
            }
            let token = unescape_field(fields[0])
                .map_err(|message| FormatError::Line { line: number, message })?;
            let replacement = unescape_field(fields[1])
                .map_err(|message| FormatError::Line { line: number, message })?;
            let count: u64 = fields[2].parse().map_err(|_| FormatError::Line {
                line: number,
                message: format!("invalid count {:?}", fields[2]),
            })?;
            entries.insert(token, (replacement, count));
        }
        Ok(MemorizationTable { entries })
    }
}

/// Count one observed replacement of a source token.
fn observe(counts: &mut BTreeMap<String, BTreeMap<String, u64>>, token: &str, replacement: &str) {
    *counts
        .entry(token.to_string())
        .or_default()
        .entry(replacement.to_string())
        .or_default() += 1;
}

pub fn train_memorizer(train_pairs: &[ParagraphPair]) -> MemorizationTable {
    let mut counts: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
    for pair in train_pairs {
        let src = words(&pair.src);
        let tgt = words(&pair.tgt);
        let script = edit_script(&src, &tgt);
        let mut i = 0;
        while i < script.len() {
            match script[i] {
                EditOp::Match { src: s, tgt: t } => {
                    observe(&mut counts, &src[s], &tgt[t]);
                    i += 1;
                }
                EditOp::Substitute { src: s, tgt: t } => {
                    if let Some(EditOp::Insert { tgt: t2 }) = script.get(i + 1).copied() {
                        observe(&mut counts, &src[s], &format!("{} {}", tgt[t], tgt[t2]));
                        i += 2;
                    } else {
                        observe(&mut counts, &src[s], &tgt[t]);
                        i += 1;
                    }
                }
                EditOp::Insert { .. } | EditOp::Delete { .. } => i += 1,
            }
        }
    }
    let entries = counts
        .into_iter()
        .map(|(token, options)| {
            let best = options
                .into_iter()
                .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
                .expect("token has at least one observation");
            (token, best)
        })
        .collect();
    MemorizationTable { entries }
}

/// Replace each word token by its table entry (exact match only);
/// separators and unknown tokens pass through.
pub fn memorizer_normalize(text: &str, table: &MemorizationTable) -> String {
    let mut out = String::with_capacity(text.len());
    for token in tokenize(text) {
        if token.is_word() {
            match table.get(&token.text) {
                Some((replacement, _)) => out.push_str(replacement),
                None => out.push_str(&token.text),
            }
        } else {
            out.push_str(&token.text);
        }
    }
    out
}

pub fn identity_normalize(text: &str) -> String {
    text.to_string()
}
