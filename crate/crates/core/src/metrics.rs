//! Edit-distance metrics and corpus evaluation.
//!
//! CER and WER are micro-averaged: corpus error = total edits / total
//! reference length, so long paragraphs weigh proportionally more than
//! short ones. Distances are computed over Unicode scalar values at the
//! character level and over word tokens (separators dropped) at the word
//! level.

use crate::corpus::ParagraphPair;
use crate::rules::words;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("reference is empty")]
    EmptyReference,
    #[error("{hypotheses} hypotheses for {pairs} pairs")]
    LengthMismatch { hypotheses: usize, pairs: usize },
}

/// Levenshtein distance with unit costs, O(min(|a|,|b|)) memory.
pub fn edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if short.is_empty() {
        return long.len();
    }
    let mut row: Vec<usize> = (0..=short.len()).collect();
    for (i, lc) in long.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, sc) in short.iter().enumerate() {
            let sub = diag + usize::from(lc != sc);
            diag = row[j + 1];
            row[j + 1] = sub.min(diag + 1).min(row[j] + 1);
        }
    }
    row[short.len()]
}

/// One aligned operation of a minimal edit script from `a` to `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EditOp {
    Match { src: usize, tgt: usize },
    Substitute { src: usize, tgt: usize },
    Delete { src: usize },
    Insert { tgt: usize },
}

/// Minimal edit script, deterministic: where costs tie, insertion is
/// preferred over the diagonal, and the diagonal over deletion. This
/// places the insert directly after the substitution in one-word to
/// two-word rewrites, which the memorization baseline reads as a split.
pub fn edit_script<T: PartialEq>(a: &[T], b: &[T]) -> Vec<EditOp> {
    let n = a.len();
    let m = b.len();
    let mut dp = vec![vec![0usize; m + 1]; n + 1];
    for i in 0..=n {
        dp[i][0] = i;
    }
    for j in 0..=m {
        dp[0][j] = j;
    }
    for i in 1..=n {
        for j in 1..=m {
            let sub = dp[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            dp[i][j] = sub.min(dp[i - 1][j] + 1).min(dp[i][j - 1] + 1);
        }
    }
    let mut ops = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        if j > 0 && dp[i][j] == dp[i][j - 1] + 1 {
            ops.push(EditOp::Insert { tgt: j - 1 });
            j -= 1;
        } else if i > 0 && j > 0 {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            if dp[i][j] == dp[i - 1][j - 1] + cost {
                ops.push(if cost == 0 {
                    EditOp::Match { src: i - 1, tgt: j - 1 }
                } else {
                    EditOp::Substitute { src: i - 1, tgt: j - 1 }
                });
                i -= 1;
                j -= 1;
            } else {
                ops.push(EditOp::Delete { src: i - 1 });
                i -= 1;
            }
        } else {
            ops.push(EditOp::Delete { src: i - 1 });
            i -= 1;
        }
    }
    ops.reverse();
    ops
}

/// Character error rate of a hypothesis against a non-empty reference.
pub fn cer(hypothesis: &str, reference: &str) -> Result<f64, MetricsError> {
    let r: Vec<char> = reference.chars().collect();
    if r.is_empty() {
        return Err(MetricsError::EmptyReference);
    }
    let h: Vec<char> = hypothesis.chars().collect();
    Ok(edit_distance(&h, &r) as f64 / r.len() as f64)
}

/// Word error rate; the reference must contain at least one word token.
pub fn wer(hypothesis: &str, reference: &str) -> Result<f64, MetricsError> {
    let r = words(reference);
    if r.is_empty() {
        return Err(MetricsError::EmptyReference);
    }
    let h = words(hypothesis);
    Ok(edit_distance(&h, &r) as f64 / r.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairRecord {
    pub pair_id: String,
    pub char_edits: usize,
    pub char_ref_len: usize,
    pub word_edits: usize,
    pub word_ref_len: usize,
    pub empty_reference: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub system: String,
    pub version: String,
    pub variant_id: String,
    pub cer: f64,
    pub wer: f64,
    pub pairs: Vec<PairRecord>,
}

#[derive(Debug, Clone)]
pub struct EvalMeta {
    pub system: String,
    pub version: String,
    pub variant_id: String,
}

/// Score hypotheses against the pairs' target sides, index-aligned.
/// Empty references are flagged and contribute zero to both the
/// numerator and denominator of the corpus rates.
pub fn evaluate(
    pairs: &[ParagraphPair],
    hypotheses: &[String],
    meta: EvalMeta,
) -> Result<EvalReport, MetricsError> {
    if pairs.len() != hypotheses.len() {
        return Err(MetricsError::LengthMismatch {
            hypotheses: hypotheses.len(),
            pairs: pairs.len(),
        });
    }
    let mut records = Vec::with_capacity(pairs.len());
    let (mut ce, mut cl, mut we, mut wl) = (0usize, 0usize, 0usize, 0usize);
    for (pair, hyp) in pairs.iter().zip(hypotheses) {
        let ref_chars: Vec<char> = pair.tgt.chars().collect();
        let hyp_chars: Vec<char> = hyp.chars().collect();
        let ref_words = words(&pair.tgt);
        let hyp_words = words(hyp);
        let record = PairRecord {
            pair_id: pair.pair_id.clone(),
            char_edits: edit_distance(&hyp_chars, &ref_chars),
            char_ref_len: ref_chars.len(),
            word_edits: edit_distance(&hyp_words, &ref_words),
            word_ref_len: ref_words.len(),
            empty_reference: ref_chars.is_empty(),
        };
        if record.char_ref_len > 0 {
            ce += record.char_edits;
            cl += record.char_ref_len;
        }
        if record.word_ref_len > 0 {
            we += record.word_edits;
            wl += record.word_ref_len;
        }
        records.push(record);
    }
    let ratio = |edits: usize, len: usize| if len == 0 { 0.0 } else { edits as f64 / len as f64 };
    Ok(EvalReport {
        system: meta.system,
        version: meta.version,
        variant_id: meta.variant_id,
        cer: ratio(ce, cl),
        wer: ratio(we, wl),
        pairs: records,
    })
}

/// One row of the plain-text results table.
#[derive(Debug, Clone)]
pub struct TableRow {
    pub method: String,
    pub pruning: bool,
    pub separation: bool,
    pub cer: f64,
    pub wer: f64,
}

/// Aligned results table, one row per (method, pruning, separation).
pub fn render_table(rows: &[TableRow]) -> String {
    let yes_no = |b: bool| if b { "Yes" } else { "No" };
    let method_width = rows
        .iter()
        .map(|r| r.method.chars().count())
        .chain(["Method".chars().count()])
        .max()
        .unwrap();
    let mut out = String::new();
    out.push_str(&format!(
        "{:<method_width$}  {:>7}  {:>10}  {:>8}  {:>8}\n",
        "Method", "Pruning", "Separation", "CER", "WER"
    ));
    for row in rows {
        out.push_str(&format!(
            "{:<method_width$}  {:>7}  {:>10}  {:>8.4}  {:>8.4}\n",
            row.method,
            yes_no(row.pruning),
            yes_no(row.separation),
            row.cer,
            row.wer
        ));
    }
    out
}
