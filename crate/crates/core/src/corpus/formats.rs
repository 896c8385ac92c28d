//! On-disk interchange formats: the pair TSV, edition and variant
//! manifests, prediction files, bead files and paragraph-per-line text.
//!
//! TSV fields escape backslash, tab, newline and carriage return, so any
//! paragraph text survives a round trip. All writers produce stable,
//! byte-deterministic output for fixed input.

use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::align::AlignmentResult;
use crate::corpus::{DatasetVariant, EditionSource, ParagraphPair, PipelineConfig};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    Document(String),
}

fn line_error(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Line { line, message: message.into() }
}

pub fn escape_field(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            _ => out.push(c),
        }
    }
    out
}

pub fn unescape_field(s: &str) -> Result<String, String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some(other) => return Err(format!("unknown escape \\{other}")),
            None => return Err("dangling backslash".to_string()),
        }
    }
    Ok(out)
}

pub const PAIR_TSV_HEADER: &str = "pair_id\tnovel_id\tscore\tsrc\ttgt";

pub fn pairs_to_tsv(pairs: &[ParagraphPair]) -> String {
    let mut out = String::new();
    out.push_str(PAIR_TSV_HEADER);
    out.push('\n');
    for pair in pairs {
        out.push_str(&escape_field(&pair.pair_id));
        out.push('\t');
        out.push_str(&escape_field(&pair.novel_id));
        out.push('\t');
        out.push_str(&pair.score.to_string());
        out.push('\t');
        out.push_str(&escape_field(&pair.src));
        out.push('\t');
        out.push_str(&escape_field(&pair.tgt));
        out.push('\n');
    }
    out
}

pub fn pairs_from_tsv(text: &str) -> Result<Vec<ParagraphPair>, FormatError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == PAIR_TSV_HEADER => {}
        Some((_, header)) => {
            return Err(line_error(1, format!("expected pair TSV header, found {header:?}")));
        }
        None => return Err(line_error(1, "empty file")),
    }
    let mut pairs = Vec::new();
    for (index, line) in lines {
        let number = index + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 5 {
            return Err(line_error(number, format!("expected 5 fields, found {}", fields.len())));
        }
        let unescape = |field: &str| {
            unescape_field(field).map_err(|message| line_error(number, message))
        };
        let score: f64 = fields[2]
            .parse()
            .map_err(|_| line_error(number, format!("invalid score {:?}", fields[2])))?;
        pairs.push(ParagraphPair {
            pair_id: unescape(fields[0])?,
            novel_id: unescape(fields[1])?,
            score,
            src: unescape(fields[3])?,
            tgt: unescape(fields[4])?,
        });
    }
    Ok(pairs)
}

/// One row of the edition manifest: metadata plus a pointer to the
/// document file holding the edition's text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EditionRecord {
    pub id: String,
    pub source: EditionSource,
    pub author: String,
    pub title: String,
    pub year: i32,
    pub path: String,
    pub format: String,
}

pub fn edition_records_from_jsonl(text: &str) -> Result<Vec<EditionRecord>, FormatError> {
    let mut records = Vec::new();
    for (index, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: EditionRecord = serde_json::from_str(line)
            .map_err(|e| line_error(index + 1, e.to_string()))?;
        records.push(record);
    }
    Ok(records)
}

pub fn edition_records_to_jsonl(records: &[EditionRecord]) -> String {
    let mut out = String::new();
    for record in records {
        out.push_str(&serde_json::to_string(record).expect("edition record serializes"));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdBlock {
    pub bead: f64,
    pub edition: f64,
    pub author: f64,
    pub title: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScorerBlock {
    pub split_penalty: f64,
    pub gap_penalty: f64,
}

/// Self-describing record of one dataset variant: the split plus every
/// knob that influenced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantManifest {
    pub variant_id: String,
    pub pruning: bool,
    pub separation: bool,
    pub seed: u64,
    pub thresholds: ThresholdBlock,
    pub scorer: ScorerBlock,
    pub ruleset: String,
    pub tool_version: String,
    pub train: Vec<String>,
    pub test: Vec<String>,
}

impl VariantManifest {
    pub fn new(
        variant: &DatasetVariant,
        config: &PipelineConfig,
        ruleset: String,
        tool_version: String,
    ) -> Self {
        VariantManifest {
            variant_id: variant.id.clone(),
            pruning: variant.pruning,
            separation: variant.separation,
            seed: variant.seed,
            thresholds: ThresholdBlock {
                bead: config.bead_threshold,
                edition: config.edition_threshold,
                author: config.match_config.author_threshold,
                title: config.match_config.title_threshold,
            },
            scorer: ScorerBlock {
                split_penalty: config.align_config.split_penalty,
                gap_penalty: config.align_config.gap_penalty,
            },
            ruleset,
            tool_version,
            train: variant.train.clone(),
            test: variant.test.clone(),
        }
    }
}

pub fn variant_manifest_json(manifest: &VariantManifest) -> String {
    let mut out = serde_json::to_string_pretty(manifest).expect("variant manifest serializes");
    out.push('\n');
    out
}

pub fn variant_manifest_from_json(text: &str) -> Result<VariantManifest, FormatError> {
    serde_json::from_str(text).map_err(|e| FormatError::Document(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub pair_id: String,
    pub hypothesis: String,
}

pub fn predictions_from_jsonl(text: &str) -> Result<Vec<Prediction>, FormatError> {
    let mut predictions = Vec::new();
    for (index, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let prediction: Prediction = serde_json::from_str(line)
            .map_err(|e| line_error(index + 1, e.to_string()))?;
        predictions.push(prediction);
    }
    Ok(predictions)
}

pub fn predictions_to_jsonl(predictions: &[Prediction]) -> String {
    let mut out = String::new();
    for prediction in predictions {
        out.push_str(&serde_json::to_string(prediction).expect("prediction serializes"));
        out.push('\n');
    }
    out
}

#[derive(Debug, Serialize)]
struct BeadSummary {
    beads: usize,
    average_score: f64,
}

/// Alignment beads as JSONL, closed by a one-line summary record.
pub fn beads_to_jsonl(result: &AlignmentResult) -> String {
    let mut out = String::new();
    for bead in &result.beads {
        out.push_str(&serde_json::to_string(bead).expect("bead serializes"));
        out.push('\n');
    }
    let summary = BeadSummary {
        beads: result.beads.len(),
        average_score: result.average_score,
    };
    out.push_str(&serde_json::to_string(&summary).expect("summary serializes"));
    out.push('\n');
    out
}

/// One paragraph per line, newlines and tabs escaped.
pub fn paragraphs_to_lines(paragraphs: &[String]) -> String {
    let mut out = String::new();
    for p in paragraphs {
        out.push_str(&escape_field(p));
        out.push('\n');
    }
    out
}

pub fn paragraphs_from_lines(text: &str) -> Result<Vec<String>, FormatError> {
    text.lines()
        .enumerate()
        .map(|(index, line)| {
            unescape_field(line).map_err(|message| line_error(index + 1, message))
        })
        .collect()
}

/// Write via a sibling temp file and rename, so readers never observe a
/// partially written file.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "path has no file name"))?;
    let mut tmp_name = file_name.to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)
}
