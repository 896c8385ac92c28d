//! Corpus construction: edition metadata, fuzzy edition matching,
//! paragraph pair building, dataset variants and their statistics.
//!
//! The pipeline runs per matched novel: extract paragraphs, clean them,
//! align the two editions, gate low-quality edition pairs, keep beads at
//! or above the pair threshold, then deduplicate across the whole corpus.
//! Variants are derived from the final pair list only, so a fixed corpus
//! and seed always reproduce the same split.

pub mod clean;
pub mod extract;
pub mod formats;

pub use clean::clean_paragraph;
pub use extract::{extract_paragraphs, DocumentFormat, ExtractError};

use std::collections::{HashMap, HashSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::align::{align, edition_pair_quality, filter_beads, AlignConfig};
use crate::metrics::edit_distance;
use crate::rules::words;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EditionSource {
    #[serde(rename = "historical-archive")]
    HistoricalArchive,
    #[serde(rename = "contemporary-library")]
    ContemporaryLibrary,
}

impl fmt::Display for EditionSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            EditionSource::HistoricalArchive => "historical-archive",
            EditionSource::ContemporaryLibrary => "contemporary-library",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edition {
    pub id: String,
    pub source: EditionSource,
    pub author: String,
    pub title: String,
    pub year: i32,
    pub paragraphs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParagraphPair {
    pub pair_id: String,
    pub novel_id: String,
    pub score: f64,
    pub src: String,
    pub tgt: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchConfig {
    pub author_threshold: f64,
    pub title_threshold: f64,
    pub near_miss_margin: f64,
}

impl Default for MatchConfig {
    fn default() -> Self {
        MatchConfig {
            author_threshold: 0.85,
            title_threshold: 0.85,
            near_miss_margin: 0.15,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PipelineConfig {
    pub bead_threshold: f64,
    pub edition_threshold: f64,
    pub match_config: MatchConfig,
    pub align_config: AlignConfig,
}

impl PipelineConfig {
    pub fn standard() -> Self {
        PipelineConfig {
            bead_threshold: 1.0,
            edition_threshold: 0.9,
            match_config: MatchConfig::default(),
            align_config: AlignConfig::default(),
        }
    }
}

/// Extract and clean a document in one step; empty paragraphs vanish.
pub fn paragraphs_from_document(
    document: &str,
    format: DocumentFormat,
) -> Result<Vec<String>, ExtractError> {
    Ok(extract_paragraphs(document, format)?
        .iter()
        .map(|p| clean_paragraph(p))
        .filter(|p| !p.is_empty())
        .collect())
}

/// Similarity between two metadata strings: one minus the normalized
/// edit distance after case, diacritic and whitespace folding.
pub fn fuzzy_similarity(a: &str, b: &str) -> f64 {
    let fa: Vec<char> = clean::match_fold(a).chars().collect();
    let fb: Vec<char> = clean::match_fold(b).chars().collect();
    let longest = fa.len().max(fb.len());
    if longest == 0 {
        return 1.0;
    }
    1.0 - edit_distance(&fa, &fb) as f64 / longest as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MatchDiagnostic {
    /// A cross-source pair below the thresholds but within the margin.
    NearMiss {
        historical_id: String,
        contemporary_id: String,
        author_similarity: f64,
        title_similarity: f64,
    },
    /// Transitively connected editions where some cross-source pair
    /// fails the thresholds; the match is still made best-effort.
    AmbiguousGroup { edition_ids: Vec<String> },
}

impl fmt::Display for MatchDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatchDiagnostic::NearMiss {
                historical_id,
                contemporary_id,
                author_similarity,
                title_similarity,
            } => write!(
                f,
                "near miss: {historical_id} vs {contemporary_id} \
                 (author {author_similarity:.3}, title {title_similarity:.3})"
            ),
            MatchDiagnostic::AmbiguousGroup { edition_ids } => {
                write!(f, "ambiguous edition group: {}", edition_ids.join(", "))
            }
        }
    }
}

pub struct MatchOutcome<'a> {
    pub matches: Vec<(&'a Edition, &'a Edition)>,
    pub diagnostics: Vec<MatchDiagnostic>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Group editions of the same novel across the two sources and pick one
/// pair per group: the oldest historical and the newest contemporary
/// edition by year (ties on id). Groups are connected components of the
/// passes-both-thresholds relation.
pub fn match_editions<'a>(
    historical: &'a [Edition],
    contemporary: &'a [Edition],
    config: &MatchConfig,
) -> MatchOutcome<'a> {
    let h = historical.len();
    let c = contemporary.len();
    let mut author_sim = vec![vec![0.0f64; c]; h];
    let mut title_sim = vec![vec![0.0f64; c]; h];
    let mut passes = vec![vec![false; c]; h];
    let mut uf = UnionFind::new(h + c);

    for i in 0..h {
        for j in 0..c {
            author_sim[i][j] = fuzzy_similarity(&historical[i].author, &contemporary[j].author);
            title_sim[i][j] = fuzzy_similarity(&historical[i].title, &contemporary[j].title);
            if author_sim[i][j] >= config.author_threshold
                && title_sim[i][j] >= config.title_threshold
            {
                passes[i][j] = true;
                uf.union(i, h + j);
            }
        }
    }

    let mut components: HashMap<usize, (Vec<usize>, Vec<usize>)> = HashMap::new();
    for i in 0..h {
        components.entry(uf.find(i)).or_default().0.push(i);
    }
    for j in 0..c {
        components.entry(uf.find(h + j)).or_default().1.push(j);
    }

    let mut matches = Vec::new();
    let mut ambiguous = Vec::new();
    for (hist_members, cont_members) in components.values() {
        if hist_members.is_empty() || cont_members.is_empty() {
            continue;
        }
        let oldest = hist_members
            .iter()
            .copied()
            .min_by(|&a, &b| {
                (historical[a].year, &historical[a].id)
                    .cmp(&(historical[b].year, &historical[b].id))
            })
            .unwrap();
        let newest = cont_members
            .iter()
            .copied()
            .min_by(|&a, &b| {
                (-contemporary[a].year, &contemporary[a].id)
                    .cmp(&(-contemporary[b].year, &contemporary[b].id))
            })
            .unwrap();
        matches.push((&historical[oldest], &contemporary[newest]));

        if hist_members
            .iter()
            .any(|&i| cont_members.iter().any(|&j| !passes[i][j]))
        {
            let mut ids: Vec<String> = hist_members
                .iter()
                .map(|&i| historical[i].id.clone())
                .chain(cont_members.iter().map(|&j| contemporary[j].id.clone()))
                .collect();
            ids.sort();
            ambiguous.push(MatchDiagnostic::AmbiguousGroup { edition_ids: ids });
        }
    }
    matches.sort_by(|a, b| a.0.id.cmp(&b.0.id));
    ambiguous.sort_by(|a, b| format!("{a:?}").cmp(&format!("{b:?}")));

    let mut near_misses = Vec::new();
    for i in 0..h {
        for j in 0..c {
            if uf.find(i) == uf.find(h + j) {
                continue;
            }
            let within_margin = author_sim[i][j] >= config.author_threshold
                - config.near_miss_margin
                && title_sim[i][j] >= config.title_threshold - config.near_miss_margin;
            if within_margin && !passes[i][j] {
                near_misses.push(MatchDiagnostic::NearMiss {
                    historical_id: historical[i].id.clone(),
                    contemporary_id: contemporary[j].id.clone(),
                    author_similarity: author_sim[i][j],
                    title_similarity: title_sim[i][j],
                });
            }
        }
    }

    let mut diagnostics = near_misses;
    diagnostics.extend(ambiguous);
    MatchOutcome { matches, diagnostics }
}

/// Alignment outcome for one matched novel.
#[derive(Debug, Clone, PartialEq)]
pub struct NovelAlignment {
    pub novel_id: String,
    pub quality: f64,
    pub gated: bool,
    pub beads_total: usize,
    pub beads_dropped: usize,
    pub pairs: Vec<ParagraphPair>,
}

/// Align one edition pair and turn qualifying beads into pairs. When
/// the edition-level quality falls below the threshold the whole novel
/// is dropped and no pairs are produced.
pub fn build_pairs(
    historical: &Edition,
    contemporary: &Edition,
    config: &PipelineConfig,
) -> NovelAlignment {
    let novel_id = format!("{}+{}", historical.id, contemporary.id);
    let result = align(
        &historical.paragraphs,
        &contemporary.paragraphs,
        &config.align_config,
    );
    let quality = edition_pair_quality(&result);
    let beads_total = result.beads.len();
    if quality < config.edition_threshold {
        return NovelAlignment {
            novel_id,
            quality,
            gated: true,
            beads_total,
            beads_dropped: beads_total,
            pairs: Vec::new(),
        };
    }
    let kept = filter_beads(
        &result,
        &historical.paragraphs,
        &contemporary.paragraphs,
        config.bead_threshold,
    );
    let beads_dropped = beads_total - kept.len();
    let pairs = kept
        .into_iter()
        .enumerate()
        .map(|(k, aligned)| ParagraphPair {
            pair_id: format!("{novel_id}:{k:05}"),
            novel_id: novel_id.clone(),
            score: aligned.score,
            src: aligned.src,
            tgt: aligned.tgt,
        })
        .collect();
    NovelAlignment {
        novel_id,
        quality,
        gated: false,
        beads_total,
        beads_dropped,
        pairs,
    }
}

/// Remove exact (src, tgt) duplicates, keeping first occurrences.
pub fn deduplicate(pairs: Vec<ParagraphPair>) -> Vec<ParagraphPair> {
    let mut seen: HashSet<(String, String)> = HashSet::new();
    pairs
        .into_iter()
        .filter(|pair| seen.insert((pair.src.clone(), pair.tgt.clone())))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NovelOutcome {
    pub novel_id: String,
    pub quality: f64,
    pub gated: bool,
    pub kept: usize,
    pub beads_dropped: usize,
}

pub struct PipelineReport {
    pub pairs: Vec<ParagraphPair>,
    pub novels: Vec<NovelOutcome>,
    pub diagnostics: Vec<MatchDiagnostic>,
    pub duplicates_removed: usize,
}

/// Full corpus construction: match editions, align every matched novel,
/// collect qualifying pairs, deduplicate at the very end.
pub fn run_pipeline(
    historical: &[Edition],
    contemporary: &[Edition],
    config: &PipelineConfig,
) -> PipelineReport {
    let outcome = match_editions(historical, contemporary, &config.match_config);
    let mut pairs = Vec::new();
    let mut novels = Vec::new();
    for (hist, cont) in &outcome.matches {
        let aligned = build_pairs(hist, cont, config);
        novels.push(NovelOutcome {
            novel_id: aligned.novel_id.clone(),
            quality: aligned.quality,
            gated: aligned.gated,
            kept: aligned.pairs.len(),
            beads_dropped: aligned.beads_dropped,
        });
        pairs.extend(aligned.pairs);
    }
    let before = pairs.len();
    let pairs = deduplicate(pairs);
    PipelineReport {
        duplicates_removed: before - pairs.len(),
        pairs,
        novels,
        diagnostics: outcome.diagnostics,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetVariant {
    pub id: String,
    pub pruning: bool,
    pub separation: bool,
    pub seed: u64,
    pub train: Vec<String>,
    pub test: Vec<String>,
}

pub fn variant_id(pruning: bool, separation: bool) -> String {
    format!(
        "{}-{}",
        if pruning { "pruned" } else { "unpruned" },
        if separation { "separated" } else { "pooled" }
    )
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VariantError {
    #[error("novel separation needs at least 4 novels per quartile; quartile {quartile} has {available}")]
    TooFewNovels { quartile: usize, available: usize },
    #[error("no pairs are eligible for the variant")]
    Empty,
    #[error("train split is empty")]
    EmptyTrain,
}

const TEST_NOVELS_PER_QUARTILE: usize = 4;

/// Derive one train/test split. Pruning drops identical pairs first.
/// With separation, novels ranked by pair count (descending, ties by id)
/// are cut into four quartiles and four novels are drawn from each into
/// the test pool; without it, pairs are split 80/20 uniformly. Both
/// listings keep corpus order.
pub fn build_variant(
    pairs: &[ParagraphPair],
    pruning: bool,
    separation: bool,
    seed: u64,
) -> Result<DatasetVariant, VariantError> {
    let eligible: Vec<&ParagraphPair> = pairs
        .iter()
        .filter(|pair| !pruning || pair.src != pair.tgt)
        .collect();
    if eligible.is_empty() {
        return Err(VariantError::Empty);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let (train, test) = if separation {
        let mut counts: HashMap<&str, usize> = HashMap::new();
        for pair in &eligible {
            *counts.entry(pair.novel_id.as_str()).or_default() += 1;
        }
        let mut ranked: Vec<(&str, usize)> = counts.into_iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));

        let n = ranked.len();
        let quartile_size = n.div_ceil(4);
        let mut test_novels: HashSet<&str> = HashSet::new();
        for quartile in 0..4 {
            let start = quartile * quartile_size;
            let end = ((quartile + 1) * quartile_size).min(n);
            let available = end.saturating_sub(start.min(n));
            if available < TEST_NOVELS_PER_QUARTILE {
                return Err(VariantError::TooFewNovels {
                    quartile: quartile + 1,
                    available,
                });
            }
            let chunk = &ranked[start..end];
            for (novel_id, _) in chunk.choose_multiple(&mut rng, TEST_NOVELS_PER_QUARTILE) {
                test_novels.insert(novel_id);
            }
        }
        let train: Vec<String> = eligible
            .iter()
            .filter(|p| !test_novels.contains(p.novel_id.as_str()))
            .map(|p| p.pair_id.clone())
            .collect();
        let test: Vec<String> = eligible
            .iter()
            .filter(|p| test_novels.contains(p.novel_id.as_str()))
            .map(|p| p.pair_id.clone())
            .collect();
        (train, test)
    } else {
        let m = eligible.len();
        let mut order: Vec<usize> = (0..m).collect();
        order.shuffle(&mut rng);
        let train_count = m * 4 / 5;
        let train_positions: HashSet<usize> = order[..train_count].iter().copied().collect();
        let train: Vec<String> = eligible
            .iter()
            .enumerate()
            .filter(|(k, _)| train_positions.contains(k))
            .map(|(_, p)| p.pair_id.clone())
            .collect();
        let test: Vec<String> = eligible
            .iter()
            .enumerate()
            .filter(|(k, _)| !train_positions.contains(k))
            .map(|(_, p)| p.pair_id.clone())
            .collect();
        (train, test)
    };

    if train.is_empty() {
        return Err(VariantError::EmptyTrain);
    }
    Ok(DatasetVariant {
        id: variant_id(pruning, separation),
        pruning,
        separation,
        seed,
        train,
        test,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VariantStats {
    pub train_samples: usize,
    pub test_samples: usize,
    pub characters: u64,
    pub words: u64,
}

/// Sample counts per split plus character and word totals over src and
/// tgt of every pair in the variant (both splits).
pub fn variant_stats(variant: &DatasetVariant, pairs: &[ParagraphPair]) -> VariantStats {
    let by_id: HashMap<&str, &ParagraphPair> =
        pairs.iter().map(|p| (p.pair_id.as_str(), p)).collect();
    let mut characters = 0u64;
    let mut word_count = 0u64;
    for id in variant.train.iter().chain(variant.test.iter()) {
        if let Some(pair) = by_id.get(id.as_str()) {
            characters += pair.src.chars().count() as u64 + pair.tgt.chars().count() as u64;
            word_count += words(&pair.src).len() as u64 + words(&pair.tgt).len() as u64;
        }
    }
    VariantStats {
        train_samples: variant.train.len(),
        test_samples: variant.test.len(),
        characters,
        words: word_count,
    }
}

pub fn group_digits(n: u64) -> String {
    let digits = n.to_string();
    let mut out = String::new();
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i) % 3 == 0 {
            out.push(',');
        }
        out.push(c);
    }
    out
}

/// Dataset statistics table: one row per variant with split sample
/// counts and corpus totals.
pub fn render_stats_table(rows: &[(bool, bool, VariantStats)]) -> String {
    let headers = ["Pruning", "Separation", "Train", "Test", "Characters", "Words"];
    let cells: Vec<[String; 6]> = rows
        .iter()
        .map(|(pruning, separation, stats)| {
            [
                if *pruning { "Yes" } else { "No" }.to_string(),
                if *separation { "Yes" } else { "No" }.to_string(),
                group_digits(stats.train_samples as u64),
                group_digits(stats.test_samples as u64),
                group_digits(stats.characters),
                group_digits(stats.words),
            ]
        })
        .collect();
    let widths: Vec<usize> = (0..6)
        .map(|col| {
            cells
                .iter()
                .map(|row| row[col].len())
                .chain(std::iter::once(headers[col].len()))
                .max()
                .unwrap()
        })
        .collect();
    let mut out = String::new();
    for (col, header) in headers.iter().enumerate() {
        if col > 0 {
            out.push_str("  ");
        }
        if col < 2 {
            out.push_str(&format!("{header:<width$}", width = widths[col]));
        } else {
            out.push_str(&format!("{header:>width$}", width = widths[col]));
        }
    }
    out.push('\n');
    for row in &cells {
        for (col, cell) in row.iter().enumerate() {
            if col > 0 {
                out.push_str("  ");
            }
            if col < 2 {
                out.push_str(&format!("{cell:<width$}", width = widths[col]));
            } else {
                out.push_str(&format!("{cell:>width$}", width = widths[col]));
            }
        }
        out.push('\n');
    }
    out
}
