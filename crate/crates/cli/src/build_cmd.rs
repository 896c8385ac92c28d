use crate::util::{self, Failure};
use clap::Args;
use diachron_core::corpus::formats::{
    edition_records_from_jsonl, pairs_to_tsv, variant_manifest_json, VariantManifest,
};
use diachron_core::corpus::{
    paragraphs_from_document, render_stats_table, variant_stats, MatchDiagnostic, NovelOutcome,
    VariantStats,
};
use diachron_core::{
    build_variant, run_pipeline, AlignConfig, DocumentFormat, Edition, EditionSource, MatchConfig,
    PipelineConfig,
};
use serde::Serialize;
use std::path::{Path, PathBuf};

#[derive(Args, Debug)]
pub struct BuildArgs {
    /// Edition metadata manifest: JSONL, one record per edition, with
    /// content paths resolved relative to the manifest's directory.
    pub manifest: PathBuf,
    /// Directory receiving pairs.tsv, the four variant manifests,
    /// stats.txt and report.json.
    #[arg(short, long)]
    pub out_dir: PathBuf,
    /// Seed for the train/test draws.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Beads below this score are dropped.
    #[arg(long, default_value_t = 1.0)]
    pub bead_threshold: f64,
    /// Edition pairs averaging below this score are dropped whole.
    #[arg(long, default_value_t = 0.9)]
    pub edition_threshold: f64,
    /// Minimum fuzzy author similarity for edition matching.
    #[arg(long, default_value_t = 0.85)]
    pub author_threshold: f64,
    /// Minimum fuzzy title similarity for edition matching.
    #[arg(long, default_value_t = 0.85)]
    pub title_threshold: f64,
    /// Penalty for 1-2 and 2-1 beads.
    #[arg(long, default_value_t = 0.25)]
    pub split_penalty: f64,
    /// Penalty for 1-0 and 0-1 beads.
    #[arg(long, default_value_t = 0.45)]
    pub gap_penalty: f64,
    /// Ruleset whose identity is stamped into the variant manifests.
    #[arg(long)]
    pub ruleset: Option<PathBuf>,
}

/// The four (pruning, separation) combinations in report row order.
pub const VARIANT_ORDER: [(bool, bool); 4] =
    [(false, false), (true, false), (false, true), (true, true)];

#[derive(Serialize)]
struct VariantSummary {
    variant_id: String,
    train: usize,
    test: usize,
}

#[derive(Serialize)]
struct BuildReport {
    pairs: usize,
    duplicates_removed: usize,
    novels: Vec<NovelOutcome>,
    diagnostics: Vec<MatchDiagnostic>,
    variants: Vec<VariantSummary>,
    errors: Vec<String>,
}

fn load_editions(
    records_text: &str,
    base: &Path,
) -> Result<(Vec<Edition>, Vec<Edition>), Failure> {
    let records = edition_records_from_jsonl(records_text)
        .map_err(|e| util::validation(e.to_string()))?;
    let mut problems = Vec::new();
    let mut seen_ids = std::collections::HashSet::new();
    let mut historical = Vec::new();
    let mut contemporary = Vec::new();
    for record in &records {
        let label = if record.id.is_empty() { "<no id>" } else { &record.id };
        if record.id.is_empty() {
            problems.push("edition with empty id".to_string());
        } else if !seen_ids.insert(record.id.clone()) {
            problems.push(format!("{label}: duplicate edition id"));
        }
        if record.year <= 0 {
            problems.push(format!("{label}: year must be positive, got {}", record.year));
        }
        let format: DocumentFormat = match record.format.parse() {
            Ok(f) => f,
            Err(e) => {
                problems.push(format!("{label}: {e}"));
                continue;
            }
        };
        let path = base.join(&record.path);
        let document = match std::fs::read_to_string(&path) {
            Ok(d) => d,
            Err(e) => {
                problems.push(format!("{label}: {}: {e}", path.display()));
                continue;
            }
        };
        let paragraphs = match paragraphs_from_document(&document, format) {
            Ok(p) => p,
            Err(e) => {
                problems.push(format!("{label}: {}: {e}", path.display()));
                continue;
            }
        };
        let edition = Edition {
            id: record.id.clone(),
            source: record.source,
            author: record.author.clone(),
            title: record.title.clone(),
            year: record.year,
            paragraphs,
        };
        match record.source {
            EditionSource::HistoricalArchive => historical.push(edition),
            EditionSource::ContemporaryLibrary => contemporary.push(edition),
        }
    }
    if !problems.is_empty() {
        for p in &problems {
            eprintln!("manifest: {p}");
        }
        return Err(util::validation(format!(
            "{} manifest record(s) failed validation",
            problems.len()
        )));
    }
    Ok((historical, contemporary))
}

pub fn run(args: &BuildArgs) -> Result<(), Failure> {
    let ruleset = util::load_ruleset(args.ruleset.as_deref())?;
    let records_text = util::read_input(&args.manifest)?;
    let base = args
        .manifest
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."))
        .to_path_buf();
    let (historical, contemporary) = load_editions(&records_text, &base)?;

    let config = PipelineConfig {
        bead_threshold: args.bead_threshold,
        edition_threshold: args.edition_threshold,
        match_config: MatchConfig {
            author_threshold: args.author_threshold,
            title_threshold: args.title_threshold,
            ..MatchConfig::default()
        },
        align_config: AlignConfig {
            split_penalty: args.split_penalty,
            gap_penalty: args.gap_penalty,
        },
    };
    let report = run_pipeline(&historical, &contemporary, &config);
    for diagnostic in &report.diagnostics {
        eprintln!("warning: {diagnostic}");
    }
    for novel in &report.novels {
        if novel.gated {
            eprintln!(
                "warning: {}: edition pair gated (quality {:.3})",
                novel.novel_id, novel.quality
            );
        }
    }
    if report.pairs.is_empty() {
        return Err(util::validation("pipeline produced no paragraph pairs"));
    }

    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| Failure::Io(format!("{}: {e}", args.out_dir.display())))?;
    let out = |name: &str| args.out_dir.join(name);
    util::write_output(&out("pairs.tsv"), &pairs_to_tsv(&report.pairs))?;

    let stamp = util::ruleset_stamp(&ruleset);
    let tool_version = diachron_core::VERSION.to_string();
    let mut summaries = Vec::new();
    let mut stats_rows: Vec<(bool, bool, VariantStats)> = Vec::new();
    let mut errors = Vec::new();
    for (pruning, separation) in VARIANT_ORDER {
        match build_variant(&report.pairs, pruning, separation, args.seed) {
            Ok(variant) => {
                let manifest =
                    VariantManifest::new(&variant, &config, stamp.clone(), tool_version.clone());
                util::write_output(
                    &out(&format!("{}.json", variant.id)),
                    &variant_manifest_json(&manifest),
                )?;
                stats_rows.push((pruning, separation, variant_stats(&variant, &report.pairs)));
                summaries.push(VariantSummary {
                    variant_id: variant.id.clone(),
                    train: variant.train.len(),
                    test: variant.test.len(),
                });
            }
            Err(e) => {
                let id = diachron_core::corpus::variant_id(pruning, separation);
                eprintln!("variant {id}: {e}");
                errors.push(format!("{id}: {e}"));
            }
        }
    }

    let table = render_stats_table(&stats_rows);
    util::write_output(&out("stats.txt"), &table)?;
    let build_report = BuildReport {
        pairs: report.pairs.len(),
        duplicates_removed: report.duplicates_removed,
        novels: report.novels,
        diagnostics: report.diagnostics,
        variants: summaries,
        errors: errors.clone(),
    };
    let mut report_json =
        serde_json::to_string_pretty(&build_report).expect("build report serializes");
    report_json.push('\n');
    util::write_output(&out("report.json"), &report_json)?;

    println!(
        "{} pairs from {} novel(s), {} duplicate(s) removed",
        report.pairs.len(),
        build_report.novels.len(),
        report.duplicates_removed
    );
    print!("{table}");
    if !errors.is_empty() {
        return Err(util::validation(format!(
            "{} variant(s) could not be built",
            errors.len()
        )));
    }
    Ok(())
}
